#include "dmp/harness/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dmp/error.hpp"

namespace dmp::harness {

using skeleton::kNumJoints;
using skeleton::kNumShape;

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

template <typename T>
T number(std::string_view tok, std::string_view what) {
  T v{};
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw FormatError("bad " + std::string(what) + " '" + std::string(tok) + "'");
  }
  return v;
}

// Value of `key=` in a header token.
std::string_view header_field(std::string_view tok, std::string_view key) {
  if (tok.size() <= key.size() + 1 || tok.substr(0, key.size()) != key || tok[key.size()] != '=') {
    throw FormatError("expected header field " + std::string(key) + "=..., got '" + std::string(tok) + "'");
  }
  return tok.substr(key.size() + 1);
}

std::string next_line(std::istream& in, std::string_view what) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("unexpected end of file reading " + std::string(what));
  return line;
}

std::vector<double> values(std::string_view line, std::size_t expected, std::string_view what) {
  const auto toks = split(line);
  if (toks.size() != expected) {
    throw FormatError(std::string(what) + ": expected " + std::to_string(expected) + " values, got " +
                      std::to_string(toks.size()));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (auto t : toks) out.push_back(number<double>(t, what));
  return out;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw FormatError("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw FormatError("cannot write " + p.string());
  return out;
}

std::string clip_stem(std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "clip_%04zu", i);
  return buf;
}

std::string motion_name(std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "motion_%04zu.mseq", i);
  return buf;
}

}  // namespace

void write_motion(std::ostream& out, const skeleton::MotionSequence& m) {
  out << "MSEQ v1 T=" << m.length() << " J=" << kNumJoints << " fps=";
  put(out, m.frame_rate);
  out << '\n';
  for (const auto& f : m.frames) {
    for (int j = 0; j < kNumJoints; ++j) {
      for (int k = 0; k < 3; ++k) {
        put(out, f.joints[j].v[k]);
        out << ' ';
      }
    }
    put(out, f.trans.x());
    out << ' ';
    put(out, f.trans.y());
    out << ' ';
    put(out, f.trans.z());
    out << '\n';
  }
  out << "BETA";
  for (int k = 0; k < kNumShape; ++k) {
    out << ' ';
    put(out, m.shape.beta[k]);
  }
  out << '\n';
}

skeleton::MotionSequence read_motion(std::istream& in) {
  const std::string header = next_line(in, "MSEQ header");
  const auto head = split(header);
  if (head.size() != 5 || head[0] != "MSEQ" || head[1] != "v1") throw FormatError("not an MSEQ v1 file");
  const auto T = number<std::ptrdiff_t>(header_field(head[2], "T"), "frame count");
  const auto J = number<int>(header_field(head[3], "J"), "joint count");
  if (T < 0 || J != kNumJoints) throw FormatError("unsupported MSEQ dimensions");
  skeleton::MotionSequence m;
  m.frame_rate = number<double>(header_field(head[4], "fps"), "frame rate");
  m.frames.resize(static_cast<std::size_t>(T));
  for (auto& f : m.frames) {
    const auto v = values(next_line(in, "MSEQ frame"), 3 * kNumJoints + 3, "MSEQ frame");
    for (int j = 0; j < kNumJoints; ++j) f.joints[j].v = {v[3 * j], v[3 * j + 1], v[3 * j + 2]};
    f.trans = {v[3 * kNumJoints], v[3 * kNumJoints + 1], v[3 * kNumJoints + 2]};
  }
  const std::string beta_line = next_line(in, "BETA line");
  const auto toks = split(beta_line);
  if (toks.empty() || toks[0] != "BETA") throw FormatError("missing BETA line");
  const auto v = values(std::string_view(beta_line).substr(beta_line.find("BETA") + 4), kNumShape, "BETA");
  for (int k = 0; k < kNumShape; ++k) m.shape.beta[k] = v[static_cast<std::size_t>(k)];
  return m;
}

void write_motion(const std::filesystem::path& path, const skeleton::MotionSequence& m) {
  std::ofstream out = open_out(path);
  write_motion(out, m);
}

skeleton::MotionSequence read_motion(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return read_motion(in);
}

void write_observations(std::ostream& out, const synth::TrainingClip& clip) {
  out << "OBS v1 T=" << clip.frames() << " J=" << kNumJoints << " focal=";
  put(out, clip.intrinsics.focal);
  out << " res=";
  put(out, clip.intrinsics.res);
  out << " seed=" << clip.seed << '\n';
  for (std::ptrdiff_t t = 0; t < clip.frames(); ++t) {
    for (Eigen::Index r = 0; r < clip.observations.rows(); ++r) {
      put(out, clip.observations(r, t));
      out << ' ';
    }
    for (Eigen::Index r = 0; r < clip.gt_keypoints_2d.rows(); ++r) {
      if (r > 0) out << ' ';
      put(out, clip.gt_keypoints_2d(r, t));
    }
    out << '\n';
  }
}

void read_observations(std::istream& in, synth::TrainingClip& clip) {
  const std::string header = next_line(in, "OBS header");
  const auto head = split(header);
  if (head.size() != 7 || head[0] != "OBS" || head[1] != "v1") throw FormatError("not an OBS v1 file");
  const auto T = number<std::ptrdiff_t>(header_field(head[2], "T"), "frame count");
  const auto J = number<int>(header_field(head[3], "J"), "joint count");
  if (T < 0 || J != kNumJoints) throw FormatError("unsupported OBS dimensions");
  clip.intrinsics.focal = number<double>(header_field(head[4], "focal"), "focal");
  clip.intrinsics.res = number<double>(header_field(head[5], "res"), "res");
  clip.seed = number<std::uint64_t>(header_field(head[6], "seed"), "seed");
  clip.observations.resize(3 * kNumJoints, T);
  clip.gt_keypoints_2d.resize(2 * kNumJoints, T);
  for (std::ptrdiff_t t = 0; t < T; ++t) {
    const auto v = values(next_line(in, "OBS frame"), 5 * kNumJoints, "OBS frame");
    for (int r = 0; r < 3 * kNumJoints; ++r) clip.observations(r, t) = v[static_cast<std::size_t>(r)];
    for (int r = 0; r < 2 * kNumJoints; ++r) {
      clip.gt_keypoints_2d(r, t) = v[static_cast<std::size_t>(3 * kNumJoints + r)];
    }
  }
}

void write_clip(const std::filesystem::path& stem, const synth::TrainingClip& clip) {
  write_motion(std::filesystem::path(stem.string() + ".mseq"), clip.gt_motion);
  std::ofstream out = open_out(stem.string() + ".obs");
  write_observations(out, clip);
}

synth::TrainingClip read_clip(const std::filesystem::path& stem) {
  synth::TrainingClip clip;
  clip.gt_motion = read_motion(std::filesystem::path(stem.string() + ".mseq"));
  {
    std::ifstream in = open_in(stem.string() + ".obs");
    read_observations(in, clip);
  }
  if (clip.observations.cols() != clip.gt_motion.length()) throw FormatError("MSEQ and OBS frame counts differ");
  const auto& tree = skeleton::default_tree();
  const std::ptrdiff_t T = clip.gt_motion.length();
  clip.gt_keypoints_3d.resize(3 * kNumJoints, T);
  clip.gt_camera.resize(static_cast<std::size_t>(T));
  for (std::ptrdiff_t t = 0; t < T; ++t) {
    skeleton::PoseFrame local = clip.gt_motion.frames[static_cast<std::size_t>(t)];
    const rot3::Vec3 trans = local.trans;
    local.trans.setZero();
    const auto pos = skeleton::forward_kinematics(tree, local, clip.gt_motion.shape);
    for (int j = 0; j < kNumJoints; ++j) clip.gt_keypoints_3d.col(t).segment<3>(3 * j) = 1000.0 * pos[j];
    clip.gt_camera[static_cast<std::size_t>(t)] = {camera::scale_for_depth(trans.z(), clip.intrinsics), trans.x(),
                                                   trans.y()};
  }
  return clip;
}

void save_dataset(const std::filesystem::path& dir, const synth::Dataset& data) {
  namespace fs = std::filesystem;
  for (const char* sub : {"train", "eval", "real"}) fs::create_directories(dir / sub);
  for (std::size_t i = 0; i < data.train.size(); ++i) write_clip(dir / "train" / clip_stem(i), data.train[i]);
  for (std::size_t i = 0; i < data.eval.size(); ++i) write_clip(dir / "eval" / clip_stem(i), data.eval[i]);
  for (std::size_t i = 0; i < data.real.size(); ++i) write_motion(dir / "real" / motion_name(i), data.real[i]);
  const nlohmann::json manifest = {{"format", "dmp-dataset-1"},
                                   {"train", data.train.size()},
                                   {"eval", data.eval.size()},
                                   {"real", data.real.size()},
                                   {"train_seeds", data.train_seeds},
                                   {"eval_seeds", data.eval_seeds},
                                   {"real_seeds", data.real_seeds}};
  std::ofstream out = open_out(dir / "dataset.json");
  out << manifest.dump(2) << '\n';
}

synth::Dataset load_dataset(const std::filesystem::path& dir) {
  nlohmann::json manifest;
  try {
    std::ifstream in = open_in(dir / "dataset.json");
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("dataset.json: ") + e.what());
  }
  synth::Dataset data;
  const auto n_train = manifest.at("train").get<std::size_t>();
  const auto n_eval = manifest.at("eval").get<std::size_t>();
  const auto n_real = manifest.at("real").get<std::size_t>();
  data.train_seeds = manifest.at("train_seeds").get<std::vector<std::uint64_t>>();
  data.eval_seeds = manifest.at("eval_seeds").get<std::vector<std::uint64_t>>();
  data.real_seeds = manifest.at("real_seeds").get<std::vector<std::uint64_t>>();
  for (std::size_t i = 0; i < n_train; ++i) data.train.push_back(read_clip(dir / "train" / clip_stem(i)));
  for (std::size_t i = 0; i < n_eval; ++i) data.eval.push_back(read_clip(dir / "eval" / clip_stem(i)));
  for (std::size_t i = 0; i < n_real; ++i) data.real.push_back(read_motion(dir / "real" / motion_name(i)));
  return data;
}

}  // namespace dmp::harness
