#include "dmp/harness/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "dmp/error.hpp"
#include "dmp/grad/param.hpp"

namespace dmp::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("bad value for '" + std::string(key) + "': '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean for '" + std::string(key) + "': '" + std::string(v) + "'");
}

// One entry per key: how to print it and how to parse it.
struct Field {
  const char* key;
  std::function<std::string(const TrainConfig&)> get;
  std::function<void(TrainConfig&, std::string_view)> set;
};

#define DMP_INT_FIELD(name, member)                                                   \
  Field {                                                                             \
    name, [](const TrainConfig& c) { return std::to_string(c.member); },              \
        [](TrainConfig& c, std::string_view v) {                                      \
          c.member = parse_number<decltype(c.member)>(name, v);                       \
        }                                                                             \
  }
#define DMP_DOUBLE_FIELD(name, member)                                                \
  Field {                                                                             \
    name, [](const TrainConfig& c) { return fmt_double(c.member); },                  \
        [](TrainConfig& c, std::string_view v) { c.member = parse_number<double>(name, v); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      DMP_INT_FIELD("clips", clips),
      DMP_INT_FIELD("frames", frames),
      DMP_DOUBLE_FIELD("noise_px", noise_px),
      DMP_DOUBLE_FIELD("frame_rate", frame_rate),
      DMP_INT_FIELD("data_seed", data_seed),
      DMP_DOUBLE_FIELD("focal", intrinsics.focal),
      DMP_DOUBLE_FIELD("res", intrinsics.res),
      DMP_INT_FIELD("iterations", iterations),
      DMP_INT_FIELD("batch", batch),
      DMP_INT_FIELD("real_batch", real_batch),
      DMP_INT_FIELD("disc_update_every", disc_update_every),
      DMP_DOUBLE_FIELD("lr", lr),
      DMP_DOUBLE_FIELD("weight_decay", weight_decay),
      DMP_INT_FIELD("seed", seed),
      DMP_DOUBLE_FIELD("lambda_3d", weights.w3d),
      DMP_DOUBLE_FIELD("lambda_2d", weights.w2d),
      DMP_DOUBLE_FIELD("lambda_pose", weights.pose),
      DMP_DOUBLE_FIELD("lambda_beta", weights.beta),
      DMP_DOUBLE_FIELD("lambda_reg", weights.reg),
      DMP_DOUBLE_FIELD("lambda_adv", weights.adv),
      Field{"lsgan_literal", [](const TrainConfig& c) { return std::string(c.lsgan_literal ? "true" : "false"); },
            [](TrainConfig& c, std::string_view v) { c.lsgan_literal = parse_bool("lsgan_literal", v); }},
      DMP_INT_FIELD("feature_dim", feature_dim),
      DMP_INT_FIELD("cam_dim", cam_dim),
      DMP_INT_FIELD("hidden_dim", hidden_dim),
      DMP_DOUBLE_FIELD("init_scale", init_scale),
      DMP_INT_FIELD("threads", threads),
  };
  return f;
}

#undef DMP_INT_FIELD
#undef DMP_DOUBLE_FIELD

}  // namespace

void LossWeights::validate() const {
  for (double w : {w3d, w2d, pose, beta, reg, adv}) {
    if (!(w >= 0.0)) throw ConfigError("loss weights must be non-negative");
  }
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::sep_t: return "sep_t";
    case Variant::sep_t_reg: return "sep_t_reg";
  }
  return "unknown";
}

Variant parse_variant(std::string_view s) {
  for (Variant v : kAllVariants) {
    if (variant_name(v) == s) return v;
  }
  throw ConfigError("unknown variant '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  weights.validate();
  if (clips < 2) throw ConfigError("clips must be >= 2");
  if (frames < 3) throw ConfigError("frames must be >= 3");
  if (!(noise_px >= 0.0)) throw ConfigError("noise_px must be >= 0");
  if (!(frame_rate > 0.0)) throw ConfigError("frame_rate must be > 0");
  if (!(intrinsics.focal > 0.0) || !(intrinsics.res > 0.0)) throw ConfigError("focal and res must be > 0");
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  if (batch < 1 || real_batch < 1) throw ConfigError("batch sizes must be >= 1");
  if (disc_update_every < 1) throw ConfigError("disc_update_every must be >= 1");
  if (!(lr > 0.0) || !(weight_decay >= 0.0)) throw ConfigError("bad optimizer settings");
  if (feature_dim < 1 || cam_dim < 1 || hidden_dim < 1) throw ConfigError("model dims must be >= 1");
  if (!(init_scale > 0.0)) throw ConfigError("init_scale must be > 0");
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

std::string TrainConfig::to_text() const {
  std::string out;
  for (const Field& f : fields()) out += std::string(f.key) + " = " + f.get(*this) + "\n";
  return out;
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const Field& f : fields()) j[f.key] = nlohmann::json::parse(f.get(*this));
  return j;
}

std::uint64_t TrainConfig::hash() const {
  const std::string t = to_text();
  return grad::fnv1a(t.data(), t.size());
}

void TrainConfig::set(std::string_view key, std::string_view value) {
  for (const Field& f : fields()) {
    if (key == f.key) {
      f.set(*this, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void TrainConfig::apply_text(std::string_view text) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": repeated key '" + std::string(key) + "'");
    }
    set(key, value);
  }
}

TrainConfig TrainConfig::from_text(std::string_view text) {
  TrainConfig c;
  c.apply_text(text);
  c.validate();
  return c;
}

TrainConfig TrainConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace dmp::harness
