#include "dmp/models/generator.hpp"

#include <cstdio>
#include <random>

#include "dmp/grad/ops.hpp"
#include "dmp/grad/seq_ops.hpp"
#include "dmp/models/geometry_ops.hpp"

namespace dmp::models {

using skeleton::kNumJoints;
using skeleton::kNumShape;

std::string joint_prefix(int joint) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "gen.j%02d", joint);
  return buf;
}

nlohmann::json GeneratorConfig::to_json() const {
  return {{"feature_dim", feature_dim}, {"cam_dim", cam_dim},         {"hidden_dim", hidden_dim},
          {"temporal", temporal},       {"init_scale", init_scale},   {"focal", intrinsics.focal},
          {"res", intrinsics.res},      {"joints", kNumJoints}};
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& j) {
  GeneratorConfig c;
  c.feature_dim = j.at("feature_dim").get<Eigen::Index>();
  c.cam_dim = j.at("cam_dim").get<Eigen::Index>();
  c.hidden_dim = j.at("hidden_dim").get<Eigen::Index>();
  c.temporal = j.at("temporal").get<bool>();
  c.init_scale = j.at("init_scale").get<double>();
  c.intrinsics.focal = j.at("focal").get<double>();
  c.intrinsics.res = j.at("res").get<double>();
  return c;
}

skeleton::MotionSequence GeneratorOutput::to_motion(double frame_rate) const {
  skeleton::MotionSequence seq;
  seq.frame_rate = frame_rate;
  seq.shape = shape;
  seq.frames.resize(pose_axis_angle.size());
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    seq.frames[t].joints = pose_axis_angle[t];
    seq.frames[t].trans = trans[t];
  }
  return seq;
}

Generator::Generator(GeneratorConfig cfg) : cfg_(cfg) {
  const Eigen::Index enc_out = cfg_.feature_dim + cfg_.cam_dim;
  for (int j = 0; j < kNumJoints; ++j) {
    const std::string p = joint_prefix(j);
    enc_w_.push_back(&params_.add(p + ".enc.W", enc_out, kObsDim));
    enc_b_.push_back(&params_.add(p + ".enc.b", enc_out, 1));
    temporal_.push_back(TemporalEncoder::create(params_, p + ".temporal", cfg_.feature_dim, cfg_.hidden_dim));
    head_w_.push_back(&params_.add(p + ".head.W", 6, cfg_.feature_dim));
    head_b_.push_back(&params_.add(p + ".head.b", 6, 1));
  }
  cam_w_ = &params_.add("gen.cam.W", 3, kNumJoints * cfg_.cam_dim);
  cam_b_ = &params_.add("gen.cam.b", 3, 1);
  shape_w_ = &params_.add("gen.shape.W", kNumShape, kNumJoints * cfg_.cam_dim);
  shape_b_ = &params_.add("gen.shape.b", kNumShape, 1);
}

void Generator::init(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int j = 0; j < kNumJoints; ++j) {
    grad::init_uniform_fan_in(*enc_w_[j], rng);
    enc_b_[j]->values.setZero();
    temporal_[j].init(rng);
    grad::init_uniform_fan_in(*head_w_[j], rng);
    head_b_[j]->values << 1.0, 0.0, 0.0, 0.0, 1.0, 0.0;
  }
  grad::init_uniform_fan_in(*cam_w_, rng);
  cam_b_->values << cfg_.init_scale, 0.0, 0.0;
  grad::init_uniform_fan_in(*shape_w_, rng);
  shape_b_->values.setZero();
  params_.zero_grad();
}

void Generator::encode(grad::Tape& tape, const Matrix& obs, GeneratorGraph& g) const {
  if (obs.rows() != kObsDim * kNumJoints) {
    grad::throw_shape_mismatch_(obs.rows(), obs.cols(), kObsDim * kNumJoints, obs.cols());
  }
  const double c = cfg_.intrinsics.center();
  std::vector<Var> feats, cams;
  for (int j = 0; j < kNumJoints; ++j) {
    Matrix x = obs.middleRows(kObsDim * j, kObsDim);
    x.topRows(2) = (x.topRows(2).array() - c) / c;
    const Var e = grad::tanh(
        grad::linear(tape.param(*enc_w_[j]), tape.param(*enc_b_[j]), tape.constant(std::move(x))));
    feats.push_back(grad::rows(e, 0, cfg_.feature_dim));
    cams.push_back(grad::rows(e, cfg_.feature_dim, cfg_.cam_dim));
  }
  g.features = grad::vconcat(feats);
  g.cam_features = grad::vconcat(cams);
}

GeneratorGraph Generator::forward(grad::Tape& tape, const Matrix& obs, SeqLayout layout,
                                  ExecPolicy policy) const {
  if (obs.cols() != layout.cols()) grad::throw_shape_mismatch_(obs.rows(), obs.cols(), obs.rows(), layout.cols());
  GeneratorGraph g;
  g.layout = layout;
  encode(tape, obs, g);

  g.ftilde = cfg_.temporal ? temporal_bank(tape, temporal_, g.features, layout, policy) : g.features;

  std::vector<Var> heads;
  for (int j = 0; j < kNumJoints; ++j) {
    const Var fj = grad::rows(g.ftilde, j * cfg_.feature_dim, cfg_.feature_dim);
    heads.push_back(grad::linear(tape.param(*head_w_[j]), tape.param(*head_b_[j]), fj));
  }
  g.pose6d = grad::vconcat(heads);
  g.rotmats = sixd_to_rotmat(g.pose6d);

  g.weak_cam = grad::linear(tape.param(*cam_w_), tape.param(*cam_b_), g.cam_features);
  g.trans = weak_camera_translation(g.weak_cam, cfg_.intrinsics);
  const Var beta_frames = grad::linear(tape.param(*shape_w_), tape.param(*shape_b_), g.cam_features);
  g.beta = grad::segment_mean(beta_frames, layout);
  return g;
}

GeneratorOutput Generator::output(const GeneratorGraph& g, Eigen::Index clip) const {
  const SeqLayout l = g.layout;
  GeneratorOutput out;
  const auto frames = static_cast<std::size_t>(l.frames);
  out.pose6d.resize(frames);
  out.pose_rotmats.resize(frames);
  out.pose_axis_angle.resize(frames);
  out.weak_cam.resize(frames);
  out.trans.resize(frames);
  out.tilde_features.resize(g.ftilde.rows(), l.frames);
  for (std::ptrdiff_t t = 0; t < l.frames; ++t) {
    const auto c = l.col(t, clip);
    const auto ti = static_cast<std::size_t>(t);
    for (int j = 0; j < kNumJoints; ++j) {
      out.pose6d[ti][j] = rot3::RotationSixD::from_array(g.pose6d.value().col(c).data() + 6 * j);
      out.pose_rotmats[ti][j].m = Eigen::Map<const rot3::Mat3>(g.rotmats.value().col(c).data() + 9 * j);
      out.pose_axis_angle[ti][j] = rot3::rotmat_to_axis_angle(out.pose_rotmats[ti][j]);
    }
    out.weak_cam[ti] = {g.weak_cam.value()(0, c), g.weak_cam.value()(1, c), g.weak_cam.value()(2, c)};
    out.trans[ti] = g.trans.value().col(c);
    out.tilde_features.col(t) = g.ftilde.value().col(c);
  }
  out.shape.beta = g.beta.value().col(clip);
  return out;
}

std::vector<std::string> Generator::temporal_param_names(int joint) const {
  const std::string prefix = joint_prefix(joint) + ".temporal.";
  std::vector<std::string> names;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name.starts_with(prefix)) names.push_back(params_[i].name);
  }
  return names;
}

}  // namespace dmp::models
