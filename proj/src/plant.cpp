#include "fingerkin/plant.hpp"

#include <algorithm>
#include <cmath>

#include "fingerkin/errors.hpp"
#include "fingerkin/kinematics.hpp"

namespace fingerkin {

namespace {

Vec3 vec_or(const KeyValueFile& kv, const std::string& key, const Vec3& fallback) {
  return kv.has(key) ? kv.vec3(key) : fallback;
}

}  // namespace

PlantConfig plant_config_from_keyvalue(const KeyValueFile& kv) {
  PlantConfig c;
  c.name = kv.has("name") ? kv.text("name") : c.name;
  c.counts_per_unit = vec_or(kv, "encoder_counts_per_unit", c.counts_per_unit);
  c.tau = vec_or(kv, "velocity_lag_s", c.tau);
  c.velocity_gain = vec_or(kv, "velocity_gain", c.velocity_gain);
  c.backlash_m1 = kv.number_or("backlash_m1_rad", c.backlash_m1);
  c.m1_noise_rad = kv.number_or("m1_noise_rad", c.m1_noise_rad);
  c.dt_sim = kv.number_or("dt_sim_s", c.dt_sim);
  for (int i = 0; i < 3; ++i)
    if (c.counts_per_unit[i] < 0 || c.tau[i] < 0 || !(c.velocity_gain[i] > 0))
      throw FingerError(ErrorCode::InvalidParams, kv.origin() + ": plant knobs must be non-negative, gains positive");
  if (!(c.dt_sim > 0) || c.backlash_m1 < 0 || c.m1_noise_rad < 0)
    throw FingerError(ErrorCode::InvalidParams, kv.origin() + ": dt_sim_s must be positive");
  const auto unused = kv.unused_keys();
  if (!unused.empty()) throw FingerError(ErrorCode::InvalidParams, kv.origin() + ": unknown key '" + unused.front() + "'");
  return c;
}

PlantConfig load_plant_config(const std::string& path) { return plant_config_from_keyvalue(KeyValueFile::load(path)); }

PlantConfig plant_preset(const std::string& name) {
  PlantConfig c;
  if (name == "perfect") return c;
  if (name == "abduction-degraded") {
    // Coarse hall sensor, geared backlash and a sluggish abduction drive.
    c.name = name;
    c.counts_per_unit = Vec3(2000.0, 131072.0, 131072.0);
    c.tau = Vec3(0.03, 0.0, 0.0);
    c.velocity_gain = Vec3(0.8, 1.0, 1.0);
    c.backlash_m1 = 0.004;
    c.m1_noise_rad = 0.0002;
    return c;
  }
  throw FingerError(ErrorCode::InvalidInput, "unknown plant preset '" + name + "'");
}

double quantize(double v, double counts_per_unit) {
  if (counts_per_unit <= 0) return v;
  return std::round(v * counts_per_unit) / counts_per_unit;
}

PlantState plant_step(const PlantState& s, const Vec3& command, double dt, const PlantConfig& cfg,
                      const KinematicParams& p) {
  PlantState n = s;
  n.command = command;
  for (int i = 0; i < 3; ++i) {
    const double vmax = p.v_max[i];
    const double target = std::clamp(cfg.velocity_gain[i] * command[i], -vmax, vmax);
    double v = target;
    if (cfg.tau[i] > 0) v = s.velocity[i] + (target - s.velocity[i]) * (1.0 - std::exp(-dt / cfg.tau[i]));
    v = std::clamp(v, -vmax, vmax);
    double x = s.motor[i] + v * dt;
    const Range& lim = p.motor_limits[i];
    if (x < lim.lo || x > lim.hi) {
      x = std::clamp(x, lim.lo, lim.hi);
      v = 0.0;
    }
    n.motor[i] = x;
    n.velocity[i] = v;
    n.output[i] = x;
  }
  if (cfg.backlash_m1 > 0) {
    const double half = 0.5 * cfg.backlash_m1;
    double out = s.output[0];
    if (n.motor[0] - out > half) out = n.motor[0] - half;
    if (n.motor[0] - out < -half) out = n.motor[0] + half;
    n.output[0] = std::clamp(out, p.motor_limits[0].lo, p.motor_limits[0].hi);
  }
  n.t = s.t + dt;
  return n;
}

MotorState read_encoders(const PlantState& s, const PlantConfig& cfg) {
  MotorState m;
  m.m1 = quantize(s.motor[0], cfg.counts_per_unit[0]);
  m.m2 = quantize(s.motor[1], cfg.counts_per_unit[1]);
  m.m3 = quantize(s.motor[2], cfg.counts_per_unit[2]);
  return m;
}

Plant::Plant(const KinematicParams& p, PlantConfig cfg, std::uint64_t seed, const MotorState& start)
    : params_(p), cfg_(std::move(cfg)), rng_(seed) {
  state_.motor = start.vec();
  state_.output = start.vec();
  history_.push_back(state_.output);
}

MotorState Plant::read() {
  PlantState s = state_;
  if (cfg_.m1_noise_rad > 0) s.motor[0] += cfg_.m1_noise_rad * noise_(rng_);
  MotorState m = read_encoders(s, cfg_);
  // An encoder cannot report past the hard stop.
  for (int i = 0; i < 3; ++i) {
    const double v = std::clamp(m[i], params_.motor_limits[i].lo, params_.motor_limits[i].hi);
    if (i == 0) m.m1 = v;
    if (i == 1) m.m2 = v;
    if (i == 2) m.m3 = v;
  }
  return m;
}

void Plant::advance_steps(long steps) {
  for (long k = 0; k < steps; ++k) {
    state_ = plant_step(state_, cmd_, cfg_.dt_sim, cfg_, params_);
    ++step_;
    state_.t = double(step_) * cfg_.dt_sim;
    history_.push_back(state_.output);
  }
}

void Plant::advance(double duration) { advance_steps(std::lround(duration / cfg_.dt_sim)); }

MotorState Plant::motors_at(double t) const {
  const double u = t / cfg_.dt_sim;
  if (u <= 0) return MotorState::from(history_.front());
  const auto last = static_cast<double>(history_.size() - 1);
  if (u >= last) return MotorState::from(history_.back());
  const auto i = static_cast<std::size_t>(std::floor(u));
  const double f = u - double(i);
  return MotorState::from(history_[i] + f * (history_[i + 1] - history_[i]));
}

TrialTrace sample_trace(const Plant& plant, double fps, double duration, double t0) {
  if (!(fps > 0)) throw FingerError(ErrorCode::InvalidInput, "fps must be positive");
  TrialTrace tr;
  tr.fps = fps;
  const long n = std::max(0L, std::lround(duration * fps));
  std::optional<JointState> hint;
  for (long k = 0; k <= n; ++k) {
    const double t = t0 + double(k) / fps;
    const JointState q = m2q(plant.motors_at(t), plant.params(), hint);
    hint = q;
    tr.t.push_back(double(k) / fps);
    tr.x.push_back(fk_joints(q, plant.params()));
  }
  return tr;
}

}  // namespace fingerkin
