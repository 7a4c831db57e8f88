#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fingerkin/keyvalue.hpp"
#include "fingerkin/params.hpp"
#include "fingerkin/types.hpp"

namespace fingerkin {

/// Imperfection knobs. Zero means "off" for counts, tau, backlash and noise.
struct PlantConfig {
  std::string name = "perfect";
  Vec3 counts_per_unit = Vec3::Zero();  // m1 per rad, m2/m3 per mm
  Vec3 tau = Vec3::Zero();              // first-order velocity lag, s
  Vec3 velocity_gain = Vec3::Ones();    // realized / commanded velocity
  double backlash_m1 = 0.0;             // rad, full dead-band width
  double m1_noise_rad = 0.0;            // encoder noise sigma on m1
  double dt_sim = 0.001;                // s
};

/// Reads a plant section; every key is optional and defaults to the perfect plant.
PlantConfig plant_config_from_keyvalue(const KeyValueFile& kv);
PlantConfig load_plant_config(const std::string& path);
/// "perfect" or "abduction-degraded".
PlantConfig plant_preset(const std::string& name);

struct PlantState {
  Vec3 motor = Vec3::Zero();     // motor-side positions
  Vec3 output = Vec3::Zero();    // after the m1 backlash; m2, m3 equal motor
  Vec3 velocity = Vec3::Zero();  // realized motor velocity
  Vec3 command = Vec3::Zero();
  double t = 0.0;
};

/// One integration step. Velocity follows gain * command through the lag,
/// saturates at v_max, and positions stop hard at the motor limits.
PlantState plant_step(const PlantState& s, const Vec3& command, double dt, const PlantConfig& cfg,
                      const KinematicParams& p);

/// Motor-side positions rounded to the encoder grid (no noise).
MotorState read_encoders(const PlantState& s, const PlantConfig& cfg);

double quantize(double v, double counts_per_unit);

/// Single-owner simulated finger. Records the output positions at every
/// simulation step so traces can be resampled at any frame rate.
class Plant {
 public:
  Plant(const KinematicParams& p, PlantConfig cfg, std::uint64_t seed = 0, const MotorState& start = {});

  MotorState read();
  void command(const Vec3& velocity) { cmd_ = velocity; }
  /// Integrates for `steps` simulation steps with the current command.
  void advance_steps(long steps);
  /// Integrates for `duration` seconds, rounded to whole simulation steps.
  void advance(double duration);

  double time() const { return state_.t; }
  const PlantState& state() const { return state_; }
  MotorState true_motors() const { return MotorState::from(state_.output); }
  const PlantConfig& config() const { return cfg_; }
  const KinematicParams& params() const { return params_; }

  /// Output positions at time t, linearly interpolated, held past the ends.
  MotorState motors_at(double t) const;

 private:
  KinematicParams params_;
  PlantConfig cfg_;
  PlantState state_;
  Vec3 cmd_ = Vec3::Zero();
  long step_ = 0;
  std::vector<Vec3> history_;  // output at step_ * dt_sim
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

struct TrialTrace {
  double fps = 30.0;
  std::vector<double> t;
  std::vector<Vec3> x;
  double sigma_mm = 0.0;  // per-trial measurement uncertainty, 0 if unknown

  std::size_t size() const { return x.size(); }
  bool empty() const { return x.empty(); }
};

/// Samples fk(output) at t0 + k / fps for k = 0 .. round(duration * fps).
TrialTrace sample_trace(const Plant& plant, double fps, double duration, double t0 = 0.0);

}  // namespace fingerkin
