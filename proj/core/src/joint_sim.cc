// Copyright 2026 The frictionadapt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "frictionadapt/joint_sim.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "frictionadapt/errors.h"

namespace frictionadapt {
namespace {

constexpr double kMaxSpeed = 0.7;  // rad/s, operating envelope
constexpr double kTurnBand = 0.3;  // fraction of the extended range
constexpr double kGravity = 9.81;
constexpr double kMinLegDistance = 0.5;  // rad

struct Phase {
  double start = 0.0;
  double duration = 0.0;
  double q0 = 0.0;
  double v0 = 0.0;
  double accel = 0.0;
  bool ramp = false;
};

// Piecewise constant-acceleration motion.
class MotionProfile {
 public:
  explicit MotionProfile(double q_start) : q_end_(q_start) {}

  double end_time() const { return t_end_; }
  double end_position() const { return q_end_; }

  // Trapezoidal move to `q_to` at cruise speed `speed`, starting and ending
  // at rest.
  void AddLeg(double q_to, double speed, double ramp_duration) {
    const double distance = std::abs(q_to - q_end_);
    if (distance < speed * ramp_duration) {
      throw ConfigError("leg too short for its ramps");
    }
    const double dir = q_to > q_end_ ? 1.0 : -1.0;
    const double a = dir * speed / ramp_duration;
    const double ramp_distance = 0.5 * speed * ramp_duration;
    const double q_from = q_end_;
    Add(ramp_duration, q_from, 0.0, a, true);
    Add((distance - speed * ramp_duration) / speed,
        q_from + dir * ramp_distance, dir * speed, 0.0, false);
    Add(ramp_duration, q_to - dir * ramp_distance, dir * speed, -a, true);
    q_end_ = q_to;
  }

  // Samples the profile at t = i / rate for i in [0, floor(end * rate)).
  std::vector<JointSample> Sample(double rate, long max_samples = -1) const {
    long n = static_cast<long>(std::floor(t_end_ * rate + 1e-9));
    if (max_samples >= 0) n = std::min(n, max_samples);
    std::vector<JointSample> out;
    out.reserve(static_cast<std::size_t>(n));
    std::size_t k = 0;
    for (long i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / rate;
      while (k + 1 < phases_.size() &&
             t >= phases_[k].start + phases_[k].duration) {
        ++k;
      }
      const Phase& p = phases_[k];
      const double tau = t - p.start;
      JointSample s;
      s.t = t;
      s.q = p.q0 + p.v0 * tau + 0.5 * p.accel * tau * tau;
      s.dq = p.v0 + p.accel * tau;
      s.ddq = p.accel;
      s.ramp = p.ramp;
      out.push_back(s);
    }
    return out;
  }

 private:
  void Add(double duration, double q0, double v0, double accel, bool ramp) {
    Phase p;
    p.start = t_end_;
    p.duration = duration;
    p.q0 = q0;
    p.v0 = v0;
    p.accel = accel;
    p.ramp = ramp;
    phases_.push_back(p);
    t_end_ += duration;
  }

  std::vector<Phase> phases_;
  double t_end_ = 0.0;
  double q_end_ = 0.0;
};

void CheckSpeed(double speed) {
  if (!(speed > 0.0)) throw ConfigError("speeds must be positive");
  if (speed > kMaxSpeed + 1e-12) {
    throw ConfigError("speed " + std::to_string(speed) +
                      " rad/s exceeds the 0.7 rad/s envelope");
  }
}

// Fills torques along kinematics that already carry q, dq, ddq, tau_ext_true
// and tau_l offsets.
void SynthesizeTorques(std::vector<JointSample>& samples, const JointParams& jp,
                       LoadKind load, const LoadGeometry& geometry,
                       bool asymmetry_active, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LuGreState state;
  for (auto& s : samples) {
    s.tau_g = GravityTorque(s.q, jp);
    const double load_torque = LoadTorque(s.q, load, geometry);
    s.tau_l = s.tau_g + load_torque;
    s.tau_ext_true = -load_torque;
    const MotorTorque m =
        SynthesizeMotorTorque(s, state, jp, asymmetry_active, rng);
    s.tau_m = m.tau_m;
    s.tau_f_true = m.tau_f_true;
    state = m.state;
  }
}

}  // namespace

const char* RegimeName(Regime r) {
  switch (r) {
    case Regime::kBase:
      return "base";
    case Regime::kExtendedNoLoad:
      return "extended_noload";
    case Regime::kExtendedSym:
      return "extended_sym";
    case Regime::kExtendedAsym:
      return "extended_asym";
    case Regime::kAdaptation:
      return "adaptation";
  }
  return "unknown";
}

std::optional<Regime> ParseRegime(std::string_view name) {
  for (Regime r : kAllRegimes) {
    if (name == RegimeName(r)) return r;
  }
  return std::nullopt;
}

const char* LoadKindName(LoadKind k) {
  switch (k) {
    case LoadKind::kNone:
      return "none";
    case LoadKind::kSymmetric:
      return "symmetric";
    case LoadKind::kAsymmetric:
      return "asymmetric";
  }
  return "unknown";
}

void JointParams::Validate() const {
  if (!(gravity_amplitude > 0.0)) {
    throw ConfigError("gravity amplitude must be > 0");
  }
  friction_truth.Validate();
  if (!(noise_std >= 0.0)) throw ConfigError("noise std must be >= 0");
  if (!(control_rate >= 100.0)) {
    throw ConfigError("control rate must be >= 100 Hz (dt <= 0.01 s)");
  }
  if (!(inertia > 0.0)) throw ConfigError("inertia must be > 0");
  if (!(ramp_duration > 0.0)) throw ConfigError("ramp duration must be > 0");
  if (!(extended_q_max - extended_q_min > 2.0 * kMinLegDistance)) {
    throw ConfigError("extended range too narrow");
  }
}

double GravityTorque(double q, const JointParams& jp) {
  return jp.gravity_amplitude * std::sin(q);
}

double LoadTorque(double q, LoadKind kind, const LoadGeometry& geometry) {
  switch (kind) {
    case LoadKind::kNone:
      return 0.0;
    case LoadKind::kSymmetric:
      return geometry.mass * kGravity * geometry.lever * std::cos(q);
    case LoadKind::kAsymmetric:
      return geometry.mass * kGravity * geometry.lever *
             std::cos(q - geometry.asymmetric_offset);
  }
  return 0.0;
}

MotorTorque SynthesizeMotorTorque(const JointSample& kinematics,
                                  LuGreState state, const JointParams& jp,
                                  bool quadrant_asymmetry_active,
                                  std::mt19937_64& rng) {
  LuGreParams truth = jp.friction_truth;
  if (!quadrant_asymmetry_active) truth.stribeck.quadrant_asymmetry = 0.0;
  const LuGreStepResult f =
      LuGreStep(state, kinematics.dq, kinematics.tau_l, kinematics.tau_g,
                truth, jp.dt());
  MotorTorque out;
  out.state = f.state;
  out.tau_f_true = -f.friction;
  double noise = 0.0;
  if (jp.noise_std > 0.0) {
    std::normal_distribution<double> dist(0.0, jp.noise_std);
    noise = dist(rng);
  }
  out.tau_m = jp.inertia * kinematics.ddq + kinematics.tau_g -
              out.tau_f_true - kinematics.tau_ext_true + noise;
  return out;
}

Trajectory GenerateBaseDataset(const JointParams& jp,
                               std::span<const double> velocities,
                               std::uint64_t seed) {
  jp.Validate();
  if (velocities.empty()) throw ConfigError("no base velocities");
  for (std::size_t i = 0; i < velocities.size(); ++i) {
    CheckSpeed(velocities[i]);
    if (i > 0 && !(velocities[i] > velocities[i - 1])) {
      throw ConfigError("base velocities must be sorted ascending");
    }
  }
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  MotionProfile profile(-kHalfPi);
  for (double speed : velocities) {
    profile.AddLeg(kHalfPi, speed, jp.ramp_duration);
    profile.AddLeg(-kHalfPi, speed, jp.ramp_duration);
  }
  Trajectory traj;
  traj.joint_id = jp.id;
  traj.regime = Regime::kBase;
  traj.samples = profile.Sample(jp.control_rate);
  SynthesizeTorques(traj.samples, jp, LoadKind::kNone, LoadGeometry{},
                    /*asymmetry_active=*/false, seed);
  return traj;
}

std::vector<Trajectory> GenerateExtendedDataset(
    std::span<const JointParams> joints, const LoadSchedule& schedule,
    std::uint64_t seed) {
  if (schedule.segments.empty()) throw ConfigError("empty load schedule");
  if (joints.empty()) throw ConfigError("no joints for extended dataset");
  for (const auto& jp : joints) jp.Validate();

  std::vector<Trajectory> out;
  for (std::size_t seg = 0; seg < schedule.segments.size(); ++seg) {
    const LoadSegment& segment = schedule.segments[seg];
    if (segment.speeds.empty()) {
      throw ConfigError("schedule segment without speeds");
    }
    for (double s : segment.speeds) CheckSpeed(s);
    for (std::size_t j = 0; j < joints.size(); ++j) {
      const JointParams& jp = joints[j];
      const std::uint64_t stream = DeriveSeed(seed, seg * 1024 + j);
      std::mt19937_64 waypoint_rng(DeriveSeed(stream, 0));

      MotionProfile profile(0.5 * (jp.extended_q_min + jp.extended_q_max));
      bool up = true;
      for (double speed : segment.speeds) {
        for (int leg = 0; leg < 2; ++leg) {
          const double q = profile.end_position();
          const double min_leg = std::max(kMinLegDistance,
                                          speed * jp.ramp_duration);
          if (up && q + min_leg > jp.extended_q_max) up = false;
          if (!up && q - min_leg < jp.extended_q_min) up = true;
          // Turning points fall in the outer bands of the range, so legs
          // sweep most of it and the time spent on either side of q = 0
          // follows the range's asymmetry rather than the draws.
          const double band =
              kTurnBand * (jp.extended_q_max - jp.extended_q_min);
          double target;
          if (up) {
            std::uniform_real_distribution<double> d(
                std::max(jp.extended_q_max - band, q + min_leg),
                jp.extended_q_max);
            target = d(waypoint_rng);
          } else {
            std::uniform_real_distribution<double> d(
                jp.extended_q_min,
                std::min(jp.extended_q_min + band, q - min_leg));
            target = d(waypoint_rng);
          }
          profile.AddLeg(target, speed, jp.ramp_duration);
          up = !up;
        }
      }
      Regime regime = Regime::kExtendedNoLoad;
      if (segment.load == LoadKind::kSymmetric) regime = Regime::kExtendedSym;
      if (segment.load == LoadKind::kAsymmetric) {
        regime = Regime::kExtendedAsym;
      }
      Trajectory traj;
      traj.joint_id = jp.id;
      traj.regime = regime;
      traj.samples = profile.Sample(jp.control_rate);
      SynthesizeTorques(traj.samples, jp, segment.load, schedule.geometry,
                        /*asymmetry_active=*/true, DeriveSeed(stream, 1));
      out.push_back(std::move(traj));
    }
  }
  return out;
}

Trajectory GenerateAdaptationSegment(const JointParams& jp, double speed,
                                     double duration, std::uint64_t seed) {
  jp.Validate();
  if (!(duration > 0.0)) throw ConfigError("duration must be > 0");
  CheckSpeed(speed);
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  MotionProfile profile(-kHalfPi);
  bool up = true;
  while (profile.end_time() < duration) {
    profile.AddLeg(up ? kHalfPi : -kHalfPi, speed, jp.ramp_duration);
    up = !up;
  }
  const long n = std::lround(duration * jp.control_rate);
  Trajectory traj;
  traj.joint_id = jp.id;
  traj.regime = Regime::kAdaptation;
  traj.samples = profile.Sample(jp.control_rate, n);
  SynthesizeTorques(traj.samples, jp, LoadKind::kNone, LoadGeometry{},
                    /*asymmetry_active=*/true, seed);
  return traj;
}

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over (master, index)
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace frictionadapt
