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

// Synthetic single-joint ground truth. The joint obeys
//
//   M0 ddq + tau_g(q) = tau_m + tau_f + tau_ext,   tau_g(q) = A sin(q)
//
// with tau_f = -F and F the bristle friction law of friction_models.h.
// Motor torque is synthesized from this balance plus Gaussian sensor noise.

#ifndef FRICTIONADAPT_JOINT_SIM_H_
#define FRICTIONADAPT_JOINT_SIM_H_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frictionadapt/friction_models.h"

namespace frictionadapt {

enum class Regime {
  kBase,
  kExtendedNoLoad,
  kExtendedSym,
  kExtendedAsym,
  kAdaptation,
};

const char* RegimeName(Regime r);
std::optional<Regime> ParseRegime(std::string_view name);
inline constexpr Regime kAllRegimes[] = {
    Regime::kBase, Regime::kExtendedNoLoad, Regime::kExtendedSym,
    Regime::kExtendedAsym, Regime::kAdaptation};

struct JointParams {
  std::string id = "joint";
  double gravity_amplitude = 43.0;  // A [Nm]
  LuGreParams friction_truth;
  double noise_std = 0.05;       // [Nm]
  double control_rate = 1000.0;  // [Hz]
  double inertia = 1.0;          // M0 [kg m^2]
  double ramp_duration = 0.5;    // [s]
  // Excursion range of the extended (simultaneous motion) trajectories.
  double extended_q_min = -0.6;
  double extended_q_max = 1.3;

  void Validate() const;
  double dt() const { return 1.0 / control_rate; }
};

struct JointSample {
  double t = 0.0;
  double q = 0.0;
  double dq = 0.0;
  double ddq = 0.0;
  double tau_m = 0.0;
  double tau_g = 0.0;
  double tau_l = 0.0;
  double tau_ext_true = 0.0;
  double tau_f_true = 0.0;
  bool ramp = false;
};

struct Trajectory {
  std::string joint_id;
  Regime regime = Regime::kBase;
  std::vector<JointSample> samples;
};

double GravityTorque(double q, const JointParams& jp);

struct MotorTorque {
  double tau_m = 0.0;
  double tau_f_true = 0.0;
  LuGreState state;
};

// Fills in the torque of one sample whose kinematics, tau_g, tau_l and
// tau_ext_true are already set, advancing the friction state by one control
// period. `quadrant_asymmetry_active` selects whether the truth's a_q applies.
MotorTorque SynthesizeMotorTorque(const JointSample& kinematics,
                                  LuGreState state, const JointParams& jp,
                                  bool quadrant_asymmetry_active,
                                  std::mt19937_64& rng);

// Constant-velocity sweeps over q in [-pi/2, pi/2], each speed run once in
// each direction, with trapezoidal ramps. No external load, tau_l = tau_g,
// and the truth's quadrant asymmetry is inactive.
Trajectory GenerateBaseDataset(const JointParams& jp,
                               std::span<const double> velocities,
                               std::uint64_t seed);

enum class LoadKind { kNone, kSymmetric, kAsymmetric };

const char* LoadKindName(LoadKind k);

// End-effector load seen at the joint as m g l cos(q - offset); the
// symmetric mount has zero offset.
struct LoadGeometry {
  double mass = 2.0;                // [kg]
  double lever = 0.3;               // [m]
  double asymmetric_offset = 0.8;   // [rad]
};

double LoadTorque(double q, LoadKind kind, const LoadGeometry& geometry);

struct LoadSegment {
  LoadKind load = LoadKind::kNone;
  std::vector<double> speeds;  // magnitudes [rad/s], run in sequence
};

struct LoadSchedule {
  std::vector<LoadSegment> segments;
  LoadGeometry geometry;
};

// One trajectory per (joint, schedule segment). All joints run the same
// speed sequence over a shared clock; each leg moves between random
// waypoints inside the joint's extended range, alternating direction.
std::vector<Trajectory> GenerateExtendedDataset(
    std::span<const JointParams> joints, const LoadSchedule& schedule,
    std::uint64_t seed);

// Back-and-forth sweeps at one speed without external load, truncated to
// duration * control_rate samples.
Trajectory GenerateAdaptationSegment(const JointParams& jp, double speed,
                                     double duration, std::uint64_t seed);

// Independent stream seed for trajectory `index` of a run.
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index);

}  // namespace frictionadapt

#endif  // FRICTIONADAPT_JOINT_SIM_H_
