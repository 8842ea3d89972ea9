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

// Model-based joint friction: Stribeck curve with viscous term, a
// multiplicative load dependence, a quadrant asymmetry used by the synthetic
// ground truth, and the bristle (LuGre) dynamic model.
//
// All functions return the friction *magnitude law* F, which carries the sign
// of the velocity. In the joint dynamics the friction torque acting on the
// joint is -F, so that at constant speed without external load
// tau_m - tau_g = F.

#ifndef FRICTIONADAPT_FRICTION_MODELS_H_
#define FRICTIONADAPT_FRICTION_MODELS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace frictionadapt {

struct StribeckParams {
  double coulomb = 2.0;             // F_c [Nm]
  double stiction = 2.5;            // F_s [Nm], >= coulomb
  double stribeck_velocity = 0.05;  // v_s [rad/s]
  double stribeck_exponent = 1.0;   // delta_s
  double viscous = 0.0;             // F_v [Nm s/rad]
  double load_gain = 0.0;           // k_l, scales with |tau_l|
  double quadrant_asymmetry = 0.0;  // a_q, active when sign(v) != sign(tau_g)

  // Throws ConfigError when an invariant is violated.
  void Validate() const;
};

struct LuGreParams {
  StribeckParams stribeck;
  double bristle_stiffness = 1000.0;  // sigma_0 [Nm/rad]
  double micro_damping = 1.0;         // sigma_1 [Nm s/rad]

  void Validate() const;
};

struct LuGreState {
  double z = 0.0;  // bristle deflection [rad]
};

struct LuGreStepResult {
  LuGreState state;
  double friction = 0.0;
};

// sign(x) with sign(0) = 0.
inline double Sign(double x) { return (x > 0.0) - (x < 0.0); }

// Velocity-weakening Stribeck curve g(v, tau_l) including load and quadrant
// factors. Throws DomainError on non-finite input.
double StribeckCurve(double v, double tau_l, double tau_g,
                     const StribeckParams& p);

// g(v, tau_l) + F_v v.
double StaticFriction(double v, double tau_l, double tau_g,
                      const StribeckParams& p);

// One explicit Euler step of the bristle state followed by the friction
// output sigma_0 z' + sigma_1 dz/dt + F_v v. The damping term divides by
// |g|, so the state relaxes towards sign(v) |g| / sigma_0 for either
// direction. Requires 0 < dt <= 0.01.
LuGreStepResult LuGreStep(LuGreState state, double v, double tau_l,
                          double tau_g, const LuGreParams& p, double dt);

// Friction reached by LuGreStep after the state settles at constant v != 0.
double LuGreSteadyState(double v, double tau_l, double tau_g,
                        const LuGreParams& p);

// One observation for the conventional-model fit.
struct FrictionObservation {
  double v = 0.0;
  double tau_l = 0.0;
  double tau_g = 0.0;
  double friction = 0.0;
};

struct StaticFitOptions {
  int starts = 8;
  int iterations = 2000;
  std::uint64_t seed = 1;
};

struct StaticFitResult {
  StribeckParams params;
  double rms_residual = 0.0;
};

// Least-squares fit of (F_c, F_s, v_s, delta_s, F_v) with k_l = a_q = 0 by
// multi-start coordinate descent in log-parameters. Needs at least 50
// observations covering both velocity signs.
StaticFitResult FitStaticParams(std::span<const FrictionObservation> samples,
                                const StribeckParams& init,
                                const StaticFitOptions& options = {});

}  // namespace frictionadapt

#endif  // FRICTIONADAPT_FRICTION_MODELS_H_
