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

#include "frictionadapt/friction_models.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "frictionadapt/errors.h"

namespace frictionadapt {
namespace {

void RequireFinite(double x, const char* name) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string("non-finite ") + name);
  }
}

constexpr double kMinStribeckMagnitude = 1e-9;

}  // namespace

void StribeckParams::Validate() const {
  if (!(coulomb > 0.0)) throw ConfigError("coulomb friction must be > 0");
  if (!(stiction >= coulomb)) {
    throw ConfigError("stiction must be >= coulomb friction");
  }
  if (!(stribeck_velocity > 0.0)) {
    throw ConfigError("stribeck velocity must be > 0");
  }
  if (!(stribeck_exponent > 0.0)) {
    throw ConfigError("stribeck exponent must be > 0");
  }
  if (!(viscous >= 0.0)) throw ConfigError("viscous friction must be >= 0");
  if (!(load_gain >= 0.0)) throw ConfigError("load gain must be >= 0");
  if (!(quadrant_asymmetry >= 0.0)) {
    throw ConfigError("quadrant asymmetry must be >= 0");
  }
}

void LuGreParams::Validate() const {
  stribeck.Validate();
  if (!(bristle_stiffness > 0.0)) {
    throw ConfigError("bristle stiffness must be > 0");
  }
  if (!(micro_damping >= 0.0)) throw ConfigError("micro damping must be >= 0");
}

double StribeckCurve(double v, double tau_l, double tau_g,
                     const StribeckParams& p) {
  RequireFinite(v, "velocity");
  RequireFinite(tau_l, "load torque");
  RequireFinite(tau_g, "gravity torque");
  const double s = Sign(v);
  if (s == 0.0) return 0.0;
  const double load = 1.0 + p.load_gain * std::abs(tau_l);
  const double quadrant =
      (s * Sign(tau_g) < 0.0) ? 1.0 + p.quadrant_asymmetry : 1.0;
  const double weakening =
      std::exp(-std::pow(std::abs(v / p.stribeck_velocity),
                         p.stribeck_exponent));
  return s * load * quadrant *
         (p.coulomb + (p.stiction - p.coulomb) * weakening);
}

double StaticFriction(double v, double tau_l, double tau_g,
                      const StribeckParams& p) {
  return StribeckCurve(v, tau_l, tau_g, p) + p.viscous * v;
}

LuGreStepResult LuGreStep(LuGreState state, double v, double tau_l,
                          double tau_g, const LuGreParams& p, double dt) {
  if (!(dt > 0.0) || dt > 0.01) {
    throw DomainError("integration step must satisfy 0 < dt <= 0.01");
  }
  RequireFinite(state.z, "bristle state");
  const double g = StribeckCurve(v, tau_l, tau_g, p.stribeck);
  double z_dot = 0.0;
  if (v != 0.0) {
    const double g_abs = std::abs(g);
    if (g_abs < kMinStribeckMagnitude) {
      throw ConfigError("degenerate Stribeck magnitude at nonzero velocity");
    }
    z_dot = v - p.bristle_stiffness * std::abs(v) / g_abs * state.z;
  }
  LuGreStepResult out;
  out.state.z = state.z + dt * z_dot;
  out.friction = p.bristle_stiffness * out.state.z + p.micro_damping * z_dot +
                 p.stribeck.viscous * v;
  return out;
}

double LuGreSteadyState(double v, double tau_l, double tau_g,
                        const LuGreParams& p) {
  RequireFinite(v, "velocity");
  if (v == 0.0) {
    throw DomainError("steady state is undefined at zero velocity");
  }
  return StaticFriction(v, tau_l, tau_g, p.stribeck);
}

namespace {

// Log-parameters: coulomb, stiction excess, stribeck velocity, exponent,
// viscous.
using LogParams = std::array<double, 5>;

constexpr double kLogFloor = -40.0;
constexpr double kLogCeil = 12.0;

LogParams ToLog(const StribeckParams& p) {
  const double excess = std::max(p.stiction - p.coulomb, 1e-3 * p.coulomb);
  return {std::log(p.coulomb), std::log(excess),
          std::log(p.stribeck_velocity), std::log(p.stribeck_exponent),
          std::log(std::max(p.viscous, 1e-3))};
}

StribeckParams FromLog(const LogParams& x) {
  StribeckParams p;
  p.coulomb = std::exp(x[0]);
  p.stiction = p.coulomb + std::exp(x[1]);
  p.stribeck_velocity = std::exp(x[2]);
  p.stribeck_exponent = std::exp(x[3]);
  p.viscous = std::exp(x[4]);
  p.load_gain = 0.0;
  p.quadrant_asymmetry = 0.0;
  return p;
}

double SumSquares(std::span<const FrictionObservation> samples,
                  const LogParams& x) {
  const StribeckParams p = FromLog(x);
  double sse = 0.0;
  for (const auto& s : samples) {
    const double r = StaticFriction(s.v, s.tau_l, s.tau_g, p) - s.friction;
    sse += r * r;
  }
  return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
}

}  // namespace

StaticFitResult FitStaticParams(std::span<const FrictionObservation> samples,
                                const StribeckParams& init,
                                const StaticFitOptions& options) {
  if (samples.size() < 50) {
    throw ConfigError("static fit needs at least 50 samples, got " +
                      std::to_string(samples.size()));
  }
  bool has_pos = false, has_neg = false;
  for (const auto& s : samples) {
    RequireFinite(s.v, "velocity");
    RequireFinite(s.friction, "friction");
    has_pos |= s.v > 0.0;
    has_neg |= s.v < 0.0;
  }
  if (!has_pos || !has_neg) {
    throw ConfigError("static fit needs velocities of both signs");
  }
  init.Validate();
  if (options.starts < 1 || options.iterations < 0) {
    throw ConfigError("static fit needs starts >= 1 and iterations >= 0");
  }

  // Coordinate descent in log space with per-coordinate adaptive steps.
  // Coordinates flagged in `frozen` keep their starting value.
  auto descend = [&](LogParams& x, double& sse,
                     const std::array<bool, 5>& frozen) {
    LogParams step;
    step.fill(0.5);
    for (int it = 0; it < options.iterations; ++it) {
      bool converged = true;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (frozen[i] || step[i] < 1e-12) continue;
        converged = false;
        bool moved = false;
        for (double dir : {1.0, -1.0}) {
          LogParams trial = x;
          trial[i] = std::clamp(x[i] + dir * step[i], kLogFloor, kLogCeil);
          const double trial_sse = SumSquares(samples, trial);
          if (trial_sse < sse) {
            x = trial;
            sse = trial_sse;
            moved = true;
            break;
          }
        }
        step[i] = moved ? std::min(2.0 * step[i], 2.0) : 0.5 * step[i];
      }
      if (converged) break;
    }
  };

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  const LogParams origin = ToLog(init);

  LogParams best = origin;
  double best_sse = SumSquares(samples, best);
  for (int start = 0; start < options.starts; ++start) {
    LogParams x = origin;
    if (start > 0) {
      for (double& xi : x) xi += jitter(rng);
    }
    double sse = SumSquares(samples, x);
    descend(x, sse, {});
    if (sse < best_sse) {
      best_sse = sse;
      best = x;
    }
  }

  // A stiction bump the data cannot see (v_s far below every sampled speed)
  // is arbitrary. Refit without it and keep that curve if it explains the
  // data as well.
  LogParams flat = best;
  flat[1] = kLogFloor;
  double flat_sse = SumSquares(samples, flat);
  descend(flat, flat_sse, {false, true, true, true, false});
  const double slack = 1e-3 * best_sse +
                       1e-12 * static_cast<double>(samples.size());
  if (flat_sse <= best_sse + slack) {
    best = flat;
    best_sse = flat_sse;
  }

  StaticFitResult result;
  result.params = FromLog(best);
  result.rms_residual =
      std::sqrt(best_sse / static_cast<double>(samples.size()));
  return result;
}

}  // namespace frictionadapt
