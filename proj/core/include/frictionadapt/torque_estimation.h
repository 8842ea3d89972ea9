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

#ifndef FRICTIONADAPT_TORQUE_ESTIMATION_H_
#define FRICTIONADAPT_TORQUE_ESTIMATION_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "frictionadapt/joint_sim.h"

namespace frictionadapt {

// tau_ext = M0 ddq + tau_g - tau_f - tau_m, where `friction_torque` is the
// estimated tau_f acting on the joint (the negative of a predicted friction
// signal y = tau_m - tau_g).
double EstimateExternalTorque(const JointSample& sample,
                              double friction_torque, double inertia);

// Raw external-torque estimates along a trajectory from predicted friction
// signals y (one per sample).
std::vector<double> EstimateExternalTorqueSeries(
    const Trajectory& traj, std::span<const double> predicted_signal,
    double inertia);

// Zero-phase moving average: a causal `window`-sample mean run forward, then
// backward, over the series padded by reflection. `window` must be odd and
// no longer than the series.
std::vector<double> Denoise(std::span<const double> series, int window);

inline constexpr const char* kEstimateCsvHeader =
    "t,tau_ext_true,tau_ext_hat_raw,tau_ext_hat_denoised,estimator_id";

void WriteEstimateCsv(const Trajectory& traj, std::span<const double> raw,
                      std::span<const double> denoised,
                      const std::string& estimator_id, std::ostream& out);

}  // namespace frictionadapt

#endif  // FRICTIONADAPT_TORQUE_ESTIMATION_H_
