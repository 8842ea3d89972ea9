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

#ifndef FRICTIONADAPT_TRAJECTORY_IO_H_
#define FRICTIONADAPT_TRAJECTORY_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "frictionadapt/joint_sim.h"

namespace frictionadapt {

inline constexpr std::string_view kTrajectoryCsvHeader =
    "t,q,dq,ddq,tau_m,tau_g,tau_l,tau_ext_true,tau_f_true,ramp_flag";

// Shortest decimal string that parses back to exactly `x`.
std::string FormatNumber(double x);

void WriteTrajectoryCsv(const Trajectory& traj, std::ostream& out);
void SaveTrajectoryCsv(const Trajectory& traj,
                       const std::filesystem::path& path);

// The CSV carries no joint or regime labels; the caller supplies them.
Trajectory ReadTrajectoryCsv(std::istream& in, std::string joint_id,
                             Regime regime);
Trajectory LoadTrajectoryCsv(const std::filesystem::path& path,
                             std::string joint_id, Regime regime);

}  // namespace frictionadapt

#endif  // FRICTIONADAPT_TRAJECTORY_IO_H_
