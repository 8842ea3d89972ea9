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

#ifndef FRICTIONADAPT_CONFIG_H_
#define FRICTIONADAPT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "frictionadapt/evaluation.h"
#include "frictionadapt/friction_models.h"
#include "frictionadapt/joint_sim.h"
#include "frictionadapt/training.h"

namespace frictionadapt {

// Everything a reproduction run depends on. Two runs with equal configs
// write bit-identical reports.
struct RunConfig {
  std::uint64_t master_seed = 20260101;
  std::vector<JointParams> joints;

  std::vector<double> base_speeds;
  std::vector<double> test_speeds;  // held-out base-regime sweep
  std::size_t per_bin = 125;        // downsampling target per speed bin

  LoadSchedule extended;
  double adaptation_speed = 0.3;
  double adaptation_duration = 43.0;

  TrainConfig base_train;
  TrainConfig residual_train;
  StaticFitOptions baseline_fit;
  // Bristle parameters paired with the fitted static curve; the
  // identification experiment cannot observe them.
  double baseline_bristle_stiffness = 1000.0;
  double baseline_micro_damping = 1.0;

  int denoise_window = 101;
  int grid_velocity_points = 141;   // over [-0.7, 0.7]
  double grid_torque_spacing = 0.5;  // [Nm], over [-A, A]

  std::filesystem::path output_dir = "frictionadapt_out";

  void Validate() const;
  const JointParams& Joint(const std::string& id) const;
};

// The two stock joint profiles and the schedule used by the acceptance
// suite.
RunConfig DefaultRunConfig();
JointParams DefaultJoint2();
JointParams DefaultJoint4();

// Reads an INI file. Keys absent from the file keep their defaults; unknown
// keys are rejected so typos fail loudly. Joint sections are named
// [joint:<id>] and replace the default joint list when present.
RunConfig ParseRunConfig(std::istream& in);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Round-trippable INI dump of every field.
void WriteRunConfig(const RunConfig& cfg, std::ostream& out);

}  // namespace frictionadapt

#endif  // FRICTIONADAPT_CONFIG_H_
