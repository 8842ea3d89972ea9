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

// Two-stage friction learning. A base network maps (tau_g, v) to the
// measured friction signal y = tau_m - tau_g on constant-velocity data; a
// residual network maps (tau_g, sign(v)) to what the frozen base misses on a
// short recording of new dynamics. The prediction is their sum.

#ifndef FRICTIONADAPT_TRAINING_H_
#define FRICTIONADAPT_TRAINING_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "frictionadapt/joint_sim.h"
#include "frictionadapt/nn.h"

namespace frictionadapt {

struct FrictionSample {
  double tau_g = 0.0;
  double v = 0.0;
  double target = 0.0;  // tau_m - tau_g
};

// Non-ramp rows of a trajectory as training samples.
std::vector<FrictionSample> ToFrictionSamples(const Trajectory& traj);

struct VelocityBin {
  double speed = 0.0;
  int direction = 0;
  std::size_t available = 0;
  std::size_t taken = 0;
  bool undersized = false;  // fewer than per_bin samples available
};

struct DownsampleResult {
  std::vector<FrictionSample> samples;
  std::vector<VelocityBin> bins;
  bool any_undersized = false;
};

// Uniform draw without replacement of `per_bin` samples from every
// (speed, direction) bin of constant-velocity rows. Bins smaller than
// per_bin are taken whole and flagged.
DownsampleResult DownsampleBalanced(const Trajectory& traj,
                                    std::size_t per_bin, std::uint64_t seed);

struct TrainConfig {
  double learning_rate = 0.01;
  long epochs = 50000;
  long batch_size = 0;  // 0: one full-batch step per epoch
  std::uint64_t seed = 1;
  std::vector<int> hidden_layout = {30, 30};
  double validation_fraction = 0.2;
  long log_every = 100;  // loss-curve period in optimizer steps

  void Validate() const;
};

struct LossPoint {
  long step = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  Mlp model;
  std::vector<LossPoint> curve;
};

void WriteLossCurveCsv(std::span<const LossPoint> curve, std::ostream& out);
void SaveLossCurveCsv(std::span<const LossPoint> curve,
                      const std::filesystem::path& path);

// Base network (tau_g, v) -> y with z-score normalization from the training
// split. Needs samples of both velocity signs.
TrainResult TrainBase(std::span<const FrictionSample> samples,
                      const TrainConfig& cfg);

// Residual network (tau_g, sign(v)) -> y - base(tau_g, v) on the non-ramp
// rows of `adaptation`, with a validation split stratified by sign(v). The
// output layer starts at zero so an untrained residual leaves the base
// prediction unchanged. Rejects recordings with external torque.
TrainResult TrainResidual(const Mlp& base, const Trajectory& adaptation,
                          const TrainConfig& cfg);

struct CombinedPredictor {
  Mlp base;
  Mlp residual;
};

// base(tau_g, v) + residual(tau_g, sign(v)), sign(0) = 0.
double PredictFriction(const CombinedPredictor& c, double tau_g, double v);

// Same over columns (tau_g, v) of `inputs`.
Eigen::VectorXd PredictFrictionBatch(const CombinedPredictor& c,
                                     const Eigen::MatrixXd& inputs);

}  // namespace frictionadapt

#endif  // FRICTIONADAPT_TRAINING_H_
