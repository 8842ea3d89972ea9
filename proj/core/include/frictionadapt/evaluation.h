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

#ifndef FRICTIONADAPT_EVALUATION_H_
#define FRICTIONADAPT_EVALUATION_H_

#include <Eigen/Core>
#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frictionadapt/friction_models.h"
#include "frictionadapt/joint_sim.h"

namespace frictionadapt {

// I: v > 0, tau_g > 0. II: v < 0, tau_g > 0. III: v < 0, tau_g < 0.
// IV: v > 0, tau_g < 0.
enum class Quadrant { kI = 0, kII = 1, kIII = 2, kIV = 3 };

const char* QuadrantName(Quadrant q);

// Empty when v == 0 or tau_g == 0.
std::optional<Quadrant> QuadrantOf(double v, double tau_g);

double Mae(std::span<const double> pred, std::span<const double> truth);

// Fraction of all samples in each quadrant; unclassified samples count in
// the denominator only.
std::array<double, 4> QuadrantDwell(const Trajectory& traj);

struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
  int points = 2;
};

struct GridSweepResult {
  std::vector<double> velocities;
  std::vector<double> gravity_torques;
  Eigen::MatrixXd values;  // rows: velocity, cols: gravity torque
  std::vector<double> mean_over_gravity;  // one per velocity
};

// Friction signal predicted from (tau_g, v).
using PointEstimator = std::function<double(double tau_g, double v)>;

GridSweepResult GridSweep(const PointEstimator& estimator,
                          const AxisRange& velocity,
                          const AxisRange& gravity_torque);

void WriteGridCsv(const GridSweepResult& grid, std::ostream& out);
void WriteGridMeanCsv(const GridSweepResult& grid, std::ostream& out);

// Friction signal of the bristle model run along the trajectory's
// velocities (the conventional estimator). The load is unknown to it, so
// tau_g stands in for tau_l.
std::vector<double> ConventionalFrictionSeries(const Trajectory& traj,
                                               const LuGreParams& params,
                                               double dt);

// Ground-truth friction signal (-tau_f_true) per sample.
std::vector<double> TrueFrictionSignal(const Trajectory& traj);

struct EstimatorSeries {
  std::string id;
  std::vector<double> friction;  // predicted friction signal per sample
};

struct EstimatorMetrics {
  std::string id;
  double friction_mae = 0.0;
  std::array<double, 4> quadrant_mae{};  // NaN for unvisited quadrants
  double ext_mae_raw = 0.0;
  double ext_mae_denoised = 0.0;
};

struct Improvement {
  std::string channel;    // "friction" or "ext_denoised"
  std::string reference;  // estimator compared against
  double percent = 0.0;
};

struct EvalReport {
  std::string joint;
  std::string dataset;
  std::array<double, 4> dwell{};
  std::vector<EstimatorMetrics> estimators;
  std::vector<Improvement> improvements;

  const EstimatorMetrics& Get(const std::string& id) const;
  double ImprovementPercent(const std::string& channel,
                            const std::string& reference) const;
};

// 100 (1 - mae / reference_mae).
double ImprovementPercent(double mae, double reference_mae);

// Metrics of every estimator on one dataset, plus the improvement of
// `target` ("combined") over each other estimator on the friction and
// denoised external-torque channels.
EvalReport MakeReport(const std::string& joint, const std::string& dataset,
                      const Trajectory& traj,
                      std::span<const EstimatorSeries> estimators,
                      double inertia, int denoise_window,
                      const std::string& target = "combined");

inline constexpr const char* kReportCsvHeader =
    "metric,estimator,dataset,joint,value";

void WriteReportCsv(std::span<const EvalReport> reports, std::ostream& out);

}  // namespace frictionadapt

#endif  // FRICTIONADAPT_EVALUATION_H_
