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

#include "frictionadapt/evaluation.h"

#include <cmath>
#include <limits>
#include <ostream>

#include "frictionadapt/errors.h"
#include "frictionadapt/torque_estimation.h"
#include "frictionadapt/trajectory_io.h"

namespace frictionadapt {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> Linspace(const AxisRange& r) {
  if (r.points < 2) throw ConfigError("grid axes need at least 2 points");
  std::vector<double> out(static_cast<std::size_t>(r.points));
  for (int i = 0; i < r.points; ++i) {
    out[i] = r.lo + (r.hi - r.lo) * static_cast<double>(i) / (r.points - 1);
  }
  return out;
}

}  // namespace

const char* QuadrantName(Quadrant q) {
  static constexpr const char* kNames[] = {"I", "II", "III", "IV"};
  return kNames[static_cast<int>(q)];
}

std::optional<Quadrant> QuadrantOf(double v, double tau_g) {
  if (v == 0.0 || tau_g == 0.0) return std::nullopt;
  if (v > 0.0) return tau_g > 0.0 ? Quadrant::kI : Quadrant::kIV;
  return tau_g > 0.0 ? Quadrant::kII : Quadrant::kIII;
}

double Mae(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw ConfigError("mae: length mismatch");
  }
  if (pred.empty()) throw ConfigError("mae: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum += std::abs(pred[i] - truth[i]);
  }
  return sum / static_cast<double>(pred.size());
}

std::array<double, 4> QuadrantDwell(const Trajectory& traj) {
  std::array<double, 4> counts{};
  for (const auto& s : traj.samples) {
    if (auto q = QuadrantOf(s.dq, s.tau_g)) counts[static_cast<int>(*q)] += 1;
  }
  if (!traj.samples.empty()) {
    for (double& c : counts) c /= static_cast<double>(traj.samples.size());
  }
  return counts;
}

GridSweepResult GridSweep(const PointEstimator& estimator,
                          const AxisRange& velocity,
                          const AxisRange& gravity_torque) {
  if (std::max(std::abs(velocity.lo), std::abs(velocity.hi)) > 0.7 + 1e-12) {
    throw ConfigError("grid velocities beyond 0.7 rad/s are outside the "
                      "operating envelope");
  }
  GridSweepResult out;
  out.velocities = Linspace(velocity);
  out.gravity_torques = Linspace(gravity_torque);
  out.values.resize(velocity.points, gravity_torque.points);
  out.mean_over_gravity.resize(out.velocities.size());
  for (int i = 0; i < velocity.points; ++i) {
    double sum = 0.0;
    for (int j = 0; j < gravity_torque.points; ++j) {
      const double f = estimator(out.gravity_torques[j], out.velocities[i]);
      out.values(i, j) = f;
      sum += f;
    }
    out.mean_over_gravity[i] = sum / gravity_torque.points;
  }
  return out;
}

void WriteGridCsv(const GridSweepResult& grid, std::ostream& out) {
  out << "v\\tau_g";
  for (double g : grid.gravity_torques) out << ',' << FormatNumber(g);
  out << '\n';
  for (std::size_t i = 0; i < grid.velocities.size(); ++i) {
    out << FormatNumber(grid.velocities[i]);
    for (Eigen::Index j = 0; j < grid.values.cols(); ++j) {
      out << ',' << FormatNumber(grid.values(static_cast<Eigen::Index>(i), j));
    }
    out << '\n';
  }
}

void WriteGridMeanCsv(const GridSweepResult& grid, std::ostream& out) {
  out << "v,mean_friction\n";
  for (std::size_t i = 0; i < grid.velocities.size(); ++i) {
    out << FormatNumber(grid.velocities[i]) << ','
        << FormatNumber(grid.mean_over_gravity[i]) << '\n';
  }
}

std::vector<double> ConventionalFrictionSeries(const Trajectory& traj,
                                               const LuGreParams& params,
                                               double dt) {
  std::vector<double> out;
  out.reserve(traj.samples.size());
  LuGreState state;
  for (const auto& s : traj.samples) {
    const LuGreStepResult r =
        LuGreStep(state, s.dq, s.tau_g, s.tau_g, params, dt);
    state = r.state;
    out.push_back(r.friction);
  }
  return out;
}

std::vector<double> TrueFrictionSignal(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) out.push_back(-s.tau_f_true);
  return out;
}

const EstimatorMetrics& EvalReport::Get(const std::string& id) const {
  for (const auto& e : estimators) {
    if (e.id == id) return e;
  }
  throw ConfigError("report has no estimator '" + id + "'");
}

double EvalReport::ImprovementPercent(const std::string& channel,
                                      const std::string& reference) const {
  for (const auto& i : improvements) {
    if (i.channel == channel && i.reference == reference) return i.percent;
  }
  throw ConfigError("report has no improvement " + channel + " vs " +
                    reference);
}

double ImprovementPercent(double mae, double reference_mae) {
  if (!(reference_mae > 0.0)) return kNaN;
  return 100.0 * (1.0 - mae / reference_mae);
}

EvalReport MakeReport(const std::string& joint, const std::string& dataset,
                      const Trajectory& traj,
                      std::span<const EstimatorSeries> estimators,
                      double inertia, int denoise_window,
                      const std::string& target) {
  if (traj.samples.empty()) throw ConfigError("empty dataset " + dataset);
  EvalReport report;
  report.joint = joint;
  report.dataset = dataset;
  report.dwell = QuadrantDwell(traj);

  const std::vector<double> truth = TrueFrictionSignal(traj);
  std::vector<double> ext_truth;
  ext_truth.reserve(traj.samples.size());
  for (const auto& s : traj.samples) ext_truth.push_back(s.tau_ext_true);

  for (const auto& est : estimators) {
    EstimatorMetrics m;
    m.id = est.id;
    m.friction_mae = Mae(est.friction, truth);
    std::array<double, 4> sums{}, counts{};
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const auto& s = traj.samples[i];
      if (auto q = QuadrantOf(s.dq, s.tau_g)) {
        sums[static_cast<int>(*q)] += std::abs(est.friction[i] - truth[i]);
        counts[static_cast<int>(*q)] += 1.0;
      }
    }
    for (int q = 0; q < 4; ++q) {
      m.quadrant_mae[q] = counts[q] > 0 ? sums[q] / counts[q] : kNaN;
    }
    const std::vector<double> raw =
        EstimateExternalTorqueSeries(traj, est.friction, inertia);
    const int window = std::min<long>(
        denoise_window, static_cast<long>(raw.size()) % 2 == 0
                            ? static_cast<long>(raw.size()) - 1
                            : static_cast<long>(raw.size()));
    m.ext_mae_raw = Mae(raw, ext_truth);
    m.ext_mae_denoised = Mae(Denoise(raw, window), ext_truth);
    report.estimators.push_back(std::move(m));
  }

  const EstimatorMetrics* tgt = nullptr;
  for (const auto& e : report.estimators) {
    if (e.id == target) tgt = &e;
  }
  if (tgt != nullptr) {
    for (const auto& ref : report.estimators) {
      if (ref.id == target) continue;
      report.improvements.push_back(
          {"friction", ref.id,
           ImprovementPercent(tgt->friction_mae, ref.friction_mae)});
      report.improvements.push_back(
          {"ext_denoised", ref.id,
           ImprovementPercent(tgt->ext_mae_denoised, ref.ext_mae_denoised)});
    }
  }
  return report;
}

void WriteReportCsv(std::span<const EvalReport> reports, std::ostream& out) {
  out << kReportCsvHeader << '\n';
  auto row = [&](const std::string& metric, const std::string& estimator,
                 const EvalReport& r, double value) {
    out << metric << ',' << estimator << ',' << r.dataset << ',' << r.joint
        << ',' << FormatNumber(value) << '\n';
  };
  for (const auto& r : reports) {
    for (int q = 0; q < 4; ++q) {
      row(std::string("dwell_") + QuadrantName(static_cast<Quadrant>(q)),
          "none", r, r.dwell[q]);
    }
    for (const auto& e : r.estimators) {
      row("friction_mae", e.id, r, e.friction_mae);
      for (int q = 0; q < 4; ++q) {
        row(std::string("friction_mae_") +
                QuadrantName(static_cast<Quadrant>(q)),
            e.id, r, e.quadrant_mae[q]);
      }
      row("ext_mae_raw", e.id, r, e.ext_mae_raw);
      row("ext_mae_denoised", e.id, r, e.ext_mae_denoised);
    }
    for (const auto& i : r.improvements) {
      row("improvement_" + i.channel + "_vs_" + i.reference + "_pct",
          "combined", r, i.percent);
    }
  }
}

}  // namespace frictionadapt
