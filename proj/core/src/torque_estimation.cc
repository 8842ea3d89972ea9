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

#include "frictionadapt/torque_estimation.h"

#include <algorithm>
#include <ostream>

#include "frictionadapt/errors.h"
#include "frictionadapt/trajectory_io.h"

namespace frictionadapt {
namespace {

// Mirror index into [0, n) without repeating the edge sample.
long Reflect(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

// Causal mean over the last `window` samples; shorter windows at the start.
std::vector<double> CausalMean(const std::vector<double>& x, int window) {
  std::vector<double> y(x.size());
  const auto w = static_cast<std::size_t>(window);
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sum += x[k];
    if (k >= w) sum -= x[k - w];
    y[k] = sum / static_cast<double>(std::min(k + 1, w));
  }
  return y;
}

}  // namespace

double EstimateExternalTorque(const JointSample& sample,
                              double friction_torque, double inertia) {
  return inertia * sample.ddq + sample.tau_g - friction_torque - sample.tau_m;
}

std::vector<double> EstimateExternalTorqueSeries(
    const Trajectory& traj, std::span<const double> predicted_signal,
    double inertia) {
  if (predicted_signal.size() != traj.samples.size()) {
    throw ConfigError("friction prediction length does not match trajectory");
  }
  std::vector<double> out(traj.samples.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = EstimateExternalTorque(traj.samples[i], -predicted_signal[i],
                                    inertia);
  }
  return out;
}

std::vector<double> Denoise(std::span<const double> series, int window) {
  if (window < 1 || window % 2 == 0) {
    throw ConfigError("denoise window must be odd and >= 1");
  }
  const long n = static_cast<long>(series.size());
  if (window > n) throw ConfigError("denoise window longer than series");
  if (window == 1) return {series.begin(), series.end()};

  const long pad = window - 1;
  std::vector<double> padded(static_cast<std::size_t>(n + 2 * pad));
  for (long i = -pad; i < n + pad; ++i) {
    padded[static_cast<std::size_t>(i + pad)] = series[Reflect(i, n)];
  }
  std::vector<double> forward = CausalMean(padded, window);
  std::reverse(forward.begin(), forward.end());
  std::vector<double> backward = CausalMean(forward, window);
  std::reverse(backward.begin(), backward.end());
  return {backward.begin() + pad, backward.begin() + pad + n};
}

void WriteEstimateCsv(const Trajectory& traj, std::span<const double> raw,
                      std::span<const double> denoised,
                      const std::string& estimator_id, std::ostream& out) {
  if (raw.size() != traj.samples.size() ||
      denoised.size() != traj.samples.size()) {
    throw ConfigError("estimate series length does not match trajectory");
  }
  out << kEstimateCsvHeader << '\n';
  std::string line;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    line = FormatNumber(traj.samples[i].t);
    line += ',';
    line += FormatNumber(traj.samples[i].tau_ext_true);
    line += ',';
    line += FormatNumber(raw[i]);
    line += ',';
    line += FormatNumber(denoised[i]);
    line += ',';
    line += estimator_id;
    line += '\n';
    out << line;
  }
}

}  // namespace frictionadapt
