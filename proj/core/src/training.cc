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

#include "frictionadapt/training.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <utility>

#include "frictionadapt/errors.h"
#include "frictionadapt/trajectory_io.h"

namespace frictionadapt {
namespace {

struct Split {
  Eigen::MatrixXd train_x;
  Eigen::VectorXd train_y;
  Eigen::MatrixXd val_x;
  Eigen::VectorXd val_y;
};

Split MakeSplit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                const std::vector<std::size_t>& train_idx,
                const std::vector<std::size_t>& val_idx) {
  Split s;
  s.train_x.resize(x.rows(), static_cast<Eigen::Index>(train_idx.size()));
  s.train_y.resize(static_cast<Eigen::Index>(train_idx.size()));
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    s.train_x.col(i) = x.col(train_idx[i]);
    s.train_y(i) = y(train_idx[i]);
  }
  s.val_x.resize(x.rows(), static_cast<Eigen::Index>(val_idx.size()));
  s.val_y.resize(static_cast<Eigen::Index>(val_idx.size()));
  for (std::size_t i = 0; i < val_idx.size(); ++i) {
    s.val_x.col(i) = x.col(val_idx[i]);
    s.val_y(i) = y(val_idx[i]);
  }
  return s;
}

// Shuffles `idx` and moves the first `fraction` of it to `val`.
void SplitGroup(std::vector<std::size_t> idx, double fraction,
                std::mt19937_64& rng, std::vector<std::size_t>& train,
                std::vector<std::size_t>& val) {
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_val = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(idx.size())));
  val.insert(val.end(), idx.begin(), idx.begin() + n_val);
  train.insert(train.end(), idx.begin() + n_val, idx.end());
}

void SetInputNormalization(Mlp& m, const Eigen::MatrixXd& x) {
  const double n = static_cast<double>(x.cols());
  m.input_mean = x.rowwise().mean();
  m.input_std.resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double var = (x.row(r).array() - m.input_mean(r)).square().sum() / n;
    m.input_std(r) = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
}

double Mse(const Mlp& m, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.cols() == 0) return std::numeric_limits<double>::quiet_NaN();
  return (ForwardBatch(m, x) - y).squaredNorm() / static_cast<double>(x.cols());
}

TrainResult Fit(Mlp model, const Split& data, const TrainConfig& cfg) {
  TrainResult result;
  const Eigen::Index n = data.train_x.cols();
  const Eigen::Index batch =
      (cfg.batch_size <= 0 || cfg.batch_size >= n) ? n : cfg.batch_size;
  const bool full_batch = batch == n;
  AdamState adam = AdamState::ZerosLike(model.layers);
  std::mt19937_64 rng(DeriveSeed(cfg.seed, 0xBA7C));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::MatrixXd batch_x(data.train_x.rows(), batch);
  Eigen::VectorXd batch_y(batch);

  long step = 0;
  auto log_point = [&](double train_loss) {
    result.curve.push_back(
        {step, train_loss, Mse(model, data.val_x, data.val_y)});
  };
  auto apply = [&](const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    GradientResult g;
    try {
      g = Gradient(model, x, y);
    } catch (const DivergenceError& e) {
      throw DivergenceError(step, "training diverged at step " +
                                      std::to_string(step) + ": " + e.what());
    }
    if (cfg.log_every > 0 && step % cfg.log_every == 0) {
      log_point(full_batch ? g.loss : Mse(model, data.train_x, data.train_y));
    }
    AdamStep(model.layers, g.grads, adam, cfg.learning_rate);
    ++step;
  };

  for (long epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (full_batch) {
      apply(data.train_x, data.train_y);
      continue;
    }
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index len = std::min(batch, n - start);
      if (len != batch_x.cols()) {
        batch_x.resize(data.train_x.rows(), len);
        batch_y.resize(len);
      }
      for (Eigen::Index i = 0; i < len; ++i) {
        batch_x.col(i) = data.train_x.col(order[start + i]);
        batch_y(i) = data.train_y(order[start + i]);
      }
      apply(batch_x, batch_y);
      if (batch_x.cols() != batch) {
        batch_x.resize(data.train_x.rows(), batch);
        batch_y.resize(batch);
      }
    }
  }
  const double final_train = Mse(model, data.train_x, data.train_y);
  if (!std::isfinite(final_train)) {
    throw DivergenceError(step, "training diverged: non-finite final loss");
  }
  if (result.curve.empty() || result.curve.back().step != step) {
    log_point(final_train);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace

std::vector<FrictionSample> ToFrictionSamples(const Trajectory& traj) {
  std::vector<FrictionSample> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    if (s.ramp) continue;
    const double target = s.tau_m - s.tau_g;
    if (!std::isfinite(target) || !std::isfinite(s.dq)) {
      throw DomainError("non-finite friction target at t = " +
                        FormatNumber(s.t));
    }
    out.push_back({s.tau_g, s.dq, target});
  }
  return out;
}

DownsampleResult DownsampleBalanced(const Trajectory& traj,
                                    std::size_t per_bin, std::uint64_t seed) {
  // Bins keyed by (direction, speed rounded to 1e-9 rad/s), in order of first
  // appearance.
  std::map<std::pair<int, long long>, std::size_t> key_to_bin;
  std::vector<std::vector<std::size_t>> members;
  DownsampleResult result;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    if (s.ramp || s.dq == 0.0) continue;
    const int dir = s.dq > 0.0 ? 1 : -1;
    const auto key =
        std::make_pair(dir, std::llround(std::abs(s.dq) * 1e9));
    auto [it, inserted] = key_to_bin.try_emplace(key, members.size());
    if (inserted) {
      members.emplace_back();
      VelocityBin bin;
      bin.speed = std::abs(s.dq);
      bin.direction = dir;
      result.bins.push_back(bin);
    }
    members[it->second].push_back(i);
  }
  if (members.empty()) {
    throw ConfigError("trajectory has no constant-velocity segments");
  }
  std::mt19937_64 rng(seed);
  for (std::size_t b = 0; b < members.size(); ++b) {
    VelocityBin& bin = result.bins[b];
    bin.available = members[b].size();
    std::vector<std::size_t> chosen;
    if (members[b].size() <= per_bin) {
      chosen = members[b];
      bin.undersized = members[b].size() < per_bin;
    } else {
      std::sample(members[b].begin(), members[b].end(),
                  std::back_inserter(chosen), per_bin, rng);
    }
    bin.taken = chosen.size();
    result.any_undersized |= bin.undersized;
    for (std::size_t i : chosen) {
      const auto& s = traj.samples[i];
      result.samples.push_back({s.tau_g, s.dq, s.tau_m - s.tau_g});
    }
  }
  return result;
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (hidden_layout.empty()) throw ConfigError("hidden layout is empty");
  for (int w : hidden_layout) {
    if (w <= 0) throw ConfigError("hidden widths must be positive");
  }
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation fraction must be in [0, 1)");
  }
}

void WriteLossCurveCsv(std::span<const LossPoint> curve, std::ostream& out) {
  out << "step,train_loss,val_loss\n";
  for (const auto& p : curve) {
    out << p.step << ',' << FormatNumber(p.train_loss) << ','
        << FormatNumber(p.val_loss) << '\n';
  }
}

void SaveLossCurveCsv(std::span<const LossPoint> curve,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string());
  WriteLossCurveCsv(curve, out);
  if (!out) throw std::ios_base::failure("failed writing " + path.string());
}

TrainResult TrainBase(std::span<const FrictionSample> samples,
                      const TrainConfig& cfg) {
  cfg.Validate();
  bool has_pos = false, has_neg = false;
  for (const auto& s : samples) {
    has_pos |= s.v > 0.0;
    has_neg |= s.v < 0.0;
  }
  if (!has_pos || !has_neg) {
    throw ConfigError("base training needs velocities of both signs");
  }
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(2, n);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(0, i) = samples[i].tau_g;
    x(1, i) = samples[i].v;
    y(i) = samples[i].target;
  }
  std::mt19937_64 rng(DeriveSeed(cfg.seed, 0x5B17));
  std::vector<std::size_t> all(samples.size()), train_idx, val_idx;
  std::iota(all.begin(), all.end(), std::size_t{0});
  SplitGroup(std::move(all), cfg.validation_fraction, rng, train_idx, val_idx);
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  Split data = MakeSplit(x, y, train_idx, val_idx);

  std::vector<int> layout = {2};
  layout.insert(layout.end(), cfg.hidden_layout.begin(),
                cfg.hidden_layout.end());
  layout.push_back(1);
  std::mt19937_64 init_rng(DeriveSeed(cfg.seed, 0x1417));
  Mlp model = Mlp::Create(layout, Activation::kElu, init_rng);
  SetInputNormalization(model, data.train_x);
  const double mean = data.train_y.mean();
  const double var =
      (data.train_y.array() - mean).square().sum() / data.train_y.size();
  model.output_mean = mean;
  model.output_std = var > 1e-24 ? std::sqrt(var) : 1.0;
  model.tag = "base";
  return Fit(std::move(model), data, cfg);
}

TrainResult TrainResidual(const Mlp& base, const Trajectory& adaptation,
                          const TrainConfig& cfg) {
  cfg.Validate();
  for (const auto& s : adaptation.samples) {
    if (s.tau_ext_true != 0.0) {
      throw ConfigError(
          "adaptation recording must not contain external torque");
    }
  }
  const std::vector<FrictionSample> samples = ToFrictionSamples(adaptation);
  if (samples.empty()) {
    throw ConfigError("adaptation recording has no constant-velocity rows");
  }
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd base_x(2, n), x(2, n);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    base_x(0, i) = samples[i].tau_g;
    base_x(1, i) = samples[i].v;
    x(0, i) = samples[i].tau_g;
    x(1, i) = Sign(samples[i].v);
    y(i) = samples[i].target;
  }
  const Eigen::VectorXd residual = y - ForwardBatch(base, base_x);

  std::vector<std::size_t> pos, neg, train_idx, val_idx;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    (samples[i].v > 0.0 ? pos : neg).push_back(i);
  }
  std::mt19937_64 rng(DeriveSeed(cfg.seed, 0x5B17));
  SplitGroup(std::move(pos), cfg.validation_fraction, rng, train_idx, val_idx);
  SplitGroup(std::move(neg), cfg.validation_fraction, rng, train_idx, val_idx);
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  Split data = MakeSplit(x, residual, train_idx, val_idx);

  std::vector<int> layout = {2};
  layout.insert(layout.end(), cfg.hidden_layout.begin(),
                cfg.hidden_layout.end());
  layout.push_back(1);
  std::mt19937_64 init_rng(DeriveSeed(cfg.seed, 0x1417));
  Mlp model = Mlp::Create(layout, Activation::kElu, init_rng);
  model.layers.back().weights.setZero();
  model.layers.back().bias.setZero();
  SetInputNormalization(model, data.train_x);
  const double rms = std::sqrt(data.train_y.squaredNorm() /
                               static_cast<double>(data.train_y.size()));
  model.output_mean = 0.0;
  model.output_std = rms > 1e-12 ? rms : 1.0;
  model.tag = "residual";
  return Fit(std::move(model), data, cfg);
}

double PredictFriction(const CombinedPredictor& c, double tau_g, double v) {
  const double base_in[2] = {tau_g, v};
  const double residual_in[2] = {tau_g, Sign(v)};
  return Forward(c.base, base_in) + Forward(c.residual, residual_in);
}

Eigen::VectorXd PredictFrictionBatch(const CombinedPredictor& c,
                                     const Eigen::MatrixXd& inputs) {
  Eigen::MatrixXd signed_inputs = inputs;
  for (Eigen::Index i = 0; i < inputs.cols(); ++i) {
    signed_inputs(1, i) = Sign(inputs(1, i));
  }
  return ForwardBatch(c.base, inputs) + ForwardBatch(c.residual, signed_inputs);
}

}  // namespace frictionadapt
