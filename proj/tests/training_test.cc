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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "frictionadapt/config.h"
#include "frictionadapt/errors.h"
#include "frictionadapt/friction_models.h"

namespace frictionadapt {
namespace {

const std::vector<double> kSpeeds = {0.02, 0.05, 0.1, 0.2,
                                     0.3,  0.45, 0.6, 0.7};

JointParams Joint(double noise) {
  JointParams jp = DefaultJoint4();
  jp.noise_std = noise;
  return jp;
}

TrainConfig Quick(long epochs, std::vector<int> hidden = {16, 16}) {
  TrainConfig c;
  c.epochs = epochs;
  c.hidden_layout = std::move(hidden);
  c.seed = 3;
  c.log_every = 50;
  return c;
}

// Base and residual nets trained once and shared by the tests below.
struct Trained {
  JointParams jp = Joint(0.0);
  Trajectory base_data;
  Mlp base;
  Trajectory adaptation;
  Mlp residual;
  Mlp residual_no_asym;
  std::vector<LossPoint> base_curve;
};

const Trained& Shared() {
  static const Trained t = [] {
    Trained t;
    t.base_data = GenerateBaseDataset(t.jp, kSpeeds, 11);
    const DownsampleResult ds = DownsampleBalanced(t.base_data, 125, 12);
    TrainResult b = TrainBase(ds.samples, Quick(6000));
    t.base = b.model;
    t.base_curve = b.curve;
    t.adaptation = GenerateAdaptationSegment(t.jp, 0.3, 20.0, 13);
    TrainConfig rc = Quick(100, {30});
    rc.batch_size = 256;
    t.residual = TrainResidual(t.base, t.adaptation, rc).model;

    JointParams flat = t.jp;
    flat.friction_truth.stribeck.quadrant_asymmetry = 0.0;
    const Trajectory flat_adapt = GenerateAdaptationSegment(flat, 0.3, 20.0, 13);
    t.residual_no_asym = TrainResidual(t.base, flat_adapt, rc).model;
    return t;
  }();
  return t;
}

TEST(FrictionSamplesTest, SkipsRampsAndUsesMotorMinusGravity) {
  const Trajectory t = GenerateBaseDataset(Joint(0.05), kSpeeds, 1);
  const auto samples = ToFrictionSamples(t);
  std::size_t steady = 0;
  for (const auto& s : t.samples) steady += !s.ramp;
  ASSERT_EQ(samples.size(), steady);
  std::size_t k = 0;
  for (const auto& s : t.samples) {
    if (s.ramp) continue;
    EXPECT_EQ(samples[k].target, s.tau_m - s.tau_g);
    EXPECT_EQ(samples[k].v, s.dq);
    ++k;
  }
}

TEST(DownsampleTest, BalancedCounts) {
  const Trajectory t = GenerateBaseDataset(Joint(0.05), kSpeeds, 1);
  const DownsampleResult ds = DownsampleBalanced(t, 500, 2);
  EXPECT_EQ(ds.bins.size(), 16u);
  EXPECT_EQ(ds.samples.size(), 8000u);
  EXPECT_FALSE(ds.any_undersized);
  for (const auto& b : ds.bins) EXPECT_EQ(b.taken, 500u);
}

TEST(DownsampleTest, UndersizedBinKeepsEverything) {
  const Trajectory t = GenerateBaseDataset(Joint(0.05), kSpeeds, 1);
  const DownsampleResult ds = DownsampleBalanced(t, 1000000, 2);
  EXPECT_TRUE(ds.any_undersized);
  std::size_t total = 0;
  for (const auto& b : ds.bins) {
    EXPECT_TRUE(b.undersized);
    EXPECT_EQ(b.taken, b.available);
    total += b.available;
  }
  EXPECT_EQ(ds.samples.size(), total);
}

TEST(DownsampleTest, Deterministic) {
  const Trajectory t = GenerateBaseDataset(Joint(0.05), kSpeeds, 1);
  const auto a = DownsampleBalanced(t, 100, 5);
  const auto b = DownsampleBalanced(t, 100, 5);
  const auto c = DownsampleBalanced(t, 100, 6);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].target, b.samples[i].target);
    differs |= a.samples[i].target != c.samples[i].target;
  }
  EXPECT_TRUE(differs);
}

TEST(TrainConfigTest, RejectsBadSettings) {
  TrainConfig c;
  c.learning_rate = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TrainConfig{};
  c.epochs = -1;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TrainConfig{};
  c.hidden_layout = {};
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TrainConfig{};
  c.validation_fraction = 1.0;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(TrainBaseTest, NeedsBothDirections) {
  std::vector<FrictionSample> s = {{0, 0.1, 2}, {1, 0.2, 2.1}};
  EXPECT_THROW(TrainBase(s, Quick(1)), ConfigError);
}

TEST(TrainBaseTest, ZeroEpochsSetsOutputNormalization) {
  std::vector<FrictionSample> s;
  for (int i = 0; i < 50; ++i) {
    s.push_back({0.1 * i, i % 2 ? 0.3 : -0.3, i % 2 ? 2.0 : -2.0});
  }
  TrainConfig c = Quick(0);
  c.validation_fraction = 0.0;
  const TrainResult r = TrainBase(s, c);
  EXPECT_NEAR(r.model.output_mean, 0.0, 1e-12);
  EXPECT_EQ(r.model.Layout(), (std::vector<int>{2, 16, 16, 1}));
  EXPECT_EQ(r.model.tag, "base");
}

TEST(TrainBaseTest, Deterministic) {
  const Trajectory t = GenerateBaseDataset(Joint(0.05), kSpeeds, 1);
  const auto ds = DownsampleBalanced(t, 40, 2);
  const Mlp a = TrainBase(ds.samples, Quick(50)).model;
  const Mlp b = TrainBase(ds.samples, Quick(50)).model;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    EXPECT_EQ(a.layers[l].weights, b.layers[l].weights);
  }
}

TEST(TrainBaseTest, LossDecreasesAndLogsCurve) {
  const auto& curve = Shared().base_curve;
  ASSERT_GE(curve.size(), 2u);
  EXPECT_EQ(curve.front().step, 0);
  EXPECT_EQ(curve.back().step, 6000);
  EXPECT_LT(curve.back().train_loss, 0.05 * curve.front().train_loss);
  std::ostringstream out;
  WriteLossCurveCsv(curve, out);
  EXPECT_EQ(out.str().substr(0, 26), "step,train_loss,val_loss\n0");
}

TEST(TrainBaseTest, NoiseFreeHeldOutAccuracy) {
  const Trained& t = Shared();
  // Rows not drawn by the downsampler still lie on the truth curve.
  const Trajectory held = GenerateBaseDataset(t.jp, kSpeeds, 99);
  const auto samples = ToFrictionSamples(held);
  double err = 0.0;
  for (const auto& s : samples) {
    const double in[2] = {s.tau_g, s.v};
    err += std::fabs(Forward(t.base, in) - s.target);
  }
  EXPECT_LT(err / samples.size(), 0.05);
  const auto& last = t.base_curve.back();
  EXPECT_LT(last.val_loss / last.train_loss, 1.5);
}

TEST(TrainResidualTest, RejectsExternalTorque) {
  const Trained& t = Shared();
  Trajectory bad = t.adaptation;
  bad.samples[10].tau_ext_true = 0.5;
  EXPECT_THROW(TrainResidual(t.base, bad, Quick(1, {4})), ConfigError);
}

TEST(TrainResidualTest, ZeroEpochsLeavesBaseUntouched) {
  const Trained& t = Shared();
  const Mlp r = TrainResidual(t.base, t.adaptation, Quick(0, {30})).model;
  const CombinedPredictor c{t.base, r};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> g(-13, 13), v(-0.7, 0.7);
  for (int i = 0; i < 200; ++i) {
    const double tg = g(rng), vv = v(rng);
    const double in[2] = {tg, vv};
    EXPECT_EQ(PredictFriction(c, tg, vv), Forward(t.base, in));
  }
}

TEST(TrainResidualTest, BaseIsFrozen) {
  const Trained& t = Shared();
  Mlp copy = t.base;
  TrainConfig rc = Quick(5, {30});
  TrainResidual(copy, t.adaptation, rc);
  for (std::size_t l = 0; l < copy.layers.size(); ++l) {
    EXPECT_EQ(copy.layers[l].weights, t.base.layers[l].weights);
    EXPECT_EQ(copy.layers[l].bias, t.base.layers[l].bias);
  }
}

TEST(CombinedTest, AdditiveInBaseAndResidual) {
  const Trained& t = Shared();
  const CombinedPredictor c{t.base, t.residual};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> g(-13, 13), v(-0.7, 0.7);
  Eigen::MatrixXd in(2, 300);
  for (int i = 0; i < 300; ++i) {
    in(0, i) = g(rng);
    in(1, i) = v(rng);
  }
  const Eigen::VectorXd batch = PredictFrictionBatch(c, in);
  for (int i = 0; i < 300; ++i) {
    const double b[2] = {in(0, i), in(1, i)};
    const double r[2] = {in(0, i), Sign(in(1, i))};
    const double expect = Forward(t.base, b) + Forward(t.residual, r);
    EXPECT_NEAR(PredictFriction(c, in(0, i), in(1, i)), expect, 1e-12);
    EXPECT_NEAR(batch(i), expect, 1e-12);
  }
}

TEST(CombinedTest, CorrectionDependsOnlyOnSignOfVelocity) {
  const Trained& t = Shared();
  const CombinedPredictor c{t.base, t.residual};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> g(-13, 13), v(1e-4, 0.7);
  for (int i = 0; i < 1000; ++i) {
    const double tg = g(rng);
    for (double sign : {1.0, -1.0}) {
      const double v1 = sign * v(rng), v2 = sign * v(rng);
      const double b1[2] = {tg, v1}, b2[2] = {tg, v2};
      const double d1 = PredictFriction(c, tg, v1) - Forward(t.base, b1);
      const double d2 = PredictFriction(c, tg, v2) - Forward(t.base, b2);
      EXPECT_NEAR(d1, d2, 1e-9);
    }
  }
}

TEST(CombinedTest, ZeroVelocityUsesZeroSign) {
  const Trained& t = Shared();
  const CombinedPredictor c{t.base, t.residual};
  const double b[2] = {3.0, 0.0}, r[2] = {3.0, 0.0};
  EXPECT_NEAR(PredictFriction(c, 3.0, 0.0),
              Forward(t.base, b) + Forward(t.residual, r), 1e-12);
}

double AdaptationMae(const Trained& t, const Mlp* residual) {
  const auto samples = ToFrictionSamples(t.adaptation);
  double err = 0.0;
  for (const auto& s : samples) {
    const double b[2] = {s.tau_g, s.v}, r[2] = {s.tau_g, Sign(s.v)};
    const double pred =
        Forward(t.base, b) + (residual ? Forward(*residual, r) : 0.0);
    err += std::fabs(pred - s.target);
  }
  return err / samples.size();
}

TEST(TrainResidualTest, AbsorbsQuadrantAsymmetry) {
  const Trained& t = Shared();
  const double base_only = AdaptationMae(t, nullptr);
  const double combined = AdaptationMae(t, &t.residual);
  EXPECT_LT(combined, 0.5 * base_only);
}

TEST(TrainResidualTest, SmallCorrectionWithoutAsymmetry) {
  const Trained& t = Shared();
  double sum = 0.0;
  int n = 0;
  for (double tg = -13; tg <= 13; tg += 0.5) {
    for (double s : {1.0, -1.0}) {
      const double r[2] = {tg, s};
      sum += std::fabs(Forward(t.residual_no_asym, r));
      ++n;
    }
  }
  EXPECT_LT(sum / n, 0.05);
}

}  // namespace
}  // namespace frictionadapt
