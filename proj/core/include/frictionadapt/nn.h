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

// Dense feed-forward networks with a scalar output, trained in double
// precision. Batches are stored column-wise: one column per sample.

#ifndef FRICTIONADAPT_NN_H_
#define FRICTIONADAPT_NN_H_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace frictionadapt {

enum class Activation { kElu, kIdentity };

const char* ActivationName(Activation a);

double Elu(double x);
double EluPrime(double x);

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
};

// Parameters, gradients and optimizer moments all share this shape.
using LayerStack = std::vector<DenseLayer>;

// Network with z-score normalization folded around it:
//   y = output_mean + output_std * net((x - input_mean) / input_std)
// Hidden layers use `hidden_activation`; the output layer is affine.
struct Mlp {
  LayerStack layers;
  Activation hidden_activation = Activation::kElu;
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_std;
  double output_mean = 0.0;
  double output_std = 1.0;
  std::string tag;

  // layout = {inputs, hidden..., 1}. Weights are uniform in
  // +-sqrt(6 / (fan_in + fan_out)), biases zero, norms identity.
  static Mlp Create(std::span<const int> layout, Activation hidden,
                    std::mt19937_64& rng);

  int input_size() const;
  std::vector<int> Layout() const;
  std::size_t ParameterCount() const;

  // Throws ConfigError on inconsistent shapes or non-positive stds.
  void Validate() const;
};

double Forward(const Mlp& m, std::span<const double> input);

// inputs: features x samples.
Eigen::VectorXd ForwardBatch(const Mlp& m, const Eigen::MatrixXd& inputs);

struct GradientResult {
  LayerStack grads;
  double loss = 0.0;
};

// Mean squared error over the batch (in output units) and its exact gradient
// with respect to every weight and bias.
GradientResult Gradient(const Mlp& m, const Eigen::MatrixXd& inputs,
                        const Eigen::VectorXd& targets);

struct AdamState {
  LayerStack first_moment;
  LayerStack second_moment;
  long step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState ZerosLike(const LayerStack& params);
};

// Bias-corrected Adam update, in place.
void AdamStep(LayerStack& params, const LayerStack& grads, AdamState& state,
              double learning_rate);

// Versioned text format; every number is written with 17 significant digits.
inline constexpr int kModelFormatVersion = 1;

void WriteModel(const Mlp& m, std::ostream& out);
Mlp ReadModel(std::istream& in);
void SaveModel(const Mlp& m, const std::filesystem::path& path);
Mlp LoadModel(const std::filesystem::path& path);

}  // namespace frictionadapt

#endif  // FRICTIONADAPT_NN_H_
