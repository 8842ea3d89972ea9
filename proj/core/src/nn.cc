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

#include "frictionadapt/nn.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "frictionadapt/errors.h"

namespace frictionadapt {

const char* ActivationName(Activation a) {
  switch (a) {
    case Activation::kElu:
      return "elu";
    case Activation::kIdentity:
      return "identity";
  }
  return "unknown";
}

double Elu(double x) { return x > 0.0 ? x : std::expm1(x); }

double EluPrime(double x) { return x > 0.0 ? 1.0 : std::exp(x); }

Mlp Mlp::Create(std::span<const int> layout, Activation hidden,
                std::mt19937_64& rng) {
  if (layout.size() < 2) throw ConfigError("layout needs at least 2 sizes");
  for (int w : layout) {
    if (w <= 0) throw ConfigError("layer widths must be positive");
  }
  if (layout.back() != 1) throw ConfigError("output layer must have width 1");
  Mlp m;
  m.hidden_activation = hidden;
  for (std::size_t l = 1; l < layout.size(); ++l) {
    const int fan_in = layout[l - 1];
    const int fan_out = layout[l];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer;
    layer.weights.resize(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weights(r, c) = dist(rng);
    }
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    m.layers.push_back(std::move(layer));
  }
  m.input_mean = Eigen::VectorXd::Zero(layout.front());
  m.input_std = Eigen::VectorXd::Ones(layout.front());
  return m;
}

int Mlp::input_size() const {
  return layers.empty() ? 0 : static_cast<int>(layers.front().weights.cols());
}

std::vector<int> Mlp::Layout() const {
  std::vector<int> out;
  if (layers.empty()) return out;
  out.push_back(static_cast<int>(layers.front().weights.cols()));
  for (const auto& l : layers) out.push_back(static_cast<int>(l.weights.rows()));
  return out;
}

std::size_t Mlp::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

void Mlp::Validate() const {
  if (layers.empty()) throw ConfigError("network has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.bias.size() != layer.weights.rows()) {
      throw ConfigError("bias size mismatch in layer " + std::to_string(l));
    }
    if (l > 0 && layer.weights.cols() != layers[l - 1].weights.rows()) {
      throw ConfigError("layer dimensions do not chain at layer " +
                        std::to_string(l));
    }
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
      throw ConfigError("non-finite parameter in layer " + std::to_string(l));
    }
  }
  if (layers.back().weights.rows() != 1) {
    throw ConfigError("output layer must have width 1");
  }
  if (input_mean.size() != input_size() || input_std.size() != input_size()) {
    throw ConfigError("input normalization size mismatch");
  }
  if (!((input_std.array() > 0.0).all()) || !(output_std > 0.0)) {
    throw ConfigError("normalization std must be > 0");
  }
}

namespace {

void ApplyActivation(Activation a, Eigen::MatrixXd& z) {
  if (a == Activation::kElu) {
    // elu(x) = max(x, 0) + exp(min(x, 0)) - 1, branch-free so Eigen
    // vectorizes the exponential.
    z = (z.array().max(0.0) + z.array().min(0.0).exp() - 1.0).matrix();
  }
}

Eigen::MatrixXd Normalize(const Mlp& m, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != m.input_size()) {
    throw ConfigError("input has " + std::to_string(inputs.rows()) +
                      " features, network expects " +
                      std::to_string(m.input_size()));
  }
  return (inputs.colwise() - m.input_mean).array().colwise() /
         m.input_std.array();
}

}  // namespace

Eigen::VectorXd ForwardBatch(const Mlp& m, const Eigen::MatrixXd& inputs) {
  Eigen::MatrixXd a = Normalize(m, inputs);
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    Eigen::MatrixXd z = m.layers[l].weights * a;
    z.colwise() += m.layers[l].bias;
    if (l + 1 < m.layers.size()) ApplyActivation(m.hidden_activation, z);
    a = std::move(z);
  }
  return ((a.row(0).array() * m.output_std) + m.output_mean).transpose();
}

double Forward(const Mlp& m, std::span<const double> input) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(input.size()), 1);
  for (std::size_t i = 0; i < input.size(); ++i) x(i, 0) = input[i];
  return ForwardBatch(m, x)(0);
}

GradientResult Gradient(const Mlp& m, const Eigen::MatrixXd& inputs,
                        const Eigen::VectorXd& targets) {
  const Eigen::Index n = inputs.cols();
  if (n == 0) throw ConfigError("empty batch");
  if (targets.size() != n) throw ConfigError("targets/inputs size mismatch");

  const std::size_t depth = m.layers.size();
  // activations[0] is the normalized input; activations[l + 1] the output of
  // layer l.
  std::vector<Eigen::MatrixXd> activations(depth + 1);
  activations[0] = Normalize(m, inputs);
  for (std::size_t l = 0; l < depth; ++l) {
    Eigen::MatrixXd z = m.layers[l].weights * activations[l];
    z.colwise() += m.layers[l].bias;
    if (l + 1 < depth) ApplyActivation(m.hidden_activation, z);
    activations[l + 1] = std::move(z);
  }

  const Eigen::ArrayXd pred =
      activations[depth].row(0).transpose().array() * m.output_std +
      m.output_mean;
  const Eigen::ArrayXd err = pred - targets.array();
  GradientResult result;
  result.loss = err.square().sum() / static_cast<double>(n);
  if (!std::isfinite(result.loss)) {
    std::ostringstream msg;
    msg << "non-finite loss over " << n << " samples (max |error| "
        << err.abs().maxCoeff() << ")";
    throw DivergenceError(-1, msg.str());
  }

  Eigen::MatrixXd delta =
      (err * (2.0 * m.output_std / static_cast<double>(n))).matrix()
          .transpose();
  result.grads.resize(depth);
  for (std::size_t l = depth; l-- > 0;) {
    result.grads[l].weights = delta * activations[l].transpose();
    result.grads[l].bias = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd back = m.layers[l].weights.transpose() * delta;
    if (m.hidden_activation == Activation::kElu) {
      // ELU'(z) = 1 for z > 0, else exp(z) = elu(z) + 1.
      back.array() *= activations[l].array().min(0.0) + 1.0;
    }
    delta = std::move(back);
  }
  return result;
}

AdamState AdamState::ZerosLike(const LayerStack& params) {
  AdamState s;
  for (const auto& p : params) {
    DenseLayer zero{Eigen::MatrixXd::Zero(p.weights.rows(), p.weights.cols()),
                    Eigen::VectorXd::Zero(p.bias.size())};
    s.first_moment.push_back(zero);
    s.second_moment.push_back(std::move(zero));
  }
  return s;
}

void AdamStep(LayerStack& params, const LayerStack& grads, AdamState& state,
              double learning_rate) {
  if (grads.size() != params.size() ||
      state.first_moment.size() != params.size()) {
    throw ConfigError("adam: parameter/gradient/state shape mismatch");
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    if (param.rows() != grad.rows() || param.cols() != grad.cols()) {
      throw ConfigError("adam: gradient shape mismatch");
    }
    m = state.beta1 * m + (1.0 - state.beta1) * grad;
    v = state.beta2 * v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
    param.array() -= learning_rate * (m.array() / c1) /
                     ((v.array() / c2).sqrt() + state.epsilon);
  };
  for (std::size_t l = 0; l < params.size(); ++l) {
    update(params[l].weights, grads[l].weights, state.first_moment[l].weights,
           state.second_moment[l].weights);
    update(params[l].bias, grads[l].bias, state.first_moment[l].bias,
           state.second_moment[l].bias);
  }
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr const char* kMagic = "frictionadapt-mlp";

std::string FormatDouble(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void WriteValues(std::ostream& out, const char* key, const double* data,
                 Eigen::Index n) {
  out << key;
  for (Eigen::Index i = 0; i < n; ++i) out << ' ' << FormatDouble(data[i]);
  out << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Reads the next line and checks that it starts with `key`. Returns the
  // remaining tokens.
  std::vector<std::string> Expect(const std::string& key) {
    std::string line;
    if (!std::getline(in_, line)) {
      throw ParseError(key, "model file truncated: missing '" + key + "'");
    }
    std::istringstream ss(line);
    std::string head;
    ss >> head;
    if (head != key) {
      throw ParseError(key, "expected '" + key + "', found '" + head + "'");
    }
    std::vector<std::string> tokens;
    for (std::string tok; ss >> tok;) tokens.push_back(tok);
    return tokens;
  }

  std::string RestOfLine(const std::string& key) {
    std::string line;
    if (!std::getline(in_, line)) {
      throw ParseError(key, "model file truncated: missing '" + key + "'");
    }
    if (line.compare(0, key.size(), key) != 0) {
      throw ParseError(key, "expected '" + key + "'");
    }
    std::string rest = line.substr(key.size());
    if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
    return rest;
  }

 private:
  std::istream& in_;
};

double ParseDouble(const std::string& field, const std::string& tok) {
  double v = 0.0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError(field, "invalid number '" + tok + "' in " + field);
  }
  return v;
}

long ParseInt(const std::string& field, const std::string& tok) {
  long v = 0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(field, "invalid integer '" + tok + "' in " + field);
  }
  return v;
}

std::vector<double> ParseValues(const std::string& field,
                                const std::vector<std::string>& tokens,
                                std::size_t skip, std::size_t expected) {
  if (tokens.size() != skip + expected) {
    throw ParseError(field, field + ": expected " + std::to_string(expected) +
                                " values, found " +
                                std::to_string(tokens.size() - skip));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (std::size_t i = skip; i < tokens.size(); ++i) {
    out.push_back(ParseDouble(field, tokens[i]));
  }
  return out;
}

}  // namespace

void WriteModel(const Mlp& m, std::ostream& out) {
  m.Validate();
  out << kMagic << ' ' << kModelFormatVersion << '\n';
  out << "tag " << m.tag << '\n';
  out << "activation " << ActivationName(m.hidden_activation) << '\n';
  out << "layout";
  for (int w : m.Layout()) out << ' ' << w;
  out << '\n';
  WriteValues(out, "input_mean", m.input_mean.data(), m.input_mean.size());
  WriteValues(out, "input_std", m.input_std.data(), m.input_std.size());
  WriteValues(out, "output_mean", &m.output_mean, 1);
  WriteValues(out, "output_std", &m.output_std, 1);
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto& w = m.layers[l].weights;
    out << "weights " << l;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        out << ' ' << FormatDouble(w(r, c));
      }
    }
    out << '\n';
    out << "bias " << l;
    for (Eigen::Index r = 0; r < m.layers[l].bias.size(); ++r) {
      out << ' ' << FormatDouble(m.layers[l].bias(r));
    }
    out << '\n';
  }
  out << "end\n";
}

Mlp ReadModel(std::istream& in) {
  LineReader reader(in);
  const auto header = reader.Expect(kMagic);
  if (header.size() != 1) throw ParseError("version", "missing format version");
  const long version = ParseInt("version", header[0]);
  if (version != kModelFormatVersion) {
    throw VersionError("version", "unsupported model format version " +
                                      std::to_string(version) + " (expected " +
                                      std::to_string(kModelFormatVersion) +
                                      ")");
  }
  Mlp m;
  m.tag = reader.RestOfLine("tag");
  const auto act = reader.Expect("activation");
  if (act.size() != 1) throw ParseError("activation", "missing activation");
  if (act[0] == "elu") {
    m.hidden_activation = Activation::kElu;
  } else if (act[0] == "identity") {
    m.hidden_activation = Activation::kIdentity;
  } else {
    throw ParseError("activation", "unknown activation '" + act[0] + "'");
  }
  const auto layout_tokens = reader.Expect("layout");
  std::vector<int> layout;
  for (const auto& tok : layout_tokens) {
    const long w = ParseInt("layout", tok);
    if (w <= 0) throw ParseError("layout", "non-positive layer width");
    layout.push_back(static_cast<int>(w));
  }
  if (layout.size() < 2 || layout.back() != 1) {
    throw ParseError("layout", "layout must list >= 2 widths ending in 1");
  }
  const std::size_t n_in = static_cast<std::size_t>(layout.front());
  auto mean = ParseValues("input_mean", reader.Expect("input_mean"), 0, n_in);
  auto stdv = ParseValues("input_std", reader.Expect("input_std"), 0, n_in);
  m.input_mean = Eigen::Map<Eigen::VectorXd>(mean.data(), n_in);
  m.input_std = Eigen::Map<Eigen::VectorXd>(stdv.data(), n_in);
  m.output_mean =
      ParseValues("output_mean", reader.Expect("output_mean"), 0, 1)[0];
  m.output_std = ParseValues("output_std", reader.Expect("output_std"), 0, 1)[0];

  for (std::size_t l = 1; l < layout.size(); ++l) {
    const int rows = layout[l], cols = layout[l - 1];
    const std::string wfield = "weights " + std::to_string(l - 1);
    const auto wtok = reader.Expect("weights");
    if (wtok.empty() || ParseInt(wfield, wtok[0]) != static_cast<long>(l - 1)) {
      throw ParseError(wfield, "layer index mismatch in " + wfield);
    }
    auto w = ParseValues(wfield, wtok, 1,
                         static_cast<std::size_t>(rows) * cols);
    const std::string bfield = "bias " + std::to_string(l - 1);
    const auto btok = reader.Expect("bias");
    if (btok.empty() || ParseInt(bfield, btok[0]) != static_cast<long>(l - 1)) {
      throw ParseError(bfield, "layer index mismatch in " + bfield);
    }
    auto b = ParseValues(bfield, btok, 1, static_cast<std::size_t>(rows));
    DenseLayer layer;
    layer.weights.resize(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) layer.weights(r, c) = w[r * cols + c];
    }
    layer.bias = Eigen::Map<Eigen::VectorXd>(b.data(), rows);
    m.layers.push_back(std::move(layer));
  }
  reader.Expect("end");
  try {
    m.Validate();
  } catch (const ConfigError& e) {
    throw ParseError("model", e.what());
  }
  return m;
}

void SaveModel(const Mlp& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string());
  WriteModel(m, out);
  out.flush();
  if (!out) throw std::ios_base::failure("failed writing " + path.string());
}

Mlp LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  return ReadModel(in);
}

}  // namespace frictionadapt
