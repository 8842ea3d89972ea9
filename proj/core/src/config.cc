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

#include "frictionadapt/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>

#include "frictionadapt/errors.h"
#include "frictionadapt/trajectory_io.h"

namespace frictionadapt {
namespace {

namespace pt = boost::property_tree;

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseScalar(const std::string& field, const std::string& text) {
  const std::string s = Trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(field, "cannot parse '" + s + "'");
  }
  return value;
}

template <typename T>
std::vector<T> ParseList(const std::string& field, const std::string& text) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(ParseScalar<T>(field, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
std::string JoinList(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += FormatNumber(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

// Key -> setter table for one section.
using Setter = std::function<void(const std::string& field,
                                  const std::string& value)>;
using Section = std::map<std::string, Setter>;

template <typename T>
Setter Scalar(T* target) {
  return [target](const std::string& f, const std::string& v) {
    *target = ParseScalar<T>(f, v);
  };
}

template <typename T>
Setter List(std::vector<T>* target) {
  return [target](const std::string& f, const std::string& v) {
    *target = ParseList<T>(f, v);
  };
}

Setter Text(std::filesystem::path* target) {
  return [target](const std::string&, const std::string& v) {
    *target = Trim(v);
  };
}

Section TrainSection(TrainConfig* t) {
  return {{"learning_rate", Scalar(&t->learning_rate)},
          {"epochs", Scalar(&t->epochs)},
          {"batch_size", Scalar(&t->batch_size)},
          {"hidden_layout", List(&t->hidden_layout)},
          {"validation_fraction", Scalar(&t->validation_fraction)},
          {"log_every", Scalar(&t->log_every)}};
}

Section JointSection(JointParams* j) {
  StribeckParams* s = &j->friction_truth.stribeck;
  return {{"gravity_amplitude", Scalar(&j->gravity_amplitude)},
          {"noise_std", Scalar(&j->noise_std)},
          {"control_rate", Scalar(&j->control_rate)},
          {"inertia", Scalar(&j->inertia)},
          {"ramp_duration", Scalar(&j->ramp_duration)},
          {"extended_q_min", Scalar(&j->extended_q_min)},
          {"extended_q_max", Scalar(&j->extended_q_max)},
          {"coulomb", Scalar(&s->coulomb)},
          {"stiction", Scalar(&s->stiction)},
          {"stribeck_velocity", Scalar(&s->stribeck_velocity)},
          {"stribeck_exponent", Scalar(&s->stribeck_exponent)},
          {"viscous", Scalar(&s->viscous)},
          {"load_gain", Scalar(&s->load_gain)},
          {"quadrant_asymmetry", Scalar(&s->quadrant_asymmetry)},
          {"bristle_stiffness",
           Scalar(&j->friction_truth.bristle_stiffness)},
          {"micro_damping", Scalar(&j->friction_truth.micro_damping)}};
}

void ApplySection(const std::string& name, const pt::ptree& tree,
                  const Section& section) {
  for (const auto& [key, child] : tree) {
    const std::string field = name + "." + key;
    if (!child.empty()) throw ParseError(field, "unexpected nesting");
    auto it = section.find(key);
    if (it == section.end()) throw ParseError(field, "unknown key");
    it->second(field, child.data());
  }
}

constexpr std::string_view kJointPrefix = "joint:";

}  // namespace

JointParams DefaultJoint2() {
  JointParams j;
  j.id = "joint2";
  j.gravity_amplitude = 43.0;
  j.friction_truth.stribeck = {.coulomb = 2.0,
                               .stiction = 2.6,
                               .stribeck_velocity = 0.05,
                               .stribeck_exponent = 1.2,
                               .viscous = 3.0,
                               .load_gain = 0.004,
                               .quadrant_asymmetry = 0.6};
  j.extended_q_min = -0.6;
  j.extended_q_max = 1.3;
  return j;
}

JointParams DefaultJoint4() {
  JointParams j;
  j.id = "joint4";
  j.gravity_amplitude = 13.0;
  j.friction_truth.stribeck = {.coulomb = 1.2,
                               .stiction = 1.6,
                               .stribeck_velocity = 0.04,
                               .stribeck_exponent = 1.5,
                               .viscous = 2.0,
                               .load_gain = 0.01,
                               .quadrant_asymmetry = 0.6};
  j.extended_q_min = -1.2;
  j.extended_q_max = 0.5;
  return j;
}

RunConfig DefaultRunConfig() {
  RunConfig c;
  c.joints = {DefaultJoint2(), DefaultJoint4()};
  c.base_speeds = {0.02, 0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.7};
  c.test_speeds = c.base_speeds;
  const std::vector<double> mixed = {0.1, 0.3, 0.5, 0.2, 0.6, 0.4};
  c.extended.segments = {{LoadKind::kNone, mixed},
                         {LoadKind::kSymmetric, mixed},
                         {LoadKind::kAsymmetric, mixed}};
  c.base_train.epochs = 50000;
  c.base_train.hidden_layout = {30, 30};
  c.residual_train.epochs = 200;
  c.residual_train.hidden_layout = {30};
  c.residual_train.batch_size = 256;
  return c;
}

void RunConfig::Validate() const {
  if (joints.empty()) throw ConfigError("no joints configured");
  std::set<std::string> ids;
  for (const auto& j : joints) {
    j.Validate();
    if (!ids.insert(j.id).second) {
      throw ConfigError("duplicate joint id " + j.id);
    }
  }
  if (base_speeds.empty()) throw ConfigError("base_speeds is empty");
  if (test_speeds.empty()) throw ConfigError("test_speeds is empty");
  if (per_bin == 0) throw ConfigError("per_bin must be positive");
  if (extended.segments.size() != 3) {
    throw ConfigError("extended schedule needs no-load, symmetric and "
                      "asymmetric segments");
  }
  if (!(adaptation_speed > 0.0 && adaptation_speed <= 0.7)) {
    throw ConfigError("adaptation speed must be in (0, 0.7]");
  }
  if (!(adaptation_duration > 0.0)) {
    throw ConfigError("adaptation duration must be positive");
  }
  base_train.Validate();
  residual_train.Validate();
  if (baseline_fit.starts < 1 || baseline_fit.iterations < 1) {
    throw ConfigError("baseline fit needs at least one start and iteration");
  }
  if (!(baseline_bristle_stiffness > 0.0) || !(baseline_micro_damping >= 0.0)) {
    throw ConfigError("baseline bristle parameters out of range");
  }
  if (denoise_window < 1 || denoise_window % 2 == 0) {
    throw ConfigError("denoise_window must be odd and positive");
  }
  if (grid_velocity_points < 2) {
    throw ConfigError("grid needs at least 2 velocity points");
  }
  if (!(grid_torque_spacing > 0.0)) {
    throw ConfigError("grid torque spacing must be positive");
  }
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
}

const JointParams& RunConfig::Joint(const std::string& id) const {
  for (const auto& j : joints) {
    if (j.id == id) return j;
  }
  throw ConfigError("unknown joint " + id);
}

RunConfig ParseRunConfig(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("config", e.message() + " at line " +
                                   std::to_string(e.line()));
  }

  RunConfig c = DefaultRunConfig();
  std::uint64_t seed = c.master_seed;
  long per_bin = static_cast<long>(c.per_bin);
  LoadGeometry& geo = c.extended.geometry;
  std::map<std::string, Section> sections = {
      {"run",
       {{"master_seed", Scalar(&seed)},
        {"output_dir", Text(&c.output_dir)},
        {"denoise_window", Scalar(&c.denoise_window)}}},
      {"base_dataset",
       {{"speeds", List(&c.base_speeds)},
        {"test_speeds", List(&c.test_speeds)},
        {"per_bin", Scalar(&per_bin)}}},
      {"extended",
       {{"noload_speeds", List(&c.extended.segments[0].speeds)},
        {"symmetric_speeds", List(&c.extended.segments[1].speeds)},
        {"asymmetric_speeds", List(&c.extended.segments[2].speeds)},
        {"load_mass", Scalar(&geo.mass)},
        {"load_lever", Scalar(&geo.lever)},
        {"asymmetric_offset", Scalar(&geo.asymmetric_offset)}}},
      {"adaptation",
       {{"speed", Scalar(&c.adaptation_speed)},
        {"duration", Scalar(&c.adaptation_duration)}}},
      {"base_train", TrainSection(&c.base_train)},
      {"residual_train", TrainSection(&c.residual_train)},
      {"baseline",
       {{"starts", Scalar(&c.baseline_fit.starts)},
        {"iterations", Scalar(&c.baseline_fit.iterations)},
        {"bristle_stiffness", Scalar(&c.baseline_bristle_stiffness)},
        {"micro_damping", Scalar(&c.baseline_micro_damping)}}},
      {"grid",
       {{"velocity_points", Scalar(&c.grid_velocity_points)},
        {"torque_spacing", Scalar(&c.grid_torque_spacing)}}}};

  std::vector<JointParams> joints;
  for (const auto& [name, child] : tree) {
    if (name.rfind(kJointPrefix, 0) == 0) {
      const std::string id = name.substr(kJointPrefix.size());
      // Unnamed profiles start from joint2's values.
      JointParams j = id == "joint4" ? DefaultJoint4() : DefaultJoint2();
      j.id = id;
      ApplySection(name, child, JointSection(&j));
      joints.push_back(std::move(j));
      continue;
    }
    auto it = sections.find(name);
    if (it == sections.end()) {
      if (child.empty()) throw ParseError(name, "key outside any section");
      throw ParseError(name, "unknown section");
    }
    ApplySection(name, child, it->second);
  }
  if (!joints.empty()) c.joints = std::move(joints);
  if (per_bin <= 0) throw ParseError("base_dataset.per_bin", "must be > 0");
  c.per_bin = static_cast<std::size_t>(per_bin);
  c.master_seed = seed;
  c.Validate();
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return ParseRunConfig(in);
}

void WriteRunConfig(const RunConfig& c, std::ostream& out) {
  auto train = [&](const char* name, const TrainConfig& t) {
    out << '[' << name << "]\n"
        << "learning_rate = " << FormatNumber(t.learning_rate) << '\n'
        << "epochs = " << t.epochs << '\n'
        << "batch_size = " << t.batch_size << '\n'
        << "hidden_layout = " << JoinList(t.hidden_layout) << '\n'
        << "validation_fraction = " << FormatNumber(t.validation_fraction)
        << '\n'
        << "log_every = " << t.log_every << "\n\n";
  };
  out << "[run]\n"
      << "master_seed = " << c.master_seed << '\n'
      << "output_dir = " << c.output_dir.string() << '\n'
      << "denoise_window = " << c.denoise_window << "\n\n";
  out << "[base_dataset]\n"
      << "speeds = " << JoinList(c.base_speeds) << '\n'
      << "test_speeds = " << JoinList(c.test_speeds) << '\n'
      << "per_bin = " << c.per_bin << "\n\n";
  out << "[extended]\n"
      << "noload_speeds = " << JoinList(c.extended.segments[0].speeds) << '\n'
      << "symmetric_speeds = " << JoinList(c.extended.segments[1].speeds)
      << '\n'
      << "asymmetric_speeds = " << JoinList(c.extended.segments[2].speeds)
      << '\n'
      << "load_mass = " << FormatNumber(c.extended.geometry.mass) << '\n'
      << "load_lever = " << FormatNumber(c.extended.geometry.lever) << '\n'
      << "asymmetric_offset = "
      << FormatNumber(c.extended.geometry.asymmetric_offset) << "\n\n";
  out << "[adaptation]\n"
      << "speed = " << FormatNumber(c.adaptation_speed) << '\n'
      << "duration = " << FormatNumber(c.adaptation_duration) << "\n\n";
  train("base_train", c.base_train);
  train("residual_train", c.residual_train);
  out << "[baseline]\n"
      << "starts = " << c.baseline_fit.starts << '\n'
      << "iterations = " << c.baseline_fit.iterations << '\n'
      << "bristle_stiffness = " << FormatNumber(c.baseline_bristle_stiffness)
      << '\n'
      << "micro_damping = " << FormatNumber(c.baseline_micro_damping)
      << "\n\n";
  out << "[grid]\n"
      << "velocity_points = " << c.grid_velocity_points << '\n'
      << "torque_spacing = " << FormatNumber(c.grid_torque_spacing) << '\n';
  for (const auto& j : c.joints) {
    const StribeckParams& s = j.friction_truth.stribeck;
    out << "\n[joint:" << j.id << "]\n"
        << "gravity_amplitude = " << FormatNumber(j.gravity_amplitude) << '\n'
        << "noise_std = " << FormatNumber(j.noise_std) << '\n'
        << "control_rate = " << FormatNumber(j.control_rate) << '\n'
        << "inertia = " << FormatNumber(j.inertia) << '\n'
        << "ramp_duration = " << FormatNumber(j.ramp_duration) << '\n'
        << "extended_q_min = " << FormatNumber(j.extended_q_min) << '\n'
        << "extended_q_max = " << FormatNumber(j.extended_q_max) << '\n'
        << "coulomb = " << FormatNumber(s.coulomb) << '\n'
        << "stiction = " << FormatNumber(s.stiction) << '\n'
        << "stribeck_velocity = " << FormatNumber(s.stribeck_velocity) << '\n'
        << "stribeck_exponent = " << FormatNumber(s.stribeck_exponent) << '\n'
        << "viscous = " << FormatNumber(s.viscous) << '\n'
        << "load_gain = " << FormatNumber(s.load_gain) << '\n'
        << "quadrant_asymmetry = " << FormatNumber(s.quadrant_asymmetry)
        << '\n'
        << "bristle_stiffness = "
        << FormatNumber(j.friction_truth.bristle_stiffness) << '\n'
        << "micro_damping = " << FormatNumber(j.friction_truth.micro_damping)
        << '\n';
  }
}

}  // namespace frictionadapt
