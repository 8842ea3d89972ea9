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

#include "frictionadapt/trajectory_io.h"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "frictionadapt/errors.h"

namespace frictionadapt {

std::string FormatNumber(double x) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), ptr);
}

void WriteTrajectoryCsv(const Trajectory& traj, std::ostream& out) {
  out << kTrajectoryCsvHeader << '\n';
  std::string line;
  for (const auto& s : traj.samples) {
    line.clear();
    for (double v : {s.t, s.q, s.dq, s.ddq, s.tau_m, s.tau_g, s.tau_l,
                     s.tau_ext_true, s.tau_f_true}) {
      line += FormatNumber(v);
      line += ',';
    }
    line += s.ramp ? '1' : '0';
    line += '\n';
    out << line;
  }
}

void SaveTrajectoryCsv(const Trajectory& traj,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string());
  WriteTrajectoryCsv(traj, out);
  out.flush();
  if (!out) throw std::ios_base::failure("failed writing " + path.string());
}

Trajectory ReadTrajectoryCsv(std::istream& in, std::string joint_id,
                             Regime regime) {
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryCsvHeader) {
    throw ParseError("header", "trajectory CSV header mismatch");
  }
  static constexpr const char* kColumns[] = {
      "t",     "q",     "dq",           "ddq",        "tau_m",
      "tau_g", "tau_l", "tau_ext_true", "tau_f_true", "ramp_flag"};
  Trajectory traj;
  traj.joint_id = std::move(joint_id);
  traj.regime = regime;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::array<double, 10> v{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int c = 0; c < 10; ++c) {
      auto [next, ec] = std::from_chars(p, end, v[c]);
      const bool last = c == 9;
      if (ec != std::errc() || (!last && (next == end || *next != ',')) ||
          (last && next != end)) {
        throw ParseError(kColumns[c], "row " + std::to_string(row) +
                                          ": bad value in column '" +
                                          kColumns[c] + "'");
      }
      p = next + 1;
    }
    JointSample s;
    s.t = v[0];
    s.q = v[1];
    s.dq = v[2];
    s.ddq = v[3];
    s.tau_m = v[4];
    s.tau_g = v[5];
    s.tau_l = v[6];
    s.tau_ext_true = v[7];
    s.tau_f_true = v[8];
    s.ramp = v[9] != 0.0;
    if (!traj.samples.empty() && !(s.t > traj.samples.back().t)) {
      throw ParseError("t", "row " + std::to_string(row) +
                                ": time not strictly increasing");
    }
    traj.samples.push_back(s);
  }
  return traj;
}

Trajectory LoadTrajectoryCsv(const std::filesystem::path& path,
                             std::string joint_id, Regime regime) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  return ReadTrajectoryCsv(in, std::move(joint_id), regime);
}

}  // namespace frictionadapt
