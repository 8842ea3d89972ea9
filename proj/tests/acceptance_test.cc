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

// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
//
//   acceptance_test [--work-dir DIR] [--keep]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "frictionadapt/config.h"
#include "frictionadapt/evaluation.h"
#include "frictionadapt/friction_models.h"
#include "frictionadapt/joint_sim.h"
#include "frictionadapt/nn.h"
#include "frictionadapt/pipeline.h"
#include "frictionadapt/trajectory_io.h"
#include "frictionadapt/training.h"

namespace frictionadapt {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;

  // Records one check; failures are listed first in the detail.
  void Check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string Num(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

// ---------------------------------------------------------------------------
// Criterion 1: reverse-mode gradients against central differences.

Verdict GradientOracle() {
  const auto start = Clock::now();
  constexpr double h = 1e-5;
  double worst = 0.0;
  for (std::uint64_t pair = 0; pair < 20; ++pair) {
    std::mt19937_64 rng(0xC1 + pair);
    const std::vector<int> layout = {2, 30, 30, 1};
    Mlp m = Mlp::Create(layout, Activation::kElu, rng);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& l : m.layers) {
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.3 * u(rng);
    }
    m.input_mean << u(rng), u(rng);
    m.input_std << 0.5 + std::fabs(u(rng)), 0.5 + std::fabs(u(rng));
    m.output_mean = u(rng);
    m.output_std = 0.5 + std::fabs(u(rng));
    Eigen::MatrixXd x(2, 32);
    Eigen::VectorXd y(32);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      x(0, c) = 20.0 * u(rng);
      x(1, c) = 0.7 * u(rng);
      y(c) = 3.0 * u(rng);
    }
    auto loss = [&](const Mlp& net) {
      return (ForwardBatch(net, x) - y).squaredNorm() /
             static_cast<double>(x.cols());
    };
    const GradientResult g = Gradient(m, x, y);
    Mlp p = m;
    auto check = [&](double& param, double analytic) {
      const double saved = param;
      param = saved + h;
      const double up = loss(p);
      param = saved - h;
      const double down = loss(p);
      param = saved;
      const double fd = (up - down) / (2.0 * h);
      const double scale =
          std::max({std::fabs(fd), std::fabs(analytic), 1e-6});
      worst = std::max(worst, std::fabs(fd - analytic) / scale);
    };
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      for (Eigen::Index i = 0; i < m.layers[l].weights.size(); ++i) {
        check(p.layers[l].weights.data()[i], g.grads[l].weights.data()[i]);
      }
      for (Eigen::Index i = 0; i < m.layers[l].bias.size(); ++i) {
        check(p.layers[l].bias.data()[i], g.grads[l].bias.data()[i]);
      }
    }
  }
  const double secs = Seconds(start);
  Verdict v;
  v.Check(worst < 1e-4, "max relative error " + Num(worst) + " < 1e-4");
  v.Check(secs < 10.0, "runtime " + Num(secs, 3) + " s < 10 s");
  return v;
}

// ---------------------------------------------------------------------------
// Criterion 2: the dynamic model settles on the static curve.

Verdict LuGreConsistency() {
  // 21 evenly spaced velocities over [-0.7, 0.7]; the midpoint, which would
  // be v = 0, is replaced by a slow creep speed.
  std::vector<double> velocities;
  for (int k = 0; k <= 20; ++k) velocities.push_back(-0.7 + 0.07 * k);
  velocities[10] = 0.01;
  double worst = 0.0;
  for (const JointParams& jp : {DefaultJoint2(), DefaultJoint4()}) {
    for (double tau_g : {-0.8 * jp.gravity_amplitude, 0.3 * jp.gravity_amplitude}) {
      for (double v : velocities) {
        LuGreState state;
        double friction = 0.0;
        for (int i = 0; i < 10000; ++i) {
          const auto r =
              LuGreStep(state, v, tau_g, tau_g, jp.friction_truth, 1e-3);
          state = r.state;
          friction = r.friction;
        }
        const double target =
            StaticFriction(v, tau_g, tau_g, jp.friction_truth.stribeck);
        worst = std::max(worst, std::fabs(friction - target));
      }
    }
  }
  Verdict out;
  out.Check(worst < 1e-6, "21 velocities x 2 joints x 2 loads, max |LuGre - "
                          "static| = " + Num(worst) + " Nm < 1e-6");
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline runs.

struct Run {
  RunConfig cfg;
  std::vector<EvalReport> reports;
  double seconds = 0.0;

  const EvalReport& Report(const std::string& joint,
                           const std::string& dataset) const {
    for (const auto& r : reports) {
      if (r.joint == joint && r.dataset == dataset) return r;
    }
    throw std::runtime_error("no report for " + joint + "/" + dataset);
  }
};

Run Reproduce(const RunConfig& base, std::uint64_t seed, const fs::path& dir) {
  Run run;
  run.cfg = base;
  run.cfg.master_seed = seed;
  run.cfg.output_dir = dir;
  RunOptions opts;
  opts.quiet = true;
  std::cerr << "acceptance: reproduce seed " << seed << " into " << dir
            << std::endl;
  const auto start = Clock::now();
  run.reports = RunReproduce(run.cfg, opts);
  run.seconds = Seconds(start);
  std::cerr << "acceptance: done in " << Num(run.seconds, 4) << " s"
            << std::endl;
  return run;
}

double Rms(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

// Criterion 3: base model against the held-out sweep and the conventional
// fit, plus the cost of one full base training.
Verdict BaseFidelity(const Run& run) {
  Verdict v;
  for (std::size_t j = 0; j < run.cfg.joints.size(); ++j) {
    const std::string& id = run.cfg.joints[j].id;
    const EvalReport& r = run.Report(id, "base_test");
    const double rms = Rms(TrueFrictionSignal(GenerateBaseTestSweep(run.cfg, j)));
    const double base = r.Get("base").friction_mae;
    const double conv = r.Get("conventional").friction_mae;
    v.Check(base <= 0.1 * rms, id + " base MAE " + Num(base) +
                                   " <= 10% of truth RMS " + Num(rms));
    v.Check(base <= 1.2 * conv, id + " base MAE <= 1.2 x conventional " +
                                    Num(conv));
  }
  // One joint at a time, so the figure is the cost of a single training.
  double slowest = 0.0;
  const RunLayout layout{run.cfg.output_dir};
  for (const JointParams& jp : run.cfg.joints) {
    const Trajectory base =
        LoadTrajectoryCsv(layout.Dataset(jp.id, Regime::kBase), jp.id,
                          Regime::kBase);
    const DownsampleResult ds = DownsampleBalanced(base, run.cfg.per_bin, 1);
    TrainConfig tc = run.cfg.base_train;
    tc.seed = 1;
    const auto start = Clock::now();
    TrainBase(ds.samples, tc);
    slowest = std::max(slowest, Seconds(start));
  }
  v.Check(slowest < 180.0,
          "full base training " + Num(slowest, 3) + " s < 180 s");
  return v;
}

// Criterion 4: the base model degrades on the asymmetric extended set.
Verdict BaseFailure(const Run& run) {
  Verdict v;
  for (const JointParams& jp : run.cfg.joints) {
    const double a_q = jp.friction_truth.stribeck.quadrant_asymmetry;
    v.Check(a_q >= 0.5, jp.id + " a_q " + Num(a_q) + " >= 0.5");
    const double ext =
        run.Report(jp.id, "extended_asym").Get("base").friction_mae;
    const double test = run.Report(jp.id, "base_test").Get("base").friction_mae;
    v.Check(ext >= 2.0 * test, jp.id + " " + Num(ext) + " >= 2 x " +
                                   Num(test) + " (ratio " +
                                   Num(ext / test, 3) + ")");
  }
  return v;
}

// Criterion 5, for one seed.
void AdaptationWin(const Run& run, Verdict& v) {
  for (const JointParams& jp : run.cfg.joints) {
    for (const char* ds : {"extended_sym", "extended_asym"}) {
      const EvalReport& r = run.Report(jp.id, ds);
      const double c = r.Get("combined").friction_mae;
      const double conv = r.Get("conventional").friction_mae;
      const double base = r.Get("base").friction_mae;
      v.Check(c <= 0.5 * conv && c <= 0.6 * base,
              "seed " + std::to_string(run.cfg.master_seed) + " " + jp.id +
                  " " + ds + " combined/conventional " + Num(c / conv, 3) +
                  " <= 0.5, combined/base " + Num(c / base, 3) + " <= 0.6");
    }
  }
}

// Criterion 6: denoised external torque.
Verdict ExternalTorque(const Run& run) {
  Verdict v;
  for (const JointParams& jp : run.cfg.joints) {
    for (const char* ds : {"extended_sym", "extended_asym"}) {
      const EvalReport& r = run.Report(jp.id, ds);
      const double c = r.Get("combined").ext_mae_denoised;
      const double conv = r.Get("conventional").ext_mae_denoised;
      v.Check(c <= 0.5 * conv, jp.id + " " + ds + " " + Num(c) + " / " +
                                   Num(conv) + " = " + Num(c / conv, 3) +
                                   " <= 0.5");
    }
  }
  return v;
}

// Criterion 7: the residual shifts the base curve by a constant per sign.
Verdict VelocityRelation(const Run& run) {
  const RunLayout layout{run.cfg.output_dir};
  double worst = 0.0;
  for (const JointParams& jp : run.cfg.joints) {
    CombinedPredictor c{LoadModel(layout.ModelDir(jp.id) / "base.mlp"),
                        LoadModel(layout.ModelDir(jp.id) / "residual.mlp")};
    for (double tau_g = -jp.gravity_amplitude; tau_g <= jp.gravity_amplitude;
         tau_g += 0.5) {
      for (double sign : {1.0, -1.0}) {
        double lo = INFINITY, hi = -INFINITY;
        for (int k = 1; k <= 141; ++k) {
          const double v = sign * 0.7 * k / 141.0;
          const double b[2] = {tau_g, v};
          const double d = PredictFriction(c, tau_g, v) - Forward(c.base, b);
          lo = std::min(lo, d);
          hi = std::max(hi, d);
        }
        worst = std::max(worst, hi - lo);
      }
    }
  }
  Verdict v;
  v.Check(worst < 1e-9, "max spread of combined - base over 141 speeds " +
                            Num(worst) + " Nm < 1e-9");
  return v;
}

// Criterion 8: quadrant dwell of the generated datasets.
Verdict DatasetStructure(const Run& run) {
  const RunLayout layout{run.cfg.output_dir};
  Verdict v;
  for (const JointParams& jp : run.cfg.joints) {
    const auto base = QuadrantDwell(LoadTrajectoryCsv(
        layout.Dataset(jp.id, Regime::kBase), jp.id, Regime::kBase));
    const double b13 = std::fabs(base[0] - base[2]);
    const double b24 = std::fabs(base[1] - base[3]);
    v.Check(b13 < 0.01 && b24 < 0.01, jp.id + " base |I-III| " + Num(b13) +
                                          " |II-IV| " + Num(b24) + " < 0.01");
    for (Regime r : {Regime::kExtendedNoLoad, Regime::kExtendedSym,
                     Regime::kExtendedAsym}) {
      const auto d = QuadrantDwell(
          LoadTrajectoryCsv(layout.Dataset(jp.id, r), jp.id, r));
      const double worst =
          std::max(std::fabs(d[0] - d[2]), std::fabs(d[1] - d[3]));
      v.Check(worst > 0.05, jp.id + " " + RegimeName(r) + " imbalance " +
                                Num(worst, 3) + " > 0.05");
    }
  }
  return v;
}

// Criterion 10: save/load round trip, for a fresh and a trained network.
Verdict Serialization(const Run& run, const fs::path& dir) {
  std::vector<Mlp> nets;
  std::mt19937_64 rng(0x5E);
  const std::vector<int> layout = {2, 30, 30, 1};
  nets.push_back(Mlp::Create(layout, Activation::kElu, rng));
  const RunLayout rl{run.cfg.output_dir};
  nets.push_back(LoadModel(rl.ModelDir(run.cfg.joints[0].id) / "base.mlp"));
  nets.push_back(
      LoadModel(rl.ModelDir(run.cfg.joints[0].id) / "residual.mlp"));
  std::uniform_real_distribution<double> g(-43.0, 43.0), vel(-0.7, 0.7);
  int mismatches = 0;
  for (std::size_t n = 0; n < nets.size(); ++n) {
    const fs::path p = dir / ("roundtrip_" + std::to_string(n) + ".mlp");
    SaveModel(nets[n], p);
    const Mlp back = LoadModel(p);
    for (int i = 0; i < 100; ++i) {
      const double in[2] = {g(rng), vel(rng)};
      const double a = Forward(nets[n], in), b = Forward(back, in);
      if (std::memcmp(&a, &b, sizeof a) != 0) ++mismatches;
    }
  }
  Verdict v;
  v.Check(mismatches == 0, "3 networks x 100 inputs, " +
                               std::to_string(mismatches) +
                               " non-identical outputs");
  return v;
}

// Hash of every file under `reports/`, keyed by relative path.
std::map<std::string, std::string> ReportHashes(const fs::path& root) {
  std::map<std::string, std::string> out;
  const fs::path dir = root / "reports";
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    if (e.path().extension() != ".csv") continue;
    out[fs::relative(e.path(), dir).string()] = Sha256File(e.path());
  }
  return out;
}

struct Line {
  int id;
  std::string name;
  Verdict verdict;
};

// Runs `fn`, turning an escaping exception into a failed verdict.
Verdict Guard(const std::function<Verdict()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    Verdict v;
    v.Check(false, std::string("exception: ") + e.what());
    return v;
  }
}

int Main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "frictionadapt_acceptance";
  bool keep = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--work-dir") == 0 && i + 1 < argc) {
      work = argv[++i];
    } else if (std::strcmp(argv[i], "--keep") == 0) {
      keep = true;
    } else {
      std::cerr << "usage: acceptance_test [--work-dir DIR] [--keep]\n";
      return 2;
    }
  }
  fs::remove_all(work);
  fs::create_directories(work);

  std::vector<Line> lines;
  lines.push_back({1, "gradient oracle", Guard(GradientOracle)});
  lines.push_back({2, "LuGre-Stribeck consistency", Guard(LuGreConsistency)});

  const RunConfig cfg = DefaultRunConfig();
  const std::vector<std::uint64_t> seeds = {cfg.master_seed, 7, 99};
  Run first;
  Verdict setup = Guard([&] {
    first = Reproduce(cfg, seeds[0], work / "run_a");
    return Verdict{};
  });
  auto on_first = [&](std::function<Verdict()> fn) {
    if (!setup.pass) return setup;
    return Guard(fn);
  };
  lines.push_back({3, "base-model fidelity",
                   on_first([&] { return BaseFidelity(first); })});
  lines.push_back({4, "base-model failure on extended data",
                   on_first([&] { return BaseFailure(first); })});
  Verdict win = setup;
  if (setup.pass) AdaptationWin(first, win);
  lines.push_back({6, "external-torque channel",
                   on_first([&] { return ExternalTorque(first); })});
  lines.push_back({7, "velocity-relation preservation",
                   on_first([&] { return VelocityRelation(first); })});
  lines.push_back({8, "dataset structure",
                   on_first([&] { return DatasetStructure(first); })});
  lines.push_back({10, "serialization round trip",
                   on_first([&] { return Serialization(first, work); })});

  lines.push_back({9, "determinism", on_first([&] {
                     const auto a = ReportHashes(first.cfg.output_dir);
                     if (!keep) fs::remove_all(first.cfg.output_dir / "data");
                     const Run second = Reproduce(cfg, seeds[0], work / "run_b");
                     const auto b = ReportHashes(second.cfg.output_dir);
                     if (!keep) {
                       fs::remove_all(first.cfg.output_dir);
                       fs::remove_all(second.cfg.output_dir);
                     }
                     Verdict v;
                     v.Check(!a.empty() && a == b,
                             std::to_string(a.size()) +
                                 " report CSVs bit-identical across two runs");
                     const double slowest =
                         std::max(first.seconds, second.seconds);
                     v.Check(slowest < 300.0, "pipeline runtime " +
                                                  Num(slowest, 4) +
                                                  " s < 300 s");
                     return v;
                   })});

  for (std::size_t s = 1; s < seeds.size(); ++s) {
    Verdict part = Guard([&] {
      const fs::path dir = work / ("run_seed" + std::to_string(seeds[s]));
      const Run run = Reproduce(cfg, seeds[s], dir);
      Verdict v;
      AdaptationWin(run, v);
      if (!keep) fs::remove_all(dir);
      return v;
    });
    win.Check(part.pass, part.detail);
  }
  lines.push_back({5, "adaptation win over 3 seeds", win});

  std::sort(lines.begin(), lines.end(),
            [](const Line& a, const Line& b) { return a.id < b.id; });
  int failed = 0;
  for (const auto& l : lines) {
    failed += !l.verdict.pass;
    std::cout << (l.verdict.pass ? "PASS" : "FAIL") << " criterion " << l.id
              << " (" << l.name << "): " << l.verdict.detail << '\n';
  }
  std::cout << (lines.size() - failed) << "/" << lines.size()
            << " criteria passed" << std::endl;
  if (!keep) fs::remove_all(work);
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace frictionadapt

int main(int argc, char** argv) { return frictionadapt::Main(argc, argv); }
