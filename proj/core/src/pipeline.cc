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

#include "frictionadapt/pipeline.h"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "frictionadapt/errors.h"
#include "frictionadapt/torque_estimation.h"
#include "frictionadapt/trajectory_io.h"

namespace frictionadapt {
namespace fs = std::filesystem;
namespace {

// Dataset indices fed to DeriveSeed; fixed so that runs restricted to one
// joint draw the same streams as full runs.
enum SeedStream : std::uint64_t {
  kSeedBase = 100,
  kSeedExtended = 200,
  kSeedAdaptation = 300,
  kSeedTest = 400,
  kSeedDownsample = 500,
  kSeedBaseTrain = 600,
  kSeedResidualTrain = 700,
  kSeedBaseline = 800,
};

constexpr const char* kManifestHeader = "joint,regime,file,rows,sha256";
constexpr const char* kTestDataset = "base_test";
constexpr Regime kEvalRegimes[] = {Regime::kExtendedNoLoad,
                                   Regime::kExtendedSym,
                                   Regime::kExtendedAsym};
constexpr const char* kEstimators[] = {"conventional", "base", "combined"};

class Logger {
 public:
  explicit Logger(const RunOptions& o)
      : out_(o.quiet ? nullptr : (o.log != nullptr ? o.log : &std::clog)) {}
  void operator()(const std::string& line) const {
    if (out_ == nullptr) return;
    std::lock_guard<std::mutex> lock(Mutex());
    *out_ << line << '\n';
    out_->flush();
  }

 private:
  static std::mutex& Mutex() {
    static std::mutex m;
    return m;
  }
  std::ostream* out_;
};

std::vector<std::size_t> SelectedJoints(const RunConfig& cfg,
                                        const RunOptions& opts) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < cfg.joints.size(); ++j) {
    if (!opts.only_joint || cfg.joints[j].id == *opts.only_joint) {
      out.push_back(j);
    }
  }
  if (out.empty()) {
    throw ConfigError("no joint named '" + opts.only_joint.value_or("") +
                      "' in config");
  }
  return out;
}

// Runs fn(j) for every selected joint concurrently, rethrowing the first
// failure in joint order after all tasks finish.
template <typename Fn>
auto ForEachJoint(const std::vector<std::size_t>& joints, Fn fn) {
  using R = decltype(fn(std::size_t{}));
  std::vector<std::future<R>> tasks;
  for (std::size_t j : joints) {
    tasks.push_back(std::async(std::launch::async, fn, j));
  }
  std::exception_ptr first;
  if constexpr (std::is_void_v<R>) {
    for (auto& t : tasks) {
      try {
        t.get();
      } catch (...) {
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
  } else {
    std::vector<R> out;
    for (auto& t : tasks) {
      try {
        out.push_back(t.get());
      } catch (...) {
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
    return out;
  }
}

void MakeDirs(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create directory " + p.string() + ": " +
                        ec.message());
}

std::ofstream OpenOut(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

void CloseOut(std::ofstream& out, const fs::path& p) {
  out.close();
  if (!out) throw IoError("failed writing " + p.string());
}

void RequireFile(const fs::path& p) {
  if (!fs::is_regular_file(p)) {
    throw MissingInputError("missing input file " + p.string());
  }
}

std::string ToHex(const unsigned char* data, unsigned int n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * n);
  for (unsigned int i = 0; i < n; ++i) {
    out += kDigits[data[i] >> 4];
    out += kDigits[data[i] & 0xF];
  }
  return out;
}

Eigen::MatrixXd FeatureMatrix(const Trajectory& traj) {
  Eigen::MatrixXd x(2, static_cast<Eigen::Index>(traj.samples.size()));
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    x(0, static_cast<Eigen::Index>(i)) = traj.samples[i].tau_g;
    x(1, static_cast<Eigen::Index>(i)) = traj.samples[i].dq;
  }
  return x;
}

std::vector<double> ToVector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

struct JointModels {
  BaselineModel baseline;
  CombinedPredictor predictor;
};

JointModels LoadJointModels(const RunLayout& layout, const JointParams& jp) {
  const fs::path dir = layout.ModelDir(jp.id);
  const fs::path conv = dir / "conventional.ini";
  const fs::path base = dir / "base.mlp";
  const fs::path residual = dir / "residual.mlp";
  for (const auto& p : {conv, base, residual}) RequireFile(p);

  JointModels m;
  m.baseline = LoadBaseline(conv);
  m.predictor.base = LoadModel(base);
  m.predictor.residual = LoadModel(residual);
  const std::string want_base = jp.id + "/base";
  const std::string want_residual = jp.id + "/residual";
  if (m.baseline.joint != jp.id || m.predictor.base.tag != want_base ||
      m.predictor.residual.tag != want_residual) {
    throw InconsistentError("models in " + dir.string() +
                            " do not belong to joint " + jp.id);
  }
  return m;
}

const ManifestEntry& FindEntry(const std::vector<ManifestEntry>& manifest,
                               const std::string& joint, Regime r,
                               const fs::path& manifest_path) {
  for (const auto& e : manifest) {
    if (e.joint == joint && e.regime == r) return e;
  }
  throw MissingInputError(manifest_path.string() + " lists no " +
                          RegimeName(r) + " dataset for " + joint);
}

// Loads a dataset listed in the manifest after checking its hash.
Trajectory LoadVerified(const RunLayout& layout,
                        const std::vector<ManifestEntry>& manifest,
                        const std::string& joint, Regime r) {
  const ManifestEntry& e = FindEntry(manifest, joint, r, layout.Manifest());
  const fs::path p = layout.Dataset(joint, r);
  RequireFile(p);
  if (Sha256File(p) != e.sha256) {
    throw InconsistentError(p.string() + " does not match its manifest hash");
  }
  return LoadTrajectoryCsv(p, joint, r);
}

std::vector<ManifestEntry> ReadManifestChecked(const RunLayout& layout) {
  RequireFile(layout.Manifest());
  return ReadManifest(layout.Manifest());
}

}  // namespace

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const MissingInputError*>(&e)) return kExitMissingInput;
  if (dynamic_cast<const InconsistentError*>(&e)) return kExitInconsistent;
  if (dynamic_cast<const IoError*>(&e) ||
      dynamic_cast<const std::ios_base::failure*>(&e) ||
      dynamic_cast<const fs::filesystem_error*>(&e)) {
    return kExitIo;
  }
  return kExitFailure;
}

fs::path RunLayout::Manifest() const { return root / "data" / "manifest.csv"; }

fs::path RunLayout::Dataset(const std::string& joint, Regime r) const {
  return root / "data" / joint / (std::string(RegimeName(r)) + ".csv");
}

fs::path RunLayout::ModelDir(const std::string& joint) const {
  return root / "models" / joint;
}

fs::path RunLayout::Report() const { return root / "reports" / "report.csv"; }

fs::path RunLayout::ReportDir(const std::string& joint) const {
  return root / "reports" / joint;
}

std::string Sha256File(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(
      EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 init failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) {
      EVP_DigestUpdate(ctx.get(), buf.data(),
                       static_cast<std::size_t>(in.gcount()));
    }
  }
  if (in.bad()) throw IoError("failed reading " + path.string());
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  return ToHex(md, len);
}

std::vector<ManifestEntry> ReadManifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kManifestHeader) {
    throw ParseError("header", "unexpected manifest header in " +
                                   path.string());
  }
  std::vector<ManifestEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (cols.size() != 5) throw ParseError("row", "bad manifest row: " + line);
    ManifestEntry e;
    e.joint = cols[0];
    auto r = ParseRegime(cols[1]);
    if (!r) throw ParseError("regime", "unknown regime " + cols[1]);
    e.regime = *r;
    e.file = cols[2];
    try {
      e.rows = std::stoul(cols[3]);
    } catch (const std::exception&) {
      throw ParseError("rows", "bad row count " + cols[3]);
    }
    e.sha256 = cols[4];
    out.push_back(std::move(e));
  }
  return out;
}

void SaveBaseline(const BaselineModel& b, const fs::path& path) {
  const StribeckParams& s = b.params.stribeck;
  std::ofstream out = OpenOut(path);
  out << "# Conventional friction model: static curve identified on the\n"
         "# base dataset, simulated with the listed bristle parameters.\n"
      << "joint = " << b.joint << '\n'
      << "trained_on_sha256 = " << b.trained_on_sha256 << '\n'
      << "rms_residual = " << FormatNumber(b.rms_residual) << "\n\n"
      << "[stribeck]\n"
      << "coulomb = " << FormatNumber(s.coulomb) << '\n'
      << "stiction = " << FormatNumber(s.stiction) << '\n'
      << "stribeck_velocity = " << FormatNumber(s.stribeck_velocity) << '\n'
      << "stribeck_exponent = " << FormatNumber(s.stribeck_exponent) << '\n'
      << "viscous = " << FormatNumber(s.viscous) << "\n\n"
      << "[bristle]\n"
      << "stiffness = " << FormatNumber(b.params.bristle_stiffness) << '\n'
      << "micro_damping = " << FormatNumber(b.params.micro_damping) << '\n';
  CloseOut(out, path);
}

BaselineModel LoadBaseline(const fs::path& path) {
  namespace pt = boost::property_tree;
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("baseline", e.message());
  }
  auto num = [&](const std::string& key) {
    const auto v = tree.get_optional<std::string>(key);
    if (!v) throw ParseError(key, "missing " + key + " in " + path.string());
    try {
      std::size_t used = 0;
      const double d = std::stod(*v, &used);
      if (used != v->size()) throw std::invalid_argument(key);
      return d;
    } catch (const std::exception&) {
      throw ParseError(key, "bad value for " + key);
    }
  };
  BaselineModel b;
  b.joint = tree.get<std::string>("joint", "");
  b.trained_on_sha256 = tree.get<std::string>("trained_on_sha256", "");
  b.rms_residual = num("rms_residual");
  StribeckParams& s = b.params.stribeck;
  s.coulomb = num("stribeck.coulomb");
  s.stiction = num("stribeck.stiction");
  s.stribeck_velocity = num("stribeck.stribeck_velocity");
  s.stribeck_exponent = num("stribeck.stribeck_exponent");
  s.viscous = num("stribeck.viscous");
  b.params.bristle_stiffness = num("bristle.stiffness");
  b.params.micro_damping = num("bristle.micro_damping");
  try {
    b.params.Validate();
  } catch (const ConfigError& e) {
    throw ParseError("baseline", e.what());
  }
  return b;
}

BaselineModel FitBaseline(const std::string& joint,
                          std::span<const FrictionSample> samples,
                          const RunConfig& cfg, std::uint64_t seed) {
  std::vector<FrictionObservation> obs;
  obs.reserve(samples.size());
  for (const auto& s : samples) {
    // The load is not measured; gravity is all the model sees.
    obs.push_back({.v = s.v, .tau_l = s.tau_g, .tau_g = s.tau_g,
                   .friction = s.target});
  }
  StribeckParams init{.coulomb = 1.0,
                      .stiction = 1.5,
                      .stribeck_velocity = 0.05,
                      .stribeck_exponent = 1.0,
                      .viscous = 1.0};
  StaticFitOptions options = cfg.baseline_fit;
  options.seed = seed;
  const StaticFitResult fit = FitStaticParams(obs, init, options);
  BaselineModel b;
  b.joint = joint;
  b.params.stribeck = fit.params;
  b.params.bristle_stiffness = cfg.baseline_bristle_stiffness;
  b.params.micro_damping = cfg.baseline_micro_damping;
  b.rms_residual = fit.rms_residual;
  return b;
}

Trajectory GenerateBaseTestSweep(const RunConfig& cfg,
                                 std::size_t joint_index) {
  const JointParams& jp = cfg.joints.at(joint_index);
  return GenerateBaseDataset(jp, cfg.test_speeds,
                             DeriveSeed(cfg.master_seed,
                                        kSeedTest + joint_index));
}

void RunGenerate(const RunConfig& cfg, const RunOptions& opts) {
  cfg.Validate();
  const Logger log(opts);
  const RunLayout layout{cfg.output_dir};
  const std::vector<std::size_t> selected = SelectedJoints(cfg, opts);
  MakeDirs(layout.root / "data");

  // The extended set draws per-joint streams from one call; generate all
  // joints so restricting the run does not change the data.
  const std::vector<Trajectory> extended = GenerateExtendedDataset(
      cfg.joints, cfg.extended, DeriveSeed(cfg.master_seed, kSeedExtended));

  auto per_joint = [&](std::size_t j) {
    const JointParams& jp = cfg.joints[j];
    MakeDirs(layout.root / "data" / jp.id);
    std::vector<ManifestEntry> entries;
    auto write = [&](const Trajectory& traj) {
      const fs::path p = layout.Dataset(jp.id, traj.regime);
      try {
        SaveTrajectoryCsv(traj, p);
      } catch (const std::ios_base::failure& e) {
        throw IoError(e.what());
      }
      entries.push_back({jp.id, traj.regime,
                         jp.id + "/" + RegimeName(traj.regime) + ".csv",
                         traj.samples.size(), Sha256File(p)});
    };
    write(GenerateBaseDataset(jp, cfg.base_speeds,
                              DeriveSeed(cfg.master_seed, kSeedBase + j)));
    for (const Trajectory& t : extended) {
      if (t.joint_id == jp.id) write(t);
    }
    write(GenerateAdaptationSegment(
        jp, cfg.adaptation_speed, cfg.adaptation_duration,
        DeriveSeed(cfg.master_seed, kSeedAdaptation + j)));
    log("generate: " + jp.id + " wrote " + std::to_string(entries.size()) +
        " datasets");
    return entries;
  };
  const auto results = ForEachJoint(selected, per_joint);

  const fs::path mpath = layout.Manifest();
  std::ofstream out = OpenOut(mpath);
  out << kManifestHeader << '\n';
  for (const auto& entries : results) {
    for (const auto& e : entries) {
      out << e.joint << ',' << RegimeName(e.regime) << ',' << e.file << ','
          << e.rows << ',' << e.sha256 << '\n';
    }
  }
  CloseOut(out, mpath);
}

void RunTrain(const RunConfig& cfg, const RunOptions& opts) {
  cfg.Validate();
  const Logger log(opts);
  const RunLayout layout{cfg.output_dir};
  const std::vector<std::size_t> selected = SelectedJoints(cfg, opts);
  const std::vector<ManifestEntry> manifest = ReadManifestChecked(layout);

  auto per_joint = [&](std::size_t j) {
    const JointParams& jp = cfg.joints[j];
    const Trajectory base =
        LoadVerified(layout, manifest, jp.id, Regime::kBase);
    const Trajectory adaptation =
        LoadVerified(layout, manifest, jp.id, Regime::kAdaptation);
    const fs::path dir = layout.ModelDir(jp.id);
    MakeDirs(dir);

    const DownsampleResult ds = DownsampleBalanced(
        base, cfg.per_bin, DeriveSeed(cfg.master_seed, kSeedDownsample + j));
    if (ds.any_undersized) {
      log("train: " + jp.id + " some velocity bins hold fewer than " +
          std::to_string(cfg.per_bin) + " samples; taken whole");
    }
    {
      const fs::path p = dir / "downsample_bins.csv";
      std::ofstream out = OpenOut(p);
      out << "speed,direction,available,taken,undersized\n";
      for (const auto& b : ds.bins) {
        out << FormatNumber(b.speed) << ',' << b.direction << ','
            << b.available << ',' << b.taken << ',' << (b.undersized ? 1 : 0)
            << '\n';
      }
      CloseOut(out, p);
    }

    BaselineModel baseline =
        FitBaseline(jp.id, ds.samples, cfg,
                    DeriveSeed(cfg.master_seed, kSeedBaseline + j));
    baseline.trained_on_sha256 =
        FindEntry(manifest, jp.id, Regime::kBase, layout.Manifest()).sha256;
    SaveBaseline(baseline, dir / "conventional.ini");
    log("train: " + jp.id + " conventional fit rms " +
        FormatNumber(baseline.rms_residual));

    TrainConfig base_cfg = cfg.base_train;
    base_cfg.seed = DeriveSeed(cfg.master_seed, kSeedBaseTrain + j);
    TrainResult base_fit = TrainBase(ds.samples, base_cfg);
    base_fit.model.tag = jp.id + "/base";
    SaveModel(base_fit.model, dir / "base.mlp");
    SaveLossCurveCsv(base_fit.curve, dir / "base_loss.csv");
    log("train: " + jp.id + " base model final train loss " +
        FormatNumber(base_fit.curve.empty() ? 0.0
                                            : base_fit.curve.back().train_loss));

    TrainConfig residual_cfg = cfg.residual_train;
    residual_cfg.seed = DeriveSeed(cfg.master_seed, kSeedResidualTrain + j);
    TrainResult residual_fit =
        TrainResidual(base_fit.model, adaptation, residual_cfg);
    residual_fit.model.tag = jp.id + "/residual";
    SaveModel(residual_fit.model, dir / "residual.mlp");
    SaveLossCurveCsv(residual_fit.curve, dir / "residual_loss.csv");
    log("train: " + jp.id + " residual model done");
  };
  try {
    ForEachJoint(selected, per_joint);
  } catch (const std::ios_base::failure& e) {
    throw IoError(e.what());
  }
}

std::vector<EvalReport> RunEvaluate(const RunConfig& cfg,
                                    const RunOptions& opts) {
  cfg.Validate();
  const Logger log(opts);
  const RunLayout layout{cfg.output_dir};
  const std::vector<std::size_t> selected = SelectedJoints(cfg, opts);
  const std::vector<ManifestEntry> manifest = ReadManifestChecked(layout);

  auto per_joint = [&](std::size_t j) {
    const JointParams& jp = cfg.joints[j];
    const JointModels models = LoadJointModels(layout, jp);
    const ManifestEntry& base_entry =
        FindEntry(manifest, jp.id, Regime::kBase, layout.Manifest());
    if (models.baseline.trained_on_sha256 != base_entry.sha256) {
      throw InconsistentError("models of " + jp.id +
                              " were trained on a different base dataset");
    }
    const fs::path report_dir = layout.ReportDir(jp.id);
    MakeDirs(report_dir / "estimates");

    // Grid sweeps of the static predictions.
    const AxisRange v_axis{-0.7, 0.7, cfg.grid_velocity_points};
    const AxisRange g_axis{
        -jp.gravity_amplitude, jp.gravity_amplitude,
        static_cast<int>(std::lround(2.0 * jp.gravity_amplitude /
                                     cfg.grid_torque_spacing)) + 1};
    const std::map<std::string, PointEstimator> point_estimators = {
        {"conventional",
         [&](double tau_g, double v) {
           return StaticFriction(v, tau_g, tau_g,
                                 models.baseline.params.stribeck);
         }},
        {"base",
         [&](double tau_g, double v) {
           const double x[2] = {tau_g, v};
           return Forward(models.predictor.base, x);
         }},
        {"combined",
         [&](double tau_g, double v) {
           return PredictFriction(models.predictor, tau_g, v);
         }}};
    for (const char* id : kEstimators) {
      const GridSweepResult grid =
          GridSweep(point_estimators.at(id), v_axis, g_axis);
      const fs::path gp = report_dir / (std::string("grid_") + id + ".csv");
      std::ofstream g = OpenOut(gp);
      WriteGridCsv(grid, g);
      CloseOut(g, gp);
      const fs::path mp =
          report_dir / (std::string("grid_mean_") + id + ".csv");
      std::ofstream m = OpenOut(mp);
      WriteGridMeanCsv(grid, m);
      CloseOut(m, mp);
    }

    std::vector<std::pair<std::string, Trajectory>> datasets;
    datasets.emplace_back(kTestDataset, GenerateBaseTestSweep(cfg, j));
    for (Regime r : kEvalRegimes) {
      datasets.emplace_back(RegimeName(r),
                            LoadVerified(layout, manifest, jp.id, r));
    }

    std::vector<EvalReport> reports;
    for (const auto& [name, traj] : datasets) {
      const Eigen::MatrixXd x = FeatureMatrix(traj);
      std::vector<EstimatorSeries> series = {
          {"conventional", ConventionalFrictionSeries(
                               traj, models.baseline.params, jp.dt())},
          {"base", ToVector(ForwardBatch(models.predictor.base, x))},
          {"combined", ToVector(PredictFrictionBatch(models.predictor, x))}};
      reports.push_back(MakeReport(jp.id, name, traj, series, jp.inertia,
                                   cfg.denoise_window));
      for (const auto& s : series) {
        const std::vector<double> raw =
            EstimateExternalTorqueSeries(traj, s.friction, jp.inertia);
        const std::vector<double> den = Denoise(raw, cfg.denoise_window);
        const fs::path ep =
            report_dir / "estimates" / (name + "_" + s.id + ".csv");
        std::ofstream e = OpenOut(ep);
        WriteEstimateCsv(traj, raw, den, s.id, e);
        CloseOut(e, ep);
      }
      const EvalReport& r = reports.back();
      log("evaluate: " + jp.id + " " + name + " friction mae conventional " +
          FormatNumber(r.Get("conventional").friction_mae) + " base " +
          FormatNumber(r.Get("base").friction_mae) + " combined " +
          FormatNumber(r.Get("combined").friction_mae));
    }
    return reports;
  };
  std::vector<EvalReport> all;
  for (auto& rs : ForEachJoint(selected, per_joint)) {
    for (auto& r : rs) all.push_back(std::move(r));
  }
  const fs::path rp = layout.Report();
  std::ofstream out = OpenOut(rp);
  WriteReportCsv(all, out);
  CloseOut(out, rp);
  return all;
}

std::vector<EvalReport> RunReproduce(const RunConfig& cfg,
                                     const RunOptions& opts) {
  cfg.Validate();
  const fs::path target = cfg.output_dir;
  fs::path staging = target;
  staging += ".partial";
  std::error_code ec;
  fs::remove_all(staging, ec);
  if (ec) throw IoError("cannot clear " + staging.string());

  RunConfig staged = cfg;
  staged.output_dir = staging;
  std::vector<EvalReport> reports;
  try {
    RunGenerate(staged, opts);
    RunTrain(staged, opts);
    reports = RunEvaluate(staged, opts);
    std::ofstream c = OpenOut(staging / "config.ini");
    WriteRunConfig(cfg, c);
    CloseOut(c, staging / "config.ini");
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  fs::remove_all(target, ec);
  if (ec) throw IoError("cannot replace " + target.string());
  fs::rename(staging, target, ec);
  if (ec) {
    fs::remove_all(staging, ec);
    throw IoError("cannot move results into " + target.string());
  }
  return reports;
}

namespace {

template <typename Fn>
int Guarded(const char* stage, std::ostream& err, Fn fn) {
  try {
    fn();
    return kExitOk;
  } catch (const std::exception& e) {
    err << stage << ": " << e.what() << '\n';
    return ExitCodeFor(e);
  }
}

}  // namespace

int CmdGenerate(const RunConfig& cfg, const RunOptions& opts,
                std::ostream& err) {
  return Guarded("generate", err, [&] { RunGenerate(cfg, opts); });
}

int CmdTrain(const RunConfig& cfg, const RunOptions& opts, std::ostream& err) {
  return Guarded("train", err, [&] { RunTrain(cfg, opts); });
}

int CmdEvaluate(const RunConfig& cfg, const RunOptions& opts,
                std::ostream& err) {
  return Guarded("evaluate", err, [&] { RunEvaluate(cfg, opts); });
}

int CmdReproduce(const RunConfig& cfg, const RunOptions& opts,
                 std::ostream& err) {
  return Guarded("reproduce", err, [&] { RunReproduce(cfg, opts); });
}

}  // namespace frictionadapt
