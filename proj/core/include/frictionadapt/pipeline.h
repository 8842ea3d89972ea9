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

#ifndef FRICTIONADAPT_PIPELINE_H_
#define FRICTIONADAPT_PIPELINE_H_

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "frictionadapt/config.h"
#include "frictionadapt/evaluation.h"
#include "frictionadapt/friction_models.h"
#include "frictionadapt/training.h"

namespace frictionadapt {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitIo = 2,
  kExitMissingInput = 3,
  kExitInconsistent = 4,
};

// Maps an exception escaping a pipeline stage to the process exit code.
int ExitCodeFor(const std::exception& e);

struct RunOptions {
  std::optional<std::string> only_joint;
  bool quiet = false;
  std::ostream* log = nullptr;  // progress lines; std::clog when null
};

// Layout of a run directory.
//   data/manifest.csv, data/<joint>/<regime>.csv
//   models/<joint>/{conventional.ini,base.mlp,residual.mlp,...}
//   reports/report.csv, reports/<joint>/grid_*.csv,
//   reports/<joint>/estimates/<dataset>_<estimator>.csv
struct RunLayout {
  std::filesystem::path root;

  std::filesystem::path Manifest() const;
  std::filesystem::path Dataset(const std::string& joint, Regime r) const;
  std::filesystem::path ModelDir(const std::string& joint) const;
  std::filesystem::path Report() const;
  std::filesystem::path ReportDir(const std::string& joint) const;
};

struct ManifestEntry {
  std::string joint;
  Regime regime = Regime::kBase;
  std::string file;  // relative to the data directory
  std::size_t rows = 0;
  std::string sha256;
};

std::string Sha256File(const std::filesystem::path& path);
std::vector<ManifestEntry> ReadManifest(const std::filesystem::path& path);

// The static curve the conventional estimator identified, plus the bristle
// parameters it is simulated with.
struct BaselineModel {
  std::string joint;
  LuGreParams params;
  double rms_residual = 0.0;
  std::string trained_on_sha256;  // hash of the base dataset used
};

void SaveBaseline(const BaselineModel& b, const std::filesystem::path& path);
BaselineModel LoadBaseline(const std::filesystem::path& path);

// Conventional estimator fitted to downsampled base data, load-blind.
BaselineModel FitBaseline(const std::string& joint,
                          std::span<const FrictionSample> samples,
                          const RunConfig& cfg, std::uint64_t seed);

// The held-out base-regime sweep used for evaluation; never written during
// generation.
Trajectory GenerateBaseTestSweep(const RunConfig& cfg, std::size_t joint_index);

// Stage entry points. Each works in cfg.output_dir and throws on failure.
void RunGenerate(const RunConfig& cfg, const RunOptions& opts);
void RunTrain(const RunConfig& cfg, const RunOptions& opts);
std::vector<EvalReport> RunEvaluate(const RunConfig& cfg,
                                    const RunOptions& opts);
// Generate, train and evaluate in a staging directory that replaces
// cfg.output_dir only on success; a failed run leaves nothing behind.
std::vector<EvalReport> RunReproduce(const RunConfig& cfg,
                                     const RunOptions& opts);

// Exit-code wrappers for the command-line tool. Errors go to `err`.
int CmdGenerate(const RunConfig& cfg, const RunOptions& opts,
                std::ostream& err);
int CmdTrain(const RunConfig& cfg, const RunOptions& opts, std::ostream& err);
int CmdEvaluate(const RunConfig& cfg, const RunOptions& opts,
                std::ostream& err);
int CmdReproduce(const RunConfig& cfg, const RunOptions& opts,
                 std::ostream& err);

}  // namespace frictionadapt

#endif  // FRICTIONADAPT_PIPELINE_H_
