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

// Command-line driver: generate datasets, train the three estimators,
// evaluate them, or do all of it in one go.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "frictionadapt/config.h"
#include "frictionadapt/errors.h"
#include "frictionadapt/pipeline.h"

namespace {

constexpr const char* kConfigEnv = "FRICTIONADAPT_CONFIG";

}  // namespace

int main(int argc, char** argv) {
  using namespace frictionadapt;

  CLI::App app{"Residual friction-model adaptation and sensorless "
               "external-torque estimation on a simulated joint"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string only_joint;
  std::string out_dir;
  bool quiet = false;
  bool dump_config = false;
  app.add_option("--config", config_path,
                 std::string("INI run configuration (default: $") +
                     kConfigEnv + ", else built-in defaults)");
  app.add_option("--only-joint", only_joint, "Restrict the run to one joint");
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_flag("--quiet", quiet, "Suppress progress output");
  app.add_flag("--print-config", dump_config,
               "Print the effective configuration; alone, print and exit");

  auto* generate = app.add_subcommand(
      "generate", "Write base, extended and adaptation datasets + manifest");
  auto* train = app.add_subcommand(
      "train", "Fit the conventional model, train base and residual nets");
  auto* evaluate = app.add_subcommand(
      "evaluate", "Write reports, grid sweeps and external-torque estimates");
  auto* reproduce =
      app.add_subcommand("reproduce", "generate + train + evaluate");
  for (auto* sub : {generate, train, evaluate, reproduce}) {
    sub->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  if (config_path.empty()) {
    if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env) {
      config_path = env;
    }
  }

  RunConfig cfg;
  try {
    cfg = config_path.empty() ? DefaultRunConfig()
                              : LoadRunConfig(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    cfg.Validate();
  } catch (const ParseError& e) {
    std::cerr << "config: " << e.field() << ": " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << '\n';
    return ExitCodeFor(e);
  }
  if (dump_config) WriteRunConfig(cfg, std::cout);
  if (app.get_subcommands().empty()) {
    if (dump_config) return kExitOk;
    std::cerr << app.help();
    return kExitFailure;
  }

  RunOptions opts;
  opts.quiet = quiet;
  if (!only_joint.empty()) opts.only_joint = only_joint;

  if (*generate) return CmdGenerate(cfg, opts, std::cerr);
  if (*train) return CmdTrain(cfg, opts, std::cerr);
  if (*evaluate) return CmdEvaluate(cfg, opts, std::cerr);
  if (*reproduce) return CmdReproduce(cfg, opts, std::cerr);
  return kExitFailure;
}
