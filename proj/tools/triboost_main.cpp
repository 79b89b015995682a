/*
 * Copyright 2026 The Triboost Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "triboost/error.hpp"
#include "triboost/pipeline.hpp"

// Exit codes: 0 success, 1 runtime failure, 2 configuration/usage error.
int main(int argc, char** argv) {
  CLI::App app{"explainable engagement modeling over survey cohorts"};
  app.name("triboost");
  app.require_subcommand(1);
  app.fallthrough();  // --config etc. may follow the subcommand

  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--config", config_path, "JSON run configuration file");
  app.add_option("--seed", seed, "override the run seed from the config");
  app.add_option("--threads", threads,
                 "worker thread budget; results are identical for any value");

  app.add_subcommand("synth", "generate a synthetic cohort with known truth");
  app.add_subcommand("train", "split, preprocess, balance and fit all models");
  app.add_subcommand("tune", "randomized grid search for one model and task");
  app.add_subcommand("evaluate", "held-out metrics with bootstrap intervals");
  app.add_subcommand("explain", "SHAP rankings, summary and decision plots");
  app.add_subcommand("report", "run the full pipeline and write a digest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "triboost: %s\n", e.what());
    return 2;
  }

  try {
    triboost::pipeline::RunConfig config =
        config_path.empty() ? triboost::pipeline::default_config()
                            : triboost::pipeline::load_config(config_path);
    if (app.count("--seed") > 0) {
      triboost::pipeline::apply_seed_override(config, seed);
    }
    if (threads < 1) {
      throw triboost::ConfigError("config: --threads must be positive");
    }
    triboost::pipeline::run_command(app.get_subcommands().front()->get_name(),
                                    config);
  } catch (const triboost::ConfigError& e) {
    std::fprintf(stderr, "triboost: config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "triboost: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
