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

#ifndef TRIBOOST_PIPELINE_HPP_
#define TRIBOOST_PIPELINE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "triboost/json_io.hpp"
#include "triboost/learners.hpp"
#include "triboost/sampling.hpp"
#include "triboost/stack.hpp"
#include "triboost/synth.hpp"
#include "triboost/tune.hpp"
#include "triboost/types.hpp"

namespace triboost::pipeline {

// Config-driven runner for the whole survey-to-report flow. A run config is
// one JSON document; unknown keys anywhere in it are a ConfigError (the CLI
// maps that to exit code 2). Every random decision in a run is derived from
// the single top-level seed, so two runs of the same config are byte
// identical except for the timestamped run.log.

struct OutputSection {
  std::string dir = "triboost_run";
};

// Tasks: "login" (binary), "message" (three-level), "message_binary"
// (message recoded 0 vs >= 1).
struct DataSection {
  std::string cohort_csv;   // empty -> <output.dir>/cohort.csv
  std::string labels_csv;   // empty -> <output.dir>/labels.csv
  std::string schema_json;  // empty -> schema implied by the synth section
  std::vector<std::string> tasks = {"login", "message"};
};

struct PreprocessSection {
  double missing_threshold = 0.8;  // column drop cutoff, fit on train rows
  int impute_k = 5;
  int text_clusters = 4;
  double text_threshold = 0.3;
  std::string rules_csv;  // optional curated normalization rules
  Index top_k = 0;        // univariate selection; 0 keeps every column
};

struct SamplingSection {
  double train_ratio = 0.8;
  bool use_smote = true;  // config key "smote"
  int smote_k = 5;
};

// Resolved per-model hyperparameters. Defaults are the "paper" preset and
// can be overridden by a preset file and/or inline objects; seeds are filled
// per task at fit time.
struct ModelSet {
  learners::LogisticConfig lr;
  learners::TreeConfig dt;
  learners::ForestConfig rf;
  learners::SvmConfig svm;
  learners::BoostConfig xgb;
  learners::BoostConfig lgbm;
  learners::BoostConfig catboost;
  // ETB: three boosted bases sharing one config (growths fixed to
  // level/leaf/oblivious) under a logistic meta-learner.
  learners::BoostConfig etb_base;
  learners::LogisticConfig etb_meta;
  int etb_folds = 5;
  bool etb_refit_full = true;
};

struct EvalSection {
  int n_resamples = 1000;
  double alpha = 0.05;
  // Per-task metric columns; missing tasks fall back on arity defaults
  // (binary: accuracy/precision/recall/f1/auc, multiclass: accuracy plus
  // macro precision/recall/f1).
  std::map<std::string, std::vector<std::string>> metrics;
};

struct ExplainSection {
  int top_n = 10;
  Index max_rows = 200;   // SHAP row budget, taken from the head of the test block
  int decision_rows = 8;  // rows drawn in the decision plot
  int class_index = -1;   // -1: last class of the task
};

struct TuneSection {
  std::string model = "xgb";
  std::string task = "login";
  std::string metric = "accuracy";
  int n_candidates = 20;
  int n_folds = 5;
  // Axis name -> candidate values; empty uses the model's built-in grid.
  // Axes iterate in key order.
  std::vector<std::pair<std::string, std::vector<Json>>> grid;
};

struct RunConfig {
  std::uint64_t seed = 42;
  OutputSection output;
  DataSection data;
  synth::CohortSpec cohort;  // section "synth"; its seed tracks the run seed
  PreprocessSection preprocess;
  SamplingSection sampling;
  ModelSet models;
  EvalSection eval;
  ExplainSection explain;
  TuneSection tune;
};

RunConfig default_config();

// Strict parse: unknown keys, wrong types and out-of-range values raise
// ConfigError naming the offending "section.key".
RunConfig parse_config(const Json& j);

// Reads and parses a config file; an unreadable or malformed file is a
// ConfigError too (bad invocation, not a runtime failure).
RunConfig load_config(const std::string& path);

// Re-points every seed (cohort included) at the override.
void apply_seed_override(RunConfig& config, std::uint64_t seed);

// The "paper" preset: every hyperparameter the protocol fixes for the seven
// baselines and the ETB stack.
ModelSet paper_preset();

// --- Commands -----------------------------------------------------------------

// synth: cohort.csv, labels.csv and ground_truth.json under output.dir.
void cmd_synth(const RunConfig& config);

// train: per task, fits the preprocessing chain on the training split only,
// then all seven baselines plus ETB; writes split plans, preprocessing
// artifacts, model files, and the leakage audit log.
void cmd_train(const RunConfig& config);

// evaluate: held-out-test metrics with percentile-bootstrap CIs for every
// trained model; writes CSV + text tables and prints the text table. A model
// whose recorded split fingerprint does not match the stored split plan is a
// contamination error.
void cmd_evaluate(const RunConfig& config);

// explain: TreeSHAP of the stack's level-wise base plus the stack
// composition; writes per-task SHAP CSVs, ranking CSV, summary/decision SVGs.
void cmd_explain(const RunConfig& config);

// tune: randomized grid search for one model/task pair on the training
// split; writes the scored candidate table and echoes the best cell.
void cmd_tune(const RunConfig& config);

// report: synth (when the cohort file is absent) -> train -> evaluate ->
// explain, then a deterministic markdown digest of the artifacts.
void cmd_report(const RunConfig& config);

// Dispatch by subcommand name; unknown names raise ConfigError.
void run_command(const std::string& name, const RunConfig& config);

// --- Artifact plumbing ----------------------------------------------------------

// FNV-1a over the raw bytes of a file.
std::uint64_t hash_file(const std::string& path);

// {relative path -> 16-hex content hash} over every regular file under dir,
// skipping run.log (timestamps live there) and manifest.json itself.
Json build_manifest(const std::string& dir);

// Canonical fingerprint of a task's train/test partition; models record it
// and evaluation refuses partitions that do not match.
std::string split_fingerprint(const std::string& task,
                              const sampling::SplitPlan& plan);

}  // namespace triboost::pipeline

#endif  // TRIBOOST_PIPELINE_HPP_
