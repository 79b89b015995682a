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

#include "triboost/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "triboost/dataset.hpp"
#include "triboost/error.hpp"
#include "triboost/eval.hpp"
#include "triboost/explain.hpp"
#include "triboost/preprocess.hpp"
#include "triboost/rng.hpp"
#include "triboost/textnorm.hpp"

namespace triboost::pipeline {

namespace fs = std::filesystem;

namespace {

// --- Small formatting helpers ---------------------------------------------------

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string hex16(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const std::string& content, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

// Timestamps are confined to this file so that every other artifact is a pure
// function of the config.
void log_line(const std::string& dir, const std::string& msg) {
  ensure_dir(dir);
  std::ofstream out(dir + "/run.log", std::ios::app);
  std::time_t t = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  out << '[' << stamp << "] " << msg << '\n';
}

// --- Config plumbing --------------------------------------------------------------

std::string key_path(const std::string& ctx, const std::string& key) {
  return ctx.empty() ? key : ctx + "." + key;
}

const Json* find_key(const Json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

void expect_object(const Json& j, const std::string& ctx) {
  if (!j.is_object()) {
    throw ConfigError("config: " + (ctx.empty() ? std::string("document") : ctx) +
                      " must be a JSON object");
  }
}

void reject_unknown(const Json& j, const std::string& ctx,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("config: unknown key '" + key_path(ctx, item.key()) + "'");
    }
  }
}

void require_cfg(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("config: " + msg);
}

void take_double(const Json& j, const std::string& ctx, const char* key,
                 double& out) {
  if (const Json* v = find_key(j, key)) {
    require_cfg(v->is_number(), key_path(ctx, key) + " must be a number");
    out = v->get<double>();
  }
}

void take_int(const Json& j, const std::string& ctx, const char* key, int& out) {
  if (const Json* v = find_key(j, key)) {
    require_cfg(v->is_number_integer(), key_path(ctx, key) + " must be an integer");
    out = v->get<int>();
  }
}

void take_index(const Json& j, const std::string& ctx, const char* key,
                Index& out) {
  if (const Json* v = find_key(j, key)) {
    require_cfg(v->is_number_integer(), key_path(ctx, key) + " must be an integer");
    out = v->get<Index>();
  }
}

void take_u64(const Json& j, const std::string& ctx, const char* key,
              std::uint64_t& out) {
  if (const Json* v = find_key(j, key)) {
    require_cfg(v->is_number_integer() && v->get<std::int64_t>() >= 0,
                key_path(ctx, key) + " must be a non-negative integer");
    out = v->get<std::uint64_t>();
  }
}

void take_bool(const Json& j, const std::string& ctx, const char* key, bool& out) {
  if (const Json* v = find_key(j, key)) {
    require_cfg(v->is_boolean(), key_path(ctx, key) + " must be a boolean");
    out = v->get<bool>();
  }
}

void take_string(const Json& j, const std::string& ctx, const char* key,
                 std::string& out) {
  if (const Json* v = find_key(j, key)) {
    require_cfg(v->is_string(), key_path(ctx, key) + " must be a string");
    out = v->get<std::string>();
  }
}

const std::set<std::string>& task_names() {
  static const std::set<std::string> names = {"login", "message",
                                              "message_binary"};
  return names;
}

bool task_is_binary(const std::string& task) { return task != "message"; }

const std::set<std::string>& metric_names() {
  static const std::set<std::string> names = {
      "accuracy", "precision",       "recall",       "f1",
      "auc",      "macro_precision", "macro_recall", "macro_f1"};
  return names;
}

bool metric_is_binary_only(const std::string& name) {
  return name == "precision" || name == "recall" || name == "f1" ||
         name == "auc";
}

// --- Section parsers ---------------------------------------------------------------

void parse_output(const Json& j, OutputSection& out) {
  expect_object(j, "output");
  reject_unknown(j, "output", {"dir"});
  take_string(j, "output", "dir", out.dir);
  require_cfg(!out.dir.empty(), "output.dir must not be empty");
}

void parse_data(const Json& j, DataSection& out) {
  expect_object(j, "data");
  reject_unknown(j, "data", {"cohort_csv", "labels_csv", "schema_json", "tasks"});
  take_string(j, "data", "cohort_csv", out.cohort_csv);
  take_string(j, "data", "labels_csv", out.labels_csv);
  take_string(j, "data", "schema_json", out.schema_json);
  if (const Json* v = find_key(j, "tasks")) {
    require_cfg(v->is_array() && !v->empty(),
                "data.tasks must be a non-empty array");
    out.tasks.clear();
    for (const Json& t : *v) {
      require_cfg(t.is_string(), "data.tasks entries must be strings");
      const std::string name = t.get<std::string>();
      require_cfg(task_names().count(name) == 1,
                  "data.tasks: unknown task '" + name +
                      "' (expected login, message or message_binary)");
      require_cfg(std::find(out.tasks.begin(), out.tasks.end(), name) ==
                      out.tasks.end(),
                  "data.tasks lists '" + name + "' twice");
      out.tasks.push_back(name);
    }
  }
}

void parse_synth(const Json& j, synth::CohortSpec& spec) {
  expect_object(j, "synth");
  reject_unknown(j, "synth",
                 {"n", "n_features", "login_rate", "msg1_rate", "msg2plus_rate",
                  "female_rate", "white_rate", "asian_rate", "black_rate",
                  "planted", "missing_rate_low", "missing_rate_high",
                  "n_high_missing_columns", "high_missing_rate"});
  take_index(j, "synth", "n", spec.n);
  require_cfg(spec.n >= 2, "synth.n must be at least 2");
  take_int(j, "synth", "n_features", spec.n_features);
  require_cfg(spec.n_features >= 1, "synth.n_features must be positive");

  const std::pair<const char*, double*> rates[] = {
      {"login_rate", &spec.login_rate},
      {"msg1_rate", &spec.msg1_rate},
      {"msg2plus_rate", &spec.msg2plus_rate}};
  for (const auto& [key, slot] : rates) {
    take_double(j, "synth", key, *slot);
    require_cfg(*slot > 0.0 && *slot < 1.0,
                std::string("synth.") + key + " must lie strictly inside (0, 1)");
  }
  require_cfg(spec.msg1_rate + spec.msg2plus_rate < 1.0,
              "synth.msg1_rate + synth.msg2plus_rate must stay below 1");

  const std::pair<const char*, double*> props[] = {
      {"female_rate", &spec.female_rate},
      {"white_rate", &spec.white_rate},
      {"asian_rate", &spec.asian_rate},
      {"black_rate", &spec.black_rate},
      {"high_missing_rate", &spec.high_missing_rate}};
  for (const auto& [key, slot] : props) {
    take_double(j, "synth", key, *slot);
    require_cfg(*slot >= 0.0 && *slot <= 1.0,
                std::string("synth.") + key + " must lie in [0, 1]");
  }

  take_double(j, "synth", "missing_rate_low", spec.missing_rate_low);
  take_double(j, "synth", "missing_rate_high", spec.missing_rate_high);
  require_cfg(spec.missing_rate_low >= 0.0 && spec.missing_rate_high <= 1.0 &&
                  spec.missing_rate_low <= spec.missing_rate_high,
              "synth.missing_rate_low/high must satisfy 0 <= low <= high <= 1");
  take_int(j, "synth", "n_high_missing_columns", spec.n_high_missing_columns);
  require_cfg(spec.n_high_missing_columns >= 0,
              "synth.n_high_missing_columns must be non-negative");

  if (const Json* v = find_key(j, "planted")) {
    require_cfg(v->is_array(), "synth.planted must be an array");
    spec.planted.clear();
    for (const Json& p : *v) {
      expect_object(p, "synth.planted[]");
      reject_unknown(p, "synth.planted[]", {"feature", "outcome", "magnitude"});
      synth::PlantedEffect effect;
      take_string(p, "synth.planted[]", "feature", effect.feature);
      take_string(p, "synth.planted[]", "outcome", effect.outcome);
      take_double(p, "synth.planted[]", "magnitude", effect.magnitude);
      require_cfg(!effect.feature.empty(),
                  "synth.planted[].feature must not be empty");
      require_cfg(effect.outcome == "login" || effect.outcome == "message",
                  "synth.planted[].outcome must be 'login' or 'message'");
      spec.planted.push_back(std::move(effect));
    }
  }
}

void parse_preprocess(const Json& j, PreprocessSection& out) {
  expect_object(j, "preprocess");
  reject_unknown(j, "preprocess",
                 {"missing_threshold", "impute_k", "text_clusters",
                  "text_threshold", "rules_csv", "top_k"});
  take_double(j, "preprocess", "missing_threshold", out.missing_threshold);
  require_cfg(out.missing_threshold > 0.0 && out.missing_threshold <= 1.0,
              "preprocess.missing_threshold must lie in (0, 1]");
  take_int(j, "preprocess", "impute_k", out.impute_k);
  require_cfg(out.impute_k >= 1, "preprocess.impute_k must be positive");
  take_int(j, "preprocess", "text_clusters", out.text_clusters);
  require_cfg(out.text_clusters >= 1, "preprocess.text_clusters must be positive");
  take_double(j, "preprocess", "text_threshold", out.text_threshold);
  require_cfg(out.text_threshold >= 0.0 && out.text_threshold <= 1.0,
              "preprocess.text_threshold must lie in [0, 1]");
  take_string(j, "preprocess", "rules_csv", out.rules_csv);
  take_index(j, "preprocess", "top_k", out.top_k);
  require_cfg(out.top_k >= 0, "preprocess.top_k must be non-negative");
}

void parse_sampling(const Json& j, SamplingSection& out) {
  expect_object(j, "sampling");
  reject_unknown(j, "sampling", {"train_ratio", "smote", "smote_k"});
  take_double(j, "sampling", "train_ratio", out.train_ratio);
  require_cfg(out.train_ratio > 0.0 && out.train_ratio < 1.0,
              "sampling.train_ratio must lie strictly inside (0, 1)");
  take_bool(j, "sampling", "smote", out.use_smote);
  take_int(j, "sampling", "smote_k", out.smote_k);
  require_cfg(out.smote_k >= 1, "sampling.smote_k must be positive");
}

void parse_eval(const Json& j, EvalSection& out) {
  expect_object(j, "eval");
  reject_unknown(j, "eval", {"n_resamples", "alpha", "metrics"});
  take_int(j, "eval", "n_resamples", out.n_resamples);
  require_cfg(out.n_resamples >= 1, "eval.n_resamples must be positive");
  take_double(j, "eval", "alpha", out.alpha);
  require_cfg(out.alpha > 0.0 && out.alpha < 1.0,
              "eval.alpha must lie strictly inside (0, 1)");
  if (const Json* v = find_key(j, "metrics")) {
    expect_object(*v, "eval.metrics");
    for (const auto& item : v->items()) {
      require_cfg(task_names().count(item.key()) == 1,
                  "eval.metrics: unknown task '" + item.key() + "'");
      require_cfg(item.value().is_array() && !item.value().empty(),
                  "eval.metrics." + item.key() + " must be a non-empty array");
      std::vector<std::string> list;
      for (const Json& m : item.value()) {
        require_cfg(m.is_string(),
                    "eval.metrics." + item.key() + " entries must be strings");
        const std::string name = m.get<std::string>();
        require_cfg(metric_names().count(name) == 1,
                    "eval.metrics." + item.key() + ": unknown metric '" + name +
                        "'");
        require_cfg(task_is_binary(item.key()) || !metric_is_binary_only(name),
                    "eval.metrics." + item.key() + ": metric '" + name +
                        "' is binary-only");
        list.push_back(name);
      }
      out.metrics[item.key()] = std::move(list);
    }
  }
}

void parse_explain(const Json& j, ExplainSection& out) {
  expect_object(j, "explain");
  reject_unknown(j, "explain", {"top_n", "max_rows", "decision_rows", "class_index"});
  take_int(j, "explain", "top_n", out.top_n);
  require_cfg(out.top_n >= 1, "explain.top_n must be positive");
  take_index(j, "explain", "max_rows", out.max_rows);
  require_cfg(out.max_rows >= 1, "explain.max_rows must be positive");
  take_int(j, "explain", "decision_rows", out.decision_rows);
  require_cfg(out.decision_rows >= 1, "explain.decision_rows must be positive");
  take_int(j, "explain", "class_index", out.class_index);
  require_cfg(out.class_index >= -1, "explain.class_index must be >= -1");
}

// --- Model override parsers -----------------------------------------------------

void parse_lr_over(const Json& j, const std::string& ctx,
                   learners::LogisticConfig& cfg) {
  expect_object(j, ctx);
  reject_unknown(j, ctx, {"penalty", "C", "tol", "max_iter"});
  if (const Json* v = find_key(j, "penalty")) {
    require_cfg(v->is_string(), ctx + ".penalty must be a string");
    const std::string p = v->get<std::string>();
    if (p == "l1") {
      cfg.penalty = learners::LogisticConfig::Penalty::l1;
    } else if (p == "l2") {
      cfg.penalty = learners::LogisticConfig::Penalty::l2;
    } else {
      throw ConfigError("config: " + ctx + ".penalty must be 'l1' or 'l2'");
    }
  }
  take_double(j, ctx, "C", cfg.C);
  require_cfg(cfg.C > 0.0, ctx + ".C must be positive");
  take_double(j, ctx, "tol", cfg.tol);
  require_cfg(cfg.tol > 0.0, ctx + ".tol must be positive");
  take_int(j, ctx, "max_iter", cfg.max_iter);
  require_cfg(cfg.max_iter >= 1, ctx + ".max_iter must be positive");
}

void parse_dt_over(const Json& j, const std::string& ctx,
                   learners::TreeConfig& cfg) {
  expect_object(j, ctx);
  reject_unknown(j, ctx,
                 {"criterion", "splitter", "max_depth", "min_samples_split",
                  "min_samples_leaf", "max_features"});
  if (const Json* v = find_key(j, "criterion")) {
    require_cfg(v->is_string(), ctx + ".criterion must be a string");
    const std::string c = v->get<std::string>();
    if (c == "gini") {
      cfg.criterion = learners::TreeConfig::Criterion::gini;
    } else if (c == "entropy") {
      cfg.criterion = learners::TreeConfig::Criterion::entropy;
    } else {
      throw ConfigError("config: " + ctx + ".criterion must be 'gini' or 'entropy'");
    }
  }
  if (const Json* v = find_key(j, "splitter")) {
    require_cfg(v->is_string(), ctx + ".splitter must be a string");
    const std::string s = v->get<std::string>();
    if (s == "best") {
      cfg.splitter = learners::TreeConfig::Splitter::best;
    } else if (s == "random") {
      cfg.splitter = learners::TreeConfig::Splitter::random;
    } else {
      throw ConfigError("config: " + ctx + ".splitter must be 'best' or 'random'");
    }
  }
  take_int(j, ctx, "max_depth", cfg.max_depth);
  require_cfg(cfg.max_depth == -1 || cfg.max_depth >= 1,
              ctx + ".max_depth must be -1 (unbounded) or positive");
  take_int(j, ctx, "min_samples_split", cfg.min_samples_split);
  require_cfg(cfg.min_samples_split >= 2, ctx + ".min_samples_split must be >= 2");
  take_int(j, ctx, "min_samples_leaf", cfg.min_samples_leaf);
  require_cfg(cfg.min_samples_leaf >= 1, ctx + ".min_samples_leaf must be >= 1");
  take_int(j, ctx, "max_features", cfg.max_features);
  require_cfg(cfg.max_features >= -1, ctx + ".max_features must be >= -1");
}

void parse_rf_over(const Json& j, const std::string& ctx,
                   learners::ForestConfig& cfg) {
  expect_object(j, ctx);
  reject_unknown(j, ctx,
                 {"n_estimators", "max_depth", "criterion", "min_samples_split",
                  "min_samples_leaf"});
  take_int(j, ctx, "n_estimators", cfg.n_estimators);
  require_cfg(cfg.n_estimators >= 1, ctx + ".n_estimators must be positive");
  take_int(j, ctx, "max_depth", cfg.max_depth);
  require_cfg(cfg.max_depth == -1 || cfg.max_depth >= 1,
              ctx + ".max_depth must be -1 (unbounded) or positive");
  if (const Json* v = find_key(j, "criterion")) {
    require_cfg(v->is_string(), ctx + ".criterion must be a string");
    const std::string c = v->get<std::string>();
    if (c == "gini") {
      cfg.criterion = learners::TreeConfig::Criterion::gini;
    } else if (c == "entropy") {
      cfg.criterion = learners::TreeConfig::Criterion::entropy;
    } else {
      throw ConfigError("config: " + ctx + ".criterion must be 'gini' or 'entropy'");
    }
  }
  take_int(j, ctx, "min_samples_split", cfg.min_samples_split);
  require_cfg(cfg.min_samples_split >= 2, ctx + ".min_samples_split must be >= 2");
  take_int(j, ctx, "min_samples_leaf", cfg.min_samples_leaf);
  require_cfg(cfg.min_samples_leaf >= 1, ctx + ".min_samples_leaf must be >= 1");
}

void parse_svm_over(const Json& j, const std::string& ctx,
                    learners::SvmConfig& cfg) {
  expect_object(j, ctx);
  reject_unknown(j, ctx, {"C", "tol", "max_iter"});
  take_double(j, ctx, "C", cfg.C);
  require_cfg(cfg.C > 0.0, ctx + ".C must be positive");
  take_double(j, ctx, "tol", cfg.tol);
  require_cfg(cfg.tol > 0.0, ctx + ".tol must be positive");
  take_int(j, ctx, "max_iter", cfg.max_iter);
  require_cfg(cfg.max_iter >= 1, ctx + ".max_iter must be positive");
}

void parse_boost_common(const Json& j, const std::string& ctx,
                        learners::BoostConfig& cfg) {
  take_double(j, ctx, "learning_rate", cfg.learning_rate);
  require_cfg(cfg.learning_rate > 0.0, ctx + ".learning_rate must be positive");
  take_int(j, ctx, "n_estimators", cfg.n_estimators);
  require_cfg(cfg.n_estimators >= 1, ctx + ".n_estimators must be positive");
  take_int(j, ctx, "max_depth", cfg.max_depth);
  require_cfg(cfg.max_depth >= 1, ctx + ".max_depth must be positive");
  take_int(j, ctx, "num_leaves", cfg.num_leaves);
  require_cfg(cfg.num_leaves >= 2, ctx + ".num_leaves must be >= 2");
  take_double(j, ctx, "reg_lambda", cfg.reg_lambda);
  require_cfg(cfg.reg_lambda >= 0.0, ctx + ".reg_lambda must be non-negative");
  take_double(j, ctx, "gamma", cfg.gamma);
  require_cfg(cfg.gamma >= 0.0, ctx + ".gamma must be non-negative");
  take_double(j, ctx, "min_child_weight", cfg.min_child_weight);
  require_cfg(cfg.min_child_weight >= 0.0,
              ctx + ".min_child_weight must be non-negative");
  take_double(j, ctx, "subsample", cfg.subsample);
  require_cfg(cfg.subsample > 0.0 && cfg.subsample <= 1.0,
              ctx + ".subsample must lie in (0, 1]");
  take_double(j, ctx, "colsample_bytree", cfg.colsample_bytree);
  require_cfg(cfg.colsample_bytree > 0.0 && cfg.colsample_bytree <= 1.0,
              ctx + ".colsample_bytree must lie in (0, 1]");
  take_int(j, ctx, "n_permutations", cfg.n_permutations);
  require_cfg(cfg.n_permutations >= 1, ctx + ".n_permutations must be positive");
}

void parse_boost_over(const Json& j, const std::string& ctx,
                      learners::BoostConfig& cfg) {
  expect_object(j, ctx);
  reject_unknown(j, ctx,
                 {"learning_rate", "n_estimators", "max_depth", "num_leaves",
                  "reg_lambda", "gamma", "min_child_weight", "subsample",
                  "colsample_bytree", "n_permutations"});
  parse_boost_common(j, ctx, cfg);
}

void parse_etb_over(const Json& j, const std::string& ctx, ModelSet& m) {
  expect_object(j, ctx);
  reject_unknown(j, ctx,
                 {"learning_rate", "n_estimators", "max_depth", "num_leaves",
                  "reg_lambda", "gamma", "min_child_weight", "subsample",
                  "colsample_bytree", "n_permutations", "n_folds", "refit_full",
                  "meta_penalty", "meta_C"});
  parse_boost_common(j, ctx, m.etb_base);
  take_int(j, ctx, "n_folds", m.etb_folds);
  require_cfg(m.etb_folds >= 2, ctx + ".n_folds must be >= 2");
  take_bool(j, ctx, "refit_full", m.etb_refit_full);
  if (const Json* v = find_key(j, "meta_penalty")) {
    require_cfg(v->is_string(), ctx + ".meta_penalty must be a string");
    const std::string p = v->get<std::string>();
    if (p == "l1") {
      m.etb_meta.penalty = learners::LogisticConfig::Penalty::l1;
    } else if (p == "l2") {
      m.etb_meta.penalty = learners::LogisticConfig::Penalty::l2;
    } else {
      throw ConfigError("config: " + ctx + ".meta_penalty must be 'l1' or 'l2'");
    }
  }
  take_double(j, ctx, "meta_C", m.etb_meta.C);
  require_cfg(m.etb_meta.C > 0.0, ctx + ".meta_C must be positive");
}

void apply_model_overrides(const Json& j, const std::string& ctx, ModelSet& m) {
  if (const Json* v = find_key(j, "lr")) parse_lr_over(*v, ctx + ".lr", m.lr);
  if (const Json* v = find_key(j, "dt")) parse_dt_over(*v, ctx + ".dt", m.dt);
  if (const Json* v = find_key(j, "rf")) parse_rf_over(*v, ctx + ".rf", m.rf);
  if (const Json* v = find_key(j, "svm")) parse_svm_over(*v, ctx + ".svm", m.svm);
  if (const Json* v = find_key(j, "xgb")) parse_boost_over(*v, ctx + ".xgb", m.xgb);
  if (const Json* v = find_key(j, "lgbm"))
    parse_boost_over(*v, ctx + ".lgbm", m.lgbm);
  if (const Json* v = find_key(j, "catboost"))
    parse_boost_over(*v, ctx + ".catboost", m.catboost);
  if (const Json* v = find_key(j, "etb")) parse_etb_over(*v, ctx + ".etb", m);
}

void parse_models(const Json& j, ModelSet& m) {
  expect_object(j, "models");
  reject_unknown(j, "models",
                 {"preset", "file", "lr", "dt", "rf", "svm", "xgb", "lgbm",
                  "catboost", "etb"});
  if (const Json* v = find_key(j, "preset")) {
    require_cfg(v->is_string(), "models.preset must be a string");
    require_cfg(v->get<std::string>() == "paper",
                "models.preset: unknown preset '" + v->get<std::string>() +
                    "' (only 'paper' is shipped)");
    m = paper_preset();
  }
  if (const Json* v = find_key(j, "file")) {
    require_cfg(v->is_string(), "models.file must be a string");
    Json file_doc;
    try {
      file_doc = read_json_file(v->get<std::string>());
    } catch (const Error& e) {
      throw ConfigError("config: models.file: " + std::string(e.what()));
    }
    expect_object(file_doc, "models.file document");
    reject_unknown(file_doc, "models.file",
                   {"lr", "dt", "rf", "svm", "xgb", "lgbm", "catboost", "etb"});
    apply_model_overrides(file_doc, "models.file", m);
  }
  apply_model_overrides(j, "models", m);
}

const std::set<std::string>& model_name_set() {
  static const std::set<std::string> names = {"lr",  "dt",   "rf",       "svm",
                                              "xgb", "lgbm", "catboost", "etb"};
  return names;
}

const std::set<std::string>& grid_keys(const std::string& model) {
  static const std::set<std::string> boost_keys = {
      "learning_rate", "n_estimators", "max_depth",        "num_leaves",
      "reg_lambda",    "gamma",        "min_child_weight", "subsample",
      "colsample_bytree", "n_permutations"};
  static const std::set<std::string> etb_keys = {
      "learning_rate", "n_estimators", "max_depth", "num_leaves",
      "reg_lambda",    "subsample",    "colsample_bytree", "n_folds"};
  static const std::set<std::string> lr_keys = {"penalty", "C", "tol",
                                                "max_iter"};
  static const std::set<std::string> svm_keys = {"C", "tol", "max_iter"};
  static const std::set<std::string> dt_keys = {
      "criterion", "splitter", "max_depth", "min_samples_split",
      "min_samples_leaf", "max_features"};
  static const std::set<std::string> rf_keys = {
      "n_estimators", "max_depth", "criterion", "min_samples_split",
      "min_samples_leaf"};
  if (model == "lr") return lr_keys;
  if (model == "svm") return svm_keys;
  if (model == "dt") return dt_keys;
  if (model == "rf") return rf_keys;
  if (model == "etb") return etb_keys;
  return boost_keys;
}

void parse_tune(const Json& j, TuneSection& out) {
  expect_object(j, "tune");
  reject_unknown(j, "tune",
                 {"model", "task", "metric", "n_candidates", "n_folds", "grid"});
  take_string(j, "tune", "model", out.model);
  require_cfg(model_name_set().count(out.model) == 1,
              "tune.model: unknown model '" + out.model + "'");
  take_string(j, "tune", "task", out.task);
  require_cfg(task_names().count(out.task) == 1,
              "tune.task: unknown task '" + out.task + "'");
  take_string(j, "tune", "metric", out.metric);
  require_cfg(metric_names().count(out.metric) == 1,
              "tune.metric: unknown metric '" + out.metric + "'");
  require_cfg(task_is_binary(out.task) || !metric_is_binary_only(out.metric),
              "tune.metric: metric '" + out.metric + "' is binary-only");
  take_int(j, "tune", "n_candidates", out.n_candidates);
  require_cfg(out.n_candidates >= 1, "tune.n_candidates must be positive");
  take_int(j, "tune", "n_folds", out.n_folds);
  require_cfg(out.n_folds >= 2, "tune.n_folds must be >= 2");
  if (const Json* v = find_key(j, "grid")) {
    expect_object(*v, "tune.grid");
    out.grid.clear();
    const std::set<std::string>& keys = grid_keys(out.model);
    for (const auto& item : v->items()) {
      require_cfg(keys.count(item.key()) == 1,
                  "tune.grid: '" + item.key() + "' is not a tunable parameter of "
                      + out.model);
      require_cfg(item.value().is_array() && !item.value().empty(),
                  "tune.grid." + item.key() + " must be a non-empty array");
      out.grid.emplace_back(item.key(),
                            std::vector<Json>(item.value().begin(),
                                              item.value().end()));
    }
  }
}

// --- Cohort + labels -----------------------------------------------------------------

std::string cohort_path(const RunConfig& config) {
  return config.data.cohort_csv.empty() ? config.output.dir + "/cohort.csv"
                                        : config.data.cohort_csv;
}

std::string labels_path(const RunConfig& config) {
  return config.data.labels_csv.empty() ? config.output.dir + "/labels.csv"
                                        : config.data.labels_csv;
}

std::vector<data::ColumnSchema> schema_from_file(const std::string& path) {
  const Json j = read_json_file(path);
  if (!j.is_array()) {
    throw ConfigError("config: data.schema_json: '" + path +
                      "' must hold an array of columns");
  }
  std::vector<data::ColumnSchema> schema;
  for (const Json& c : j) {
    expect_object(c, "schema column");
    reject_unknown(c, "schema column", {"name", "kind", "levels"});
    data::ColumnSchema col;
    take_string(c, "schema column", "name", col.name);
    require_cfg(!col.name.empty(), "schema column names must not be empty");
    std::string kind;
    take_string(c, "schema column", "kind", kind);
    col.kind = data::column_kind_from_name(kind);
    if (const Json* v = find_key(c, "levels")) {
      require_cfg(v->is_array(), "schema column levels must be an array");
      for (const Json& l : *v) {
        require_cfg(l.is_string(), "schema column levels must be strings");
        col.levels.push_back(l.get<std::string>());
      }
    }
    schema.push_back(std::move(col));
  }
  return schema;
}

struct CohortLabels {
  std::vector<int> login;
  std::vector<int> message;
};

CohortLabels read_labels_file(const std::string& path, Index expected_rows) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  auto chomp = [](std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  };
  if (!std::getline(in, line)) {
    throw ParseError("labels file '" + path + "' is empty");
  }
  chomp(line);
  if (line != "row_id,login,message") {
    throw ParseError("labels file '" + path +
                     "': header must be 'row_id,login,message'");
  }
  CohortLabels out;
  Index row = 0;
  while (std::getline(in, line)) {
    chomp(line);
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string a, b, c;
    if (!std::getline(fields, a, ',') || !std::getline(fields, b, ',') ||
        !std::getline(fields, c)) {
      throw ParseError("labels file '" + path + "': malformed row " +
                       std::to_string(row));
    }
    long id = 0, login = 0, message = 0;
    try {
      id = std::stol(a);
      login = std::stol(b);
      message = std::stol(c);
    } catch (const std::exception&) {
      throw ParseError("labels file '" + path + "': non-integer cell in row " +
                       std::to_string(row));
    }
    if (id != row) {
      throw ParseError("labels file '" + path + "': row ids must be 0..n-1 in order");
    }
    if (login != 0 && login != 1) {
      throw ParseError("labels file '" + path + "': login must be 0 or 1");
    }
    if (message < 0 || message > 2) {
      throw ParseError("labels file '" + path + "': message must be 0, 1 or 2");
    }
    out.login.push_back(static_cast<int>(login));
    out.message.push_back(static_cast<int>(message));
    ++row;
  }
  if (row != expected_rows) {
    throw ParseError("labels file '" + path + "' has " + std::to_string(row) +
                     " rows but the cohort has " + std::to_string(expected_rows));
  }
  return out;
}

struct LoadedCohort {
  data::DataTable table;
  CohortLabels labels;
};

LoadedCohort load_cohort(const RunConfig& config) {
  const std::vector<data::ColumnSchema> schema =
      config.data.schema_json.empty() ? synth::cohort_schema(config.cohort)
                                      : schema_from_file(config.data.schema_json);
  LoadedCohort out;
  out.table = data::read_csv(cohort_path(config), schema);
  out.labels = read_labels_file(labels_path(config), out.table.n_rows());
  return out;
}

struct TaskLabels {
  std::string task;
  std::vector<int> y;
  int n_classes = 0;
};

TaskLabels task_labels(const std::string& task, const CohortLabels& labels) {
  if (task == "login") return {task, labels.login, 2};
  if (task == "message") return {task, labels.message, 3};
  if (task == "message_binary") {
    return {task, explain::recode_binary_engagement(labels.message), 2};
  }
  throw ConfigError("config: unknown task '" + task + "'");
}

// --- Matrix helpers -------------------------------------------------------------------

Matrix take_rows(const Matrix& X, const IndexList& rows) {
  Matrix out(static_cast<Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Index>(i)) = X.row(rows[i]);
  }
  return out;
}

Matrix take_cols(const Matrix& X, const std::vector<Index>& cols) {
  Matrix out(X.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.col(static_cast<Index>(j)) = X.col(cols[j]);
  }
  return out;
}

std::vector<int> take_ints(const std::vector<int>& y, const IndexList& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (Index r : rows) out.push_back(y[static_cast<std::size_t>(r)]);
  return out;
}

std::vector<std::int64_t> ids_at(const data::DataTable& table,
                                 const IndexList& rows) {
  std::vector<std::int64_t> out;
  out.reserve(rows.size());
  for (Index r : rows) out.push_back(table.row_ids()[static_cast<std::size_t>(r)]);
  return out;
}

// --- Leakage audit --------------------------------------------------------------------

// Every fitting stage registers the row ids it actually received; anything
// outside the training partition aborts the run. The recorded entries are the
// evidence trail written to audit.json.
class AuditLog {
 public:
  AuditLog(std::string task, std::vector<std::int64_t> train_ids)
      : task_(std::move(task)), train_ids_(std::move(train_ids)) {
    std::sort(train_ids_.begin(), train_ids_.end());
  }

  void record(const std::string& stage, const std::vector<std::int64_t>& ids) {
    bool train_only = true;
    for (std::int64_t id : ids) {
      if (!std::binary_search(train_ids_.begin(), train_ids_.end(), id)) {
        train_only = false;
        break;
      }
    }
    entries_.push_back(Json{{"stage", stage},
                            {"n_rows", ids.size()},
                            {"train_only", train_only}});
    if (!train_only) {
      throw Error("leakage audit (" + task_ + "): stage '" + stage +
                  "' received a row outside the training split");
    }
  }

  Json to_json() const {
    return Json{{"task", task_},
                {"n_train", train_ids_.size()},
                {"entries", entries_}};
  }

 private:
  std::string task_;
  std::vector<std::int64_t> train_ids_;
  Json entries_ = Json::array();
};

// --- Preprocessing plan ----------------------------------------------------------------

// Everything fitted on the training split that evaluation and explanation
// must replay verbatim on unseen rows.
struct PreprocessPlan {
  std::vector<std::string> dropped;  // high-missingness or train-degenerate
  std::vector<std::string> text_columns;
  std::map<std::string, textnorm::TextColumnModel> text_models;
  // Nominal levels retained because the training split actually exhibits
  // them; cells outside the list become missing and are imputed. Keyed by
  // column, values keep the original level order (text columns: first
  // appearance over training rows).
  std::map<std::string, std::vector<std::string>> grounded;
  preprocess::ImputerModel imputer;
  preprocess::EncoderSpec encoder;
  preprocess::ScalerModel scaler;
  std::vector<std::string> feature_names;  // final matrix columns
};

Json plan_to_json(const PreprocessPlan& plan) {
  Json text_models = Json::object();
  for (const auto& [name, model] : plan.text_models) {
    text_models[name] = textnorm::text_column_to_json(model);
  }
  Json grounded = Json::object();
  for (const auto& [name, levels] : plan.grounded) grounded[name] = levels;
  return Json{{"dropped", plan.dropped},
              {"text_columns", plan.text_columns},
              {"text_models", text_models},
              {"grounded", grounded},
              {"imputer", preprocess::imputer_to_json(plan.imputer)},
              {"encoder", preprocess::encoder_to_json(plan.encoder)},
              {"scaler", preprocess::scaler_to_json(plan.scaler)},
              {"feature_names", plan.feature_names}};
}

PreprocessPlan plan_from_json(const Json& j) {
  PreprocessPlan plan;
  plan.dropped =
      require_field(j, "dropped", "preprocess plan").get<std::vector<std::string>>();
  plan.text_columns = require_field(j, "text_columns", "preprocess plan")
                          .get<std::vector<std::string>>();
  for (const auto& item :
       require_field(j, "text_models", "preprocess plan").items()) {
    plan.text_models[item.key()] = textnorm::text_column_from_json(item.value());
  }
  for (const auto& item : require_field(j, "grounded", "preprocess plan").items()) {
    plan.grounded[item.key()] = item.value().get<std::vector<std::string>>();
  }
  plan.imputer =
      preprocess::imputer_from_json(require_field(j, "imputer", "preprocess plan"));
  plan.encoder =
      preprocess::encoder_from_json(require_field(j, "encoder", "preprocess plan"));
  plan.scaler =
      preprocess::scaler_from_json(require_field(j, "scaler", "preprocess plan"));
  plan.feature_names = require_field(j, "feature_names", "preprocess plan")
                           .get<std::vector<std::string>>();
  return plan;
}

data::DataTable drop_by_names(const data::DataTable& table,
                              const std::vector<std::string>& names) {
  if (names.empty()) return table;
  std::vector<Index> idx;
  for (const std::string& name : names) {
    if (!table.has_column(name)) {
      throw ModelIntegrityError("preprocess plan drops column '" + name +
                                "' which the cohort lacks");
    }
    idx.push_back(table.column_index(name));
  }
  return table.drop_columns(idx);
}

// One nominal column built by normalizing a text column and coding against
// `levels` (labels outside the list become missing).
data::DataTable nominal_from_text(const data::DataTable& table, Index col,
                                  const textnorm::TextColumnModel& model,
                                  const std::vector<std::string>& levels) {
  const Index n = table.n_rows();
  std::map<std::string, double> code;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    code[levels[k]] = static_cast<double>(k);
  }
  Matrix values = Matrix::Zero(n, 1);
  MaskArray missing = MaskArray::Constant(n, 1, true);
  for (Index i = 0; i < n; ++i) {
    if (table.is_missing(i, col)) continue;
    const std::string label = textnorm::normalize_response(
        table.text_value(i, col), model.tfidf, model.clusters, model.rules);
    auto it = code.find(label);
    if (it == code.end()) continue;
    values(i, 0) = it->second;
    missing(i, 0) = false;
  }
  data::ColumnSchema schema{table.schema()[static_cast<std::size_t>(col)].name,
                            data::ColumnKind::nominal, levels};
  return data::DataTable({schema}, std::move(values), std::move(missing), {{}},
                         table.row_ids());
}

// The same column re-coded against a retained subset of its levels; cells
// whose level fell out become missing.
data::DataTable reindexed_nominal(const data::DataTable& table, Index col,
                                  const std::vector<std::string>& retained) {
  const data::ColumnSchema& src = table.schema()[static_cast<std::size_t>(col)];
  std::map<std::string, double> code;
  for (std::size_t k = 0; k < retained.size(); ++k) {
    code[retained[k]] = static_cast<double>(k);
  }
  const Index n = table.n_rows();
  Matrix values = Matrix::Zero(n, 1);
  MaskArray missing = MaskArray::Constant(n, 1, true);
  for (Index i = 0; i < n; ++i) {
    if (table.is_missing(i, col)) continue;
    const auto old_code = static_cast<std::size_t>(table.value(i, col));
    auto it = code.find(src.levels[old_code]);
    if (it == code.end()) continue;
    values(i, 0) = it->second;
    missing(i, 0) = false;
  }
  data::ColumnSchema schema{src.name, data::ColumnKind::nominal, retained};
  return data::DataTable({schema}, std::move(values), std::move(missing), {{}},
                         table.row_ids());
}

struct FittedPreprocess {
  PreprocessPlan plan;
  Matrix X;  // every cohort row, final feature columns
};

FittedPreprocess fit_preprocess(const RunConfig& config,
                                const data::DataTable& cohort,
                                const sampling::SplitPlan& split,
                                const TaskLabels& task, AuditLog& audit) {
  data::DataTable table = cohort;
  PreprocessPlan plan;

  textnorm::RuleDictionary rules;
  if (!config.preprocess.rules_csv.empty()) {
    rules = textnorm::load_rules_csv(config.preprocess.rules_csv);
  }

  {
    data::DataTable train_view = table.select_rows(split.train);
    auto [reduced, dropped] = data::drop_high_missingness(
        train_view, config.preprocess.missing_threshold);
    (void)reduced;
    audit.record("missingness_drop", train_view.row_ids());
    plan.dropped = dropped;
    table = drop_by_names(table, dropped);
  }

  // Free text -> nominal codes grounded in training responses.
  std::vector<std::string> degenerate;
  for (Index j = 0; j < table.n_cols(); ++j) {
    if (table.schema()[static_cast<std::size_t>(j)].kind !=
        data::ColumnKind::text) {
      continue;
    }
    const std::string name = table.schema()[static_cast<std::size_t>(j)].name;
    std::vector<std::string> train_texts;
    std::vector<std::int64_t> used_ids;
    for (Index r : split.train) {
      if (table.is_missing(r, j)) continue;
      train_texts.push_back(table.text_value(r, j));
      used_ids.push_back(table.row_ids()[static_cast<std::size_t>(r)]);
    }
    if (train_texts.empty()) {
      degenerate.push_back(name);
      continue;
    }
    textnorm::TextColumnModel model = textnorm::fit_text_column(
        train_texts, config.preprocess.text_clusters,
        derive_seed(config.seed, "text/" + task.task + "/" + name),
        config.preprocess.text_threshold, rules);
    audit.record("text_fit:" + name, used_ids);

    // Level list: normalized labels in first appearance order over training
    // rows, so every retained level is guaranteed to be seen by the encoder.
    std::vector<std::string> retained;
    for (const std::string& text : train_texts) {
      const std::string label = textnorm::normalize_response(
          text, model.tfidf, model.clusters, model.rules);
      if (std::find(retained.begin(), retained.end(), label) == retained.end()) {
        retained.push_back(label);
      }
    }
    plan.text_columns.push_back(name);
    plan.text_models[name] = model;
    plan.grounded[name] = retained;
    table = table.with_columns_replaced(
        nominal_from_text(table, j, model, retained));
  }

  // Categorical levels the training split never exhibits cannot be encoded;
  // such cells become missing and are imputed from training donors instead.
  for (Index j = 0; j < table.n_cols(); ++j) {
    const data::ColumnSchema& col = table.schema()[static_cast<std::size_t>(j)];
    if (col.kind != data::ColumnKind::nominal) continue;
    if (plan.grounded.count(col.name) == 1) continue;  // text-derived, done
    std::vector<bool> seen(col.levels.size(), false);
    for (Index r : split.train) {
      if (table.is_missing(r, j)) continue;
      seen[static_cast<std::size_t>(table.value(r, j))] = true;
    }
    std::vector<std::string> retained;
    for (std::size_t k = 0; k < col.levels.size(); ++k) {
      if (seen[k]) retained.push_back(col.levels[k]);
    }
    if (retained.empty()) {
      degenerate.push_back(col.name);
      continue;
    }
    plan.grounded[col.name] = retained;
    if (retained.size() != col.levels.size()) {
      table = table.with_columns_replaced(reindexed_nominal(table, j, retained));
    }
  }
  if (!degenerate.empty()) {
    table = drop_by_names(table, degenerate);
    plan.dropped.insert(plan.dropped.end(), degenerate.begin(),
                        degenerate.end());
  }
  audit.record("nominal_grounding", ids_at(table, split.train));

  {
    data::DataTable train_view = table.select_rows(split.train);
    plan.imputer =
        preprocess::fit_knn_imputer(train_view, config.preprocess.impute_k);
    audit.record("imputer_fit", train_view.row_ids());
  }
  table = preprocess::impute(plan.imputer, table);

  {
    data::DataTable train_view = table.select_rows(split.train);
    plan.encoder = preprocess::fit_encoder(train_view);
    audit.record("encoder_fit", train_view.row_ids());
  }
  table = preprocess::encode(table, plan.encoder);

  {
    data::DataTable train_view = table.select_rows(split.train);
    plan.scaler = preprocess::fit_scaler(train_view);
    audit.record("scaler_fit", train_view.row_ids());
  }
  table = preprocess::apply_scaler(plan.scaler, table);

  auto [X, names] = preprocess::to_feature_matrix(table);
  if (config.preprocess.top_k > 0 && config.preprocess.top_k < X.cols()) {
    Matrix X_train = take_rows(X, split.train);
    const std::vector<int> y_train = take_ints(task.y, split.train);
    preprocess::SelectionResult sel = preprocess::select_univariate(
        X_train, y_train, task.n_classes, config.preprocess.top_k);
    audit.record("selection_fit", ids_at(table, split.train));
    std::vector<Index> keep = sel.selected;
    std::sort(keep.begin(), keep.end());
    X = take_cols(X, keep);
    std::vector<std::string> kept_names;
    for (Index k : keep) kept_names.push_back(names[static_cast<std::size_t>(k)]);
    names = std::move(kept_names);
  }
  plan.feature_names = names;
  return {std::move(plan), std::move(X)};
}

Matrix apply_preprocess(const PreprocessPlan& plan,
                        const data::DataTable& cohort) {
  data::DataTable table = drop_by_names(cohort, plan.dropped);
  for (const std::string& name : plan.text_columns) {
    const Index col = table.column_index(name);
    table = table.with_columns_replaced(nominal_from_text(
        table, col, plan.text_models.at(name), plan.grounded.at(name)));
  }
  for (const auto& [name, retained] : plan.grounded) {
    if (plan.text_models.count(name) == 1) continue;
    const Index col = table.column_index(name);
    const data::ColumnSchema& src = table.schema()[static_cast<std::size_t>(col)];
    if (src.levels != retained) {
      table = table.with_columns_replaced(reindexed_nominal(table, col, retained));
    }
  }
  table = preprocess::impute(plan.imputer, table);
  table = preprocess::encode(table, plan.encoder);
  table = preprocess::apply_scaler(plan.scaler, table);
  auto [X, names] = preprocess::to_feature_matrix(table);
  if (names == plan.feature_names) return X;
  std::map<std::string, Index> by_name;
  for (std::size_t j = 0; j < names.size(); ++j) {
    by_name[names[j]] = static_cast<Index>(j);
  }
  std::vector<Index> keep;
  for (const std::string& name : plan.feature_names) {
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw ModelIntegrityError("preprocess plan selects column '" + name +
                                "' which the encoded cohort lacks");
    }
    keep.push_back(it->second);
  }
  return take_cols(X, keep);
}

// --- Model fitting and dispatch ---------------------------------------------------------

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"lr",  "dt",   "rf",       "svm",
                                                 "xgb", "lgbm", "catboost", "etb"};
  return names;
}

std::string criterion_name(learners::TreeConfig::Criterion c) {
  return c == learners::TreeConfig::Criterion::gini ? "gini" : "entropy";
}

std::string splitter_name(learners::TreeConfig::Splitter s) {
  return s == learners::TreeConfig::Splitter::best ? "best" : "random";
}

std::string penalty_name(learners::LogisticConfig::Penalty p) {
  return p == learners::LogisticConfig::Penalty::l1 ? "l1" : "l2";
}

Json echo_lr(const learners::LogisticConfig& c) {
  return Json{{"penalty", penalty_name(c.penalty)},
              {"C", c.C},
              {"tol", c.tol},
              {"max_iter", c.max_iter}};
}

Json echo_dt(const learners::TreeConfig& c) {
  return Json{{"criterion", criterion_name(c.criterion)},
              {"splitter", splitter_name(c.splitter)},
              {"max_depth", c.max_depth},
              {"min_samples_split", c.min_samples_split},
              {"min_samples_leaf", c.min_samples_leaf},
              {"max_features", c.max_features}};
}

Json echo_rf(const learners::ForestConfig& c) {
  return Json{{"n_estimators", c.n_estimators},
              {"max_depth", c.max_depth},
              {"criterion", criterion_name(c.criterion)},
              {"min_samples_split", c.min_samples_split},
              {"min_samples_leaf", c.min_samples_leaf}};
}

Json echo_svm(const learners::SvmConfig& c) {
  return Json{{"C", c.C}, {"tol", c.tol}, {"max_iter", c.max_iter}};
}

Json echo_boost(const learners::BoostConfig& c) {
  return Json{{"growth", learners::growth_name(c.growth)},
              {"learning_rate", c.learning_rate},
              {"n_estimators", c.n_estimators},
              {"max_depth", c.max_depth},
              {"num_leaves", c.num_leaves},
              {"reg_lambda", c.reg_lambda},
              {"gamma", c.gamma},
              {"min_child_weight", c.min_child_weight},
              {"subsample", c.subsample},
              {"colsample_bytree", c.colsample_bytree},
              {"n_permutations", c.n_permutations}};
}

stack::StackConfig make_stack_config(const ModelSet& models, std::uint64_t seed) {
  stack::StackConfig sc;
  learners::BoostConfig base = models.etb_base;
  base.growth = learners::Growth::level_wise;
  sc.base.push_back(base);
  base.growth = learners::Growth::leaf_wise;
  sc.base.push_back(base);
  base.growth = learners::Growth::oblivious_ordered;
  sc.base.push_back(base);
  sc.meta = models.etb_meta;
  sc.n_folds = models.etb_folds;
  sc.refit_full = models.etb_refit_full;
  sc.seed = seed;
  return sc;
}

struct TrainedModel {
  std::string kind;
  Json payload;
  Json echo;
};

TrainedModel fit_one(const std::string& name, const RunConfig& config,
                     const std::string& task, const Matrix& X,
                     const std::vector<int>& y, int n_classes) {
  const ModelSet& m = config.models;
  auto seed_for = [&](const std::string& model) {
    return derive_seed(config.seed, task + "/" + model);
  };
  if (name == "lr") {
    return {"logistic",
            learners::logistic_to_json(learners::fit_logistic(X, y, n_classes, m.lr)),
            echo_lr(m.lr)};
  }
  if (name == "dt") {
    learners::TreeConfig cfg = m.dt;
    cfg.seed = seed_for("dt");
    return {"tree",
            learners::tree_model_to_json(learners::fit_tree(X, y, n_classes, cfg)),
            echo_dt(cfg)};
  }
  if (name == "rf") {
    learners::ForestConfig cfg = m.rf;
    cfg.seed = seed_for("rf");
    return {"forest",
            learners::forest_to_json(learners::fit_forest(X, y, n_classes, cfg)),
            echo_rf(cfg)};
  }
  if (name == "svm") {
    return {"svm",
            learners::svm_to_json(learners::fit_linear_svm(X, y, n_classes, m.svm)),
            echo_svm(m.svm)};
  }
  if (name == "xgb" || name == "lgbm" || name == "catboost") {
    learners::BoostConfig cfg = name == "xgb"    ? m.xgb
                                : name == "lgbm" ? m.lgbm
                                                 : m.catboost;
    cfg.seed = seed_for(name);
    return {"boost",
            learners::boost_to_json(learners::fit_boost(X, y, n_classes, cfg)),
            echo_boost(cfg)};
  }
  if (name == "etb") {
    stack::StackConfig sc = make_stack_config(m, seed_for("etb"));
    Json echo{{"n_folds", sc.n_folds},
              {"refit_full", sc.refit_full},
              {"base", echo_boost(m.etb_base)},
              {"meta", echo_lr(sc.meta)}};
    return {"stack", stack::stack_to_json(stack::fit_stack(X, y, n_classes, sc)),
            echo};
  }
  throw ConfigError("config: unknown model '" + name + "'");
}

Matrix predict_with(const std::string& kind, const Json& payload,
                    const Matrix& X) {
  if (kind == "logistic") {
    return learners::logistic_from_json(payload).predict_proba(X);
  }
  if (kind == "tree") {
    return learners::tree_model_from_json(payload).predict_proba(X);
  }
  if (kind == "forest") {
    return learners::forest_from_json(payload).predict_proba(X);
  }
  if (kind == "svm") return learners::svm_from_json(payload).predict_proba(X);
  if (kind == "boost") {
    return learners::boost_from_json(payload).predict_proba(X);
  }
  if (kind == "stack") return stack::stack_from_json(payload).predict_proba(X);
  throw ModelIntegrityError("model file has unknown kind '" + kind + "'");
}

// --- Split + model artifacts -------------------------------------------------------------

std::string split_file(const RunConfig& config, const std::string& task) {
  return config.output.dir + "/splits/" + task + ".json";
}

std::string plan_file(const RunConfig& config, const std::string& task) {
  return config.output.dir + "/preprocess/" + task + ".json";
}

std::string model_file(const RunConfig& config, const std::string& task,
                       const std::string& name) {
  return config.output.dir + "/models/" + task + "/" + name + ".json";
}

sampling::SplitPlan load_split(const RunConfig& config, const std::string& task) {
  const Json doc = read_json_file(split_file(config, task));
  sampling::SplitPlan plan =
      sampling::split_from_json(require_field(doc, "plan", "split file"));
  const std::string recorded =
      require_field(doc, "fingerprint", "split file").get<std::string>();
  if (recorded != split_fingerprint(task, plan)) {
    throw Error("split plan for task '" + task +
                "' fails its fingerprint; the file was altered after training");
  }
  return plan;
}

std::vector<std::string> default_metrics(int n_classes) {
  if (n_classes == 2) return {"accuracy", "precision", "recall", "f1", "auc"};
  return {"accuracy", "macro_precision", "macro_recall", "macro_f1"};
}

std::vector<std::string> metrics_for(const RunConfig& config,
                                     const std::string& task, int n_classes) {
  auto it = config.eval.metrics.find(task);
  if (it != config.eval.metrics.end()) return it->second;
  return default_metrics(n_classes);
}

void write_manifest(const std::string& dir) {
  write_json_file(build_manifest(dir), dir + "/manifest.json");
}

}  // namespace

// --- Public config surface ------------------------------------------------------------

ModelSet paper_preset() {
  ModelSet m;
  m.lr.penalty = learners::LogisticConfig::Penalty::l1;
  m.lr.C = 0.1;

  m.dt.criterion = learners::TreeConfig::Criterion::entropy;
  m.dt.splitter = learners::TreeConfig::Splitter::random;
  m.dt.max_depth = 10;
  m.dt.min_samples_split = 2;
  m.dt.min_samples_leaf = 5;

  m.rf.n_estimators = 100;
  m.rf.max_depth = 20;

  m.svm.C = 10.0;

  m.xgb.growth = learners::Growth::level_wise;
  m.xgb.learning_rate = 0.05;
  m.xgb.n_estimators = 300;
  m.xgb.max_depth = 9;
  m.xgb.gamma = 0.0;
  m.xgb.subsample = 0.8;
  m.xgb.colsample_bytree = 0.8;

  m.lgbm.growth = learners::Growth::leaf_wise;
  m.lgbm.learning_rate = 0.05;
  m.lgbm.n_estimators = 200;
  m.lgbm.max_depth = 6;
  m.lgbm.num_leaves = 50;
  m.lgbm.subsample = 0.8;
  m.lgbm.colsample_bytree = 0.8;

  m.catboost.growth = learners::Growth::oblivious_ordered;
  m.catboost.learning_rate = 0.05;
  m.catboost.n_estimators = 200;
  m.catboost.max_depth = 6;
  m.catboost.reg_lambda = 3.0;

  // The stack's shared base trio: the protocol pins rate/depth/estimators;
  // row/column sampling reuses the level-wise variant's 0.8/0.8.
  m.etb_base.learning_rate = 0.01;
  m.etb_base.n_estimators = 200;
  m.etb_base.max_depth = 9;
  m.etb_base.subsample = 0.8;
  m.etb_base.colsample_bytree = 0.8;
  m.etb_meta.penalty = learners::LogisticConfig::Penalty::l2;
  m.etb_meta.C = 1.0;
  m.etb_folds = 5;
  m.etb_refit_full = true;
  return m;
}

RunConfig default_config() {
  RunConfig c;
  c.models = paper_preset();
  c.cohort.seed = c.seed;
  return c;
}

RunConfig parse_config(const Json& j) {
  expect_object(j, "");
  reject_unknown(j, "",
                 {"seed", "output", "data", "synth", "preprocess", "sampling",
                  "models", "tune", "eval", "explain"});
  RunConfig c = default_config();
  take_u64(j, "", "seed", c.seed);
  if (const Json* v = find_key(j, "output")) parse_output(*v, c.output);
  if (const Json* v = find_key(j, "data")) parse_data(*v, c.data);
  if (const Json* v = find_key(j, "synth")) parse_synth(*v, c.cohort);
  if (const Json* v = find_key(j, "preprocess")) parse_preprocess(*v, c.preprocess);
  if (const Json* v = find_key(j, "sampling")) parse_sampling(*v, c.sampling);
  if (const Json* v = find_key(j, "models")) parse_models(*v, c.models);
  if (const Json* v = find_key(j, "eval")) parse_eval(*v, c.eval);
  if (const Json* v = find_key(j, "explain")) parse_explain(*v, c.explain);
  if (const Json* v = find_key(j, "tune")) parse_tune(*v, c.tune);
  c.cohort.seed = c.seed;
  return c;
}

RunConfig load_config(const std::string& path) {
  Json j;
  try {
    j = read_json_file(path);
  } catch (const Error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  return parse_config(j);
}

void apply_seed_override(RunConfig& config, std::uint64_t seed) {
  config.seed = seed;
  config.cohort.seed = seed;
}

// --- Artifact plumbing ------------------------------------------------------------------

std::uint64_t hash_file(const std::string& path) {
  const std::string content = slurp(path);
  return fnv1a64(content.data(), content.size());
}

Json build_manifest(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw IoError("manifest: '" + dir + "' is not a directory");
  }
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& item : fs::recursive_directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    const std::string rel = fs::relative(item.path(), dir).generic_string();
    if (rel == "run.log" || rel == "manifest.json") continue;
    entries.emplace_back(rel, hex16(hash_file(item.path().string())));
  }
  std::sort(entries.begin(), entries.end());
  Json manifest = Json::object();
  for (const auto& [rel, hash] : entries) manifest[rel] = hash;
  return manifest;
}

std::string split_fingerprint(const std::string& task,
                              const sampling::SplitPlan& plan) {
  std::ostringstream s;
  s << "task=" << task << ";ratio=" << g17(plan.ratio) << ";train=";
  for (Index i : plan.train) s << i << ',';
  s << ";test=";
  for (Index i : plan.test) s << i << ',';
  const std::string canon = s.str();
  return hex16(fnv1a64(canon.data(), canon.size()));
}

// --- Commands -----------------------------------------------------------------------

void cmd_synth(const RunConfig& config) {
  const std::string& dir = config.output.dir;
  ensure_dir(dir);
  log_line(dir, "synth: generating cohort");
  synth::Cohort cohort = synth::generate_cohort(config.cohort);
  data::write_csv(cohort.table, dir + "/cohort.csv");
  synth::write_labels_csv(cohort, dir + "/labels.csv");
  write_json_file(synth::ground_truth_to_json(cohort.truth),
                  dir + "/ground_truth.json");
  log_line(dir, "synth: wrote cohort.csv, labels.csv, ground_truth.json");
  write_manifest(dir);
  std::printf("synth: %lld rows x %lld columns -> %s\n",
              static_cast<long long>(cohort.table.n_rows()),
              static_cast<long long>(cohort.table.n_cols()), dir.c_str());
}

void cmd_train(const RunConfig& config) {
  const std::string& dir = config.output.dir;
  ensure_dir(dir);
  log_line(dir, "train: loading cohort");
  LoadedCohort cohort = load_cohort(config);

  Json audit_doc = Json::array();
  int files = 0;
  for (const std::string& task_name : config.data.tasks) {
    const TaskLabels task = task_labels(task_name, cohort.labels);
    const sampling::SplitPlan split = sampling::stratified_split(
        task.y, config.sampling.train_ratio,
        derive_seed(config.seed, "split/" + task_name));
    AuditLog audit(task_name, ids_at(cohort.table, split.train));

    FittedPreprocess fitted =
        fit_preprocess(config, cohort.table, split, task, audit);
    Matrix X_train = take_rows(fitted.X, split.train);
    std::vector<int> y_train = take_ints(task.y, split.train);

    Matrix X_fit = X_train;
    std::vector<int> y_fit = y_train;
    if (config.sampling.use_smote) {
      sampling::SmoteResult balanced =
          sampling::smote(X_train, y_train, config.sampling.smote_k,
                          derive_seed(config.seed, "smote/" + task_name));
      audit.record("smote", ids_at(cohort.table, split.train));
      X_fit = std::move(balanced.X);
      y_fit = std::move(balanced.y);
    }

    ensure_dir(dir + "/splits");
    write_json_file(Json{{"task", task_name},
                         {"fingerprint", split_fingerprint(task_name, split)},
                         {"plan", sampling::split_to_json(split)}},
                    split_file(config, task_name));
    ensure_dir(dir + "/preprocess");
    write_json_file(plan_to_json(fitted.plan), plan_file(config, task_name));

    ensure_dir(dir + "/models/" + task_name);
    for (const std::string& name : model_names()) {
      TrainedModel trained =
          fit_one(name, config, task_name, X_fit, y_fit, task.n_classes);
      write_json_file(
          Json{{"task", task_name},
               {"model", name},
               {"kind", trained.kind},
               {"n_classes", task.n_classes},
               {"split_fingerprint", split_fingerprint(task_name, split)},
               {"feature_names", fitted.plan.feature_names},
               {"config_echo", trained.echo},
               {"payload", trained.payload}},
          model_file(config, task_name, name));
      ++files;
      log_line(dir, "train: fitted " + task_name + "/" + name);
    }
    audit_doc.push_back(audit.to_json());
    std::printf("train %s: n_train=%zu n_test=%zu features=%zu models=%zu\n",
                task_name.c_str(), split.train.size(), split.test.size(),
                fitted.plan.feature_names.size(), model_names().size());
  }
  write_json_file(Json{{"tasks", audit_doc}}, dir + "/audit.json");
  write_manifest(dir);
  std::printf("train: wrote %d model files under %s/models\n", files,
              dir.c_str());
}

void cmd_evaluate(const RunConfig& config) {
  const std::string& dir = config.output.dir;
  ensure_dir(dir + "/reports");
  log_line(dir, "evaluate: loading cohort and models");
  LoadedCohort cohort = load_cohort(config);

  for (const std::string& task_name : config.data.tasks) {
    const TaskLabels task = task_labels(task_name, cohort.labels);
    const sampling::SplitPlan split = load_split(config, task_name);
    const std::string fingerprint = split_fingerprint(task_name, split);
    const PreprocessPlan plan =
        plan_from_json(read_json_file(plan_file(config, task_name)));
    const Matrix X = apply_preprocess(plan, cohort.table);
    const Matrix X_test = take_rows(X, split.test);
    const std::vector<int> y_test = take_ints(task.y, split.test);
    const std::vector<std::string> metric_list =
        metrics_for(config, task_name, task.n_classes);

    std::ostringstream csv;
    csv << "model,metric,value,lo,hi,n_used,n_skipped\n";
    std::ostringstream txt;
    txt << "task " << task_name << " (test n=" << split.test.size()
        << ", B=" << config.eval.n_resamples << ", alpha=" << config.eval.alpha
        << ")\n";
    txt << std::left << std::setw(10) << "model";
    for (const std::string& metric : metric_list) {
      txt << std::left << std::setw(17) << metric;
    }
    txt << '\n';

    for (const std::string& name : model_names()) {
      const Json doc = read_json_file(model_file(config, task_name, name));
      const std::string recorded =
          require_field(doc, "split_fingerprint", "model file").get<std::string>();
      if (recorded != fingerprint) {
        throw Error("evaluate: split fingerprint mismatch for task '" +
                    task_name + "' model '" + name +
                    "': the model was trained on a different train/test "
                    "partition (possible contamination)");
      }
      const Matrix proba =
          predict_with(require_field(doc, "kind", "model file").get<std::string>(),
                       require_field(doc, "payload", "model file"), X_test);
      const std::vector<int> predicted = learners::predict_classes(proba);
      const Vector scores = proba.col(proba.cols() - 1);

      txt << std::left << std::setw(10) << name;
      for (const std::string& metric : metric_list) {
        eval::CiConfig ci_config;
        ci_config.n_resamples = config.eval.n_resamples;
        ci_config.alpha = config.eval.alpha;
        ci_config.seed = derive_seed(config.seed, "eval/" + task_name + "/" + name);
        const eval::MetricCi ci =
            eval::bootstrap_ci(eval::metric_by_name(metric, task.n_classes),
                               y_test, predicted, scores, ci_config);
        csv << name << ',' << metric << ',' << g17(ci.value) << ',' << g17(ci.lo)
            << ',' << g17(ci.hi) << ',' << ci.n_used << ',' << ci.n_skipped
            << '\n';
        txt << std::left << std::setw(17) << eval::format_metric(ci);
      }
      txt << '\n';
    }
    spit(csv.str(), dir + "/reports/" + task_name + "_metrics.csv");
    spit(txt.str(), dir + "/reports/" + task_name + "_metrics.txt");
    std::fputs(txt.str().c_str(), stdout);
    log_line(dir, "evaluate: wrote reports for task " + task_name);
  }
  write_manifest(dir);
}

void cmd_explain(const RunConfig& config) {
  const std::string& dir = config.output.dir;
  ensure_dir(dir + "/explain");
  log_line(dir, "explain: loading cohort and stack");
  LoadedCohort cohort = load_cohort(config);

  for (const std::string& task_name : config.data.tasks) {
    const TaskLabels task = task_labels(task_name, cohort.labels);
    const sampling::SplitPlan split = load_split(config, task_name);
    const PreprocessPlan plan =
        plan_from_json(read_json_file(plan_file(config, task_name)));
    const Matrix X = apply_preprocess(plan, cohort.table);

    const Json doc = read_json_file(model_file(config, task_name, "etb"));
    if (require_field(doc, "split_fingerprint", "model file").get<std::string>() !=
        split_fingerprint(task_name, split)) {
      throw Error("explain: split fingerprint mismatch for task '" + task_name +
                  "' (possible contamination)");
    }
    const stack::StackModel stack_model =
        stack::stack_from_json(require_field(doc, "payload", "model file"));

    const Index n_exp =
        std::min<Index>(config.explain.max_rows,
                        static_cast<Index>(split.test.size()));
    IndexList exp_rows(split.test.begin(), split.test.begin() + n_exp);
    const Matrix X_exp = take_rows(X, exp_rows);

    const int class_index = config.explain.class_index < 0
                                ? task.n_classes - 1
                                : config.explain.class_index;
    if (class_index >= task.n_classes) {
      throw ConfigError("config: explain.class_index " +
                        std::to_string(class_index) + " is out of range for task '" +
                        task_name + "'");
    }

    // The level-wise base carries the TreeSHAP story; the stack composition
    // is exported alongside it.
    const learners::BoostModel* base = nullptr;
    for (const auto& models : stack_model.base_models) {
      if (!models.empty() &&
          models.front().config.growth == learners::Growth::level_wise) {
        base = &models.front();
        break;
      }
    }
    if (base == nullptr) {
      throw ModelIntegrityError("explain: the stack has no level-wise base");
    }

    const explain::ShapValues shap =
        explain::tree_shap(*base, X_exp, class_index);

    // Local-accuracy gate before anything is rendered.
    const Matrix raw = base->raw_scores(X_exp);
    const int n_paths =
        static_cast<int>(std::min<Index>(config.explain.decision_rows, n_exp));
    std::vector<int> path_rows(static_cast<std::size_t>(n_paths));
    for (int i = 0; i < n_paths; ++i) path_rows[static_cast<std::size_t>(i)] = i;
    const explain::DecisionPathData decision =
        explain::decision_paths(shap, path_rows, plan.feature_names);
    for (const explain::DecisionPath& path : decision.paths) {
      double target = 0.0;
      if (base->n_score_cols == 1) {
        target = raw(path.row, 0) * (class_index == 1 ? 1.0 : -1.0);
      } else {
        target = raw(path.row, class_index);
      }
      const double final_value = path.cumulative(path.cumulative.size() - 1);
      if (std::abs(final_value - target) > 1e-6) {
        throw NumericError(
            "explain: decision path for row " + std::to_string(path.row) +
            " missed the model raw output by " +
            g17(std::abs(final_value - target)) + "; refusing to render");
      }
    }

    const explain::SummaryData summary = explain::summarize(
        shap, X_exp, config.explain.top_n, plan.feature_names);
    explain::render_svg(summary, dir + "/explain/" + task_name + "_summary.svg");
    explain::render_svg(decision, dir + "/explain/" + task_name + "_decision.svg");
    explain::write_shap_csv(shap, X_exp, plan.feature_names,
                            dir + "/explain/" + task_name + "_shap.csv");

    // cov(x_j, phi_j) carries the direction a beeswarm shows visually (high
    // values on the positive side); the signed mean is biased whenever the
    // explained sample's mean sits away from the tree-cover baseline, which
    // SMOTE guarantees for minority-heavy features.
    std::ostringstream ranking;
    ranking << "rank,feature,mean_abs_phi,mean_phi,cov_x_phi\n";
    for (std::size_t r = 0; r < summary.ranking.size(); ++r) {
      const explain::SummaryEntry& entry = summary.ranking[r];
      const Index j = entry.feature;
      const double cov =
          ((X_exp.col(j).array() - X_exp.col(j).mean()) *
           (shap.phi.col(j).array() - shap.phi.col(j).mean()))
              .mean();
      ranking << (r + 1) << ','
              << plan.feature_names[static_cast<std::size_t>(entry.feature)]
              << ',' << g17(entry.mean_abs_phi) << ',' << g17(entry.mean_phi)
              << ',' << g17(cov) << '\n';
    }
    spit(ranking.str(), dir + "/explain/" + task_name + "_ranking.csv");

    const explain::ShapValues stack_shap_values =
        explain::stack_shap(stack_model, X_exp, class_index);
    explain::write_shap_csv(stack_shap_values, X_exp, plan.feature_names,
                            dir + "/explain/" + task_name + "_stack_shap.csv");
    const explain::SummaryData stack_summary = explain::summarize(
        stack_shap_values, X_exp, config.explain.top_n, plan.feature_names);
    explain::render_svg(stack_summary,
                        dir + "/explain/" + task_name + "_stack_summary.svg");

    std::ostringstream head;
    for (std::size_t r = 0; r < summary.ranking.size() && r < 5; ++r) {
      if (r > 0) head << ", ";
      head << plan.feature_names[static_cast<std::size_t>(
          summary.ranking[r].feature)];
    }
    std::printf("explain %s (class %d, n=%lld): top %s\n", task_name.c_str(),
                class_index, static_cast<long long>(n_exp), head.str().c_str());
    log_line(dir, "explain: wrote artifacts for task " + task_name);
  }
  write_manifest(dir);
}

void cmd_tune(const RunConfig& config) {
  const std::string& dir = config.output.dir;
  ensure_dir(dir + "/tune");
  log_line(dir, "tune: " + config.tune.model + " on " + config.tune.task);
  LoadedCohort cohort = load_cohort(config);
  const TaskLabels task = task_labels(config.tune.task, cohort.labels);
  const sampling::SplitPlan split = sampling::stratified_split(
      task.y, config.sampling.train_ratio,
      derive_seed(config.seed, "split/" + config.tune.task));
  AuditLog audit(config.tune.task, ids_at(cohort.table, split.train));
  FittedPreprocess fitted =
      fit_preprocess(config, cohort.table, split, task, audit);
  const Matrix X_train = take_rows(fitted.X, split.train);
  const std::vector<int> y_train = take_ints(task.y, split.train);

  tune::ParamGrid grid;
  if (!config.tune.grid.empty()) {
    grid.axes = config.tune.grid;
  } else if (config.tune.model == "lr") {
    grid.axes = {{"C", {Json(0.01), Json(0.1), Json(1.0), Json(10.0)}},
                 {"penalty", {Json("l1"), Json("l2")}}};
  } else if (config.tune.model == "svm") {
    grid.axes = {{"C", {Json(0.1), Json(1.0), Json(10.0)}}};
  } else if (config.tune.model == "dt") {
    grid.axes = {{"max_depth", {Json(5), Json(10), Json(20)}},
                 {"min_samples_leaf", {Json(1), Json(5), Json(10)}}};
  } else if (config.tune.model == "rf") {
    grid.axes = {{"n_estimators", {Json(50), Json(100)}},
                 {"max_depth", {Json(10), Json(20)}}};
  } else {
    grid.axes = {{"learning_rate", {Json(0.01), Json(0.05), Json(0.1)}},
                 {"max_depth", {Json(3), Json(6), Json(9)}},
                 {"n_estimators", {Json(50), Json(100), Json(200)}}};
  }

  const std::string model_name = config.tune.model;
  const ModelSet base_models = config.models;
  const int n_classes = task.n_classes;
  const std::uint64_t fit_seed = derive_seed(config.seed, "tune/fit");
  tune::FitPredictFn fit_predict =
      [model_name, base_models, n_classes, fit_seed](
          const Json& params, const Matrix& Xtr, const std::vector<int>& ytr,
          const Matrix& Xva) -> Matrix {
    ModelSet m = base_models;
    if (model_name == "lr") {
      parse_lr_over(params, "tune.grid", m.lr);
      return learners::fit_logistic(Xtr, ytr, n_classes, m.lr).predict_proba(Xva);
    }
    if (model_name == "svm") {
      parse_svm_over(params, "tune.grid", m.svm);
      return learners::fit_linear_svm(Xtr, ytr, n_classes, m.svm)
          .predict_proba(Xva);
    }
    if (model_name == "dt") {
      parse_dt_over(params, "tune.grid", m.dt);
      m.dt.seed = fit_seed;
      return learners::fit_tree(Xtr, ytr, n_classes, m.dt).predict_proba(Xva);
    }
    if (model_name == "rf") {
      parse_rf_over(params, "tune.grid", m.rf);
      m.rf.seed = fit_seed;
      return learners::fit_forest(Xtr, ytr, n_classes, m.rf).predict_proba(Xva);
    }
    if (model_name == "etb") {
      parse_etb_over(params, "tune.grid", m);
      stack::StackConfig sc = make_stack_config(m, fit_seed);
      return stack::fit_stack(Xtr, ytr, n_classes, sc).predict_proba(Xva);
    }
    learners::BoostConfig& cfg = model_name == "xgb"    ? m.xgb
                                 : model_name == "lgbm" ? m.lgbm
                                                        : m.catboost;
    parse_boost_over(params, "tune.grid", cfg);
    cfg.seed = fit_seed;
    return learners::fit_boost(Xtr, ytr, n_classes, cfg).predict_proba(Xva);
  };

  tune::TuneConfig tc;
  tc.n_candidates = config.tune.n_candidates;
  tc.n_folds = config.tune.n_folds;
  tc.metric = config.tune.metric;
  tc.seed = derive_seed(config.seed,
                        "tune/" + config.tune.model + "/" + config.tune.task);
  const tune::TuneResult result =
      tune::randomized_search(grid, fit_predict, X_train, y_train, n_classes, tc);

  const tune::CandidateResult& best = result.candidates[result.best_index];
  write_json_file(Json{{"model", config.tune.model},
                       {"task", config.tune.task},
                       {"metric", config.tune.metric},
                       {"n_folds", config.tune.n_folds},
                       {"best_params", best.params},
                       {"best_score", best.mean_score},
                       {"result", tune::tune_result_to_json(result)}},
                  dir + "/tune/" + config.tune.model + "_" + config.tune.task +
                      ".json");

  std::printf("tune %s on %s (%s, %d folds): %zu candidates\n",
              config.tune.model.c_str(), config.tune.task.c_str(),
              config.tune.metric.c_str(), config.tune.n_folds,
              result.candidates.size());
  for (std::size_t i = 0; i < result.candidates.size(); ++i) {
    const tune::CandidateResult& cand = result.candidates[i];
    if (cand.failed) {
      std::printf("  #%zu failed: %s  %s\n", i, cand.error.c_str(),
                  cand.params.dump().c_str());
    } else {
      std::printf("  #%zu %s=%.4f  %s\n", i, config.tune.metric.c_str(),
                  cand.mean_score, cand.params.dump().c_str());
    }
  }
  std::printf("best: #%zu %s=%.4f  %s\n", result.best_index,
              config.tune.metric.c_str(), best.mean_score,
              best.params.dump().c_str());
  log_line(dir, "tune: wrote " + config.tune.model + "_" + config.tune.task +
                    ".json");
  write_manifest(dir);
}

void cmd_report(const RunConfig& config) {
  const std::string& dir = config.output.dir;
  ensure_dir(dir);
  if (!fs::exists(cohort_path(config))) {
    cmd_synth(config);
    if (!fs::exists(cohort_path(config))) {
      throw Error("report: cohort file '" + cohort_path(config) +
                  "' is still missing after synth; check data.cohort_csv");
    }
  }
  cmd_train(config);
  cmd_evaluate(config);
  cmd_explain(config);

  std::ostringstream md;
  md << "# Engagement modeling report\n\n";
  md << "- run seed: " << config.seed << "\n";
  md << "- cohort: `" << cohort_path(config) << "`\n";
  md << "- tasks:";
  for (const std::string& task : config.data.tasks) md << ' ' << task;
  md << "\n\n";
  for (const std::string& task : config.data.tasks) {
    md << "## Task " << task << "\n\n";
    md << "### Held-out metrics\n\n```\n"
       << slurp(dir + "/reports/" + task + "_metrics.txt") << "```\n\n";
    md << "### Top features by mean |SHAP|\n\n";
    std::istringstream ranking(slurp(dir + "/explain/" + task + "_ranking.csv"));
    std::string line;
    std::getline(ranking, line);  // header
    while (std::getline(ranking, line)) {
      if (line.empty()) continue;
      std::istringstream fields(line);
      std::string rank, feature, mean_abs, mean_signed, cov;
      std::getline(fields, rank, ',');
      std::getline(fields, feature, ',');
      std::getline(fields, mean_abs, ',');
      std::getline(fields, mean_signed, ',');
      std::getline(fields, cov);
      md << rank << ". `" << feature << "` (mean |phi| " << mean_abs
         << ", direction " << (cov.empty() || cov[0] == '-' ? "-" : "+")
         << ")\n";
    }
    md << "\n";
  }
  ensure_dir(dir + "/reports");
  spit(md.str(), dir + "/reports/report.md");
  log_line(dir, "report: wrote reports/report.md");
  write_manifest(dir);
  std::printf("report: %s/reports/report.md\n", dir.c_str());
}

void run_command(const std::string& name, const RunConfig& config) {
  if (name == "synth") return cmd_synth(config);
  if (name == "train") return cmd_train(config);
  if (name == "tune") return cmd_tune(config);
  if (name == "evaluate") return cmd_evaluate(config);
  if (name == "explain") return cmd_explain(config);
  if (name == "report") return cmd_report(config);
  throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace triboost::pipeline
