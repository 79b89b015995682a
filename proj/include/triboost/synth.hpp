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

#ifndef TRIBOOST_SYNTH_HPP_
#define TRIBOOST_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "triboost/dataset.hpp"
#include "triboost/json_io.hpp"
#include "triboost/types.hpp"

namespace triboost::synth {

// One injected feature -> outcome effect. `magnitude` is the signed logit
// coefficient applied to the feature after standardizing it by its realized
// cohort mean and standard deviation. Magnitudes are synthetic inventions for
// testing signal recovery; they are not estimates of any real effect.
struct PlantedEffect {
  std::string feature;
  std::string outcome;  // "login" or "message"
  double magnitude = 0.0;
};

// Directions of the default effects: chronic pain raises login, stigma and
// alcohol blackouts lower it, female and persistent sadness raise message
// posting.
std::vector<PlantedEffect> default_planted_effects();

struct CohortSpec {
  Index n = 1673;
  // Columns kept from the built-in 108-column survey schema (truncated from
  // the front when smaller, padded with extra ordinal items when larger).
  int n_features = 108;

  // Target outcome prevalences, cohort-wide. Message posting is three-level:
  // msg1 = exactly one message, msg2plus = two or more.
  double login_rate = 0.375;
  double msg1_rate = 0.212;
  double msg2plus_rate = 0.100;

  // Demographic indicator proportions. Race indicators are independent
  // multi-select columns, so they may sum past 1.
  double female_rate = 0.616;
  double white_rate = 0.720;
  double asian_rate = 0.210;
  double black_rate = 0.074;

  std::vector<PlantedEffect> planted = default_planted_effects();

  // MCAR missingness: each column draws a rate uniformly from
  // [missing_rate_low, missing_rate_high]; n_high_missing_columns non-planted
  // ordinal columns are forced to high_missing_rate instead (to exercise the
  // high-missingness column drop).
  double missing_rate_low = 0.0;
  double missing_rate_high = 0.3;
  int n_high_missing_columns = 2;
  double high_missing_rate = 0.9;

  std::uint64_t seed = 42;
};

// The planted generating model, for scoring how well explanations recover it.
// Coefficient vectors follow the cohort schema order and are nonzero exactly
// on the planted features of their outcome.
struct GroundTruth {
  std::vector<std::string> feature_names;
  Vector login_coefficients;
  Vector message_coefficients;
  double login_intercept = 0.0;
  // Proportional-odds offsets: P(message >= 1 | x) = sigmoid(score + ge1),
  // P(message >= 2 | x) = sigmoid(score + ge2), ge2 < ge1.
  double message_intercept_ge1 = 0.0;
  double message_intercept_ge2 = 0.0;
};

struct Cohort {
  data::DataTable table;
  data::LabelVector login;    // binary
  data::LabelVector message;  // 0 / 1 / 2+
  GroundTruth truth;
};

// Solves mean_i sigmoid(a + scores_i) == target for the intercept a by
// bisection (monotone in a). target must lie strictly inside (0, 1);
// anything else cannot be bracketed and raises GeneratorError.
double solve_intercept(const Vector& scores, double target);

// Draws the cohort: survey features (binary / numeric / Likert ordinal /
// nominal / free-text with misspelled variants), outcome labels from the
// planted logit model plus weak planted-pair interaction terms, then MCAR
// missingness. Demographic indicator columns are filled by exact quota and
// shuffled, so their realized proportions match the spec up to rounding.
// Same spec (including seed) => identical cohort, byte for byte.
// Infeasible targets (outcome rates at 0 or 1, msg1_rate <= 0, proportions
// outside [0, 1]) and planted features that are absent, constant, or of an
// unplantable kind (nominal/text) raise GeneratorError.
Cohort generate_cohort(const CohortSpec& spec);

// The column schema a spec resolves to (the built-in survey truncated or
// padded to n_features). Lets callers re-read a written cohort CSV without
// a separate schema file; n_features < 1 raises GeneratorError.
std::vector<data::ColumnSchema> cohort_schema(const CohortSpec& spec);

// "row_id,login,message" CSV next to the cohort table.
void write_labels_csv(const Cohort& cohort, const std::string& path);

Json ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const Json& j);

}  // namespace triboost::synth

#endif  // TRIBOOST_SYNTH_HPP_
