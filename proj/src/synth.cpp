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

#include "triboost/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "triboost/error.hpp"
#include "triboost/rng.hpp"

namespace triboost::synth {

namespace {

using data::ColumnKind;
using data::ColumnSchema;

enum class Scale { none, freq, agree };

struct ColumnPlan {
  const char* name;
  ColumnKind kind;
  Scale scale;  // ordinal columns only
};

constexpr ColumnKind kBin = ColumnKind::binary;
constexpr ColumnKind kNum = ColumnKind::numeric;
constexpr ColumnKind kOrd = ColumnKind::ordinal;
constexpr ColumnKind kNom = ColumnKind::nominal;
constexpr ColumnKind kTxt = ColumnKind::text;

// The built-in survey: demographics and habits up front, Likert instrument
// blocks in the middle, free-text items last (so truncated specs shed text
// first). 108 columns total.
const std::vector<ColumnPlan>& survey_plan() {
  static const std::vector<ColumnPlan> plan = {
      {"female", kBin, Scale::none},
      {"race_white", kBin, Scale::none},
      {"race_asian", kBin, Scale::none},
      {"race_black", kBin, Scale::none},
      {"age", kNum, Scale::none},
      {"year_in_school", kNom, Scale::none},
      {"living_situation", kNom, Scale::none},
      {"employment", kNom, Scale::none},
      {"relationship_status", kNom, Scale::none},
      {"insurance_status", kNom, Scale::none},
      {"intl_student", kBin, Scale::none},
      {"first_gen", kBin, Scale::none},
      {"credit_hours", kNum, Scale::none},
      {"sleep_hours", kNum, Scale::none},
      {"exercise_days", kNum, Scale::none},
      {"drinking_days_month", kNum, Scale::none},
      {"caffeine_drinks_day", kNum, Scale::none},
      // Mood screeners.
      {"persistent_sadness", kOrd, Scale::freq},
      {"phq_interest", kOrd, Scale::freq},
      {"phq_sleep", kOrd, Scale::freq},
      {"phq_energy", kOrd, Scale::freq},
      {"phq_appetite", kOrd, Scale::freq},
      {"phq_selfworth", kOrd, Scale::freq},
      {"phq_concentration", kOrd, Scale::freq},
      {"phq_psychomotor", kOrd, Scale::freq},
      {"phq_suicidal", kOrd, Scale::freq},
      {"gad_nervous", kOrd, Scale::freq},
      {"gad_uncontrollable_worry", kOrd, Scale::freq},
      {"gad_excessive_worry", kOrd, Scale::freq},
      {"gad_trouble_relaxing", kOrd, Scale::freq},
      {"gad_restless", kOrd, Scale::freq},
      {"gad_irritable", kOrd, Scale::freq},
      {"gad_afraid", kOrd, Scale::freq},
      // Drinking behaviour.
      {"audit_freq", kOrd, Scale::freq},
      {"audit_quantity", kOrd, Scale::freq},
      {"audit_binge_freq", kOrd, Scale::freq},
      {"alcohol_blackouts", kOrd, Scale::freq},
      {"audit_cant_stop", kOrd, Scale::freq},
      {"audit_failed_expect", kOrd, Scale::freq},
      {"audit_morning_drink", kOrd, Scale::freq},
      {"audit_guilt", kOrd, Scale::freq},
      {"audit_injury", kOrd, Scale::freq},
      {"audit_concern_others", kOrd, Scale::freq},
      {"alcohol_peer_pressure", kOrd, Scale::freq},
      {"alcohol_regret", kOrd, Scale::freq},
      {"alcohol_drink_alone", kOrd, Scale::freq},
      {"alcohol_game_days", kOrd, Scale::freq},
      // Stress and sleep.
      {"stress_overwhelmed", kOrd, Scale::freq},
      {"stress_academic", kOrd, Scale::freq},
      {"stress_financial", kOrd, Scale::freq},
      {"stress_family", kOrd, Scale::freq},
      {"stress_social", kOrd, Scale::freq},
      {"stress_future", kOrd, Scale::freq},
      {"sleep_trouble_falling", kOrd, Scale::freq},
      {"sleep_early_waking", kOrd, Scale::freq},
      {"sleep_restless", kOrd, Scale::freq},
      {"sleep_daytime_tired", kOrd, Scale::freq},
      // Somatic complaints.
      {"pain_headaches", kOrd, Scale::freq},
      {"pain_back", kOrd, Scale::freq},
      {"pain_stomach", kOrd, Scale::freq},
      {"chronic_pain", kOrd, Scale::freq},
      // Social support.
      {"support_talk_family", kOrd, Scale::freq},
      {"support_talk_friends", kOrd, Scale::freq},
      {"support_belonging", kOrd, Scale::freq},
      {"support_lonely", kOrd, Scale::freq},
      {"support_isolated", kOrd, Scale::freq},
      // Attitudes toward help seeking.
      {"stigma_concern", kOrd, Scale::agree},
      {"stigma_embarrassed", kOrd, Scale::agree},
      {"stigma_weak", kOrd, Scale::agree},
      {"stigma_career_worry", kOrd, Scale::agree},
      {"stigma_peers_judge", kOrd, Scale::agree},
      {"help_open_counseling", kOrd, Scale::agree},
      {"help_past_therapy", kOrd, Scale::agree},
      {"help_meds_attitude", kOrd, Scale::agree},
      {"help_online_tools", kOrd, Scale::agree},
      // Mood and energy odds and ends.
      {"mood_hopeful", kOrd, Scale::freq},
      {"mood_irritable", kOrd, Scale::freq},
      {"mood_swings", kOrd, Scale::freq},
      {"mood_numb", kOrd, Scale::freq},
      {"energy_fatigue", kOrd, Scale::freq},
      {"energy_motivation", kOrd, Scale::freq},
      {"social_events_attend", kOrd, Scale::freq},
      {"social_clubs", kOrd, Scale::freq},
      {"social_roommate_conflict", kOrd, Scale::freq},
      {"academic_missed_classes", kOrd, Scale::freq},
      {"academic_grades_worry", kOrd, Scale::freq},
      {"academic_assignments_late", kOrd, Scale::freq},
      {"tech_screen_time", kOrd, Scale::freq},
      {"tech_social_media_checks", kOrd, Scale::freq},
      {"wellness_meditation", kOrd, Scale::freq},
      {"wellness_journaling", kOrd, Scale::freq},
      {"eat_skipped_meals", kOrd, Scale::freq},
      {"eat_overeating", kOrd, Scale::freq},
      {"body_image_worry", kOrd, Scale::agree},
      {"perfectionism", kOrd, Scale::agree},
      {"procrastination", kOrd, Scale::freq},
      {"homesick", kOrd, Scale::freq},
      {"finances_worry_daily", kOrd, Scale::freq},
      {"language_barrier", kOrd, Scale::freq},
      {"discrimination_experienced", kOrd, Scale::freq},
      {"safety_campus_concern", kOrd, Scale::freq},
      {"relationship_conflict", kOrd, Scale::freq},
      {"family_pressure", kOrd, Scale::freq},
      {"future_career_anxiety", kOrd, Scale::agree},
      {"activity_barriers", kOrd, Scale::agree},
      {"main_concern", kTxt, Scale::none},
      {"coping_free_text", kTxt, Scale::none},
      {"referral_source_text", kTxt, Scale::none},
  };
  return plan;
}

std::vector<std::string> ordinal_levels(Scale scale) {
  if (scale == Scale::agree) {
    return {"strongly_disagree", "disagree", "agree", "strongly_agree"};
  }
  return {"never", "rarely", "sometimes", "often"};
}

std::vector<std::string> nominal_levels(const std::string& name) {
  if (name == "year_in_school") {
    return {"first_year", "second_year", "third_year", "fourth_year",
            "graduate"};
  }
  if (name == "living_situation") {
    return {"dorm", "apartment", "with_family", "greek_housing", "other"};
  }
  if (name == "employment") return {"none", "part_time", "full_time",
                                    "work_study"};
  if (name == "relationship_status") return {"single", "in_relationship",
                                             "married", "other"};
  if (name == "insurance_status") return {"parents_plan", "school_plan",
                                          "none"};
  throw GeneratorError("no level list for nominal column '" + name + "'");
}

// Raw free-text pools, misspellings included on purpose so the text
// normalizer has something to clean up.
const std::vector<std::string>& text_pool(const std::string& name) {
  static const std::vector<std::string> concern = {
      "anxiety",        "stress",         "feeling anxious", "anxeity",
      "depression",     "feeling down",   "depresion",       "stressed out",
      "sleep problems", "cant sleep",     "drinking too much",
      "loneliness",     "none",           "alcohol"};
  static const std::vector<std::string> coping = {
      "exercise",  "talk to friends", "music",
      "gym",       "working out",     "talking with friends",
      "gaming",    "listening to music",
      "journaling", "video games",    "jurnaling",
      "sleep",     "netflix",         "nothing really"};
  static const std::vector<std::string> referral = {
      "email",   "friend",            "campus email", "flyer",
      "e-mail",  "a friend told me",  "flier",        "counseling center",
      "professor", "counselling center", "social media", "instructor",
      "instagram", "dont remember"};
  if (name == "main_concern") return concern;
  if (name == "coping_free_text") return coping;
  if (name == "referral_source_text") return referral;
  throw GeneratorError("no template pool for text column '" + name + "'");
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Exact-count fill: round(rate * n) ones, then a seeded shuffle.
void fill_quota(Matrix& values, Index col, double rate, Rng& rng) {
  const Index n = values.rows();
  Index ones = static_cast<Index>(std::lround(rate * static_cast<double>(n)));
  ones = std::clamp<Index>(ones, 0, n);
  std::vector<double> column(static_cast<std::size_t>(n), 0.0);
  std::fill(column.begin(), column.begin() + ones, 1.0);
  rng.shuffle(column);
  for (Index i = 0; i < n; ++i) values(i, col) = column[static_cast<std::size_t>(i)];
}

void fill_bernoulli(Matrix& values, Index col, double rate, Rng& rng) {
  for (Index i = 0; i < values.rows(); ++i) {
    values(i, col) = rng.uniform() < rate ? 1.0 : 0.0;
  }
}

// Dirichlet(1,...,1) category weights from the column stream, then the
// cumulative-draw trick per row.
void fill_categorical(Matrix& values, Index col, int n_levels, Rng& rng) {
  std::vector<double> cumulative(static_cast<std::size_t>(n_levels));
  double total = 0.0;
  for (double& c : cumulative) {
    c = -std::log(std::max(rng.uniform(), 1e-300));
    total += c;
  }
  double run = 0.0;
  for (double& c : cumulative) {
    run += c / total;
    c = run;
  }
  cumulative.back() = 1.0;  // guard against rounding at the top end
  for (Index i = 0; i < values.rows(); ++i) {
    const double u = rng.uniform();
    int level = 0;
    while (u >= cumulative[static_cast<std::size_t>(level)]) ++level;
    values(i, col) = static_cast<double>(level);
  }
}

void fill_numeric(Matrix& values, Index col, const std::string& name,
                  Rng& rng) {
  for (Index i = 0; i < values.rows(); ++i) {
    double v = 0.0;
    if (name == "age") {
      v = std::round(std::clamp(rng.normal(20.5, 1.8), 17.0, 30.0));
    } else if (name == "credit_hours") {
      v = std::round(std::clamp(rng.normal(14.0, 2.5), 6.0, 21.0));
    } else if (name == "sleep_hours") {
      v = std::round(std::clamp(rng.normal(6.8, 1.1), 3.0, 11.0) * 2.0) / 2.0;
    } else if (name == "exercise_days") {
      v = static_cast<double>(rng.uniform_below(8));
    } else if (name == "drinking_days_month") {
      v = std::clamp(std::round(rng.normal(4.0, 4.0)), 0.0, 30.0);
    } else if (name == "caffeine_drinks_day") {
      v = static_cast<double>(rng.uniform_below(6));
    } else {
      // Padded extra numerics would land here; none exist today.
      v = rng.normal();
    }
    values(i, col) = v;
  }
}

void fill_text(Matrix& values, std::vector<std::string>& column_text,
               Index col, const std::string& name, Rng& rng) {
  const std::vector<std::string>& pool = text_pool(name);
  // Zipf-ish weights: earlier pool entries (the common phrasings) dominate.
  std::vector<double> cumulative(pool.size());
  double total = 0.0;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    cumulative[k] = 1.0 / static_cast<double>(k + 1);
    total += cumulative[k];
  }
  double run = 0.0;
  for (double& c : cumulative) {
    run += c / total;
    c = run;
  }
  cumulative.back() = 1.0;
  column_text.resize(static_cast<std::size_t>(values.rows()));
  for (Index i = 0; i < values.rows(); ++i) {
    const double u = rng.uniform();
    std::size_t pick = 0;
    while (u >= cumulative[pick]) ++pick;
    column_text[static_cast<std::size_t>(i)] = pool[pick];
    values(i, col) = static_cast<double>(i);
  }
}

std::string seed_tag(const std::string& stage, const std::string& name) {
  return "synth/" + stage + "/" + name;
}

void validate_spec(const CohortSpec& spec) {
  if (spec.n < 1) throw GeneratorError("cohort size must be at least 1");
  if (spec.n_features < 1) {
    throw GeneratorError("cohort needs at least one feature column");
  }
  const double ge1 = spec.msg1_rate + spec.msg2plus_rate;
  const struct {
    const char* what;
    double rate;
  } outcome_rates[] = {{"login rate", spec.login_rate},
                       {"message >=1 rate", ge1},
                       {"message >=2 rate", spec.msg2plus_rate}};
  for (const auto& r : outcome_rates) {
    if (!(r.rate > 0.0 && r.rate < 1.0)) {
      throw GeneratorError(std::string(r.what) +
                           " must be strictly inside (0, 1)");
    }
  }
  if (!(spec.msg1_rate > 0.0)) {
    throw GeneratorError(
        "msg1 rate must be positive, otherwise the ordered thresholds "
        "collapse");
  }
  const struct {
    const char* what;
    double rate;
  } proportions[] = {{"female", spec.female_rate},
                     {"white", spec.white_rate},
                     {"asian", spec.asian_rate},
                     {"black", spec.black_rate}};
  for (const auto& p : proportions) {
    if (!(p.rate >= 0.0 && p.rate <= 1.0)) {
      throw GeneratorError(std::string("demographic proportion '") + p.what +
                           "' must lie in [0, 1]");
    }
  }
  if (!(spec.missing_rate_low >= 0.0 &&
        spec.missing_rate_low <= spec.missing_rate_high &&
        spec.missing_rate_high <= 1.0)) {
    throw GeneratorError("missingness range must satisfy 0 <= low <= high <= 1");
  }
  if (spec.n_high_missing_columns < 0 || spec.high_missing_rate < 0.0 ||
      spec.high_missing_rate > 1.0) {
    throw GeneratorError("invalid high-missingness configuration");
  }
  for (const PlantedEffect& effect : spec.planted) {
    if (effect.outcome != "login" && effect.outcome != "message") {
      throw GeneratorError("planted outcome '" + effect.outcome +
                           "' is neither 'login' nor 'message'");
    }
    if (!std::isfinite(effect.magnitude)) {
      throw GeneratorError("planted magnitude for '" + effect.feature +
                           "' is not finite");
    }
  }
}

}  // namespace

std::vector<PlantedEffect> default_planted_effects() {
  return {
      {"chronic_pain", "login", 1.1},
      {"stigma_concern", "login", -0.9},
      {"alcohol_blackouts", "login", -0.8},
      {"female", "message", 0.9},
      {"persistent_sadness", "message", 1.2},
  };
}

double solve_intercept(const Vector& scores, double target) {
  if (scores.size() == 0) {
    throw GeneratorError("intercept bisection needs a nonempty score vector");
  }
  if (!(target > 0.0 && target < 1.0)) {
    throw GeneratorError("intercept target rate must be strictly inside "
                         "(0, 1); the logit is unbounded at the edges");
  }
  const auto mean_rate = [&scores](double a) {
    double total = 0.0;
    for (Index i = 0; i < scores.size(); ++i) total += logistic(a + scores(i));
    return total / static_cast<double>(scores.size());
  };
  // sigmoid(+-36) is within 2e-16 of the edge, so this always brackets.
  const double bound = 36.0 + scores.cwiseAbs().maxCoeff();
  double lo = -bound;
  double hi = bound;
  for (int it = 0; it < 90; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mean_rate(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<ColumnSchema> cohort_schema(const CohortSpec& spec) {
  if (spec.n_features < 1) {
    throw GeneratorError("cohort_schema: n_features must be positive");
  }
  const std::vector<ColumnPlan>& plan = survey_plan();
  const std::size_t d = static_cast<std::size_t>(spec.n_features);
  std::vector<ColumnSchema> schema(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (j < plan.size()) {
      schema[j].name = plan[j].name;
      schema[j].kind = plan[j].kind;
      if (plan[j].kind == kOrd) {
        schema[j].levels = ordinal_levels(plan[j].scale);
      }
      if (plan[j].kind == kNom) {
        schema[j].levels = nominal_levels(schema[j].name);
      }
    } else {
      // Padded extras keep the Likert texture of the survey tail.
      schema[j].name = "survey_extra_" + std::to_string(j);
      schema[j].kind = kOrd;
      schema[j].levels = ordinal_levels(Scale::freq);
    }
  }
  return schema;
}

Cohort generate_cohort(const CohortSpec& spec) {
  validate_spec(spec);

  std::vector<ColumnSchema> schema = cohort_schema(spec);
  const Index n = spec.n;
  const Index d = static_cast<Index>(schema.size());

  for (const PlantedEffect& effect : spec.planted) {
    const auto hit = std::find_if(
        schema.begin(), schema.end(),
        [&](const ColumnSchema& c) { return c.name == effect.feature; });
    if (hit == schema.end()) {
      throw GeneratorError("planted feature '" + effect.feature +
                           "' is not in the cohort schema");
    }
    if (hit->kind == kNom || hit->kind == kTxt) {
      throw GeneratorError("planted feature '" + effect.feature +
                           "' must be binary, ordinal or numeric");
    }
  }

  // Complete feature draw, one derived stream per column.
  Matrix values = Matrix::Zero(n, d);
  std::vector<std::vector<std::string>> text(schema.size());
  for (Index j = 0; j < d; ++j) {
    const std::string name = schema[static_cast<std::size_t>(j)].name;
    Rng rng(derive_seed(spec.seed, seed_tag("col", name)));
    switch (schema[static_cast<std::size_t>(j)].kind) {
      case kBin:
        if (name == "female") {
          fill_quota(values, j, spec.female_rate, rng);
        } else if (name == "race_white") {
          fill_quota(values, j, spec.white_rate, rng);
        } else if (name == "race_asian") {
          fill_quota(values, j, spec.asian_rate, rng);
        } else if (name == "race_black") {
          fill_quota(values, j, spec.black_rate, rng);
        } else if (name == "intl_student") {
          fill_bernoulli(values, j, 0.14, rng);
        } else {
          fill_bernoulli(values, j, 0.33, rng);  // first_gen
        }
        break;
      case kNum:
        fill_numeric(values, j, name, rng);
        break;
      case kOrd:
      case kNom:
        fill_categorical(
            values, j,
            static_cast<int>(schema[static_cast<std::size_t>(j)].levels.size()),
            rng);
        break;
      case kTxt:
        fill_text(values, text[static_cast<std::size_t>(j)], j, name, rng);
        break;
    }
  }

  // Planted scores on standardized features; weak pairwise interaction terms
  // between consecutive planted features of the same outcome keep the logit
  // from being exactly linear while vanishing for a null spec.
  GroundTruth truth;
  truth.feature_names.reserve(schema.size());
  for (const ColumnSchema& c : schema) truth.feature_names.push_back(c.name);
  truth.login_coefficients = Vector::Zero(d);
  truth.message_coefficients = Vector::Zero(d);

  Vector login_score = Vector::Zero(n);
  Vector message_score = Vector::Zero(n);
  std::map<std::string, std::vector<std::pair<Vector, double>>> z_by_outcome;
  for (const PlantedEffect& effect : spec.planted) {
    Index col = 0;
    while (schema[static_cast<std::size_t>(col)].name != effect.feature) ++col;
    const double mean = values.col(col).mean();
    const double sd = std::sqrt(
        (values.col(col).array() - mean).square().sum() /
        static_cast<double>(n));
    if (!(sd > 0.0)) {
      throw GeneratorError("planted feature '" + effect.feature +
                           "' is constant in the generated cohort");
    }
    Vector z = (values.col(col).array() - mean) / sd;
    Vector& score = effect.outcome == "login" ? login_score : message_score;
    Vector& coeff = effect.outcome == "login" ? truth.login_coefficients
                                              : truth.message_coefficients;
    score += effect.magnitude * z;
    coeff(col) += effect.magnitude;
    z_by_outcome[effect.outcome].emplace_back(std::move(z), effect.magnitude);
  }
  for (auto& [outcome, planted] : z_by_outcome) {
    Vector& score = outcome == "login" ? login_score : message_score;
    for (std::size_t k = 0; k + 1 < planted.size(); ++k) {
      const double c = 0.15 * planted[k].second * planted[k + 1].second;
      score += c * planted[k].first.cwiseProduct(planted[k + 1].first);
    }
  }

  // Outcome labels from the complete (pre-missingness) features.
  truth.login_intercept = solve_intercept(login_score, spec.login_rate);
  truth.message_intercept_ge1 =
      solve_intercept(message_score, spec.msg1_rate + spec.msg2plus_rate);
  truth.message_intercept_ge2 =
      solve_intercept(message_score, spec.msg2plus_rate);

  std::vector<int> login_labels(static_cast<std::size_t>(n));
  {
    Rng rng(derive_seed(spec.seed, "synth/labels/login"));
    for (Index i = 0; i < n; ++i) {
      login_labels[static_cast<std::size_t>(i)] =
          rng.uniform() < logistic(truth.login_intercept + login_score(i)) ? 1
                                                                           : 0;
    }
  }
  std::vector<int> message_labels(static_cast<std::size_t>(n));
  {
    Rng rng(derive_seed(spec.seed, "synth/labels/message"));
    for (Index i = 0; i < n; ++i) {
      const double u = rng.uniform();
      const double s = message_score(i);
      if (u < logistic(truth.message_intercept_ge2 + s)) {
        message_labels[static_cast<std::size_t>(i)] = 2;
      } else if (u < logistic(truth.message_intercept_ge1 + s)) {
        message_labels[static_cast<std::size_t>(i)] = 1;
      } else {
        message_labels[static_cast<std::size_t>(i)] = 0;
      }
    }
  }

  // MCAR missingness plan: per-column uniform rates, with a couple of
  // non-planted ordinal columns pushed high enough to get dropped later.
  std::vector<double> rates(schema.size());
  {
    Rng rng(derive_seed(spec.seed, "synth/missing_plan"));
    for (double& r : rates) {
      r = rng.uniform(spec.missing_rate_low, spec.missing_rate_high);
    }
    std::vector<Index> eligible;
    for (Index j = 0; j < d; ++j) {
      const std::string& name = schema[static_cast<std::size_t>(j)].name;
      const bool is_planted = std::any_of(
          spec.planted.begin(), spec.planted.end(),
          [&](const PlantedEffect& e) { return e.feature == name; });
      if (schema[static_cast<std::size_t>(j)].kind == kOrd && !is_planted) {
        eligible.push_back(j);
      }
    }
    if (static_cast<std::size_t>(spec.n_high_missing_columns) >
        eligible.size()) {
      throw GeneratorError(
          "not enough non-planted ordinal columns for the requested "
          "high-missingness count");
    }
    for (std::size_t pick : rng.sample_without_replacement(
             eligible.size(),
             static_cast<std::size_t>(spec.n_high_missing_columns))) {
      rates[static_cast<std::size_t>(eligible[pick])] = spec.high_missing_rate;
    }
  }
  MaskArray missing = MaskArray::Constant(n, d, false);
  for (Index j = 0; j < d; ++j) {
    const double rate = rates[static_cast<std::size_t>(j)];
    Rng rng(derive_seed(
        spec.seed,
        seed_tag("missing", schema[static_cast<std::size_t>(j)].name)));
    for (Index i = 0; i < n; ++i) {
      if (rng.uniform() < rate) missing(i, j) = true;
    }
  }

  std::vector<std::int64_t> row_ids(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) row_ids[static_cast<std::size_t>(i)] = i;

  Cohort cohort;
  cohort.table = data::DataTable(std::move(schema), std::move(values),
                                 std::move(missing), std::move(text),
                                 std::move(row_ids));
  cohort.login = data::make_labels("login", std::move(login_labels), 2);
  cohort.message = data::make_labels("message", std::move(message_labels), 3);
  cohort.truth = std::move(truth);
  return cohort;
}

void write_labels_csv(const Cohort& cohort, const std::string& path) {
  std::string out = "row_id,login,message\n";
  const auto& ids = cohort.table.row_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += std::to_string(ids[i]);
    out += ',';
    out += std::to_string(cohort.login.labels[i]);
    out += ',';
    out += std::to_string(cohort.message.labels[i]);
    out += '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << out;
  if (!file) throw IoError("failed writing '" + path + "'");
}

Json ground_truth_to_json(const GroundTruth& truth) {
  Json login_coeff = Json::object();
  Json message_coeff = Json::object();
  for (Index j = 0; j < truth.login_coefficients.size(); ++j) {
    const std::string& name = truth.feature_names[static_cast<std::size_t>(j)];
    if (truth.login_coefficients(j) != 0.0) {
      login_coeff[name] = truth.login_coefficients(j);
    }
    if (truth.message_coefficients(j) != 0.0) {
      message_coeff[name] = truth.message_coefficients(j);
    }
  }
  return Json{
      {"feature_names", truth.feature_names},
      {"login",
       {{"intercept", truth.login_intercept}, {"coefficients", login_coeff}}},
      {"message",
       {{"intercept_ge1", truth.message_intercept_ge1},
        {"intercept_ge2", truth.message_intercept_ge2},
        {"coefficients", message_coeff}}},
  };
}

GroundTruth ground_truth_from_json(const Json& j) {
  GroundTruth truth;
  truth.feature_names = require_field(j, "feature_names", "ground truth")
                            .get<std::vector<std::string>>();
  const Index d = static_cast<Index>(truth.feature_names.size());
  truth.login_coefficients = Vector::Zero(d);
  truth.message_coefficients = Vector::Zero(d);

  const Json& login = require_field(j, "login", "ground truth");
  const Json& message = require_field(j, "message", "ground truth");
  truth.login_intercept =
      require_field(login, "intercept", "ground truth login").get<double>();
  truth.message_intercept_ge1 =
      require_field(message, "intercept_ge1", "ground truth message")
          .get<double>();
  truth.message_intercept_ge2 =
      require_field(message, "intercept_ge2", "ground truth message")
          .get<double>();

  const auto fill = [&](const Json& block, Vector& coeff,
                        const std::string& what) {
    for (const auto& [name, value] :
         require_field(block, "coefficients", what).items()) {
      const auto hit = std::find(truth.feature_names.begin(),
                                 truth.feature_names.end(), name);
      if (hit == truth.feature_names.end()) {
        throw ModelIntegrityError(what + ": coefficient on unknown feature '" +
                                  name + "'");
      }
      coeff(static_cast<Index>(hit - truth.feature_names.begin())) =
          value.get<double>();
    }
  };
  fill(login, truth.login_coefficients, "ground truth login");
  fill(message, truth.message_coefficients, "ground truth message");
  return truth;
}

}  // namespace triboost::synth
