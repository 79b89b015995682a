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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "triboost/dataset.hpp"
#include "triboost/error.hpp"
#include "triboost/eval.hpp"
#include "triboost/learners.hpp"
#include "triboost/preprocess.hpp"
#include "triboost/rng.hpp"
#include "triboost/sampling.hpp"
#include "triboost/synth.hpp"

using namespace triboost;
using synth::CohortSpec;
using synth::generate_cohort;

namespace {

double label_rate(const std::vector<int>& labels, int value) {
  double hits = 0.0;
  for (int label : labels) hits += label == value ? 1.0 : 0.0;
  return hits / static_cast<double>(labels.size());
}

double column_mean(const data::DataTable& table, const std::string& name) {
  const Index j = table.column_index(name);
  double total = 0.0;
  for (Index i = 0; i < table.n_rows(); ++i) total += table.value(i, j);
  return total / static_cast<double>(table.n_rows());
}

// Mean of a column over the rows where pick(row) holds; complete tables only.
double conditional_mean(const data::DataTable& table, const std::string& name,
                        const std::vector<int>& labels, bool positive) {
  const Index j = table.column_index(name);
  double total = 0.0;
  Index count = 0;
  for (Index i = 0; i < table.n_rows(); ++i) {
    if ((labels[static_cast<std::size_t>(i)] > 0) != positive) continue;
    total += table.value(i, j);
    ++count;
  }
  REQUIRE(count > 0);
  return total / static_cast<double>(count);
}

CohortSpec complete_spec() {
  CohortSpec spec;
  spec.missing_rate_high = 0.0;
  spec.n_high_missing_columns = 0;
  return spec;
}

}  // namespace

TEST_CASE("default cohort matches the target shape and prevalences") {
  const synth::Cohort cohort = generate_cohort(CohortSpec{});
  const data::DataTable& table = cohort.table;
  CHECK(table.n_rows() == 1673);
  CHECK(table.n_cols() == 108);

  // Realized outcome rates within the +-0.02 band.
  CHECK(std::abs(label_rate(cohort.login.labels, 1) - 0.375) < 0.02);
  CHECK(std::abs(label_rate(cohort.message.labels, 1) - 0.212) < 0.02);
  CHECK(std::abs(label_rate(cohort.message.labels, 2) - 0.100) < 0.02);
  CHECK(cohort.login.n_classes == 2);
  CHECK(cohort.message.n_classes == 3);

  // Sequential row ids.
  for (Index i = 0; i < table.n_rows(); ++i) {
    CHECK(table.row_ids()[static_cast<std::size_t>(i)] == i);
  }

  // Planted columns exist with plantable kinds.
  for (const char* name : {"chronic_pain", "stigma_concern",
                           "alcohol_blackouts", "persistent_sadness"}) {
    CHECK(table.schema()[static_cast<std::size_t>(table.column_index(name))]
              .kind == data::ColumnKind::ordinal);
  }
  CHECK(table.schema()[static_cast<std::size_t>(table.column_index("female"))]
            .kind == data::ColumnKind::binary);

  // Kind census: the survey keeps a fixed mix.
  int binary = 0, numeric = 0, ordinal = 0, nominal = 0, text = 0;
  for (const auto& column : table.schema()) {
    switch (column.kind) {
      case data::ColumnKind::binary: ++binary; break;
      case data::ColumnKind::numeric: ++numeric; break;
      case data::ColumnKind::ordinal: ++ordinal; break;
      case data::ColumnKind::nominal: ++nominal; break;
      case data::ColumnKind::text: ++text; break;
    }
  }
  CHECK(binary == 6);
  CHECK(numeric == 6);
  CHECK(ordinal == 88);
  CHECK(nominal == 5);
  CHECK(text == 3);
}

TEST_CASE("demographic indicators are filled by exact quota") {
  for (const std::uint64_t seed : {42ULL, 5ULL}) {
    CohortSpec spec;
    spec.seed = seed;
    const synth::Cohort cohort = generate_cohort(spec);
    const struct {
      const char* name;
      double target;
    } checks[] = {{"female", 0.616},
                  {"race_white", 0.720},
                  {"race_asian", 0.210},
                  {"race_black", 0.074}};
    for (const auto& check : checks) {
      const double realized = column_mean(cohort.table, check.name);
      CHECK(std::abs(realized - check.target) < 0.02);
      // Quota fill makes the count exact, not merely close.
      const double count = realized * 1673.0;
      CHECK(std::lround(count) ==
            std::lround(check.target * 1673.0));
    }
  }
}

TEST_CASE("the same seed reproduces the cohort byte for byte") {
  const synth::Cohort a = generate_cohort(CohortSpec{});
  const synth::Cohort b = generate_cohort(CohortSpec{});
  CHECK(data::format_csv(a.table) == data::format_csv(b.table));
  CHECK(a.login.labels == b.login.labels);
  CHECK(a.message.labels == b.message.labels);
  CHECK(a.truth.login_intercept == b.truth.login_intercept);

  CohortSpec other;
  other.seed = 43;
  const synth::Cohort c = generate_cohort(other);
  CHECK(data::format_csv(a.table) != data::format_csv(c.table));

  const auto path_a = std::filesystem::temp_directory_path() / "labels_a.csv";
  const auto path_b = std::filesystem::temp_directory_path() / "labels_b.csv";
  synth::write_labels_csv(a, path_a.string());
  synth::write_labels_csv(b, path_b.string());
  std::ifstream fa(path_a), fb(path_b);
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  const std::string labels_csv = sa.str();
  CHECK(labels_csv == sb.str());
  CHECK(labels_csv.rfind("row_id,login,message\n", 0) == 0);
  CHECK(static_cast<Index>(std::count(labels_csv.begin(), labels_csv.end(),
                                      '\n')) == a.table.n_rows() + 1);
  std::filesystem::remove(path_a);
  std::filesystem::remove(path_b);
}

TEST_CASE("missingness hits every column lightly and exactly two severely") {
  const synth::Cohort cohort = generate_cohort(CohortSpec{});
  const data::DataTable& table = cohort.table;
  std::vector<std::string> heavy;
  for (Index j = 0; j < table.n_cols(); ++j) {
    const double rate = table.column_missing_rate(j);
    if (rate > 0.8) {
      heavy.push_back(table.schema()[static_cast<std::size_t>(j)].name);
    } else {
      // Sampled from [0, 0.3]; allow sampling noise on top.
      CHECK(rate < 0.35);
    }
  }
  REQUIRE(heavy.size() == 2);
  for (const std::string& name : heavy) {
    const Index j = table.column_index(name);
    CHECK(table.schema()[static_cast<std::size_t>(j)].kind ==
          data::ColumnKind::ordinal);
    for (const auto& effect : CohortSpec{}.planted) {
      CHECK(effect.feature != name);
    }
  }

  const auto [kept, dropped] = data::drop_high_missingness(table, 0.8);
  CHECK(kept.n_cols() == 106);
  CHECK(std::set<std::string>(dropped.begin(), dropped.end()) ==
        std::set<std::string>(heavy.begin(), heavy.end()));
}

TEST_CASE("intercept bisection matches the target rate on large samples") {
  // Closed form when all scores are zero: a = logit(p).
  const Vector zeros = Vector::Zero(1000);
  CHECK(std::abs(synth::solve_intercept(zeros, 0.25) - std::log(0.25 / 0.75)) <
        1e-9);

  Rng rng(31);
  Vector scores(1000000);
  for (Index i = 0; i < scores.size(); ++i) scores(i) = rng.normal(0.0, 1.5);
  const double a = synth::solve_intercept(scores, 0.3);
  double realized = 0.0;
  for (Index i = 0; i < scores.size(); ++i) {
    realized += 1.0 / (1.0 + std::exp(-(a + scores(i))));
  }
  realized /= static_cast<double>(scores.size());
  CHECK(std::abs(realized - 0.3) < 1e-4);

  CHECK_THROWS_AS(synth::solve_intercept(zeros, 0.0), GeneratorError);
  CHECK_THROWS_AS(synth::solve_intercept(zeros, 1.0), GeneratorError);
  CHECK_THROWS_AS(synth::solve_intercept(Vector(), 0.5), GeneratorError);
}

TEST_CASE("infeasible specs are rejected up front") {
  const auto expect_error = [](auto mutate) {
    CohortSpec spec;
    mutate(spec);
    CHECK_THROWS_AS(generate_cohort(spec), GeneratorError);
  };
  expect_error([](CohortSpec& s) { s.login_rate = 0.0; });
  expect_error([](CohortSpec& s) { s.login_rate = 1.0; });
  expect_error([](CohortSpec& s) { s.msg2plus_rate = 0.0; });
  expect_error([](CohortSpec& s) { s.msg1_rate = 0.0; });
  expect_error([](CohortSpec& s) { s.msg1_rate = 0.7; s.msg2plus_rate = 0.4; });
  expect_error([](CohortSpec& s) { s.female_rate = 1.2; });
  expect_error([](CohortSpec& s) { s.black_rate = -0.1; });
  expect_error([](CohortSpec& s) { s.missing_rate_low = 0.5;
                                   s.missing_rate_high = 0.2; });
  expect_error([](CohortSpec& s) { s.high_missing_rate = 1.5; });
  expect_error([](CohortSpec& s) { s.n = 0; });
  expect_error([](CohortSpec& s) { s.n_features = 0; });
  expect_error([](CohortSpec& s) {
    s.planted.push_back({"no_such_item", "login", 1.0});
  });
  expect_error([](CohortSpec& s) {
    s.planted.push_back({"year_in_school", "login", 1.0});
  });
  expect_error([](CohortSpec& s) {
    s.planted.push_back({"main_concern", "message", 1.0});
  });
  expect_error([](CohortSpec& s) {
    s.planted.push_back({"chronic_pain", "signup", 1.0});
  });
  // Planting on a constant column: female quota at 0 leaves no variance.
  expect_error([](CohortSpec& s) { s.female_rate = 0.0; });
  // Not enough non-planted ordinal columns for the severe-missingness pair.
  expect_error([](CohortSpec& s) {
    s.planted.clear();
    s.n_features = 17;  // head block holds no ordinal columns
  });
}

TEST_CASE("a null cohort carries no signal") {
  CohortSpec spec = complete_spec();
  spec.planted.clear();
  spec.n_features = 17;
  spec.seed = 123;
  const synth::Cohort cohort = generate_cohort(spec);
  const auto [X, names] = preprocess::to_feature_matrix(cohort.table);

  const auto plan = sampling::stratified_k_fold(cohort.login.labels, 5, 11);
  double auc_sum = 0.0;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    const IndexList train = sampling::fold_complement(plan, f);
    Matrix Xtr(static_cast<Index>(train.size()), X.cols());
    std::vector<int> ytr;
    for (std::size_t i = 0; i < train.size(); ++i) {
      Xtr.row(static_cast<Index>(i)) = X.row(train[i]);
      ytr.push_back(cohort.login.labels[static_cast<std::size_t>(train[i])]);
    }
    const auto model = learners::fit_logistic(Xtr, ytr, 2);
    const IndexList& test = plan.folds[f];
    Matrix Xte(static_cast<Index>(test.size()), X.cols());
    std::vector<int> yte;
    for (std::size_t i = 0; i < test.size(); ++i) {
      Xte.row(static_cast<Index>(i)) = X.row(test[i]);
      yte.push_back(cohort.login.labels[static_cast<std::size_t>(test[i])]);
    }
    auc_sum += eval::roc_auc_score(yte, model.decision(Xte).col(0));
  }
  const double mean_auc = auc_sum / 5.0;
  CHECK(std::abs(mean_auc - 0.5) < 0.05);
}

TEST_CASE("a magnitude-5 planted feature tops the univariate ranking") {
  CohortSpec spec = complete_spec();
  spec.planted = {{"persistent_sadness", "login", 5.0}};
  spec.n_features = 105;  // all but the free-text tail
  spec.seed = 9;
  const synth::Cohort cohort = generate_cohort(spec);
  const auto [X, names] = preprocess::to_feature_matrix(cohort.table);
  const auto result =
      preprocess::select_univariate(X, cohort.login.labels, 2, 5);
  CHECK(names[static_cast<std::size_t>(result.selected[0])] ==
        "persistent_sadness");
  // The gap to the runner-up is decisive, not a tie break.
  CHECK(result.scores(result.selected[0]) >
        10.0 * result.scores(result.selected[1]));
}

TEST_CASE("ground truth is nonzero exactly on the planted features") {
  const synth::Cohort cohort = generate_cohort(CohortSpec{});
  const synth::GroundTruth& truth = cohort.truth;
  REQUIRE(truth.feature_names.size() == 108);

  const std::map<std::string, double> login_expected = {
      {"chronic_pain", 1.1},
      {"stigma_concern", -0.9},
      {"alcohol_blackouts", -0.8}};
  const std::map<std::string, double> message_expected = {
      {"female", 0.9}, {"persistent_sadness", 1.2}};
  for (std::size_t j = 0; j < truth.feature_names.size(); ++j) {
    const std::string& name = truth.feature_names[j];
    const auto login_hit = login_expected.find(name);
    const auto message_hit = message_expected.find(name);
    CHECK(truth.login_coefficients(static_cast<Index>(j)) ==
          (login_hit == login_expected.end() ? 0.0 : login_hit->second));
    CHECK(truth.message_coefficients(static_cast<Index>(j)) ==
          (message_hit == message_expected.end() ? 0.0
                                                 : message_hit->second));
  }
  CHECK(truth.message_intercept_ge2 < truth.message_intercept_ge1);

  const Json j = synth::ground_truth_to_json(truth);
  const synth::GroundTruth back = synth::ground_truth_from_json(j);
  CHECK(back.feature_names == truth.feature_names);
  CHECK((back.login_coefficients - truth.login_coefficients)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((back.message_coefficients - truth.message_coefficients)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK(back.login_intercept == truth.login_intercept);
  CHECK(back.message_intercept_ge1 == truth.message_intercept_ge1);
  CHECK(back.message_intercept_ge2 == truth.message_intercept_ge2);

  Json tampered = j;
  tampered["login"]["coefficients"]["not_a_feature"] = 2.0;
  CHECK_THROWS_AS(synth::ground_truth_from_json(tampered),
                  ModelIntegrityError);
}

TEST_CASE("message labels are assigned cohort-wide, not only to logins") {
  const synth::Cohort cohort = generate_cohort(CohortSpec{});
  Index posters_without_login = 0;
  for (std::size_t i = 0; i < cohort.login.labels.size(); ++i) {
    if (cohort.login.labels[i] == 0 && cohort.message.labels[i] > 0) {
      ++posters_without_login;
    }
  }
  CHECK(posters_without_login > 0);
}

TEST_CASE("planted effects move the conditional means the right way") {
  // Complete draw so the conditional means are over all rows.
  const synth::Cohort cohort = generate_cohort(complete_spec());
  const data::DataTable& table = cohort.table;
  const auto& login = cohort.login.labels;
  const auto& message = cohort.message.labels;

  CHECK(conditional_mean(table, "chronic_pain", login, true) >
        conditional_mean(table, "chronic_pain", login, false));
  CHECK(conditional_mean(table, "stigma_concern", login, true) <
        conditional_mean(table, "stigma_concern", login, false));
  CHECK(conditional_mean(table, "alcohol_blackouts", login, true) <
        conditional_mean(table, "alcohol_blackouts", login, false));
  CHECK(conditional_mean(table, "female", message, true) >
        conditional_mean(table, "female", message, false));
  CHECK(conditional_mean(table, "persistent_sadness", message, true) >
        conditional_mean(table, "persistent_sadness", message, false));
}

TEST_CASE("the schema can be truncated or padded") {
  CohortSpec narrow = complete_spec();
  narrow.planted.clear();
  narrow.n_features = 3;
  const synth::Cohort small = generate_cohort(narrow);
  CHECK(small.table.n_cols() == 3);
  CHECK(small.table.schema()[0].name == "female");

  CohortSpec wide;
  wide.n_features = 112;
  const synth::Cohort big = generate_cohort(wide);
  CHECK(big.table.n_cols() == 112);
  CHECK(big.table.schema()[108].name == "survey_extra_108");
  CHECK(big.table.schema()[111].kind == data::ColumnKind::ordinal);
}

TEST_CASE("free-text columns draw from their template pools") {
  const synth::Cohort cohort = generate_cohort(complete_spec());
  const data::DataTable& table = cohort.table;
  const Index j = table.column_index("main_concern");
  std::set<std::string> seen;
  for (Index i = 0; i < table.n_rows(); ++i) {
    seen.insert(table.text_value(i, j));
  }
  CHECK(seen.size() > 3);
  CHECK(seen.count("anxiety") == 1);
  // The deliberately misspelled variants survive into the cohort.
  CHECK(seen.count("anxeity") == 1);
  for (const std::string& s : seen) {
    CHECK(s.size() > 0);
  }
}
