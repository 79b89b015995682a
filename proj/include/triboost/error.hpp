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

#ifndef TRIBOOST_ERROR_HPP_
#define TRIBOOST_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace triboost {

// Root of the library's exception hierarchy. Everything thrown on purpose
// derives from Error; anything else escaping the library is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run configuration (unknown keys, missing required fields, bad
// values). The CLI maps this to exit code 2; all other errors exit 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

#define TRIBOOST_DEFINE_ERROR(NAME)  \
  class NAME : public Error {        \
   public:                           \
    using Error::Error;              \
  };

TRIBOOST_DEFINE_ERROR(IoError)              // file open/read/write failures
TRIBOOST_DEFINE_ERROR(ParseError)           // malformed cell or file contents
TRIBOOST_DEFINE_ERROR(SchemaError)          // table shape/kind/level violations
TRIBOOST_DEFINE_ERROR(HarmonizationError)   // incompatible tables in a merge
TRIBOOST_DEFINE_ERROR(DegenerateInputError) // empty or all-dropped inputs
TRIBOOST_DEFINE_ERROR(ParameterError)       // out-of-range arguments
TRIBOOST_DEFINE_ERROR(EncodingError)        // unseen category and friends
TRIBOOST_DEFINE_ERROR(VectorizerError)      // empty vocabulary etc.
TRIBOOST_DEFINE_ERROR(StratificationError)  // class too small for a split plan
TRIBOOST_DEFINE_ERROR(ResamplingError)      // SMOTE/bootstrap preconditions
TRIBOOST_DEFINE_ERROR(FitError)             // learner cannot be fit as asked
TRIBOOST_DEFINE_ERROR(NumericError)         // non-finite values where finite required
TRIBOOST_DEFINE_ERROR(ShapeError)           // dimension mismatches between arrays
TRIBOOST_DEFINE_ERROR(EvaluationError)      // metric preconditions violated
TRIBOOST_DEFINE_ERROR(CiError)              // bootstrap CI undefined-majority rule
TRIBOOST_DEFINE_ERROR(SearchError)          // hyper-parameter search failures
TRIBOOST_DEFINE_ERROR(ModelIntegrityError)  // corrupt serialized models
TRIBOOST_DEFINE_ERROR(ComplexityError)      // guard against intractable requests
TRIBOOST_DEFINE_ERROR(GeneratorError)       // synthetic cohort constraints unmet
TRIBOOST_DEFINE_ERROR(RenderError)          // SVG rendering failures
TRIBOOST_DEFINE_ERROR(ScoringError)         // per-model scoring failures in search

#undef TRIBOOST_DEFINE_ERROR

}  // namespace triboost

#endif  // TRIBOOST_ERROR_HPP_
