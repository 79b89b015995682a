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

#ifndef TRIBOOST_JSON_IO_HPP_
#define TRIBOOST_JSON_IO_HPP_

#include <json.hpp>

#include <string>

#include "triboost/error.hpp"
#include "triboost/types.hpp"

namespace triboost {

using Json = nlohmann::json;

// Doubles survive the JSON round trip exactly: nlohmann emits the shortest
// decimal form that parses back to the same bit pattern.

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json mask_to_json(const MaskArray& m);
MaskArray mask_from_json(const Json& j);

// Parses with a ModelIntegrityError on malformed content.
Json parse_json(const std::string& content, const std::string& what);

Json read_json_file(const std::string& path);
void write_json_file(const Json& j, const std::string& path);

// Fetches j[key] or throws ModelIntegrityError naming the missing field.
const Json& require_field(const Json& j, const std::string& key,
                          const std::string& what);

}  // namespace triboost

#endif  // TRIBOOST_JSON_IO_HPP_
