// Copyright 2026 The aibomgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

namespace aibomgen {

using Json = nlohmann::json;

/// Canonical JSON text used as the signing payload everywhere.
///
/// Rules: object keys sorted lexicographically by code point, minimal
/// separators (no whitespace), UTF-8 output, integers in minimal decimal
/// form, and finite non-integer numbers rendered as the shortest decimal
/// string that round-trips (std::to_chars). Semantically equal documents
/// serialize to byte-identical text; serialize(parse(x)) == x for every x
/// this function produced.
///
/// Throws Error(NonCanonicalizable) for non-finite numbers and for value
/// kinds outside maps/lists/strings/integers/booleans/null/finite decimals.
std::string canonical_serialize(const Json& document);

/// Parses JSON text; throws Error(MalformedDocument) on syntax errors.
Json canonical_parse(std::string_view text);

/// True iff `text` is already in canonical form (parses, and re-serializing
/// reproduces the exact bytes).
bool is_canonical(std::string_view text);

}  // namespace aibomgen
