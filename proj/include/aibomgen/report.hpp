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

#include <optional>
#include <string>
#include <vector>

#include "aibomgen/canonical.hpp"
#include "aibomgen/digest.hpp"

namespace aibomgen {

/// Outcome of one named verification check. Failures are report entries,
/// never thrown errors.
struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerificationReport {
    bool pass = false;
    std::vector<CheckResult> checks;

    void add(std::string name, bool passed, std::string detail = "");
    /// Recomputes `pass` as the conjunction of all checks.
    void finalize();
    const CheckResult* find(std::string_view name) const;

    Json to_json() const;
    static VerificationReport from_json(const Json& j);
};

enum class MatchStatus { Match, Mismatch, UnknownName };

const char* match_status_name(MatchStatus s);

struct MatchResult {
    std::string name;
    MatchStatus status = MatchStatus::UnknownName;
    std::optional<Digest> expected;
    std::optional<Digest> actual;

    Json to_json() const;
    static MatchResult from_json(const Json& j);
};

}  // namespace aibomgen
