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

#include "aibomgen/report.hpp"

#include "aibomgen/errors.hpp"

namespace aibomgen {

void VerificationReport::add(std::string name, bool passed, std::string detail)
{
    checks.push_back({std::move(name), passed, std::move(detail)});
}

void VerificationReport::finalize()
{
    pass = !checks.empty();
    for (const auto& c : checks) pass = pass && c.passed;
}

const CheckResult* VerificationReport::find(std::string_view name) const
{
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

Json VerificationReport::to_json() const
{
    Json items = Json::array();
    for (const auto& c : checks) {
        Json item{{"name", c.name}, {"passed", c.passed}};
        if (!c.detail.empty()) item["detail"] = c.detail;
        items.push_back(item);
    }
    return Json{{"pass", pass}, {"checks", items}};
}

VerificationReport VerificationReport::from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("pass") || !j.contains("checks"))
        throw Error(Errc::MalformedDocument, "verification report");
    VerificationReport report;
    report.pass = j["pass"].get<bool>();
    for (const auto& item : j["checks"]) {
        CheckResult c;
        c.name = item.at("name").get<std::string>();
        c.passed = item.at("passed").get<bool>();
        if (item.contains("detail")) c.detail = item["detail"].get<std::string>();
        report.checks.push_back(std::move(c));
    }
    return report;
}

const char* match_status_name(MatchStatus s)
{
    switch (s) {
        case MatchStatus::Match: return "MATCH";
        case MatchStatus::Mismatch: return "MISMATCH";
        case MatchStatus::UnknownName: return "UNKNOWN_NAME";
    }
    return "UNKNOWN";
}

Json MatchResult::to_json() const
{
    Json j{{"name", name}, {"status", match_status_name(status)}};
    if (expected) j["expected"] = expected->to_json();
    if (actual) j["actual"] = actual->to_json();
    return j;
}

MatchResult MatchResult::from_json(const Json& j)
{
    MatchResult r;
    r.name = j.at("name").get<std::string>();
    std::string st = j.at("status").get<std::string>();
    if (st == "MATCH")
        r.status = MatchStatus::Match;
    else if (st == "MISMATCH")
        r.status = MatchStatus::Mismatch;
    else if (st == "UNKNOWN_NAME")
        r.status = MatchStatus::UnknownName;
    else
        throw Error(Errc::MalformedDocument, "match status");
    if (j.contains("expected")) r.expected = Digest::from_json(j["expected"]);
    if (j.contains("actual")) r.actual = Digest::from_json(j["actual"]);
    return r;
}

}  // namespace aibomgen
