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

#include <doctest.h>

#include <iostream>

#include "aibomgen/tamper.hpp"
#include "test_support.hpp"

using namespace aibomgen;

TEST_CASE("tamper harness: every threat scenario behaves as expected")
{
    test::TempDir dir("tamper");
    TamperHarness harness(dir.sub("platform"));
    auto results = harness.run_all();
    std::cout << TamperHarness::format_matrix(results);

    REQUIRE(results.size() == 7);
    for (const auto& result : results) {
        INFO(scenario_name(result.scenario));
        for (const auto& d : result.details) INFO("  ", d);
        CHECK(result.as_expected());
    }

    // The attack classes must all be detected...
    for (const auto& result : results)
        if (result.scenario != Scenario::Control &&
            result.scenario != Scenario::PoisonedValid)
            CHECK(result.detected);
    // ...while the control run and the documented poisoned-but-valid
    // boundary stay silent.
    for (const auto& result : results)
        if (result.scenario == Scenario::Control ||
            result.scenario == Scenario::PoisonedValid)
            CHECK_FALSE(result.detected);
}
