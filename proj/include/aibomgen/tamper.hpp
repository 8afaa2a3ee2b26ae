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

#include "aibomgen/platform.hpp"

namespace aibomgen {

/// Attack scenarios replayed against a live deployment. POISONED_VALID is a
/// documented boundary: a well-formed but biased dataset passes every check
/// by design, so "not detected" is the expected result there.
enum class Scenario {
    InputMutate,
    ArtifactMutate,
    BomForge,
    LinkSwap,
    TokenForge,
    PoisonedValid,
    Control,
};

const char* scenario_name(Scenario s);

struct DetectionResult {
    Scenario scenario;
    bool detected = false;
    bool detection_expected = true;
    std::vector<std::string> details;

    /// True when the observed behaviour matches the scenario's expectation
    /// (detection for attacks, silence for Control and PoisonedValid).
    bool as_expected() const { return detected == detection_expected; }
};

/// Drives the threat scenarios against an isolated platform instance plus
/// its HTTP gateway. Construction boots the instance and completes a
/// reference job; throws HarnessSetupFailed if that groundwork fails.
class TamperHarness {
  public:
    explicit TamperHarness(const std::string& work_dir);
    ~TamperHarness();

    DetectionResult run_scenario(Scenario scenario);
    std::vector<DetectionResult> run_all();

    /// scenario x detected matrix, one line per scenario.
    static std::string format_matrix(const std::vector<DetectionResult>& results);

  private:
    struct CompletedJob {
        std::string job_id;
        std::string link_bytes;
        std::string aibom_bytes;
    };

    CompletedJob complete_reference_job(const std::string& dataset_csv);
    std::string object_file(const std::string& job_id, const std::string& name) const;

    std::unique_ptr<Platform> platform_;
    int port_ = 0;
    CompletedJob primary_;
};

}  // namespace aibomgen
