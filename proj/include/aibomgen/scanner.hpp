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

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "aibomgen/aibom.hpp"
#include "aibomgen/storage.hpp"

namespace aibomgen {

enum class Severity { Low, Medium, High, Critical };

const char* severity_name(Severity s);
std::optional<Severity> severity_from_name(std::string_view name);

struct Advisory {
    std::string advisory_id;
    std::string component_name;
    std::string version_range;  // e.g. "<1.2.3", ">=1.0 <2.0", "=2.4.1", "*"
    Severity severity = Severity::Low;
};

struct AdvisoryDb {
    std::vector<Advisory> entries;

    static AdvisoryDb from_json(const Json& j);
    static AdvisoryDb load(const std::string& path);
};

struct ComponentVersion {
    std::string name;
    std::string version;
};

struct Finding {
    std::string advisory_id;
    std::string component_name;
    std::string component_version;
    Severity severity = Severity::Low;
};

struct ScanReport {
    std::string scanned_at;
    Digest target_digest;  // digest of the canonical manifest scanned
    std::vector<Finding> findings;
    std::map<std::string, uint64_t> summary;  // severity name -> count

    Json to_json() const;
    static ScanReport from_json(const Json& j);
    ScanSummary scan_summary() const;
};

/// All advisories whose component and version range match the manifest.
/// Deterministic: findings ordered by (advisory_id, component_name).
ScanReport scan(const std::vector<ComponentVersion>& manifest,
                const AdvisoryDb& db, const std::string& scanned_at);

/// True when `version` satisfies the comparator expression `range`
/// (space-separated "<", "<=", ">", ">=", "=", "==" terms, all must hold;
/// "*" matches everything). Unparseable versions never match.
bool version_in_range(const std::string& version, const std::string& range);

/// Background loop scanning the worker manifest every interval and storing
/// each report under scans/<timestamp>.json. The newest report ref is
/// attached to the environment snapshot of jobs started after it.
class ScanScheduler {
  public:
    ScanScheduler(Store& store, AdvisoryDb db,
                  std::vector<ComponentVersion> manifest,
                  ClockFn clock = system_clock_fn());
    ~ScanScheduler();

    /// Runs one scan immediately, then every interval until stop().
    void start(uint64_t interval_seconds);
    void stop();
    /// One synchronous scan; publishes the report and returns its ref.
    ArtifactRef scan_once();

    std::optional<ArtifactRef> latest_report_ref() const;
    std::optional<ScanSummary> latest_summary() const;

  private:
    Store& store_;
    AdvisoryDb db_;
    std::vector<ComponentVersion> manifest_;
    ClockFn clock_;

    mutable std::mutex mutex_;
    std::optional<ArtifactRef> latest_ref_;
    std::optional<ScanSummary> latest_summary_;

    std::thread thread_;
    std::condition_variable cv_;
    std::mutex cv_mutex_;
    std::atomic<bool> running_{false};
};

}  // namespace aibomgen
