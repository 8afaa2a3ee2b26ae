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

#include <memory>
#include <optional>
#include <string>

#include "aibomgen/gateway.hpp"
#include "aibomgen/keys.hpp"
#include "aibomgen/orchestrator.hpp"
#include "aibomgen/scanner.hpp"
#include "aibomgen/storage.hpp"
#include "aibomgen/worker.hpp"

namespace aibomgen {

struct PlatformConfig {
    std::string data_dir;
    std::string listen_addr = "127.0.0.1";
    int listen_port = 8080;
    std::string signing_key_path;  // default <data_dir>/keys/platform.pem
    std::string public_key_path;   // default <data_dir>/keys/platform.pub.pem
    std::string tokens_path;       // optional; empty table when absent
    std::string advisory_db_path;  // optional; empty db when absent
    std::string grant_secret;      // generated and persisted when empty
    uint64_t lease_seconds = 300;
    uint64_t max_attempts = 3;
    uint64_t grant_ttl_seconds = 600;
    uint64_t scan_interval_seconds = 300;
    size_t workers = 2;

    /// Reads AIBOMGEN_* environment variables over the given defaults.
    static PlatformConfig from_environment();
    static PlatformConfig from_environment(PlatformConfig defaults);
};

/// One in-process deployment: storage, orchestrator, platform key, scanner,
/// worker pool and gateway, sharing a single data directory.
class Platform {
  public:
    explicit Platform(PlatformConfig config, ClockFn clock = system_clock_fn());
    ~Platform();

    /// Starts the scan scheduler and worker pool (no HTTP).
    void start_workers();
    /// Starts HTTP serving; returns the bound port.
    int start_gateway();
    void stop();

    Store& store() { return *store_; }
    Orchestrator& orchestrator() { return *orchestrator_; }
    Gateway& gateway() { return *gateway_; }
    const KeyPair& key() const { return key_; }
    ScanScheduler& scanner() { return *scanner_; }
    const PlatformConfig& config() const { return config_; }

    /// Convenience wrappers used by tests and the acceptance harness.
    ArtifactRef stage_artifact(const std::string& subject,
                               const std::string& filename,
                               std::string_view bytes,
                               const std::string& media_type = "text/csv");
    JobRecord submit(const std::string& subject, const ArtifactRef& dataset,
                     const TrainingConfig& config,
                     const std::optional<ArtifactRef>& base_model = {});
    /// Runs queued jobs on the calling thread until the queue drains.
    std::vector<JobOutcome> drain_queue();
    std::optional<TrainingMetrics> job_timings(const std::string& job_id) const;

  private:
    PlatformConfig config_;
    ClockFn clock_;
    KeyPair key_;
    std::unique_ptr<Store> store_;
    std::unique_ptr<Orchestrator> orchestrator_;
    std::unique_ptr<ScanScheduler> scanner_;
    std::unique_ptr<WorkerPool> pool_;
    std::unique_ptr<Gateway> gateway_;
    bool workers_started_ = false;
};

}  // namespace aibomgen
