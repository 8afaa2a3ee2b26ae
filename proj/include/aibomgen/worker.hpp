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
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "aibomgen/keys.hpp"
#include "aibomgen/orchestrator.hpp"
#include "aibomgen/scanner.hpp"
#include "aibomgen/storage.hpp"
#include "aibomgen/types.hpp"

namespace aibomgen {

/// Host facts captured once per process (hashing the worker binary stands in
/// for a container image digest when none exists).
struct HostInfo {
    Digest worker_image_digest;
    std::string platform_version;
    std::string hostname;
    std::string cpu_model;
    uint64_t total_memory_bytes = 0;
};

HostInfo capture_host_info();

struct WorkerConfig {
    std::string worker_id = "worker-0";
    bool capture_log = false;  // attach train.log as an attested product
};

struct JobOutcome {
    std::string job_id;
    JobState state = JobState::Failed;
    std::string failure_reason;
    TrainingMetrics metrics;  // aibom_generation_seconds filled on success
};

/// Executes the fixed training workflow for one claimed job: fetch and
/// re-verify inputs, parse, snapshot the environment, train, serialize,
/// upload, hash, attest, sign, upload attestations, report completion.
/// Any step failure fails the job with the step name as reason; an input
/// digest mismatch fails as InputTamperDetected.
class Worker {
  public:
    Worker(Orchestrator& orchestrator, Store& store, const KeyPair& key,
           WorkerConfig config, ClockFn clock = system_clock_fn(),
           const ScanScheduler* scanner = nullptr);

    /// Claims and runs at most one job. Empty when the queue is idle.
    std::optional<JobOutcome> poll_once();

    JobOutcome run_job(const JobRecord& job, const Lease& lease);

    const std::string& worker_id() const { return config_.worker_id; }

  private:
    Orchestrator& orchestrator_;
    Store& store_;
    const KeyPair& key_;
    WorkerConfig config_;
    ClockFn clock_;
    const ScanScheduler* scanner_;
    HostInfo host_;
};

/// Pool of worker threads polling the orchestrator.
class WorkerPool {
  public:
    WorkerPool(Orchestrator& orchestrator, Store& store, const KeyPair& key,
               ClockFn clock = system_clock_fn(),
               const ScanScheduler* scanner = nullptr);
    ~WorkerPool();

    void start(size_t workers);
    void stop();

    /// Timing records of finished jobs, persisted under state/timings/.
    std::optional<TrainingMetrics> job_timings(const std::string& job_id) const;

  private:
    Orchestrator& orchestrator_;
    Store& store_;
    const KeyPair& key_;
    ClockFn clock_;
    const ScanScheduler* scanner_;
    std::vector<std::thread> threads_;
    std::atomic<bool> running_{false};
};

/// Where worker outcomes persist per-job timing metrics (outside the
/// attested artifact set).
std::string timings_path(const std::string& store_root,
                         const std::string& job_id);
void persist_timings(const std::string& store_root, const JobOutcome& outcome);

}  // namespace aibomgen
