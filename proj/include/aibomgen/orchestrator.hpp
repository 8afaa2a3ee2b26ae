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

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aibomgen/storage.hpp"
#include "aibomgen/types.hpp"

namespace aibomgen {

/// Queue bookkeeping for one pending or in-flight job.
struct QueueEntry {
    std::string job_id;
    std::string enqueued_at;
    uint64_t attempt = 1;
    std::optional<int64_t> visibility_deadline;  // Unix seconds, set while leased
    std::optional<std::string> lease_token;

    Json to_json() const;
    static QueueEntry from_json(const Json& j);
};

/// Possession of a claimed job; completion and failure must present it.
struct Lease {
    std::string job_id;
    std::string token;
    int64_t deadline = 0;  // Unix seconds
    uint64_t attempt = 1;
};

/// Durable job queue and state machine. Jobs move along
/// SUBMITTED→RUNNING→{COMPLETED, FAILED}; at-least-once delivery with
/// visibility leases; no job completes without its attestation outputs.
/// All operations are safe under arbitrary concurrent invocation.
class Orchestrator {
  public:
    Orchestrator(std::string state_dir, Store& store,
                 ClockFn clock = system_clock_fn(),
                 uint64_t lease_seconds = 300, uint64_t max_attempts = 3);

    /// Validates the spec, checks the dataset is staged and parseable, and
    /// persists the job in SUBMITTED. Throws ValidationFailed, Unauthorized.
    JobRecord submit_job(const JobSpec& spec, const std::string& principal);

    void register_worker(const std::string& worker_id);

    /// Claims the oldest available job; empty when the queue is idle.
    /// Expired leases redeliver with attempt+1 up to max_attempts, after
    /// which the job fails with "retries exhausted".
    std::optional<std::pair<JobRecord, Lease>> claim_job(
        const std::string& worker_id);

    /// Requires the four fixed outputs (model.bin, metrics.json,
    /// <job_id>.link.json, <job_id>.aibom.json). Idempotent for retries
    /// carrying identical outputs. Throws MissingAttestation, StaleLease,
    /// ValidationFailed.
    JobRecord complete_job(const std::string& job_id, const Lease& lease,
                           const std::vector<ArtifactRef>& outputs);

    JobRecord fail_job(const std::string& job_id, const Lease& lease,
                       const std::string& reason);

    /// Owner-only view. Throws NotFound, Unauthorized.
    JobRecord job_status(const std::string& job_id,
                         const std::string& principal) const;

    /// Expires stale leases; called periodically and implicitly by claim.
    void tick();

    size_t queue_depth() const;

  private:
    void persist_job_locked(const JobRecord& record);
    void persist_queue_entry_locked(const QueueEntry& entry);
    void remove_queue_entry_locked(const std::string& job_id);
    void sweep_expired_locked(int64_t now);
    void load_state();
    static ObjectKey key_from_ref_name(const std::string& ref_name);

    std::string state_dir_;
    Store& store_;
    ClockFn clock_;
    uint64_t lease_seconds_;
    uint64_t max_attempts_;

    mutable std::mutex mutex_;
    std::map<std::string, JobRecord> jobs_;
    std::map<std::string, QueueEntry> queue_;
    std::set<std::string> workers_;
};

}  // namespace aibomgen
