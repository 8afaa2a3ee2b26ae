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

#include "aibomgen/orchestrator.hpp"

#include <algorithm>
#include <filesystem>

#include "aibomgen/canonical.hpp"
#include "aibomgen/errors.hpp"

namespace fs = std::filesystem;

namespace aibomgen {

namespace {

constexpr const char* kRetriesExhausted = "retries exhausted";

bool same_outputs(const std::vector<ArtifactRef>& a,
                  const std::vector<ArtifactRef>& b)
{
    if (a.size() != b.size()) return false;
    for (const auto& ref : a) {
        bool found = false;
        for (const auto& other : b)
            found = found || (ref.name == other.name && ref.digest == other.digest);
        if (!found) return false;
    }
    return true;
}

// First CSV line must look like a header: at least two non-empty cells.
bool csv_header_plausible(std::string_view bytes)
{
    size_t nl = bytes.find('\n');
    std::string_view line = nl == std::string_view::npos ? bytes : bytes.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) return false;
    size_t cells = 1;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        std::string_view cell = comma == std::string_view::npos
                                    ? line.substr(start)
                                    : line.substr(start, comma - start);
        if (cell.empty()) return false;
        if (comma == std::string_view::npos) break;
        ++cells;
        start = comma + 1;
    }
    return cells >= 2;
}

}  // namespace

Json QueueEntry::to_json() const
{
    Json j{{"job_id", job_id}, {"enqueued_at", enqueued_at}, {"attempt", attempt}};
    if (visibility_deadline) j["visibility_deadline"] = *visibility_deadline;
    if (lease_token) j["lease_token"] = *lease_token;
    return j;
}

QueueEntry QueueEntry::from_json(const Json& j)
{
    QueueEntry e;
    e.job_id = j.at("job_id").get<std::string>();
    e.enqueued_at = j.at("enqueued_at").get<std::string>();
    e.attempt = j.at("attempt").get<uint64_t>();
    if (j.contains("visibility_deadline"))
        e.visibility_deadline = j["visibility_deadline"].get<int64_t>();
    if (j.contains("lease_token"))
        e.lease_token = j["lease_token"].get<std::string>();
    return e;
}

Orchestrator::Orchestrator(std::string state_dir, Store& store, ClockFn clock,
                           uint64_t lease_seconds, uint64_t max_attempts)
    : state_dir_(std::move(state_dir)),
      store_(store),
      clock_(std::move(clock)),
      lease_seconds_(lease_seconds),
      max_attempts_(max_attempts)
{
    fs::create_directories(fs::path(state_dir_) / "jobs");
    fs::create_directories(fs::path(state_dir_) / "queue");
    load_state();
}

ObjectKey Orchestrator::key_from_ref_name(const std::string& ref_name)
{
    size_t slash = ref_name.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 >= ref_name.size())
        throw Error(Errc::ValidationFailed, "artifact name lacks namespace",
                    {"dataset"});
    return ObjectKey{ref_name.substr(0, slash), ref_name.substr(slash + 1)};
}

JobRecord Orchestrator::submit_job(const JobSpec& spec,
                                   const std::string& principal)
{
    if (principal.empty() || spec.submitter != principal)
        throw Error(Errc::Unauthorized, "submitter does not match principal");

    std::vector<std::string> bad = spec.config.validate();

    auto check_staged = [&](const ArtifactRef& ref, const char* field,
                            bool expect_csv) {
        try {
            ObjectKey key = key_from_ref_name(ref.name);
            auto stored = store_.stat_object(key);
            if (!stored || stored->digest.hex != ref.digest.hex) {
                bad.push_back(field);
                return;
            }
            auto owner = store_.namespace_owner(key.job_id);
            if (!owner || *owner != principal)
                throw Error(Errc::Unauthorized,
                            std::string("staged ") + field + " not owned by caller");
            if (expect_csv) {
                std::string bytes = store_.get_object(key);
                if (!csv_header_plausible(bytes)) bad.push_back(field);
            }
        } catch (const Error& e) {
            if (e.code() == Errc::Unauthorized) throw;
            bad.push_back(field);
        }
    };
    if (!spec.dataset.digest.valid())
        bad.push_back("dataset");
    else
        check_staged(spec.dataset, "dataset", true);
    if (spec.base_model) {
        if (!spec.base_model->digest.valid())
            bad.push_back("base_model");
        else
            check_staged(*spec.base_model, "base_model", false);
    }
    if (!bad.empty()) {
        std::sort(bad.begin(), bad.end());
        bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
        throw Error(Errc::ValidationFailed, "job spec rejected", bad);
    }

    std::lock_guard<std::mutex> lock(mutex_);
    JobRecord record;
    record.job_id = random_uuid();
    record.spec = spec;
    record.state = JobState::Submitted;
    record.created_at = format_rfc3339(clock_());
    store_.set_namespace_owner(record.job_id, principal);
    persist_job_locked(record);

    QueueEntry entry;
    entry.job_id = record.job_id;
    entry.enqueued_at = record.created_at;
    entry.attempt = 1;
    persist_queue_entry_locked(entry);

    jobs_[record.job_id] = record;
    queue_[record.job_id] = entry;
    return record;
}

void Orchestrator::register_worker(const std::string& worker_id)
{
    std::lock_guard<std::mutex> lock(mutex_);
    workers_.insert(worker_id);
}

void Orchestrator::sweep_expired_locked(int64_t now)
{
    std::vector<std::string> to_fail;
    for (auto& [job_id, entry] : queue_) {
        if (!entry.visibility_deadline || now <= *entry.visibility_deadline)
            continue;
        if (entry.attempt >= max_attempts_) {
            to_fail.push_back(job_id);
            continue;
        }
        entry.attempt += 1;
        entry.visibility_deadline.reset();
        entry.lease_token.reset();
        persist_queue_entry_locked(entry);
    }
    for (const auto& job_id : to_fail) {
        auto it = jobs_.find(job_id);
        if (it != jobs_.end() &&
            legal_transition(it->second.state, JobState::Failed)) {
            it->second.state = JobState::Failed;
            it->second.failure_reason = kRetriesExhausted;
            it->second.finished_at = format_rfc3339(clock_());
            persist_job_locked(it->second);
        }
        remove_queue_entry_locked(job_id);
        queue_.erase(job_id);
    }
}

std::optional<std::pair<JobRecord, Lease>> Orchestrator::claim_job(
    const std::string& worker_id)
{
    std::lock_guard<std::mutex> lock(mutex_);
    if (!workers_.count(worker_id))
        throw Error(Errc::UnknownWorker, worker_id + " is not registered");

    int64_t now = to_unix_seconds(clock_());
    sweep_expired_locked(now);

    QueueEntry* chosen = nullptr;
    for (auto& [job_id, entry] : queue_) {
        if (entry.lease_token) continue;  // live lease
        if (chosen == nullptr ||
            std::tie(entry.enqueued_at, entry.job_id) <
                std::tie(chosen->enqueued_at, chosen->job_id))
            chosen = &entry;
    }
    if (chosen == nullptr) return std::nullopt;

    chosen->lease_token = random_uuid();
    chosen->visibility_deadline = now + int64_t(lease_seconds_);
    persist_queue_entry_locked(*chosen);

    JobRecord& record = jobs_.at(chosen->job_id);
    if (record.state == JobState::Submitted) {
        record.state = JobState::Running;
        record.started_at = format_rfc3339(clock_());
        persist_job_locked(record);
    }

    Lease lease;
    lease.job_id = chosen->job_id;
    lease.token = *chosen->lease_token;
    lease.deadline = *chosen->visibility_deadline;
    lease.attempt = chosen->attempt;
    return std::make_pair(record, lease);
}

JobRecord Orchestrator::complete_job(const std::string& job_id,
                                     const Lease& lease,
                                     const std::vector<ArtifactRef>& outputs)
{
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) throw Error(Errc::NotFound, job_id);
    JobRecord& record = it->second;

    if (record.state == JobState::Completed) {
        if (same_outputs(record.outputs, outputs)) return record;  // retry echo
        throw Error(Errc::IllegalTransition,
                    "job already completed with different outputs");
    }

    auto entry_it = queue_.find(job_id);
    if (entry_it == queue_.end() || !entry_it->second.lease_token ||
        *entry_it->second.lease_token != lease.token ||
        to_unix_seconds(clock_()) > *entry_it->second.visibility_deadline)
        throw Error(Errc::StaleLease, "lease is not current for " + job_id);

    auto has = [&](const std::string& name) {
        return std::any_of(outputs.begin(), outputs.end(),
                           [&](const ArtifactRef& r) { return r.name == name; });
    };
    if (!has(link_object_name(job_id)) || !has(aibom_object_name(job_id)))
        throw Error(Errc::MissingAttestation,
                    "completion requires link and AIBOM outputs");
    if (!has(model_object_name()) || !has(metrics_object_name()))
        throw Error(Errc::ValidationFailed, "completion lacks model or metrics",
                    {"outputs"});
    for (const auto& ref : outputs)
        if (!ref.digest.valid())
            throw Error(Errc::MissingDigest, "output lacks digest: " + ref.name);

    if (!legal_transition(record.state, JobState::Completed))
        throw Error(Errc::IllegalTransition,
                    std::string("cannot complete from ") +
                        job_state_name(record.state));

    record.state = JobState::Completed;
    record.outputs = outputs;
    record.finished_at = format_rfc3339(clock_());
    persist_job_locked(record);
    remove_queue_entry_locked(job_id);
    queue_.erase(job_id);
    return record;
}

JobRecord Orchestrator::fail_job(const std::string& job_id, const Lease& lease,
                                 const std::string& reason)
{
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) throw Error(Errc::NotFound, job_id);
    JobRecord& record = it->second;

    if (record.state == JobState::Failed && record.failure_reason &&
        *record.failure_reason == reason)
        return record;  // retry echo

    auto entry_it = queue_.find(job_id);
    if (entry_it == queue_.end() || !entry_it->second.lease_token ||
        *entry_it->second.lease_token != lease.token)
        throw Error(Errc::StaleLease, "lease is not current for " + job_id);

    if (!legal_transition(record.state, JobState::Failed))
        throw Error(Errc::IllegalTransition,
                    std::string("cannot fail from ") + job_state_name(record.state));

    record.state = JobState::Failed;
    record.failure_reason = reason;
    record.finished_at = format_rfc3339(clock_());
    persist_job_locked(record);
    remove_queue_entry_locked(job_id);
    queue_.erase(job_id);
    return record;
}

JobRecord Orchestrator::job_status(const std::string& job_id,
                                   const std::string& principal) const
{
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) throw Error(Errc::NotFound, job_id);
    if (it->second.spec.submitter != principal)
        throw Error(Errc::Unauthorized, "job belongs to another principal");
    return it->second;
}

void Orchestrator::tick()
{
    std::lock_guard<std::mutex> lock(mutex_);
    sweep_expired_locked(to_unix_seconds(clock_()));
}

size_t Orchestrator::queue_depth() const
{
    std::lock_guard<std::mutex> lock(mutex_);
    return queue_.size();
}

void Orchestrator::persist_job_locked(const JobRecord& record)
{
    write_file_atomic(
        (fs::path(state_dir_) / "jobs" / (record.job_id + ".json")).string(),
        canonical_serialize(record.to_json()));
}

void Orchestrator::persist_queue_entry_locked(const QueueEntry& entry)
{
    write_file_atomic(
        (fs::path(state_dir_) / "queue" / (entry.job_id + ".json")).string(),
        canonical_serialize(entry.to_json()));
}

void Orchestrator::remove_queue_entry_locked(const std::string& job_id)
{
    std::error_code ec;
    fs::remove(fs::path(state_dir_) / "queue" / (job_id + ".json"), ec);
}

void Orchestrator::load_state()
{
    for (const auto& dir_entry :
         fs::directory_iterator(fs::path(state_dir_) / "jobs")) {
        if (dir_entry.path().extension() != ".json") continue;
        JobRecord record =
            JobRecord::from_json(canonical_parse(read_file(dir_entry.path())));
        jobs_[record.job_id] = std::move(record);
    }
    for (const auto& dir_entry :
         fs::directory_iterator(fs::path(state_dir_) / "queue")) {
        if (dir_entry.path().extension() != ".json") continue;
        QueueEntry entry =
            QueueEntry::from_json(canonical_parse(read_file(dir_entry.path())));
        if (!jobs_.count(entry.job_id)) continue;  // orphaned entry
        queue_[entry.job_id] = std::move(entry);
    }
}

}  // namespace aibomgen
