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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aibomgen/digest.hpp"
#include "aibomgen/util.hpp"

namespace aibomgen {

/// A stored artifact: path-like name plus content digest.
struct ArtifactRef {
    std::string name;
    Digest digest;
    uint64_t size_bytes = 0;
    std::string media_type = "application/octet-stream";

    bool operator==(const ArtifactRef&) const = default;

    Json to_json() const;
    static ArtifactRef from_json(const Json& j);
    /// Empty list when valid; otherwise the offending field names.
    std::vector<std::string> validate() const;
};

enum class TaskKind { Regression, Classification };

const char* task_kind_name(TaskKind t);
std::optional<TaskKind> task_kind_from_name(std::string_view name);

struct TrainingConfig {
    uint64_t epochs = 1;
    uint64_t batch_size = 32;
    double learning_rate = 0.01;
    TaskKind task = TaskKind::Regression;
    uint64_t seed = 0;
    std::string framework_tag = "reftrainer/1";

    Json to_json() const;
    static TrainingConfig from_json(const Json& j);
    std::vector<std::string> validate() const;
};

struct JobSpec {
    ArtifactRef dataset;
    std::optional<ArtifactRef> base_model;
    TrainingConfig config;
    std::string submitter;

    Json to_json() const;
    static JobSpec from_json(const Json& j);
};

enum class JobState { Submitted, Running, Completed, Failed };

const char* job_state_name(JobState s);
std::optional<JobState> job_state_from_name(std::string_view name);

/// Legal transitions: SUBMITTED→RUNNING→{COMPLETED, FAILED}, plus
/// SUBMITTED→FAILED for jobs that exhaust delivery before ever running.
bool legal_transition(JobState from, JobState to);

struct JobRecord {
    std::string job_id;
    JobSpec spec;
    JobState state = JobState::Submitted;
    std::string created_at;
    std::optional<std::string> started_at;
    std::optional<std::string> finished_at;
    std::vector<ArtifactRef> outputs;
    std::optional<std::string> failure_reason;

    Json to_json() const;
    static JobRecord from_json(const Json& j);
};

struct EnvironmentSnapshot {
    Digest worker_image_digest;
    std::string platform_version;
    std::string hostname;
    std::string cpu_model;
    uint64_t total_memory_bytes = 0;
    std::string wall_clock_start;
    std::string wall_clock_end;
    std::optional<ArtifactRef> scanner_report_ref;

    Json to_json() const;
    static EnvironmentSnapshot from_json(const Json& j);
};

struct TrainingMetrics {
    double final_loss = 0;
    std::vector<double> loss_per_epoch;
    double duration_seconds = 0;
    double aibom_generation_seconds = 0;

    /// Serialization of the attested metrics.json artifact. Reals render as
    /// decimal strings. aibom_generation_seconds is excluded: it is measured
    /// after this artifact has been hashed into the attestation.
    Json artifact_json() const;
    static TrainingMetrics from_artifact_json(const Json& j);

    /// Full record including aibom_generation_seconds (timing sidecar).
    Json to_json() const;
    static TrainingMetrics from_json(const Json& j);
};

/// Fixed output object names every completed job must carry.
std::string model_object_name();
std::string metrics_object_name();
std::string link_object_name(const std::string& job_id);
std::string aibom_object_name(const std::string& job_id);

}  // namespace aibomgen
