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

#include "aibomgen/types.hpp"

#include <cmath>

#include "aibomgen/errors.hpp"

namespace aibomgen {

namespace {

[[noreturn]] void malformed(const std::string& what)
{
    throw Error(Errc::MalformedDocument, what);
}

const Json& field(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        malformed(std::string("missing field: ") + key);
    return j[key];
}

std::string str_field(const Json& j, const char* key)
{
    const Json& v = field(j, key);
    if (!v.is_string()) malformed(std::string("field not a string: ") + key);
    return v.get<std::string>();
}

uint64_t uint_field(const Json& j, const char* key)
{
    const Json& v = field(j, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0))
        malformed(std::string("field not a non-negative integer: ") + key);
    return v.get<uint64_t>();
}

double decimal_field(const Json& j, const char* key)
{
    // Reals are carried as decimal strings (see double_to_string).
    const Json& v = field(j, key);
    if (!v.is_string()) malformed(std::string("field not a decimal string: ") + key);
    auto d = string_to_double(v.get<std::string>());
    if (!d || !std::isfinite(*d))
        malformed(std::string("field not a finite decimal: ") + key);
    return *d;
}

}  // namespace

Json ArtifactRef::to_json() const
{
    return Json{{"name", name},
                {"digest", digest.to_json()},
                {"size_bytes", size_bytes},
                {"media_type", media_type}};
}

ArtifactRef ArtifactRef::from_json(const Json& j)
{
    ArtifactRef ref;
    ref.name = str_field(j, "name");
    ref.digest = Digest::from_json(field(j, "digest"));
    ref.size_bytes = uint_field(j, "size_bytes");
    ref.media_type = str_field(j, "media_type");
    auto bad = ref.validate();
    if (!bad.empty()) malformed("invalid artifact ref: " + bad.front());
    return ref;
}

std::vector<std::string> ArtifactRef::validate() const
{
    std::vector<std::string> bad;
    if (!valid_artifact_name(name)) bad.push_back("name");
    if (!digest.valid()) bad.push_back("digest");
    if (media_type.empty()) bad.push_back("media_type");
    return bad;
}

const char* task_kind_name(TaskKind t)
{
    return t == TaskKind::Regression ? "regression" : "classification";
}

std::optional<TaskKind> task_kind_from_name(std::string_view name)
{
    if (name == "regression") return TaskKind::Regression;
    if (name == "classification") return TaskKind::Classification;
    return std::nullopt;
}

Json TrainingConfig::to_json() const
{
    return Json{{"epochs", epochs},
                {"batch_size", batch_size},
                {"learning_rate", double_to_string(learning_rate)},
                {"task", task_kind_name(task)},
                {"seed", seed},
                {"framework_tag", framework_tag}};
}

TrainingConfig TrainingConfig::from_json(const Json& j)
{
    static const char* known[] = {"epochs",        "batch_size", "learning_rate",
                                  "task",          "seed",       "framework_tag"};
    if (!j.is_object()) malformed("config not an object");
    std::vector<std::string> bad;
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) bad.push_back(it.key());
    }
    if (!bad.empty())
        throw Error(Errc::ValidationFailed, "unknown config fields", bad);

    TrainingConfig cfg;
    auto uint_or = [&](const char* key, uint64_t def, uint64_t& out) {
        if (!j.contains(key)) {
            out = def;
            return;
        }
        if (!j[key].is_number_unsigned() &&
            !(j[key].is_number_integer() && j[key].get<int64_t>() >= 0))
            throw Error(Errc::ValidationFailed, "bad field", {key});
        out = j[key].get<uint64_t>();
    };
    uint_or("epochs", 1, cfg.epochs);
    uint_or("batch_size", 32, cfg.batch_size);
    uint_or("seed", 0, cfg.seed);
    if (j.contains("learning_rate")) {
        const Json& lr = j["learning_rate"];
        std::optional<double> v;
        if (lr.is_string())
            v = string_to_double(lr.get<std::string>());
        else if (lr.is_number())
            v = lr.get<double>();
        if (!v || !std::isfinite(*v))
            throw Error(Errc::ValidationFailed, "bad field", {"learning_rate"});
        cfg.learning_rate = *v;
    }
    if (j.contains("task")) {
        auto t = j["task"].is_string()
                     ? task_kind_from_name(j["task"].get<std::string>())
                     : std::nullopt;
        if (!t) throw Error(Errc::ValidationFailed, "bad field", {"task"});
        cfg.task = *t;
    }
    if (j.contains("framework_tag")) {
        if (!j["framework_tag"].is_string())
            throw Error(Errc::ValidationFailed, "bad field", {"framework_tag"});
        cfg.framework_tag = j["framework_tag"].get<std::string>();
    }
    return cfg;
}

std::vector<std::string> TrainingConfig::validate() const
{
    std::vector<std::string> bad;
    // epochs == 0 is permitted (identity runs); negative values never parse.
    if (batch_size < 1) bad.push_back("batch_size");
    if (!(learning_rate > 0) || !std::isfinite(learning_rate))
        bad.push_back("learning_rate");
    if (framework_tag != "reftrainer/1") bad.push_back("framework_tag");
    return bad;
}

Json JobSpec::to_json() const
{
    Json j{{"dataset", dataset.to_json()},
           {"config", config.to_json()},
           {"submitter", submitter}};
    if (base_model) j["base_model"] = base_model->to_json();
    return j;
}

JobSpec JobSpec::from_json(const Json& j)
{
    JobSpec spec;
    spec.dataset = ArtifactRef::from_json(field(j, "dataset"));
    spec.config = TrainingConfig::from_json(field(j, "config"));
    spec.submitter = str_field(j, "submitter");
    if (j.contains("base_model") && !j["base_model"].is_null())
        spec.base_model = ArtifactRef::from_json(j["base_model"]);
    return spec;
}

const char* job_state_name(JobState s)
{
    switch (s) {
        case JobState::Submitted: return "SUBMITTED";
        case JobState::Running: return "RUNNING";
        case JobState::Completed: return "COMPLETED";
        case JobState::Failed: return "FAILED";
    }
    return "UNKNOWN";
}

std::optional<JobState> job_state_from_name(std::string_view name)
{
    if (name == "SUBMITTED") return JobState::Submitted;
    if (name == "RUNNING") return JobState::Running;
    if (name == "COMPLETED") return JobState::Completed;
    if (name == "FAILED") return JobState::Failed;
    return std::nullopt;
}

bool legal_transition(JobState from, JobState to)
{
    if (from == JobState::Submitted)
        return to == JobState::Running || to == JobState::Failed;
    if (from == JobState::Running)
        return to == JobState::Completed || to == JobState::Failed;
    return false;
}

Json JobRecord::to_json() const
{
    Json j{{"job_id", job_id},
           {"spec", spec.to_json()},
           {"state", job_state_name(state)},
           {"created_at", created_at}};
    if (started_at) j["started_at"] = *started_at;
    if (finished_at) j["finished_at"] = *finished_at;
    Json outs = Json::array();
    for (const auto& ref : outputs) outs.push_back(ref.to_json());
    j["outputs"] = outs;
    if (failure_reason) j["failure_reason"] = *failure_reason;
    return j;
}

JobRecord JobRecord::from_json(const Json& j)
{
    JobRecord rec;
    rec.job_id = str_field(j, "job_id");
    rec.spec = JobSpec::from_json(field(j, "spec"));
    auto st = job_state_from_name(str_field(j, "state"));
    if (!st) malformed("unknown job state");
    rec.state = *st;
    rec.created_at = str_field(j, "created_at");
    if (j.contains("started_at")) rec.started_at = str_field(j, "started_at");
    if (j.contains("finished_at")) rec.finished_at = str_field(j, "finished_at");
    if (j.contains("outputs")) {
        if (!j["outputs"].is_array()) malformed("outputs not a list");
        for (const auto& o : j["outputs"])
            rec.outputs.push_back(ArtifactRef::from_json(o));
    }
    if (j.contains("failure_reason"))
        rec.failure_reason = str_field(j, "failure_reason");
    return rec;
}

Json EnvironmentSnapshot::to_json() const
{
    Json j{{"worker_image_digest", worker_image_digest.to_json()},
           {"platform_version", platform_version},
           {"hostname", hostname},
           {"cpu_model", cpu_model},
           {"total_memory_bytes", total_memory_bytes},
           {"wall_clock_start", wall_clock_start},
           {"wall_clock_end", wall_clock_end}};
    if (scanner_report_ref) j["scanner_report_ref"] = scanner_report_ref->to_json();
    return j;
}

EnvironmentSnapshot EnvironmentSnapshot::from_json(const Json& j)
{
    EnvironmentSnapshot env;
    env.worker_image_digest = Digest::from_json(field(j, "worker_image_digest"));
    env.platform_version = str_field(j, "platform_version");
    env.hostname = str_field(j, "hostname");
    env.cpu_model = str_field(j, "cpu_model");
    env.total_memory_bytes = uint_field(j, "total_memory_bytes");
    env.wall_clock_start = str_field(j, "wall_clock_start");
    env.wall_clock_end = str_field(j, "wall_clock_end");
    auto start = parse_rfc3339(env.wall_clock_start);
    auto end = parse_rfc3339(env.wall_clock_end);
    if (!start || !end || *end < *start) malformed("wall clock range");
    if (j.contains("scanner_report_ref"))
        env.scanner_report_ref = ArtifactRef::from_json(j["scanner_report_ref"]);
    return env;
}

Json TrainingMetrics::artifact_json() const
{
    Json losses = Json::array();
    for (double v : loss_per_epoch) losses.push_back(double_to_string(v));
    return Json{{"final_loss", double_to_string(final_loss)},
                {"loss_per_epoch", losses},
                {"duration_seconds", double_to_string(duration_seconds)}};
}

TrainingMetrics TrainingMetrics::from_artifact_json(const Json& j)
{
    TrainingMetrics m;
    m.final_loss = decimal_field(j, "final_loss");
    m.duration_seconds = decimal_field(j, "duration_seconds");
    if (m.duration_seconds < 0) malformed("negative duration");
    const Json& losses = field(j, "loss_per_epoch");
    if (!losses.is_array()) malformed("loss_per_epoch not a list");
    for (const auto& v : losses) {
        if (!v.is_string()) malformed("loss entry not a decimal string");
        auto d = string_to_double(v.get<std::string>());
        if (!d) malformed("loss entry not a decimal string");
        m.loss_per_epoch.push_back(*d);
    }
    return m;
}

Json TrainingMetrics::to_json() const
{
    Json j = artifact_json();
    j["aibom_generation_seconds"] = double_to_string(aibom_generation_seconds);
    return j;
}

TrainingMetrics TrainingMetrics::from_json(const Json& j)
{
    TrainingMetrics m = from_artifact_json(j);
    m.aibom_generation_seconds = decimal_field(j, "aibom_generation_seconds");
    return m;
}

std::string model_object_name() { return "model.bin"; }
std::string metrics_object_name() { return "metrics.json"; }

std::string link_object_name(const std::string& job_id)
{
    return job_id + ".link.json";
}

std::string aibom_object_name(const std::string& job_id)
{
    return job_id + ".aibom.json";
}

}  // namespace aibomgen
