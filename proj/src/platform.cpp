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

#include "aibomgen/platform.hpp"

#include <openssl/opensslv.h>

#include <cstdlib>
#include <filesystem>

#include "aibomgen/errors.hpp"

namespace fs = std::filesystem;

namespace aibomgen {

namespace {

std::string env_or(const char* name, const std::string& fallback)
{
    const char* value = std::getenv(name);
    return value && *value ? value : fallback;
}

uint64_t env_uint_or(const char* name, uint64_t fallback)
{
    const char* value = std::getenv(name);
    if (!value || !*value) return fallback;
    return std::stoull(value);
}

/// The platform's own component manifest, the scan target standing in for
/// a container image inventory.
std::vector<ComponentVersion> worker_manifest()
{
    return {{"aibomgen", "0.1.0"},
            {"reftrainer", "1"},
            {"openssl", OPENSSL_VERSION_STR},
            {"nlohmann-json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"cpp-httplib", "0.16.0"}};
}

}  // namespace

PlatformConfig PlatformConfig::from_environment()
{
    return from_environment(PlatformConfig{});
}

PlatformConfig PlatformConfig::from_environment(PlatformConfig defaults)
{
    PlatformConfig cfg = std::move(defaults);
    cfg.data_dir = env_or("AIBOMGEN_DATA_DIR", cfg.data_dir);
    std::string listen = env_or("AIBOMGEN_LISTEN_ADDR", "");
    if (!listen.empty()) {
        size_t colon = listen.rfind(':');
        if (colon != std::string::npos) {
            cfg.listen_addr = listen.substr(0, colon);
            cfg.listen_port = std::stoi(listen.substr(colon + 1));
        } else {
            cfg.listen_addr = listen;
        }
    }
    cfg.signing_key_path = env_or("AIBOMGEN_SIGNING_KEY", cfg.signing_key_path);
    cfg.public_key_path = env_or("AIBOMGEN_PUBLIC_KEY", cfg.public_key_path);
    cfg.tokens_path = env_or("AIBOMGEN_TOKENS_FILE", cfg.tokens_path);
    cfg.advisory_db_path = env_or("AIBOMGEN_ADVISORY_DB", cfg.advisory_db_path);
    cfg.grant_secret = env_or("AIBOMGEN_GRANT_SECRET", cfg.grant_secret);
    cfg.lease_seconds = env_uint_or("AIBOMGEN_LEASE_SECONDS", cfg.lease_seconds);
    cfg.scan_interval_seconds =
        env_uint_or("AIBOMGEN_SCAN_INTERVAL", cfg.scan_interval_seconds);
    cfg.workers = size_t(env_uint_or("AIBOMGEN_WORKERS", cfg.workers));
    return cfg;
}

Platform::Platform(PlatformConfig config, ClockFn clock)
    : config_(std::move(config)), clock_(std::move(clock))
{
    if (config_.data_dir.empty())
        throw Error(Errc::ValidationFailed, "data_dir is required", {"data_dir"});
    fs::create_directories(config_.data_dir);

    if (config_.signing_key_path.empty())
        config_.signing_key_path =
            (fs::path(config_.data_dir) / "keys" / "platform.pem").string();
    if (config_.public_key_path.empty())
        config_.public_key_path =
            (fs::path(config_.data_dir) / "keys" / "platform.pub.pem").string();

    if (fs::exists(config_.signing_key_path) &&
        fs::exists(config_.public_key_path)) {
        key_ = KeyPair::load(config_.signing_key_path, config_.public_key_path);
    } else {
        key_ = KeyPair::generate();
        key_.save(config_.signing_key_path, config_.public_key_path);
    }

    if (config_.grant_secret.empty()) {
        std::string secret_path =
            (fs::path(config_.data_dir) / "state" / "grant.secret").string();
        if (fs::exists(secret_path)) {
            config_.grant_secret = read_file(secret_path);
        } else {
            config_.grant_secret = bytes_to_hex(random_bytes(32));
            write_file_atomic(secret_path, config_.grant_secret);
        }
    }

    store_ = std::make_unique<Store>(config_.data_dir, config_.grant_secret,
                                     clock_);
    orchestrator_ = std::make_unique<Orchestrator>(
        (fs::path(config_.data_dir) / "state").string(), *store_, clock_,
        config_.lease_seconds, config_.max_attempts);

    AdvisoryDb db;
    if (!config_.advisory_db_path.empty())
        db = AdvisoryDb::load(config_.advisory_db_path);
    store_->set_namespace_owner("scans", "platform");
    scanner_ = std::make_unique<ScanScheduler>(*store_, std::move(db),
                                               worker_manifest(), clock_);

    pool_ = std::make_unique<WorkerPool>(*orchestrator_, *store_, key_, clock_,
                                         scanner_.get());

    TokenTable tokens;
    if (!config_.tokens_path.empty()) tokens = TokenTable::load(config_.tokens_path);
    gateway_ = std::make_unique<Gateway>(*store_, *orchestrator_, key_,
                                         std::move(tokens),
                                         config_.grant_ttl_seconds);
}

Platform::~Platform() { stop(); }

void Platform::start_workers()
{
    if (workers_started_) return;
    workers_started_ = true;
    scanner_->start(config_.scan_interval_seconds);
    pool_->start(config_.workers);
}

int Platform::start_gateway()
{
    return gateway_->start(config_.listen_addr, config_.listen_port);
}

void Platform::stop()
{
    if (gateway_) gateway_->stop();
    if (pool_) pool_->stop();
    if (scanner_) scanner_->stop();
    workers_started_ = false;
}

ArtifactRef Platform::stage_artifact(const std::string& subject,
                                     const std::string& filename,
                                     std::string_view bytes,
                                     const std::string& media_type)
{
    std::string ns = "u-" + random_uuid();
    store_->set_namespace_owner(ns, subject);
    ArtifactRef ref = store_->put_object(ObjectKey{ns, filename}, bytes, media_type);
    ref.name = ns + "/" + ref.name;
    return ref;
}

JobRecord Platform::submit(const std::string& subject,
                           const ArtifactRef& dataset,
                           const TrainingConfig& config,
                           const std::optional<ArtifactRef>& base_model)
{
    JobSpec spec;
    spec.dataset = dataset;
    spec.base_model = base_model;
    spec.config = config;
    spec.submitter = subject;
    return orchestrator_->submit_job(spec, subject);
}

std::vector<JobOutcome> Platform::drain_queue()
{
    // Scan once so jobs pick up a report reference even without the
    // background scheduler running.
    if (!scanner_->latest_report_ref()) scanner_->scan_once();
    Worker worker(*orchestrator_, *store_, key_, WorkerConfig{"worker-drain"},
                  clock_, scanner_.get());
    std::vector<JobOutcome> outcomes;
    while (auto outcome = worker.poll_once()) outcomes.push_back(*outcome);
    return outcomes;
}

std::optional<TrainingMetrics> Platform::job_timings(
    const std::string& job_id) const
{
    std::string path = timings_path(store_->root(), job_id);
    if (!fs::exists(path)) return std::nullopt;
    return TrainingMetrics::from_json(canonical_parse(read_file(path)));
}

}  // namespace aibomgen
