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

#include "aibomgen/worker.hpp"

#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "aibomgen/aibom.hpp"
#include "aibomgen/canonical.hpp"
#include "aibomgen/envelope.hpp"
#include "aibomgen/errors.hpp"
#include "aibomgen/link.hpp"
#include "aibomgen/trainer.hpp"

namespace fs = std::filesystem;

namespace aibomgen {

namespace {

constexpr const char* kPlatformVersion = "aibomgen/0.1.0";

std::string read_cpu_model()
{
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("model name", 0) == 0) {
            size_t colon = line.find(':');
            if (colon != std::string::npos) {
                size_t start = line.find_first_not_of(" \t", colon + 1);
                if (start != std::string::npos) return line.substr(start);
            }
        }
    }
    return "unknown";
}

ObjectKey staged_key(const std::string& ref_name)
{
    size_t slash = ref_name.find('/');
    if (slash == std::string::npos)
        throw Error(Errc::ValidationFailed, "artifact name lacks namespace",
                    {ref_name});
    return ObjectKey{ref_name.substr(0, slash), ref_name.substr(slash + 1)};
}

/// Thrown inside run_job to carry the failing step name.
struct StepFailure {
    std::string step;
    std::string detail;
};

}  // namespace

HostInfo capture_host_info()
{
    HostInfo info;
    info.platform_version = kPlatformVersion;

    char host[256] = {0};
    gethostname(host, sizeof(host) - 1);
    info.hostname = host[0] ? host : "unknown";

    info.cpu_model = read_cpu_model();

    long pages = sysconf(_SC_PHYS_PAGES);
    long page_size = sysconf(_SC_PAGE_SIZE);
    if (pages > 0 && page_size > 0)
        info.total_memory_bytes = uint64_t(pages) * uint64_t(page_size);

    try {
        info.worker_image_digest =
            compute_digest(read_file("/proc/self/exe"));
    } catch (const Error&) {
        info.worker_image_digest = compute_digest(kPlatformVersion);
    }
    return info;
}

Worker::Worker(Orchestrator& orchestrator, Store& store, const KeyPair& key,
               WorkerConfig config, ClockFn clock, const ScanScheduler* scanner)
    : orchestrator_(orchestrator),
      store_(store),
      key_(key),
      config_(std::move(config)),
      clock_(std::move(clock)),
      scanner_(scanner),
      host_(capture_host_info())
{
    orchestrator_.register_worker(config_.worker_id);
}

std::optional<JobOutcome> Worker::poll_once()
{
    auto claimed = orchestrator_.claim_job(config_.worker_id);
    if (!claimed) return std::nullopt;
    return run_job(claimed->first, claimed->second);
}

JobOutcome Worker::run_job(const JobRecord& job, const Lease& lease)
{
    JobOutcome outcome;
    outcome.job_id = job.job_id;

    std::string step = "fetch";
    try {
        // Redelivered attempts may find partial uploads from a dead worker;
        // clear them so fixed output names stay single-writer.
        if (lease.attempt > 1) store_.reset_namespace(job.job_id);

        // (1) fetch inputs and re-verify digests against the job spec
        std::string dataset_bytes;
        std::optional<std::string> base_model_bytes;
        try {
            dataset_bytes = store_.get_object(staged_key(job.spec.dataset.name));
            if (job.spec.base_model)
                base_model_bytes =
                    store_.get_object(staged_key(job.spec.base_model->name));
        } catch (const Error& e) {
            if (e.code() == Errc::IntegrityError)
                throw StepFailure{"InputTamperDetected", e.what()};
            throw;
        }
        if (compute_digest(dataset_bytes).hex != job.spec.dataset.digest.hex)
            throw StepFailure{"InputTamperDetected",
                              "dataset digest does not match job spec"};
        if (base_model_bytes &&
            compute_digest(*base_model_bytes).hex !=
                job.spec.base_model->digest.hex)
            throw StepFailure{"InputTamperDetected",
                              "base model digest does not match job spec"};

        // (2) parse and validate
        step = "parse";
        Dataset dataset = parse_dataset(dataset_bytes);
        std::optional<ModelWeights> warm_start;
        if (base_model_bytes) warm_start = parse_model(*base_model_bytes);

        // (3) environment snapshot (start)
        step = "snapshot";
        EnvironmentSnapshot env;
        env.worker_image_digest = host_.worker_image_digest;
        env.platform_version = host_.platform_version;
        env.hostname = host_.hostname;
        env.cpu_model = host_.cpu_model;
        env.total_memory_bytes = host_.total_memory_bytes;
        env.wall_clock_start = format_rfc3339(clock_());
        if (scanner_) env.scanner_report_ref = scanner_->latest_report_ref();

        // (4) train
        step = "train";
        auto [model, metrics] = train(dataset, job.spec.config, warm_start);

        // (5) serialize model and metrics
        step = "serialize";
        std::string model_bytes = serialize_model(model);
        std::string metrics_bytes = canonical_serialize(metrics.artifact_json());
        std::string log_bytes;
        if (config_.capture_log) {
            log_bytes = "job " + job.job_id + "\nepochs " +
                        std::to_string(job.spec.config.epochs) + "\nfinal_loss " +
                        double_to_string(metrics.final_loss) + "\n";
        }

        // (6) upload model and metrics
        step = "upload";
        ArtifactRef dataset_copy =
            store_.put_object(ObjectKey{job.job_id, "dataset.csv"},
                              dataset_bytes, job.spec.dataset.media_type);
        std::optional<ArtifactRef> base_copy;
        if (base_model_bytes)
            base_copy = store_.put_object(ObjectKey{job.job_id, "base_model.bin"},
                                          *base_model_bytes,
                                          "application/octet-stream");
        ArtifactRef model_ref =
            store_.put_object(ObjectKey{job.job_id, model_object_name()},
                              model_bytes, "application/octet-stream");
        ArtifactRef metrics_ref =
            store_.put_object(ObjectKey{job.job_id, metrics_object_name()},
                              metrics_bytes, "application/json");
        std::optional<ArtifactRef> log_ref;
        if (config_.capture_log)
            log_ref = store_.put_object(ObjectKey{job.job_id, "train.log"},
                                        log_bytes, "text/plain");

        env.wall_clock_end = format_rfc3339(clock_());

        // (7)-(9) hash, attest, sign, upload attestations: the measured
        // attestation overhead window.
        auto aibom_timer_start = std::chrono::steady_clock::now();

        step = "hash";
        std::vector<ArtifactRef> materials;
        {
            ArtifactRef d = dataset_copy;
            d.digest = compute_digest(dataset_bytes);
            materials.push_back(d);
            if (base_copy) {
                ArtifactRef b = *base_copy;
                b.digest = compute_digest(*base_model_bytes);
                materials.push_back(b);
            }
        }
        std::vector<ArtifactRef> products;
        {
            ArtifactRef m = model_ref;
            m.digest = compute_digest(model_bytes);
            products.push_back(m);
            ArtifactRef mt = metrics_ref;
            mt.digest = compute_digest(metrics_bytes);
            products.push_back(mt);
            if (log_ref) {
                ArtifactRef lg = *log_ref;
                lg.digest = compute_digest(log_bytes);
                products.push_back(lg);
            }
        }

        step = "link";
        JobRecord running = job;
        running.state = JobState::Running;
        LinkFile link = create_link(running, env, materials, products);

        step = "sign";
        SignedEnvelope link_envelope =
            sign_envelope(link.to_json(), kLinkPayloadType, key_);
        std::string link_bytes = link_envelope.serialize();

        step = "upload";
        ArtifactRef link_ref = store_.put_object(
            ObjectKey{job.job_id, link_object_name(job.job_id)}, link_bytes,
            "application/json");

        step = "aibom";
        JobRecord pending = running;
        pending.outputs = {model_ref, metrics_ref};
        std::optional<ScanSummary> scan_summary;
        if (scanner_) scan_summary = scanner_->latest_summary();
        Json aibom =
            generate_aibom(pending, link_ref, env, metrics, scan_summary);

        step = "sign";
        Json signed_aibom = embed_signature(aibom, key_);
        std::string aibom_bytes = canonical_serialize(signed_aibom);

        step = "upload";
        ArtifactRef aibom_ref = store_.put_object(
            ObjectKey{job.job_id, aibom_object_name(job.job_id)}, aibom_bytes,
            "application/json");

        metrics.aibom_generation_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          aibom_timer_start)
                .count();

        // (10) report completion with all four output refs
        step = "complete";
        std::vector<ArtifactRef> outputs = {model_ref, metrics_ref, link_ref,
                                            aibom_ref};
        if (log_ref) outputs.push_back(*log_ref);
        orchestrator_.complete_job(job.job_id, lease, outputs);

        outcome.state = JobState::Completed;
        outcome.metrics = metrics;
        persist_timings(store_.root(), outcome);
        return outcome;
    } catch (const StepFailure& failure) {
        outcome.failure_reason = failure.step;
        try {
            orchestrator_.fail_job(job.job_id, lease, failure.step);
        } catch (const Error&) {
            // Lease already lost; redelivery or the sweep settles the job.
        }
        return outcome;
    } catch (const Error&) {
        outcome.failure_reason = step;
        try {
            orchestrator_.fail_job(job.job_id, lease, step);
        } catch (const Error&) {
        }
        return outcome;
    }
}

WorkerPool::WorkerPool(Orchestrator& orchestrator, Store& store,
                       const KeyPair& key, ClockFn clock,
                       const ScanScheduler* scanner)
    : orchestrator_(orchestrator),
      store_(store),
      key_(key),
      clock_(std::move(clock)),
      scanner_(scanner)
{
}

WorkerPool::~WorkerPool() { stop(); }

void WorkerPool::start(size_t workers)
{
    if (running_.exchange(true)) return;
    for (size_t i = 0; i < workers; ++i) {
        threads_.emplace_back([this, i] {
            WorkerConfig config;
            config.worker_id = "worker-" + std::to_string(i);
            Worker worker(orchestrator_, store_, key_, config, clock_, scanner_);
            while (running_) {
                try {
                    if (!worker.poll_once())
                        std::this_thread::sleep_for(
                            std::chrono::milliseconds(25));
                } catch (const Error&) {
                    std::this_thread::sleep_for(std::chrono::milliseconds(100));
                }
            }
        });
    }
}

void WorkerPool::stop()
{
    if (!running_.exchange(false)) return;
    for (auto& t : threads_)
        if (t.joinable()) t.join();
    threads_.clear();
}

std::optional<TrainingMetrics> WorkerPool::job_timings(
    const std::string& job_id) const
{
    std::string path = timings_path(store_.root(), job_id);
    if (!fs::exists(path)) return std::nullopt;
    return TrainingMetrics::from_json(canonical_parse(read_file(path)));
}

std::string timings_path(const std::string& store_root,
                         const std::string& job_id)
{
    return (fs::path(store_root) / "timings" / (job_id + ".json")).string();
}

void persist_timings(const std::string& store_root, const JobOutcome& outcome)
{
    write_file_atomic(timings_path(store_root, outcome.job_id),
                      canonical_serialize(outcome.metrics.to_json()));
}

}  // namespace aibomgen
