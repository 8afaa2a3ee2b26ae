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

#include "aibomgen/tamper.hpp"

#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "aibomgen/aibom.hpp"
#include "aibomgen/canonical.hpp"
#include "aibomgen/envelope.hpp"
#include "aibomgen/errors.hpp"

namespace fs = std::filesystem;

namespace aibomgen {

namespace {

constexpr const char* kSubject = "harness";

const char* kReferenceCsv =
    "x1,x2,y\n"
    "1,0,1\n"
    "2,1,3\n"
    "3,1,4\n"
    "4,2,6\n";

// Mutates one byte in the file; returns the original content for restore.
std::string flip_file_byte(const std::string& path, size_t offset)
{
    std::string original = read_file(path);
    if (original.empty()) throw Error(Errc::HarnessSetupFailed, "empty file");
    std::string mutated = original;
    size_t at = offset % mutated.size();
    mutated[at] = char(uint8_t(mutated[at]) ^ 0x01);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(mutated.data(), std::streamsize(mutated.size()));
    return original;
}

void restore_file(const std::string& path, const std::string& original)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(original.data(), std::streamsize(original.size()));
}

}  // namespace

const char* scenario_name(Scenario s)
{
    switch (s) {
        case Scenario::InputMutate: return "INPUT_MUTATE";
        case Scenario::ArtifactMutate: return "ARTIFACT_MUTATE";
        case Scenario::BomForge: return "BOM_FORGE";
        case Scenario::LinkSwap: return "LINK_SWAP";
        case Scenario::TokenForge: return "TOKEN_FORGE";
        case Scenario::PoisonedValid: return "POISONED_VALID";
        case Scenario::Control: return "CONTROL";
    }
    return "UNKNOWN";
}

TamperHarness::TamperHarness(const std::string& work_dir)
{
    try {
        PlatformConfig config;
        config.data_dir = work_dir;
        config.listen_port = 0;
        platform_ = std::make_unique<Platform>(config);
        port_ = platform_->start_gateway();
        // The gateway built here has an empty token table; engineer-side
        // traffic rides the platform API, HTTP covers the verifier surface.
        primary_ = complete_reference_job(kReferenceCsv);
    } catch (const Error& e) {
        throw Error(Errc::HarnessSetupFailed, e.what());
    }
}

TamperHarness::~TamperHarness()
{
    if (platform_) platform_->stop();
}

TamperHarness::CompletedJob TamperHarness::complete_reference_job(
    const std::string& dataset_csv)
{
    ArtifactRef dataset =
        platform_->stage_artifact(kSubject, "dataset.csv", dataset_csv);
    TrainingConfig config;
    config.epochs = 20;
    config.batch_size = 16;
    config.learning_rate = 0.05;
    config.seed = 7;
    JobRecord record = platform_->submit(kSubject, dataset, config);
    platform_->drain_queue();
    JobRecord finished =
        platform_->orchestrator().job_status(record.job_id, kSubject);
    if (finished.state != JobState::Completed)
        throw Error(Errc::HarnessSetupFailed,
                    "reference job did not complete: " +
                        finished.failure_reason.value_or("unknown"));
    CompletedJob job;
    job.job_id = record.job_id;
    job.link_bytes = platform_->store().get_object(
        ObjectKey{record.job_id, link_object_name(record.job_id)});
    job.aibom_bytes = platform_->store().get_object(
        ObjectKey{record.job_id, aibom_object_name(record.job_id)});
    return job;
}

std::string TamperHarness::object_file(const std::string& job_id,
                                       const std::string& name) const
{
    return platform_->store().object_path(ObjectKey{job_id, name});
}

DetectionResult TamperHarness::run_scenario(Scenario scenario)
{
    DetectionResult result;
    result.scenario = scenario;
    result.detection_expected =
        scenario != Scenario::Control && scenario != Scenario::PoisonedValid;

    httplib::Client client("127.0.0.1", port_);
    client.set_read_timeout(30, 0);

    switch (scenario) {
        case Scenario::InputMutate: {
            // Mutate the staged dataset after submission, before any worker
            // claims the job.
            ArtifactRef dataset =
                platform_->stage_artifact(kSubject, "dataset.csv", kReferenceCsv);
            TrainingConfig config;
            config.epochs = 3;
            config.learning_rate = 0.05;
            JobRecord record = platform_->submit(kSubject, dataset, config);

            size_t slash = dataset.name.find('/');
            std::string staged_path = object_file(dataset.name.substr(0, slash),
                                                  dataset.name.substr(slash + 1));
            flip_file_byte(staged_path, 9);

            platform_->drain_queue();
            JobRecord finished =
                platform_->orchestrator().job_status(record.job_id, kSubject);
            result.detected = finished.state == JobState::Failed &&
                              finished.failure_reason.value_or("") ==
                                  "InputTamperDetected";
            result.details.push_back(
                "job " + record.job_id + " -> " + job_state_name(finished.state) +
                " (" + finished.failure_reason.value_or("-") + ")");
            break;
        }

        case Scenario::ArtifactMutate: {
            // Each stored output in turn; detection must name exactly the
            // mutated artifact.
            struct Target {
                std::string name;
                bool via_storage;  // else via /v1/verify/aibom
            };
            std::vector<Target> targets = {
                {"dataset.csv", true},
                {model_object_name(), true},
                {metrics_object_name(), true},
                {link_object_name(primary_.job_id), false},
                {aibom_object_name(primary_.job_id), false},
            };
            result.detected = true;
            for (const auto& target : targets) {
                std::string path = object_file(primary_.job_id, target.name);
                std::string original = flip_file_byte(path, 25);
                bool hit = false;
                if (target.via_storage) {
                    auto res = client.Post("/v1/verify/storage",
                                           primary_.link_bytes,
                                           "application/json");
                    if (res && res->status == 200) {
                        Json body = canonical_parse(res->body);
                        for (const auto& r : body["results"])
                            if (r["status"] == Json("MISMATCH") &&
                                r["name"] == Json(target.name))
                                hit = true;
                        // No other artifact may be blamed.
                        for (const auto& r : body["results"])
                            if (r["status"] != Json("MATCH") &&
                                r["name"] != Json(target.name))
                                hit = false;
                    }
                } else {
                    std::string aibom_body =
                        target.name == aibom_object_name(primary_.job_id)
                            ? read_file(path)  // verifier downloads the mutated BOM
                            : primary_.aibom_bytes;
                    auto res = client.Post("/v1/verify/aibom", aibom_body,
                                           "application/json");
                    if (res && res->status == 200) {
                        VerificationReport report =
                            VerificationReport::from_json(canonical_parse(res->body));
                        hit = !report.pass;
                    } else if (res && res->status == 400) {
                        hit = true;  // mutation broke the document syntax
                    }
                }
                restore_file(path, original);
                result.detected = result.detected && hit;
                result.details.push_back(target.name +
                                         (hit ? ": detected" : ": MISSED"));
            }
            break;
        }

        case Scenario::BomForge: {
            // Alter a property and re-sign with a key the platform does not
            // hold.
            Json doc = canonical_parse(primary_.aibom_bytes);
            doc.erase("signature");
            for (auto& prop : doc["properties"])
                if (prop["name"] == Json("aibomgen:epochs"))
                    prop["value"] = "99999";
            KeyPair rogue = KeyPair::generate();
            Json forged = embed_signature(doc, rogue);
            auto res = client.Post("/v1/verify/aibom",
                                   canonical_serialize(forged),
                                   "application/json");
            if (res && res->status == 200) {
                VerificationReport report =
                    VerificationReport::from_json(canonical_parse(res->body));
                const CheckResult* sig = report.find("aibom_signature_valid");
                result.detected = sig != nullptr && !sig->passed;
                result.details.push_back(
                    "aibom_signature_valid=" +
                    std::string(sig && sig->passed ? "true" : "false"));
            }
            break;
        }

        case Scenario::LinkSwap: {
            // Replace the stored link with a different, validly signed link
            // from another completed job.
            CompletedJob other = complete_reference_job(
                "a,b,y\n1,1,2\n2,0,2\n3,2,5\n4,1,5\n5,3,8\n");
            std::string path =
                object_file(primary_.job_id, link_object_name(primary_.job_id));
            std::string original = read_file(path);
            {
                std::ofstream out(path, std::ios::binary | std::ios::trunc);
                out.write(other.link_bytes.data(),
                          std::streamsize(other.link_bytes.size()));
            }
            auto res = client.Post("/v1/verify/aibom", primary_.aibom_bytes,
                                   "application/json");
            restore_file(path, original);
            if (res && res->status == 200) {
                VerificationReport report =
                    VerificationReport::from_json(canonical_parse(res->body));
                const CheckResult* binding =
                    report.find("link_reference_digest_matches");
                result.detected = binding != nullptr && !binding->passed;
                result.details.push_back(
                    "link_reference_digest_matches=" +
                    std::string(binding && binding->passed ? "true" : "false"));
            }
            break;
        }

        case Scenario::TokenForge: {
            // Structurally valid but random grant tokens must never redeem.
            result.detected = true;
            for (int i = 0; i < 32; ++i) {
                std::string forged = base64url_encode(random_bytes(32));
                std::string url = "/v1/artifacts/" + primary_.job_id + "/" +
                                  model_object_name() +
                                  "?expires=9999999999&token=" + forged;
                auto res = client.Get(url);
                bool refused = res && res->status == 403;
                result.detected = result.detected && refused;
                if (!refused)
                    result.details.push_back("forged token accepted or error");
            }
            result.details.push_back("32/32 forged tokens refused");
            break;
        }

        case Scenario::PoisonedValid: {
            // Well-formed but skewed data completes and verifies: the
            // platform attests integrity, not data quality.
            CompletedJob poisoned = complete_reference_job(
                "x1,x2,y\n1,0,100\n2,1,100\n3,1,100\n4,2,100\n");
            auto res = client.Post("/v1/verify/aibom", poisoned.aibom_bytes,
                                   "application/json");
            if (res && res->status == 200) {
                VerificationReport report =
                    VerificationReport::from_json(canonical_parse(res->body));
                result.detected = !report.pass;
                result.details.push_back(
                    "poisoned-but-valid dataset verifies clean (by design)");
            }
            break;
        }

        case Scenario::Control: {
            // Nothing mutated: all endpoints must pass (zero false positives).
            auto storage_res = client.Post("/v1/verify/storage",
                                           primary_.link_bytes,
                                           "application/json");
            auto aibom_res = client.Post("/v1/verify/aibom", primary_.aibom_bytes,
                                         "application/json");
            auto link_res = client.Post("/v1/verify/link", primary_.link_bytes,
                                        "application/json");
            bool all_pass = false;
            if (storage_res && storage_res->status == 200 && aibom_res &&
                aibom_res->status == 200 && link_res && link_res->status == 200) {
                Json storage_body = canonical_parse(storage_res->body);
                VerificationReport aibom_report =
                    VerificationReport::from_json(canonical_parse(aibom_res->body));
                VerificationReport link_report =
                    VerificationReport::from_json(canonical_parse(link_res->body));
                all_pass = storage_body["all_match"].get<bool>() &&
                           aibom_report.pass && link_report.pass;
            }
            result.detected = !all_pass;  // any failure here is a false positive
            result.details.push_back(all_pass ? "all endpoints pass"
                                              : "false positive observed");
            break;
        }
    }
    return result;
}

std::vector<DetectionResult> TamperHarness::run_all()
{
    std::vector<DetectionResult> results;
    for (Scenario s :
         {Scenario::InputMutate, Scenario::ArtifactMutate, Scenario::BomForge,
          Scenario::LinkSwap, Scenario::TokenForge, Scenario::PoisonedValid,
          Scenario::Control})
        results.push_back(run_scenario(s));
    return results;
}

std::string TamperHarness::format_matrix(
    const std::vector<DetectionResult>& results)
{
    std::ostringstream out;
    out << "scenario            detected expected outcome\n";
    for (const auto& r : results) {
        std::string name = scenario_name(r.scenario);
        name.resize(20, ' ');
        out << name << (r.detected ? "yes      " : "no       ")
            << (r.detection_expected ? "yes      " : "no       ")
            << (r.as_expected() ? "ok" : "FAIL") << "\n";
    }
    return out.str();
}

}  // namespace aibomgen
