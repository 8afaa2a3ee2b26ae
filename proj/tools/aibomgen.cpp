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

#include <CLI11.hpp>
#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "aibomgen/aibom.hpp"
#include "aibomgen/canonical.hpp"
#include "aibomgen/envelope.hpp"
#include "aibomgen/errors.hpp"
#include "aibomgen/link.hpp"
#include "aibomgen/types.hpp"
#include "aibomgen/util.hpp"

namespace fs = std::filesystem;
using namespace aibomgen;

namespace {

// 0 success/verified, 1 verification failed, 2 usage or transport error.
constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsageOrTransport = 2;

struct CliConfig {
    std::string gateway_url;
    std::string token;
    std::string public_key_path;
    bool json = false;
};

std::string default_config_path()
{
    const char* xdg = std::getenv("XDG_CONFIG_HOME");
    if (xdg && *xdg) return std::string(xdg) + "/aibomgen/config.json";
    const char* home = std::getenv("HOME");
    return std::string(home ? home : ".") + "/.config/aibomgen/config.json";
}

void load_config_file(CliConfig& config)
{
    std::string path = default_config_path();
    if (!fs::exists(path)) return;
    try {
        Json doc = canonical_parse(read_file(path));
        if (config.gateway_url.empty() && doc.contains("gateway_url"))
            config.gateway_url = doc["gateway_url"].get<std::string>();
        if (config.token.empty() && doc.contains("token"))
            config.token = doc["token"].get<std::string>();
        if (config.public_key_path.empty() && doc.contains("public_key"))
            config.public_key_path = doc["public_key"].get<std::string>();
    } catch (const Error&) {
        std::cerr << "warning: ignoring malformed config at " << path << "\n";
    }
}

void apply_env(CliConfig& config)
{
    auto env_or = [](const char* name) {
        const char* v = std::getenv(name);
        return std::string(v ? v : "");
    };
    if (config.gateway_url.empty()) config.gateway_url = env_or("AIBOMGEN_GATEWAY_URL");
    if (config.token.empty()) config.token = env_or("AIBOMGEN_TOKEN");
    if (config.public_key_path.empty())
        config.public_key_path = env_or("AIBOMGEN_PUBLIC_KEY");
}

httplib::Client make_client(const CliConfig& config)
{
    if (config.gateway_url.empty())
        throw Error(Errc::ValidationFailed, "gateway URL not configured",
                    {"gateway"});
    httplib::Client client(config.gateway_url);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(120, 0);
    if (!config.token.empty())
        client.set_default_headers(
            {{"Authorization", "Bearer " + config.token}});
    return client;
}

void emit(const CliConfig& config, const Json& machine,
          const std::string& human)
{
    if (config.json)
        std::cout << canonical_serialize(machine) << "\n";
    else
        std::cout << human << "\n";
}

int transport_error(const std::string& what)
{
    std::cerr << "transport error: " << what << "\n";
    return kUsageOrTransport;
}

Json parse_response(const httplib::Result& res)
{
    if (!res) throw Error(Errc::NotFound, "gateway unreachable");
    return canonical_parse(res->body);
}

int report_outcome(const CliConfig& config, const VerificationReport& report)
{
    std::string human = report.pass ? "VERIFIED" : "VERIFICATION FAILED";
    for (const auto& c : report.checks) {
        human += "\n  " + c.name + ": " + (c.passed ? "pass" : "FAIL");
        if (!c.detail.empty()) human += " (" + c.detail + ")";
    }
    emit(config, report.to_json(), human);
    return report.pass ? kOk : kVerifyFailed;
}

int cmd_upload(const CliConfig& config, const std::string& file,
               const std::string& media_type)
{
    std::string bytes = read_file(file);
    auto client = make_client(config);
    httplib::MultipartFormDataItems items = {
        {"file", bytes, fs::path(file).filename().string(),
         media_type.empty() ? "application/octet-stream" : media_type}};
    auto res = client.Post("/v1/artifacts", items);
    if (!res) return transport_error("POST /v1/artifacts");
    Json body = canonical_parse(res->body);
    if (res->status != 201) {
        emit(config, body, "upload rejected: " + res->body);
        return kUsageOrTransport;
    }
    emit(config, body,
         "staged " + body["name"].get<std::string>() + "\n  digest " +
             body["digest"]["hex"].get<std::string>() + "\n  size " +
             std::to_string(body["size_bytes"].get<uint64_t>()) + " bytes");
    return kOk;
}

int cmd_submit(const CliConfig& config, const std::string& dataset,
               uint64_t epochs, uint64_t batch_size, const std::string& lr,
               const std::string& task, uint64_t seed,
               const std::string& base_model)
{
    Json body;
    body["dataset"] = Json{{"name", dataset}};
    Json cfg{{"epochs", epochs},
             {"batch_size", batch_size},
             {"learning_rate", lr},
             {"task", task},
             {"seed", seed}};
    body["config"] = cfg;
    if (!base_model.empty()) body["base_model"] = Json{{"name", base_model}};
    auto client = make_client(config);
    auto res = client.Post("/v1/jobs", canonical_serialize(body),
                           "application/json");
    if (!res) return transport_error("POST /v1/jobs");
    Json reply = canonical_parse(res->body);
    if (res->status != 201) {
        emit(config, reply, "submit rejected: " + res->body);
        return kUsageOrTransport;
    }
    emit(config, reply,
         "job " + reply["job_id"].get<std::string>() + " " +
             reply["state"].get<std::string>());
    return kOk;
}

int cmd_status(const CliConfig& config, const std::string& job_id)
{
    auto client = make_client(config);
    auto res = client.Get("/v1/jobs/" + job_id);
    if (!res) return transport_error("GET /v1/jobs/" + job_id);
    Json reply = canonical_parse(res->body);
    if (res->status != 200) {
        emit(config, reply, "status failed: " + res->body);
        return kUsageOrTransport;
    }
    std::string human = "job " + job_id + " " + reply["state"].get<std::string>();
    if (reply.contains("failure_reason"))
        human += " (" + reply["failure_reason"].get<std::string>() + ")";
    emit(config, reply, human);
    return kOk;
}

int cmd_fetch(const CliConfig& config, const std::string& job_id,
              const std::string& out_dir)
{
    auto client = make_client(config);
    auto res = client.Get("/v1/jobs/" + job_id + "/artifacts");
    if (!res) return transport_error("GET /v1/jobs/{id}/artifacts");
    if (res->status != 200) {
        emit(config, canonical_parse(res->body), "fetch failed: " + res->body);
        return kUsageOrTransport;
    }
    Json reply = canonical_parse(res->body);
    fs::create_directories(out_dir);
    Json fetched = Json::array();
    for (const auto& item : reply["artifacts"]) {
        std::string url = item["url"].get<std::string>();
        std::string name = item["ref"]["name"].get<std::string>();
        auto file_res = client.Get(url);
        if (!file_res || file_res->status != 200)
            return transport_error("download " + name);
        std::string expected = item["ref"]["digest"]["hex"].get<std::string>();
        if (compute_digest(file_res->body).hex != expected) {
            std::cerr << "digest mismatch on downloaded " << name << "\n";
            return kVerifyFailed;
        }
        write_file_atomic((fs::path(out_dir) / name).string(), file_res->body);
        fetched.push_back(name);
    }
    emit(config, Json{{"fetched", fetched}, {"out", out_dir}},
         "fetched " + std::to_string(fetched.size()) + " artifacts to " + out_dir);
    return kOk;
}

int cmd_keys_fetch(const CliConfig& config, const std::string& out)
{
    auto client = make_client(config);
    auto res = client.Get("/v1/keys/public");
    if (!res || res->status != 200) return transport_error("GET /v1/keys/public");
    write_file_atomic(out, res->body);
    KeyPair key = KeyPair::from_public_pem(res->body);
    emit(config, Json{{"path", out}, {"key_id", key.key_id()}},
         "saved platform public key to " + out + "\n  key id " + key.key_id());
    return kOk;
}

int cmd_verify_link(const CliConfig& config, const std::string& file)
{
    std::string bytes = read_file(file);
    if (!config.public_key_path.empty()) {
        // Offline path: no network involved.
        KeyPair key = KeyPair::from_public_pem(read_file(config.public_key_path));
        SignedEnvelope envelope = SignedEnvelope::parse(bytes);
        return report_outcome(config, verify_envelope(envelope, key));
    }
    auto client = make_client(config);
    auto res = client.Post("/v1/verify/link", bytes, "application/json");
    if (!res) return transport_error("POST /v1/verify/link");
    if (res->status != 200) {
        emit(config, parse_response(res), "verify rejected: " + res->body);
        return kUsageOrTransport;
    }
    return report_outcome(config,
                          VerificationReport::from_json(parse_response(res)));
}

int cmd_verify_aibom(const CliConfig& config, const std::string& file,
                     const std::string& link_file)
{
    std::string bytes = read_file(file);
    if (!config.public_key_path.empty() && !link_file.empty()) {
        // Offline path with a locally supplied link envelope.
        KeyPair key = KeyPair::from_public_pem(read_file(config.public_key_path));
        Json doc = canonical_parse(bytes);
        return report_outcome(config,
                              verify_aibom(doc, key, read_file(link_file)));
    }
    auto client = make_client(config);
    auto res = client.Post("/v1/verify/aibom", bytes, "application/json");
    if (!res) return transport_error("POST /v1/verify/aibom");
    if (res->status != 200) {
        emit(config, parse_response(res), "verify rejected: " + res->body);
        return kUsageOrTransport;
    }
    return report_outcome(config,
                          VerificationReport::from_json(parse_response(res)));
}

int cmd_verify_hash(const CliConfig& config, const std::string& link_file,
                    const std::string& artifact_file, const std::string& name)
{
    // Fully local: every input is a file. When a public key is configured
    // the envelope signature is checked as well.
    std::string link_bytes = read_file(link_file);
    SignedEnvelope envelope = SignedEnvelope::parse(link_bytes);
    bool envelope_ok = true;
    if (!config.public_key_path.empty()) {
        KeyPair key = KeyPair::from_public_pem(read_file(config.public_key_path));
        envelope_ok = verify_envelope(envelope, key).pass;
    }
    LinkFile link = LinkFile::from_json(canonical_parse(envelope.payload));
    MatchResult result =
        verify_artifact_against_link(link, name, read_file(artifact_file));

    Json machine = result.to_json();
    machine["envelope_verified"] = envelope_ok;
    std::string human = std::string(match_status_name(result.status)) + " " + name;
    if (result.status == MatchStatus::Mismatch)
        human += "\n  expected " + result.expected->hex + "\n  actual   " +
                 result.actual->hex;
    if (!envelope_ok) human += "\n  link envelope signature INVALID";
    emit(config, machine, human);
    return (result.status == MatchStatus::Match && envelope_ok) ? kOk
                                                                : kVerifyFailed;
}

int cmd_verify_storage(const CliConfig& config, const std::string& link_file)
{
    auto client = make_client(config);
    auto res = client.Post("/v1/verify/storage", read_file(link_file),
                           "application/json");
    if (!res) return transport_error("POST /v1/verify/storage");
    Json reply = parse_response(res);
    if (res->status != 200) {
        emit(config, reply, "verify rejected: " + res->body);
        return kUsageOrTransport;
    }
    bool all_match = reply["all_match"].get<bool>();
    std::string human = all_match ? "ALL ARTIFACTS MATCH" : "MISMATCH DETECTED";
    for (const auto& r : reply["results"])
        human += "\n  " + r["name"].get<std::string>() + ": " +
                 r["status"].get<std::string>();
    emit(config, reply, human);
    return all_match ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"aibomgen client: submit verifiable training jobs and verify "
                 "their attestations"};
    app.require_subcommand(1);

    CliConfig config;
    app.add_option("--gateway", config.gateway_url,
                   "Gateway base URL (env AIBOMGEN_GATEWAY_URL)");
    app.add_option("--token", config.token,
                   "Bearer token (env AIBOMGEN_TOKEN)");
    app.add_option("--key", config.public_key_path,
                   "Platform public key PEM for offline verification "
                   "(env AIBOMGEN_PUBLIC_KEY)");
    app.add_flag("--json", config.json, "Machine-readable canonical JSON output");

    // upload
    std::string upload_file, upload_media;
    auto* upload = app.add_subcommand("upload", "Stage a dataset or base model");
    upload->add_option("file", upload_file, "File to upload")->required();
    upload->add_option("--media-type", upload_media, "MIME type");

    // submit
    std::string submit_dataset, submit_lr = "0.01", submit_task = "regression",
                submit_base;
    uint64_t submit_epochs = 1, submit_batch = 32, submit_seed = 0;
    auto* submit = app.add_subcommand("submit", "Submit a training job");
    submit->add_option("--dataset", submit_dataset,
                       "Staged dataset reference (from upload)")
        ->required();
    submit->add_option("--epochs", submit_epochs, "Training epochs");
    submit->add_option("--batch-size", submit_batch, "Batch size");
    submit->add_option("--lr", submit_lr, "Learning rate");
    submit->add_option("--task", submit_task, "regression or classification");
    submit->add_option("--seed", submit_seed, "Shuffle seed");
    submit->add_option("--base-model", submit_base, "Staged base model reference");

    // status / fetch
    std::string status_job;
    auto* status = app.add_subcommand("status", "Job status");
    status->add_option("job_id", status_job)->required();

    std::string fetch_job, fetch_out = ".";
    auto* fetch = app.add_subcommand("fetch", "Download job outputs");
    fetch->add_option("job_id", fetch_job)->required();
    fetch->add_option("--out", fetch_out, "Output directory");

    // keys
    auto* keys = app.add_subcommand("keys", "Key distribution");
    std::string keys_out = "platform.pub.pem";
    auto* keys_fetch = keys->add_subcommand("fetch", "Fetch the platform public key");
    keys_fetch->add_option("--out", keys_out, "Output PEM path");

    // verify
    auto* verify = app.add_subcommand("verify", "Verification commands");
    verify->require_subcommand(1);

    std::string v_aibom_file, v_aibom_link;
    auto* v_aibom = verify->add_subcommand("aibom", "Verify an AIBOM document");
    v_aibom->add_option("file", v_aibom_file)->required();
    v_aibom->add_option("--link", v_aibom_link,
                        "Local link envelope for offline verification");

    std::string v_link_file;
    auto* v_link = verify->add_subcommand("link", "Verify a link envelope");
    v_link->add_option("file", v_link_file)->required();

    std::string v_hash_link, v_hash_artifact, v_hash_name;
    auto* v_hash = verify->add_subcommand(
        "hash", "Compare an artifact's hash against a link file");
    v_hash->add_option("--link", v_hash_link)->required();
    v_hash->add_option("--artifact", v_hash_artifact)->required();
    v_hash->add_option("--name", v_hash_name)->required();

    std::string v_storage_link;
    auto* v_storage = verify->add_subcommand(
        "storage", "Verify all artifacts a link references in storage");
    v_storage->add_option("--link", v_storage_link)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageOrTransport;
    }

    load_config_file(config);
    apply_env(config);

    try {
        if (*upload) return cmd_upload(config, upload_file, upload_media);
        if (*submit)
            return cmd_submit(config, submit_dataset, submit_epochs,
                              submit_batch, submit_lr, submit_task, submit_seed,
                              submit_base);
        if (*status) return cmd_status(config, status_job);
        if (*fetch) return cmd_fetch(config, fetch_job, fetch_out);
        if (*keys_fetch) return cmd_keys_fetch(config, keys_out);
        if (*v_aibom) return cmd_verify_aibom(config, v_aibom_file, v_aibom_link);
        if (*v_link) return cmd_verify_link(config, v_link_file);
        if (*v_hash)
            return cmd_verify_hash(config, v_hash_link, v_hash_artifact,
                                   v_hash_name);
        if (*v_storage) return cmd_verify_storage(config, v_storage_link);
        std::cerr << "no command selected\n";
        return kUsageOrTransport;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageOrTransport;
    }
}
