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

#include "aibomgen/gateway.hpp"

#include <httplib.h>

#include <charconv>

#include "aibomgen/aibom.hpp"
#include "aibomgen/canonical.hpp"
#include "aibomgen/envelope.hpp"
#include "aibomgen/errors.hpp"
#include "aibomgen/link.hpp"

namespace aibomgen {

namespace {

int status_for(const Error& e)
{
    switch (e.code()) {
        case Errc::ValidationFailed:
        case Errc::MalformedCsv: return 422;
        case Errc::Unauthorized:
        case Errc::NotOwner:
        case Errc::InvalidToken:
        case Errc::GrantExpired: return 403;
        case Errc::NotFound: return 404;
        case Errc::MalformedDocument: return 400;
        case Errc::ImmutabilityViolation: return 409;
        default: return 500;
    }
}

void reply_json(httplib::Response& res, int status, const Json& body)
{
    res.status = status;
    res.set_content(canonical_serialize(body), "application/json");
}

void reply_error(httplib::Response& res, const Error& e)
{
    Json body{{"error", errc_name(e.code())}, {"message", e.what()}};
    if (!e.fields().empty()) {
        Json fields = Json::array();
        for (const auto& f : e.fields()) fields.push_back(f);
        body["fields"] = fields;
    }
    reply_json(res, status_for(e), body);
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        reply_error(res, e);
    } catch (const std::exception& e) {
        reply_json(res, 500, Json{{"error", "Internal"}, {"message", e.what()}});
    }
}

std::string sanitize_filename(const std::string& filename)
{
    std::string name;
    for (char c : filename) {
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
            (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_')
            name += c;
    }
    while (!name.empty() && name.front() == '.') name.erase(name.begin());
    return name.empty() ? "artifact.bin" : name;
}

}  // namespace

TokenTable TokenTable::from_json(const Json& j)
{
    if (!j.is_object())
        throw Error(Errc::MalformedDocument, "token table must be an object");
    TokenTable table;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string())
            throw Error(Errc::MalformedDocument, "token subject must be a string");
        table.add(it.key(), it.value().get<std::string>());
    }
    return table;
}

TokenTable TokenTable::load(const std::string& path)
{
    return from_json(canonical_parse(read_file(path)));
}

void TokenTable::add(const std::string& token, const std::string& subject)
{
    tokens_[token] = subject;
}

std::optional<Principal> TokenTable::authenticate(const std::string& token) const
{
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return std::nullopt;
    return Principal{token, it->second};
}

Gateway::Gateway(Store& store, Orchestrator& orchestrator, const KeyPair& key,
                 TokenTable tokens, uint64_t grant_ttl_seconds)
    : store_(store),
      orchestrator_(orchestrator),
      key_(key),
      tokens_(std::move(tokens)),
      grant_ttl_seconds_(grant_ttl_seconds),
      server_(std::make_unique<httplib::Server>())
{
    server_->set_payload_max_length(size_t(512) * 1024 * 1024);
    install_routes();
}

Gateway::~Gateway() { stop(); }

int Gateway::start(const std::string& addr, int port)
{
    if (port == 0) {
        port_ = server_->bind_to_any_port(addr);
    } else {
        if (!server_->bind_to_port(addr, port))
            throw Error(Errc::StorageFull, "cannot bind " + addr + ":" +
                                               std::to_string(port));
        port_ = port;
    }
    serve_thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

void Gateway::stop()
{
    if (server_ && server_->is_running()) server_->stop();
    if (serve_thread_.joinable()) serve_thread_.join();
}

std::optional<Principal> Gateway::authenticate(
    const std::string& auth_header) const
{
    const std::string prefix = "Bearer ";
    if (auth_header.rfind(prefix, 0) != 0) return std::nullopt;
    return tokens_.authenticate(auth_header.substr(prefix.size()));
}

VerificationReport Gateway::verify_link_bytes(
    std::string_view envelope_bytes) const
{
    SignedEnvelope envelope = SignedEnvelope::parse(envelope_bytes);
    return verify_envelope(envelope, key_);
}

VerificationReport Gateway::verify_aibom_bytes(
    std::string_view aibom_bytes) const
{
    Json doc = canonical_parse(aibom_bytes);
    auto link_ref = aibom_link_reference(doc);
    std::string link_bytes;
    std::string job_id;
    if (link_ref) {
        const std::string suffix = ".link.json";
        if (link_ref->name.size() > suffix.size() &&
            link_ref->name.compare(link_ref->name.size() - suffix.size(),
                                   suffix.size(), suffix) == 0)
            job_id = link_ref->name.substr(0, link_ref->name.size() - suffix.size());
        if (!job_id.empty()) {
            auto raw = store_.read_raw(ObjectKey{job_id, link_ref->name});
            if (raw) link_bytes = *raw;
        }
    }
    ArtifactResolver resolver = [this, &job_id](const std::string& name)
        -> std::optional<std::string> {
        if (job_id.empty()) return std::nullopt;
        return store_.read_raw(ObjectKey{job_id, name});
    };
    return verify_aibom(doc, key_, link_bytes, resolver);
}

std::vector<MatchResult> Gateway::verify_storage_bytes(
    std::string_view envelope_bytes) const
{
    SignedEnvelope envelope = SignedEnvelope::parse(envelope_bytes);
    VerificationReport envelope_report = verify_envelope(envelope, key_);
    if (!envelope_report.pass)
        throw Error(Errc::ValidationFailed, "link envelope does not verify",
                    {"link"});
    LinkFile link = LinkFile::from_json(canonical_parse(envelope.payload));
    std::string job_id = link.job_id_from_command();
    if (job_id.empty())
        throw Error(Errc::ValidationFailed, "link does not name a job", {"link"});

    std::vector<MatchResult> results;
    auto check_side = [&](const std::map<std::string, Digest>& side) {
        for (const auto& [name, digest] : side) {
            MatchResult result;
            result.name = name;
            result.expected = digest;
            auto bytes = store_.read_raw(ObjectKey{job_id, name});
            if (!bytes) {
                result.status = MatchStatus::UnknownName;
            } else {
                Digest actual = compute_digest(*bytes);
                result.actual = actual;
                result.status = actual == digest ? MatchStatus::Match
                                                 : MatchStatus::Mismatch;
            }
            results.push_back(std::move(result));
        }
    };
    check_side(link.materials);
    check_side(link.products);
    return results;
}

void Gateway::install_routes()
{
    auto& svr = *server_;

    // --- engineer surface (authenticated) ---

    svr.Post("/v1/artifacts", [this](const httplib::Request& req,
                                     httplib::Response& res) {
        guarded(res, [&] {
            auto principal = authenticate(req.get_header_value("Authorization"));
            if (!principal) {
                reply_json(res, 401, Json{{"error", "Unauthorized"},
                                          {"message", "missing or invalid token"}});
                return;
            }
            if (!req.has_file("file")) {
                reply_json(res, 400, Json{{"error", "MalformedDocument"},
                                          {"message", "multipart field 'file' required"}});
                return;
            }
            const auto& file = req.get_file_value("file");
            std::string media_type = file.content_type.empty()
                                         ? "application/octet-stream"
                                         : file.content_type;
            if (req.has_file("media_type"))
                media_type = req.get_file_value("media_type").content;

            std::string ns = "u-" + random_uuid();
            std::string name = sanitize_filename(file.filename);
            store_.set_namespace_owner(ns, principal->subject);
            ArtifactRef ref =
                store_.put_object(ObjectKey{ns, name}, file.content, media_type);
            ref.name = ns + "/" + ref.name;
            reply_json(res, 201, ref.to_json());
        });
    });

    svr.Post("/v1/jobs", [this](const httplib::Request& req,
                                httplib::Response& res) {
        guarded(res, [&] {
            auto principal = authenticate(req.get_header_value("Authorization"));
            if (!principal) {
                reply_json(res, 401, Json{{"error", "Unauthorized"},
                                          {"message", "missing or invalid token"}});
                return;
            }
            Json body = canonical_parse(req.body);
            if (!body.is_object() || !body.contains("dataset") ||
                !body.contains("config"))
                throw Error(Errc::ValidationFailed, "dataset and config required",
                            {"dataset", "config"});
            for (auto it = body.begin(); it != body.end(); ++it)
                if (it.key() != "dataset" && it.key() != "config" &&
                    it.key() != "base_model")
                    throw Error(Errc::ValidationFailed, "unknown field",
                                {it.key()});

            JobSpec spec;
            spec.submitter = principal->subject;
            // A name-only reference resolves against the staged object.
            auto resolve_ref = [this](Json ref, const char* field) {
                if (ref.is_object() && ref.contains("name") &&
                    !ref.contains("digest")) {
                    std::string name = ref["name"].get<std::string>();
                    size_t slash = name.find('/');
                    if (slash == std::string::npos)
                        throw Error(Errc::ValidationFailed,
                                    "unresolvable reference", {field});
                    auto stored = store_.stat_object(
                        ObjectKey{name.substr(0, slash), name.substr(slash + 1)});
                    if (!stored)
                        throw Error(Errc::ValidationFailed, "object not staged",
                                    {field});
                    stored->name = name;
                    ref = stored->to_json();
                }
                return ArtifactRef::from_json(ref);
            };
            spec.dataset = resolve_ref(body["dataset"], "dataset");
            spec.config = TrainingConfig::from_json(body["config"]);
            if (body.contains("base_model") && !body["base_model"].is_null())
                spec.base_model = resolve_ref(body["base_model"], "base_model");

            JobRecord record = orchestrator_.submit_job(spec, principal->subject);
            reply_json(res, 201, record.to_json());
        });
    });

    svr.Get(R"(/v1/jobs/([0-9a-f-]+))", [this](const httplib::Request& req,
                                               httplib::Response& res) {
        guarded(res, [&] {
            auto principal = authenticate(req.get_header_value("Authorization"));
            if (!principal) {
                reply_json(res, 401, Json{{"error", "Unauthorized"},
                                          {"message", "missing or invalid token"}});
                return;
            }
            JobRecord record =
                orchestrator_.job_status(req.matches[1], principal->subject);
            reply_json(res, 200, record.to_json());
        });
    });

    svr.Get(R"(/v1/jobs/([0-9a-f-]+)/artifacts)",
            [this](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                    auto principal =
                        authenticate(req.get_header_value("Authorization"));
                    if (!principal) {
                        reply_json(res, 401,
                                   Json{{"error", "Unauthorized"},
                                        {"message", "missing or invalid token"}});
                        return;
                    }
                    JobRecord record = orchestrator_.job_status(
                        req.matches[1], principal->subject);
                    Json items = Json::array();
                    for (const auto& ref : record.outputs) {
                        AccessGrant grant = store_.issue_grant(
                            ObjectKey{record.job_id, ref.name},
                            grant_ttl_seconds_, principal->subject);
                        std::string url = "/v1/artifacts/" + record.job_id + "/" +
                                          ref.name + "?expires=" +
                                          std::to_string(grant.expires_at) +
                                          "&token=" + grant.token;
                        items.push_back(
                            Json{{"ref", ref.to_json()}, {"url", url}});
                    }
                    reply_json(res, 200, Json{{"artifacts", items}});
                });
            });

    svr.Get(R"(/v1/artifacts/([^/]+)/(.+))", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
        guarded(res, [&] {
            AccessGrant grant;
            grant.key = ObjectKey{req.matches[1], req.matches[2]};
            std::string expires = req.get_param_value("expires");
            grant.token = req.get_param_value("token");
            auto parsed = std::from_chars(
                expires.data(), expires.data() + expires.size(), grant.expires_at);
            if (expires.empty() || parsed.ec != std::errc() || grant.token.empty())
                throw Error(Errc::InvalidToken, "expires and token required");
            std::string bytes = store_.redeem_grant(grant);
            res.status = 200;
            res.set_content(bytes, "application/octet-stream");
        });
    });

    // --- verifier surface (public) ---

    svr.Get("/v1/keys/public", [this](const httplib::Request&,
                                      httplib::Response& res) {
        guarded(res, [&] {
            res.status = 200;
            res.set_content(key_.public_pem(), "application/x-pem-file");
        });
    });

    svr.Post("/v1/verify/link", [this](const httplib::Request& req,
                                       httplib::Response& res) {
        guarded(res, [&] {
            VerificationReport report = verify_link_bytes(req.body);
            reply_json(res, 200, report.to_json());
        });
    });

    svr.Post("/v1/verify/aibom", [this](const httplib::Request& req,
                                        httplib::Response& res) {
        guarded(res, [&] {
            VerificationReport report = verify_aibom_bytes(req.body);
            reply_json(res, 200, report.to_json());
        });
    });

    svr.Post("/v1/verify/hash", [this](const httplib::Request& req,
                                       httplib::Response& res) {
        guarded(res, [&] {
            if (!req.has_file("link") || !req.has_file("artifact") ||
                !req.has_file("name"))
                throw Error(Errc::MalformedDocument,
                            "multipart fields link, artifact, name required");
            SignedEnvelope envelope =
                SignedEnvelope::parse(req.get_file_value("link").content);
            LinkFile link = LinkFile::from_json(canonical_parse(envelope.payload));
            MatchResult result = verify_artifact_against_link(
                link, req.get_file_value("name").content,
                req.get_file_value("artifact").content);
            reply_json(res, 200, result.to_json());
        });
    });

    svr.Post("/v1/verify/storage", [this](const httplib::Request& req,
                                          httplib::Response& res) {
        guarded(res, [&] {
            std::vector<MatchResult> results = verify_storage_bytes(req.body);
            bool all_match = true;
            Json items = Json::array();
            for (const auto& r : results) {
                all_match = all_match && r.status == MatchStatus::Match;
                items.push_back(r.to_json());
            }
            reply_json(res, 200,
                       Json{{"all_match", all_match}, {"results", items}});
        });
    });

    svr.Get("/openapi.json", [this](const httplib::Request&,
                                    httplib::Response& res) {
        reply_json(res, 200, openapi());
    });
}

Json Gateway::openapi() const
{
    auto op = [](const std::string& summary, bool authenticated,
                 const Json& request_schema, const std::string& response_desc) {
        Json o{{"summary", summary},
               {"responses",
                Json{{"200", Json{{"description", response_desc}}}}}};
        if (authenticated)
            o["security"] = Json::array({Json{{"bearerAuth", Json::array()}}});
        if (!request_schema.is_null())
            o["requestBody"] =
                Json{{"content",
                      Json{{"application/json",
                            Json{{"schema", request_schema}}}}}};
        return o;
    };

    Json artifact_ref_schema{
        {"type", "object"},
        {"properties",
         Json{{"name", Json{{"type", "string"}}},
              {"digest",
               Json{{"type", "object"},
                    {"properties",
                     Json{{"algorithm", Json{{"type", "string"}}},
                          {"hex", Json{{"type", "string"}}}}}}},
              {"size_bytes", Json{{"type", "integer"}}},
              {"media_type", Json{{"type", "string"}}}}}};
    Json config_schema{
        {"type", "object"},
        {"properties",
         Json{{"epochs", Json{{"type", "integer"}}},
              {"batch_size", Json{{"type", "integer"}}},
              {"learning_rate", Json{{"type", "string"}}},
              {"task",
               Json{{"type", "string"},
                    {"enum", Json::array({"regression", "classification"})}}},
              {"seed", Json{{"type", "integer"}}},
              {"framework_tag", Json{{"type", "string"}}}}}};
    Json job_request_schema{
        {"type", "object"},
        {"required", Json::array({"dataset", "config"})},
        {"additionalProperties", false},
        {"properties", Json{{"dataset", artifact_ref_schema},
                            {"base_model", artifact_ref_schema},
                            {"config", config_schema}}}};

    Json paths;
    paths["/v1/artifacts"] =
        Json{{"post", op("Stage a dataset or base model for later job submission",
                         true, Json(), "Stored artifact reference")}};
    paths["/v1/jobs"] = Json{
        {"post", op("Submit a training job", true, job_request_schema,
                    "Job record in SUBMITTED state")}};
    paths["/v1/jobs/{job_id}"] =
        Json{{"get", op("Job status (owner only)", true, Json(), "Job record")}};
    paths["/v1/jobs/{job_id}/artifacts"] = Json{
        {"get", op("Output artifact references with time-limited download URLs",
                   true, Json(), "Artifact list with grant URLs")}};
    paths["/v1/artifacts/{job_id}/{name}"] = Json{
        {"get", op("Download one artifact with a grant token (query: token, "
                   "expires)",
                   false, Json(), "Artifact bytes")}};
    paths["/v1/keys/public"] = Json{
        {"get", op("Platform public key (PEM)", false, Json(), "PEM text")}};
    paths["/v1/verify/link"] = Json{
        {"post", op("Verify an in-toto link envelope", false,
                    Json{{"type", "object"}}, "Verification report")}};
    paths["/v1/verify/aibom"] = Json{
        {"post",
         op("Verify an AIBOM document and its referenced link attestation",
            false, Json{{"type", "object"}}, "Verification report")}};
    paths["/v1/verify/hash"] = Json{
        {"post", op("Compare one artifact's hash against a link file "
                    "(multipart: link, artifact, name)",
                    false, Json(), "Match result")}};
    paths["/v1/verify/storage"] = Json{
        {"post", op("Re-hash every artifact a link references in storage",
                    false, Json{{"type", "object"}}, "Per-artifact match results")}};

    return Json{
        {"openapi", "3.0.3"},
        {"info", Json{{"title", "aibomgen gateway"}, {"version", "0.1.0"}}},
        {"components",
         Json{{"securitySchemes",
               Json{{"bearerAuth",
                     Json{{"type", "http"}, {"scheme", "bearer"}}}}}}},
        {"paths", paths}};
}

}  // namespace aibomgen
