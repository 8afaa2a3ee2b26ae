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

#include "aibomgen/aibom.hpp"

#include <algorithm>

#include "aibomgen/errors.hpp"
#include "aibomgen/util.hpp"

namespace aibomgen {

namespace {

constexpr const char* kBomFormat = "CycloneDX";
constexpr const char* kSpecVersion = "1.6";
constexpr const char* kToolName = "aibomgen";
constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kPropertyPrefix = "aibomgen:";

Json cdx_hash(const Digest& digest)
{
    return Json{{"alg", "SHA-256"}, {"content", digest.hex}};
}

bool cdx_hash_valid(const Json& h)
{
    if (!h.is_object() || !h.contains("alg") || !h.contains("content"))
        return false;
    if (!h["alg"].is_string() || h["alg"].get<std::string>() != "SHA-256")
        return false;
    if (!h["content"].is_string()) return false;
    Digest d{"sha256", h["content"].get<std::string>()};
    return d.valid();
}

Json component(const std::string& type, const std::string& name,
               const std::string& version, const std::optional<Digest>& digest,
               const std::string& description = "")
{
    Json c{{"type", type}, {"name", name}, {"version", version}};
    if (digest) c["hashes"] = Json::array({cdx_hash(*digest)});
    if (!description.empty()) c["description"] = description;
    return c;
}

void add_property(Json& props, const std::string& name, const std::string& value)
{
    props.push_back(Json{{"name", kPropertyPrefix + name}, {"value", value}});
}

const ArtifactRef* find_output(const JobRecord& job, const std::string& name)
{
    for (const auto& ref : job.outputs)
        if (ref.name == name) return &ref;
    return nullptr;
}

}  // namespace

Json generate_aibom(const JobRecord& job, const ArtifactRef& link_ref,
                    const EnvironmentSnapshot& env,
                    const TrainingMetrics& metrics,
                    const std::optional<ScanSummary>& scan_summary)
{
    const ArtifactRef* model = find_output(job, model_object_name());
    const ArtifactRef* metrics_ref = find_output(job, metrics_object_name());
    if (model == nullptr || metrics_ref == nullptr)
        throw Error(Errc::IncompleteJob,
                    "job outputs must include model and metrics");
    if (!link_ref.digest.valid())
        throw Error(Errc::MissingDigest, "link reference lacks digest");

    Json doc;
    doc["bomFormat"] = kBomFormat;
    doc["specVersion"] = kSpecVersion;
    doc["serialNumber"] = "urn:uuid:" + random_uuid();

    doc["metadata"] = Json{
        {"timestamp", env.wall_clock_end},
        {"tools", Json::array({Json{{"name", kToolName}, {"version", kToolVersion}}})},
        {"component", component("machine-learning-model", model->name,
                                job.job_id, model->digest,
                                "model trained by job " + job.job_id)}};

    Json components = Json::array();
    components.push_back(component("data", job.spec.dataset.name, "1",
                                   job.spec.dataset.digest, "training dataset"));
    if (job.spec.base_model)
        components.push_back(component("machine-learning-model",
                                       job.spec.base_model->name, "base",
                                       job.spec.base_model->digest,
                                       "warm-start base model"));
    components.push_back(component("library", job.spec.config.framework_tag,
                                   kToolVersion, std::nullopt,
                                   "enforced training pipeline"));
    components.push_back(component("container", "worker-image", "1",
                                   env.worker_image_digest,
                                   "worker execution environment"));
    components.push_back(component("data", metrics_ref->name, "1",
                                   metrics_ref->digest, "training metrics"));
    doc["components"] = components;

    Json refs = Json::array();
    refs.push_back(Json{{"type", "attestation"},
                        {"url", "aibomgen://jobs/" + job.job_id + "/" + link_ref.name},
                        {"comment", link_ref.name},
                        {"hashes", Json::array({cdx_hash(link_ref.digest)})}});
    if (env.scanner_report_ref)
        refs.push_back(Json{
            {"type", "vulnerability-assertion"},
            {"url", "aibomgen://" + env.scanner_report_ref->name},
            {"comment", env.scanner_report_ref->name},
            {"hashes", Json::array({cdx_hash(env.scanner_report_ref->digest)})}});
    doc["externalReferences"] = refs;

    Json props = Json::array();
    const TrainingConfig& cfg = job.spec.config;
    add_property(props, "epochs", std::to_string(cfg.epochs));
    add_property(props, "batch_size", std::to_string(cfg.batch_size));
    add_property(props, "learning_rate", double_to_string(cfg.learning_rate));
    add_property(props, "seed", std::to_string(cfg.seed));
    add_property(props, "task", task_kind_name(cfg.task));
    add_property(props, "final_loss", double_to_string(metrics.final_loss));
    add_property(props, "training_duration_seconds",
                 double_to_string(metrics.duration_seconds));
    if (scan_summary)
        for (const auto& [severity, count] : scan_summary->counts)
            add_property(props, "scan_findings_" + severity,
                         std::to_string(count));
    doc["properties"] = props;

    return doc;
}

Json embed_signature(const Json& doc, const KeyPair& key)
{
    if (doc.contains("signature"))
        throw Error(Errc::AlreadySigned, "document already carries a signature");
    std::string payload = canonical_serialize(doc);
    std::string sig = key.sign(pre_auth_encoding(kAibomPayloadType, payload));
    Json signed_doc = doc;
    signed_doc["signature"] = Json{{"algorithm", "ed25519"},
                                   {"keyId", key.key_id()},
                                   {"value", base64_encode(sig)}};
    return signed_doc;
}

std::vector<std::string> validate_schema(const Json& doc)
{
    std::vector<std::string> out;
    if (!doc.is_object()) {
        out.push_back("document is not an object");
        return out;
    }

    auto str_equals = [&](const char* key, const char* expect) {
        if (!doc.contains(key) || !doc[key].is_string())
            out.push_back(std::string("missing field: ") + key);
        else if (doc[key].get<std::string>() != expect)
            out.push_back(std::string(key) + " must be \"" + expect + "\"");
    };
    str_equals("bomFormat", kBomFormat);
    str_equals("specVersion", kSpecVersion);

    if (!doc.contains("serialNumber") || !doc["serialNumber"].is_string() ||
        doc["serialNumber"].get<std::string>().rfind("urn:uuid:", 0) != 0 ||
        doc["serialNumber"].get<std::string>().size() != 45)
        out.push_back("serialNumber must be a urn:uuid value");

    if (!doc.contains("metadata") || !doc["metadata"].is_object()) {
        out.push_back("missing field: metadata");
    } else {
        const Json& md = doc["metadata"];
        if (!md.contains("timestamp") || !md["timestamp"].is_string() ||
            !parse_rfc3339(md["timestamp"].get<std::string>()))
            out.push_back("metadata.timestamp must be an RFC 3339 UTC time");
        if (!md.contains("tools") || !md["tools"].is_array() || md["tools"].empty())
            out.push_back("metadata.tools must be a non-empty list");
        if (!md.contains("component") || !md["component"].is_object())
            out.push_back("metadata.component missing");
        else if (!md["component"].contains("hashes") ||
                 !md["component"]["hashes"].is_array() ||
                 md["component"]["hashes"].empty())
            out.push_back("metadata.component must carry a hash");
    }

    static const char* kComponentTypes[] = {"machine-learning-model", "data",
                                            "container", "library"};
    if (!doc.contains("components") || !doc["components"].is_array() ||
        doc["components"].empty()) {
        out.push_back("components must be a non-empty list");
    } else {
        for (const auto& c : doc["components"]) {
            std::string cname = c.is_object() && c.contains("name") &&
                                        c["name"].is_string()
                                    ? c["name"].get<std::string>()
                                    : "<unnamed>";
            if (!c.is_object() || !c.contains("type") || !c["type"].is_string() ||
                !c.contains("name") || !c.contains("version")) {
                out.push_back("component malformed: " + cname);
                continue;
            }
            std::string type = c["type"].get<std::string>();
            if (std::find_if(std::begin(kComponentTypes), std::end(kComponentTypes),
                             [&](const char* t) { return type == t; }) ==
                std::end(kComponentTypes))
                out.push_back("component " + cname + ": unknown type " + type);
            if (c.contains("hashes")) {
                if (!c["hashes"].is_array() || c["hashes"].empty())
                    out.push_back("component " + cname + ": hashes must be a list");
                else
                    for (const auto& h : c["hashes"])
                        if (!cdx_hash_valid(h))
                            out.push_back("component " + cname + ": malformed hash");
            }
        }
    }

    size_t attestation_refs = 0;
    if (!doc.contains("externalReferences") ||
        !doc["externalReferences"].is_array()) {
        out.push_back("missing field: externalReferences");
    } else {
        for (const auto& r : doc["externalReferences"]) {
            if (!r.is_object() || !r.contains("type") || !r["type"].is_string() ||
                !r.contains("url") || !r["url"].is_string()) {
                out.push_back("external reference malformed");
                continue;
            }
            if (r["type"].get<std::string>() == "attestation") {
                ++attestation_refs;
                if (!r.contains("hashes") || !r["hashes"].is_array() ||
                    r["hashes"].size() != 1 || !cdx_hash_valid(r["hashes"][0]))
                    out.push_back("attestation reference must carry one valid hash");
            }
        }
        if (attestation_refs != 1)
            out.push_back("exactly one attestation external reference required");
    }

    if (!doc.contains("properties") || !doc["properties"].is_array()) {
        out.push_back("missing field: properties");
    } else {
        for (const auto& p : doc["properties"])
            if (!p.is_object() || !p.contains("name") || !p["name"].is_string() ||
                !p.contains("value") || !p["value"].is_string())
                out.push_back("property entries must be name/value strings");
    }

    if (doc.contains("signature")) {
        const Json& sig = doc["signature"];
        if (!sig.is_object() || !sig.contains("algorithm") ||
            !sig["algorithm"].is_string() ||
            sig["algorithm"].get<std::string>() != "ed25519" ||
            !sig.contains("keyId") || !sig["keyId"].is_string() ||
            !sig.contains("value") || !sig["value"].is_string())
            out.push_back("signature block malformed");
    }
    return out;
}

std::optional<ArtifactRef> aibom_link_reference(const Json& doc)
{
    if (!doc.is_object() || !doc.contains("externalReferences") ||
        !doc["externalReferences"].is_array())
        return std::nullopt;
    for (const auto& r : doc["externalReferences"]) {
        if (!r.is_object() || !r.contains("type") ||
            r["type"] != Json("attestation"))
            continue;
        if (!r.contains("comment") || !r["comment"].is_string() ||
            !r.contains("hashes") || !r["hashes"].is_array() ||
            r["hashes"].size() != 1 || !cdx_hash_valid(r["hashes"][0]))
            return std::nullopt;
        ArtifactRef ref;
        ref.name = r["comment"].get<std::string>();
        ref.digest = Digest{"sha256", r["hashes"][0]["content"].get<std::string>()};
        ref.media_type = "application/json";
        return ref;
    }
    return std::nullopt;
}

VerificationReport verify_aibom(const Json& doc, const KeyPair& public_key,
                                std::string_view link_envelope_bytes,
                                const ArtifactResolver& resolver)
{
    VerificationReport report;

    auto violations = validate_schema(doc);
    report.add("schema_valid", violations.empty(),
               violations.empty() ? "" : violations.front());

    bool signature_valid = false;
    std::string sig_detail;
    if (!doc.is_object() || !doc.contains("signature")) {
        sig_detail = "no signature block";
    } else {
        Json unsigned_doc = doc;
        unsigned_doc.erase("signature");
        const Json& sig = doc["signature"];
        auto raw = sig.is_object() && sig.contains("value") &&
                           sig["value"].is_string()
                       ? base64_decode(sig["value"].get<std::string>())
                       : std::nullopt;
        if (!raw) {
            sig_detail = "signature value not base64";
        } else if (!sig.contains("keyId") ||
                   sig["keyId"] != Json(public_key.key_id())) {
            sig_detail = "keyId does not match verification key";
        } else {
            try {
                std::string payload = canonical_serialize(unsigned_doc);
                signature_valid = public_key.verify(
                    pre_auth_encoding(kAibomPayloadType, payload), *raw);
                if (!signature_valid)
                    sig_detail = "signature does not verify under the given key";
            } catch (const Error& e) {
                sig_detail = e.what();
            }
        }
    }
    report.add("aibom_signature_valid", signature_valid, sig_detail);

    auto link_ref = aibom_link_reference(doc);
    bool digest_matches = false;
    std::string link_name = link_ref ? link_ref->name : "<link>";
    if (!link_ref) {
        report.add("link_reference_digest_matches", false,
                   "no attestation reference in document");
    } else if (link_envelope_bytes.empty()) {
        report.add("link_reference_digest_matches", false,
                   link_name + ": referenced link envelope not available");
    } else {
        Digest actual = compute_digest(link_envelope_bytes);
        digest_matches = actual == link_ref->digest;
        report.add("link_reference_digest_matches", digest_matches,
                   digest_matches ? ""
                                  : link_name + ": expected " +
                                        link_ref->digest.hex + " got " +
                                        actual.hex);
    }

    bool link_valid = false;
    std::optional<LinkFile> link;
    if (!link_envelope_bytes.empty()) {
        try {
            SignedEnvelope env = SignedEnvelope::parse(link_envelope_bytes);
            VerificationReport inner = verify_envelope(env, public_key);
            link_valid = inner.pass;
            std::string detail;
            if (!link_valid)
                for (const auto& c : inner.checks)
                    if (!c.passed) detail = c.name + ": " + c.detail;
            report.add("link_envelope_valid", link_valid, detail);
            if (link_valid) link = LinkFile::from_json(canonical_parse(env.payload));
        } catch (const Error& e) {
            report.add("link_envelope_valid", false, e.what());
        }
    } else {
        report.add("link_envelope_valid", false, "link envelope not available");
    }

    // Cross-document consistency: every file-backed hash in the AIBOM must
    // appear in the link's materials or products.
    if (link) {
        bool consistent = true;
        std::string detail;
        auto in_link = [&](const std::string& hex) {
            for (const auto& [_, d] : link->materials)
                if (d.hex == hex) return true;
            for (const auto& [_, d] : link->products)
                if (d.hex == hex) return true;
            return false;
        };
        auto check_component = [&](const Json& c) {
            if (!c.is_object() || !c.contains("hashes") || !c["hashes"].is_array())
                return;
            std::string type = c.value("type", std::string());
            if (type == "container" || type == "library") return;  // not job artifacts
            for (const auto& h : c["hashes"]) {
                if (!cdx_hash_valid(h)) continue;
                std::string hex = h["content"].get<std::string>();
                if (!in_link(hex)) {
                    consistent = false;
                    detail = "component " + c.value("name", std::string("<unnamed>")) +
                             " hash not present in link";
                }
            }
        };
        if (doc.contains("metadata") && doc["metadata"].is_object() &&
            doc["metadata"].contains("component"))
            check_component(doc["metadata"]["component"]);
        if (doc.contains("components") && doc["components"].is_array())
            for (const auto& c : doc["components"]) check_component(c);
        report.add("components_match_link", consistent, detail);
    }

    if (resolver && link) {
        bool all_match = true;
        std::string detail;
        auto check_side = [&](const std::map<std::string, Digest>& side) {
            for (const auto& [name, digest] : side) {
                auto bytes = resolver(name);
                if (!bytes) {
                    all_match = false;
                    detail = name + ": not found in storage";
                    continue;
                }
                Digest actual = compute_digest(*bytes);
                if (!(actual == digest)) {
                    all_match = false;
                    detail = name + ": digest mismatch";
                }
            }
        };
        check_side(link->materials);
        check_side(link->products);
        report.add("all_artifacts_match", all_match, detail);
    }

    report.finalize();
    return report;
}

}  // namespace aibomgen
