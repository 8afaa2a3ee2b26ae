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

#include "aibomgen/envelope.hpp"

#include "aibomgen/errors.hpp"
#include "aibomgen/link.hpp"
#include "aibomgen/util.hpp"

namespace aibomgen {

Json SignedEnvelope::to_json() const
{
    Json sigs = Json::array();
    for (const auto& s : signatures)
        sigs.push_back(Json{{"key_id", s.key_id}, {"signature", s.signature}});
    return Json{{"payload_type", payload_type},
                {"payload", base64_encode(payload)},
                {"signatures", sigs}};
}

SignedEnvelope SignedEnvelope::from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("payload_type") || !j.contains("payload") ||
        !j.contains("signatures") || !j["payload_type"].is_string() ||
        !j["payload"].is_string() || !j["signatures"].is_array())
        throw Error(Errc::MalformedDocument, "envelope shape");
    SignedEnvelope env;
    env.payload_type = j["payload_type"].get<std::string>();
    auto decoded = base64_decode(j["payload"].get<std::string>());
    if (!decoded) throw Error(Errc::MalformedDocument, "payload base64");
    env.payload = *decoded;
    for (const auto& s : j["signatures"]) {
        if (!s.is_object() || !s.contains("key_id") || !s.contains("signature") ||
            !s["key_id"].is_string() || !s["signature"].is_string())
            throw Error(Errc::MalformedDocument, "signature entry");
        env.signatures.push_back({s["key_id"].get<std::string>(),
                                  s["signature"].get<std::string>()});
    }
    return env;
}

std::string SignedEnvelope::serialize() const
{
    return canonical_serialize(to_json());
}

SignedEnvelope SignedEnvelope::parse(std::string_view bytes)
{
    return from_json(canonical_parse(bytes));
}

std::string pre_auth_encoding(std::string_view payload_type,
                              std::string_view payload)
{
    std::string out = "AIBOMGENv1 ";
    out += std::to_string(payload_type.size());
    out += ' ';
    out += payload_type;
    out += ' ';
    out += std::to_string(payload.size());
    out += ' ';
    out += payload;
    return out;
}

SignedEnvelope sign_envelope(const Json& doc, const std::string& payload_type,
                             const KeyPair& key)
{
    SignedEnvelope env;
    env.payload_type = payload_type;
    env.payload = canonical_serialize(doc);
    std::string sig = key.sign(pre_auth_encoding(payload_type, env.payload));
    env.signatures.push_back({key.key_id(), base64_encode(sig)});
    return env;
}

VerificationReport verify_envelope(const SignedEnvelope& envelope,
                                   const KeyPair& public_key)
{
    VerificationReport report;

    bool signature_valid = false;
    if (envelope.signatures.empty()) {
        report.add("signature_valid", false, "no signatures");
    } else {
        std::string pae =
            pre_auth_encoding(envelope.payload_type, envelope.payload);
        std::string detail;
        for (const auto& s : envelope.signatures) {
            auto raw = base64_decode(s.signature);
            if (!raw) {
                detail = "signature not base64";
                continue;
            }
            if (s.key_id != public_key.key_id()) {
                detail = "key_id does not match verification key";
                continue;
            }
            if (public_key.verify(pae, *raw)) {
                signature_valid = true;
                detail.clear();
                break;
            }
            detail = "signature does not verify under the given key";
        }
        report.add("signature_valid", signature_valid, detail);
    }

    bool payload_canonical = is_canonical(envelope.payload);
    report.add("payload_canonical", payload_canonical,
               payload_canonical ? "" : "payload is not in canonical form");

    bool schema_valid = false;
    std::string schema_detail;
    if (!payload_canonical) {
        schema_detail = "payload unparsable or non-canonical";
    } else if (envelope.payload_type == kLinkPayloadType) {
        auto violations = validate_link_schema(canonical_parse(envelope.payload));
        schema_valid = violations.empty();
        if (!schema_valid) schema_detail = violations.front();
    } else if (envelope.payload_type == kAibomPayloadType) {
        // AIBOM documents travel with an embedded signature rather than an
        // envelope; accept any canonical JSON object here.
        schema_valid = canonical_parse(envelope.payload).is_object();
        if (!schema_valid) schema_detail = "payload is not an object";
    } else {
        schema_detail = "unknown payload type: " + envelope.payload_type;
    }
    report.add("schema_valid", schema_valid, schema_detail);

    report.finalize();
    return report;
}

}  // namespace aibomgen
