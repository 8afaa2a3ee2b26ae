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

#include <string>
#include <vector>

#include "aibomgen/keys.hpp"
#include "aibomgen/report.hpp"

namespace aibomgen {

inline constexpr const char* kLinkPayloadType =
    "application/vnd.aibomgen.link+json";
inline constexpr const char* kAibomPayloadType =
    "application/vnd.aibomgen.aibom+json";

struct EnvelopeSignature {
    std::string key_id;
    std::string signature;  // base64 of the 64-byte Ed25519 signature
};

/// Detached-signature wrapper binding a canonical payload to its type so the
/// payload cannot be reinterpreted under a different type.
struct SignedEnvelope {
    std::string payload_type;
    std::string payload;  // canonical serialization of the inner document
    std::vector<EnvelopeSignature> signatures;

    Json to_json() const;
    static SignedEnvelope from_json(const Json& j);
    std::string serialize() const;
    static SignedEnvelope parse(std::string_view bytes);
};

/// Pre-authentication encoding over (payload_type, payload): the exact byte
/// string signatures cover.
std::string pre_auth_encoding(std::string_view payload_type,
                              std::string_view payload);

/// Canonicalizes `doc` and signs it. Deterministic given key and document.
/// Propagates NonCanonicalizable.
SignedEnvelope sign_envelope(const Json& doc, const std::string& payload_type,
                             const KeyPair& key);

/// Checks signature_valid, payload_canonical and schema_valid (payload
/// checked against the schema its type names). Failures are report entries.
VerificationReport verify_envelope(const SignedEnvelope& envelope,
                                   const KeyPair& public_key);

}  // namespace aibomgen
