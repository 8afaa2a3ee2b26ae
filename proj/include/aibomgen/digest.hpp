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
#include <string_view>

#include "aibomgen/canonical.hpp"

namespace aibomgen {

/// SHA-256 content hash — the universal artifact identity.
struct Digest {
    std::string algorithm = "sha256";
    std::string hex;  // 64 lowercase hex characters

    bool operator==(const Digest&) const = default;

    bool valid() const;
    Json to_json() const;
    static Digest from_json(const Json& j);
};

/// SHA-256 of the exact byte sequence. Total and deterministic.
Digest compute_digest(std::string_view bytes);

/// Raw 32-byte SHA-256 output (used for key ids and HMAC plumbing).
std::string sha256_raw(std::string_view bytes);

/// HMAC-SHA-256 over `message` with `key`, raw 32-byte output.
std::string hmac_sha256(std::string_view key, std::string_view message);

}  // namespace aibomgen
