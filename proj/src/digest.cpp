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

#include "aibomgen/digest.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "aibomgen/errors.hpp"
#include "aibomgen/util.hpp"

namespace aibomgen {

bool Digest::valid() const
{
    if (algorithm != "sha256") return false;
    if (hex.size() != 64) return false;
    for (char c : hex)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
}

Json Digest::to_json() const
{
    return Json{{"algorithm", algorithm}, {"hex", hex}};
}

Digest Digest::from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("algorithm") || !j.contains("hex") ||
        !j["algorithm"].is_string() || !j["hex"].is_string())
        throw Error(Errc::MalformedDocument, "digest object");
    Digest d{j["algorithm"].get<std::string>(), j["hex"].get<std::string>()};
    if (!d.valid()) throw Error(Errc::MalformedDocument, "invalid digest");
    return d;
}

std::string sha256_raw(std::string_view bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &md_len, EVP_sha256(),
                   nullptr) != 1)
        throw Error(Errc::KeyError, "sha256 failed");
    return std::string(reinterpret_cast<char*>(md), md_len);
}

Digest compute_digest(std::string_view bytes)
{
    return Digest{"sha256", bytes_to_hex(sha256_raw(bytes))};
}

std::string hmac_sha256(std::string_view key, std::string_view message)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
             reinterpret_cast<const unsigned char*>(message.data()),
             message.size(), md, &md_len) == nullptr)
        throw Error(Errc::KeyError, "hmac failed");
    return std::string(reinterpret_cast<char*>(md), md_len);
}

}  // namespace aibomgen
