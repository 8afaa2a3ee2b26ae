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

#include <optional>
#include <string>
#include <string_view>

namespace aibomgen {

inline constexpr size_t kEd25519KeyBytes = 32;
inline constexpr size_t kEd25519SigBytes = 64;

/// Ed25519 platform key pair. key_id is the SHA-256 hex of the raw 32-byte
/// public key. The private half never appears in any serialized artifact.
class KeyPair {
  public:
    KeyPair() = default;

    static KeyPair generate();
    /// Verification-only key (no signing capability).
    static KeyPair from_public_raw(std::string_view raw32);
    static KeyPair from_public_pem(const std::string& pem);
    static KeyPair load(const std::string& private_pem_path,
                        const std::string& public_pem_path);

    void save(const std::string& private_pem_path,
              const std::string& public_pem_path) const;

    const std::string& key_id() const { return key_id_; }
    const std::string& public_raw() const { return public_raw_; }
    std::string public_pem() const;
    bool can_sign() const { return !private_raw_.empty(); }

    /// Deterministic Ed25519 signature (64 bytes). Throws KeyError when the
    /// private half is absent or unusable.
    std::string sign(std::string_view message) const;
    bool verify(std::string_view message, std::string_view signature) const;

  private:
    std::string key_id_;
    std::string public_raw_;
    std::string private_raw_;
};

}  // namespace aibomgen
