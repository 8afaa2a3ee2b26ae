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

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "aibomgen/keys.hpp"
#include "aibomgen/orchestrator.hpp"
#include "aibomgen/report.hpp"
#include "aibomgen/storage.hpp"

namespace httplib {
class Server;
}

namespace aibomgen {

/// Authenticated caller resolved from the bearer-token table.
struct Principal {
    std::string token;
    std::string subject;
};

/// Static bearer-token table: token -> subject. Stands in for an external
/// identity provider.
class TokenTable {
  public:
    TokenTable() = default;
    static TokenTable from_json(const Json& j);
    static TokenTable load(const std::string& path);

    void add(const std::string& token, const std::string& subject);
    std::optional<Principal> authenticate(const std::string& token) const;

  private:
    std::map<std::string, std::string> tokens_;
};

/// HTTP surface: job submission and retrieval for engineers, the four
/// verification endpoints plus key distribution for verifiers. Verification
/// endpoints are unauthenticated and never mutate state.
class Gateway {
  public:
    Gateway(Store& store, Orchestrator& orchestrator, const KeyPair& key,
            TokenTable tokens, uint64_t grant_ttl_seconds = 600);
    ~Gateway();

    /// Binds to addr:port (port 0 picks a free port) and serves on a
    /// background thread. Returns the bound port.
    int start(const std::string& addr, int port);
    void stop();

    /// OpenAPI description generated from the implemented route table.
    Json openapi() const;

    // Verification logic shared with the CLI's offline mode.
    VerificationReport verify_link_bytes(std::string_view envelope_bytes) const;
    VerificationReport verify_aibom_bytes(std::string_view aibom_bytes) const;
    std::vector<MatchResult> verify_storage_bytes(
        std::string_view envelope_bytes) const;

  private:
    void install_routes();
    std::optional<Principal> authenticate(const std::string& auth_header) const;

    Store& store_;
    Orchestrator& orchestrator_;
    const KeyPair& key_;
    TokenTable tokens_;
    uint64_t grant_ttl_seconds_;

    std::unique_ptr<httplib::Server> server_;
    std::thread serve_thread_;
    int port_ = 0;
};

}  // namespace aibomgen
