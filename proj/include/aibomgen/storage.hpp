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

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "aibomgen/types.hpp"
#include "aibomgen/util.hpp"

namespace aibomgen {

/// Identifies one stored object: a job-scoped namespace plus a normalized
/// relative path.
struct ObjectKey {
    std::string job_id;
    std::string name;

    bool operator<(const ObjectKey& other) const
    {
        return std::tie(job_id, name) < std::tie(other.job_id, other.name);
    }
};

/// Time-limited, MAC-authenticated read grant for one stored object.
struct AccessGrant {
    ObjectKey key;
    int64_t expires_at = 0;  // Unix seconds
    std::string token;       // URL-safe MAC string
};

/// Content-addressed, write-once object store on the local filesystem.
/// Layout: <root>/objects/<job_id>/<name> plus a digest index per
/// namespace. Every read path re-verifies content against the recorded
/// digest. Writes are internal-only (workers and the gateway); readers go
/// through time-limited grants.
class Store {
  public:
    Store(std::string root_dir, std::string grant_secret,
          ClockFn clock = system_clock_fn());

    /// Durable write. Idempotent for identical bytes; a second write with
    /// different bytes is refused (ImmutabilityViolation).
    ArtifactRef put_object(const ObjectKey& key, std::string_view bytes,
                           const std::string& media_type = "application/octet-stream");

    /// Returns the stored bytes after re-verifying the recorded digest.
    /// Throws NotFound, IntegrityError.
    std::string get_object(const ObjectKey& key) const;

    /// Raw bytes without the integrity check; verification endpoints use
    /// this so out-of-band mutations surface as hash mismatches rather than
    /// read errors.
    std::optional<std::string> read_raw(const ObjectKey& key) const;

    std::optional<ArtifactRef> stat_object(const ObjectKey& key) const;
    std::vector<ArtifactRef> list_namespace(const std::string& job_id) const;
    bool exists(const ObjectKey& key) const;

    /// Ownership registry backing owner-only grants.
    void set_namespace_owner(const std::string& job_id, const std::string& subject);
    std::optional<std::string> namespace_owner(const std::string& job_id) const;

    /// Owner-gated grant issue. Throws NotOwner, NotFound.
    AccessGrant issue_grant(const ObjectKey& key, uint64_t ttl_seconds,
                            const std::string& principal) const;

    /// Bytes iff the token is authentic and unexpired.
    /// Throws GrantExpired, InvalidToken, NotFound, IntegrityError.
    std::string redeem_grant(const AccessGrant& grant) const;

    /// Clears every object in a namespace. Internal repair used only when a
    /// redelivered job re-runs after a dead worker left partial uploads; a
    /// namespace of a COMPLETED job is never reset.
    void reset_namespace(const std::string& job_id);

    const std::string& root() const { return root_; }
    std::string object_path(const ObjectKey& key) const;

  private:
    std::string index_path(const std::string& job_id) const;
    std::string grant_mac(const ObjectKey& key, int64_t expires_at) const;
    void load_owners();
    void save_owners_locked() const;

    std::string root_;
    std::string grant_secret_;
    ClockFn clock_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> owners_;
};

}  // namespace aibomgen
