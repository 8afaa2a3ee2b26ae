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

#include "aibomgen/storage.hpp"

#include <filesystem>

#include "aibomgen/canonical.hpp"
#include "aibomgen/digest.hpp"
#include "aibomgen/errors.hpp"

namespace fs = std::filesystem;

namespace aibomgen {

namespace {

void require_valid_key(const ObjectKey& key)
{
    if (!valid_artifact_name(key.job_id) ||
        key.job_id.find('/') != std::string::npos)
        throw Error(Errc::ValidationFailed, "bad namespace", {"job_id"});
    if (!valid_artifact_name(key.name))
        throw Error(Errc::ValidationFailed, "bad object name", {"name"});
}

}  // namespace

Store::Store(std::string root_dir, std::string grant_secret, ClockFn clock)
    : root_(std::move(root_dir)),
      grant_secret_(std::move(grant_secret)),
      clock_(std::move(clock))
{
    if (grant_secret_.empty())
        throw Error(Errc::KeyError, "grant secret must not be empty");
    fs::create_directories(fs::path(root_) / "objects");
    load_owners();
}

std::string Store::object_path(const ObjectKey& key) const
{
    return (fs::path(root_) / "objects" / key.job_id / key.name).string();
}

std::string Store::index_path(const std::string& job_id) const
{
    return (fs::path(root_) / "objects" / job_id / ".index.json").string();
}

ArtifactRef Store::put_object(const ObjectKey& key, std::string_view bytes,
                              const std::string& media_type)
{
    require_valid_key(key);
    Digest digest = compute_digest(bytes);

    std::lock_guard<std::mutex> lock(mutex_);

    Json index = Json::object();
    if (fs::exists(index_path(key.job_id)))
        index = canonical_parse(read_file(index_path(key.job_id)));

    if (index.contains(key.name)) {
        const Json& entry = index[key.name];
        if (entry["digest"]["hex"].get<std::string>() == digest.hex) {
            // Idempotent re-put of identical bytes.
            ArtifactRef ref;
            ref.name = key.name;
            ref.digest = digest;
            ref.size_bytes = entry["size_bytes"].get<uint64_t>();
            ref.media_type = entry["media_type"].get<std::string>();
            return ref;
        }
        throw Error(Errc::ImmutabilityViolation,
                    key.job_id + "/" + key.name + " already stored with different bytes");
    }

    // Object write and index update act as one unit: both use
    // write-temp-then-rename, and the index entry lands only after the
    // object bytes are durable.
    write_file_atomic(object_path(key), bytes);
    index[key.name] = Json{{"digest", digest.to_json()},
                           {"size_bytes", bytes.size()},
                           {"media_type", media_type}};
    write_file_atomic(index_path(key.job_id), canonical_serialize(index));

    ArtifactRef ref;
    ref.name = key.name;
    ref.digest = digest;
    ref.size_bytes = bytes.size();
    ref.media_type = media_type;
    return ref;
}

std::optional<ArtifactRef> Store::stat_object(const ObjectKey& key) const
{
    require_valid_key(key);
    std::lock_guard<std::mutex> lock(mutex_);
    if (!fs::exists(index_path(key.job_id))) return std::nullopt;
    Json index = canonical_parse(read_file(index_path(key.job_id)));
    if (!index.contains(key.name)) return std::nullopt;
    const Json& entry = index[key.name];
    ArtifactRef ref;
    ref.name = key.name;
    ref.digest = Digest::from_json(entry["digest"]);
    ref.size_bytes = entry["size_bytes"].get<uint64_t>();
    ref.media_type = entry["media_type"].get<std::string>();
    return ref;
}

std::vector<ArtifactRef> Store::list_namespace(const std::string& job_id) const
{
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<ArtifactRef> out;
    if (!fs::exists(index_path(job_id))) return out;
    Json index = canonical_parse(read_file(index_path(job_id)));
    for (auto it = index.begin(); it != index.end(); ++it) {
        ArtifactRef ref;
        ref.name = it.key();
        ref.digest = Digest::from_json(it.value()["digest"]);
        ref.size_bytes = it.value()["size_bytes"].get<uint64_t>();
        ref.media_type = it.value()["media_type"].get<std::string>();
        out.push_back(std::move(ref));
    }
    return out;
}

bool Store::exists(const ObjectKey& key) const
{
    return stat_object(key).has_value();
}

std::string Store::get_object(const ObjectKey& key) const
{
    auto ref = stat_object(key);
    if (!ref) throw Error(Errc::NotFound, key.job_id + "/" + key.name);
    std::string bytes = read_file(object_path(key));
    if (compute_digest(bytes).hex != ref->digest.hex)
        throw Error(Errc::IntegrityError,
                    key.job_id + "/" + key.name + " no longer matches recorded digest");
    return bytes;
}

std::optional<std::string> Store::read_raw(const ObjectKey& key) const
{
    require_valid_key(key);
    if (!fs::exists(object_path(key))) return std::nullopt;
    return read_file(object_path(key));
}

void Store::set_namespace_owner(const std::string& job_id,
                                const std::string& subject)
{
    std::lock_guard<std::mutex> lock(mutex_);
    owners_[job_id] = subject;
    save_owners_locked();
}

std::optional<std::string> Store::namespace_owner(const std::string& job_id) const
{
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = owners_.find(job_id);
    if (it == owners_.end()) return std::nullopt;
    return it->second;
}

std::string Store::grant_mac(const ObjectKey& key, int64_t expires_at) const
{
    std::string message =
        key.job_id + "\n" + key.name + "\n" + std::to_string(expires_at);
    return base64url_encode(hmac_sha256(grant_secret_, message));
}

AccessGrant Store::issue_grant(const ObjectKey& key, uint64_t ttl_seconds,
                               const std::string& principal) const
{
    auto owner = namespace_owner(key.job_id);
    if (!owner || *owner != principal)
        throw Error(Errc::NotOwner, principal + " does not own " + key.job_id);
    if (!exists(key)) throw Error(Errc::NotFound, key.job_id + "/" + key.name);
    AccessGrant grant;
    grant.key = key;
    grant.expires_at = to_unix_seconds(clock_()) + int64_t(ttl_seconds);
    grant.token = grant_mac(key, grant.expires_at);
    return grant;
}

std::string Store::redeem_grant(const AccessGrant& grant) const
{
    std::string expected = grant_mac(grant.key, grant.expires_at);
    if (!constant_time_equal(expected, grant.token))
        throw Error(Errc::InvalidToken, "grant token does not authenticate");
    if (to_unix_seconds(clock_()) > grant.expires_at)
        throw Error(Errc::GrantExpired, "grant expired");
    return get_object(grant.key);
}

void Store::reset_namespace(const std::string& job_id)
{
    if (!valid_artifact_name(job_id) || job_id.find('/') != std::string::npos)
        throw Error(Errc::ValidationFailed, "bad namespace", {"job_id"});
    std::lock_guard<std::mutex> lock(mutex_);
    std::error_code ec;
    fs::remove_all(fs::path(root_) / "objects" / job_id, ec);
}

void Store::load_owners()
{
    std::string path = (fs::path(root_) / "owners.json").string();
    if (!fs::exists(path)) return;
    Json doc = canonical_parse(read_file(path));
    for (auto it = doc.begin(); it != doc.end(); ++it)
        owners_[it.key()] = it.value().get<std::string>();
}

void Store::save_owners_locked() const
{
    Json doc = Json::object();
    for (const auto& [ns, subject] : owners_) doc[ns] = subject;
    write_file_atomic((fs::path(root_) / "owners.json").string(),
                      canonical_serialize(doc));
}

}  // namespace aibomgen
