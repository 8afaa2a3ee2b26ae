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
#include <string>
#include <vector>

#include "aibomgen/report.hpp"
#include "aibomgen/types.hpp"

namespace aibomgen {

/// One-step attestation binding a job's materials (inputs) to its products
/// (outputs) together with the enforced command and environment snapshot.
struct LinkFile {
    std::string step_name = "train";
    std::vector<std::string> command;
    std::map<std::string, Digest> materials;
    std::map<std::string, Digest> products;
    int64_t return_code = 0;
    std::string duration_seconds;  // decimal string byproduct
    EnvironmentSnapshot environment;

    Json to_json() const;
    static LinkFile from_json(const Json& j);

    /// Job id recovered from the enforced command line, empty if absent.
    std::string job_id_from_command() const;
};

/// Structural validation used by verify_envelope's schema check. Empty when
/// the document satisfies the link schema.
std::vector<std::string> validate_link_schema(const Json& doc);

/// Builds the "train" step link for a running job. Materials and products
/// mirror the given refs exactly.
/// Throws MissingDigest, MissingProduct, DuplicateArtifact,
/// IllegalTransition (job not RUNNING).
LinkFile create_link(const JobRecord& job, const EnvironmentSnapshot& env,
                     const std::vector<ArtifactRef>& materials,
                     const std::vector<ArtifactRef>& products);

/// Hash comparison of `bytes` against the digest recorded for `name` in the
/// link's materials or products.
MatchResult verify_artifact_against_link(const LinkFile& link,
                                         const std::string& name,
                                         std::string_view bytes);

}  // namespace aibomgen
