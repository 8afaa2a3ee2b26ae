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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aibomgen/envelope.hpp"
#include "aibomgen/link.hpp"
#include "aibomgen/types.hpp"

namespace aibomgen {

/// Findings-by-severity summary attached as AIBOM properties when a scan
/// report exists for the worker environment.
struct ScanSummary {
    std::map<std::string, uint64_t> counts;  // severity -> finding count
};

/// CycloneDX-flavored bill of materials for one completed training job.
/// The exact field subset is frozen in docs/aibom-schema.md; the document
/// is handled as JSON throughout so unknown-field and schema problems stay
/// observable to validate_schema.
///
/// generate_aibom leaves the signature block absent; embed_signature signs
/// the canonical form of the document minus the signature block.
Json generate_aibom(const JobRecord& job, const ArtifactRef& link_ref,
                    const EnvironmentSnapshot& env,
                    const TrainingMetrics& metrics,
                    const std::optional<ScanSummary>& scan_summary = {});

Json embed_signature(const Json& doc, const KeyPair& key);

/// Structural validation against the frozen schema. Empty list iff valid.
std::vector<std::string> validate_schema(const Json& doc);

/// Name and digest of the link-file reference embedded in the document.
std::optional<ArtifactRef> aibom_link_reference(const Json& doc);

using ArtifactResolver =
    std::function<std::optional<std::string>(const std::string& name)>;

/// End-to-end integrity and authenticity check: schema, embedded signature,
/// digest binding to the stored link envelope bytes, link envelope validity,
/// AIBOM/link hash consistency, and (when a resolver is supplied) hash
/// verification of every artifact the link references.
VerificationReport verify_aibom(const Json& doc, const KeyPair& public_key,
                                std::string_view link_envelope_bytes,
                                const ArtifactResolver& resolver = nullptr);

}  // namespace aibomgen
