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

#include <stdexcept>
#include <string>
#include <vector>

namespace aibomgen {

enum class Errc {
    NonCanonicalizable,
    MissingDigest,
    MissingProduct,
    DuplicateArtifact,
    AlreadySigned,
    IncompleteJob,
    ImmutabilityViolation,
    StorageFull,
    NotFound,
    IntegrityError,
    NotOwner,
    GrantExpired,
    InvalidToken,
    ValidationFailed,
    Unauthorized,
    StaleLease,
    MissingAttestation,
    IllegalTransition,
    UnknownWorker,
    MalformedCsv,
    NonFiniteLoss,
    MalformedModel,
    InputTamperDetected,
    KeyError,
    MalformedDocument,
    HarnessSetupFailed,
};

const char* errc_name(Errc code);

/// Single exception type for all domain errors; `code()` identifies the
/// failure class and `fields()` carries field-level reasons for
/// ValidationFailed.
class Error : public std::runtime_error {
  public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code)
    {
    }

    Error(Errc code, std::string message, std::vector<std::string> fields)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code),
          fields_(std::move(fields))
    {
    }

    Errc code() const noexcept { return code_; }
    const std::vector<std::string>& fields() const noexcept { return fields_; }

  private:
    Errc code_;
    std::vector<std::string> fields_;
};

}  // namespace aibomgen
