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

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aibomgen {

using SystemClock = std::chrono::system_clock;
using TimePoint = SystemClock::time_point;

/// Injectable time source; production code uses SystemClock::now, tests
/// substitute a fake.
using ClockFn = std::function<TimePoint()>;

ClockFn system_clock_fn();

std::string bytes_to_hex(std::string_view bytes);
std::optional<std::string> hex_to_bytes(std::string_view hex);

std::string base64_encode(std::string_view bytes);
std::optional<std::string> base64_decode(std::string_view text);

// URL-safe alphabet, no padding; used for grant tokens in query strings.
std::string base64url_encode(std::string_view bytes);
std::optional<std::string> base64url_decode(std::string_view text);

/// RFC 3339 UTC timestamp with seconds precision, e.g. "2026-08-09T12:34:56Z".
std::string format_rfc3339(TimePoint tp);
std::optional<TimePoint> parse_rfc3339(std::string_view text);

/// Compact UTC stamp with millisecond precision for filesystem-safe names,
/// e.g. "20260809T123456.123Z".
std::string format_compact_ms(TimePoint tp);

int64_t to_unix_seconds(TimePoint tp);
TimePoint from_unix_seconds(int64_t secs);

/// Shortest decimal string that round-trips the double (std::to_chars).
/// This is the one rendering used for reals everywhere a document stores
/// them as strings.
std::string double_to_string(double value);
std::optional<double> string_to_double(std::string_view text);

std::string random_uuid();
std::string random_bytes(size_t n);

bool constant_time_equal(std::string_view a, std::string_view b);

/// Validates a relative artifact path: non-empty, '/'-separated, no "",
/// ".", ".." segments, no leading slash, no backslashes.
bool valid_artifact_name(std::string_view name);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view bytes);

}  // namespace aibomgen
