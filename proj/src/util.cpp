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

#include "aibomgen/util.hpp"

#include <openssl/rand.h>

#include <charconv>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "aibomgen/errors.hpp"

namespace aibomgen {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

constexpr char kB64Std[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
constexpr char kB64Url[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

std::string b64_encode_alphabet(std::string_view bytes, const char* alphabet,
                                bool pad)
{
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    size_t i = 0;
    while (i + 3 <= bytes.size()) {
        uint32_t n = (uint8_t(bytes[i]) << 16) | (uint8_t(bytes[i + 1]) << 8) |
                     uint8_t(bytes[i + 2]);
        out += alphabet[(n >> 18) & 63];
        out += alphabet[(n >> 12) & 63];
        out += alphabet[(n >> 6) & 63];
        out += alphabet[n & 63];
        i += 3;
    }
    size_t rest = bytes.size() - i;
    if (rest == 1) {
        uint32_t n = uint8_t(bytes[i]) << 16;
        out += alphabet[(n >> 18) & 63];
        out += alphabet[(n >> 12) & 63];
        if (pad) out += "==";
    } else if (rest == 2) {
        uint32_t n = (uint8_t(bytes[i]) << 16) | (uint8_t(bytes[i + 1]) << 8);
        out += alphabet[(n >> 18) & 63];
        out += alphabet[(n >> 12) & 63];
        out += alphabet[(n >> 6) & 63];
        if (pad) out += '=';
    }
    return out;
}

std::optional<std::string> b64_decode_alphabet(std::string_view text,
                                               const char* alphabet)
{
    int rev[256];
    std::memset(rev, -1, sizeof(rev));
    for (int k = 0; k < 64; ++k) rev[uint8_t(alphabet[k])] = k;

    // Strip padding.
    while (!text.empty() && text.back() == '=') text.remove_suffix(1);

    std::string out;
    out.reserve(text.size() * 3 / 4);
    uint32_t acc = 0;
    int bits = 0;
    for (char c : text) {
        int v = rev[uint8_t(c)];
        if (v < 0) return std::nullopt;
        acc = (acc << 6) | uint32_t(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out += char((acc >> bits) & 0xff);
        }
    }
    // Reject dangling bits that encode nothing (length 1 mod 4).
    if (bits >= 6) return std::nullopt;
    return out;
}

}  // namespace

ClockFn system_clock_fn()
{
    return [] { return SystemClock::now(); };
}

std::string bytes_to_hex(std::string_view bytes)
{
    std::string out;
    out.reserve(bytes.size() * 2);
    for (char c : bytes) {
        out += kHexDigits[(uint8_t(c) >> 4) & 0xf];
        out += kHexDigits[uint8_t(c) & 0xf];
    }
    return out;
}

std::optional<std::string> hex_to_bytes(std::string_view hex)
{
    if (hex.size() % 2 != 0) return std::nullopt;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::string out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]), lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out += char((hi << 4) | lo);
    }
    return out;
}

std::string base64_encode(std::string_view bytes)
{
    return b64_encode_alphabet(bytes, kB64Std, true);
}

std::optional<std::string> base64_decode(std::string_view text)
{
    return b64_decode_alphabet(text, kB64Std);
}

std::string base64url_encode(std::string_view bytes)
{
    return b64_encode_alphabet(bytes, kB64Url, false);
}

std::optional<std::string> base64url_decode(std::string_view text)
{
    return b64_decode_alphabet(text, kB64Url);
}

std::string format_rfc3339(TimePoint tp)
{
    std::time_t secs = SystemClock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                  tm.tm_min, tm.tm_sec);
    return buf;
}

std::optional<TimePoint> parse_rfc3339(std::string_view text)
{
    std::tm tm{};
    int y, mo, d, h, mi, s;
    char z;
    if (text.size() != 20) return std::nullopt;
    std::string tmp(text);
    if (std::sscanf(tmp.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h,
                    &mi, &s, &z) != 7 ||
        z != 'Z')
        return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60)
        return std::nullopt;
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = s;
    std::time_t t = timegm(&tm);
    if (t == -1) return std::nullopt;
    return SystemClock::from_time_t(t);
}

std::string format_compact_ms(TimePoint tp)
{
    std::time_t secs = SystemClock::to_time_t(tp);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  tp.time_since_epoch())
                  .count() %
              1000;
    if (ms < 0) ms += 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d%02d%02dT%02d%02d%02d.%03dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                  tm.tm_min, tm.tm_sec, int(ms));
    return buf;
}

int64_t to_unix_seconds(TimePoint tp)
{
    return std::chrono::duration_cast<std::chrono::seconds>(
               tp.time_since_epoch())
        .count();
}

TimePoint from_unix_seconds(int64_t secs)
{
    return TimePoint(std::chrono::seconds(secs));
}

std::string double_to_string(double value)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::optional<double> string_to_double(std::string_view text)
{
    double value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        return std::nullopt;
    return value;
}

std::string random_bytes(size_t n)
{
    std::string out(n, '\0');
    if (RAND_bytes(reinterpret_cast<unsigned char*>(out.data()),
                   static_cast<int>(n)) != 1)
        throw Error(Errc::KeyError, "system RNG unavailable");
    return out;
}

std::string random_uuid()
{
    std::string b = random_bytes(16);
    b[6] = char((uint8_t(b[6]) & 0x0f) | 0x40);  // version 4
    b[8] = char((uint8_t(b[8]) & 0x3f) | 0x80);  // variant 10
    std::string hex = bytes_to_hex(b);
    return hex.substr(0, 8) + "-" + hex.substr(8, 4) + "-" + hex.substr(12, 4) +
           "-" + hex.substr(16, 4) + "-" + hex.substr(20, 12);
}

bool constant_time_equal(std::string_view a, std::string_view b)
{
    if (a.size() != b.size()) return false;
    unsigned char acc = 0;
    for (size_t i = 0; i < a.size(); ++i)
        acc |= uint8_t(a[i]) ^ uint8_t(b[i]);
    return acc == 0;
}

bool valid_artifact_name(std::string_view name)
{
    if (name.empty() || name.size() > 1024) return false;
    if (name.front() == '/') return false;
    if (name.find('\\') != std::string_view::npos) return false;
    if (name.find('\0') != std::string_view::npos) return false;
    size_t start = 0;
    while (start <= name.size()) {
        size_t end = name.find('/', start);
        if (end == std::string_view::npos) end = name.size();
        std::string_view seg = name.substr(start, end - start);
        if (seg.empty() || seg == "." || seg == "..") return false;
        if (end == name.size()) break;
        start = end + 1;
    }
    return true;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::NotFound, "cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(Errc::IntegrityError, "read failed: " + path);
    return data;
}

void write_file_atomic(const std::string& path, std::string_view bytes)
{
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp." + bytes_to_hex(random_bytes(4));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::StorageFull, "cannot create " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error(Errc::StorageFull, "write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

const char* errc_name(Errc code)
{
    switch (code) {
        case Errc::NonCanonicalizable: return "NonCanonicalizable";
        case Errc::MissingDigest: return "MissingDigest";
        case Errc::MissingProduct: return "MissingProduct";
        case Errc::DuplicateArtifact: return "DuplicateArtifact";
        case Errc::AlreadySigned: return "AlreadySigned";
        case Errc::IncompleteJob: return "IncompleteJob";
        case Errc::ImmutabilityViolation: return "ImmutabilityViolation";
        case Errc::StorageFull: return "StorageFull";
        case Errc::NotFound: return "NotFound";
        case Errc::IntegrityError: return "IntegrityError";
        case Errc::NotOwner: return "NotOwner";
        case Errc::GrantExpired: return "GrantExpired";
        case Errc::InvalidToken: return "InvalidToken";
        case Errc::ValidationFailed: return "ValidationFailed";
        case Errc::Unauthorized: return "Unauthorized";
        case Errc::StaleLease: return "StaleLease";
        case Errc::MissingAttestation: return "MissingAttestation";
        case Errc::IllegalTransition: return "IllegalTransition";
        case Errc::UnknownWorker: return "UnknownWorker";
        case Errc::MalformedCsv: return "MalformedCsv";
        case Errc::NonFiniteLoss: return "NonFiniteLoss";
        case Errc::MalformedModel: return "MalformedModel";
        case Errc::InputTamperDetected: return "InputTamperDetected";
        case Errc::KeyError: return "KeyError";
        case Errc::MalformedDocument: return "MalformedDocument";
        case Errc::HarnessSetupFailed: return "HarnessSetupFailed";
    }
    return "Unknown";
}

}  // namespace aibomgen
