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

#include "aibomgen/canonical.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>

#include "aibomgen/errors.hpp"

namespace aibomgen {

namespace {

void append_escaped_string(std::string& out, const std::string& s)
{
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    static const char hexd[] = "0123456789abcdef";
                    out += "\\u00";
                    out += hexd[(c >> 4) & 0xf];
                    out += hexd[c & 0xf];
                } else {
                    out += char(c);
                }
        }
    }
    out += '"';
}

void write_value(std::string& out, const Json& v)
{
    switch (v.type()) {
        case Json::value_t::null:
            out += "null";
            break;
        case Json::value_t::boolean:
            out += v.get<bool>() ? "true" : "false";
            break;
        case Json::value_t::number_integer: {
            char buf[24];
            auto res = std::to_chars(buf, buf + sizeof(buf), v.get<int64_t>());
            out.append(buf, res.ptr);
            break;
        }
        case Json::value_t::number_unsigned: {
            char buf[24];
            auto res = std::to_chars(buf, buf + sizeof(buf), v.get<uint64_t>());
            out.append(buf, res.ptr);
            break;
        }
        case Json::value_t::number_float: {
            double d = v.get<double>();
            if (!std::isfinite(d))
                throw Error(Errc::NonCanonicalizable, "non-finite number");
            char buf[64];
            auto res = std::to_chars(buf, buf + sizeof(buf), d);
            out.append(buf, res.ptr);
            break;
        }
        case Json::value_t::string:
            append_escaped_string(out, v.get_ref<const std::string&>());
            break;
        case Json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& item : v) {
                if (!first) out += ',';
                first = false;
                write_value(out, item);
            }
            out += ']';
            break;
        }
        case Json::value_t::object: {
            // nlohmann::json objects iterate in std::map order, which is
            // byte-wise key order — code-point order for UTF-8 keys.
            out += '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ',';
                first = false;
                append_escaped_string(out, it.key());
                out += ':';
                write_value(out, it.value());
            }
            out += '}';
            break;
        }
        default:
            throw Error(Errc::NonCanonicalizable, "unsupported value kind");
    }
}

}  // namespace

std::string canonical_serialize(const Json& document)
{
    std::string out;
    out.reserve(256);
    write_value(out, document);
    return out;
}

Json canonical_parse(std::string_view text)
{
    Json parsed = Json::parse(text, nullptr, false);
    if (parsed.is_discarded())
        throw Error(Errc::MalformedDocument, "invalid JSON");
    return parsed;
}

bool is_canonical(std::string_view text)
{
    Json parsed = Json::parse(text, nullptr, false);
    if (parsed.is_discarded()) return false;
    try {
        return canonical_serialize(parsed) == text;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace aibomgen
