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

#include <doctest.h>

#include <random>

#include "aibomgen/canonical.hpp"
#include "aibomgen/digest.hpp"
#include "aibomgen/errors.hpp"
#include "aibomgen/types.hpp"
#include "aibomgen/util.hpp"
#include "test_support.hpp"

using namespace aibomgen;

namespace {

// Independent SHA-256 oracle values (FIPS 180-2 test vectors).
constexpr const char* kSha256Empty =
    "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855";
constexpr const char* kSha256Abc =
    "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";

Json random_document(std::mt19937_64& rng, int depth)
{
    switch (rng() % (depth > 0 ? 7 : 5)) {
        case 0: return Json(nullptr);
        case 1: return Json(bool(rng() & 1));
        case 2: return Json(int64_t(rng()));
        case 3: return Json(double(int64_t(rng() % 100000)) / 128.0);
        case 4: {
            std::string s;
            size_t n = rng() % 12;
            for (size_t i = 0; i < n; ++i) s += char('a' + rng() % 26);
            if (rng() % 4 == 0) s += "\"\\\n\t\xc3\xa9";  // escapes + UTF-8
            return Json(s);
        }
        case 5: {
            Json arr = Json::array();
            size_t n = rng() % 4;
            for (size_t i = 0; i < n; ++i)
                arr.push_back(random_document(rng, depth - 1));
            return arr;
        }
        default: {
            Json obj = Json::object();
            size_t n = rng() % 4;
            for (size_t i = 0; i < n; ++i) {
                std::string key;
                size_t len = 1 + rng() % 8;
                for (size_t k = 0; k < len; ++k) key += char('a' + rng() % 26);
                obj[key] = random_document(rng, depth - 1);
            }
            return obj;
        }
    }
}

}  // namespace

TEST_SUITE("digest")
{
    TEST_CASE("known vectors")
    {
        CHECK(compute_digest("").hex == kSha256Empty);
        CHECK(compute_digest("abc").hex == kSha256Abc);
        CHECK(compute_digest("").algorithm == "sha256");
    }

    TEST_CASE("deterministic on a 1 MiB buffer")
    {
        std::mt19937_64 rng(42);
        std::string buffer = test::random_buffer(rng, 1 << 20);
        CHECK(compute_digest(buffer) == compute_digest(buffer));
    }

    TEST_CASE("single-bit changes always change the digest")
    {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 200; ++trial) {
            std::string input = test::random_buffer(rng, 1 + rng() % 512);
            std::string mutated = input;
            size_t bit = rng() % (mutated.size() * 8);
            mutated[bit / 8] = char(uint8_t(mutated[bit / 8]) ^ (1u << (bit % 8)));
            CHECK(compute_digest(input).hex != compute_digest(mutated).hex);
        }
    }

    TEST_CASE("digest validity rules")
    {
        Digest good = compute_digest("x");
        CHECK(good.valid());
        Digest upper = good;
        upper.hex[0] = 'A';
        CHECK_FALSE(upper.valid());
        Digest short_hex{"sha256", "abc123"};
        CHECK_FALSE(short_hex.valid());
        Digest wrong_algo{"md5", good.hex};
        CHECK_FALSE(wrong_algo.valid());
        CHECK_THROWS_AS(Digest::from_json(Json{{"algorithm", "sha256"},
                                               {"hex", "zz"}}),
                        Error);
    }
}

TEST_SUITE("canonical")
{
    TEST_CASE("key order independence")
    {
        Json a = canonical_parse(R"({"b":1,"a":2})");
        Json b = canonical_parse(R"({"a":2,"b":1})");
        CHECK(canonical_serialize(a) == canonical_serialize(b));
        CHECK(canonical_serialize(a) == R"({"a":2,"b":1})");
    }

    TEST_CASE("empty map is exactly {}")
    {
        CHECK(canonical_serialize(Json::object()) == "{}");
    }

    TEST_CASE("minimal separators and sorted keys")
    {
        Json doc{{"z", Json::array({1, 2})}, {"a", Json{{"k", "v"}}}};
        CHECK(canonical_serialize(doc) == R"({"a":{"k":"v"},"z":[1,2]})");
    }

    TEST_CASE("string escapes")
    {
        Json doc = Json("line\nquote\"back\\slash\ttab");
        CHECK(canonical_serialize(doc) == R"("line\nquote\"back\\slash\ttab")");
        CHECK(canonical_serialize(Json(std::string("\x01", 1))) ==
              std::string("\"\\u0001\""));
        // UTF-8 passes through untouched.
        CHECK(canonical_serialize(Json("caf\xc3\xa9")) == "\"caf\xc3\xa9\"");
    }

    TEST_CASE("number rendering")
    {
        CHECK(canonical_serialize(Json(0)) == "0");
        CHECK(canonical_serialize(Json(-17)) == "-17");
        CHECK(canonical_serialize(Json(uint64_t(18446744073709551615ull))) ==
              "18446744073709551615");
        CHECK(canonical_serialize(Json(0.1)) == "0.1");
        CHECK(canonical_serialize(Json(0.125)) == "0.125");
        // Shortest round-trip form; scientific when shorter.
        CHECK(canonical_serialize(Json(1e6)) == "1e+06");
    }

    TEST_CASE("non-finite numbers are not canonicalizable")
    {
        CHECK_THROWS_AS(canonical_serialize(Json(std::nan(""))), Error);
        try {
            canonical_serialize(Json(1.0 / 0.0 * 1.0));
            FAIL("expected NonCanonicalizable");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::NonCanonicalizable);
        }
    }

    TEST_CASE("serialize-parse-serialize fixpoint on random documents")
    {
        std::mt19937_64 rng(2026);
        for (int trial = 0; trial < 300; ++trial) {
            Json doc = random_document(rng, 3);
            std::string once = canonical_serialize(doc);
            std::string twice = canonical_serialize(canonical_parse(once));
            CHECK(once == twice);
            CHECK(is_canonical(once));
        }
    }

    TEST_CASE("is_canonical rejects reordered or spaced text")
    {
        CHECK(is_canonical(R"({"a":1,"b":2})"));
        CHECK_FALSE(is_canonical(R"({"b":2,"a":1})"));
        CHECK_FALSE(is_canonical(R"({"a": 1})"));
        CHECK_FALSE(is_canonical("not json"));
    }
}

TEST_SUITE("util")
{
    TEST_CASE("hex round trip")
    {
        std::mt19937_64 rng(5);
        std::string bytes = test::random_buffer(rng, 40);
        auto back = hex_to_bytes(bytes_to_hex(bytes));
        REQUIRE(back.has_value());
        CHECK(*back == bytes);
        CHECK_FALSE(hex_to_bytes("abc").has_value());   // odd length
        CHECK_FALSE(hex_to_bytes("zz").has_value());    // bad digit
    }

    TEST_CASE("base64 RFC 4648 vectors")
    {
        CHECK(base64_encode("") == "");
        CHECK(base64_encode("f") == "Zg==");
        CHECK(base64_encode("fo") == "Zm8=");
        CHECK(base64_encode("foo") == "Zm9v");
        CHECK(base64_encode("foob") == "Zm9vYg==");
        CHECK(*base64_decode("Zm9vYg==") == "foob");
        CHECK_FALSE(base64_decode("!!!").has_value());
        std::mt19937_64 rng(6);
        for (int i = 0; i < 50; ++i) {
            std::string bytes = test::random_buffer(rng, rng() % 100);
            CHECK(*base64_decode(base64_encode(bytes)) == bytes);
            CHECK(*base64url_decode(base64url_encode(bytes)) == bytes);
        }
        // URL-safe alphabet never emits +, / or padding.
        std::string token = base64url_encode("\xfb\xff\xfe");
        CHECK(token.find('+') == std::string::npos);
        CHECK(token.find('/') == std::string::npos);
        CHECK(token.find('=') == std::string::npos);
    }

    TEST_CASE("rfc3339 timestamps")
    {
        TimePoint tp = from_unix_seconds(1754700000);
        std::string text = format_rfc3339(tp);
        CHECK(text == "2025-08-09T00:40:00Z");
        auto parsed = parse_rfc3339(text);
        REQUIRE(parsed.has_value());
        CHECK(to_unix_seconds(*parsed) == 1754700000);
        CHECK_FALSE(parse_rfc3339("2025-08-09 00:40:00Z").has_value());
        CHECK_FALSE(parse_rfc3339("2025-13-09T00:40:00Z").has_value());
    }

    TEST_CASE("decimal strings round trip doubles")
    {
        std::mt19937_64 rng(9);
        for (int i = 0; i < 200; ++i) {
            double value = double(int64_t(rng())) / double(1 + (rng() % 4096));
            auto parsed = string_to_double(double_to_string(value));
            REQUIRE(parsed.has_value());
            CHECK(*parsed == value);
        }
        CHECK(double_to_string(0.01) == "0.01");
        CHECK_FALSE(string_to_double("1.2.3").has_value());
        CHECK_FALSE(string_to_double("").has_value());
    }

    TEST_CASE("artifact name validation")
    {
        CHECK(valid_artifact_name("model.bin"));
        CHECK(valid_artifact_name("a/b/c.txt"));
        CHECK_FALSE(valid_artifact_name(""));
        CHECK_FALSE(valid_artifact_name("/abs"));
        CHECK_FALSE(valid_artifact_name("../escape"));
        CHECK_FALSE(valid_artifact_name("a/../b"));
        CHECK_FALSE(valid_artifact_name("a//b"));
        CHECK_FALSE(valid_artifact_name("a/./b"));
        CHECK_FALSE(valid_artifact_name("back\\slash"));
    }

    TEST_CASE("uuid shape and uniqueness")
    {
        std::string id = random_uuid();
        REQUIRE(id.size() == 36);
        CHECK(id[8] == '-');
        CHECK(id[14] == '4');  // version nibble
        CHECK(random_uuid() != random_uuid());
    }

    TEST_CASE("constant time equality")
    {
        CHECK(constant_time_equal("same", "same"));
        CHECK_FALSE(constant_time_equal("same", "sane"));
        CHECK_FALSE(constant_time_equal("short", "longer"));
    }
}

TEST_SUITE("types")
{
    TEST_CASE("artifact ref validation")
    {
        ArtifactRef ref{"data.csv", compute_digest("x"), 1, "text/csv"};
        CHECK(ref.validate().empty());
        ref.name = "../evil";
        CHECK(ref.validate() == std::vector<std::string>{"name"});
        CHECK_THROWS_AS(ArtifactRef::from_json(ref.to_json()), Error);
    }

    TEST_CASE("training config rejects negative epochs by field name")
    {
        Json bad{{"epochs", -1}};
        try {
            TrainingConfig::from_json(bad);
            FAIL("expected ValidationFailed");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::ValidationFailed);
            REQUIRE(e.fields().size() == 1);
            CHECK(e.fields()[0] == "epochs");
        }
    }

    TEST_CASE("training config rejects unknown fields")
    {
        Json bad{{"epochs", 1}, {"command", "rm -rf /"}};
        try {
            TrainingConfig::from_json(bad);
            FAIL("expected ValidationFailed");
        } catch (const Error& e) {
            CHECK(e.fields() == std::vector<std::string>{"command"});
        }
    }

    TEST_CASE("training config accepts decimal-string or numeric learning rate")
    {
        Json str_lr{{"learning_rate", "0.05"}};
        CHECK(TrainingConfig::from_json(str_lr).learning_rate == 0.05);
        Json num_lr{{"learning_rate", 0.05}};
        CHECK(TrainingConfig::from_json(num_lr).learning_rate == 0.05);
        Json bad{{"task", "clustering"}};
        CHECK_THROWS_AS(TrainingConfig::from_json(bad), Error);
    }

    TEST_CASE("config validate flags non-positive values")
    {
        TrainingConfig cfg;
        cfg.batch_size = 0;
        cfg.learning_rate = 0;
        auto bad = cfg.validate();
        CHECK(std::find(bad.begin(), bad.end(), "batch_size") != bad.end());
        CHECK(std::find(bad.begin(), bad.end(), "learning_rate") != bad.end());
        TrainingConfig zero_epochs;
        zero_epochs.epochs = 0;  // identity runs are permitted
        CHECK(zero_epochs.validate().empty());
    }

    TEST_CASE("job record round trip")
    {
        JobRecord record;
        record.job_id = random_uuid();
        record.spec.dataset = {"u-1/d.csv", compute_digest("d"), 1, "text/csv"};
        record.spec.submitter = "alice";
        record.state = JobState::Failed;
        record.created_at = "2025-08-09T00:40:00Z";
        record.failure_reason = "train";
        Json j = record.to_json();
        JobRecord back = JobRecord::from_json(j);
        CHECK(back.job_id == record.job_id);
        CHECK(back.state == JobState::Failed);
        CHECK(back.failure_reason == record.failure_reason);
        CHECK(canonical_serialize(back.to_json()) == canonical_serialize(j));
    }

    TEST_CASE("state machine legality")
    {
        CHECK(legal_transition(JobState::Submitted, JobState::Running));
        CHECK(legal_transition(JobState::Running, JobState::Completed));
        CHECK(legal_transition(JobState::Running, JobState::Failed));
        CHECK(legal_transition(JobState::Submitted, JobState::Failed));
        CHECK_FALSE(legal_transition(JobState::Completed, JobState::Running));
        CHECK_FALSE(legal_transition(JobState::Failed, JobState::Running));
        CHECK_FALSE(legal_transition(JobState::Completed, JobState::Failed));
        CHECK_FALSE(legal_transition(JobState::Submitted, JobState::Completed));
    }

    TEST_CASE("environment snapshot rejects reversed wall clock")
    {
        EnvironmentSnapshot env;
        env.worker_image_digest = compute_digest("img");
        env.platform_version = "aibomgen/0.1.0";
        env.hostname = "host";
        env.cpu_model = "cpu";
        env.wall_clock_start = "2025-08-09T00:41:00Z";
        env.wall_clock_end = "2025-08-09T00:40:00Z";
        CHECK_THROWS_AS(EnvironmentSnapshot::from_json(env.to_json()), Error);
        env.wall_clock_end = "2025-08-09T00:42:00Z";
        CHECK_NOTHROW(EnvironmentSnapshot::from_json(env.to_json()));
    }

    TEST_CASE("metrics artifact form excludes attestation timing")
    {
        TrainingMetrics metrics;
        metrics.final_loss = 0.25;
        metrics.loss_per_epoch = {1.0, 0.5, 0.25};
        metrics.duration_seconds = 1.5;
        metrics.aibom_generation_seconds = 0.125;
        Json artifact = metrics.artifact_json();
        CHECK_FALSE(artifact.contains("aibom_generation_seconds"));
        TrainingMetrics back = TrainingMetrics::from_artifact_json(artifact);
        CHECK(back.final_loss == 0.25);
        CHECK(back.loss_per_epoch.size() == 3);
        TrainingMetrics full = TrainingMetrics::from_json(metrics.to_json());
        CHECK(full.aibom_generation_seconds == 0.125);
    }
}
