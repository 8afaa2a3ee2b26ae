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

#include <barrier>
#include <random>
#include <thread>

#include "aibomgen/errors.hpp"
#include "aibomgen/orchestrator.hpp"
#include "test_support.hpp"

using namespace aibomgen;

namespace {

struct OrchFixture {
    test::TempDir dir{"orch"};
    test::FakeClock clock;
    Store store{dir.sub("data"), "secret", clock.fn()};
    Orchestrator orch{dir.sub("state"), store, clock.fn(), /*lease=*/60,
                      /*max_attempts=*/3};

    ArtifactRef stage_dataset(const std::string& subject = "alice",
                              const std::string& csv = test::small_regression_csv())
    {
        std::string ns = "u-" + random_uuid().substr(0, 8);
        store.set_namespace_owner(ns, subject);
        ArtifactRef ref = store.put_object({ns, "data.csv"}, csv, "text/csv");
        ref.name = ns + "/" + ref.name;
        return ref;
    }

    JobSpec spec_for(const ArtifactRef& dataset,
                     const std::string& subject = "alice")
    {
        JobSpec spec;
        spec.dataset = dataset;
        spec.config.epochs = 2;
        spec.config.learning_rate = 0.01;
        spec.submitter = subject;
        return spec;
    }

    std::vector<ArtifactRef> full_outputs(const std::string& job_id)
    {
        auto ref = [](const std::string& name) {
            return ArtifactRef{name, compute_digest(name), name.size(),
                               "application/octet-stream"};
        };
        return {ref(model_object_name()), ref(metrics_object_name()),
                ref(link_object_name(job_id)), ref(aibom_object_name(job_id))};
    }
};

}  // namespace

TEST_SUITE("orchestrator")
{
    TEST_CASE("valid spec lands in SUBMITTED with a queue entry")
    {
        OrchFixture fx;
        JobRecord record = fx.orch.submit_job(fx.spec_for(fx.stage_dataset()),
                                              "alice");
        CHECK(record.state == JobState::Submitted);
        CHECK_FALSE(record.job_id.empty());
        CHECK(fx.orch.queue_depth() == 1);
        JobRecord fetched = fx.orch.job_status(record.job_id, "alice");
        CHECK(fetched.state == JobState::Submitted);
    }

    TEST_CASE("invalid config is rejected with field names")
    {
        OrchFixture fx;
        JobSpec spec = fx.spec_for(fx.stage_dataset());
        spec.config.batch_size = 0;
        try {
            fx.orch.submit_job(spec, "alice");
            FAIL("expected ValidationFailed");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::ValidationFailed);
            CHECK(e.fields() == std::vector<std::string>{"batch_size"});
        }
    }

    TEST_CASE("dataset pointing at a missing object is rejected")
    {
        OrchFixture fx;
        JobSpec spec = fx.spec_for(fx.stage_dataset());
        spec.dataset.name = "u-gone/data.csv";
        try {
            fx.orch.submit_job(spec, "alice");
            FAIL("expected ValidationFailed");
        } catch (const Error& e) {
            CHECK(e.fields() == std::vector<std::string>{"dataset"});
        }
    }

    TEST_CASE("dataset digest must match the staged object")
    {
        OrchFixture fx;
        JobSpec spec = fx.spec_for(fx.stage_dataset());
        spec.dataset.digest = compute_digest("different bytes");
        CHECK_THROWS_AS(fx.orch.submit_job(spec, "alice"), Error);
    }

    TEST_CASE("dataset without a plausible CSV header is rejected")
    {
        OrchFixture fx;
        ArtifactRef not_csv = fx.stage_dataset("alice", "no-commas-here\n1\n");
        CHECK_THROWS_AS(fx.orch.submit_job(fx.spec_for(not_csv), "alice"), Error);
    }

    TEST_CASE("claim on an empty queue returns nothing")
    {
        OrchFixture fx;
        fx.orch.register_worker("w0");
        CHECK_FALSE(fx.orch.claim_job("w0").has_value());
    }

    TEST_CASE("unregistered workers cannot claim")
    {
        OrchFixture fx;
        CHECK_THROWS_AS(fx.orch.claim_job("ghost"), Error);
    }

    TEST_CASE("claim moves the job to RUNNING and leases it")
    {
        OrchFixture fx;
        JobRecord record = fx.orch.submit_job(fx.spec_for(fx.stage_dataset()),
                                              "alice");
        fx.orch.register_worker("w0");
        auto claimed = fx.orch.claim_job("w0");
        REQUIRE(claimed.has_value());
        CHECK(claimed->first.job_id == record.job_id);
        CHECK(claimed->first.state == JobState::Running);
        CHECK(claimed->second.attempt == 1);
        // One live lease per job.
        CHECK_FALSE(fx.orch.claim_job("w0").has_value());
    }

    TEST_CASE("two workers racing for one job: exactly one obtains it")
    {
        OrchFixture fx;
        fx.orch.submit_job(fx.spec_for(fx.stage_dataset()), "alice");
        fx.orch.register_worker("w0");
        fx.orch.register_worker("w1");
        std::atomic<int> wins{0};
        std::barrier gate(2);
        auto racer = [&](const std::string& id) {
            gate.arrive_and_wait();
            if (fx.orch.claim_job(id)) wins.fetch_add(1);
        };
        std::thread a(racer, "w0"), b(racer, "w1");
        a.join();
        b.join();
        CHECK(wins.load() == 1);
    }

    TEST_CASE("expired lease redelivers with attempt+1")
    {
        // Fault injection: shortened lease plus a fake clock.
        OrchFixture fx;
        JobRecord record = fx.orch.submit_job(fx.spec_for(fx.stage_dataset()),
                                              "alice");
        fx.orch.register_worker("w0");
        auto first = fx.orch.claim_job("w0");
        REQUIRE(first.has_value());
        CHECK(first->second.attempt == 1);

        fx.clock.advance(61);  // past the 60 s lease
        auto second = fx.orch.claim_job("w0");
        REQUIRE(second.has_value());
        CHECK(second->first.job_id == record.job_id);
        CHECK(second->second.attempt == 2);
        CHECK(second->first.state == JobState::Running);

        // The stale first lease can no longer complete.
        CHECK_THROWS_AS(
            fx.orch.complete_job(record.job_id, first->second,
                                 fx.full_outputs(record.job_id)),
            Error);
    }

    TEST_CASE("attempts exhaust into FAILED(retries exhausted)")
    {
        OrchFixture fx;
        JobRecord record = fx.orch.submit_job(fx.spec_for(fx.stage_dataset()),
                                              "alice");
        fx.orch.register_worker("w0");
        for (int attempt = 0; attempt < 3; ++attempt) {
            auto claimed = fx.orch.claim_job("w0");
            REQUIRE(claimed.has_value());
            fx.clock.advance(61);
        }
        fx.orch.tick();
        JobRecord finished = fx.orch.job_status(record.job_id, "alice");
        CHECK(finished.state == JobState::Failed);
        CHECK(*finished.failure_reason == "retries exhausted");
        CHECK(fx.orch.queue_depth() == 0);
    }

    TEST_CASE("completion requires the full output set")
    {
        OrchFixture fx;
        JobRecord record = fx.orch.submit_job(fx.spec_for(fx.stage_dataset()),
                                              "alice");
        fx.orch.register_worker("w0");
        auto claimed = fx.orch.claim_job("w0");
        REQUIRE(claimed.has_value());

        auto outputs = fx.full_outputs(record.job_id);
        auto without_aibom = outputs;
        without_aibom.pop_back();
        try {
            fx.orch.complete_job(record.job_id, claimed->second, without_aibom);
            FAIL("expected MissingAttestation");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::MissingAttestation);
        }
        // Refusal leaves the job RUNNING until the lease expires.
        CHECK(fx.orch.job_status(record.job_id, "alice").state ==
              JobState::Running);

        JobRecord done =
            fx.orch.complete_job(record.job_id, claimed->second, outputs);
        CHECK(done.state == JobState::Completed);
        CHECK(done.outputs.size() == 4);
        CHECK(done.finished_at.has_value());
    }

    TEST_CASE("duplicate completion with identical outputs is idempotent")
    {
        OrchFixture fx;
        JobRecord record = fx.orch.submit_job(fx.spec_for(fx.stage_dataset()),
                                              "alice");
        fx.orch.register_worker("w0");
        auto claimed = fx.orch.claim_job("w0");
        auto outputs = fx.full_outputs(record.job_id);
        fx.orch.complete_job(record.job_id, claimed->second, outputs);
        JobRecord again =
            fx.orch.complete_job(record.job_id, claimed->second, outputs);
        CHECK(again.state == JobState::Completed);

        auto different = outputs;
        different[0].digest = compute_digest("other");
        CHECK_THROWS_AS(
            fx.orch.complete_job(record.job_id, claimed->second, different),
            Error);
    }

    TEST_CASE("fail_job records the reason")
    {
        OrchFixture fx;
        JobRecord record = fx.orch.submit_job(fx.spec_for(fx.stage_dataset()),
                                              "alice");
        fx.orch.register_worker("w0");
        auto claimed = fx.orch.claim_job("w0");
        JobRecord failed = fx.orch.fail_job(record.job_id, claimed->second, "train");
        CHECK(failed.state == JobState::Failed);
        CHECK(*failed.failure_reason == "train");
        CHECK(fx.orch.queue_depth() == 0);
    }

    TEST_CASE("status is owner-only; unknown ids are NotFound")
    {
        OrchFixture fx;
        JobRecord record = fx.orch.submit_job(fx.spec_for(fx.stage_dataset()),
                                              "alice");
        try {
            fx.orch.job_status(record.job_id, "mallory");
            FAIL("expected Unauthorized");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::Unauthorized);
        }
        try {
            fx.orch.job_status("no-such-job", "alice");
            FAIL("expected NotFound");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::NotFound);
        }
    }

    TEST_CASE("state survives a restart")
    {
        OrchFixture fx;
        JobRecord record = fx.orch.submit_job(fx.spec_for(fx.stage_dataset()),
                                              "alice");
        Orchestrator reborn(fx.dir.sub("state"), fx.store, fx.clock.fn(), 60, 3);
        JobRecord restored = reborn.job_status(record.job_id, "alice");
        CHECK(restored.state == JobState::Submitted);
        CHECK(reborn.queue_depth() == 1);
        reborn.register_worker("w0");
        CHECK(reborn.claim_job("w0").has_value());
    }

    TEST_CASE("model-based random interleavings never break the state machine")
    {
        // Shadow model: per-job expected state plus lease bookkeeping. The
        // acceptance suite runs the full 10,000-operation version; this is
        // the fast regression copy.
        OrchFixture fx;
        fx.orch.register_worker("w0");
        std::mt19937_64 rng(99);

        struct Shadow {
            JobState state;
            std::optional<Lease> lease;
        };
        std::map<std::string, Shadow> shadow;

        for (int op = 0; op < 1500; ++op) {
            switch (rng() % 6) {
                case 0: {
                    if (shadow.size() > 40) break;
                    JobRecord record = fx.orch.submit_job(
                        fx.spec_for(fx.stage_dataset()), "alice");
                    shadow[record.job_id] = {JobState::Submitted, std::nullopt};
                    break;
                }
                case 1: {
                    auto claimed = fx.orch.claim_job("w0");
                    if (claimed) {
                        auto& s = shadow.at(claimed->first.job_id);
                        CHECK(claimed->first.state == JobState::Running);
                        s.state = JobState::Running;
                        s.lease = claimed->second;
                    }
                    break;
                }
                case 2: {
                    for (auto& [job_id, s] : shadow) {
                        if (!s.lease) continue;
                        bool ok = true;
                        try {
                            fx.orch.complete_job(job_id, *s.lease,
                                                 fx.full_outputs(job_id));
                        } catch (const Error&) {
                            ok = false;  // stale lease after expiry
                        }
                        if (ok) s.state = JobState::Completed;
                        s.lease.reset();
                        break;
                    }
                    break;
                }
                case 3: {
                    for (auto& [job_id, s] : shadow) {
                        if (!s.lease) continue;
                        bool ok = true;
                        try {
                            fx.orch.fail_job(job_id, *s.lease, "train");
                        } catch (const Error&) {
                            ok = false;
                        }
                        if (ok) s.state = JobState::Failed;
                        s.lease.reset();
                        break;
                    }
                    break;
                }
                case 4:
                    fx.clock.advance(rng() % 90);
                    fx.orch.tick();
                    break;
                default:
                    fx.orch.tick();
                    break;
            }

            // Invariants after every step.
            for (const auto& [job_id, s] : shadow) {
                JobRecord record = fx.orch.job_status(job_id, "alice");
                if (s.state == JobState::Completed) {
                    CHECK(record.state == JobState::Completed);
                    bool has_link = false, has_aibom = false;
                    for (const auto& ref : record.outputs) {
                        has_link |= ref.name == link_object_name(job_id);
                        has_aibom |= ref.name == aibom_object_name(job_id);
                    }
                    CHECK(has_link);
                    CHECK(has_aibom);
                }
                if (s.state == JobState::Failed)
                    CHECK(record.state == JobState::Failed);
                // No regression out of terminal states.
                if (record.state == JobState::Completed ||
                    record.state == JobState::Failed)
                    CHECK(record.finished_at.has_value());
            }
        }
    }
}
