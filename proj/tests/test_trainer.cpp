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

#include <cmath>
#include <random>

#include "aibomgen/digest.hpp"
#include "aibomgen/errors.hpp"
#include "aibomgen/trainer.hpp"
#include "test_support.hpp"

using namespace aibomgen;

namespace {

// Closed-form least-squares oracle for one feature with intercept: solves
// the 2x2 normal equations directly.
std::pair<double, double> least_squares_1d(const std::vector<double>& x,
                                           const std::vector<double>& y)
{
    double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double det = n * sxx - sx * sx;
    double w = (n * sxy - sx * sy) / det;
    double b = (sy * sxx - sx * sxy) / det;
    return {w, b};
}

Dataset random_instance(std::mt19937_64& rng, size_t rows, size_t features,
                        bool binary_targets)
{
    std::uniform_real_distribution<double> uniform(-2.0, 2.0);
    Dataset data;
    data.n_rows = rows;
    data.n_features = features;
    for (size_t j = 0; j < features; ++j)
        data.feature_names.push_back("f" + std::to_string(j));
    for (size_t i = 0; i < rows * features; ++i)
        data.rows.push_back(uniform(rng));
    for (size_t i = 0; i < rows; ++i)
        data.targets.push_back(binary_targets ? double(rng() % 2) : uniform(rng));
    return data;
}

TrainingConfig config_for(TaskKind task, uint64_t epochs, double lr,
                          uint64_t batch = 1024, uint64_t seed = 0)
{
    TrainingConfig cfg;
    cfg.task = task;
    cfg.epochs = epochs;
    cfg.learning_rate = lr;
    cfg.batch_size = batch;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_SUITE("trainer.parse")
{
    TEST_CASE("minimal csv")
    {
        Dataset data = parse_dataset("x,y\n1,2\n");
        CHECK(data.n_rows == 1);
        CHECK(data.n_features == 1);
        CHECK(data.feature_names == std::vector<std::string>{"x"});
        CHECK(data.at(0, 0) == 1.0);
        CHECK(data.targets[0] == 2.0);
    }

    TEST_CASE("crlf and blank lines are tolerated")
    {
        Dataset data = parse_dataset("x,y\r\n1,2\r\n\n3,4\n");
        CHECK(data.n_rows == 2);
        CHECK(data.targets[1] == 4.0);
    }

    TEST_CASE("ragged rows are malformed")
    {
        try {
            parse_dataset("x,y\n1,2,3\n");
            FAIL("expected MalformedCsv");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::MalformedCsv);
        }
    }

    TEST_CASE("non-numeric cells are malformed")
    {
        CHECK_THROWS_AS(parse_dataset("x,y\nabc,2\n"), Error);
        CHECK_THROWS_AS(parse_dataset("x,y\n1,\n"), Error);
        CHECK_THROWS_AS(parse_dataset("x,y\nnan,2\n"), Error);
    }

    TEST_CASE("empty and header-only files are malformed")
    {
        CHECK_THROWS_AS(parse_dataset(""), Error);
        CHECK_THROWS_AS(parse_dataset("x,y\n"), Error);
        CHECK_THROWS_AS(parse_dataset("only-one-column\n1\n"), Error);
    }
}

TEST_SUITE("trainer.train")
{
    TEST_CASE("zero epochs is the identity")
    {
        Dataset data = parse_dataset("x,y\n1,1\n2,2\n");
        auto [model, metrics] =
            train(data, config_for(TaskKind::Regression, 0, 0.01));
        CHECK(model.weights == std::vector<double>{0.0});
        CHECK(model.bias == 0.0);
        CHECK(metrics.loss_per_epoch.empty());
        CHECK(metrics.final_loss == doctest::Approx(loss(data, TaskKind::Regression, model)));
    }

    TEST_CASE("regression on a perfect line converges to the oracle")
    {
        // Spec example: rows {(1,1),(2,2),(3,3)}, lr 0.01, enough epochs.
        Dataset data = parse_dataset("x,y\n1,1\n2,2\n3,3\n");
        auto [w_star, b_star] = least_squares_1d({1, 2, 3}, {1, 2, 3});
        CHECK(w_star == doctest::Approx(1.0));
        CHECK(b_star == doctest::Approx(0.0));

        auto [model, metrics] =
            train(data, config_for(TaskKind::Regression, 8000, 0.01));
        CHECK(std::abs(model.weights[0] - w_star) < 1e-3);
        CHECK(std::abs(model.bias - b_star) < 1e-3);
        CHECK(metrics.loss_per_epoch.size() == 8000);
    }

    TEST_CASE("noisy regression also matches the closed form")
    {
        std::vector<double> x = {0.5, 1.0, 2.0, 3.0, 4.5, 6.0};
        std::vector<double> y = {1.1, 1.9, 3.2, 3.8, 5.6, 6.9};
        std::string csv = "x,y\n";
        for (size_t i = 0; i < x.size(); ++i)
            csv += double_to_string(x[i]) + "," + double_to_string(y[i]) + "\n";
        Dataset data = parse_dataset(csv);
        auto [w_star, b_star] = least_squares_1d(x, y);
        auto [model, metrics] =
            train(data, config_for(TaskKind::Regression, 20000, 0.02));
        CHECK(std::abs(model.weights[0] - w_star) < 1e-3);
        CHECK(std::abs(model.bias - b_star) < 1e-3);
    }

    TEST_CASE("identical inputs give bit-identical serialized models")
    {
        Dataset data = parse_dataset(test::small_regression_csv());
        TrainingConfig cfg = config_for(TaskKind::Regression, 500, 0.01);
        auto first = train(data, cfg);
        auto second = train(data, cfg);
        CHECK(serialize_model(first.first) == serialize_model(second.first));
        CHECK(compute_digest(serialize_model(first.first)) ==
              compute_digest(serialize_model(second.first)));
    }

    TEST_CASE("analytic gradient matches central finite differences")
    {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> uniform(-1.0, 1.0);
        for (int trial = 0; trial < 60; ++trial) {
            bool classification = trial % 2 == 1;
            Dataset data = random_instance(rng, 3 + rng() % 18, 1 + rng() % 5,
                                           classification);
            TaskKind task = classification ? TaskKind::Classification
                                           : TaskKind::Regression;
            ModelWeights point;
            for (size_t j = 0; j < data.n_features; ++j)
                point.weights.push_back(uniform(rng));
            point.bias = uniform(rng);

            ModelWeights analytic = loss_gradient(data, task, point);

            const double h = 1e-5;
            auto numeric_partial = [&](size_t index) {
                ModelWeights lo = point, hi = point;
                if (index < data.n_features) {
                    lo.weights[index] -= h;
                    hi.weights[index] += h;
                } else {
                    lo.bias -= h;
                    hi.bias += h;
                }
                return (loss(data, task, hi) - loss(data, task, lo)) / (2 * h);
            };
            for (size_t j = 0; j <= data.n_features; ++j) {
                double a = j < data.n_features ? analytic.weights[j] : analytic.bias;
                double n = numeric_partial(j);
                double rel = std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-6});
                CHECK(rel < 1e-6);
            }
        }
    }

    TEST_CASE("loss is non-increasing for a small learning rate")
    {
        Dataset data = parse_dataset(test::small_regression_csv());
        auto [model, metrics] =
            train(data, config_for(TaskKind::Regression, 200, 0.005));
        for (size_t i = 1; i < metrics.loss_per_epoch.size(); ++i)
            CHECK(metrics.loss_per_epoch[i] <= metrics.loss_per_epoch[i - 1] + 1e-12);
    }

    TEST_CASE("divergence raises NonFiniteLoss")
    {
        Dataset data = parse_dataset(test::small_regression_csv());
        try {
            train(data, config_for(TaskKind::Regression, 200, 1e12));
            FAIL("expected NonFiniteLoss");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::NonFiniteLoss);
        }
    }

    TEST_CASE("classification: binary targets required, loss decreases")
    {
        Dataset data = parse_dataset("x,y\n-2,0\n-1,0\n1,1\n2,1\n");
        auto [model, metrics] =
            train(data, config_for(TaskKind::Classification, 300, 0.5));
        CHECK(metrics.loss_per_epoch.back() < metrics.loss_per_epoch.front());
        CHECK(model.weights[0] > 0);

        Dataset bad = parse_dataset("x,y\n1,2\n");
        CHECK_THROWS_AS(train(bad, config_for(TaskKind::Classification, 1, 0.1)),
                        Error);
    }

    TEST_CASE("mini-batch order is seed-deterministic")
    {
        std::mt19937_64 rng(33);
        Dataset data = random_instance(rng, 64, 3, false);
        TrainingConfig cfg = config_for(TaskKind::Regression, 10, 0.01, 8, 42);
        auto a = train(data, cfg);
        auto b = train(data, cfg);
        CHECK(serialize_model(a.first) == serialize_model(b.first));

        TrainingConfig other_seed = cfg;
        other_seed.seed = 43;
        auto c = train(data, other_seed);
        CHECK(serialize_model(a.first) != serialize_model(c.first));
    }

    TEST_CASE("batch size at least n_rows equals full batch")
    {
        Dataset data = parse_dataset(test::small_regression_csv());
        auto full = train(data, config_for(TaskKind::Regression, 50, 0.01, 5));
        auto big = train(data, config_for(TaskKind::Regression, 50, 0.01, 50000));
        CHECK(serialize_model(full.first) == serialize_model(big.first));
    }

    TEST_CASE("warm start continues from the given weights")
    {
        Dataset data = parse_dataset(test::small_regression_csv());
        auto first = train(data, config_for(TaskKind::Regression, 100, 0.01));
        auto resumed = train(data, config_for(TaskKind::Regression, 0, 0.01),
                             first.first);
        CHECK(serialize_model(resumed.first) == serialize_model(first.first));

        ModelWeights wrong_shape;
        wrong_shape.weights = {1.0, 2.0, 3.0};
        CHECK_THROWS_AS(
            train(data, config_for(TaskKind::Regression, 1, 0.01), wrong_shape),
            Error);
    }
}

TEST_SUITE("trainer.model")
{
    TEST_CASE("zero model with two features is 28 bytes")
    {
        ModelWeights model;
        model.weights = {0.0, 0.0};
        std::string bytes = serialize_model(model);
        CHECK(bytes.size() == 4 + 8 * 3);
        CHECK(bytes.substr(0, 4) == "RTM1");
    }

    TEST_CASE("serialize-parse-serialize fixpoint")
    {
        std::mt19937_64 rng(44);
        std::uniform_real_distribution<double> uniform(-100.0, 100.0);
        for (int trial = 0; trial < 50; ++trial) {
            ModelWeights model;
            size_t n = rng() % 6;
            for (size_t i = 0; i < n; ++i) model.weights.push_back(uniform(rng));
            model.bias = uniform(rng);
            std::string once = serialize_model(model);
            std::string twice = serialize_model(parse_model(once));
            CHECK(once == twice);
        }
    }

    TEST_CASE("differing weights give differing digests")
    {
        ModelWeights a;
        a.weights = {1.0};
        ModelWeights b;
        b.weights = {1.0000000001};
        CHECK(compute_digest(serialize_model(a)).hex !=
              compute_digest(serialize_model(b)).hex);
    }

    TEST_CASE("malformed model bytes are rejected")
    {
        CHECK_THROWS_AS(parse_model("not a model"), Error);
        CHECK_THROWS_AS(parse_model("RTM1abc"), Error);  // not 8-byte aligned
        CHECK_THROWS_AS(parse_model(""), Error);
        ModelWeights inf_model;
        inf_model.weights = {std::numeric_limits<double>::infinity()};
        CHECK_THROWS_AS(parse_model(serialize_model(inf_model)), Error);
    }

    TEST_CASE("golden digest pins cross-run determinism")
    {
        // Frozen from a reference run; any drift in parsing, summation
        // order, shuffle, or serialization shows up here.
        Dataset data = parse_dataset(test::small_regression_csv());
        TrainingConfig cfg;
        cfg.task = TaskKind::Regression;
        cfg.epochs = 100;
        cfg.learning_rate = 0.01;
        cfg.batch_size = 2;
        cfg.seed = 12345;
        auto [model, metrics] = train(data, cfg);
        CHECK(compute_digest(serialize_model(model)).hex ==
              "7668dc9adf6d3ded403af9a0b4475341d05731b2a0ba55e4e01dc82bfca1c511");
    }
}
