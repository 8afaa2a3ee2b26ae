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

#include "aibomgen/trainer.hpp"

#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>

#include "aibomgen/errors.hpp"

namespace aibomgen {

namespace {

[[noreturn]] void malformed_csv(const std::string& what)
{
    throw Error(Errc::MalformedCsv, what);
}

// Splits one CSV line on commas. Quoting is not supported: cells are
// numbers and header identifiers only.
std::vector<std::string_view> split_line(std::string_view line)
{
    std::vector<std::string_view> cells;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

double parse_cell(std::string_view cell, size_t line_no)
{
    double value = 0;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
        !std::isfinite(value))
        malformed_csv("line " + std::to_string(line_no) + ": non-numeric cell \"" +
                      std::string(cell) + "\"");
    return value;
}

double sigmoid(double z)
{
    return 1.0 / (1.0 + std::exp(-z));
}

double predict(const Dataset& data, const ModelWeights& model, size_t row)
{
    double z = model.bias;
    for (size_t j = 0; j < data.n_features; ++j)
        z += model.weights[j] * data.at(row, j);
    return z;
}

// 64-bit linear congruential generator (Knuth MMIX constants:
// a = 6364136223846793005, c = 1442695040888963407, modulus 2^64). Drives
// the reproducible mini-batch shuffle.
struct Lcg64 {
    uint64_t state;
    explicit Lcg64(uint64_t seed) : state(seed) {}
    uint64_t next()
    {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return state;
    }
    // Uniform in [0, bound) via rejection-free modulo; bias is irrelevant
    // here because only reproducibility matters, not statistical quality.
    uint64_t next_below(uint64_t bound) { return next() % bound; }
};

void check_domain(const Dataset& data, const TrainingConfig& config)
{
    if (config.task == TaskKind::Classification)
        for (double t : data.targets)
            if (t != 0.0 && t != 1.0)
                throw Error(Errc::ValidationFailed,
                            "classification targets must be 0 or 1", {"targets"});
}

void apply_batch(const Dataset& data, TaskKind task, ModelWeights& model,
                 double learning_rate, const std::vector<size_t>& order,
                 size_t begin, size_t end)
{
    size_t count = end - begin;
    std::vector<double> grad_w(data.n_features, 0.0);
    double grad_b = 0.0;
    for (size_t k = begin; k < end; ++k) {
        size_t row = order[k];
        double z = predict(data, model, row);
        double residual;
        if (task == TaskKind::Regression)
            residual = 2.0 * (z - data.targets[row]);
        else
            residual = sigmoid(z) - data.targets[row];
        for (size_t j = 0; j < data.n_features; ++j)
            grad_w[j] += residual * data.at(row, j);
        grad_b += residual;
    }
    double scale = learning_rate / double(count);
    for (size_t j = 0; j < data.n_features; ++j)
        model.weights[j] -= scale * grad_w[j];
    model.bias -= scale * grad_b;
}

}  // namespace

Dataset parse_dataset(std::string_view bytes)
{
    if (bytes.empty()) malformed_csv("empty file");

    Dataset data;
    size_t pos = 0;
    size_t line_no = 0;
    size_t columns = 0;
    while (pos <= bytes.size()) {
        size_t nl = bytes.find('\n', pos);
        std::string_view line = nl == std::string_view::npos
                                    ? bytes.substr(pos)
                                    : bytes.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? bytes.size() + 1 : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            if (pos > bytes.size()) break;
            continue;  // skip blank lines
        }
        ++line_no;
        auto cells = split_line(line);
        if (line_no == 1) {
            columns = cells.size();
            if (columns < 2)
                malformed_csv("header must name at least one feature and a target");
            for (size_t i = 0; i + 1 < columns; ++i) {
                if (cells[i].empty()) malformed_csv("empty header cell");
                data.feature_names.emplace_back(cells[i]);
            }
            data.n_features = columns - 1;
            continue;
        }
        if (cells.size() != columns)
            malformed_csv("line " + std::to_string(line_no) + ": expected " +
                          std::to_string(columns) + " cells, got " +
                          std::to_string(cells.size()));
        for (size_t i = 0; i + 1 < columns; ++i)
            data.rows.push_back(parse_cell(cells[i], line_no));
        data.targets.push_back(parse_cell(cells.back(), line_no));
    }
    data.n_rows = data.targets.size();
    if (data.n_rows == 0) malformed_csv("no data rows");
    return data;
}

double loss(const Dataset& data, TaskKind task, const ModelWeights& model)
{
    double total = 0.0;
    for (size_t i = 0; i < data.n_rows; ++i) {
        double z = predict(data, model, i);
        if (task == TaskKind::Regression) {
            double r = z - data.targets[i];
            total += r * r;
        } else {
            double p = sigmoid(z);
            double y = data.targets[i];
            total += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
        }
    }
    return total / double(data.n_rows);
}

ModelWeights loss_gradient(const Dataset& data, TaskKind task,
                           const ModelWeights& model)
{
    ModelWeights grad;
    grad.weights.assign(data.n_features, 0.0);
    grad.bias = 0.0;
    for (size_t i = 0; i < data.n_rows; ++i) {
        double z = predict(data, model, i);
        double residual;
        if (task == TaskKind::Regression)
            residual = 2.0 * (z - data.targets[i]);
        else
            residual = sigmoid(z) - data.targets[i];
        for (size_t j = 0; j < data.n_features; ++j)
            grad.weights[j] += residual * data.at(i, j);
        grad.bias += residual;
    }
    double inv_n = 1.0 / double(data.n_rows);
    for (double& g : grad.weights) g *= inv_n;
    grad.bias *= inv_n;
    return grad;
}

std::pair<ModelWeights, TrainingMetrics> train(
    const Dataset& data, const TrainingConfig& config,
    const std::optional<ModelWeights>& warm_start)
{
    auto started = std::chrono::steady_clock::now();

    auto bad = config.validate();
    if (!bad.empty())
        throw Error(Errc::ValidationFailed, "invalid training config", bad);
    check_domain(data, config);

    ModelWeights model;
    if (warm_start) {
        if (warm_start->weights.size() != data.n_features)
            throw Error(Errc::ValidationFailed,
                        "base model feature count does not match dataset",
                        {"base_model"});
        model = *warm_start;
    } else {
        model.weights.assign(data.n_features, 0.0);
        model.bias = 0.0;
    }

    TrainingMetrics metrics;
    bool full_batch = config.batch_size >= data.n_rows;
    std::vector<size_t> order(data.n_rows);
    std::iota(order.begin(), order.end(), size_t{0});
    Lcg64 rng(config.seed);

    for (uint64_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (full_batch) {
            apply_batch(data, config.task, model, config.learning_rate, order,
                        0, data.n_rows);
        } else {
            // Fisher-Yates shuffle driven by the seeded LCG; generator state
            // carries across epochs.
            for (size_t i = data.n_rows - 1; i > 0; --i) {
                size_t j = size_t(rng.next_below(uint64_t(i) + 1));
                std::swap(order[i], order[j]);
            }
            for (size_t begin = 0; begin < data.n_rows;
                 begin += size_t(config.batch_size)) {
                size_t end =
                    std::min(begin + size_t(config.batch_size), data.n_rows);
                apply_batch(data, config.task, model, config.learning_rate,
                            order, begin, end);
            }
        }
        double epoch_loss = loss(data, config.task, model);
        if (!std::isfinite(epoch_loss))
            throw Error(Errc::NonFiniteLoss,
                        "loss diverged at epoch " + std::to_string(epoch + 1));
        metrics.loss_per_epoch.push_back(epoch_loss);
    }

    metrics.final_loss = metrics.loss_per_epoch.empty()
                             ? loss(data, config.task, model)
                             : metrics.loss_per_epoch.back();
    metrics.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    return {std::move(model), std::move(metrics)};
}

std::string serialize_model(const ModelWeights& model)
{
    std::string out = "RTM1";
    out.reserve(4 + 8 * (model.weights.size() + 1));
    auto append_double = [&out](double v) {
        uint64_t bits = std::bit_cast<uint64_t>(v);
        for (int i = 0; i < 8; ++i) out += char((bits >> (8 * i)) & 0xff);
    };
    for (double w : model.weights) append_double(w);
    append_double(model.bias);
    return out;
}

ModelWeights parse_model(std::string_view bytes)
{
    if (bytes.size() < 12 || bytes.substr(0, 4) != "RTM1" ||
        (bytes.size() - 4) % 8 != 0)
        throw Error(Errc::MalformedModel, "not an RTM1 model");
    size_t values = (bytes.size() - 4) / 8;
    auto read_double = [&bytes](size_t index) {
        uint64_t bits = 0;
        for (int i = 7; i >= 0; --i)
            bits = (bits << 8) | uint8_t(bytes[4 + index * 8 + size_t(i)]);
        return std::bit_cast<double>(bits);
    };
    ModelWeights model;
    model.weights.reserve(values - 1);
    for (size_t k = 0; k + 1 < values; ++k) {
        double v = read_double(k);
        if (!std::isfinite(v)) throw Error(Errc::MalformedModel, "non-finite weight");
        model.weights.push_back(v);
    }
    model.bias = read_double(values - 1);
    if (!std::isfinite(model.bias))
        throw Error(Errc::MalformedModel, "non-finite bias");
    return model;
}

}  // namespace aibomgen
