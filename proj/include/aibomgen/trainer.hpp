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

#include <optional>
#include <string>
#include <vector>

#include "aibomgen/types.hpp"

namespace aibomgen {

/// Tabular dataset parsed from CSV: header row, final column is the target.
struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<double> rows;  // row-major, n_rows x n_features
    std::vector<double> targets;
    size_t n_rows = 0;
    size_t n_features = 0;

    double at(size_t row, size_t feature) const
    {
        return rows[row * n_features + feature];
    }
};

struct ModelWeights {
    std::vector<double> weights;
    double bias = 0;
};

/// Strict CSV parse: header required, every cell a finite number, uniform
/// row length. Throws MalformedCsv.
Dataset parse_dataset(std::string_view bytes);

/// Mean loss of the linear model on the dataset: mean squared error for
/// regression, mean logistic loss for classification.
double loss(const Dataset& data, TaskKind task, const ModelWeights& model);

/// Analytic gradient of `loss` with respect to (weights, bias), accumulated
/// in fixed left-to-right row order.
ModelWeights loss_gradient(const Dataset& data, TaskKind task,
                           const ModelWeights& model);

/// Full-batch (or seeded mini-batch) gradient descent. Deterministic given
/// dataset bytes and config: zero initialization (or the provided warm-start
/// weights), fixed summation order, shuffle order derived from config.seed.
/// Throws NonFiniteLoss on divergence, ValidationFailed on shape/domain
/// mismatch.
std::pair<ModelWeights, TrainingMetrics> train(
    const Dataset& data, const TrainingConfig& config,
    const std::optional<ModelWeights>& warm_start = {});

/// Canonical little-endian IEEE-754 encoding with the 4-byte magic "RTM1":
/// magic, then each weight, then the bias.
std::string serialize_model(const ModelWeights& model);
ModelWeights parse_model(std::string_view bytes);

}  // namespace aibomgen
