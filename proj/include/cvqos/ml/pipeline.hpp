// Copyright 2026 The cvqos Authors
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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cvqos/ml/dataset.hpp"
#include "cvqos/ml/metrics.hpp"
#include "cvqos/ml/mlp.hpp"

namespace cvqos::ml {

/// Most frequent label; ties go to the lowest class.
int majority_label(std::span<const int> labels, int classes);

struct CvOptions {
  int folds = 5;
  std::uint64_t seed = 1;
  Hyperparameters hyper;
};

struct CvResult {
  ClassReport model;     // from the confusion matrices pooled over folds
  ClassReport baseline;  // majority class of each training split
  std::vector<double> fold_losses;
};

/// Stratified k-fold evaluation. Fold i trains with seed hyper.seed + i.
CvResult cross_validate(const Dataset& data, const CvOptions& options = {});

struct TuneCandidate {
  double learning_rate = 0.0;
  int hidden = 0;
  double accuracy = 0.0;
};

struct TuneResult {
  std::vector<TuneCandidate> grid;
  Hyperparameters best;
};

/// Grid search by cross-validated accuracy; the first best candidate in grid
/// order wins ties.
TuneResult tune(const Dataset& data, std::span<const double> learning_rates, std::span<const int> hidden_sizes,
                const CvOptions& options = {});

/// Text model file: header "cvqos-mlp 1", metadata, then the normalization and
/// weights with round-trip precision.
std::string serialize_model(const TrainedModel& model);
TrainedModel parse_model(std::string_view text);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace cvqos::ml
