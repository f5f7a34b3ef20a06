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
#include <span>
#include <string>
#include <vector>

#include "cvqos/ml/dataset.hpp"

namespace cvqos::ml {

inline constexpr int kDefaultBins = 10;
inline constexpr double kMaxJointCells = 1e6;

struct Binning {
  std::vector<int> codes;
  std::vector<double> edges;  // upper bounds of every bin but the last
  bool constant = false;

  int bins() const { return static_cast<int>(edges.size()) + 1; }
};

/// Equal-frequency discretization. Bin i spans (edge[i-1], edge[i]]; values
/// tied at an edge fall in the lower bin, so heavy ties yield fewer bins.
Binning bin_feature(std::span<const double> values, int bins = kDefaultBins);
int apply_bins(double value, std::span<const double> edges);

/// Entropy in bits of a discrete code sequence.
double entropy(std::span<const int> codes);

/// Plug-in mutual information I(X; Y) in bits, where X is the joint variable
/// formed by all columns of `x`. Throws Errc::Shape when lengths differ or the
/// joint histogram would exceed kMaxJointCells.
double mutual_information(const std::vector<std::span<const int>>& x, std::span<const int> y);
double mutual_information(std::span<const int> x, std::span<const int> y);

struct SelectionStep {
  std::string name;
  double joint_mi = 0.0;  // I(selected so far, including this one; Y)
  double gain = 0.0;
};

struct SelectionOptions {
  std::size_t max_features = 5;
  int bins = kDefaultBins;
  double epsilon = 1e-9;
};

struct SelectionResult {
  std::vector<SelectionStep> steps;
  std::vector<std::string> constant_features;  // skipped, never selected
  /// Selection ended because every remaining candidate would push the joint
  /// histogram past kMaxJointCells.
  bool cell_limit_reached = false;
};

/// Greedy maximal-dependency selection: each step adds the feature that
/// maximises the joint mutual information of the selected set with the label.
/// Candidates are scanned in name order and only a strictly larger value
/// replaces the current best, so ties resolve to the lexicographically first
/// name. Stops when the gain is at most epsilon or max_features is reached.
/// Candidates whose joint histogram would exceed kMaxJointCells are skipped.
SelectionResult md_select(const Dataset& data, const SelectionOptions& options = {});

std::string selection_to_csv(const SelectionResult& result);

}  // namespace cvqos::ml
