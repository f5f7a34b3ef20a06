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

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cvqos/ml/dataset.hpp"

namespace cvqos::ml {

/// Rows are true classes, columns predicted classes.
using Confusion = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

Confusion confusion_matrix(std::span<const int> truth, std::span<const int> predicted, int classes);

struct ClassMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double support = 0.0;  // share of evaluated rows in this class
  std::uint64_t count = 0;
  bool precision_defined = true;  // false when nothing was predicted as this class
  bool recall_defined = true;     // false when the class never occurs
};

struct ClassReport {
  std::vector<ClassMetrics> classes;
  double accuracy = 0.0;
  std::uint64_t total = 0;
  Confusion confusion;
};

/// Harmonic mean; 0 when both inputs are 0.
double f1_score(double precision, double recall);

/// Support-weighted mean of per-class recalls, which equals accuracy.
double accuracy_from(std::span<const double> supports, std::span<const double> recalls);

/// Undefined ratios are reported as 0 with the matching flag cleared.
ClassReport report_from_confusion(const Confusion& confusion, ClassScheme scheme);

std::string report_to_csv(const ClassReport& report);
std::string format_report(const ClassReport& report);

}  // namespace cvqos::ml
