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

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvqos/ingest.hpp"

namespace cvqos::ml {

enum class ClassScheme { Binary50, Multiclass };

std::string_view to_string(ClassScheme scheme);
ClassScheme parse_scheme(std::string_view text);

/// Upper class bounds in ms: {50} or {50, 100}. A delay equal to a bound
/// belongs to the lower class.
std::vector<double> class_thresholds(ClassScheme scheme);
int class_count(ClassScheme scheme);
int label_for(double delay_ms, ClassScheme scheme);
std::string class_name(ClassScheme scheme, int label);

inline constexpr std::string_view kExpectedDelay = "expected_e2e_delay_ms";
/// Every feature a dataset may draw from fused records.
const std::vector<std::string>& known_features();

/// Per-column mean and standard deviation; a zero deviation is stored as 1 so
/// the transform stays finite.
template <typename Scalar>
struct Normalization {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> stddev;

  static Normalization fit(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x) {
    Normalization n;
    const auto rows = static_cast<Scalar>(x.rows());
    n.mean = x.colwise().mean().transpose();
    n.stddev = ((x.rowwise() - n.mean.transpose()).array().square().colwise().sum() / rows).sqrt().transpose();
    for (Eigen::Index j = 0; j < n.stddev.size(); ++j) {
      if (!(n.stddev(j) > Scalar(0))) n.stddev(j) = Scalar(1);
    }
    return n;
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> apply(
      const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x) const {
    return (x.rowwise() - mean.transpose()).array().rowwise() / stddev.transpose().array();
  }
};

struct Dataset {
  Eigen::MatrixXd features;  // rows are packets, columns follow `names`
  std::vector<int> labels;
  std::vector<std::string> names;
  ClassScheme scheme = ClassScheme::Binary50;
  Normalization<double> normalization;

  std::size_t dropped_rows = 0;                // rows with an absent feature
  std::vector<std::string> dropped_features;  // constant columns removed

  std::size_t rows() const { return labels.size(); }
  std::size_t cols() const { return names.size(); }
  std::vector<std::uint64_t> class_counts() const;

  Dataset subset(std::span<const std::size_t> rows) const;
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Builds a dataset from explicit columns. Throws Errc::Shape on a length
/// mismatch. Constant columns are dropped and listed in dropped_features.
Dataset make_dataset(Eigen::MatrixXd features, std::vector<int> labels, std::vector<std::string> names,
                     ClassScheme scheme);

enum class ExpectedDelayMode {
  Batch,   // per-eNB mean over all delivered packets (crowdsourced)
  Online,  // running mean of earlier packets on the same eNB
};

struct FeatureOptions {
  std::vector<std::string> features = {std::string(kExpectedDelay), "speed_kmph", "sinr_db", "rsrp_dbm",
                                       "rssi_dbm"};
  ExpectedDelayMode expected_delay = ExpectedDelayMode::Batch;
  std::size_t online_warmup = 10;
  /// Batch mode: use this table (e.g. from an earlier drive) instead of
  /// computing it from the records.
  const std::map<std::uint32_t, double>* expected_delay_table = nullptr;
};

/// One row per delivered packet whose requested features are all present.
/// OAI values supply the radio KPIs.
Dataset build_dataset(std::span<const ingest::FusedRecord> records, ClassScheme scheme,
                      const FeatureOptions& options = {});

/// The expected-delay value for each record under `options`, empty where no
/// estimate exists.
std::vector<std::optional<double>> expected_delay_feature(std::span<const ingest::FusedRecord> records,
                                                          const FeatureOptions& options);

}  // namespace cvqos::ml
