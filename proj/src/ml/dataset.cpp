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

#include "cvqos/ml/dataset.hpp"

#include <algorithm>

#include "cvqos/analyze.hpp"
#include "cvqos/error.hpp"

namespace cvqos::ml {

std::string_view to_string(ClassScheme scheme) {
  return scheme == ClassScheme::Binary50 ? "binary50" : "multiclass";
}

ClassScheme parse_scheme(std::string_view text) {
  if (text == "binary50") return ClassScheme::Binary50;
  if (text == "multiclass") return ClassScheme::Multiclass;
  throw Error(Errc::Usage, "unknown class scheme '" + std::string(text) + "' (binary50|multiclass)");
}

std::vector<double> class_thresholds(ClassScheme scheme) {
  return scheme == ClassScheme::Binary50 ? std::vector<double>{50.0} : std::vector<double>{50.0, 100.0};
}

int class_count(ClassScheme scheme) { return scheme == ClassScheme::Binary50 ? 2 : 3; }

int label_for(double delay_ms, ClassScheme scheme) {
  int label = 0;
  for (double t : class_thresholds(scheme)) {
    if (delay_ms > t) ++label;
  }
  return label;
}

std::string class_name(ClassScheme scheme, int label) {
  if (scheme == ClassScheme::Binary50) return label == 0 ? "<=50ms" : ">50ms";
  switch (label) {
    case 0: return "<=50ms";
    case 1: return ">50ms&<=100ms";
    default: return ">100ms";
  }
}

const std::vector<std::string>& known_features() {
  static const std::vector<std::string> names = {std::string(kExpectedDelay), "speed_kmph", "sinr_db",
                                                 "rsrp_dbm", "rssi_dbm", "rsrq_db", "noise_power_dbm",
                                                 "rx_power_dbm"};
  return names;
}

std::vector<std::uint64_t> Dataset::class_counts() const {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(class_count(scheme)), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.names = names;
  out.scheme = scheme;
  out.normalization = normalization;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
  }
  return out;
}

std::optional<std::size_t> Dataset::column(std::string_view name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

Dataset make_dataset(Eigen::MatrixXd features, std::vector<int> labels, std::vector<std::string> names,
                     ClassScheme scheme) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw Error(Errc::Shape, "feature rows (" + std::to_string(features.rows()) + ") != labels (" +
                                 std::to_string(labels.size()) + ")");
  }
  if (static_cast<std::size_t>(features.cols()) != names.size()) {
    throw Error(Errc::Shape, "feature columns do not match names");
  }
  const int k = class_count(scheme);
  for (int y : labels) {
    if (y < 0 || y >= k) throw Error(Errc::Shape, "label " + std::to_string(y) + " outside the class scheme");
  }

  Dataset d;
  d.scheme = scheme;
  d.labels = std::move(labels);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    const auto col = features.col(j);
    if (col.size() > 0 && (col.array() != col(0)).any()) {
      keep.push_back(j);
      d.names.push_back(names[static_cast<std::size_t>(j)]);
    } else {
      d.dropped_features.push_back(names[static_cast<std::size_t>(j)]);
    }
  }
  d.features.resize(features.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) d.features.col(static_cast<Eigen::Index>(j)) = features.col(keep[j]);
  if (d.features.rows() > 0) d.normalization = Normalization<double>::fit(d.features);
  return d;
}

std::vector<std::optional<double>> expected_delay_feature(std::span<const ingest::FusedRecord> records,
                                                          const FeatureOptions& options) {
  std::vector<std::optional<double>> out;
  if (options.expected_delay == ExpectedDelayMode::Online) {
    std::vector<analyze::EciDelay> stream;
    stream.reserve(records.size());
    for (const auto& r : records) {
      stream.push_back({r.eci, r.delay.lost ? std::nullopt : std::optional<double>(r.delay.e2e_delay_ms)});
    }
    return analyze::expected_delay_online(stream, options.online_warmup);
  }
  std::map<std::uint32_t, double> own;
  const auto* table = options.expected_delay_table;
  if (table == nullptr) {
    own = analyze::expected_delay_table(records);
    table = &own;
  }
  out.reserve(records.size());
  for (const auto& r : records) {
    std::optional<double> v;
    if (r.eci) {
      if (auto it = table->find(*r.eci); it != table->end()) v = it->second;
    }
    out.push_back(v);
  }
  return out;
}

namespace {

std::optional<double> lookup(const ingest::FusedRecord& r, std::string_view name) {
  if (name == "speed_kmph") return r.gnss ? std::optional(r.gnss->speed_kmph) : std::nullopt;
  if (!r.oai) return std::nullopt;
  if (name == "sinr_db") return r.oai->sinr_db;
  if (name == "rsrp_dbm") return r.oai->rsrp_dbm;
  if (name == "rssi_dbm") return r.oai->rssi_dbm;
  if (name == "rsrq_db") return r.oai->rsrq_db;
  if (name == "noise_power_dbm") return r.oai->noise_power_dbm;
  if (name == "rx_power_dbm") return r.oai->rx_power_dbm;
  throw Error(Errc::Usage, "unknown feature '" + std::string(name) + "'");
}

}  // namespace

Dataset build_dataset(std::span<const ingest::FusedRecord> records, ClassScheme scheme,
                      const FeatureOptions& options) {
  if (options.features.empty()) throw Error(Errc::Usage, "no features requested");
  const bool wants_expected =
      std::find(options.features.begin(), options.features.end(), kExpectedDelay) != options.features.end();
  std::vector<std::optional<double>> expected;
  if (wants_expected) expected = expected_delay_feature(records, options);

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t dropped = 0;
  const auto width = options.features.size();
  std::vector<double> row(width);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.delay.lost) continue;
    bool complete = true;
    for (std::size_t j = 0; j < width && complete; ++j) {
      const auto& name = options.features[j];
      const auto v = name == kExpectedDelay ? expected[i] : lookup(r, name);
      if (v) {
        row[j] = *v;
      } else {
        complete = false;
      }
    }
    if (!complete) {
      ++dropped;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
    labels.push_back(label_for(r.delay.e2e_delay_ms, scheme));
  }
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd x =
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), n,
                                                                                         static_cast<Eigen::Index>(width));
  auto d = make_dataset(std::move(x), std::move(labels), options.features, scheme);
  d.dropped_rows = dropped;
  return d;
}

}  // namespace cvqos::ml
