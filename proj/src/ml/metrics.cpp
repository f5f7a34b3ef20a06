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

#include "cvqos/ml/metrics.hpp"

#include <cstdio>

#include "cvqos/csv.hpp"
#include "cvqos/error.hpp"

namespace cvqos::ml {

Confusion confusion_matrix(std::span<const int> truth, std::span<const int> predicted, int classes) {
  if (truth.size() != predicted.size()) throw Error(Errc::Shape, "truth and prediction lengths differ");
  Confusion m = Confusion::Zero(classes, classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= classes || predicted[i] < 0 || predicted[i] >= classes) {
      throw Error(Errc::Shape, "label outside the class range");
    }
    ++m(truth[i], predicted[i]);
  }
  return m;
}

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

double accuracy_from(std::span<const double> supports, std::span<const double> recalls) {
  if (supports.size() != recalls.size()) throw Error(Errc::Shape, "support and recall lengths differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < supports.size(); ++i) acc += supports[i] * recalls[i];
  return acc;
}

ClassReport report_from_confusion(const Confusion& confusion, ClassScheme scheme) {
  const auto k = confusion.rows();
  if (confusion.cols() != k || k != class_count(scheme)) {
    throw Error(Errc::Shape, "confusion matrix does not match the class scheme");
  }
  ClassReport r;
  r.confusion = confusion;
  r.total = static_cast<std::uint64_t>(confusion.sum());
  std::int64_t correct = 0;
  for (Eigen::Index c = 0; c < k; ++c) {
    ClassMetrics m;
    m.name = class_name(scheme, static_cast<int>(c));
    const auto tp = confusion(c, c);
    const auto actual = confusion.row(c).sum();
    const auto predicted = confusion.col(c).sum();
    correct += tp;
    m.count = static_cast<std::uint64_t>(actual);
    m.support = r.total > 0 ? static_cast<double>(actual) / static_cast<double>(r.total) : 0.0;
    m.precision_defined = predicted > 0;
    m.recall_defined = actual > 0;
    m.precision = m.precision_defined ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    m.recall = m.recall_defined ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    m.f1 = f1_score(m.precision, m.recall);
    r.classes.push_back(m);
  }
  r.accuracy = r.total > 0 ? static_cast<double>(correct) / static_cast<double>(r.total) : 0.0;
  return r;
}

std::string report_to_csv(const ClassReport& report) {
  csv::Writer w({"class", "precision", "recall", "f1", "support", "count", "precision_defined", "recall_defined"});
  for (const auto& c : report.classes) {
    w.field(c.name).field(c.precision).field(c.recall).field(c.f1).field(c.support).field(c.count);
    w.field(c.precision_defined).field(c.recall_defined).end_row();
  }
  return w.str();
}

std::string format_report(const ClassReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %9s %9s %9s %9s\n", "class", "precision", "recall", "f1", "support");
  out += line;
  for (const auto& c : report.classes) {
    std::snprintf(line, sizeof line, "%-16s %9.4f %9.4f %9.4f %9.4f%s\n", c.name.c_str(), c.precision, c.recall,
                  c.f1, c.support, c.precision_defined ? "" : "  (no predictions)");
    out += line;
  }
  std::snprintf(line, sizeof line, "accuracy %.4f over %llu rows\n", report.accuracy,
                static_cast<unsigned long long>(report.total));
  out += line;
  return out;
}

}  // namespace cvqos::ml
