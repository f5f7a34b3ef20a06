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

#include "cvqos/ml/information.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cvqos/csv.hpp"
#include "cvqos/error.hpp"

namespace cvqos::ml {

Binning bin_feature(std::span<const double> values, int bins) {
  if (bins < 1) throw Error(Errc::Usage, "bin count must be positive");
  Binning b;
  if (values.empty()) return b;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double top = sorted.back();
  b.constant = sorted.front() == top;
  if (!b.constant) {
    const auto n = sorted.size();
    const auto k = static_cast<std::size_t>(bins);
    for (std::size_t i = 1; i < k; ++i) {
      const std::size_t rank = (i * n + k - 1) / k;  // ceil(i n / k)
      if (rank == 0) continue;
      const double edge = sorted[rank - 1];
      if (edge >= top) break;
      if (b.edges.empty() || edge > b.edges.back()) b.edges.push_back(edge);
    }
  }
  b.codes.reserve(values.size());
  for (double v : values) b.codes.push_back(apply_bins(v, b.edges));
  return b;
}

int apply_bins(double value, std::span<const double> edges) {
  return static_cast<int>(std::lower_bound(edges.begin(), edges.end(), value) - edges.begin());
}

namespace {

// Counts runs in a sorted sequence and accumulates sum c log2 c.
template <typename T>
double sum_clogc(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const auto c = static_cast<double>(j - i);
    acc += c * std::log2(c);
    i = j;
  }
  return acc;
}

int max_code(std::span<const int> codes) {
  int m = 0;
  for (int c : codes) {
    if (c < 0) throw Error(Errc::Shape, "negative discrete code");
    m = std::max(m, c);
  }
  return m;
}

}  // namespace

double entropy(std::span<const int> codes) {
  if (codes.empty()) return 0.0;
  std::vector<int> v(codes.begin(), codes.end());
  const auto n = static_cast<double>(v.size());
  return std::log2(n) - sum_clogc(v) / n;
}

double mutual_information(const std::vector<std::span<const int>>& x, std::span<const int> y) {
  const auto n = y.size();
  if (n == 0) throw Error(Errc::EmptyInput, "mutual information of an empty sample");
  double cells = static_cast<double>(max_code(y)) + 1.0;
  std::vector<std::uint64_t> radix;
  for (const auto& col : x) {
    if (col.size() != n) throw Error(Errc::Shape, "feature and label lengths differ");
    radix.push_back(static_cast<std::uint64_t>(max_code(col)) + 1);
    cells *= static_cast<double>(radix.back());
  }
  if (cells > kMaxJointCells) {
    throw Error(Errc::Shape, "joint histogram needs " + csv::format(cells) + " cells, above the limit");
  }

  std::vector<std::pair<std::uint64_t, int>> joint(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t code = 0;
    for (std::size_t j = 0; j < x.size(); ++j) code = code * radix[j] + static_cast<std::uint64_t>(x[j][i]);
    joint[i] = {code, y[i]};
  }
  std::sort(joint.begin(), joint.end());

  // Marginal counts per x code: runs of equal first component.
  std::vector<int> ys(y.begin(), y.end());
  std::sort(ys.begin(), ys.end());
  auto count_y = [&](int v) {
    const auto r = std::equal_range(ys.begin(), ys.end(), v);
    return static_cast<double>(r.second - r.first);
  };

  const auto total = static_cast<double>(n);
  double mi = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t end_x = i;
    while (end_x < n && joint[end_x].first == joint[i].first) ++end_x;
    const auto nx = static_cast<double>(end_x - i);
    for (std::size_t a = i; a < end_x;) {
      std::size_t b = a;
      while (b < end_x && joint[b].second == joint[a].second) ++b;
      const auto nxy = static_cast<double>(b - a);
      mi += nxy / total * std::log2(nxy * total / (nx * count_y(joint[a].second)));
      a = b;
    }
    i = end_x;
  }
  return std::max(0.0, mi);
}

double mutual_information(std::span<const int> x, std::span<const int> y) {
  return mutual_information(std::vector<std::span<const int>>{x}, y);
}

SelectionResult md_select(const Dataset& data, const SelectionOptions& options) {
  if (data.rows() == 0) throw Error(Errc::EmptyInput, "feature selection on an empty dataset");
  SelectionResult result;

  std::vector<std::size_t> order(data.cols());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return data.names[a] < data.names[b]; });

  std::vector<std::vector<int>> codes(data.cols());
  std::vector<std::size_t> candidates;
  for (std::size_t j : order) {
    const Eigen::VectorXd col = data.features.col(static_cast<Eigen::Index>(j));
    auto b = bin_feature(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), options.bins);
    if (b.constant) {
      result.constant_features.push_back(data.names[j]);
      continue;
    }
    codes[j] = std::move(b.codes);
    candidates.push_back(j);
  }

  auto cells_of = [](std::span<const int> codes) { return static_cast<double>(max_code(codes)) + 1.0; };
  std::vector<std::span<const int>> selected;
  double selected_cells = cells_of(data.labels);
  double current = 0.0;
  while (result.steps.size() < options.max_features && !candidates.empty()) {
    double best = -1.0;
    std::size_t best_pos = 0;
    for (std::size_t p = 0; p < candidates.size(); ++p) {
      if (selected_cells * cells_of(codes[candidates[p]]) > kMaxJointCells) continue;
      auto trial = selected;
      trial.emplace_back(codes[candidates[p]]);
      const double mi = mutual_information(trial, data.labels);
      if (mi > best) {
        best = mi;
        best_pos = p;
      }
    }
    if (best < 0.0) {
      result.cell_limit_reached = true;
      break;
    }
    const double gain = best - current;
    if (gain <= options.epsilon) break;
    const auto j = candidates[best_pos];
    selected.emplace_back(codes[j]);
    selected_cells *= cells_of(codes[j]);
    result.steps.push_back({data.names[j], best, gain});
    current = best;
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best_pos));
  }
  return result;
}

std::string selection_to_csv(const SelectionResult& result) {
  csv::Writer w({"rank", "feature", "joint_mi_bits", "gain_bits"});
  int rank = 1;
  for (const auto& s : result.steps) {
    w.field(rank++).field(s.name).field(s.joint_mi).field(s.gain).end_row();
  }
  return w.str();
}

}  // namespace cvqos::ml
