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

#include "cvqos/ml/sampling.hpp"

#include <algorithm>
#include <string>

#include "cvqos/error.hpp"
#include "cvqos/rng.hpp"

namespace cvqos::ml {

namespace {

std::vector<std::vector<std::size_t>> by_class(std::span<const int> labels, int classes) {
  std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= classes) throw Error(Errc::Shape, "label " + std::to_string(y) + " outside the class scheme");
    groups[static_cast<std::size_t>(y)].push_back(i);
  }
  return groups;
}

// Draws `n` members without replacement; keeps them in ascending order.
void draw(std::vector<std::size_t>& members, std::size_t n, Rng& rng, std::vector<std::size_t>& out) {
  rng.shuffle(members);
  members.resize(std::min(n, members.size()));
  out.insert(out.end(), members.begin(), members.end());
}

}  // namespace

std::vector<std::size_t> balance_indices(std::span<const int> labels, ClassScheme scheme, std::uint64_t seed) {
  const int classes = class_count(scheme);
  auto groups = by_class(labels, classes);
  for (int c = 0; c < classes; ++c) {
    if (groups[static_cast<std::size_t>(c)].empty()) {
      throw Error(Errc::Balance, "class " + class_name(scheme, c) + " has no samples");
    }
  }

  std::vector<std::size_t> target(groups.size());
  if (scheme == ClassScheme::Binary50) {
    const auto m = std::min(groups[0].size(), groups[1].size());
    target = {m, m};
  } else {
    const auto c0 = groups[0].size();
    const auto c1 = groups[1].size();
    auto c2 = groups[2].size();
    // Majority budget R = 9 * c2; shrink c2 if the majority cannot cover it.
    if (9 * c2 > c0 + c1) c2 = std::max<std::size_t>(1, (c0 + c1) / 9);
    const auto r = 9 * c2;
    auto t0 = r * c0 / (c0 + c1);
    auto t1 = r * c1 / (c0 + c1);
    // Floor leaves a deficit of at most one; give it to the larger class.
    if (t0 + t1 < r) (c0 >= c1 ? t0 : t1) += r - t0 - t1;
    target = {std::min(t0, c0), std::min(t1, c1), c2};
  }

  Rng rng(seed);
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < groups.size(); ++c) draw(groups[c], target[c], rng, out);
  std::sort(out.begin(), out.end());
  return out;
}

Dataset balance(const Dataset& data, std::uint64_t seed) {
  const auto rows = balance_indices(data.labels, data.scheme, seed);
  return data.subset(rows);
}

std::vector<Fold> stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw Error(Errc::Usage, "k-fold needs k >= 2");
  int classes = 0;
  for (int y : labels) classes = std::max(classes, y + 1);
  auto groups = by_class(labels, classes);
  const auto uk = static_cast<std::size_t>(k);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (!groups[c].empty() && groups[c].size() < uk) {
      throw Error(Errc::Stratification, "class " + std::to_string(c) + " has " + std::to_string(groups[c].size()) +
                                            " samples, fewer than k = " + std::to_string(k));
    }
  }

  Rng rng(seed);
  std::vector<int> fold_of(labels.size(), 0);
  std::size_t offset = 0;  // rotates remainders so fold sizes stay even overall
  for (auto& g : groups) {
    rng.shuffle(g);
    for (std::size_t i = 0; i < g.size(); ++i) fold_of[g[i]] = static_cast<int>((i + offset) % uk);
    offset = (offset + g.size()) % uk;
  }

  std::vector<Fold> folds(uk);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t f = 0; f < uk; ++f) {
      (static_cast<int>(f) == fold_of[i] ? folds[f].test : folds[f].train).push_back(i);
    }
  }
  return folds;
}

}  // namespace cvqos::ml
