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
#include <vector>

#include "cvqos/ml/dataset.hpp"

namespace cvqos::ml {

/// Share of the rarest multiclass class after balancing.
inline constexpr double kMulticlassMinorityShare = 0.10;

/// Row indices (ascending) kept by class balancing.
///   binary:     every class is undersampled to the smallest class count.
///   multiclass: all of class 2 is kept and classes 0 and 1 are undersampled
///               to nine times that count, split in their original ratio, so
///               class 2 ends at 10% support. If classes 0 and 1 are too
///               small for that, class 2 is undersampled instead.
/// Selection within a class is a seeded uniform draw without replacement.
/// Throws Errc::Balance when any class is empty.
std::vector<std::size_t> balance_indices(std::span<const int> labels, ClassScheme scheme, std::uint64_t seed);

Dataset balance(const Dataset& data, std::uint64_t seed);

struct Fold {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Stratified k-fold partition: every row lands in exactly one test fold and
/// each class is spread over the folds within one sample of even. Throws
/// Errc::Stratification when a class has fewer than k rows.
std::vector<Fold> stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed);

}  // namespace cvqos::ml
