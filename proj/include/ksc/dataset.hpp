/*
 * Copyright 2026 The ksclib Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksc/types.hpp"

namespace ksc {

// A dataset is an N x d coordinate matrix with optional ground-truth labels
// and optional row ids. For precomputed kernels the coordinates are 1-d
// global indices.
struct Dataset {
  Matrix points;
  std::optional<Labels> labels;
  std::optional<std::vector<std::string>> ids;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

inline Dataset index_dataset(Index n, Index offset = 0) {
  Dataset d;
  d.points.resize(n, 1);
  for (Index i = 0; i < n; ++i) d.points(i, 0) = double(offset + i);
  return d;
}

inline Dataset subset(const Dataset& data, const std::vector<Index>& idx) {
  Dataset out;
  out.points.resize(static_cast<Index>(idx.size()), data.points.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.points.row(static_cast<Index>(r)) = data.points.row(idx[r]);
  if (data.labels) {
    Labels l(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) l[r] = (*data.labels)[static_cast<std::size_t>(idx[r])];
    out.labels = std::move(l);
  }
  if (data.ids) {
    std::vector<std::string> s(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) s[r] = (*data.ids)[static_cast<std::size_t>(idx[r])];
    out.ids = std::move(s);
  }
  return out;
}

struct SplitFractions {
  double train = 0.0;
  double val = 0.0;
  double test = 0.0;
};

struct Split {
  Dataset train, val, test;
  std::vector<Index> train_idx, val_idx, test_idx;
};

// Deterministic Fisher-Yates on top of mt19937_64; the generator output is
// standardized, so the same seed yields the same permutation on every
// platform.
inline std::vector<Index> shuffled_indices(Index n, std::uint64_t seed) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index(0));
  std::mt19937_64 gen(seed);
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(gen() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return idx;
}

// Random train/validation/test split. Sizes follow n_val = round(f_val*N),
// n_test = round(f_test*N), n_train = N - n_val - n_test.
inline Split split(const Dataset& data, const SplitFractions& f, std::uint64_t seed) {
  if (f.train < 0 || f.val < 0 || f.test < 0)
    throw std::invalid_argument("split fractions must be nonnegative");
  if (std::abs(f.train + f.val + f.test - 1.0) > 1e-9)
    throw std::invalid_argument("split fractions must sum to 1");
  const Index n = data.size();
  if (n == 0) throw std::invalid_argument("cannot split an empty dataset");
  const auto n_val = static_cast<Index>(std::llround(f.val * double(n)));
  const auto n_test = static_cast<Index>(std::llround(f.test * double(n)));
  const Index n_train = n - n_val - n_test;
  if (n_train <= 0) throw std::invalid_argument("split leaves no training points");

  const std::vector<Index> idx = shuffled_indices(n, seed);
  Split out;
  out.train_idx.assign(idx.begin(), idx.begin() + n_train);
  out.val_idx.assign(idx.begin() + n_train, idx.begin() + n_train + n_val);
  out.test_idx.assign(idx.begin() + n_train + n_val, idx.end());
  // Sorted parts keep downstream artifacts stable regardless of shuffle order.
  std::sort(out.train_idx.begin(), out.train_idx.end());
  std::sort(out.val_idx.begin(), out.val_idx.end());
  std::sort(out.test_idx.begin(), out.test_idx.end());
  out.train = subset(data, out.train_idx);
  out.val = subset(data, out.val_idx);
  out.test = subset(data, out.test_idx);
  return out;
}

}  // namespace ksc
