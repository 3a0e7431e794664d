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

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ksc/dataset.hpp"
#include "ksc/kernels.hpp"
#include "ksc/spectral.hpp"
#include "ksc/types.hpp"

namespace ksc {

using SignMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

inline SignMatrix sign_matrix(const Matrix& a) {
  SignMatrix s(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) s(i, j) = sign_pm(a(i, j));
  return s;
}

struct Codebook {
  SignMatrix words;  // k x (k-1), entries in {-1, +1}, rows pairwise distinct
  int k() const { return static_cast<int>(words.rows()); }
};

// The k most frequent distinct sign rows; frequency ties keep first
// occurrence order.
inline Codebook build_codebook(const SignMatrix& signs, int k) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (signs.rows() < k) throw std::invalid_argument("need at least k sign rows");

  struct Entry {
    Index count = 0;
    Index first = 0;
  };
  std::map<std::vector<int>, Entry> seen;
  for (Index i = 0; i < signs.rows(); ++i) {
    std::vector<int> row(static_cast<std::size_t>(signs.cols()));
    for (Index j = 0; j < signs.cols(); ++j) row[static_cast<std::size_t>(j)] = signs(i, j);
    auto [it, fresh] = seen.emplace(std::move(row), Entry{0, i});
    ++it->second.count;
  }
  if (static_cast<int>(seen.size()) < k)
    throw std::runtime_error("codebook requires " + std::to_string(k) +
                             " distinct sign patterns, found " + std::to_string(seen.size()));

  std::vector<std::pair<const std::vector<int>*, Entry>> order;
  order.reserve(seen.size());
  for (const auto& [row, e] : seen) order.emplace_back(&row, e);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    return a.second.first < b.second.first;
  });

  Codebook cb;
  cb.words.resize(k, signs.cols());
  for (int p = 0; p < k; ++p)
    for (Index j = 0; j < signs.cols(); ++j)
      cb.words(p, j) = (*order[static_cast<std::size_t>(p)].first)[static_cast<std::size_t>(j)];
  return cb;
}

// Nearest codeword in Hamming distance; ties resolve to the lowest cluster
// id.
template <typename Derived>
int decode(const Eigen::MatrixBase<Derived>& code, const Codebook& cb) {
  if (code.size() != cb.words.cols())
    throw std::invalid_argument("code length must match codeword length");
  int best = 0;
  Index best_dist = cb.words.cols() + 1;
  for (int p = 0; p < cb.k(); ++p) {
    Index dist = 0;
    for (Index j = 0; j < cb.words.cols(); ++j)
      if (code(j) != cb.words(p, j)) ++dist;
    if (dist < best_dist) {
      best_dist = dist;
      best = p;
    }
  }
  return best;
}

struct KscModel {
  Matrix train_points;  // N_tr x d (or N_tr x 1 of indices for precomputed)
  KernelSpec kernel;
  Matrix alphas;  // N_tr x (k-1)
  Vector biases;
  Vector eigenvalues;
  Codebook codebook;
  Labels train_labels;

  int k() const { return codebook.k(); }
  Index train_size() const { return train_points.rows(); }
  Index dim() const { return train_points.cols(); }
};

// Projections of arbitrary points through the trained model (Eq.-style
// out-of-sample extension: kernel rows against the training set plus bias).
inline Matrix project_points(const KscModel& model, const Matrix& points) {
  if (points.cols() != model.train_points.cols())
    throw std::invalid_argument("input dimension " + std::to_string(points.cols()) +
                                " does not match model dimension " +
                                std::to_string(model.train_points.cols()));
  const Matrix rows = gram(model.kernel, points, model.train_points);
  return project(rows, model.alphas, model.biases);
}

inline Labels decode_rows(const SignMatrix& signs, const Codebook& cb) {
  Labels out(static_cast<std::size_t>(signs.rows()));
  for (Index i = 0; i < signs.rows(); ++i)
    out[static_cast<std::size_t>(i)] = decode(signs.row(i), cb);
  return out;
}

// Training: gram -> dual eigenproblem -> binarize -> codebook -> Hamming
// assignments. Training points are decoded from the eigenvector signs.
inline KscModel train(const Dataset& tr, const KernelSpec& kernel, int k) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (tr.size() <= k)
    throw std::invalid_argument("training set must contain more than k points");

  KscModel m;
  m.train_points = tr.points;
  m.kernel = kernel;
  const Matrix omega = gram(kernel, tr.points, tr.points);
  SpectralSolution sol = solve_dual(omega, k);
  m.alphas = std::move(sol.alphas);
  m.eigenvalues = std::move(sol.eigenvalues);
  m.biases = compute_bias(omega, m.alphas, sol.degrees);

  const SignMatrix signs = sign_matrix(m.alphas);
  try {
    m.codebook = build_codebook(signs, k);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string("k unsupported by spectrum: ") + e.what());
  }
  m.train_labels = decode_rows(signs, m.codebook);
  return m;
}

inline Labels predict(const KscModel& model, const Matrix& points) {
  const Matrix e = project_points(model, points);
  return decode_rows(sign_matrix(e), model.codebook);
}

inline Labels predict(const KscModel& model, const Dataset& points) {
  return predict(model, points.points);
}

}  // namespace ksc
