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

#include <stdexcept>
#include <string>
#include <vector>

#include "ksc/dataset.hpp"
#include "ksc/model.hpp"
#include "ksc/types.hpp"

namespace ksc {

struct SoftAssignment {
  Matrix memberships;  // M x k, rows sum to 1
  Matrix prototypes;   // k x (k-1)
};

// Per-cluster means of projection rows. Labels must cover 0..k-1.
inline Matrix prototypes(const Matrix& proj, const Labels& labels, int k = -1) {
  if (static_cast<Index>(labels.size()) != proj.rows())
    throw std::invalid_argument("labels must match projection rows");
  int kmax = -1;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("labels must be nonnegative");
    kmax = std::max(kmax, l);
  }
  if (k < 0) k = kmax + 1;
  if (kmax >= k) throw std::invalid_argument("label exceeds cluster count");

  Matrix protos = Matrix::Zero(k, proj.cols());
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < proj.rows(); ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    protos.row(c) += proj.row(i);
    ++counts[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0)
      throw std::runtime_error("cluster " + std::to_string(c) + " is empty");
    protos.row(c) /= double(counts[static_cast<std::size_t>(c)]);
  }
  return protos;
}

// d = 1 - cos(e, s), in [0, 2].
template <typename DA, typename DB>
double cosine_distance(const Eigen::MatrixBase<DA>& e, const Eigen::MatrixBase<DB>& s) {
  const double ne = e.norm();
  const double ns = s.norm();
  if (ne == 0.0 || ns == 0.0)
    throw std::invalid_argument("cosine distance undefined for a zero vector");
  double dot = 0.0;
  for (Index b = 0; b < e.size(); ++b) dot += e(b) * s(b);
  return 1.0 - dot / (ne * ns);
}

// Product-form soft memberships. A vanishing distance is the crisp limit:
// one zero gives the indicator row, several zeros share the mass uniformly.
inline SoftAssignment soft_assign(const Matrix& proj, const Matrix& protos) {
  const int k = static_cast<int>(protos.rows());
  if (k < 2) throw std::invalid_argument("need at least 2 prototypes");
  if (proj.cols() != protos.cols())
    throw std::invalid_argument("projections and prototypes must have equal dimension");

  SoftAssignment out;
  out.prototypes = protos;
  out.memberships.resize(proj.rows(), k);
  constexpr double kZero = 1e-12;

  for (Index i = 0; i < proj.rows(); ++i) {
    Vector d(k);
    int zeros = 0;
    for (int p = 0; p < k; ++p) {
      double v = cosine_distance(proj.row(i), protos.row(p));
      if (v < 0.0) v = 0.0;  // clamp rounding noise below the exact floor
      d(p) = v;
      if (v <= kZero) ++zeros;
    }
    if (zeros > 0) {
      for (int p = 0; p < k; ++p)
        out.memberships(i, p) = d(p) <= kZero ? 1.0 / double(zeros) : 0.0;
      continue;
    }
    // All distances positive: sm_q = prod_{j != q} d_j / sum_p prod_{j != p} d_j.
    Vector prod_except(k);
    for (int q = 0; q < k; ++q) {
      double prod = 1.0;
      for (int j = 0; j < k; ++j)
        if (j != q) prod *= d(j);
      prod_except(q) = prod;
    }
    out.memberships.row(i) = prod_except.transpose() / prod_except.sum();
  }
  return out;
}

inline int argmax_lowest(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  int best = 0;
  for (int p = 1; p < row.size(); ++p)
    if (row(p) > row(best)) best = p;
  return best;
}

struct SkscResult {
  KscModel model;
  Labels labels;              // test labels by argmax membership
  SoftAssignment assignment;  // memberships of the test points
};

// Hard KSC initialization, prototypes from the training projections, then
// soft memberships of the test points via their out-of-sample projections.
inline SkscResult sksc(const Dataset& train_data, const Dataset& test_data,
                       const KernelSpec& kernel, int k) {
  SkscResult out;
  out.model = train(train_data, kernel, k);
  const Matrix train_proj = project_points(out.model, train_data.points);
  const Matrix protos = prototypes(train_proj, out.model.train_labels, k);
  const Matrix test_proj = project_points(out.model, test_data.points);
  out.assignment = soft_assign(test_proj, protos);
  out.labels.resize(static_cast<std::size_t>(test_proj.rows()));
  for (Index i = 0; i < test_proj.rows(); ++i)
    out.labels[static_cast<std::size_t>(i)] = argmax_lowest(out.assignment.memberships.row(i));
  return out;
}

}  // namespace ksc
