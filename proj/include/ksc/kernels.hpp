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
#include <iostream>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksc/parallel.hpp"
#include "ksc/types.hpp"

namespace ksc {

enum class KernelKind { rbf, chi2_rbf, cosine, corr_rbf, precomputed };
enum class CorrKind { pearson, spearman };

struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  // sigma^2 (rbf), sigma_chi^2 (chi2_rbf) or sigma_cd^2 (corr_rbf); unused
  // for cosine and precomputed.
  double bandwidth = 1.0;
  CorrKind correlation = CorrKind::pearson;
  // Precomputed kernels index into this matrix; points are then 1-d global
  // indices instead of coordinates.
  std::shared_ptr<const Matrix> matrix;
};

inline const char* kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::rbf: return "rbf";
    case KernelKind::chi2_rbf: return "chi2";
    case KernelKind::cosine: return "cosine";
    case KernelKind::corr_rbf: return "corr";
    case KernelKind::precomputed: return "precomputed";
  }
  return "unknown";
}

inline const char* corr_kind_name(CorrKind c) {
  return c == CorrKind::pearson ? "pearson" : "spearman";
}

inline KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "rbf") return KernelKind::rbf;
  if (s == "chi2") return KernelKind::chi2_rbf;
  if (s == "cosine") return KernelKind::cosine;
  if (s == "corr") return KernelKind::corr_rbf;
  if (s == "precomputed") return KernelKind::precomputed;
  throw std::invalid_argument("unknown kernel kind: " + s);
}

inline CorrKind corr_kind_from_string(const std::string& s) {
  if (s == "pearson") return CorrKind::pearson;
  if (s == "spearman") return CorrKind::spearman;
  throw std::invalid_argument("unknown correlation kind: " + s);
}

inline void check_bandwidth(double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("kernel bandwidth must be positive");
}

inline KernelSpec rbf_kernel(double sigma2) {
  check_bandwidth(sigma2);
  return KernelSpec{KernelKind::rbf, sigma2, CorrKind::pearson, nullptr};
}

inline KernelSpec chi2_kernel(double sigma2) {
  check_bandwidth(sigma2);
  return KernelSpec{KernelKind::chi2_rbf, sigma2, CorrKind::pearson, nullptr};
}

inline KernelSpec cosine_kernel() {
  return KernelSpec{KernelKind::cosine, 0.0, CorrKind::pearson, nullptr};
}

inline KernelSpec corr_kernel(double sigma2, CorrKind c = CorrKind::pearson) {
  check_bandwidth(sigma2);
  return KernelSpec{KernelKind::corr_rbf, sigma2, c, nullptr};
}

inline KernelSpec precomputed_kernel(std::shared_ptr<const Matrix> m) {
  if (!m) throw std::invalid_argument("precomputed kernel requires a matrix");
  if (m->rows() != m->cols())
    throw std::invalid_argument("precomputed kernel matrix must be square");
  return KernelSpec{KernelKind::precomputed, 0.0, CorrKind::pearson, std::move(m)};
}

// Average ranks with ties resolved by midpoint, the standard Spearman
// convention.
template <typename Derived>
Vec<typename Derived::Scalar> average_ranks(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = v.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return v(a) < v(b); });
  Vec<Scalar> ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && v(order[j + 1]) == v(order[i])) ++j;
    // Ranks are 1-based; tied entries share the midpoint rank.
    const Scalar r = Scalar(i + j + 2) / Scalar(2);
    for (Eigen::Index t = i; t <= j; ++t) ranks(order[t]) = r;
    i = j + 1;
  }
  return ranks;
}

namespace detail {

template <typename DA, typename DB>
double chi2_statistic(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y) {
  double acc = 0.0;
  for (Eigen::Index b = 0; b < x.size(); ++b) {
    const double s = x(b) + y(b);
    if (s == 0.0) continue;  // both bins empty: term dropped
    const double d = x(b) - y(b);
    acc += d * d / s;
  }
  return acc;
}

template <typename DA, typename DB>
double cosine_similarity(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y) {
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0)
    throw std::invalid_argument("cosine kernel undefined for a zero vector");
  double dot = 0.0;
  for (Eigen::Index b = 0; b < x.size(); ++b) dot += x(b) * y(b);
  return dot / (nx * ny);
}

template <typename DA, typename DB>
double pearson(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y) {
  const double mx = x.mean();
  const double my = y.mean();
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (Eigen::Index b = 0; b < x.size(); ++b) {
    const double a = x(b) - mx;
    const double c = y(b) - my;
    sxx += a * a;
    syy += c * c;
    sxy += a * c;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("correlation undefined for a constant vector");
  return sxy / std::sqrt(sxx * syy);
}

// Correlation distance of Table-style form: ||x-y||_cd^2 = (1 - R)/2.
inline double corr_sqdist(double r) { return (1.0 - r) / 2.0; }

}  // namespace detail

// Single kernel evaluation. For precomputed kernels x and y hold one global
// index each.
template <typename DA, typename DB>
double evaluate(const KernelSpec& spec, const Eigen::MatrixBase<DA>& x,
                const Eigen::MatrixBase<DB>& y) {
  if (spec.kind == KernelKind::precomputed) {
    if (!spec.matrix) throw std::invalid_argument("precomputed kernel has no matrix attached");
    if (x.size() != 1 || y.size() != 1)
      throw std::invalid_argument("precomputed kernel points must be single indices");
    const auto i = static_cast<Eigen::Index>(std::llround(double(x(0))));
    const auto j = static_cast<Eigen::Index>(std::llround(double(y(0))));
    if (i < 0 || j < 0 || i >= spec.matrix->rows() || j >= spec.matrix->cols())
      throw std::out_of_range("precomputed kernel index out of range");
    return (*spec.matrix)(i, j);
  }
  if (x.size() != y.size())
    throw std::invalid_argument("kernel arguments must have the same dimension");
  switch (spec.kind) {
    case KernelKind::rbf: {
      check_bandwidth(spec.bandwidth);
      return std::exp(-(x - y).squaredNorm() / spec.bandwidth);
    }
    case KernelKind::chi2_rbf: {
      check_bandwidth(spec.bandwidth);
      if ((x.array() < 0).any() || (y.array() < 0).any())
        throw std::invalid_argument("chi2 kernel requires nonnegative features");
      return std::exp(-detail::chi2_statistic(x, y) / spec.bandwidth);
    }
    case KernelKind::cosine:
      return detail::cosine_similarity(x, y);
    case KernelKind::corr_rbf: {
      check_bandwidth(spec.bandwidth);
      if (x.size() < 2)
        throw std::invalid_argument("correlation kernel requires dimension >= 2");
      double r;
      if (spec.correlation == CorrKind::pearson) {
        r = detail::pearson(x, y);
      } else {
        const Vector rx = average_ranks(x);
        const Vector ry = average_ranks(y);
        r = detail::pearson(rx, ry);
      }
      return std::exp(-detail::corr_sqdist(r) / spec.bandwidth);
    }
    default:
      throw std::logic_error("unhandled kernel kind");
  }
}

namespace detail {

// Hoisted per-row validation so Gram errors can report which row offended
// without paying for a try/catch in the entry loop.
template <typename Derived>
void validate_rows(const KernelSpec& spec, const Eigen::MatrixBase<Derived>& X,
                   const char* side) {
  switch (spec.kind) {
    case KernelKind::chi2_rbf:
      for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j)
          if (X(i, j) < 0)
            throw std::invalid_argument(
                std::string("chi2 kernel requires nonnegative features: ") + side + " row " +
                std::to_string(i) + " column " + std::to_string(j) + " is negative");
      break;
    case KernelKind::cosine: {
      for (Eigen::Index i = 0; i < X.rows(); ++i)
        if (X.row(i).norm() == 0.0)
          throw std::invalid_argument(std::string("cosine kernel undefined for a zero vector: ") +
                                      side + " row " + std::to_string(i));
      if ((X.array() < 0).any())
        std::cerr << "warning: cosine kernel on data with negative entries; "
                     "degrees may become nonpositive\n";
      break;
    }
    case KernelKind::corr_rbf: {
      if (X.cols() < 2)
        throw std::invalid_argument("correlation kernel requires dimension >= 2");
      for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double m = X.row(i).mean();
        if ((X.row(i).array() == m).all())
          throw std::invalid_argument(std::string("correlation undefined for a constant vector: ") +
                                      side + " row " + std::to_string(i));
      }
      break;
    }
    default:
      break;
  }
}

}  // namespace detail

// Gram matrix with entry (i, j) = evaluate(spec, X_i, Y_j). Entries are
// computed by one deterministic scalar path, so gram(spec, X, X) is exactly
// symmetric.
inline Matrix gram(const KernelSpec& spec, const Matrix& X, const Matrix& Y) {
  const Eigen::Index n = X.rows();
  const Eigen::Index m = Y.rows();
  Matrix K(n, m);
  if (spec.kind == KernelKind::precomputed) {
    if (!spec.matrix) throw std::invalid_argument("precomputed kernel has no matrix attached");
    if (X.cols() != 1 || Y.cols() != 1)
      throw std::invalid_argument("precomputed kernel points must be single indices");
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j) K(i, j) = evaluate(spec, X.row(i), Y.row(j));
    return K;
  }
  if (X.cols() != Y.cols())
    throw std::invalid_argument("kernel arguments must have the same dimension");
  check_bandwidth(spec.kind == KernelKind::cosine ? 1.0 : spec.bandwidth);
  detail::validate_rows(spec, X, "left");
  detail::validate_rows(spec, Y, "right");

  switch (spec.kind) {
    case KernelKind::rbf: {
      parallel_for(n, [&](Eigen::Index b, Eigen::Index e) {
        for (Eigen::Index i = b; i < e; ++i)
          for (Eigen::Index j = 0; j < m; ++j)
            K(i, j) = std::exp(-(X.row(i) - Y.row(j)).squaredNorm() / spec.bandwidth);
      });
      break;
    }
    case KernelKind::chi2_rbf: {
      parallel_for(n, [&](Eigen::Index b, Eigen::Index e) {
        for (Eigen::Index i = b; i < e; ++i)
          for (Eigen::Index j = 0; j < m; ++j)
            K(i, j) = std::exp(-detail::chi2_statistic(X.row(i), Y.row(j)) / spec.bandwidth);
      });
      break;
    }
    case KernelKind::cosine: {
      // Row norms are reused; the dot product runs in one fixed order so the
      // result stays symmetric for X == Y.
      Vector nx(n), ny(m);
      for (Eigen::Index i = 0; i < n; ++i) nx(i) = X.row(i).norm();
      for (Eigen::Index j = 0; j < m; ++j) ny(j) = Y.row(j).norm();
      parallel_for(n, [&](Eigen::Index b, Eigen::Index e) {
        for (Eigen::Index i = b; i < e; ++i)
          for (Eigen::Index j = 0; j < m; ++j) {
            double dot = 0.0;
            for (Eigen::Index c = 0; c < X.cols(); ++c) dot += X(i, c) * Y(j, c);
            K(i, j) = dot / (nx(i) * ny(j));
          }
      });
      break;
    }
    case KernelKind::corr_rbf: {
      const bool spearman = spec.correlation == CorrKind::spearman;
      Matrix A = X, B = Y;
      if (spearman) {
        for (Eigen::Index i = 0; i < n; ++i) A.row(i) = average_ranks(X.row(i)).transpose();
        for (Eigen::Index j = 0; j < m; ++j) B.row(j) = average_ranks(Y.row(j)).transpose();
      }
      parallel_for(n, [&](Eigen::Index b, Eigen::Index e) {
        for (Eigen::Index i = b; i < e; ++i)
          for (Eigen::Index j = 0; j < m; ++j) {
            const double r = detail::pearson(A.row(i), B.row(j));
            K(i, j) = std::exp(-detail::corr_sqdist(r) / spec.bandwidth);
          }
      });
      break;
    }
    default:
      throw std::logic_error("unhandled kernel kind");
  }
  return K;
}

inline Matrix gram(const KernelSpec& spec, const Matrix& X) { return gram(spec, X, X); }

// Matrix-level kernel combination rho*K1 + (1-rho)*K2.
inline Matrix combine(const Matrix& k1, const Matrix& k2, double rho) {
  if (k1.rows() != k2.rows() || k1.cols() != k2.cols())
    throw std::invalid_argument("kernel matrices must have identical shape");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
  return rho * k1 + (1.0 - rho) * k2;
}

}  // namespace ksc
