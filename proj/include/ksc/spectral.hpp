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
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksc/types.hpp"

namespace ksc {

struct SpectralSolution {
  Matrix alphas;       // N_tr x (k-1), unit columns, sign-fixed
  Vector eigenvalues;  // descending
  Vector degrees;      // positive row sums of the kernel matrix
};

// Row sums of a symmetric kernel matrix. Nonpositive sums indicate an
// invalid kernel choice for this data (e.g. cosine on signed features).
inline Vector degree(const Matrix& omega) {
  if (omega.rows() != omega.cols())
    throw std::invalid_argument("kernel matrix must be square");
  const double scale = std::max(1.0, omega.cwiseAbs().maxCoeff());
  if ((omega - omega.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("kernel matrix must be symmetric");
  Vector d = omega.rowwise().sum();
  for (Index i = 0; i < d.size(); ++i)
    if (!(d(i) > 0.0))
      throw std::runtime_error("nonpositive degree at row " + std::to_string(i) +
                               " (check kernel choice)");
  return d;
}

struct EigPick {
  Matrix vectors;  // unit columns, sign-fixed
  Vector values;   // real parts, descending
};

namespace detail {

// First index of maximal magnitude; the explicit loop pins the tie-break
// that vectorized argmax leaves unspecified.
inline void fix_sign(Eigen::Ref<Vector> v) {
  Index imax = 0;
  double best = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (v(imax) < 0.0) v = -v;
}

inline bool lex_less(const Vector& a, const Vector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

}  // namespace detail

// Leading `count` eigenpairs (by real part) of a general real matrix.
// Conjugate pairs contribute their real and imaginary parts as candidate
// vectors; if a selected pair is genuinely complex beyond 1e-8 the problem
// is rejected. Returned vectors have unit norm and the largest-magnitude
// entry positive; eigenvalue ties are broken lexicographically.
inline EigPick leading_real_eigs(const Matrix& m, Index count) {
  const Index n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("matrix must be square");
  if (count < 1 || count > n) throw std::invalid_argument("invalid eigenpair count");

  Eigen::EigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed to converge");

  struct Cand {
    double re, im;
    Vector vec;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<std::size_t>(n));
  Index j = 0;
  while (j < n) {
    const double re = es.eigenvalues()(j).real();
    const double im = es.eigenvalues()(j).imag();
    if (im == 0.0) {
      Vector v = es.eigenvectors().col(j).real();
      cands.push_back({re, 0.0, std::move(v)});
      ++j;
    } else {
      // Conjugate pair: both the real and imaginary parts of the complex
      // eigenvector are near-eigenvectors when the imaginary part of the
      // eigenvalue is negligible.
      Vector vr = es.eigenvectors().col(j).real();
      Vector vi = es.eigenvectors().col(j).imag();
      cands.push_back({re, std::abs(im), std::move(vr)});
      cands.push_back({re, std::abs(im), std::move(vi)});
      j += 2;
    }
  }

  for (auto& c : cands) {
    const double nv = c.vec.norm();
    if (nv > 0.0) c.vec /= nv;
    detail::fix_sign(c.vec);
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.re != b.re) return a.re > b.re;
    return detail::lex_less(a.vec, b.vec);
  });

  EigPick out;
  out.vectors.resize(n, count);
  out.values.resize(count);
  for (Index c = 0; c < count; ++c) {
    const Cand& cand = cands[static_cast<std::size_t>(c)];
    if (cand.im > 1e-8 * std::max(1.0, std::abs(cand.re)))
      throw std::runtime_error("leading eigenvalue " + std::to_string(c) +
                               " is complex (imag " + std::to_string(cand.im) +
                               "): badly conditioned kernel");
    out.vectors.col(c) = cand.vec;
    out.values(c) = cand.re;
  }
  return out;
}

// Weighted kernel PCA dual problem: find the k-1 leading eigenpairs of
// D^{-1} M_D Omega, where M_D is the D^{-1}-weighted centering matrix.
inline SpectralSolution solve_dual(const Matrix& omega, int k) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  const Index n = omega.rows();
  if (static_cast<Index>(k) - 1 >= n)
    throw std::invalid_argument("k - 1 must be smaller than the training size");
  Vector d = degree(omega);
  const Vector u = d.cwiseInverse();
  const double s = u.sum();
  const Vector t = omega.transpose() * u;
  // P = D^{-1} (Omega - (1/s) * 1 * (u^T Omega))
  Matrix p = omega - (Vector::Ones(n) * (t.transpose() / s));
  p = u.asDiagonal() * p;

  EigPick pick = leading_real_eigs(p, static_cast<Index>(k) - 1);
  return SpectralSolution{std::move(pick.vectors), std::move(pick.values), std::move(d)};
}

// Bias terms enforcing the weighted centering of training projections:
// b_l = -(1^T D^{-1} Omega alpha_l) / (1^T D^{-1} 1).
inline Vector compute_bias(const Matrix& omega, const Matrix& alphas, const Vector& degrees) {
  if (omega.rows() != omega.cols()) throw std::invalid_argument("kernel matrix must be square");
  if (alphas.rows() != omega.rows() || degrees.size() != omega.rows())
    throw std::invalid_argument("inconsistent shapes in compute_bias");
  const Vector u = degrees.cwiseInverse();
  const double s = u.sum();
  const Vector t = omega.transpose() * u;
  return -(alphas.transpose() * t) / s;
}

// Out-of-sample projection: e = Omega_rows * alphas + 1 * b^T.
inline Matrix project(const Matrix& omega_rows, const Matrix& alphas, const Vector& biases) {
  if (omega_rows.cols() != alphas.rows())
    throw std::invalid_argument("kernel rows and alphas have mismatched shapes");
  if (biases.size() != alphas.cols())
    throw std::invalid_argument("bias count must match eigenvector count");
  Matrix e = omega_rows * alphas;
  e.rowwise() += biases.transpose();
  return e;
}

}  // namespace ksc
