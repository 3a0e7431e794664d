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
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksc/model.hpp"
#include "ksc/spectral.hpp"
#include "ksc/types.hpp"

namespace ksc {

// Pivoted incomplete Cholesky factor: omega ~ G G^T with G lower-triangular
// in pivot order.
struct IcdFactor {
  Matrix G;
  std::vector<Index> pivots;
  double residual_trace = 0.0;

  Index rank() const { return G.cols(); }
};

// Greedy pivoted ICD: always takes the largest remaining diagonal residual,
// stops once the residual trace falls to tol or rank hits r_max (<= 0 means
// no cap). Ties go to the lowest index.
inline IcdFactor icd(const Matrix& omega, double tol, Index r_max = -1) {
  const Index n = omega.rows();
  if (omega.cols() != n) throw std::invalid_argument("kernel matrix must be square");
  if (tol < 0.0) throw std::invalid_argument("tolerance must be nonnegative");
  const Index cap = r_max <= 0 ? n : std::min(r_max, n);

  Vector d = omega.diagonal();
  std::vector<bool> pivoted(static_cast<std::size_t>(n), false);
  IcdFactor out;
  out.G = Matrix::Zero(n, cap);
  double residual = d.sum();

  Index r = 0;
  for (; r < cap; ++r) {
    if (residual <= tol) break;
    Index p = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i)
      if (!pivoted[static_cast<std::size_t>(i)] && d(i) > best) {
        best = d(i);
        p = i;
      }
    if (p < 0) break;
    if (d(p) < -1e-10) throw std::runtime_error("matrix not PSD");
    if (d(p) <= 0.0) break;

    const double g = std::sqrt(d(p));
    out.G(p, r) = g;
    for (Index i = 0; i < n; ++i) {
      if (i == p || pivoted[static_cast<std::size_t>(i)]) continue;
      out.G(i, r) =
          (omega(i, p) - out.G.row(i).head(r).dot(out.G.row(p).head(r))) / g;
    }
    pivoted[static_cast<std::size_t>(p)] = true;
    d(p) = 0.0;
    residual = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (pivoted[static_cast<std::size_t>(i)]) continue;
      d(i) -= out.G(i, r) * out.G(i, r);
      if (d(i) < -1e-10) throw std::runtime_error("matrix not PSD");
      residual += d(i);
    }
    out.pivots.push_back(p);
  }
  out.G.conservativeResize(n, r);
  out.residual_trace = std::max(residual, 0.0);
  return out;
}

struct ReducedEig {
  Matrix alphas;       // N x (k-1), spanned by the left singular basis of G
  Vector eigenvalues;  // k-1
  Vector degrees;      // degrees of G G^T
};

// Reduced weighted-kernel-PCA eigenproblem. The dual operator restricted to
// the column span of G becomes the small problem B Psi^2 applied to the
// singular-basis coordinates; degrees of G G^T come from G (G^T 1) without
// ever forming the approximate kernel.
inline ReducedEig reduced_eigproblem(const IcdFactor& factor, int k) {
  const Matrix& G = factor.G;
  const Index n = G.rows();
  if (k < 2) throw std::invalid_argument("need at least 2 clusters");

  Eigen::JacobiSVD<Matrix> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > sv(0) * 1e-12) ++rank;
  if (Index(k - 1) > rank)
    throw std::invalid_argument("k-1 exceeds the reduced rank " + std::to_string(rank));
  const Matrix U = svd.matrixU().leftCols(rank);
  const Vector psi2 = sv.head(rank).cwiseAbs2();

  ReducedEig out;
  out.degrees = G * (G.transpose() * Vector::Ones(n));
  for (Index i = 0; i < n; ++i)
    if (!(out.degrees(i) > 0.0))
      throw std::runtime_error("nonpositive degree at row " + std::to_string(i) +
                               " (check kernel choice)");
  const Vector u = out.degrees.cwiseInverse();
  const double s = u.sum();
  const Vector Utu = U.transpose() * u;
  const Matrix B =
      U.transpose() * u.asDiagonal() * U - (1.0 / s) * (Utu * Utu.transpose());
  const Matrix M = B * psi2.asDiagonal();

  const EigPick pick = leading_real_eigs(M, k - 1);
  out.alphas = U * pick.vectors;
  out.eigenvalues = pick.values;
  for (Index c = 0; c < out.alphas.cols(); ++c) {
    const double nrm = out.alphas.col(c).norm();
    if (nrm > 0.0) out.alphas.col(c) /= nrm;
    detail::fix_sign(out.alphas.col(c));
  }
  return out;
}

// Least-squares reduced-set coefficients: omega_cc zeta = omega_cf alphas,
// column by column, falling back to the minimum-norm solution when the
// reduced kernel block is singular.
inline Matrix reduced_set_fit(const Matrix& omega_cc, const Matrix& omega_cf,
                              const Matrix& alphas) {
  const Index r = omega_cc.rows();
  if (omega_cc.cols() != r) throw std::invalid_argument("reduced kernel block must be square");
  if (omega_cf.rows() != r || omega_cf.cols() != alphas.rows())
    throw std::invalid_argument("reduced cross-kernel shape mismatch");
  const double scale = std::max(1.0, omega_cc.cwiseAbs().maxCoeff());
  if ((omega_cc - omega_cc.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("reduced kernel block must be symmetric");

  const Matrix rhs = omega_cf * alphas;
  Eigen::LDLT<Matrix> ldlt(omega_cc);
  Matrix zeta;
  bool good = ldlt.info() == Eigen::Success;
  if (good) {
    zeta = ldlt.solve(rhs);
    good = (omega_cc * zeta - rhs).cwiseAbs().maxCoeff() <=
           1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff());
  }
  if (!good) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(omega_cc);
    zeta = cod.solve(rhs);
  }
  return zeta;
}

struct GroupLassoResult {
  Matrix beta;
  bool converged = false;
  int sweeps = 0;
};

// Eq.-style group-lasso objective through the kernel trick; used by tests
// to certify that coordinate descent never increases it.
inline double group_lasso_objective(const Matrix& omega, const Matrix& alphas,
                                    const Matrix& beta, double lambda,
                                    const std::vector<double>& weights) {
  const Matrix diff = alphas - beta;
  double f = 0.5 * (diff.transpose() * omega * diff).trace();
  for (Index l = 0; l < beta.rows(); ++l)
    f += lambda * std::sqrt(weights[static_cast<std::size_t>(l)]) * beta.row(l).norm();
  return f;
}

// Blockwise coordinate descent on rows of beta. Each row has the closed
// form shrink: beta_l = 0 when ||s_l|| <= lambda sqrt(rho_l), otherwise
// beta_l = (||s_l|| - lambda sqrt(rho_l)) / (omega_ll ||s_l||) * s_l with
// s_l the row residual excluding beta_l itself. Warm started at alphas so
// lambda = 0 returns immediately.
inline GroupLassoResult group_lasso(const Matrix& omega, const Matrix& alphas, double lambda,
                                    const std::vector<double>& weights, double tol = 1e-8,
                                    int max_sweeps = 100) {
  const Index n = omega.rows();
  if (omega.cols() != n) throw std::invalid_argument("kernel matrix must be square");
  if (alphas.rows() != n) throw std::invalid_argument("alphas rows must match kernel size");
  if (static_cast<Index>(weights.size()) != n)
    throw std::invalid_argument("one weight per training point required");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
  for (Index l = 0; l < n; ++l)
    if (!(omega(l, l) > 0.0)) throw std::invalid_argument("kernel diagonal must be positive");

  GroupLassoResult out;
  out.beta = alphas;
  Matrix resid = omega * (alphas - out.beta);  // maintained as omega (alphas - beta)

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Index l = 0; l < n; ++l) {
      const Eigen::RowVectorXd old = out.beta.row(l);
      const Eigen::RowVectorXd s = resid.row(l) + omega(l, l) * old;
      const double sn = s.norm();
      const double thr = lambda * std::sqrt(weights[static_cast<std::size_t>(l)]);
      Eigen::RowVectorXd fresh;
      if (sn <= thr)
        fresh = Eigen::RowVectorXd::Zero(out.beta.cols());
      else
        fresh = ((sn - thr) / (omega(l, l) * sn)) * s;
      const Eigen::RowVectorXd delta = fresh - old;
      const double change = delta.cwiseAbs().maxCoeff();
      if (change > 0.0) {
        out.beta.row(l) = fresh;
        resid.noalias() -= omega.col(l) * delta;
      }
      max_change = std::max(max_change, change);
    }
    ++out.sweeps;
    if (max_change < tol) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged)
    std::cerr << "warning: group lasso stopped at " << out.sweeps
              << " sweeps without reaching tolerance\n";
  return out;
}

// Smallest lambda for which the all-zero solution satisfies the group-lasso
// stationarity condition.
inline double group_lasso_lambda_max(const Matrix& omega, const Matrix& alphas,
                                     const std::vector<double>& weights) {
  const Matrix t = omega * alphas;
  double lm = 0.0;
  for (Index l = 0; l < t.rows(); ++l)
    lm = std::max(lm, t.row(l).norm() / std::sqrt(weights[static_cast<std::size_t>(l)]));
  return lm;
}

struct ReweightedResult {
  Matrix beta;
  bool jittered = false;
  int iterations = 0;
};

// One ridge-type subproblem of the reweighted scheme: per column solve
// (omega + diag(lambda_w.^2 + rho)) beta = omega alphas.
inline Matrix reweighted_step(const Matrix& omega, const Matrix& alphas, const Matrix& lambda_w,
                              double rho, bool* jittered = nullptr) {
  const Index n = omega.rows();
  Matrix beta(n, alphas.cols());
  const Matrix rhs = omega * alphas;
  for (Index c = 0; c < alphas.cols(); ++c) {
    Matrix sys = omega;
    sys.diagonal() += lambda_w.col(c).cwiseAbs2();
    sys.diagonal().array() += rho;
    Eigen::LDLT<Matrix> ldlt(sys);
    if (ldlt.info() != Eigen::Success) {
      sys.diagonal().array() += 1e-10;
      ldlt.compute(sys);
      if (jittered) *jittered = true;
      std::cerr << "warning: singular reweighted subproblem, added diagonal jitter\n";
    }
    beta.col(c) = ldlt.solve(rhs.col(c));
  }
  return beta;
}

// Iteratively reweighted L1 surrogate: ridge subproblems with weights
// 1/(|beta| + 1e-4), 10 outer iterations, then rows below 1e-6 in the max
// norm snap to exact zero.
inline ReweightedResult reweighted_l1(const Matrix& omega, const Matrix& alphas, double rho,
                                      int max_iter = 10, double tol = 1e-8) {
  const Index n = omega.rows();
  if (omega.cols() != n) throw std::invalid_argument("kernel matrix must be square");
  if (alphas.rows() != n) throw std::invalid_argument("alphas rows must match kernel size");
  if (rho < 0.0) throw std::invalid_argument("rho must be nonnegative");

  ReweightedResult out;
  Matrix lambda_w = Matrix::Ones(n, alphas.cols());
  Matrix beta = alphas;
  for (int it = 0; it < max_iter; ++it) {
    const Matrix fresh = reweighted_step(omega, alphas, lambda_w, rho, &out.jittered);
    const double change = (fresh - beta).cwiseAbs().maxCoeff();
    beta = fresh;
    ++out.iterations;
    if (change < tol) break;
    lambda_w = (1.0 / (beta.cwiseAbs().array() + 1e-4)).matrix();
  }
  for (Index l = 0; l < n; ++l)
    if (beta.row(l).cwiseAbs().maxCoeff() < 1e-6) beta.row(l).setZero();
  out.beta = beta;
  return out;
}

enum class ReducedSource { icd, group_lasso, reweighted_l1 };

inline const char* reduced_source_name(ReducedSource s) {
  switch (s) {
    case ReducedSource::icd: return "icd";
    case ReducedSource::group_lasso: return "group_lasso";
    case ReducedSource::reweighted_l1: return "reweighted_l1";
  }
  return "unknown";
}

inline ReducedSource reduced_source_from_string(const std::string& s) {
  if (s == "icd") return ReducedSource::icd;
  if (s == "group_lasso") return ReducedSource::group_lasso;
  if (s == "reweighted_l1") return ReducedSource::reweighted_l1;
  throw std::invalid_argument("unknown reduced source: " + s);
}

// Out-of-sample model that evaluates kernels against a reduced point set
// only. Carries its codebook so prediction is self-contained.
struct ReducedModel {
  Matrix reduced_points;               // R x d
  std::vector<Index> reduced_indices;  // rows of the training subsample kept
  Matrix coefficients;                 // R x (k-1)
  Vector biases;                       // k-1
  KernelSpec kernel;
  ReducedSource source = ReducedSource::icd;
  Codebook codebook;
  Labels train_labels;
  Vector eigenvalues;

  int k() const { return static_cast<int>(coefficients.cols()) + 1; }
  Index reduced_size() const { return coefficients.rows(); }
};

inline Matrix sparse_project(const ReducedModel& model, const Matrix& points) {
  if (model.reduced_size() == 0) throw std::runtime_error("empty reduced set");
  if (points.cols() != model.reduced_points.cols())
    throw std::invalid_argument("input dimension " + std::to_string(points.cols()) +
                                " does not match model dimension " +
                                std::to_string(model.reduced_points.cols()));
  const Matrix omega_rows = gram(model.kernel, points, model.reduced_points);
  return (omega_rows * model.coefficients).rowwise() + model.biases.transpose();
}

inline Labels sparse_predict(const ReducedModel& model, const Matrix& points,
                             const Codebook& codebook) {
  return decode_rows(sign_matrix(sparse_project(model, points)), codebook);
}

inline Labels sparse_predict(const ReducedModel& model, const Matrix& points) {
  return sparse_predict(model, points, model.codebook);
}

inline Labels sparse_predict(const ReducedModel& model, const Dataset& points) {
  return sparse_predict(model, points.points, model.codebook);
}

namespace detail {

// Centering biases for a reduced expansion: the same weighted identity as
// the dense model, with e = omega_cols * coefficients.
inline Vector reduced_bias(const Matrix& omega_cols, const Matrix& coefficients,
                           const Vector& degrees) {
  const Vector u = degrees.cwiseInverse();
  const double s = u.sum();
  return -(coefficients.transpose() * (omega_cols.transpose() * u)) / s;
}

inline std::vector<double> cluster_fraction_weights(const Labels& labels, int k) {
  std::vector<double> count(static_cast<std::size_t>(k), 0.0);
  for (int l : labels) ++count[static_cast<std::size_t>(l)];
  const double n = double(labels.size());
  std::vector<double> w(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double frac = count[static_cast<std::size_t>(labels[i])] / n;
    w[i] = frac * frac;  // sqrt(rho_l) equals the cluster fraction
  }
  return w;
}

inline ReducedModel from_penalized_beta(const KscModel& dense, const Matrix& omega,
                                        const Matrix& beta, ReducedSource source) {
  std::vector<Index> keep;
  for (Index l = 0; l < beta.rows(); ++l)
    if (beta.row(l).cwiseAbs().maxCoeff() > 0.0) keep.push_back(l);
  if (keep.empty()) throw std::runtime_error("sparsification removed every training point");

  ReducedModel out;
  out.reduced_indices = keep;
  out.reduced_points.resize(static_cast<Index>(keep.size()), dense.train_points.cols());
  out.coefficients.resize(static_cast<Index>(keep.size()), beta.cols());
  Matrix omega_cols(omega.rows(), static_cast<Index>(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.reduced_points.row(static_cast<Index>(r)) = dense.train_points.row(keep[r]);
    out.coefficients.row(static_cast<Index>(r)) = beta.row(keep[r]);
    omega_cols.col(static_cast<Index>(r)) = omega.col(keep[r]);
  }
  out.biases = reduced_bias(omega_cols, out.coefficients, degree(omega));
  out.kernel = dense.kernel;
  out.source = source;
  out.codebook = dense.codebook;
  out.train_labels = dense.train_labels;
  out.eigenvalues = dense.eigenvalues;
  return out;
}

}  // namespace detail

// ICD path: reduced eigenproblem on the pivot set, then least-squares
// reduced-set coefficients. tol < 0 picks 1e-6 * trace(omega); r_max <= 0
// picks a tenth of the training size.
inline ReducedModel sparsify_icd(const Dataset& tr, const KernelSpec& kernel, int k,
                                 double tol = -1.0, Index r_max = 0) {
  if (k < 2) throw std::invalid_argument("need at least 2 clusters");
  const Matrix omega = gram(kernel, tr.points);
  const double eff_tol = tol < 0.0 ? 1e-6 * omega.trace() : tol;
  const Index eff_rmax = r_max <= 0 ? std::max<Index>(tr.size() / 10, 1) : r_max;

  const IcdFactor factor = icd(omega, eff_tol, eff_rmax);
  const ReducedEig eig = reduced_eigproblem(factor, k);

  const Index r = static_cast<Index>(factor.pivots.size());
  Matrix omega_cc(r, r), omega_cf(r, omega.cols());
  for (Index i = 0; i < r; ++i) {
    omega_cf.row(i) = omega.row(factor.pivots[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < r; ++j)
      omega_cc(i, j) = omega(factor.pivots[static_cast<std::size_t>(i)],
                             factor.pivots[static_cast<std::size_t>(j)]);
  }

  ReducedModel out;
  out.reduced_indices = factor.pivots;
  out.reduced_points.resize(r, tr.points.cols());
  for (Index i = 0; i < r; ++i)
    out.reduced_points.row(i) = tr.points.row(factor.pivots[static_cast<std::size_t>(i)]);
  out.coefficients = reduced_set_fit(omega_cc, omega_cf, eig.alphas);
  out.biases = detail::reduced_bias(omega_cf.transpose(), out.coefficients, eig.degrees);
  out.kernel = kernel;
  out.source = ReducedSource::icd;
  out.codebook = build_codebook(sign_matrix(eig.alphas), k);
  out.train_labels = decode_rows(sign_matrix(eig.alphas), out.codebook);
  out.eigenvalues = eig.eigenvalues;
  return out;
}

// Group-lasso path: dense training first, then row sparsification of the
// dual coefficients with sqrt(rho_l) set to the cluster fraction.
inline ReducedModel sparsify_group_lasso(const Dataset& tr, const KernelSpec& kernel, int k,
                                         double lambda) {
  const KscModel dense = train(tr, kernel, k);
  const Matrix omega = gram(kernel, tr.points);
  const auto weights = detail::cluster_fraction_weights(dense.train_labels, k);
  const GroupLassoResult fit = group_lasso(omega, dense.alphas, lambda, weights);
  return detail::from_penalized_beta(dense, omega, fit.beta, ReducedSource::group_lasso);
}

// Reweighted-L1 path. Columns are rescaled to unit max-abs first: sign
// decoding is invariant to positive per-column scaling, and unit-scale
// entries keep the reweighting ridge commensurate with the kernel degrees
// (unit 2-norm columns collapse the support entirely).
inline ReducedModel sparsify_reweighted_l1(const Dataset& tr, const KernelSpec& kernel, int k,
                                           double rho) {
  const KscModel dense = train(tr, kernel, k);
  const Matrix omega = gram(kernel, tr.points);
  Matrix scaled = dense.alphas;
  for (Index c = 0; c < scaled.cols(); ++c) {
    const double m = scaled.col(c).cwiseAbs().maxCoeff();
    if (m > 0.0) scaled.col(c) /= m;
  }
  const ReweightedResult fit = reweighted_l1(omega, scaled, rho);
  return detail::from_penalized_beta(dense, omega, fit.beta, ReducedSource::reweighted_l1);
}

}  // namespace ksc
