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

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksc/metrics.hpp"
#include "ksc/model.hpp"
#include "ksc/soft.hpp"
#include "ksc/types.hpp"

namespace ksc {

namespace detail {

inline std::vector<std::vector<Index>> cluster_members(const Labels& labels, int k) {
  int kmax = -1;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("labels must be nonnegative");
    kmax = std::max(kmax, l);
  }
  if (k < 0) k = kmax + 1;
  if (kmax >= k) throw std::invalid_argument("label exceeds cluster count");
  if (k < 2) throw std::invalid_argument("need at least 2 clusters");
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels.size(); ++i)
    members[static_cast<std::size_t>(labels[i])].push_back(static_cast<Index>(i));
  for (int c = 0; c < k; ++c)
    if (members[static_cast<std::size_t>(c)].empty())
      throw std::runtime_error("cluster " + std::to_string(c) + " is empty");
  return members;
}

}  // namespace detail

// Balanced linefit: eta * mean per-cluster collinearity + (1-eta) * cluster
// balance. A cluster's linefit is the top covariance eigenvalue over the
// trace, rescaled so isotropic scores 0 and collinear scores 1; singletons
// and 1-d projections (k = 2) are collinear by convention.
inline double blf(const Matrix& proj, const Labels& labels, double eta = 0.75, int k = -1) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
  if (static_cast<Index>(labels.size()) != proj.rows())
    throw std::invalid_argument("labels must match projection rows");
  const auto members = detail::cluster_members(labels, k);
  const double p = double(proj.cols());

  double lf_sum = 0.0;
  std::size_t min_size = labels.size(), max_size = 0;
  for (const auto& m : members) {
    min_size = std::min(min_size, m.size());
    max_size = std::max(max_size, m.size());
    double lf = 1.0;
    if (m.size() > 1 && proj.cols() > 1) {
      Matrix rows(static_cast<Index>(m.size()), proj.cols());
      for (std::size_t r = 0; r < m.size(); ++r) rows.row(static_cast<Index>(r)) = proj.row(m[r]);
      const Matrix centered = rows.rowwise() - rows.colwise().mean();
      const Matrix cov = centered.transpose() * centered / double(m.size());
      const double trace = cov.trace();
      if (trace > 1e-300) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
        const double top = es.eigenvalues().maxCoeff();
        lf = (top / trace - 1.0 / p) / (1.0 - 1.0 / p);
      }
    }
    lf_sum += lf;
  }
  const double balance = double(min_size) / double(max_size);
  return eta * (lf_sum / double(members.size())) + (1.0 - eta) * balance;
}

// Mean cosine alignment between validation projections and their cluster
// prototype. Zero-norm rows are skipped and counted.
inline double baf(const Matrix& proj, const Labels& labels, int* skipped = nullptr,
                  int k = -1) {
  if (static_cast<Index>(labels.size()) != proj.rows())
    throw std::invalid_argument("labels must match projection rows");
  const auto members = detail::cluster_members(labels, k);
  if (skipped) *skipped = 0;

  double acc = 0.0;
  for (const auto& m : members) {
    Eigen::RowVectorXd proto = Eigen::RowVectorXd::Zero(proj.cols());
    for (Index i : m) proto += proj.row(i);
    proto /= double(m.size());
    double cluster_sum = 0.0;
    if (proto.norm() == 0.0) {
      if (skipped) *skipped += static_cast<int>(m.size());
    } else {
      for (Index i : m) {
        const double n = proj.row(i).norm();
        if (n == 0.0) {
          if (skipped) ++*skipped;
          continue;
        }
        cluster_sum += proj.row(i).dot(proto) / (n * proto.norm());
      }
    }
    acc += cluster_sum / double(m.size());
  }
  return acc / double(members.size());
}

// Average membership of validation points in their own cluster.
inline double ams(const SoftAssignment& soft, const Labels& labels) {
  const Matrix& sm = soft.memberships;
  if (static_cast<Index>(labels.size()) != sm.rows())
    throw std::invalid_argument("labels must match membership rows");
  for (Index i = 0; i < sm.rows(); ++i)
    if (std::abs(sm.row(i).sum() - 1.0) > 1e-9)
      throw std::invalid_argument("membership rows must sum to 1");
  const int k = static_cast<int>(sm.cols());
  const auto members = detail::cluster_members(labels, k);

  double acc = 0.0;
  for (int p = 0; p < k; ++p) {
    double cluster_sum = 0.0;
    for (Index i : members[static_cast<std::size_t>(p)]) cluster_sum += sm(i, p);
    acc += cluster_sum / double(members[static_cast<std::size_t>(p)].size());
  }
  return acc / double(k);
}

// Scatter-trace Fisher criterion: trace(S_B)/trace(S_W), size-weighted
// between scatter over pooled within scatter. Near-zero within scatter
// returns the 1e12 sentinel.
inline double fisher(const Matrix& proj, const Labels& labels, int k = -1) {
  if (static_cast<Index>(labels.size()) != proj.rows())
    throw std::invalid_argument("labels must match projection rows");
  const auto members = detail::cluster_members(labels, k);
  const Eigen::RowVectorXd global_mean = proj.colwise().mean();

  double sb = 0.0, sw = 0.0;
  for (const auto& m : members) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(proj.cols());
    for (Index i : m) mean += proj.row(i);
    mean /= double(m.size());
    sb += double(m.size()) * (mean - global_mean).squaredNorm();
    for (Index i : m) sw += (proj.row(i) - mean).squaredNorm();
  }
  if (sw < 1e-12) return 1e12;
  return sb / sw;
}

enum class Criterion { blf, baf, ams, modularity, fisher };

inline const char* criterion_name(Criterion c) {
  switch (c) {
    case Criterion::blf: return "blf";
    case Criterion::baf: return "baf";
    case Criterion::ams: return "ams";
    case Criterion::modularity: return "modularity";
    case Criterion::fisher: return "fisher";
  }
  return "unknown";
}

inline Criterion criterion_from_string(const std::string& s) {
  if (s == "blf") return Criterion::blf;
  if (s == "baf") return Criterion::baf;
  if (s == "ams") return Criterion::ams;
  if (s == "modularity") return Criterion::modularity;
  if (s == "fisher") return Criterion::fisher;
  throw std::invalid_argument("unknown criterion: " + s);
}

struct GridEntry {
  int k = 0;
  double bandwidth = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  bool ok = false;
  std::string note;
};

struct GridResult {
  std::vector<GridEntry> entries;
  std::size_t best = 0;
};

struct GridOptions {
  double blf_eta = 0.75;
  CorrKind correlation = CorrKind::pearson;
  std::shared_ptr<const Matrix> precomputed;  // for KernelKind::precomputed
};

// Argmax with the documented tie rule: value, then smallest k, then
// smallest bandwidth.
inline std::size_t pick_best(const std::vector<GridEntry>& entries) {
  if (entries.empty()) throw std::invalid_argument("empty grid");
  std::size_t best = 0;
  bool any_ok = false;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!e.ok) continue;
    if (!any_ok) {
      best = i;
      any_ok = true;
      continue;
    }
    const auto& b = entries[best];
    if (e.value > b.value ||
        (e.value == b.value &&
         (e.k < b.k || (e.k == b.k && e.bandwidth < b.bandwidth))))
      best = i;
  }
  if (!any_ok) throw std::runtime_error("every grid entry failed");
  return best;
}

inline KernelSpec make_grid_spec(KernelKind kind, double bandwidth, const GridOptions& opts) {
  switch (kind) {
    case KernelKind::rbf: return rbf_kernel(bandwidth);
    case KernelKind::chi2_rbf: return chi2_kernel(bandwidth);
    case KernelKind::cosine: return cosine_kernel();
    case KernelKind::corr_rbf: return corr_kernel(bandwidth, opts.correlation);
    case KernelKind::precomputed:
      if (!opts.precomputed)
        throw std::invalid_argument("precomputed grid requires a kernel matrix");
      return precomputed_kernel(opts.precomputed);
  }
  throw std::logic_error("unhandled kernel kind");
}

// Full sweep over (k, bandwidth). Failing combinations are recorded with
// value -inf instead of aborting the sweep.
inline GridResult grid_search(const Dataset& train_data, const Dataset& val_data,
                              KernelKind kind, const std::vector<int>& ks,
                              const std::vector<double>& bandwidths, Criterion crit,
                              const GridOptions& opts = GridOptions{}) {
  if (ks.empty()) throw std::invalid_argument("empty k range");
  const bool needs_bandwidth =
      kind == KernelKind::rbf || kind == KernelKind::chi2_rbf || kind == KernelKind::corr_rbf;
  std::vector<double> bws = bandwidths;
  if (bws.empty()) {
    if (needs_bandwidth) throw std::invalid_argument("bandwidth grid required for this kernel");
    bws.push_back(0.0);  // sentinel for parameter-free kernels
  }

  GridResult out;
  out.entries.reserve(ks.size() * bws.size());
  for (int k : ks)
    for (double bw : bws) {
      GridEntry e;
      e.k = k;
      e.bandwidth = bw;
      try {
        const KernelSpec spec = make_grid_spec(kind, bw, opts);
        const KscModel model = train(train_data, spec, k);
        const Labels val_labels = predict(model, val_data.points);
        double v = 0.0;
        switch (crit) {
          case Criterion::blf: {
            const Matrix proj = project_points(model, val_data.points);
            v = blf(proj, val_labels, opts.blf_eta, k);
            break;
          }
          case Criterion::baf: {
            const Matrix proj = project_points(model, val_data.points);
            v = baf(proj, val_labels, nullptr, k);
            break;
          }
          case Criterion::ams: {
            const Matrix train_proj = project_points(model, train_data.points);
            const Matrix protos = prototypes(train_proj, model.train_labels, k);
            const Matrix val_proj = project_points(model, val_data.points);
            const SoftAssignment soft = soft_assign(val_proj, protos);
            v = ams(soft, val_labels);
            break;
          }
          case Criterion::modularity: {
            const Matrix adj = gram(spec, val_data.points, val_data.points);
            v = modularity(adj, val_labels);
            break;
          }
          case Criterion::fisher: {
            const Matrix proj = project_points(model, val_data.points);
            v = fisher(proj, val_labels, k);
            break;
          }
        }
        if (!std::isfinite(v)) throw std::runtime_error("criterion value not finite");
        e.value = v;
        e.ok = true;
      } catch (const std::exception& ex) {
        e.ok = false;
        e.value = -std::numeric_limits<double>::infinity();
        e.note = ex.what();
      }
      out.entries.push_back(std::move(e));
    }
  out.best = pick_best(out.entries);
  return out;
}

}  // namespace ksc
