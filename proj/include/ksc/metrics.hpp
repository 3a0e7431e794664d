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
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksc/types.hpp"

namespace ksc {

namespace detail {

// Contingency table over arbitrary integer label values.
struct Contingency {
  std::vector<std::vector<double>> cells;  // r x c counts
  std::vector<double> row_sums, col_sums;
  double n = 0;
};

inline Contingency contingency(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) throw std::invalid_argument("label sequences must have equal length");
  if (a.empty()) throw std::invalid_argument("label sequences must be nonempty");
  std::map<int, std::size_t> ra, rb;
  for (int v : a) ra.emplace(v, ra.size());
  for (int v : b) rb.emplace(v, rb.size());
  Contingency t;
  t.cells.assign(ra.size(), std::vector<double>(rb.size(), 0.0));
  t.row_sums.assign(ra.size(), 0.0);
  t.col_sums.assign(rb.size(), 0.0);
  t.n = double(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto r = ra[a[i]];
    const auto c = rb[b[i]];
    t.cells[r][c] += 1.0;
    t.row_sums[r] += 1.0;
    t.col_sums[c] += 1.0;
  }
  return t;
}

inline double comb2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace detail

// Adjusted Rand index over the pair-counting contingency table. The
// degenerate case where max equals expected (e.g. both partitions trivial)
// is defined as 1.
inline double ari(const Labels& a, const Labels& b) {
  if (a.size() < 2) throw std::invalid_argument("ari requires at least 2 points");
  const auto t = detail::contingency(a, b);
  double index = 0.0;
  for (const auto& row : t.cells)
    for (double v : row) index += detail::comb2(v);
  double sum_a = 0.0, sum_b = 0.0;
  for (double v : t.row_sums) sum_a += detail::comb2(v);
  for (double v : t.col_sums) sum_b += detail::comb2(v);
  const double expected = sum_a * sum_b / detail::comb2(t.n);
  const double maximum = (sum_a + sum_b) / 2.0;
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

// Normalized mutual information I/sqrt(Ha*Hb) with natural logs. Both
// entropies zero -> 1 by convention; exactly one zero -> 0.
inline double nmi(const Labels& a, const Labels& b) {
  const auto t = detail::contingency(a, b);
  double ha = 0.0, hb = 0.0, mi = 0.0;
  for (double v : t.row_sums)
    if (v > 0) ha -= (v / t.n) * std::log(v / t.n);
  for (double v : t.col_sums)
    if (v > 0) hb -= (v / t.n) * std::log(v / t.n);
  for (std::size_t r = 0; r < t.cells.size(); ++r)
    for (std::size_t c = 0; c < t.cells[r].size(); ++c) {
      const double v = t.cells[r][c];
      if (v > 0)
        mi += (v / t.n) * std::log(v * t.n / (t.row_sums[r] * t.col_sums[c]));
    }
  if (ha == 0.0 && hb == 0.0) return 1.0;
  if (ha == 0.0 || hb == 0.0) return 0.0;
  return mi / std::sqrt(ha * hb);
}

inline Matrix pairwise_euclidean(const Matrix& x) {
  const Index n = x.rows();
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      const double v = (x.row(i) - x.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

// Mean silhouette value on a precomputed distance matrix. Points in
// singleton clusters contribute 0, as do points with a = b = 0.
inline double silhouette(const Matrix& dist, const Labels& labels) {
  const Index n = dist.rows();
  if (dist.cols() != n) throw std::invalid_argument("distance matrix must be square");
  if (static_cast<Index>(labels.size()) != n)
    throw std::invalid_argument("labels must match the distance matrix size");

  std::map<int, std::vector<Index>> clusters;
  for (Index i = 0; i < n; ++i) clusters[labels[static_cast<std::size_t>(i)]].push_back(i);
  if (clusters.size() < 2) throw std::runtime_error("silhouette undefined for a single cluster");

  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    const int own = labels[static_cast<std::size_t>(i)];
    const auto& mine = clusters[own];
    if (mine.size() == 1) continue;  // singleton scores 0
    double a = 0.0;
    for (Index j : mine)
      if (j != i) a += dist(i, j);
    a /= double(mine.size() - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [lab, members] : clusters) {
      if (lab == own) continue;
      double m = 0.0;
      for (Index j : members) m += dist(i, j);
      b = std::min(b, m / double(members.size()));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) acc += (b - a) / denom;
  }
  return acc / double(n);
}

inline double silhouette_points(const Matrix& points, const Labels& labels) {
  return silhouette(pairwise_euclidean(points), labels);
}

// Newman-Girvan modularity. Aggregating per community keeps the clean cases
// exact: a single community gives 0, balanced ideal splits give exact
// dyadic values.
inline double modularity(const Matrix& adj, const Labels& labels) {
  const Index n = adj.rows();
  if (adj.cols() != n) throw std::invalid_argument("adjacency must be square");
  if (static_cast<Index>(labels.size()) != n)
    throw std::invalid_argument("labels must match the adjacency size");
  if ((adj.array() < 0).any()) throw std::invalid_argument("adjacency must be nonnegative");
  const double scale = std::max(1.0, adj.cwiseAbs().maxCoeff());
  if ((adj - adj.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("adjacency must be symmetric");
  const double m2 = adj.sum();
  if (!(m2 > 0.0)) throw std::invalid_argument("total edge weight must be positive");

  std::map<int, std::vector<Index>> clusters;
  for (Index i = 0; i < n; ++i) clusters[labels[static_cast<std::size_t>(i)]].push_back(i);
  const Vector deg = adj.rowwise().sum();

  double q = 0.0;
  for (const auto& [lab, members] : clusters) {
    double w_in = 0.0, d_c = 0.0;
    for (Index i : members) {
      d_c += deg(i);
      for (Index j : members) w_in += adj(i, j);
    }
    q += w_in / m2 - (d_c / m2) * (d_c / m2);
  }
  return q;
}

inline double modularity_eval(const Matrix& adj, const Labels& labels) {
  return modularity(adj, labels);
}

}  // namespace ksc
