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
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksc/selection.hpp"
#include "ksc/soft.hpp"
#include "ksc/types.hpp"

namespace ksc {

// One binary merge: nodes a and b join at the given hierarchy level. The
// merge at index m creates node (leaves + m).
struct Merge {
  int a = 0;
  int b = 0;
  int level = 0;
};

// Bottom-up cluster hierarchy. levels[0] labels every point with its leaf
// cluster; each later entry is a coarser partition of the same points.
struct Linkage {
  std::vector<Merge> merges;
  int leaves = 0;
  std::vector<Labels> levels;

  int nodes() const { return leaves + static_cast<int>(merges.size()); }
};

struct ThresholdSet {
  std::vector<double> thresholds;  // strictly increasing, positive
};

namespace detail {

inline int partition_count(const Labels& labels) {
  int kmax = -1;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("labels must be nonnegative");
    kmax = std::max(kmax, l);
  }
  const int k = kmax + 1;
  if (k < 1) throw std::invalid_argument("empty label vector");
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  for (int l : labels) seen[static_cast<std::size_t>(l)] = true;
  for (int c = 0; c < k; ++c)
    if (!seen[static_cast<std::size_t>(c)])
      throw std::invalid_argument("cluster " + std::to_string(c) + " is empty");
  return k;
}

inline Matrix pairwise_cosine(const Matrix& proj) {
  const Index n = proj.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = cosine_distance(proj.row(i), proj.row(j));
  return d;
}

}  // namespace detail

// Distance thresholds at evenly spaced quantiles (nearest rank) of the
// nonzero pairwise cosine distances, deduplicated to strict increase.
inline ThresholdSet threshold_set(const Matrix& val_proj, int levels) {
  if (levels < 1) throw std::invalid_argument("levels must be at least 1");
  if (val_proj.rows() < 2) throw std::invalid_argument("need at least 2 validation points");
  const Matrix d = detail::pairwise_cosine(val_proj);
  std::vector<double> pool;
  for (Index i = 0; i < d.rows(); ++i)
    for (Index j = i + 1; j < d.cols(); ++j)
      if (d(i, j) > 0.0) pool.push_back(d(i, j));
  if (pool.empty()) throw std::runtime_error("all pairwise distances are zero");
  std::sort(pool.begin(), pool.end());

  ThresholdSet out;
  const double m = double(pool.size());
  for (int t = 1; t <= levels; ++t) {
    const double q = double(t) / double(levels + 1);
    std::size_t idx = static_cast<std::size_t>(std::ceil(q * m));
    idx = std::min(std::max<std::size_t>(idx, 1), pool.size()) - 1;
    const double v = pool[idx];
    if (out.thresholds.empty() || v > out.thresholds.back()) out.thresholds.push_back(v);
  }
  return out;
}

// Greedy peeling: the unassigned point with the most unassigned neighbors
// within the threshold seeds the next cluster and absorbs those neighbors.
// Ties pick the lowest index; cluster ids follow peel order.
inline Labels level_cluster(const Matrix& proj, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
  const Index n = proj.rows();
  const Matrix d = detail::pairwise_cosine(proj);
  Labels labels(static_cast<std::size_t>(n), -1);
  std::vector<bool> assigned(static_cast<std::size_t>(n), false);
  int next = 0;
  Index remaining = n;
  while (remaining > 0) {
    Index seed = -1;
    Index best_count = -1;
    for (Index i = 0; i < n; ++i) {
      if (assigned[static_cast<std::size_t>(i)]) continue;
      Index count = 0;
      for (Index j = 0; j < n; ++j)
        if (j != i && !assigned[static_cast<std::size_t>(j)] && d(i, j) <= threshold) ++count;
      if (count > best_count) {
        best_count = count;
        seed = i;
      }
    }
    for (Index j = 0; j < n; ++j) {
      if (assigned[static_cast<std::size_t>(j)]) continue;
      if (j == seed || d(seed, j) <= threshold) {
        labels[static_cast<std::size_t>(j)] = next;
        assigned[static_cast<std::size_t>(j)] = true;
        --remaining;
      }
    }
    ++next;
  }
  return labels;
}

// Rewrites a stack of per-point label vectors (finest first) into an
// exactly nested stack: each cluster maps to the coarser cluster holding
// the plurality of its members, and clusters sharing a target merge.
// Levels that do not strictly reduce the cluster count are dropped.
inline std::vector<Labels> induce_nested(const std::vector<Labels>& raw) {
  if (raw.empty()) throw std::invalid_argument("empty label stack");
  const std::size_t n = raw[0].size();
  for (const auto& l : raw)
    if (l.size() != n) throw std::invalid_argument("label vectors differ in length");

  // compact to first-occurrence order: prediction stacks may skip ids
  const auto compact = [](Labels l) {
    std::map<int, int> remap;
    for (auto& v : l) {
      if (v < 0) throw std::invalid_argument("labels must be nonnegative");
      v = remap.emplace(v, static_cast<int>(remap.size())).first->second;
    }
    return std::pair<Labels, int>{std::move(l), static_cast<int>(remap.size())};
  };

  std::vector<Labels> out;
  auto [cur, m] = compact(raw[0]);
  out.push_back(cur);

  for (std::size_t t = 1; t < raw.size(); ++t) {
    const auto [coarse, kc] = compact(raw[t]);
    // plurality target of every current cluster, ties toward low label
    std::vector<std::vector<int>> votes(static_cast<std::size_t>(m),
                                        std::vector<int>(static_cast<std::size_t>(kc), 0));
    for (std::size_t i = 0; i < n; ++i)
      ++votes[static_cast<std::size_t>(cur[i])][static_cast<std::size_t>(coarse[i])];
    std::vector<int> target(static_cast<std::size_t>(m), 0);
    for (int c = 0; c < m; ++c) {
      int best = 0;
      for (int j = 1; j < kc; ++j)
        if (votes[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] >
            votes[static_cast<std::size_t>(c)][static_cast<std::size_t>(best)])
          best = j;
      target[static_cast<std::size_t>(c)] = best;
    }
    // group current clusters by target, numbering groups as they appear
    std::vector<int> group_of_target(static_cast<std::size_t>(kc), -1);
    std::vector<int> new_label(static_cast<std::size_t>(m), -1);
    int groups = 0;
    for (int c = 0; c < m; ++c) {
      int& g = group_of_target[static_cast<std::size_t>(target[static_cast<std::size_t>(c)])];
      if (g < 0) g = groups++;
      new_label[static_cast<std::size_t>(c)] = g;
    }
    if (groups == m) continue;  // nothing merged at this level
    Labels merged(n);
    for (std::size_t i = 0; i < n; ++i)
      merged[i] = new_label[static_cast<std::size_t>(cur[i])];
    out.push_back(merged);
    cur = std::move(merged);
    m = groups;
    if (m == 1) break;
  }
  return out;
}

// Builds the merge list from an exactly nested stack, appending a root
// level when the top partition still has several clusters.
inline Linkage build_linkage(const std::vector<Labels>& nested) {
  if (nested.empty()) throw std::invalid_argument("empty label stack");
  const std::size_t n = nested[0].size();
  if (n == 0) throw std::invalid_argument("empty label vector");

  Linkage link;
  link.levels = nested;
  link.leaves = detail::partition_count(nested[0]);

  int prev_count = link.leaves;
  for (std::size_t t = 1; t < nested.size(); ++t) {
    if (nested[t].size() != n) throw std::invalid_argument("label vectors differ in length");
    const int c = detail::partition_count(nested[t]);
    if (c >= prev_count) throw std::invalid_argument("cluster counts must strictly decrease");
    prev_count = c;
  }
  if (prev_count > 1)
    link.levels.emplace_back(Labels(n, 0));  // forced single root

  // node id of every cluster at the current level
  std::vector<int> node(static_cast<std::size_t>(link.leaves));
  for (int c = 0; c < link.leaves; ++c) node[static_cast<std::size_t>(c)] = c;

  int next_node = link.leaves;
  int m = link.leaves;
  for (std::size_t t = 1; t < link.levels.size(); ++t) {
    const Labels& fine = link.levels[t - 1];
    const Labels& coarse = link.levels[t];
    const int kc = detail::partition_count(coarse);
    std::vector<int> parent(static_cast<std::size_t>(m), -1);
    for (std::size_t i = 0; i < n; ++i) {
      int& p = parent[static_cast<std::size_t>(fine[i])];
      if (p < 0)
        p = coarse[i];
      else if (p != coarse[i])
        throw std::invalid_argument("levels are not nested");
    }
    std::vector<int> merged_node(static_cast<std::size_t>(kc), -1);
    for (int d = 0; d < kc; ++d) {
      int cur = -1;
      for (int c = 0; c < m; ++c) {
        if (parent[static_cast<std::size_t>(c)] != d) continue;
        if (cur < 0) {
          cur = node[static_cast<std::size_t>(c)];
        } else {
          link.merges.push_back({cur, node[static_cast<std::size_t>(c)], static_cast<int>(t)});
          cur = next_node++;
        }
      }
      merged_node[static_cast<std::size_t>(d)] = cur;
    }
    node = std::move(merged_node);
    m = kc;
  }
  return link;
}

// Checks the structural contract: nested strictly shrinking levels ending
// in one cluster, and every node except the root consumed exactly once.
inline void validate_linkage(const Linkage& link) {
  if (link.levels.empty()) throw std::runtime_error("linkage has no levels");
  const std::size_t n = link.levels[0].size();
  if (detail::partition_count(link.levels[0]) != link.leaves)
    throw std::runtime_error("leaf count does not match level 0");
  int prev = link.leaves;
  for (std::size_t t = 1; t < link.levels.size(); ++t) {
    if (link.levels[t].size() != n) throw std::runtime_error("level length mismatch");
    const int c = detail::partition_count(link.levels[t]);
    if (c >= prev) throw std::runtime_error("cluster counts do not strictly decrease");
    std::vector<int> parent(static_cast<std::size_t>(prev), -1);
    for (std::size_t i = 0; i < n; ++i) {
      int& p = parent[static_cast<std::size_t>(link.levels[t - 1][i])];
      if (p < 0)
        p = link.levels[t][i];
      else if (p != link.levels[t][i])
        throw std::runtime_error("levels are not nested");
    }
    prev = c;
  }
  if (prev != 1) throw std::runtime_error("top level must have one cluster");
  if (link.nodes() != 2 * link.leaves - 1)
    throw std::runtime_error("merge count does not match leaf count");
  std::vector<int> used(static_cast<std::size_t>(link.nodes()), 0);
  for (std::size_t i = 0; i < link.merges.size(); ++i) {
    const Merge& mg = link.merges[i];
    const int parent_id = link.leaves + static_cast<int>(i);
    for (int child : {mg.a, mg.b}) {
      if (child < 0 || child >= parent_id) throw std::runtime_error("merge references a later node");
      ++used[static_cast<std::size_t>(child)];
    }
  }
  for (int v = 0; v + 1 < link.nodes(); ++v)
    if (used[static_cast<std::size_t>(v)] != 1)
      throw std::runtime_error("node " + std::to_string(v) + " not consumed exactly once");
  if (used[static_cast<std::size_t>(link.nodes() - 1)] != 0)
    throw std::runtime_error("root must not be consumed");
}

// Fisher-thresholded sweep: per k keep the bandwidth maximizing the
// validation Fisher criterion when it clears theta, then stack the test
// predictions of the surviving models from finest to coarsest.
inline Linkage hksc(const Dataset& train_data, const Dataset& val_data, const Dataset& test_data,
                    const std::vector<double>& sigma_grid, int k_max, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (sigma_grid.empty()) throw std::invalid_argument("empty sigma grid");
  if (k_max < 2) throw std::invalid_argument("k_max must be at least 2");

  struct Pair {
    int k;
    double sigma2;
  };
  std::vector<Pair> chosen;
  for (int k = 2; k <= k_max; ++k) {
    double best_f = -std::numeric_limits<double>::infinity();
    double best_sigma = 0.0;
    for (double s2 : sigma_grid) {
      try {
        const KscModel model = train(train_data, rbf_kernel(s2), k);
        const Labels val_labels = predict(model, val_data.points);
        const Matrix val_proj = project_points(model, val_data.points);
        const double f = fisher(val_proj, val_labels, k);
        if (f > best_f) {
          best_f = f;
          best_sigma = s2;
        }
      } catch (const std::exception&) {
        // this (k, sigma2) cannot produce k validation clusters; skip it
      }
    }
    if (best_f > theta) chosen.push_back({k, best_sigma});
  }
  if (chosen.empty()) throw std::runtime_error("no valid hierarchy levels");

  std::vector<Labels> raw;
  for (auto it = chosen.rbegin(); it != chosen.rend(); ++it) {
    const KscModel model = train(train_data, rbf_kernel(it->sigma2), it->k);
    raw.push_back(predict(model, test_data.points));
  }
  return build_linkage(induce_nested(raw));
}

// Agglomerative variant: thresholds estimated on validation projections,
// test points peeled at the first threshold, then cluster centroids merged
// at each following threshold.
inline Linkage ahksc(const Dataset& train_data, const Dataset& val_data, const Dataset& test_data,
                     const KernelSpec& kernel, int k, int levels) {
  const KscModel model = train(train_data, kernel, k);
  const Matrix val_proj = project_points(model, val_data.points);
  const ThresholdSet ts = threshold_set(val_proj, levels);
  const Matrix test_proj = project_points(model, test_data.points);

  std::vector<Labels> stack;
  Labels cur = level_cluster(test_proj, ts.thresholds[0]);
  int m = detail::partition_count(cur);
  stack.push_back(cur);

  for (std::size_t t = 1; t < ts.thresholds.size() && m > 1; ++t) {
    Matrix centroids = Matrix::Zero(m, test_proj.cols());
    std::vector<Index> counts(static_cast<std::size_t>(m), 0);
    for (Index i = 0; i < test_proj.rows(); ++i) {
      centroids.row(cur[static_cast<std::size_t>(i)]) += test_proj.row(i);
      ++counts[static_cast<std::size_t>(cur[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < m; ++c) centroids.row(c) /= double(counts[static_cast<std::size_t>(c)]);

    const Labels grouping = level_cluster(centroids, ts.thresholds[t]);
    const int groups = detail::partition_count(grouping);
    if (groups >= m) continue;
    Labels merged(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i)
      merged[i] = grouping[static_cast<std::size_t>(cur[i])];
    stack.push_back(merged);
    cur = std::move(merged);
    m = groups;
  }
  return build_linkage(stack);
}

}  // namespace ksc
