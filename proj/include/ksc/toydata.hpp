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
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "ksc/dataset.hpp"
#include "ksc/kernels.hpp"
#include "ksc/types.hpp"

namespace ksc {

// Deterministic normal generator: Box-Muller on top of mt19937_64. The
// generator sequence is standardized, so fixtures reproduce across
// platforms.
class ToyRng {
 public:
  explicit ToyRng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on (0, 1), never exactly 0 or 1.
  double uniform() {
    return (double(gen_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Isotropic Gaussian blobs; row blocks follow the cluster order.
inline Dataset gaussian_mixture(const Matrix& centers, const Vector& sigmas,
                                const std::vector<int>& counts, std::uint64_t seed) {
  if (centers.rows() != sigmas.size() ||
      centers.rows() != static_cast<Index>(counts.size()))
    throw std::invalid_argument("centers, sigmas, and counts must agree");
  Index n = 0;
  for (int c : counts) n += c;
  Dataset out;
  out.points.resize(n, centers.cols());
  Labels lab(static_cast<std::size_t>(n));
  ToyRng rng(seed);
  Index r = 0;
  for (Index k = 0; k < centers.rows(); ++k)
    for (int i = 0; i < counts[static_cast<std::size_t>(k)]; ++i, ++r) {
      for (Index d = 0; d < centers.cols(); ++d)
        out.points(r, d) = centers(k, d) + sigmas(k) * rng.normal();
      lab[static_cast<std::size_t>(r)] = static_cast<int>(k);
    }
  out.labels = std::move(lab);
  return out;
}

// Three well-separated Gaussians in the unit square.
inline Dataset three_gaussians(int n_per = 200, std::uint64_t seed = 42) {
  Matrix centers(3, 2);
  centers << 0.2, 0.2, 0.8, 0.2, 0.5, 0.8;
  Vector sigmas = Vector::Constant(3, 0.06);
  return gaussian_mixture(centers, sigmas, {n_per, n_per, n_per}, seed);
}

// Four blobs arranged as two nearby pairs; labels are the blob ids, and
// blobs {0,1} / {2,3} form the two super-clusters.
inline Dataset nested_blobs(int n_per = 60, std::uint64_t seed = 42) {
  Matrix centers(4, 2);
  centers << 0.1, 0.5, 0.3, 0.5, 0.7, 0.5, 0.9, 0.5;
  Vector sigmas = Vector::Constant(4, 0.035);
  return gaussian_mixture(centers, sigmas, {n_per, n_per, n_per, n_per}, seed);
}

// Exactly block-diagonal PSD kernel with positive within-block entries:
// each block is the rbf gram of a tight random cloud. Unequal block scales
// and jitter keep the leading eigenspace free of accidental symmetry.
inline Matrix block_kernel(const std::vector<int>& sizes, std::uint64_t seed,
                           Labels* labels = nullptr) {
  Index n = 0;
  for (int s : sizes) n += s;
  Matrix omega = Matrix::Zero(n, n);
  if (labels) labels->assign(static_cast<std::size_t>(n), 0);
  ToyRng rng(seed);
  Index off = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    const Index sz = sizes[b];
    Matrix pts(sz, 2);
    for (Index i = 0; i < sz; ++i) {
      pts(i, 0) = 0.15 * rng.normal();
      pts(i, 1) = 0.15 * rng.normal();
    }
    omega.block(off, off, sz, sz) = gram(rbf_kernel(1.0 + 0.3 * double(b)), pts);
    if (labels)
      for (Index i = 0; i < sz; ++i) (*labels)[static_cast<std::size_t>(off + i)] = static_cast<int>(b);
    off += sz;
  }
  return omega;
}

// Rank-deficient kernel built from r base points replicated across n rows.
// The gram matrix has rank exactly r (generic base points), and the
// replication groups are the natural cluster structure.
struct RankKernel {
  Matrix omega;
  Matrix points;
  Labels groups;
};

inline RankKernel rank_kernel(Index n, Index r, std::uint64_t seed) {
  if (r < 1 || r > n) throw std::invalid_argument("need 1 <= r <= n");
  ToyRng rng(seed);
  Matrix base(r, 2);
  for (Index i = 0; i < r; ++i) {
    base(i, 0) = 4.0 * rng.normal();
    base(i, 1) = 4.0 * rng.normal();
  }
  RankKernel out;
  out.points.resize(n, 2);
  out.groups.resize(static_cast<std::size_t>(n));
  // Contiguous groups with a deterministic near-even split.
  Index row = 0;
  for (Index g = 0; g < r; ++g) {
    const Index take = (n - row) / (r - g);
    for (Index i = 0; i < take; ++i, ++row) {
      out.points.row(row) = base.row(g);
      out.groups[static_cast<std::size_t>(row)] = static_cast<int>(g);
    }
  }
  out.omega = gram(rbf_kernel(8.0), out.points);
  return out;
}

}  // namespace ksc
