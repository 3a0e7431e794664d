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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "ksc/metrics.hpp"

using ksc::Labels;
using ksc::Matrix;

namespace {

// Independent pair-counting ARI oracle: walks every unordered pair.
double ari_oracle(const Labels& a, const Labels& b) {
  const std::size_t n = a.size();
  double n11 = 0, n00 = 0, n10 = 0, n01 = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      if (sa && sb) ++n11;
      else if (!sa && !sb) ++n00;
      else if (sa) ++n10;
      else ++n01;
    }
  const double total = n11 + n00 + n10 + n01;
  const double expected = (n11 + n10) * (n11 + n01) / total;
  const double maximum = ((n11 + n10) + (n11 + n01)) / 2.0;
  if (maximum == expected) return 1.0;
  return (n11 - expected) / (maximum - expected);
}

// Direct evaluation of the entrywise modularity sum.
double modularity_oracle(const Matrix& adj, const Labels& lab) {
  const double m2 = adj.sum();
  double q = 0.0;
  const ksc::Vector deg = adj.rowwise().sum();
  for (Eigen::Index i = 0; i < adj.rows(); ++i)
    for (Eigen::Index j = 0; j < adj.rows(); ++j)
      if (lab[std::size_t(i)] == lab[std::size_t(j)])
        q += adj(i, j) - deg(i) * deg(j) / m2;
  return q / m2;
}

Matrix two_triangles() {
  Matrix a = Matrix::Zero(6, 6);
  auto link = [&](int i, int j) { a(i, j) = 1.0; a(j, i) = 1.0; };
  link(0, 1); link(1, 2); link(0, 2);
  link(3, 4); link(4, 5); link(3, 5);
  return a;
}

}  // namespace

TEST_CASE("ari basics") {
  const Labels a{0, 0, 1, 1, 2, 2};
  CHECK(ksc::ari(a, a) == doctest::Approx(1.0));

  const Labels same{0, 0, 0, 0};
  const Labels singletons{0, 1, 2, 3};
  CHECK(ksc::ari(same, singletons) == doctest::Approx(ari_oracle(same, singletons)));
  CHECK(ksc::ari(same, singletons) == doctest::Approx(0.0));

  const Labels b{5, 5, 9, 9, 7, 7};  // same partition, permuted ids
  CHECK(ksc::ari(a, b) == doctest::Approx(1.0));

  CHECK_THROWS_AS(ksc::ari(a, Labels{0, 1}), std::invalid_argument);
}

TEST_CASE("ari matches the pair-counting oracle on random partitions") {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> lab(0, 3);
    Labels a(30), b(30);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = lab(gen);
      b[i] = lab(gen);
    }
    CHECK(ksc::ari(a, b) == doctest::Approx(ari_oracle(a, b)).epsilon(1e-12));
    CHECK(ksc::ari(a, b) <= 1.0 + 1e-12);
  }
}

TEST_CASE("nmi conventions") {
  const Labels a{0, 0, 1, 1};
  CHECK(ksc::nmi(a, a) == doctest::Approx(1.0));

  const Labels one_a{0, 0, 0};
  CHECK(ksc::nmi(one_a, one_a) == doctest::Approx(1.0));  // both entropies zero
  CHECK(ksc::nmi(one_a, Labels{0, 1, 2}) == doctest::Approx(0.0));

  // Permutation invariance.
  const Labels b{1, 0, 2, 2};
  const Labels b2{7, 3, 5, 5};
  CHECK(ksc::nmi(a, b) == doctest::Approx(ksc::nmi(a, b2)));
}

TEST_CASE("nmi of independent uniform labels is near zero") {
  std::mt19937 gen(17);
  std::uniform_int_distribution<int> lab(0, 3);
  const std::size_t n = 10000;
  Labels a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = lab(gen);
    b[i] = lab(gen);
  }
  CHECK(ksc::nmi(a, b) >= 0.0);
  CHECK(ksc::nmi(a, b) <= 0.05);
}

TEST_CASE("silhouette on two tight far pairs") {
  Matrix x(4, 1);
  x << 0.0, 0.01, 100.0, 100.01;
  const Labels lab{0, 0, 1, 1};
  const double s = ksc::silhouette_points(x, lab);
  CHECK(s >= 0.99);

  // Direct 4-point formula oracle: a = 0.01, b is the mean distance to the
  // other pair.
  const Matrix d = ksc::pairwise_euclidean(x);
  double expect = 0.0;
  for (int i = 0; i < 4; ++i) {
    const int own = lab[std::size_t(i)];
    double a_val = 0.0;
    int cnt = 0;
    double b_val = 0.0;
    int bcnt = 0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      if (lab[std::size_t(j)] == own) {
        a_val += d(i, j);
        ++cnt;
      }
    }
    for (int j = 0; j < 4; ++j)
      if (lab[std::size_t(j)] != own) {
        b_val += d(i, j);
        ++bcnt;
      }
    a_val /= cnt;
    b_val /= bcnt;
    expect += (b_val - a_val) / std::max(a_val, b_val);
  }
  expect /= 4.0;
  CHECK(s == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("silhouette edge cases") {
  // Equilateral: every inter-point distance equal, a == b, score 0.
  Matrix x(3, 2);
  x << 0.0, 0.0, 1.0, 0.0, 0.5, std::sqrt(3.0) / 2.0;
  CHECK(ksc::silhouette_points(x, Labels{0, 0, 1}) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // Singleton cluster contributes 0.
  Matrix y(3, 1);
  y << 0.0, 1.0, 10.0;
  const double s = ksc::silhouette_points(y, Labels{0, 0, 1});
  // Points 0 and 1: a=1, b is distance to point 2; point 2 contributes 0.
  const double s0 = (10.0 - 1.0) / 10.0;
  const double s1 = (9.0 - 1.0) / 9.0;
  CHECK(s == doctest::Approx((s0 + s1 + 0.0) / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(ksc::silhouette_points(y, Labels{0, 0, 0}), std::runtime_error);

  CHECK(s >= -1.0);
  CHECK(s <= 1.0);
}

TEST_CASE("modularity of two disconnected triangles") {
  const Matrix a = two_triangles();
  const Labels correct{0, 0, 0, 1, 1, 1};
  CHECK(ksc::modularity(a, correct) == 0.5);  // exact dyadic value
  CHECK(ksc::modularity(a, correct) ==
        doctest::Approx(modularity_oracle(a, correct)).epsilon(1e-14));

  // Any single-cluster labeling scores exactly 0.
  CHECK(ksc::modularity(a, Labels{2, 2, 2, 2, 2, 2}) == 0.0);

  // Exhaustive check: no 2-partition beats the correct split.
  for (int mask = 1; mask < 63; ++mask) {
    Labels lab(6);
    for (int i = 0; i < 6; ++i) lab[std::size_t(i)] = (mask >> i) & 1;
    CHECK(ksc::modularity(a, lab) <= 0.5 + 1e-15);
  }
}

TEST_CASE("modularity validates its inputs") {
  Matrix bad(2, 2);
  bad << 0.0, -1.0, -1.0, 0.0;
  CHECK_THROWS_AS(ksc::modularity(bad, Labels{0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(ksc::modularity(Matrix::Zero(2, 2), Labels{0, 1}), std::invalid_argument);
  Matrix asym(2, 2);
  asym << 0.0, 1.0, 2.0, 0.0;
  CHECK_THROWS_AS(ksc::modularity(asym, Labels{0, 1}), std::invalid_argument);
  CHECK(ksc::modularity_eval(two_triangles(), Labels{0, 0, 0, 1, 1, 1}) == 0.5);
}

TEST_CASE("modularity matches the entrywise oracle on weighted graphs") {
  std::mt19937 gen(23);
  std::uniform_real_distribution<double> w(0.0, 2.0);
  Matrix a = Matrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) {
      const double v = w(gen);
      a(i, j) = v;
      a(j, i) = v;
    }
  std::uniform_int_distribution<int> lab(0, 2);
  for (int trial = 0; trial < 10; ++trial) {
    Labels l(8);
    for (auto& v : l) v = lab(gen);
    CHECK(ksc::modularity(a, l) == doctest::Approx(modularity_oracle(a, l)).epsilon(1e-12));
  }
}
