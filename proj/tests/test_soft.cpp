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

#include <cmath>

#include "ksc/metrics.hpp"
#include "ksc/soft.hpp"
#include "ksc/toydata.hpp"

using ksc::Labels;
using ksc::Matrix;
using ksc::Vector;

TEST_CASE("prototypes are per-cluster means") {
  Matrix proj(3, 2);
  proj << 1.0, 0.0, 3.0, 0.0, -2.0, 5.0;
  const Labels lab{0, 0, 1};
  const Matrix p = ksc::prototypes(proj, lab);
  CHECK(p(0, 0) == doctest::Approx(2.0));
  CHECK(p(0, 1) == doctest::Approx(0.0));
  CHECK(p(1, 0) == doctest::Approx(-2.0));
  CHECK(p(1, 1) == doctest::Approx(5.0));

  // Translation equivariance.
  Matrix shifted = proj;
  shifted.rowwise() += Eigen::RowVector2d(0.5, -1.5);
  const Matrix ps = ksc::prototypes(shifted, lab);
  CHECK((ps - (p.rowwise() + Eigen::RowVector2d(0.5, -1.5))).cwiseAbs().maxCoeff() <= 1e-14);

  CHECK_THROWS_AS(ksc::prototypes(proj, lab, 3), std::runtime_error);
  CHECK_THROWS_AS(ksc::prototypes(proj, Labels{0, 0}), std::invalid_argument);
}

TEST_CASE("cosine distance endpoints") {
  Vector e(2), s(2);
  e << 1.0, 0.0;
  s << 1.0, 0.0;
  CHECK(ksc::cosine_distance(e, s) == doctest::Approx(0.0));
  s << 0.0, 1.0;
  CHECK(ksc::cosine_distance(e, s) == doctest::Approx(1.0));
  s << -1.0, 0.0;
  CHECK(ksc::cosine_distance(e, s) == doctest::Approx(2.0));
  CHECK_THROWS_AS(ksc::cosine_distance(e, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("soft_assign crisp limits") {
  Matrix protos(2, 2);
  protos << 1.0, 0.0, 0.0, 1.0;
  Matrix proj(2, 2);
  proj << 2.0, 0.0,  // exactly along prototype 0
      1.0, 1.0;      // symmetric between both
  const auto sa = ksc::soft_assign(proj, protos);
  CHECK(sa.memberships(0, 0) == 1.0);
  CHECK(sa.memberships(0, 1) == 0.0);
  CHECK(sa.memberships(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sa.memberships(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("soft_assign mass splits uniformly among several zero distances") {
  Matrix protos(3, 2);
  protos << 1.0, 0.0, 2.0, 0.0, 0.0, 1.0;  // prototypes 0 and 1 collinear
  Matrix proj(1, 2);
  proj << 3.0, 0.0;
  const auto sa = ksc::soft_assign(proj, protos);
  CHECK(sa.memberships(0, 0) == doctest::Approx(0.5));
  CHECK(sa.memberships(0, 1) == doctest::Approx(0.5));
  CHECK(sa.memberships(0, 2) == 0.0);
}

TEST_CASE("soft_assign reproduces the spot value for d = (0.1, 0.2, 0.7)") {
  // Prototypes are unit vectors at angles acos(0.9), acos(0.8), acos(0.3)
  // from the x axis, so the projection (1, 0) has exactly those cosine
  // distances.
  Matrix protos(3, 2);
  protos << 0.9, std::sqrt(1.0 - 0.81), 0.8, std::sqrt(1.0 - 0.64), 0.3,
      std::sqrt(1.0 - 0.09);
  Matrix proj(1, 2);
  proj << 1.0, 0.0;
  const auto sa = ksc::soft_assign(proj, protos);

  const double expect = 0.14 / 0.23;  // (0.2*0.7) / (0.2*0.7 + 0.1*0.7 + 0.1*0.2)
  CHECK(std::abs(sa.memberships(0, 0) - expect) <= 1e-12);
  CHECK(sa.memberships(0, 0) == doctest::Approx(0.6087).epsilon(1e-4));
  CHECK(std::abs(sa.memberships.row(0).sum() - 1.0) <= 1e-12);
}

TEST_CASE("membership rows are stochastic and scale-invariant") {
  Matrix protos(3, 2);
  protos << 1.0, 0.2, -0.3, 1.0, -1.0, -1.0;
  Matrix proj(5, 2);
  proj << 0.9, 0.1, -0.2, 1.1, -0.8, -1.2, 0.5, 0.5, -0.1, -0.4;
  const auto sa = ksc::soft_assign(proj, protos);
  for (Eigen::Index i = 0; i < proj.rows(); ++i) {
    CHECK(std::abs(sa.memberships.row(i).sum() - 1.0) <= 1e-12);
    CHECK(sa.memberships.row(i).minCoeff() >= 0.0);
    CHECK(sa.memberships.row(i).maxCoeff() <= 1.0);
  }

  const auto sb = ksc::soft_assign(3.7 * proj, protos);
  CHECK((sa.memberships - sb.memberships).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("membership decreases as the own-prototype distance grows") {
  // Rotate the projection away from prototype 0 while the others stay fixed.
  Matrix protos(3, 2);
  protos << 1.0, 0.0, -1.0, 0.5, -0.5, -1.0;
  double prev = 2.0;
  for (double angle : {0.1, 0.3, 0.5, 0.7}) {
    Matrix proj(1, 2);
    proj << std::cos(angle), std::sin(angle);
    const auto sa = ksc::soft_assign(proj, protos);
    CHECK(sa.memberships(0, 0) < prev);
    prev = sa.memberships(0, 0);
  }
}

TEST_CASE("sksc assigns crisp memberships on a two-blob toy") {
  Matrix centers(2, 2);
  centers << 0.2, 0.2, 0.8, 0.8;
  const auto train_data =
      ksc::gaussian_mixture(centers, Vector::Constant(2, 0.05), {60, 60}, 3);
  const auto test_data =
      ksc::gaussian_mixture(centers, Vector::Constant(2, 0.05), {40, 40}, 4);

  const auto r = ksc::sksc(train_data, test_data, ksc::rbf_kernel(0.02), 2);
  CHECK(ksc::ari(r.labels, *test_data.labels) == doctest::Approx(1.0));
  for (Eigen::Index i = 0; i < r.assignment.memberships.rows(); ++i) {
    CHECK(r.assignment.memberships.row(i).maxCoeff() >= 0.95);
    CHECK(std::abs(r.assignment.memberships.row(i).sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("sksc on test = train matches the hard path at unique argmaxes") {
  const auto data = ksc::three_gaussians(40, 8);
  const auto r = ksc::sksc(data, data, ksc::rbf_kernel(0.02), 3);
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    const auto row = r.assignment.memberships.row(static_cast<Eigen::Index>(i));
    int ties = 0;
    for (int p = 0; p < 3; ++p)
      if (row(p) == row.maxCoeff()) ++ties;
    if (ties == 1) CHECK(r.labels[i] == r.model.train_labels[i]);
  }
}
