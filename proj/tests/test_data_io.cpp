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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "ksc/data_io.hpp"
#include "ksc/dataset.hpp"

namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& contents, const std::string& name) {
    path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

}  // namespace

TEST_CASE("load_vectors parses a small csv") {
  TempFile f("0,0\n1,1\n2,2\n", "ksc_vec1.csv");
  const ksc::Dataset d = ksc::load_vectors(f.path.string(), ksc::TextFormat::csv);
  CHECK(d.size() == 3);
  CHECK(d.dim() == 2);
  CHECK(d.points(2, 1) == 2.0);
  CHECK_FALSE(d.labels.has_value());
}

TEST_CASE("load_vectors reads tsv and a trailing label column") {
  TempFile f("0.5\t1.5\t0\n2.5\t3.5\t1\n", "ksc_vec2.tsv");
  const ksc::Dataset d = ksc::load_vectors(f.path.string(), ksc::TextFormat::tsv, true);
  CHECK(d.size() == 2);
  CHECK(d.dim() == 2);
  REQUIRE(d.labels.has_value());
  CHECK((*d.labels)[0] == 0);
  CHECK((*d.labels)[1] == 1);
}

TEST_CASE("load_vectors rejects bad input with located errors") {
  TempFile empty("", "ksc_vec3.csv");
  CHECK_THROWS_WITH_AS(ksc::load_vectors(empty.path.string(), ksc::TextFormat::csv),
                       doctest::Contains("no rows"), std::runtime_error);

  TempFile bad("a,b\n", "ksc_vec4.csv");
  try {
    ksc::load_vectors(bad.path.string(), ksc::TextFormat::csv);
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 1") != std::string::npos);
    CHECK(msg.find("column 1") != std::string::npos);
  }

  TempFile ragged("1,2\n3\n", "ksc_vec5.csv");
  try {
    ksc::load_vectors(ragged.path.string(), ksc::TextFormat::csv);
    FAIL("expected ragged-row error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }

  TempFile inf_cell("1,inf\n", "ksc_vec6.csv");
  CHECK_THROWS_WITH_AS(ksc::load_vectors(inf_cell.path.string(), ksc::TextFormat::csv),
                       doctest::Contains("non-finite"), std::runtime_error);
}

TEST_CASE("load_graph handles single edges, duplicates, and triangles") {
  TempFile single("0 1\n", "ksc_g1.txt");
  const auto g1 = ksc::load_graph(single.path.string());
  REQUIRE(g1.adjacency.rows() == 2);
  CHECK(g1.adjacency(0, 1) == 1.0);
  CHECK(g1.adjacency(1, 0) == 1.0);
  CHECK(g1.adjacency(0, 0) == 0.0);

  TempFile dup("0 1\n0 1\n", "ksc_g2.txt");
  const auto g2 = ksc::load_graph(dup.path.string());
  CHECK(g2.adjacency(0, 1) == 2.0);
  CHECK(g2.adjacency(1, 0) == 2.0);

  TempFile tri("0 1\n1 2\n0 2\n", "ksc_g3.txt");
  const auto g3 = ksc::load_graph(tri.path.string());
  REQUIRE(g3.adjacency.rows() == 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(g3.adjacency(i, j) == (i == j ? 0.0 : 1.0));
  CHECK((g3.adjacency - g3.adjacency.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("load_graph keeps isolated nodes implied by integer ids") {
  TempFile f("0 2 0.5\n", "ksc_g4.txt");
  const auto g = ksc::load_graph(f.path.string());
  REQUIRE(g.adjacency.rows() == 3);
  CHECK(g.adjacency(0, 2) == 0.5);
  CHECK(g.adjacency.row(1).sum() == 0.0);
  CHECK(g.node_names.empty());
}

TEST_CASE("load_graph remaps string ids by first appearance") {
  TempFile f("alice bob\nbob carol 2.5\n", "ksc_g5.txt");
  const auto g = ksc::load_graph(f.path.string());
  REQUIRE(g.adjacency.rows() == 3);
  REQUIRE(g.node_names.size() == 3);
  CHECK(g.node_names[0] == "alice");
  CHECK(g.node_names[1] == "bob");
  CHECK(g.node_names[2] == "carol");
  CHECK(g.adjacency(1, 2) == 2.5);
}

TEST_CASE("load_graph preserves self-loops and rejects negative weights") {
  TempFile loop("0 0 3\n0 1\n", "ksc_g6.txt");
  const auto g = ksc::load_graph(loop.path.string());
  CHECK(g.adjacency(0, 0) == 3.0);

  TempFile neg("0 1 -1\n", "ksc_g7.txt");
  CHECK_THROWS_WITH_AS(ksc::load_graph(neg.path.string()), doctest::Contains("negative"),
                       std::runtime_error);
}

TEST_CASE("split produces the documented sizes") {
  ksc::Dataset d;
  d.points = ksc::Matrix::Random(10, 2);
  const auto s = ksc::split(d, {0.5, 0.3, 0.2}, 7);
  CHECK(s.train.size() == 5);
  CHECK(s.val.size() == 3);
  CHECK(s.test.size() == 2);

  const auto all = ksc::split(d, {1.0, 0.0, 0.0}, 7);
  CHECK(all.train.size() == 10);
  CHECK(all.val.size() == 0);
  CHECK(all.test.size() == 0);
}

TEST_CASE("split is deterministic and partitions the index set") {
  ksc::Dataset d;
  d.points = ksc::Matrix::Random(37, 3);
  const auto a = ksc::split(d, {0.6, 0.25, 0.15}, 123);
  const auto b = ksc::split(d, {0.6, 0.25, 0.15}, 123);
  CHECK(a.train_idx == b.train_idx);
  CHECK(a.val_idx == b.val_idx);
  CHECK(a.test_idx == b.test_idx);

  std::set<ksc::Index> seen;
  for (auto i : a.train_idx) seen.insert(i);
  for (auto i : a.val_idx) seen.insert(i);
  for (auto i : a.test_idx) seen.insert(i);
  CHECK(seen.size() == 37);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 36);
}

TEST_CASE("split rejects degenerate requests") {
  ksc::Dataset d;
  d.points = ksc::Matrix::Random(4, 2);
  CHECK_THROWS_AS(ksc::split(d, {0.0, 0.5, 0.5}, 1), std::invalid_argument);
  CHECK_THROWS_AS(ksc::split(d, {0.5, 0.5, 0.5}, 1), std::invalid_argument);
}

TEST_CASE("split carries labels and ids into the parts") {
  ksc::Dataset d;
  d.points = ksc::Matrix::Random(6, 2);
  d.labels = ksc::Labels{0, 0, 1, 1, 2, 2};
  d.ids = std::vector<std::string>{"a", "b", "c", "d", "e", "f"};
  const auto s = ksc::split(d, {0.5, 0.5, 0.0}, 9);
  REQUIRE(s.train.labels.has_value());
  REQUIRE(s.train.ids.has_value());
  for (std::size_t r = 0; r < s.train_idx.size(); ++r) {
    CHECK((*s.train.labels)[r] == (*d.labels)[static_cast<std::size_t>(s.train_idx[r])]);
    CHECK((*s.train.ids)[r] == (*d.ids)[static_cast<std::size_t>(s.train_idx[r])]);
  }
}

TEST_CASE("labels round-trip through csv") {
  const ksc::Labels labels{2, 0, 1, 1};
  const auto path = fs::temp_directory_path() / "ksc_labels.csv";
  ksc::save_labels(path.string(), labels);
  const auto back = ksc::load_labels(path.string());
  CHECK(back == labels);
  std::error_code ec;
  fs::remove(path, ec);
}

TEST_CASE("format_double survives a round trip") {
  for (double v : {0.1, 1.0 / 3.0, 1e-17, 12345.678901234567}) {
    const std::string s = ksc::format_double(v);
    CHECK(std::stod(s) == v);
  }
}
