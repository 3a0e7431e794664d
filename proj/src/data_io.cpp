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

#include "ksc/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace ksc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

bool parse_index(const std::string& s, long long& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

struct NumericTable {
  Matrix values;
};

// Shared CSV/TSV grid parser; row numbers in errors are 1-based physical
// lines, blank lines are ignored.
NumericTable load_table(const std::string& path, TextFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  const char delim = format == TextFormat::csv ? ',' : '\t';

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, delim);
    if (width == 0) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw std::runtime_error(path + ": ragged row at row " + std::to_string(lineno) +
                               " (expected " + std::to_string(width) + " fields, got " +
                               std::to_string(fields.size()) + ")");
    }
    std::vector<double> vals(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v;
      if (!parse_number(fields[c], v))
        throw std::runtime_error(path + ": non-numeric cell at row " + std::to_string(lineno) +
                                 " column " + std::to_string(c + 1) + ": '" + fields[c] + "'");
      if (!std::isfinite(v))
        throw std::runtime_error(path + ": non-finite entry at row " + std::to_string(lineno) +
                                 " column " + std::to_string(c + 1));
      vals[c] = v;
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no rows");

  NumericTable t;
  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c)
      t.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return t;
}

}  // namespace

Dataset load_vectors(const std::string& path, TextFormat format, bool labels_last) {
  NumericTable t = load_table(path, format);
  Dataset d;
  if (labels_last) {
    if (t.values.cols() < 2)
      throw std::runtime_error(path + ": need at least one feature column besides labels");
    d.points = t.values.leftCols(t.values.cols() - 1);
    Labels l(static_cast<std::size_t>(t.values.rows()));
    for (Index i = 0; i < t.values.rows(); ++i) {
      const double v = t.values(i, t.values.cols() - 1);
      const double r = std::nearbyint(v);
      if (v != r)
        throw std::runtime_error(path + ": label column must be integer, row " +
                                 std::to_string(i + 1));
      l[static_cast<std::size_t>(i)] = static_cast<int>(r);
    }
    d.labels = std::move(l);
  } else {
    d.points = t.values;
  }
  return d;
}

Matrix load_matrix(const std::string& path, TextFormat format) {
  return load_table(path, format).values;
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  struct Edge {
    std::string u, v;
    double w;
  };
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  bool all_integers = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream iss(t);
    std::vector<std::string> tok;
    std::string w;
    while (iss >> w) tok.push_back(w);
    if (tok.size() < 2 || tok.size() > 3)
      throw std::runtime_error(path + ": expected 'u v [w]' at line " + std::to_string(lineno));
    double weight = 1.0;
    if (tok.size() == 3) {
      if (!parse_number(tok[2], weight))
        throw std::runtime_error(path + ": non-numeric weight at line " + std::to_string(lineno));
      if (weight < 0.0)
        throw std::runtime_error(path + ": negative edge weight at line " + std::to_string(lineno));
    }
    long long dummy;
    if (!parse_index(tok[0], dummy) || dummy < 0) all_integers = false;
    if (!parse_index(tok[1], dummy) || dummy < 0) all_integers = false;
    edges.push_back({tok[0], tok[1], weight});
  }
  if (edges.empty()) throw std::runtime_error(path + ": no edges");

  Graph g;
  std::vector<std::pair<Index, Index>> endpoints(edges.size());
  Index n = 0;
  if (all_integers) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      long long u, v;
      parse_index(edges[e].u, u);
      parse_index(edges[e].v, v);
      endpoints[e] = {static_cast<Index>(u), static_cast<Index>(v)};
      n = std::max(n, static_cast<Index>(std::max(u, v) + 1));
    }
  } else {
    // First-appearance remapping over string ids.
    std::unordered_map<std::string, Index> ids;
    auto intern = [&](const std::string& s) {
      auto [it, fresh] = ids.emplace(s, static_cast<Index>(g.node_names.size()));
      if (fresh) g.node_names.push_back(s);
      return it->second;
    };
    for (std::size_t e = 0; e < edges.size(); ++e)
      endpoints[e] = {intern(edges[e].u), intern(edges[e].v)};
    n = static_cast<Index>(g.node_names.size());
  }

  g.adjacency = Matrix::Zero(n, n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = endpoints[e];
    if (u == v) {
      g.adjacency(u, u) += edges[e].w;
    } else {
      g.adjacency(u, v) += edges[e].w;
      g.adjacency(v, u) += edges[e].w;
    }
  }
  return g;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_labels(const std::string& path, const Labels& labels,
                 const std::vector<std::string>* ids) {
  if (ids && ids->size() != labels.size())
    throw std::invalid_argument("ids and labels must have the same length");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "id,cluster\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (ids)
      out << (*ids)[i];
    else
      out << i;
    out << ',' << labels[i] << '\n';
  }
}

void save_memberships(const std::string& path, const Matrix& memberships,
                      const std::vector<std::string>* ids) {
  if (ids && static_cast<Index>(ids->size()) != memberships.rows())
    throw std::invalid_argument("ids and memberships must have the same length");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "id";
  for (Index c = 0; c < memberships.cols(); ++c) out << ",sm_" << (c + 1);
  out << '\n';
  for (Index i = 0; i < memberships.rows(); ++i) {
    if (ids)
      out << (*ids)[static_cast<std::size_t>(i)];
    else
      out << i;
    for (Index c = 0; c < memberships.cols(); ++c) out << ',' << format_double(memberships(i, c));
    out << '\n';
  }
}

void save_matrix(const std::string& path, const Matrix& m, TextFormat format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  const char delim = format == TextFormat::csv ? ',' : '\t';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << delim;
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Labels load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  Labels out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto fields = split_fields(t, ',');
    // Accept either bare labels or "id,cluster" rows with a header.
    const std::string& cell = fields.size() >= 2 ? fields[1] : fields[0];
    long long v;
    if (!parse_index(cell, v)) {
      if (lineno == 1) continue;  // header row
      throw std::runtime_error(path + ": non-integer label at row " + std::to_string(lineno));
    }
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw std::runtime_error(path + ": no labels");
  return out;
}

}  // namespace ksc
