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

#include <string>
#include <vector>

#include "ksc/dataset.hpp"
#include "ksc/types.hpp"

namespace ksc {

enum class TextFormat { csv, tsv };

// Rectangular numeric table. With labels_last the final column is read as
// integer ground-truth labels instead of a feature.
Dataset load_vectors(const std::string& path, TextFormat format, bool labels_last = false);

// Dense numeric matrix, same parsing rules as load_vectors.
Matrix load_matrix(const std::string& path, TextFormat format);

struct Graph {
  Matrix adjacency;                     // symmetric, nonnegative
  std::vector<std::string> node_names;  // empty when ids were plain integers
};

// Whitespace-separated edge list "u v [w]". Integer ids are literal 0-based
// indices; any non-integer id switches the whole file to first-appearance
// string remapping. Duplicate edges are weight-summed, self-loops preserved.
Graph load_graph(const std::string& path);

// "%.17g" keeps round-trips byte-identical across runs.
std::string format_double(double v);

void save_labels(const std::string& path, const Labels& labels,
                 const std::vector<std::string>* ids = nullptr);
void save_memberships(const std::string& path, const Matrix& memberships,
                      const std::vector<std::string>* ids = nullptr);
void save_matrix(const std::string& path, const Matrix& m, TextFormat format = TextFormat::csv);

Labels load_labels(const std::string& path);

}  // namespace ksc
