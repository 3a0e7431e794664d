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

#include "ksc/model_io.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace ksc {

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "model archives are little-endian; big-endian hosts need byte swaps");
static_assert(std::numeric_limits<double>::is_iec559 && sizeof(double) == 8,
              "model archives store IEEE binary64");

constexpr char kMagic[8] = {'K', 'S', 'C', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

// Blocks are row-major on disk regardless of Eigen's column-major default.
void write_block(std::ostream& out, const Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
}

json block_entry(const char* name, const Matrix& m) {
  return json{{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}};
}

json kernel_header(const KernelSpec& spec) {
  return json{{"kind", kernel_kind_name(spec.kind)},
              {"bandwidth", spec.bandwidth},
              {"correlation", corr_kind_name(spec.correlation)}};
}

KernelSpec kernel_from_header(const json& j) {
  KernelSpec spec;
  spec.kind = kernel_kind_from_string(j.at("kind").get<std::string>());
  spec.bandwidth = j.at("bandwidth").get<double>();
  spec.correlation = corr_kind_from_string(j.at("correlation").get<std::string>());
  return spec;
}

void write_archive(const std::string& path, json header,
                   const std::vector<const Matrix*>& blocks) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file: " + path);
  const std::string text = header.dump();
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kVersion);
  write_u64(out, static_cast<std::uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const Matrix* m : blocks) write_block(out, *m);
  if (!out) throw std::runtime_error(path + ": write failed");
}

Matrix codebook_matrix(const Codebook& cb) { return cb.words.cast<double>(); }

Codebook codebook_from_matrix(const Matrix& m, const std::string& path) {
  Codebook cb;
  cb.words.resize(m.rows(), m.cols());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 1.0 && m(r, c) != -1.0)
        throw std::runtime_error(path + ": codebook entries must be +1 or -1");
      cb.words(r, c) = static_cast<int>(m(r, c));
    }
  return cb;
}

struct Archive {
  json header;
  std::map<std::string, Matrix> blocks;
};

Archive read_archive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  char magic[8];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error(path + ": not a ksc model archive");
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || version != kVersion)
    throw std::runtime_error(path + ": unsupported archive version " + std::to_string(version));
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  if (!in || hlen == 0 || hlen > (1u << 30))
    throw std::runtime_error(path + ": corrupt archive header length");

  std::string text(hlen, '\0');
  in.read(text.data(), static_cast<std::streamsize>(hlen));
  if (static_cast<std::uint64_t>(in.gcount()) != hlen)
    throw std::runtime_error(path + ": truncated archive header");

  Archive ar;
  try {
    ar.header = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": malformed archive header: " + e.what());
  }

  for (const json& b : ar.header.at("blocks")) {
    const std::string name = b.at("name").get<std::string>();
    const Index rows = b.at("rows").get<Index>();
    const Index cols = b.at("cols").get<Index>();
    if (rows < 0 || cols < 0) throw std::runtime_error(path + ": negative block shape");
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) {
        double v = 0.0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        m(r, c) = v;
      }
    if (!in) throw std::runtime_error(path + ": truncated block " + name);
    ar.blocks.emplace(name, std::move(m));
  }
  return ar;
}

const Matrix& need_block(const Archive& ar, const char* name, const std::string& path) {
  const auto it = ar.blocks.find(name);
  if (it == ar.blocks.end())
    throw std::runtime_error(path + ": archive is missing block " + name);
  return it->second;
}

Labels labels_from_header(const json& header) {
  Labels out;
  for (const json& v : header.at("train_labels")) out.push_back(v.get<int>());
  return out;
}

}  // namespace

void save_model(const KscModel& model, const std::string& path) {
  const Matrix biases = model.biases;
  const Matrix eigenvalues = model.eigenvalues;
  const Matrix codebook = codebook_matrix(model.codebook);
  json header{
      {"type", "dense"},
      {"k", model.k()},
      {"kernel", kernel_header(model.kernel)},
      {"train_labels", model.train_labels},
      {"blocks",
       json::array({block_entry("train_points", model.train_points),
                    block_entry("alphas", model.alphas), block_entry("biases", biases),
                    block_entry("eigenvalues", eigenvalues),
                    block_entry("codebook", codebook)})},
  };
  write_archive(path, std::move(header),
                {&model.train_points, &model.alphas, &biases, &eigenvalues, &codebook});
}

void save_model(const ReducedModel& model, const std::string& path) {
  const Matrix biases = model.biases;
  const Matrix eigenvalues = model.eigenvalues;
  const Matrix codebook = codebook_matrix(model.codebook);
  json header{
      {"type", "reduced"},
      {"k", model.k()},
      {"kernel", kernel_header(model.kernel)},
      {"source", reduced_source_name(model.source)},
      {"reduced_indices", model.reduced_indices},
      {"train_labels", model.train_labels},
      {"blocks",
       json::array({block_entry("reduced_points", model.reduced_points),
                    block_entry("coefficients", model.coefficients),
                    block_entry("biases", biases), block_entry("eigenvalues", eigenvalues),
                    block_entry("codebook", codebook)})},
  };
  write_archive(path, std::move(header),
                {&model.reduced_points, &model.coefficients, &biases, &eigenvalues, &codebook});
}

AnyModel load_any_model(const std::string& path) {
  const Archive ar = read_archive(path);
  const std::string type = ar.header.at("type").get<std::string>();
  const int k = ar.header.at("k").get<int>();
  if (k < 2) throw std::runtime_error(path + ": archive k must be at least 2");

  if (type == "dense") {
    KscModel m;
    m.train_points = need_block(ar, "train_points", path);
    m.alphas = need_block(ar, "alphas", path);
    m.biases = need_block(ar, "biases", path);
    m.eigenvalues = need_block(ar, "eigenvalues", path);
    m.codebook = codebook_from_matrix(need_block(ar, "codebook", path), path);
    m.kernel = kernel_from_header(ar.header.at("kernel"));
    m.train_labels = labels_from_header(ar.header);
    if (m.alphas.rows() != m.train_points.rows() || m.alphas.cols() != k - 1 ||
        m.biases.size() != k - 1 || m.codebook.k() != k ||
        static_cast<Index>(m.train_labels.size()) != m.train_points.rows())
      throw std::runtime_error(path + ": inconsistent dense archive shapes");
    return m;
  }
  if (type == "reduced") {
    ReducedModel m;
    m.reduced_points = need_block(ar, "reduced_points", path);
    m.coefficients = need_block(ar, "coefficients", path);
    m.biases = need_block(ar, "biases", path);
    m.eigenvalues = need_block(ar, "eigenvalues", path);
    m.codebook = codebook_from_matrix(need_block(ar, "codebook", path), path);
    m.kernel = kernel_from_header(ar.header.at("kernel"));
    m.source = reduced_source_from_string(ar.header.at("source").get<std::string>());
    m.train_labels = labels_from_header(ar.header);
    for (const json& v : ar.header.at("reduced_indices"))
      m.reduced_indices.push_back(v.get<Index>());
    if (m.coefficients.rows() != m.reduced_points.rows() || m.coefficients.cols() != k - 1 ||
        m.biases.size() != k - 1 || m.codebook.k() != k ||
        m.reduced_indices.size() != static_cast<std::size_t>(m.reduced_points.rows()))
      throw std::runtime_error(path + ": inconsistent reduced archive shapes");
    return m;
  }
  throw std::runtime_error(path + ": unknown model type " + type);
}

KscModel load_model(const std::string& path) {
  AnyModel any = load_any_model(path);
  if (auto* m = std::get_if<KscModel>(&any)) return std::move(*m);
  throw std::runtime_error(path + ": archive holds a reduced model, expected dense");
}

ReducedModel load_reduced_model(const std::string& path) {
  AnyModel any = load_any_model(path);
  if (auto* m = std::get_if<ReducedModel>(&any)) return std::move(*m);
  throw std::runtime_error(path + ": archive holds a dense model, expected reduced");
}

}  // namespace ksc
