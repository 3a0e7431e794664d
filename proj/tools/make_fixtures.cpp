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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "ksc/data_io.hpp"
#include "ksc/image.hpp"
#include "ksc/toydata.hpp"

namespace fs = std::filesystem;

namespace {

void write_dataset(const fs::path& dir, const std::string& stem, const ksc::Dataset& d) {
  ksc::save_matrix((dir / (stem + ".csv")).string(), d.points);
  if (d.labels) ksc::save_labels((dir / (stem + "_labels.csv")).string(), *d.labels);
}

}  // namespace

// Writes the deterministic sample inputs the CLI walkthroughs and the
// acceptance runner use. Everything is seeded, so reruns are byte-identical.
int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? argv[1] : "data";
  try {
    fs::create_directories(dir);

    write_dataset(dir, "three_gaussians", ksc::three_gaussians(200, 42));
    write_dataset(dir, "three_gaussians_test", ksc::three_gaussians(100, 43));
    write_dataset(dir, "nested_blobs", ksc::nested_blobs(60, 42));

    // Two disconnected triangles: the classic exact-modularity example.
    {
      std::ofstream out(dir / "two_triangles.txt");
      out << "0 1\n0 2\n1 2\n3 4\n3 5\n4 5\n";
      ksc::save_labels((dir / "two_triangles_labels.csv").string(), {0, 0, 0, 1, 1, 1});
    }

    const ksc::RegionsImage card = ksc::make_regions_image(64, 64, 0.05, 7);
    ksc::save_image(card.image, (dir / "regions.png").string());
    ksc::save_labels((dir / "regions_labels.csv").string(), card.labels);

    {
      std::ofstream out(dir / "select_config.json");
      out << "{\n"
             "  \"kernel\": \"rbf\",\n"
             "  \"criterion\": \"blf\",\n"
             "  \"ks\": [2, 3, 4, 5],\n"
             "  \"bandwidth_grid\": {\"log10_min\": -3, \"log10_max\": -1, \"count\": 5},\n"
             "  \"train_fraction\": 0.4,\n"
             "  \"val_fraction\": 0.3\n"
             "}\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "fixtures written to " << dir.string() << "\n";
  return 0;
}
