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

#include <cstdint>
#include <string>
#include <vector>

#include "ksc/dataset.hpp"
#include "ksc/types.hpp"

namespace ksc {

// 8-bit RGB raster, rows top to bottom, channels interleaved.
struct Image {
  Index height = 0;
  Index width = 0;
  std::vector<std::uint8_t> data;  // height * width * 3 bytes

  Image() = default;
  Image(Index h, Index w)
      : height(h), width(w), data(static_cast<std::size_t>(h * w) * 3, 0) {}

  std::uint8_t& at(Index r, Index c, int ch) {
    return data[(static_cast<std::size_t>(r * width + c)) * 3 + static_cast<std::size_t>(ch)];
  }
  std::uint8_t at(Index r, Index c, int ch) const {
    return data[(static_cast<std::size_t>(r * width + c)) * 3 + static_cast<std::size_t>(ch)];
  }
  Index pixels() const { return height * width; }
};

// PNG or PPM (P6/P3), detected from the file contents.
Image load_image(const std::string& path);

// Format picked by extension: ".png", or ".ppm"/".pnm" as binary P6.
void save_image(const Image& img, const std::string& path);

// Rec. 601 luma per pixel in row-major order.
std::vector<double> luminance(const Image& img);

// Minimum-variance palette of `levels` gray values: 1-d k-means on luma,
// centers seeded at the means of equal-count slices of the sorted values,
// Lloyd iterations until every center moves < 1e-6. Returns the per-pixel
// level id in [0, levels); nearest-center ties take the lower id, so a flat
// image collapses onto level 0.
std::vector<int> quantize_levels(const Image& img, int levels);

// Window color histograms: row i describes pixel i (row-major) as the
// distribution of quantized levels over the window x window patch centered
// there, clipped at the image borders. Rows are nonnegative and sum to 1.
// The window must be odd and may exceed one image dimension but not both.
Dataset image_to_histograms(const Image& img, int window = 5, int levels = 8);

// Colors each pixel by its cluster id using a fixed palette; ids beyond the
// palette cycle through it. Rerunning on equal labels is byte-identical.
Image label_image(const Labels& labels, Index height, Index width);

struct RegionsImage {
  Image image;
  Labels labels;  // ground-truth region id per pixel, row-major
};

// Three-region test card: left half plus top-right and bottom-right
// quadrants in distinct base colors, mild per-channel jitter, and
// noise_fraction of the pixels replaced by uniform random colors.
RegionsImage make_regions_image(Index height, Index width, double noise_fraction,
                                std::uint64_t seed);

}  // namespace ksc
