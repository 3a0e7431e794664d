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

#include "ksc/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <stdexcept>

#include "ksc/parallel.hpp"
#include "ksc/toydata.hpp"

namespace ksc {

namespace {

void validate_shape(const Image& img, const char* what) {
  if (img.height <= 0 || img.width <= 0)
    throw std::invalid_argument(std::string(what) + ": empty image");
  if (img.data.size() != static_cast<std::size_t>(img.pixels()) * 3)
    throw std::invalid_argument(std::string(what) + ": raster size does not match dimensions");
}

// --- PPM ------------------------------------------------------------------

// Header tokens are separated by whitespace; '#' starts a comment that runs
// to end of line and counts as whitespace.
int ppm_token(std::istream& in, const std::string& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) throw std::runtime_error(path + ": malformed ppm header");
  long v = 0;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    if (v > std::numeric_limits<int>::max()) throw std::runtime_error(path + ": ppm value overflow");
    c = in.get();
  }
  if (c != EOF) in.unget();
  return static_cast<int>(v);
}

Image load_ppm(std::istream& in, const std::string& path) {
  char p = 0, kind = 0;
  in.get(p);
  in.get(kind);
  if (p != 'P' || (kind != '6' && kind != '3'))
    throw std::runtime_error(path + ": not a P3/P6 ppm file");
  const int width = ppm_token(in, path);
  const int height = ppm_token(in, path);
  const int maxval = ppm_token(in, path);
  if (width <= 0 || height <= 0) throw std::runtime_error(path + ": bad ppm dimensions");
  if (maxval < 1 || maxval > 255)
    throw std::runtime_error(path + ": unsupported ppm maxval " + std::to_string(maxval));

  Image img(height, width);
  const std::size_t n = img.data.size();
  if (kind == '6') {
    // Exactly one whitespace byte separates the header from the raster.
    in.get();
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
      throw std::runtime_error(path + ": truncated ppm raster");
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const int v = ppm_token(in, path);
      if (v > maxval) throw std::runtime_error(path + ": sample exceeds maxval");
      img.data[i] = static_cast<std::uint8_t>(v);
    }
  }
  if (maxval != 255) {
    for (auto& b : img.data)
      b = static_cast<std::uint8_t>(std::min(255, (int(b) * 255 + maxval / 2) / maxval));
  }
  return img;
}

void save_ppm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file: " + path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

// --- PNG ------------------------------------------------------------------

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image load_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open file: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error(path + ": png reader allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error(path + ": png info allocation failed");
  }
  // img and rows are declared before setjmp so the libpng longjmp never
  // skips a nontrivial destructor; the throw below unwinds them normally.
  Image img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": corrupt png");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  // Normalize every color type to 8-bit RGB.
  png_set_strip_16(png);
  png_set_packing(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  if (width == 0 || height == 0 || png_get_rowbytes(png, info) != width * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error(path + ": unsupported png layout");
  }

  img = Image(static_cast<Index>(height), static_cast<Index>(width));
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r)
    rows[r] = img.data.data() + static_cast<std::size_t>(r) * width * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void save_png(const Image& img, const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot open file: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error(path + ": png writer allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error(path + ": png info allocation failed");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error(path + ": png write failed");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (Index r = 0; r < img.height; ++r)
    rows[static_cast<std::size_t>(r)] =
        const_cast<png_bytep>(img.data.data() + static_cast<std::size_t>(r * img.width) * 3);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

bool has_suffix(const std::string& s, const std::string& suf) {
  if (s.size() < suf.size()) return false;
  for (std::size_t i = 0; i < suf.size(); ++i) {
    const char a = static_cast<char>(std::tolower(static_cast<unsigned char>(s[s.size() - suf.size() + i])));
    if (a != suf[i]) return false;
  }
  return true;
}

}  // namespace

Image load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  const int first = in.peek();
  if (first == 0x89) {
    in.close();
    return load_png(path);
  }
  if (first == 'P') return load_ppm(in, path);
  throw std::runtime_error(path + ": unrecognized image format (expected PNG or PPM)");
}

void save_image(const Image& img, const std::string& path) {
  validate_shape(img, "save_image");
  if (has_suffix(path, ".png")) {
    save_png(img, path);
  } else if (has_suffix(path, ".ppm") || has_suffix(path, ".pnm")) {
    save_ppm(img, path);
  } else {
    throw std::invalid_argument("save_image: unsupported extension (use .png or .ppm): " + path);
  }
}

std::vector<double> luminance(const Image& img) {
  validate_shape(img, "luminance");
  std::vector<double> lum(static_cast<std::size_t>(img.pixels()));
  for (Index i = 0; i < img.pixels(); ++i) {
    const std::size_t o = static_cast<std::size_t>(i) * 3;
    lum[static_cast<std::size_t>(i)] =
        0.299 * img.data[o] + 0.587 * img.data[o + 1] + 0.114 * img.data[o + 2];
  }
  return lum;
}

std::vector<int> quantize_levels(const Image& img, int levels) {
  validate_shape(img, "quantize_levels");
  if (levels < 1) throw std::invalid_argument("quantize_levels: levels must be positive");
  const std::vector<double> lum = luminance(img);
  const std::size_t n = lum.size();

  std::vector<double> sorted = lum;
  std::sort(sorted.begin(), sorted.end());
  // A flat image needs no iteration, and summing equal values in slices of
  // different lengths could drift the dead centers apart by an ulp.
  if (sorted.front() == sorted.back()) return std::vector<int>(n, 0);
  std::vector<double> centers(static_cast<std::size_t>(levels));
  for (int j = 0; j < levels; ++j) {
    const std::size_t lo = n * static_cast<std::size_t>(j) / static_cast<std::size_t>(levels);
    const std::size_t hi = n * static_cast<std::size_t>(j + 1) / static_cast<std::size_t>(levels);
    if (hi > lo) {
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += sorted[i];
      centers[static_cast<std::size_t>(j)] = s / double(hi - lo);
    } else {
      centers[static_cast<std::size_t>(j)] = sorted[std::min(lo, n - 1)];
    }
  }

  std::vector<int> assign(n, 0);
  auto nearest = [&](double v) {
    int best = 0;
    double bd = std::abs(v - centers[0]);
    for (int j = 1; j < levels; ++j) {
      const double d = std::abs(v - centers[static_cast<std::size_t>(j)]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    return best;
  };

  // Lloyd iterations; in one dimension with ordered seeding this converges
  // in a handful of passes, the cap is only a safety net.
  for (int it = 0; it < 1000; ++it) {
    for (std::size_t i = 0; i < n; ++i) assign[i] = nearest(lum[i]);
    std::vector<double> sum(static_cast<std::size_t>(levels), 0.0);
    std::vector<std::size_t> cnt(static_cast<std::size_t>(levels), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[static_cast<std::size_t>(assign[i])] += lum[i];
      ++cnt[static_cast<std::size_t>(assign[i])];
    }
    double moved = 0.0;
    for (int j = 0; j < levels; ++j) {
      if (cnt[static_cast<std::size_t>(j)] == 0) continue;  // empty bins keep their center
      const double c = sum[static_cast<std::size_t>(j)] / double(cnt[static_cast<std::size_t>(j)]);
      moved = std::max(moved, std::abs(c - centers[static_cast<std::size_t>(j)]));
      centers[static_cast<std::size_t>(j)] = c;
    }
    if (moved < 1e-6) break;
  }
  for (std::size_t i = 0; i < n; ++i) assign[i] = nearest(lum[i]);
  return assign;
}

Dataset image_to_histograms(const Image& img, int window, int levels) {
  validate_shape(img, "image_to_histograms");
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("image_to_histograms: window must be odd and positive");
  if (levels < 2) throw std::invalid_argument("image_to_histograms: levels must be at least 2");
  if (window > img.height && window > img.width)
    throw std::invalid_argument("image_to_histograms: window larger than both image dimensions");

  const std::vector<int> level = quantize_levels(img, levels);
  const Index H = img.height, W = img.width;
  const int half = window / 2;

  Dataset out;
  out.points.resize(H * W, levels);
  parallel_for(H * W, [&](Index begin, Index end) {
    std::vector<double> counts(static_cast<std::size_t>(levels));
    for (Index i = begin; i < end; ++i) {
      const Index r = i / W, c = i % W;
      std::fill(counts.begin(), counts.end(), 0.0);
      const Index r0 = std::max<Index>(0, r - half), r1 = std::min<Index>(H - 1, r + half);
      const Index c0 = std::max<Index>(0, c - half), c1 = std::min<Index>(W - 1, c + half);
      for (Index rr = r0; rr <= r1; ++rr)
        for (Index cc = c0; cc <= c1; ++cc)
          counts[static_cast<std::size_t>(level[static_cast<std::size_t>(rr * W + cc)])] += 1.0;
      const double total = double((r1 - r0 + 1) * (c1 - c0 + 1));
      for (int b = 0; b < levels; ++b) out.points(i, b) = counts[static_cast<std::size_t>(b)] / total;
    }
  });
  return out;
}

Image label_image(const Labels& labels, Index height, Index width) {
  if (height <= 0 || width <= 0) throw std::invalid_argument("label_image: empty image");
  if (static_cast<Index>(labels.size()) != height * width)
    throw std::invalid_argument("label_image: labels length does not match height * width");
  // Distinguishable fixed palette; repeats after 12 clusters.
  static constexpr std::uint8_t palette[12][3] = {
      {230, 25, 75},  {60, 180, 75},   {0, 130, 200},  {255, 225, 25},
      {145, 30, 180}, {245, 130, 48},  {70, 240, 240}, {240, 50, 230},
      {128, 128, 0},  {0, 128, 128},   {170, 110, 40}, {128, 128, 128},
  };
  Image img(height, width);
  for (Index i = 0; i < height * width; ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    if (l < 0) throw std::invalid_argument("label_image: negative label");
    const std::uint8_t* rgb = palette[l % 12];
    const std::size_t o = static_cast<std::size_t>(i) * 3;
    img.data[o] = rgb[0];
    img.data[o + 1] = rgb[1];
    img.data[o + 2] = rgb[2];
  }
  return img;
}

RegionsImage make_regions_image(Index height, Index width, double noise_fraction,
                                std::uint64_t seed) {
  if (height < 2 || width < 2)
    throw std::invalid_argument("make_regions_image: need at least 2x2 pixels");
  if (noise_fraction < 0.0 || noise_fraction > 1.0)
    throw std::invalid_argument("make_regions_image: noise_fraction must lie in [0, 1]");
  static constexpr std::uint8_t base[3][3] = {{205, 60, 60}, {60, 205, 60}, {60, 60, 205}};

  ToyRng rng(seed);
  RegionsImage out;
  out.image = Image(height, width);
  out.labels.assign(static_cast<std::size_t>(height * width), 0);
  auto jitter = [&](int v) {
    const int j = int(rng.uniform() * 13.0) - 6;  // uniform on [-6, 6]
    return static_cast<std::uint8_t>(std::clamp(v + j, 0, 255));
  };
  for (Index r = 0; r < height; ++r) {
    for (Index c = 0; c < width; ++c) {
      const int region = c < width / 2 ? 0 : (r < height / 2 ? 1 : 2);
      out.labels[static_cast<std::size_t>(r * width + c)] = region;
      const std::size_t o = static_cast<std::size_t>(r * width + c) * 3;
      if (rng.uniform() < noise_fraction) {
        for (int ch = 0; ch < 3; ++ch)
          out.image.data[o + static_cast<std::size_t>(ch)] =
              static_cast<std::uint8_t>(std::min(255, int(rng.uniform() * 256.0)));
      } else {
        for (int ch = 0; ch < 3; ++ch)
          out.image.data[o + static_cast<std::size_t>(ch)] = jitter(base[region][ch]);
      }
    }
  }
  return out;
}

}  // namespace ksc
