// core/src/imaging.cpp

// Copyright 2024-2026  The scriptorium authors

// See LICENSE at the top of the source tree.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "scriptorium/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/random.hpp"

namespace scriptorium::imaging {

GrayImage::GrayImage(int w, int h, uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

std::size_t BinaryImage::ink_count() const {
  return static_cast<std::size_t>(std::count(ink.begin(), ink.end(), uint8_t{1}));
}

// --- PNG ------------------------------------------------------------------

GrayImage read_png(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, data.data(), data.size())) {
    throw ParseError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  GrayImage out(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    throw ParseError(path.string() + ": " + image.message);
  }
  return out;
}

std::string encode_png(const GrayImage& img) {
  if (img.empty()) throw ValidationError("cannot encode an empty image");
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels.data(), 0,
                                 nullptr)) {
    throw Error(std::string("png encode: ") + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels.data(),
                                 0, nullptr)) {
    throw Error(std::string("png encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

void write_png(const std::filesystem::path& path, const GrayImage& img) {
  write_file(path, encode_png(img));
}

GrayImage to_gray(const BinaryImage& img) {
  GrayImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.ink.size(); ++i) out.pixels[i] = img.ink[i] ? 0 : 255;
  return out;
}

GrayImage crop(const GrayImage& img, const BBox& box, int pad) {
  const int x0 = std::max(0, box.x - pad);
  const int y0 = std::max(0, box.y - pad);
  const int x1 = std::min(img.width, box.right() + pad);
  const int y1 = std::min(img.height, box.bottom() + pad);
  if (x1 <= x0 || y1 <= y0) throw ValidationError("crop box outside image");
  GrayImage out(x1 - x0, y1 - y0);
  for (int y = y0; y < y1; ++y) {
    std::copy_n(&img.pixels[static_cast<std::size_t>(y) * img.width + x0], x1 - x0,
                &out.pixels[static_cast<std::size_t>(y - y0) * out.width]);
  }
  return out;
}

// --- Binarization ---------------------------------------------------------

int otsu_threshold(const GrayImage& img) {
  std::array<double, 256> hist{};
  for (uint8_t p : img.pixels) hist[p] += 1.0;
  const double total = static_cast<double>(img.pixels.size());
  double sum_all = 0.0;
  for (int i = 0; i < 256; ++i) sum_all += i * hist[i];

  double w0 = 0.0, sum0 = 0.0;
  double best = 0.0;
  int best_t = -1;
  for (int t = 0; t < 255; ++t) {
    w0 += hist[t];
    sum0 += t * hist[t];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

namespace {

BinaryImage sauvola(const GrayImage& img, int window, double k) {
  const int w = img.width, h = img.height;
  const std::size_t stride = static_cast<std::size_t>(w) + 1;
  std::vector<double> sum(stride * (h + 1), 0.0), sq(stride * (h + 1), 0.0);
  for (int y = 0; y < h; ++y) {
    double row = 0.0, row_sq = 0.0;
    for (int x = 0; x < w; ++x) {
      const double p = img.at(x, y);
      row += p;
      row_sq += p * p;
      sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + row;
      sq[(y + 1) * stride + x + 1] = sq[y * stride + x + 1] + row_sq;
    }
  }
  const int r = window / 2;
  constexpr double kDynamicRange = 128.0;
  BinaryImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - r), y1 = std::min(h, y + r + 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - r), x1 = std::min(w, x + r + 1);
      const double n = static_cast<double>((y1 - y0) * (x1 - x0));
      auto box = [&](const std::vector<double>& s) {
        return s[y1 * stride + x1] - s[y0 * stride + x1] - s[y1 * stride + x0] +
               s[y0 * stride + x0];
      };
      const double mean = box(sum) / n;
      const double var = std::max(0.0, box(sq) / n - mean * mean);
      const double threshold = mean * (1.0 + k * (std::sqrt(var) / kDynamicRange - 1.0));
      out.set(x, y, img.at(x, y) < threshold);
    }
  }
  return out;
}

}  // namespace

BinaryImage binarize(const GrayImage& img, const BinarizeOptions& options) {
  if (img.empty()) throw ValidationError("binarize: empty image");
  if (options.method == BinarizeMethod::kSauvola) {
    if (options.window < 3 || options.window % 2 == 0) {
      throw ValidationError("binarize: Sauvola window must be odd and >= 3");
    }
    return sauvola(img, options.window, options.k);
  }
  BinaryImage out(img.width, img.height);
  const int t = otsu_threshold(img);
  if (t < 0) return out;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    out.ink[i] = img.pixels[i] <= t ? 1 : 0;
  }
  return out;
}

// --- Geometry -------------------------------------------------------------

namespace {

double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

BinaryImage rotate(const BinaryImage& img, double degrees) {
  if (degrees == 0.0) return img;
  const double a = to_radians(degrees);
  const double c = std::cos(a), s = std::sin(a);
  const double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;
  BinaryImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double dx = x - cx, dy = y - cy;
      const long sx = std::lround(dx * c - dy * s + cx);
      const long sy = std::lround(dx * s + dy * c + cy);
      if (sx >= 0 && sy >= 0 && sx < img.width && sy < img.height) {
        out.set(x, y, img.at(static_cast<int>(sx), static_cast<int>(sy)));
      }
    }
  }
  return out;
}

GrayImage rotate(const GrayImage& img, double degrees) {
  if (degrees == 0.0) return img;
  const double a = to_radians(degrees);
  const double c = std::cos(a), s = std::sin(a);
  const double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;
  GrayImage out(img.width, img.height, 255);
  auto sample = [&](int x, int y) -> double {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) return 255.0;
    return img.at(x, y);
  };
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double dx = x - cx, dy = y - cy;
      const double sx = dx * c - dy * s + cx;
      const double sy = dx * s + dy * c + cy;
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0, fy = sy - y0;
      const double v = (1 - fx) * (1 - fy) * sample(x0, y0) +
                       fx * (1 - fy) * sample(x0 + 1, y0) +
                       (1 - fx) * fy * sample(x0, y0 + 1) +
                       fx * fy * sample(x0 + 1, y0 + 1);
      out.at(x, y) = static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

DeskewResult deskew(const BinaryImage& img, double range_deg, double step_deg) {
  if (step_deg <= 0.0 || range_deg < 0.0) {
    throw ValidationError("deskew: step must be positive and range non-negative");
  }
  std::vector<std::pair<double, double>> ink;  // centered coordinates
  const double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (img.at(x, y)) ink.emplace_back(x - cx, y - cy);
    }
  }
  if (ink.empty()) return {0.0, img};

  // Candidates ordered by |angle| so that strict improvement keeps the
  // smallest correction on ties.
  const int n = static_cast<int>(std::lround(range_deg / step_deg));
  std::vector<double> candidates{0.0};
  for (int k = 1; k <= n; ++k) {
    candidates.push_back(-k * step_deg);
    candidates.push_back(k * step_deg);
  }

  const double half_diag = std::hypot(img.width, img.height) / 2.0 + 2.0;
  const int offset = static_cast<int>(std::ceil(half_diag));
  std::vector<double> bins(static_cast<std::size_t>(2 * offset + 1));
  double best_score = -1.0, best_angle = 0.0;
  for (double angle : candidates) {
    const double a = to_radians(angle);
    const double c = std::cos(a), s = std::sin(a);
    std::fill(bins.begin(), bins.end(), 0.0);
    for (const auto& [dx, dy] : ink) {
      const long row = std::lround(-dx * s + dy * c) + offset;
      bins[static_cast<std::size_t>(row)] += 1.0;
    }
    // Total mass and bin count are fixed, so the sum of squares orders
    // candidates exactly as the profile variance does.
    double score = 0.0;
    for (double b : bins) score += b * b;
    if (score > best_score) {
      best_score = score;
      best_angle = angle;
    }
  }
  return {best_angle, rotate(img, best_angle)};
}

std::vector<BBox> segment_lines(const BinaryImage& img, int min_gap_px) {
  if (min_gap_px < 0) throw ValidationError("segment_lines: negative min gap");
  std::vector<int> profile(static_cast<std::size_t>(img.height), 0);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) profile[y] += img.at(x, y) ? 1 : 0;
  }
  // Row runs with ink, then close valleys narrower than min_gap_px.
  std::vector<std::pair<int, int>> runs;  // [begin, end)
  for (int y = 0; y < img.height;) {
    if (profile[y] == 0) {
      ++y;
      continue;
    }
    int e = y;
    while (e < img.height && profile[e] > 0) ++e;
    if (!runs.empty() && y - runs.back().second < min_gap_px) {
      runs.back().second = e;
    } else {
      runs.emplace_back(y, e);
    }
    y = e;
  }
  std::vector<BBox> boxes;
  for (const auto& [y0, y1] : runs) {
    int x0 = img.width, x1 = -1;
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < img.width; ++x) {
        if (img.at(x, y)) {
          x0 = std::min(x0, x);
          x1 = std::max(x1, x);
        }
      }
    }
    boxes.push_back({x0, y0, x1 - x0 + 1, y1 - y0});
  }
  return boxes;
}

// --- Degradation ----------------------------------------------------------

void DegradationRecipe::validate() const {
  auto fail = [](const std::string& m) { throw ValidationError("degradation: " + m); };
  switch (kind) {
    case DegradationKind::kIdentity: break;
    case DegradationKind::kBleedthrough:
      if (!(alpha >= 0.0 && alpha <= 1.0)) fail("bleedthrough alpha must be in [0,1]");
      break;
    case DegradationKind::kBlur:
      if (static_cast<int>(blur) < 1 || static_cast<int>(blur) > 4) fail("blur variant must be 1..4");
      if (radius < 1 || radius > 8) fail("blur radius must be 1..8");
      break;
    case DegradationKind::kCharErosion:
      if (!(strength > 0.0 && strength <= 1.0)) fail("erosion strength must be in (0,1]");
      break;
    case DegradationKind::kHoles:
      if (count < 1 || count > 50) fail("hole count must be 1..50");
      if (radius < 1 || radius > 16) fail("hole radius must be 1..16");
      break;
    case DegradationKind::kBindingShadow:
      if (width < 1) fail("shadow width must be >= 1");
      break;
  }
}

namespace {

std::string kind_name(DegradationKind k) {
  switch (k) {
    case DegradationKind::kIdentity: return "identity";
    case DegradationKind::kBleedthrough: return "bleedthrough";
    case DegradationKind::kBlur: return "blur";
    case DegradationKind::kCharErosion: return "erosion";
    case DegradationKind::kHoles: return "holes";
    case DegradationKind::kBindingShadow: return "shadow";
  }
  return "identity";
}

}  // namespace

DegradationRecipe DegradationRecipe::parse(std::string_view text) {
  DegradationRecipe r;
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  if (name == "identity") r.kind = DegradationKind::kIdentity;
  else if (name == "bleedthrough") r.kind = DegradationKind::kBleedthrough;
  else if (name == "blur") r.kind = DegradationKind::kBlur;
  else if (name == "erosion") r.kind = DegradationKind::kCharErosion;
  else if (name == "holes") r.kind = DegradationKind::kHoles;
  else if (name == "shadow") r.kind = DegradationKind::kBindingShadow;
  else throw ValidationError("unknown degradation '" + name + "'");

  if (colon != std::string_view::npos) {
    std::istringstream params{std::string(text.substr(colon + 1))};
    std::string kv;
    while (std::getline(params, kv, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ValidationError("bad degradation parameter '" + kv + "'");
      const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
      try {
        if (key == "alpha") r.alpha = std::stod(value);
        else if (key == "variant") r.blur = static_cast<BlurVariant>(std::stoi(value));
        else if (key == "radius") r.radius = std::stoi(value);
        else if (key == "strength") r.strength = std::stod(value);
        else if (key == "count") r.count = std::stoi(value);
        else if (key == "width") r.width = std::stoi(value);
        else if (key == "seed") r.seed = std::stoull(value);
        else if (key == "side") {
          if (value == "left") r.side = Side::kLeft;
          else if (value == "right") r.side = Side::kRight;
          else throw ValidationError("shadow side must be left or right");
        } else {
          throw ValidationError("unknown degradation parameter '" + key + "'");
        }
      } catch (const std::logic_error&) {
        throw ValidationError("bad value for degradation parameter '" + key + "'");
      }
    }
  }
  r.validate();
  return r;
}

std::string DegradationRecipe::to_string() const {
  std::ostringstream ss;
  ss << kind_name(kind);
  switch (kind) {
    case DegradationKind::kIdentity: break;
    case DegradationKind::kBleedthrough: ss << ":alpha=" << alpha; break;
    case DegradationKind::kBlur:
      ss << ":variant=" << static_cast<int>(blur) << ",radius=" << radius;
      break;
    case DegradationKind::kCharErosion: ss << ":strength=" << strength; break;
    case DegradationKind::kHoles: ss << ":count=" << count << ",radius=" << radius; break;
    case DegradationKind::kBindingShadow:
      ss << ":side=" << (side == Side::kLeft ? "left" : "right") << ",width=" << width;
      break;
  }
  return ss.str();
}

namespace {

uint8_t clamp_byte(double v) {
  return static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

GrayImage convolve_separable(const GrayImage& img, const std::vector<double>& kx,
                             const std::vector<double>& ky) {
  const int w = img.width, h = img.height;
  const int rx = static_cast<int>(kx.size() / 2), ry = static_cast<int>(ky.size() / 2);
  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -rx; k <= rx; ++k) {
        acc += kx[k + rx] * img.at(std::clamp(x + k, 0, w - 1), y);
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -ry; k <= ry; ++k) {
        acc += ky[k + ry] * tmp[static_cast<std::size_t>(std::clamp(y + k, 0, h - 1)) * w + x];
      }
      out.at(x, y) = clamp_byte(acc);
    }
  }
  return out;
}

GrayImage blur(const GrayImage& img, BlurVariant variant, int radius) {
  const std::vector<double> identity{1.0};
  const std::vector<double> box(static_cast<std::size_t>(2 * radius + 1),
                                1.0 / (2 * radius + 1));
  switch (variant) {
    case BlurVariant::kBox: return convolve_separable(img, box, box);
    case BlurVariant::kHorizontalMotion: return convolve_separable(img, box, identity);
    case BlurVariant::kVerticalMotion: return convolve_separable(img, identity, box);
    case BlurVariant::kGaussian: {
      const double sigma = radius / 2.0;
      const int half = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
      std::vector<double> g(static_cast<std::size_t>(2 * half + 1));
      double total = 0.0;
      for (int k = -half; k <= half; ++k) {
        g[k + half] = std::exp(-(k * k) / (2.0 * sigma * sigma));
        total += g[k + half];
      }
      for (auto& v : g) v /= total;
      return convolve_separable(img, g, g);
    }
  }
  return img;
}

GrayImage bleedthrough(const GrayImage& img, double alpha) {
  GrayImage out = img;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double donor = img.at(img.width - 1 - x, y);
      const double faded = 255.0 - alpha * (255.0 - donor);
      out.at(x, y) = std::min(img.at(x, y), clamp_byte(faded));
    }
  }
  return out;
}

GrayImage erode_chars(const GrayImage& img, double strength, Rng& rng) {
  GrayImage out = img;
  constexpr int kInk = 128;
  const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (img.at(x, y) >= kInk) continue;
      uint8_t lightest = img.at(x, y);
      bool edge = false;
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= img.width || ny >= img.height) continue;
        if (img.at(nx, ny) >= kInk) {
          edge = true;
          lightest = std::max(lightest, img.at(nx, ny));
        }
      }
      // Draw for every ink pixel so the stream does not depend on edge shape.
      const double u = rng.uniform();
      if (edge && u < strength) out.at(x, y) = lightest;
    }
  }
  return out;
}

GrayImage punch_holes(const GrayImage& img, int count, int radius, Rng& rng) {
  GrayImage out = img;
  for (int i = 0; i < count; ++i) {
    const int cx = static_cast<int>(rng.below(static_cast<uint64_t>(img.width)));
    const int cy = static_cast<int>(rng.below(static_cast<uint64_t>(img.height)));
    for (int y = std::max(0, cy - radius); y <= std::min(img.height - 1, cy + radius); ++y) {
      for (int x = std::max(0, cx - radius); x <= std::min(img.width - 1, cx + radius); ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius) out.at(x, y) = 255;
      }
    }
  }
  return out;
}

GrayImage binding_shadow(const GrayImage& img, Side side, int width) {
  GrayImage out = img;
  const int w = std::min(width, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int d = 0; d < w; ++d) {
      const int x = side == Side::kLeft ? d : img.width - 1 - d;
      const double factor = 0.45 + 0.55 * (static_cast<double>(d) / w);
      out.at(x, y) = clamp_byte(img.at(x, y) * factor);
    }
  }
  return out;
}

}  // namespace

GrayImage degrade(const GrayImage& line, const DegradationRecipe& recipe) {
  if (line.empty()) throw ValidationError("degrade: empty image");
  recipe.validate();
  Rng rng(recipe.seed);
  switch (recipe.kind) {
    case DegradationKind::kIdentity: return line;
    case DegradationKind::kBleedthrough: return bleedthrough(line, recipe.alpha);
    case DegradationKind::kBlur: return blur(line, recipe.blur, recipe.radius);
    case DegradationKind::kCharErosion: return erode_chars(line, recipe.strength, rng);
    case DegradationKind::kHoles: return punch_holes(line, recipe.count, recipe.radius, rng);
    case DegradationKind::kBindingShadow: return binding_shadow(line, recipe.side, recipe.width);
  }
  return line;
}

std::vector<DegradationRecipe> default_recipes() {
  std::vector<DegradationRecipe> r;
  for (const char* spec : {"bleedthrough:alpha=0.3", "blur:variant=1,radius=1",
                           "blur:variant=2,radius=2", "blur:variant=3,radius=1",
                           "blur:variant=4,radius=1", "erosion:strength=0.15",
                           "holes:count=2,radius=2", "shadow:side=left,width=12",
                           "shadow:side=right,width=12"}) {
    r.push_back(DegradationRecipe::parse(spec));
  }
  return r;
}

std::vector<LineSample> expand_ground_truth(std::span<const LineSample> lines,
                                            int multiplier,
                                            std::span<const DegradationRecipe> recipes,
                                            uint64_t seed) {
  if (multiplier < 1) throw ValidationError("expand_ground_truth: multiplier must be >= 1");
  if (recipes.empty()) throw ValidationError("expand_ground_truth: no recipes");
  for (const auto& l : lines) {
    if (!l.record.gt_text) {
      throw ValidationError("expand_ground_truth: line " + l.record.id + " has no ground truth");
    }
  }
  std::vector<LineSample> out;
  out.reserve(lines.size() * static_cast<std::size_t>(multiplier));
  uint64_t counter = 0;
  const int width = multiplier < 1000 ? 3 : 6;
  for (const auto& parent : lines) {
    for (int m = 0; m < multiplier; ++m, ++counter) {
      DegradationRecipe recipe = recipes[counter % recipes.size()];
      recipe.seed = mix_seed(seed, counter);
      LineSample s;
      s.record.id = parent.record.id + "_a" + format_id(static_cast<uint64_t>(m) + 1, width);
      s.record.page_id = parent.record.page_id;
      s.record.bbox = parent.record.bbox;
      s.record.gt_text = parent.record.gt_text;
      s.record.status = LineStatus::kValidated;
      s.record.origin = LineOrigin::kSynthetic;
      s.record.parent_id = parent.record.id;
      s.image = degrade(parent.image, recipe);
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace scriptorium::imaging
