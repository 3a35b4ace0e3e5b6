// core/include/scriptorium/imaging.hpp

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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scriptorium/corpus.hpp"

namespace scriptorium::imaging {

// 8-bit grayscale, row-major, 0 = black ink, 255 = white background.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, uint8_t fill = 255);

  bool empty() const { return width <= 0 || height <= 0; }
  uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const GrayImage&) const = default;
};

// One byte per pixel, 1 = ink, 0 = background.
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> ink;

  BinaryImage() = default;
  BinaryImage(int w, int h) : width(w), height(h), ink(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int x, int y) const { return ink[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { ink[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  std::size_t ink_count() const;
  bool operator==(const BinaryImage&) const = default;
};

GrayImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const GrayImage& img);
std::string encode_png(const GrayImage& img);

GrayImage to_gray(const BinaryImage& img);  // ink -> 0, background -> 255
GrayImage crop(const GrayImage& img, const BBox& box, int pad = 0);

// --- Binarization ---------------------------------------------------------

enum class BinarizeMethod { kOtsu, kSauvola };

struct BinarizeOptions {
  BinarizeMethod method = BinarizeMethod::kOtsu;
  int window = 31;    // Sauvola window side, odd
  double k = 0.34;    // Sauvola sensitivity
};

// Global threshold t maximizing between-class variance; pixels <= t are ink.
// Ties take the lower threshold. Returns -1 when every threshold has zero
// between-class variance (uniform image).
int otsu_threshold(const GrayImage& img);

// A uniform image yields an all-background result.
BinaryImage binarize(const GrayImage& img, const BinarizeOptions& options = {});

// --- Geometry -------------------------------------------------------------

// Positive angles rotate counter-clockwise as displayed; output keeps the
// input dimensions, rotating about the image center.
BinaryImage rotate(const BinaryImage& img, double degrees);
GrayImage rotate(const GrayImage& img, double degrees);

struct DeskewResult {
  double angle = 0.0;  // correction applied, degrees
  BinaryImage image;
};

// Tries every angle in [-range, range] by `step` and keeps the one whose
// row-projection profile has the highest variance; ties prefer small |angle|.
DeskewResult deskew(const BinaryImage& img, double range_deg = 5.0,
                    double step_deg = 0.1);

// Text lines from valleys of the smoothed horizontal ink profile; gaps
// narrower than min_gap_px do not split. Sorted top to bottom.
std::vector<BBox> segment_lines(const BinaryImage& img, int min_gap_px = 4);

// --- Synthetic degradation --------------------------------------------------

enum class DegradationKind {
  kIdentity,
  kBleedthrough,
  kBlur,
  kCharErosion,
  kHoles,
  kBindingShadow
};

enum class BlurVariant { kBox = 1, kGaussian = 2, kHorizontalMotion = 3, kVerticalMotion = 4 };
enum class Side { kLeft, kRight };

// Documented ranges (checked by validate()):
//   bleedthrough alpha in [0, 1]
//   blur variant 1..4, radius 1..8
//   char_erosion strength in (0, 1]
//   holes count 1..50, radius 1..16
//   binding_shadow width >= 1 (clamped to the image width when applied)
struct DegradationRecipe {
  DegradationKind kind = DegradationKind::kIdentity;
  double alpha = 0.3;
  BlurVariant blur = BlurVariant::kBox;
  int radius = 1;
  double strength = 0.2;
  int count = 3;
  Side side = Side::kLeft;
  int width = 12;
  uint64_t seed = 0;

  void validate() const;

  // Textual form used in configs and on the command line, e.g.
  // "identity", "bleedthrough:alpha=0.3", "blur:variant=2,radius=1",
  // "erosion:strength=0.2", "holes:count=3,radius=2",
  // "shadow:side=left,width=12".
  static DegradationRecipe parse(std::string_view text);
  std::string to_string() const;
};

// Deterministic for a fixed (line, recipe); output has the input dimensions.
GrayImage degrade(const GrayImage& line, const DegradationRecipe& recipe);

// Default recipe set covering every degradation kind.
std::vector<DegradationRecipe> default_recipes();

struct LineSample {
  LineRecord record;
  GrayImage image;
};

// multiplier synthetic copies per real line. Recipes are taken round-robin
// over the output index and reseeded per item from `seed`; text is copied
// verbatim from the parent.
std::vector<LineSample> expand_ground_truth(std::span<const LineSample> lines,
                                            int multiplier,
                                            std::span<const DegradationRecipe> recipes,
                                            uint64_t seed);

}  // namespace scriptorium::imaging
