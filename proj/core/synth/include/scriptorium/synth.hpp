// core/synth/include/scriptorium/synth.hpp

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
#include <string>
#include <string_view>
#include <vector>

#include "scriptorium/imaging.hpp"

// Synthetic printed-text fixtures: rendered lines and pages with known
// transcriptions. Used by tests, benchmarks and the fixture generator.
namespace scriptorium::synth {

enum class Font { kSans, kSerif };

struct RenderOptions {
  Font font = Font::kSans;
  int line_height = 32;      // canvas height in pixels
  double scale = 0.55;       // Hershey font scale
  int margin = 6;            // horizontal padding
  // Mild degradations; all zero renders a clean line.
  double noise_sigma = 0.0;  // gray-level Gaussian noise
  double blur_sigma = 0.0;
  int baseline_jitter = 0;   // random vertical shift, +/- pixels
  uint64_t seed = 0;
};

// ASCII text only (Hershey fonts cover 0x20..0x7E).
imaging::GrayImage render_line(std::string_view text, const RenderOptions& options);

// Renders lines top to bottom with `line_gap` blank rows between them.
imaging::GrayImage render_page(const std::vector<std::string>& lines,
                               const RenderOptions& options, int line_gap = 14,
                               int page_margin = 20);

// Random lines of Occitan-like words, between min_chars and max_chars long.
std::vector<std::string> random_lines(std::size_t count, uint64_t seed,
                                      std::size_t min_chars = 18, std::size_t max_chars = 32);

// The word list random_lines draws from.
const std::vector<std::string>& word_list();

// `count` rendered lines with ground truth, alternating the two fonts and
// applying mild random degradations.
std::vector<imaging::LineSample> make_line_corpus(std::size_t count, uint64_t seed,
                                                  const std::string& id_prefix = "");

// Applies one or two randomly parameterized physical degradations per line,
// imitating damaged source pages. Parameters are drawn independently of
// imaging::default_recipes().
std::vector<imaging::LineSample> weather_lines(std::span<const imaging::LineSample> lines,
                                               uint64_t seed);

}  // namespace scriptorium::synth
