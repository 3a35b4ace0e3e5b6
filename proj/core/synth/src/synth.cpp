// core/synth/src/synth.cpp

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

#include "scriptorium/synth.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "scriptorium/error.hpp"
#include "scriptorium/random.hpp"

namespace scriptorium::synth {
namespace {

int hershey(Font f) {
  return f == Font::kSans ? cv::FONT_HERSHEY_SIMPLEX : cv::FONT_HERSHEY_COMPLEX;
}

imaging::GrayImage from_mat(const cv::Mat& m) {
  imaging::GrayImage img(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    std::copy_n(m.ptr<uint8_t>(y), m.cols, &img.pixels[static_cast<std::size_t>(y) * m.cols]);
  }
  return img;
}

void draw_text(cv::Mat& canvas, std::string_view text, int x, int baseline,
               const RenderOptions& o) {
  for (char c : text) {
    if (c < 0x20 || c > 0x7E) throw ValidationError("render: non-ASCII text");
  }
  cv::putText(canvas, std::string(text), {x, baseline}, hershey(o.font), o.scale,
              cv::Scalar(0), 1, cv::LINE_AA);
}

void degrade_mat(cv::Mat& m, const RenderOptions& o, Rng& rng) {
  if (o.blur_sigma > 0.0) cv::GaussianBlur(m, m, {0, 0}, o.blur_sigma);
  if (o.noise_sigma > 0.0) {
    for (int y = 0; y < m.rows; ++y) {
      auto* row = m.ptr<uint8_t>(y);
      for (int x = 0; x < m.cols; ++x) {
        const double v = row[x] + o.noise_sigma * rng.normal();
        row[x] = static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
}

}  // namespace

imaging::GrayImage render_line(std::string_view text, const RenderOptions& o) {
  Rng rng(o.seed);
  int base = 0;
  const cv::Size size = cv::getTextSize(std::string(text.empty() ? " " : text),
                                        hershey(o.font), o.scale, 1, &base);
  const int width = std::max(size.width, 1) + 2 * o.margin;
  cv::Mat canvas(o.line_height, width, CV_8UC1, cv::Scalar(255));
  int jitter = 0;
  if (o.baseline_jitter > 0) {
    jitter = static_cast<int>(rng.below(static_cast<uint64_t>(2 * o.baseline_jitter + 1))) -
             o.baseline_jitter;
  }
  // Baseline placed so that the cap height sits in the upper two thirds.
  const int baseline = (o.line_height + size.height) / 2 - base / 2 + jitter;
  draw_text(canvas, text, o.margin, baseline, o);
  degrade_mat(canvas, o, rng);
  return from_mat(canvas);
}

imaging::GrayImage render_page(const std::vector<std::string>& lines,
                               const RenderOptions& o, int line_gap, int page_margin) {
  int width = 0;
  for (const auto& l : lines) {
    int base = 0;
    width = std::max(width, cv::getTextSize(l, hershey(o.font), o.scale, 1, &base).width);
  }
  const int pitch = o.line_height + line_gap;
  const int height = 2 * page_margin + static_cast<int>(lines.size()) * pitch;
  cv::Mat page(height, width + 2 * page_margin, CV_8UC1, cv::Scalar(255));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int base = 0;
    const cv::Size size = cv::getTextSize("Hg", hershey(o.font), o.scale, 1, &base);
    const int top = page_margin + static_cast<int>(i) * pitch;
    draw_text(page, lines[i], page_margin, top + (o.line_height + size.height) / 2 - base / 2, o);
  }
  Rng rng(o.seed);
  degrade_mat(page, o, rng);
  return from_mat(page);
}

const std::vector<std::string>& word_list() {
  static const std::vector<std::string> words = {
      "domna", "dompna", "amor", "joi", "cors", "chantar", "fin", "amic", "bona",
      "dona", "cavalier", "senher", "mon", "mi", "vos", "que", "e", "en", "per",
      "lo", "la", "los", "las", "del", "al", "es", "son", "fo", "dis", "fai",
      "ben", "mal", "grans", "tot", "totz", "anc", "mais", "non", "pas", "com",
      "sai", "lai", "vers", "canso", "trobar", "razo", "pretz", "valor", "merce",
      "dolor", "plazer", "deport", "gaug", "esperansa", "pessamen", "ostal",
      "jorn", "nuech", "solelh", "flors", "aucels", "terra", "castel", "comte",
      "item", "sol", "deniers", "anet", "mostrar", "gens", "desus", "dit", "aver",
      "qu", "ac", "dos", "sobre", "entre", "Garsias", "Chapus", "Peire", "Arnaut",
      "Bernart", "Tolosa", "Montferrand", "Item", "Dieus", "Amors", "Jois"};
  return words;
}

std::vector<std::string> random_lines(std::size_t count, uint64_t seed, std::size_t min_chars,
                                      std::size_t max_chars) {
  Rng rng(seed);
  const auto& words = word_list();
  const std::vector<std::string> punct = {",", ".", ";", ":"};
  std::vector<std::string> out;
  while (out.size() < count) {
    const std::size_t target = min_chars + rng.below(max_chars - min_chars + 1);
    std::string line;
    while (line.size() < target) {
      std::string w = words[rng.below(words.size())];
      if (!line.empty()) line += ' ';
      line += w;
      if (rng.uniform() < 0.12) line += punct[rng.below(punct.size())];
    }
    if (line.size() > max_chars) {
      line.resize(max_chars);
      while (!line.empty() && line.back() == ' ') line.pop_back();
    }
    out.push_back(line);
  }
  return out;
}

std::vector<imaging::LineSample> make_line_corpus(std::size_t count, uint64_t seed,
                                                  const std::string& id_prefix) {
  const auto texts = random_lines(count, seed);
  Rng rng(mix_seed(seed, 1));
  std::vector<imaging::LineSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RenderOptions o;
    o.font = i % 2 == 0 ? Font::kSans : Font::kSerif;
    o.noise_sigma = rng.uniform(0.0, 12.0);
    o.blur_sigma = rng.uniform() < 0.5 ? rng.uniform(0.3, 0.8) : 0.0;
    o.baseline_jitter = 2;
    o.scale = rng.uniform(0.5, 0.6);
    o.seed = mix_seed(seed, 100 + i);
    imaging::LineSample s;
    s.record.id = id_prefix + format_id(i + 1, 6);
    s.record.gt_text = texts[i];
    s.record.status = LineStatus::kValidated;
    s.image = render_line(texts[i], o);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<imaging::LineSample> weather_lines(std::span<const imaging::LineSample> lines,
                                               uint64_t seed) {
  using imaging::DegradationKind;
  std::vector<imaging::LineSample> out(lines.begin(), lines.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    Rng rng(mix_seed(seed, i));
    const int n = 1 + static_cast<int>(rng.below(2));
    for (int k = 0; k < n; ++k) {
      imaging::DegradationRecipe r;
      r.seed = mix_seed(seed, 1000003 * (i + 1) + k);
      switch (rng.below(6)) {
        case 0:
          r.kind = DegradationKind::kBleedthrough;
          r.alpha = rng.uniform(0.15, 0.45);
          break;
        case 1:
          r.kind = DegradationKind::kBlur;
          r.blur = static_cast<imaging::BlurVariant>(1 + rng.below(4));
          r.radius = 1;
          break;
        case 2:
          r.kind = DegradationKind::kCharErosion;
          r.strength = rng.uniform(0.05, 0.2);
          break;
        case 3:
          r.kind = DegradationKind::kHoles;
          r.count = 1 + static_cast<int>(rng.below(3));
          r.radius = 1 + static_cast<int>(rng.below(2));
          break;
        default:
          r.kind = DegradationKind::kBindingShadow;
          r.side = rng.below(2) == 0 ? imaging::Side::kLeft : imaging::Side::kRight;
          r.width = 8 + static_cast<int>(rng.below(24));
          break;
      }
      out[i].image = imaging::degrade(out[i].image, r);
    }
  }
  return out;
}

}  // namespace scriptorium::synth
