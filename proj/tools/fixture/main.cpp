// tools/fixture/main.cpp

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

// Writes the synthetic demonstration data: rendered pages with ground
// truth, an annotated corpus with regular paradigms and an unannotated
// secondary corpus sharing its lexicon.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/corpus.hpp"
#include "scriptorium/imaging.hpp"
#include "scriptorium/morphology.hpp"
#include "scriptorium/synth.hpp"
#include "scriptorium/workbench_tasks.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"scriptorium-fixture: synthetic pages and corpora"};
  std::string out;
  std::size_t pages = 1, lines = 30, n_lemmas = 150, n_tokens = 6000, secondary_tokens = 30000;
  uint64_t seed = 1;
  double skew = 1.0;
  app.add_option("outdir", out, "Output directory")->required();
  app.add_option("--pages", pages, "Rendered pages")->capture_default_str();
  app.add_option("--lines", lines, "Lines per page")->capture_default_str();
  app.add_option("--skew", skew, "Page rotation in degrees")->capture_default_str();
  app.add_option("--lemmas", n_lemmas, "Open-class lemmas of the annotated corpus")->capture_default_str();
  app.add_option("--tokens", n_tokens, "Tokens of the annotated corpus")->capture_default_str();
  app.add_option("--secondary-tokens", secondary_tokens, "Tokens of the unannotated corpus")
      ->capture_default_str();
  app.add_option("--seed", seed, "Seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out);
    for (std::size_t p = 0; p < pages; ++p) {
      const auto text = scriptorium::synth::random_lines(lines, seed + 1000 * p);
      scriptorium::synth::RenderOptions opt;
      opt.font = p % 2 == 0 ? scriptorium::synth::Font::kSans : scriptorium::synth::Font::kSerif;
      opt.noise_sigma = 6.0;
      opt.seed = seed + p;
      auto page = scriptorium::synth::render_page(text, opt);
      if (skew != 0.0) page = scriptorium::imaging::rotate(page, skew);
      const std::string stem = "page_" + scriptorium::format_id(p + 1, 3);
      scriptorium::imaging::write_png(fs::path(out) / (stem + ".png"), page);
      std::string gt;
      for (const auto& l : text) gt += l + "\n";
      scriptorium::write_file(fs::path(out) / (stem + ".gt.txt"), gt);
    }

    scriptorium::synth::MorphologyOptions mo;
    mo.n_lemmas = n_lemmas;
    mo.n_tokens = n_tokens;
    mo.lexicon_seed = seed;
    mo.seed = seed;
    std::vector<scriptorium::workbench::AnnotatedSentence> annotated;
    for (auto& s : scriptorium::synth::morphology_corpus(mo)) {
      annotated.push_back({std::move(s.surfaces), std::move(s.lemmas)});
    }
    scriptorium::workbench::write_annotated_corpus(fs::path(out) / "annotated.tsv", annotated);

    mo.n_tokens = secondary_tokens;
    mo.seed = seed + 1;
    std::string secondary;
    for (const auto& s : scriptorium::synth::morphology_corpus(mo)) {
      for (std::size_t i = 0; i < s.surfaces.size(); ++i) {
        secondary += (i ? " " : "") + s.surfaces[i];
      }
      secondary += "\n";
    }
    scriptorium::write_file(fs::path(out) / "secondary.txt", secondary);
    std::cout << "wrote " << pages << " page(s), " << annotated.size()
              << " annotated sentences and a secondary corpus to " << out << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
