// core/synth/src/morphology.cpp

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

#include "scriptorium/morphology.hpp"

#include <array>
#include <cmath>
#include <set>

#include "scriptorium/random.hpp"

namespace scriptorium::synth {
namespace {

enum class WordClass { kVerbAr, kVerbIr, kNounMasc, kNounFem, kAdjective };

struct Paradigm {
  WordClass cls;
  std::string stem;
  std::string lemma;
  std::vector<std::string> forms;
};

constexpr std::array<const char*, 14> kOnsets{"b", "c", "d", "f", "g", "l", "m",
                                               "n", "p", "r", "s", "t", "v", "ch"};
constexpr std::array<const char*, 5> kVowels{"a", "e", "i", "o", "u"};
constexpr std::array<const char*, 6> kCodas{"", "", "r", "l", "n", "s"};

std::string make_stem(Rng& rng) {
  std::string s;
  const int syllables = 2 + static_cast<int>(rng.below(2));
  for (int i = 0; i < syllables; ++i) {
    s += kOnsets[rng.below(kOnsets.size())];
    s += kVowels[rng.below(kVowels.size())];
    if (i + 1 < syllables) s += kCodas[rng.below(kCodas.size())];
  }
  return s;
}

Paradigm make_paradigm(WordClass cls, const std::string& stem) {
  Paradigm p{cls, stem, {}, {}};
  auto add = [&](std::initializer_list<const char*> endings) {
    for (const char* e : endings) p.forms.push_back(stem + e);
  };
  switch (cls) {
    case WordClass::kVerbAr:
      p.lemma = stem + "ar";
      add({"ar", "a", "an", "et", "at", "ava", "avan", "arai"});
      break;
    case WordClass::kVerbIr:
      p.lemma = stem + "ir";
      add({"ir", "is", "iso", "it", "ia", "ira"});
      break;
    case WordClass::kNounMasc:
      p.lemma = stem;
      add({"", "s"});
      break;
    case WordClass::kNounFem:
      p.lemma = stem + "a";
      add({"a", "as"});
      break;
    case WordClass::kAdjective:
      p.lemma = stem;
      add({"", "s", "a", "as"});
      break;
  }
  return p;
}

struct Closed {
  const char* surface;
  const char* lemma;
};

constexpr std::array<Closed, 6> kDeterminers{{{"lo", "lo"}, {"la", "lo"}, {"los", "lo"},
                                              {"las", "lo"}, {"un", "un"}, {"una", "un"}}};
constexpr std::array<Closed, 6> kLinks{{{"e", "e"}, {"de", "de"}, {"en", "en"},
                                        {"per", "per"}, {"que", "que"}, {"a", "a"}}};

}  // namespace

std::vector<AnnotatedSentence> morphology_corpus(const MorphologyOptions& options) {
  Rng lex_rng(options.lexicon_seed);
  std::vector<Paradigm> lexicon;
  std::set<std::string> stems;
  const std::array<WordClass, 5> classes{WordClass::kVerbAr, WordClass::kVerbIr,
                                         WordClass::kNounMasc, WordClass::kNounFem,
                                         WordClass::kAdjective};
  while (lexicon.size() < options.n_lemmas) {
    const auto stem = make_stem(lex_rng);
    if (!stems.insert(stem).second) continue;
    lexicon.push_back(make_paradigm(classes[lexicon.size() % classes.size()], stem));
  }
  std::array<std::vector<std::size_t>, 5> by_class;
  std::array<std::vector<double>, 5> weights;
  for (std::size_t i = 0; i < lexicon.size(); ++i) {
    const auto c = static_cast<std::size_t>(lexicon[i].cls);
    by_class[c].push_back(i);
    weights[c].push_back(1.0 / std::pow(static_cast<double>(by_class[c].size()), options.zipf_exponent));
  }
  Rng rng(mix_seed(options.seed, options.lexicon_seed));
  auto pick = [&](WordClass cls) -> const Paradigm& {
    const auto c = static_cast<std::size_t>(cls);
    double total = 0.0;
    for (double w : weights[c]) total += w;
    double u = rng.uniform() * total;
    for (std::size_t k = 0; k < weights[c].size(); ++k) {
      u -= weights[c][k];
      if (u < 0) return lexicon[by_class[c][k]];
    }
    return lexicon[by_class[c].back()];
  };

  std::vector<AnnotatedSentence> out;
  std::size_t tokens = 0;
  while (tokens < options.n_tokens) {
    AnnotatedSentence s;
    auto push = [&](const std::string& surface, const std::string& lemma) {
      s.surfaces.push_back(surface);
      s.lemmas.push_back(lemma);
    };
    auto closed = [&](const auto& table) {
      const auto& c = table[rng.below(table.size())];
      push(c.surface, c.lemma);
    };
    auto open = [&](WordClass cls) {
      const auto& p = pick(cls);
      push(p.forms[rng.below(p.forms.size())], p.lemma);
    };
    auto noun_phrase = [&] {
      closed(kDeterminers);
      open(rng.below(2) == 0 ? WordClass::kNounMasc : WordClass::kNounFem);
      if (rng.below(3) == 0) open(WordClass::kAdjective);
    };
    noun_phrase();
    open(rng.below(2) == 0 ? WordClass::kVerbAr : WordClass::kVerbIr);
    noun_phrase();
    if (rng.below(2) == 0) {
      closed(kLinks);
      noun_phrase();
    }
    tokens += s.surfaces.size();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> flatten_surfaces(const std::vector<AnnotatedSentence>& sentences) {
  std::vector<std::string> out;
  for (const auto& s : sentences) out.insert(out.end(), s.surfaces.begin(), s.surfaces.end());
  return out;
}

}  // namespace scriptorium::synth
