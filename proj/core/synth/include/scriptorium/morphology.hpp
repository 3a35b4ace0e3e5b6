// core/synth/include/scriptorium/morphology.hpp

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
#include <vector>

// Synthetic annotated corpus with regular inflectional paradigms, used to
// benchmark lemmatization on forms never seen in training.
namespace scriptorium::synth {

struct AnnotatedSentence {
  std::vector<std::string> surfaces;
  std::vector<std::string> lemmas;
};

struct MorphologyOptions {
  std::size_t n_lemmas = 150;   // open-class lemmas
  std::size_t n_tokens = 12000;
  double zipf_exponent = 0.8;   // lemma frequency skew
  uint64_t lexicon_seed = 1;   // stems and paradigms
  uint64_t seed = 1;           // sentence sampling
};

std::vector<AnnotatedSentence> morphology_corpus(const MorphologyOptions& options);

// Word stream for the unannotated secondary corpus (same lexicon).
std::vector<std::string> flatten_surfaces(const std::vector<AnnotatedSentence>& sentences);

}  // namespace scriptorium::synth
