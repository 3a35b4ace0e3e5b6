// core/include/scriptorium/structurer.hpp

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
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "scriptorium/tei.hpp"

namespace scriptorium::structurer {

struct TokenizerRules {
  // Characters split off word edges as <pc> tokens.
  std::u32string punctuation = U".,;:!?·()[]{}«»\"/¶";
  // An apostrophe inside or at the end of a word marks elision: "qu'ac"
  // gives the words "qu" and "ac"; the apostrophe goes to Token::trailing.
  bool split_elision = true;
  std::u32string apostrophes = U"'’";
  bool detect_numerals = true;
};

// Uppercase I, V, X, L, C, M only. D is left out: in the account books it
// is far more often an initial than 500.
bool is_roman_numeral(std::string_view word);

// Whitespace- and punctuation-based tokenization. For every result,
// text[0, first.offset) + sum(surface + trailing) == text.
std::vector<tei::Token> tokenize(std::string_view text, const TokenizerRules& rules = {});

struct IdOptions {
  std::string prefix = "w";
  uint64_t start = 1;
  int pad = 6;
  bool force = false;
};

// Numbers <w> elements in document order as prefix_NNNNNN. Throws when a
// <w> already has an id (unless force) or a new id collides with an id
// used elsewhere in the document.
void assign_ids(tei::Document& doc, const IdOptions& options);

// Replaces running text inside non-token elements with <w>/<pc> elements,
// keeping existing tokens, one token per line.
void segment_document(tei::Document& doc, const TokenizerRules& rules = {});

enum class PatternKind { kFolio, kStanza, kVerse, kLine };

struct Pattern {
  PatternKind kind;
  std::string source;
  std::regex regex;
};

// kFolio: every match becomes <pb n="$1"/> and is removed from the text.
// kStanza: lines matching the pattern separate <lg> groups.
// kVerse: matching lines become <l> elements.
// kLine: matching lines are preceded by <lb/>.
struct PatternSet {
  std::vector<Pattern> patterns;

  // Throws ValidationError naming the pattern when it does not compile.
  void add(PatternKind kind, const std::string& source);
  // `kind TAB regex` per line; kinds: folio, stanza, verse, line.
  static PatternSet parse(std::string_view text);
  bool empty() const { return patterns.empty(); }
};

tei::Document pre_encode(std::string_view raw_text, const PatternSet& patterns,
                         const TokenizerRules& rules = {});

}  // namespace scriptorium::structurer
