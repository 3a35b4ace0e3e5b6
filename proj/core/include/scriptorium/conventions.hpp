// core/include/scriptorium/conventions.hpp

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

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

// Transcription conventions: the declared character inventory, the
// allograph -> grapheme map and abbreviation rules.
//
// Profile files are UTF-8, one declaration per line, fields separated by
// TAB, '#' starts a comment line:
//
//   a b c            characters (each code point is declared; U+XXXX allowed)
//   char<TAB>abc     same, with an explicit keyword
//   ſ<TAB>s          allograph -> grapheme
//   allograph<TAB>ſ<TAB>s
//   abbrev<TAB>õ<TAB>on
//
// In abbreviation patterns '?' matches any single character; a '?' in the
// expansion copies the character matched by the corresponding wildcard.
namespace scriptorium::conventions {

struct AbbreviationRule {
  std::u32string pattern;
  std::u32string expansion;
  int line = 0;  // declaration line in the profile file

  // Length of the match at `pos`, or 0.
  std::size_t match(std::u32string_view text, std::size_t pos) const;
};

struct ConventionProfile {
  std::set<char32_t> inventory;
  std::map<char32_t, char32_t> allograph_map;
  std::vector<AbbreviationRule> rules;  // declared order

  bool contains(char32_t c) const { return inventory.contains(c); }
  // Inventory as UTF-8 symbols, in code point order.
  std::vector<std::string> symbols() const;
};

ConventionProfile parse_profile(std::string_view text);
ConventionProfile load_profile(const std::filesystem::path& path);

// Applies the allograph map character-wise. Throws ValidationError naming
// the first character outside the inventory and its code point offset.
std::string to_graphematic(std::string_view text, const ConventionProfile& profile);

struct RuleSpan {
  std::size_t observed_begin = 0;  // code point offsets
  std::size_t observed_end = 0;
  std::size_t interpreted_begin = 0;
  std::size_t interpreted_end = 0;
  std::size_t rule = 0;  // index into profile.rules

  bool operator==(const RuleSpan&) const = default;
};

struct DualText {
  std::string observed;
  std::string interpreted;
  std::vector<RuleSpan> spans;
};

// Single left-to-right pass; at each position the longest matching rule
// wins, ties go to the rule declared first.
DualText expand_abbreviations(std::string_view text, const ConventionProfile& profile);

// Rebuilds the observed text from `interpreted` and the spans.
std::string restore_observed(const DualText& dual);

struct Violation {
  std::size_t offset = 0;  // code points
  std::string character;

  bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_transcription(std::string_view text,
                                              const ConventionProfile& profile);

}  // namespace scriptorium::conventions
