// core/src/conventions.cpp

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

#include "scriptorium/conventions.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/unicode.hpp"

namespace scriptorium::conventions {
namespace {

constexpr char32_t kWildcard = U'?';

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.emplace_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \r");
  return std::string(s.substr(b, e - b + 1));
}

// "U+017F" or a literal string; returns its code points.
std::u32string decode_symbols(const std::string& token, int line) {
  if (token.size() > 2 && (token[0] == 'U' || token[0] == 'u') && token[1] == '+') {
    try {
      std::size_t used = 0;
      const unsigned long cp = std::stoul(token.substr(2), &used, 16);
      if (used == token.size() - 2 && cp <= 0x10FFFF) {
        return std::u32string(1, static_cast<char32_t>(cp));
      }
    } catch (const std::exception&) {
    }
    throw ParseError("bad code point notation '" + token + "'", line, 1);
  }
  return unicode::to_u32(unicode::nfc(token));
}

char32_t single_symbol(const std::string& field, int line, const char* what) {
  const auto s = decode_symbols(trim(field), line);
  if (s.size() != 1) {
    throw ParseError(std::string(what) + " must be a single character, got '" + field + "'",
                     line, 1);
  }
  return s[0];
}

bool matches_expansion(const AbbreviationRule& rule, std::u32string_view text) {
  // Wildcards in `text` may stand for any character.
  const auto& p = rule.pattern;
  if (p.size() > text.size()) return false;
  for (std::size_t i = 0; i + p.size() <= text.size(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < p.size() && ok; ++k) {
      ok = p[k] == kWildcard || text[i + k] == kWildcard || p[k] == text[i + k];
    }
    if (ok) return true;
  }
  return false;
}

void check_cycles(const std::vector<AbbreviationRule>& rules) {
  const std::size_t n = rules.size();
  std::vector<std::vector<std::size_t>> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (matches_expansion(rules[j], rules[i].expansion)) edges[i].push_back(j);
    }
  }
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    state[v] = 1;
    for (auto w : edges[v]) {
      if (state[w] == 1) {
        throw ValidationError("profile line " + std::to_string(rules[v].line) +
                              ": cyclic abbreviation expansion (rule '" +
                              unicode::to_utf8(rules[v].pattern) + "' produces text matched by '" +
                              unicode::to_utf8(rules[w].pattern) + "')");
      }
      if (state[w] == 0) visit(w);
    }
    state[v] = 2;
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (state[v] == 0) visit(v);
  }
}

}  // namespace

std::size_t AbbreviationRule::match(std::u32string_view text, std::size_t pos) const {
  if (pattern.empty() || pos + pattern.size() > text.size()) return 0;
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    if (pattern[k] != kWildcard && pattern[k] != text[pos + k]) return 0;
  }
  return pattern.size();
}

std::vector<std::string> ConventionProfile::symbols() const {
  std::vector<std::string> out;
  out.reserve(inventory.size());
  for (char32_t c : inventory) out.push_back(unicode::to_utf8(c));
  return out;
}

ConventionProfile parse_profile(std::string_view text) {
  ConventionProfile profile;
  struct Mapping {
    char32_t from, to;
    int line;
  };
  std::vector<Mapping> mappings;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (trim(raw).empty() || trim(raw)[0] == '#') continue;
    auto fields = split_tabs(raw);
    std::string keyword;
    if (fields.size() >= 2 && (fields[0] == "char" || fields[0] == "allograph" ||
                               fields[0] == "abbrev")) {
      keyword = fields[0];
      fields.erase(fields.begin());
    } else if (fields.size() == 1) {
      keyword = "char";
    } else if (fields.size() == 2) {
      keyword = "allograph";
    } else {
      throw ParseError("unrecognized declaration", line_no, 1);
    }

    if (keyword == "char") {
      if (fields.size() != 1) throw ParseError("char takes one field", line_no, 1);
      std::istringstream words(fields[0]);
      std::string word;
      bool any = false;
      while (words >> word) {
        for (char32_t c : decode_symbols(word, line_no)) profile.inventory.insert(c);
        any = true;
      }
      if (!any) throw ParseError("empty character declaration", line_no, 1);
    } else if (keyword == "allograph") {
      if (fields.size() != 2) throw ParseError("allograph takes two fields", line_no, 1);
      const char32_t from = single_symbol(fields[0], line_no, "allograph");
      const char32_t to = single_symbol(fields[1], line_no, "grapheme");
      if (profile.allograph_map.contains(from)) {
        throw ValidationError("profile line " + std::to_string(line_no) +
                              ": duplicate allograph '" + unicode::to_utf8(from) + "'");
      }
      profile.allograph_map[from] = to;
      profile.inventory.insert(from);
      mappings.push_back({from, to, line_no});
    } else {
      if (fields.size() != 2) throw ParseError("abbrev takes a pattern and an expansion", line_no, 1);
      AbbreviationRule rule;
      rule.pattern = unicode::to_u32(unicode::nfc(fields[0]));
      rule.expansion = unicode::to_u32(unicode::nfc(fields[1]));
      rule.line = line_no;
      if (rule.pattern.empty()) throw ParseError("empty abbreviation pattern", line_no, 1);
      const auto wild = std::count(rule.pattern.begin(), rule.pattern.end(), kWildcard);
      if (std::count(rule.expansion.begin(), rule.expansion.end(), kWildcard) > wild) {
        throw ValidationError("profile line " + std::to_string(line_no) +
                              ": expansion uses more wildcards than the pattern");
      }
      profile.rules.push_back(std::move(rule));
    }
  }

  if (profile.inventory.empty()) throw ValidationError("profile declares an empty inventory");
  for (const auto& m : mappings) {
    if (!profile.contains(m.to)) {
      throw ValidationError("profile line " + std::to_string(m.line) + ": grapheme '" +
                            unicode::to_utf8(m.to) + "' is not in the inventory");
    }
    if (profile.allograph_map.contains(m.to)) {
      throw ValidationError("profile line " + std::to_string(m.line) + ": grapheme '" +
                            unicode::to_utf8(m.to) + "' is itself an allograph");
    }
  }
  for (const auto& r : profile.rules) {
    for (const auto* part : {&r.pattern, &r.expansion}) {
      for (char32_t c : *part) {
        if (c != kWildcard && !profile.contains(c)) {
          throw ValidationError("profile line " + std::to_string(r.line) + ": character '" +
                                unicode::to_utf8(c) + "' is not in the inventory");
        }
      }
    }
  }
  check_cycles(profile.rules);
  return profile;
}

ConventionProfile load_profile(const std::filesystem::path& path) {
  return parse_profile(read_file(path));
}

std::string to_graphematic(std::string_view text, const ConventionProfile& profile) {
  const auto cps = unicode::to_u32(unicode::nfc(text));
  std::u32string out;
  out.reserve(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (!profile.contains(c)) {
      throw ValidationError("character '" + unicode::to_utf8(c) + "' at offset " +
                            std::to_string(i) + " is not in the inventory");
    }
    const auto it = profile.allograph_map.find(c);
    out.push_back(it == profile.allograph_map.end() ? c : it->second);
  }
  return unicode::to_utf8(out);
}

DualText expand_abbreviations(std::string_view text, const ConventionProfile& profile) {
  DualText dual;
  dual.observed = unicode::nfc(text);
  const auto in = unicode::to_u32(dual.observed);
  std::u32string out;
  std::size_t pos = 0;
  while (pos < in.size()) {
    std::size_t best_len = 0, best_rule = 0;
    for (std::size_t r = 0; r < profile.rules.size(); ++r) {
      const auto len = profile.rules[r].match(in, pos);
      if (len > best_len) {
        best_len = len;
        best_rule = r;
      }
    }
    if (best_len == 0) {
      out.push_back(in[pos++]);
      continue;
    }
    const auto& rule = profile.rules[best_rule];
    std::u32string captured;
    for (std::size_t k = 0; k < rule.pattern.size(); ++k) {
      if (rule.pattern[k] == kWildcard) captured.push_back(in[pos + k]);
    }
    RuleSpan span;
    span.observed_begin = pos;
    span.observed_end = pos + best_len;
    span.interpreted_begin = out.size();
    span.rule = best_rule;
    std::size_t next_capture = 0;
    for (char32_t c : rule.expansion) {
      out.push_back(c == kWildcard ? captured[next_capture++] : c);
    }
    span.interpreted_end = out.size();
    dual.spans.push_back(span);
    pos += best_len;
  }
  dual.interpreted = unicode::to_utf8(out);
  return dual;
}

std::string restore_observed(const DualText& dual) {
  const auto interp = unicode::to_u32(dual.interpreted);
  const auto obs = unicode::to_u32(dual.observed);
  std::u32string out;
  std::size_t pos = 0;
  for (const auto& s : dual.spans) {
    if (s.interpreted_begin < pos || s.interpreted_end > interp.size() ||
        s.observed_end > obs.size() || s.interpreted_begin > s.interpreted_end) {
      throw ValidationError("restore_observed: spans out of order or out of range");
    }
    out.append(interp, pos, s.interpreted_begin - pos);
    out.append(obs, s.observed_begin, s.observed_end - s.observed_begin);
    pos = s.interpreted_end;
  }
  out.append(interp, pos, std::u32string::npos);
  return unicode::to_utf8(out);
}

std::vector<Violation> validate_transcription(std::string_view text,
                                              const ConventionProfile& profile) {
  std::vector<Violation> out;
  const auto cps = unicode::to_u32(unicode::nfc(text));
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (!profile.contains(cps[i])) out.push_back({i, unicode::to_utf8(cps[i])});
  }
  return out;
}

}  // namespace scriptorium::conventions
