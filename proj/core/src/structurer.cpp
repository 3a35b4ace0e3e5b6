// core/src/structurer.cpp

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

#include "scriptorium/structurer.hpp"

#include <set>
#include <sstream>

#include "scriptorium/corpus.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/unicode.hpp"

namespace scriptorium::structurer {
namespace {

using tei::Node;

bool contains(const std::u32string& set, char32_t c) {
  return set.find(c) != std::u32string::npos;
}

// Byte offset of every code point, plus the total length at the end.
std::vector<std::size_t> byte_offsets(std::string_view text, std::size_t n_cps) {
  std::vector<std::size_t> off;
  off.reserve(n_cps + 1);
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) off.push_back(i);
  }
  off.push_back(text.size());
  return off;
}

bool is_blank(std::string_view s) {
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') return false;
  }
  return true;
}

std::string strip_space(std::string_view s) {
  std::string out;
  for (char32_t c : unicode::to_u32(s)) {
    if (!unicode::is_space(c)) out += unicode::to_utf8(c);
  }
  return out;
}

void append_child(Node& parent, Node child) {
  if (parent.children.empty()) parent.children.push_back(Node::text_node("\n"));
  parent.children.push_back(std::move(child));
  parent.children.push_back(Node::text_node("\n"));
}

void append_tokens(Node& parent, std::string_view text, const TokenizerRules& rules) {
  for (const auto& t : tokenize(text, rules)) {
    append_child(parent, tei::to_node(t));
    const auto extra = strip_space(t.trailing);
    if (!extra.empty()) parent.children.back().text = extra + "\n";
  }
}

bool segmentable(const Node& n) {
  static const std::set<std::string, std::less<>> kNames{
      "TEI", "text", "body", "div", "p", "ab", "item", "lg", "l", "seg"};
  return n.kind == tei::NodeKind::kElement && kNames.contains(n.name);
}

void segment_node(Node& n, const TokenizerRules& rules) {
  std::vector<Node> old = std::move(n.children);
  n.children.clear();
  for (auto& c : old) {
    if (c.kind == tei::NodeKind::kText) {
      append_tokens(n, c.text, rules);
    } else {
      if (segmentable(c)) segment_node(c, rules);
      append_child(n, std::move(c));
    }
  }
}

const char* kind_name(PatternKind k) {
  switch (k) {
    case PatternKind::kFolio: return "folio";
    case PatternKind::kStanza: return "stanza";
    case PatternKind::kVerse: return "verse";
    case PatternKind::kLine: return "line";
  }
  return "?";
}

bool any_match(const PatternSet& set, PatternKind kind, const std::string& line) {
  for (const auto& p : set.patterns) {
    if (p.kind == kind && std::regex_search(line, p.regex)) return true;
  }
  return false;
}

bool has_kind(const PatternSet& set, PatternKind kind) {
  for (const auto& p : set.patterns) {
    if (p.kind == kind) return true;
  }
  return false;
}

// Splits a line into text pieces and <pb/> nodes at folio markers.
std::vector<Node> split_folios(const std::string& line, const PatternSet& set) {
  std::vector<Node> out;
  std::string rest = line;
  while (true) {
    std::smatch best;
    bool found = false;
    for (const auto& p : set.patterns) {
      if (p.kind != PatternKind::kFolio) continue;
      std::smatch m;
      if (std::regex_search(rest, m, p.regex) &&
          (!found || m.position(0) < best.position(0))) {
        best = m;
        found = true;
      }
    }
    if (!found || best.length(0) == 0) break;
    out.push_back(Node::text_node(rest.substr(0, static_cast<std::size_t>(best.position(0)))));
    Node pb = Node::element("pb");
    pb.set_attr("n", best.size() > 1 && best[1].matched ? best[1].str() : best[0].str());
    out.push_back(std::move(pb));
    rest = best.suffix().str();
  }
  out.push_back(Node::text_node(rest));
  return out;
}

}  // namespace

bool is_roman_numeral(std::string_view word) {
  if (word.empty()) return false;
  for (char c : word) {
    if (c != 'I' && c != 'V' && c != 'X' && c != 'L' && c != 'C' && c != 'M') return false;
  }
  return true;
}

std::vector<tei::Token> tokenize(std::string_view text, const TokenizerRules& rules) {
  const auto cps = unicode::to_u32(text);
  const auto off = byte_offsets(text, cps.size());
  std::vector<tei::Token> out;
  struct Span {
    std::size_t b, e;
    tei::TokenKind kind;
  };
  std::vector<Span> spans;
  const std::size_t n = cps.size();
  std::size_t i = 0;
  while (i < n) {
    if (unicode::is_space(cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && !unicode::is_space(cps[j])) ++j;
    std::size_t a = i, b = j;
    while (a < b && contains(rules.punctuation, cps[a])) {
      spans.push_back({a, a + 1, tei::TokenKind::kPunct});
      ++a;
    }
    std::size_t trail_begin = b;
    while (trail_begin > a && contains(rules.punctuation, cps[trail_begin - 1])) --trail_begin;
    b = trail_begin;
    while (a < b) {
      std::size_t k = a + 1;
      if (rules.split_elision) {
        while (k < b && !contains(rules.apostrophes, cps[k])) ++k;
      } else {
        k = b;
      }
      spans.push_back({a, k, tei::TokenKind::kWord});
      a = k < b ? k + 1 : b;  // skip the elision apostrophe
    }
    for (std::size_t t = trail_begin; t < j; ++t) {
      spans.push_back({t, t + 1, tei::TokenKind::kPunct});
    }
    i = j;
  }
  for (std::size_t s = 0; s < spans.size(); ++s) {
    tei::Token t;
    t.kind = spans[s].kind;
    t.offset = off[spans[s].b];
    t.surface = std::string(text.substr(t.offset, off[spans[s].e] - t.offset));
    const std::size_t next = s + 1 < spans.size() ? off[spans[s + 1].b] : text.size();
    t.trailing = std::string(text.substr(off[spans[s].e], next - off[spans[s].e]));
    t.numeral = rules.detect_numerals && t.kind == tei::TokenKind::kWord &&
                is_roman_numeral(t.surface);
    out.push_back(std::move(t));
  }
  return out;
}

void assign_ids(tei::Document& doc, const IdOptions& options) {
  std::set<std::string> others;
  bool any_assigned = false;
  tei::for_each_element(doc, [&](const Node& n) {
    const auto* id = n.attr("xml:id");
    if (!id) return;
    if (n.is_element("w")) {
      any_assigned = true;
    } else {
      others.insert(*id);
    }
  });
  if (any_assigned && !options.force) {
    throw ValidationError("assign_ids: document already has word ids (use force to renumber)");
  }
  uint64_t next = options.start;
  tei::for_each_token(doc, [&](Node& n) {
    if (!n.is_element("w")) return;
    std::string id = options.prefix + "_" + format_id(next++, options.pad);
    if (others.contains(id)) {
      throw ValidationError("assign_ids: id " + id + " collides with an existing id");
    }
    n.set_attr("xml:id", std::move(id));
  });
}

void segment_document(tei::Document& doc, const TokenizerRules& rules) {
  for (auto& n : doc.nodes) {
    if (segmentable(n)) segment_node(n, rules);
  }
}

void PatternSet::add(PatternKind kind, const std::string& source) {
  try {
    patterns.push_back({kind, source, std::regex(source, std::regex::ECMAScript)});
  } catch (const std::regex_error& e) {
    throw ValidationError(std::string("invalid ") + kind_name(kind) + " pattern '" + source +
                          "': " + e.what());
  }
}

PatternSet PatternSet::parse(std::string_view text) {
  PatternSet set;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line) || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ValidationError("patterns line " + std::to_string(line_no) + ": expected kind<TAB>regex");
    }
    const auto kind = line.substr(0, tab);
    PatternKind k;
    if (kind == "folio") k = PatternKind::kFolio;
    else if (kind == "stanza") k = PatternKind::kStanza;
    else if (kind == "verse") k = PatternKind::kVerse;
    else if (kind == "line") k = PatternKind::kLine;
    else throw ValidationError("patterns line " + std::to_string(line_no) + ": unknown kind '" + kind + "'");
    set.add(k, line.substr(tab + 1));
  }
  return set;
}

tei::Document pre_encode(std::string_view raw_text, const PatternSet& patterns,
                         const TokenizerRules& rules) {
  Node item = Node::element("item");
  const bool stanzas = has_kind(patterns, PatternKind::kStanza);
  Node lg = Node::element("lg");
  bool lg_open = false;
  auto close_lg = [&] {
    if (lg_open) append_child(item, std::move(lg));
    lg = Node::element("lg");
    lg_open = false;
  };

  std::istringstream in{std::string(raw_text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (stanzas && any_match(patterns, PatternKind::kStanza, line)) {
      close_lg();
      continue;
    }
    const auto pieces = split_folios(line, patterns);
    bool has_text = false;
    for (const auto& p : pieces) {
      if (p.kind == tei::NodeKind::kText && !is_blank(p.text)) has_text = true;
    }
    if (!has_text && pieces.size() == 1) continue;  // blank line

    Node* container = &item;
    if (stanzas && (has_text || lg_open)) {
      lg_open = true;
      container = &lg;
    }
    const bool verse = has_text && any_match(patterns, PatternKind::kVerse, line);
    const bool lb = has_text && !verse && any_match(patterns, PatternKind::kLine, line);
    if (lb) append_child(*container, Node::element("lb"));
    Node l = Node::element("l");
    Node& target = verse ? l : *container;
    for (const auto& p : pieces) {
      if (p.kind == tei::NodeKind::kText) {
        append_tokens(target, p.text, rules);
      } else {
        append_child(has_text ? target : *container, p);
      }
    }
    if (verse) append_child(*container, std::move(l));
  }
  close_lg();
  tei::Document doc;
  doc.nodes.push_back(std::move(item));
  doc.nodes.push_back(Node::text_node("\n"));
  return doc;
}

}  // namespace scriptorium::structurer
