// core/src/tei.cpp

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

#include "scriptorium/tei.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "scriptorium/error.hpp"
#include "scriptorium/unicode.hpp"

namespace scriptorium::tei {
namespace {

constexpr std::array<std::string_view, 7> kAttributeOrder{
    "lemma", "n", "xml:id", "lemmaRef", "source", "type", "cert"};

bool attribute_less(std::string_view a, std::string_view b) {
  const int ra = attribute_rank(a), rb = attribute_rank(b);
  if (ra != rb) return ra < rb;
  return a < b;
}

bool is_name_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == ':' || c == '-' || c == '.' || c >= 0x80;
}

bool is_xml_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

class Parser {
 public:
  explicit Parser(std::string_view in) : in_(in) {}

  Document parse() {
    Document doc;
    parse_content(doc.nodes, nullptr);
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < in_.size(); ++i) {
      if (in_[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(in_[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
    throw ParseError("XML: " + msg, line, col);
  }

  bool starts_with(std::string_view s) const { return in_.substr(pos_).starts_with(s); }

  std::size_t find_or_fail(std::string_view s, const char* what) {
    const auto at = in_.find(s, pos_);
    if (at == std::string_view::npos) fail(std::string("unterminated ") + what, pos_);
    return at;
  }

  static void append_text(std::vector<Node>& out, std::string text) {
    if (text.empty()) return;
    if (!out.empty() && out.back().kind == NodeKind::kText) {
      out.back().text += text;
    } else {
      out.push_back(Node::text_node(std::move(text)));
    }
  }

  // Parses until the matching end tag of `open` (or end of input at top level).
  void parse_content(std::vector<Node>& out, const Node* open) {
    while (pos_ < in_.size()) {
      if (in_[pos_] != '<') {
        const auto next = std::min(in_.find('<', pos_), in_.size());
        append_text(out, decode(in_.substr(pos_, next - pos_), pos_));
        pos_ = next;
        continue;
      }
      if (starts_with("</")) {
        if (open == nullptr) fail("unexpected end tag", pos_);
        const std::size_t at = pos_;
        pos_ += 2;
        const auto name = read_name();
        skip_space();
        if (pos_ >= in_.size() || in_[pos_] != '>') fail("malformed end tag", pos_);
        ++pos_;
        if (name != open->name) {
          fail("end tag </" + name + "> does not match <" + open->name + ">", at);
        }
        return;
      }
      if (starts_with("<!--")) {
        const auto end = (pos_ += 4, find_or_fail("-->", "comment"));
        Node c;
        c.kind = NodeKind::kComment;
        c.text = std::string(in_.substr(pos_, end - pos_));
        out.push_back(std::move(c));
        pos_ = end + 3;
        continue;
      }
      if (starts_with("<![CDATA[")) {
        const auto end = (pos_ += 9, find_or_fail("]]>", "CDATA section"));
        append_text(out, std::string(in_.substr(pos_, end - pos_)));
        pos_ = end + 3;
        continue;
      }
      if (starts_with("<?") || starts_with("<!")) {
        const bool pi = starts_with("<?");
        const auto end = find_or_fail(pi ? "?>" : ">", pi ? "processing instruction" : "declaration");
        Node d;
        d.kind = NodeKind::kDeclaration;
        d.text = std::string(in_.substr(pos_ + 1, end + (pi ? 1 : 0) - pos_ - 1));
        out.push_back(std::move(d));
        pos_ = end + (pi ? 2 : 1);
        continue;
      }
      out.push_back(parse_element());
    }
    if (open != nullptr) fail("missing end tag for <" + open->name + ">", in_.size());
  }

  Node parse_element() {
    const std::size_t start = pos_;
    ++pos_;  // '<'
    Node el = Node::element(read_name());
    if (el.name.empty()) fail("expected element name", start + 1);
    while (true) {
      const bool spaced = skip_space();
      if (pos_ >= in_.size()) fail("unterminated start tag <" + el.name + ">", start);
      if (starts_with("/>")) {
        pos_ += 2;
        return el;
      }
      if (in_[pos_] == '>') {
        ++pos_;
        parse_content(el.children, &el);
        return el;
      }
      if (!spaced) fail("expected whitespace before attribute", pos_);
      const std::size_t attr_at = pos_;
      const auto key = read_name();
      if (key.empty()) fail("expected attribute name", pos_);
      skip_space();
      if (pos_ >= in_.size() || in_[pos_] != '=') fail("expected '=' after attribute " + key, pos_);
      ++pos_;
      skip_space();
      if (pos_ >= in_.size() || (in_[pos_] != '"' && in_[pos_] != '\'')) {
        fail("attribute value must be quoted", pos_);
      }
      const char quote = in_[pos_++];
      const auto end = in_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value", attr_at);
      const auto raw = in_.substr(pos_, end - pos_);
      if (raw.find('<') != std::string_view::npos) fail("'<' in attribute value", pos_);
      if (el.attr(key) != nullptr) fail("duplicate attribute " + key, attr_at);
      el.set_attr(key, decode(raw, pos_));
      pos_ = end + 1;
    }
  }

  std::string read_name() {
    const std::size_t b = pos_;
    while (pos_ < in_.size() && is_name_char(static_cast<unsigned char>(in_[pos_]))) ++pos_;
    return std::string(in_.substr(b, pos_ - b));
  }

  bool skip_space() {
    const std::size_t b = pos_;
    while (pos_ < in_.size() && is_xml_space(in_[pos_])) ++pos_;
    return pos_ > b;
  }

  std::string decode(std::string_view raw, std::size_t base) const {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      const auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity reference", base + i);
      const auto ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "amp") out += '&';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else if (ent.size() > 1 && ent[0] == '#') {
        const bool hex = ent[1] == 'x' || ent[1] == 'X';
        const auto digits = ent.substr(hex ? 2 : 1);
        unsigned long cp = 0;
        if (digits.empty()) fail("bad character reference", base + i);
        for (char d : digits) {
          const int v = std::isdigit(static_cast<unsigned char>(d)) ? d - '0'
                        : hex && std::isxdigit(static_cast<unsigned char>(d))
                            ? std::tolower(static_cast<unsigned char>(d)) - 'a' + 10
                            : -1;
          if (v < 0) fail("bad character reference", base + i);
          cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(v);
          if (cp > 0x10FFFF) fail("character reference out of range", base + i);
        }
        out += unicode::to_utf8(static_cast<char32_t>(cp));
      } else {
        fail("unknown entity &" + std::string(ent) + ";", base + i);
      }
      i = semi;
    }
    return out;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

void emit_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::kText:
      out += escape_text(n.text);
      return;
    case NodeKind::kComment:
      out += "<!--" + n.text + "-->";
      return;
    case NodeKind::kDeclaration:
      out += "<" + n.text + ">";
      return;
    case NodeKind::kElement:
      break;
  }
  out += '<';
  out += n.name;
  for (const auto& [k, v] : n.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape_attribute(v);
    out += '"';
  }
  if (n.children.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  for (const auto& c : n.children) emit_node(c, out);
  out += "</" + n.name + ">";
}

template <typename NodeT, typename Fn>
void walk_tokens(NodeT& n, const Fn& fn) {
  if (n.kind != NodeKind::kElement) return;
  if (is_token_element(n)) {
    fn(n);
    return;
  }
  for (auto& c : n.children) walk_tokens(c, fn);
}

void walk_elements(const Node& n, const std::function<void(const Node&)>& fn) {
  if (n.kind != NodeKind::kElement) return;
  fn(n);
  for (const auto& c : n.children) walk_elements(c, fn);
}

}  // namespace

Node Node::element(std::string name) {
  Node n;
  n.kind = NodeKind::kElement;
  n.name = std::move(name);
  return n;
}

Node Node::text_node(std::string text) {
  Node n;
  n.kind = NodeKind::kText;
  n.text = std::move(text);
  return n;
}

const std::string* Node::attr(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

void Node::set_attr(const std::string& key, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  auto it = std::find_if(attributes.begin(), attributes.end(),
                         [&](const auto& kv) { return attribute_less(key, kv.first); });
  attributes.insert(it, {key, std::move(value)});
}

bool Node::remove_attr(std::string_view key) {
  auto it = std::find_if(attributes.begin(), attributes.end(),
                         [&](const auto& kv) { return kv.first == key; });
  if (it == attributes.end()) return false;
  attributes.erase(it);
  return true;
}

std::string Node::text_content() const {
  if (kind == NodeKind::kText) return text;
  std::string out;
  if (kind == NodeKind::kElement) {
    for (const auto& c : children) out += c.text_content();
  }
  return out;
}

int attribute_rank(std::string_view key) {
  for (std::size_t i = 0; i < kAttributeOrder.size(); ++i) {
    if (kAttributeOrder[i] == key) return static_cast<int>(i);
  }
  return static_cast<int>(kAttributeOrder.size());
}

std::string Document::id() const {
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::kElement) {
      const auto* v = n.attr("xml:id");
      return v ? *v : std::string();
    }
  }
  return {};
}

Document parse_tei(std::string_view xml) { return Parser(xml).parse(); }

std::string emit_tei(const Document& doc) {
  std::string out;
  for (const auto& n : doc.nodes) emit_node(n, out);
  return out;
}

std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_attribute(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

bool is_token_element(const Node& n) { return n.is_element("w") || n.is_element("pc"); }

Token to_token(const Node& n) {
  Token t;
  t.kind = n.is_element("pc") ? TokenKind::kPunct : TokenKind::kWord;
  t.surface = n.text_content();
  if (const auto* v = n.attr("xml:id")) t.id = *v;
  if (const auto* v = n.attr("lemma")) t.lemma = *v;
  if (const auto* v = n.attr("lemmaRef")) t.lemma_ref = *v;
  return t;
}

Node to_node(const Token& t) {
  Node n = Node::element(t.kind == TokenKind::kPunct ? "pc" : "w");
  if (!t.id.empty()) n.set_attr("xml:id", t.id);
  if (t.lemma) n.set_attr("lemma", *t.lemma);
  if (t.lemma_ref) n.set_attr("lemmaRef", *t.lemma_ref);
  if (!t.surface.empty()) n.children.push_back(Node::text_node(t.surface));
  return n;
}

std::vector<Token> tokens(const Document& doc) {
  std::vector<Token> out;
  for_each_token(doc, [&](const Node& n) { out.push_back(to_token(n)); });
  return out;
}

void for_each_token(Document& doc, const std::function<void(Node&)>& fn) {
  for (auto& n : doc.nodes) walk_tokens(n, fn);
}

void for_each_token(const Document& doc, const std::function<void(const Node&)>& fn) {
  for (const auto& n : doc.nodes) walk_tokens(n, fn);
}

void for_each_element(const Document& doc, const std::function<void(const Node&)>& fn) {
  for (const auto& n : doc.nodes) walk_elements(n, fn);
}

}  // namespace scriptorium::tei
