// core/include/scriptorium/tei.hpp

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

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Document model for the TEI subset used by the corpus: an ordered tree of
// elements, text and comments. Attributes are kept in a canonical order so
// that tree equality does not depend on source attribute order.
namespace scriptorium::tei {

enum class NodeKind { kElement, kText, kComment, kDeclaration };

struct Node {
  NodeKind kind = NodeKind::kElement;
  std::string name;  // element name; empty for other kinds
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  // kText: unescaped text; kComment/kDeclaration: raw body
  std::vector<Node> children;

  static Node element(std::string name);
  static Node text_node(std::string text);

  const std::string* attr(std::string_view key) const;
  void set_attr(const std::string& key, std::string value);
  bool remove_attr(std::string_view key);

  bool is_element(std::string_view n) const { return kind == NodeKind::kElement && name == n; }
  // Concatenated descendant text.
  std::string text_content() const;

  bool operator==(const Node&) const = default;
};

// Rank of an attribute in emitted order: lemma, n, xml:id, lemmaRef,
// source, type, cert, then anything else alphabetically.
int attribute_rank(std::string_view key);

struct Document {
  std::vector<Node> nodes;  // top level, including prolog and whitespace

  // xml:id of the first top-level element, empty when absent.
  std::string id() const;
  bool operator==(const Document&) const = default;
};

// Well-formed XML only; throws ParseError with line and column.
Document parse_tei(std::string_view xml);
std::string emit_tei(const Document& doc);

std::string escape_text(std::string_view s);
std::string escape_attribute(std::string_view s);

enum class TokenKind { kWord, kPunct };

// Flat view of a <w> or <pc> element, or a token produced by the tokenizer.
struct Token {
  std::string id;
  TokenKind kind = TokenKind::kWord;
  std::string surface;
  std::optional<std::string> lemma;
  std::optional<std::string> lemma_ref;
  bool numeral = false;     // tokenizer flag: roman numeral
  std::size_t offset = 0;   // tokenizer: byte offset in the input
  std::string trailing;     // tokenizer: text up to the next token

  bool operator==(const Token&) const = default;
};

bool is_token_element(const Node& n);
Token to_token(const Node& n);
Node to_node(const Token& t);

// Tokens in document order.
std::vector<Token> tokens(const Document& doc);
// Visits every <w>/<pc> element in document order.
void for_each_token(Document& doc, const std::function<void(Node&)>& fn);
void for_each_token(const Document& doc, const std::function<void(const Node&)>& fn);
// Visits every element (pre-order), tokens included.
void for_each_element(const Document& doc, const std::function<void(const Node&)>& fn);

}  // namespace scriptorium::tei
