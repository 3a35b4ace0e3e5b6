// tests/unit/tei_test.cc

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

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/random.hpp"
#include "scriptorium/tei.hpp"
#include "test_support.h"

namespace scriptorium::tei {
namespace {

std::string fixture(const std::string& name) {
  return read_file(testing::data_dir() / "montferrand" / name);
}

TEST(TeiTest, AccountItemHasTenLinkedTokensAndMixedText) {
  const auto doc = parse_tei(fixture("item.xml"));
  EXPECT_EQ(doc.id(), "CC6.278");
  const auto toks = tokens(doc);
  ASSERT_EQ(toks.size(), 10u);
  for (const auto& t : toks) {
    EXPECT_EQ(t.kind, TokenKind::kWord);
    EXPECT_TRUE(t.lemma_ref.has_value());
  }
  EXPECT_EQ(toks[0].surface, "ac");
  EXPECT_EQ(*toks[0].lemma_ref, "#gloss_a116_11");
  EXPECT_EQ(toks[9].surface, "gens");
  const auto& item = doc.nodes.front();
  ASSERT_TRUE(item.is_element("item"));
  ASSERT_EQ(item.children.front().kind, NodeKind::kText);
  EXPECT_NE(item.children.front().text.find("IIII s. qu"), std::string::npos);
  EXPECT_NE(item.text_content().find("D. Chapus dos II jorns"), std::string::npos);
}

TEST(TeiTest, FixturesRoundTripByteForByte) {
  for (const char* name : {"item.xml", "item_lemmatized.xml", "glossary_entry.xml", "glossary.xml"}) {
    const auto xml = fixture(name);
    const auto doc = parse_tei(xml);
    EXPECT_EQ(emit_tei(doc), xml) << name;
    EXPECT_EQ(parse_tei(emit_tei(doc)), doc) << name;
  }
}

TEST(TeiTest, LemmatizedItemTokens) {
  const auto toks = tokens(parse_tei(fixture("item_lemmatized.xml")));
  ASSERT_EQ(toks.size(), 26u);
  EXPECT_EQ(toks[0].id, "w_028267");
  EXPECT_EQ(toks[5].surface, "ac");
  EXPECT_EQ(toks[5].lemma, "avẹr");
  EXPECT_EQ(toks[5].lemma_ref, "#gloss_a116_11");
  EXPECT_EQ(toks[3].kind, TokenKind::kPunct);
  EXPECT_EQ(toks[3].surface, ".");
}

TEST(TeiTest, NonCanonicalInputNormalizes) {
  const std::string messy =
      "<item xml:id='x1'><w  lemmaRef=\"#g\"   lemma='a&amp;b' xml:id=\"w_1\">a&lt;b</w><pc/></item>";
  const auto doc = parse_tei(messy);
  const auto once = emit_tei(doc);
  EXPECT_EQ(once,
            "<item xml:id=\"x1\"><w lemma=\"a&amp;b\" xml:id=\"w_1\" lemmaRef=\"#g\">a&lt;b</w><pc/></item>");
  EXPECT_EQ(emit_tei(parse_tei(once)), once);
}

TEST(TeiTest, EmptyItemRoundTrips) {
  for (const char* xml : {"<item/>", "<item xml:id=\"e\"/>"}) {
    const auto doc = parse_tei(xml);
    ASSERT_EQ(doc.nodes.size(), 1u);
    EXPECT_TRUE(doc.nodes[0].children.empty());
    EXPECT_EQ(emit_tei(doc), xml);
  }
  EXPECT_EQ(emit_tei(parse_tei("<item></item>")), "<item/>");
}

TEST(TeiTest, CommentsDeclarationsAndEntitiesSurvive) {
  const std::string xml =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- note -->\n<TEI><text>&#233;&#x1EB9;</text></TEI>\n";
  const auto doc = parse_tei(xml);
  EXPECT_EQ(doc.nodes[0].kind, NodeKind::kDeclaration);
  EXPECT_EQ(doc.nodes[2].kind, NodeKind::kComment);
  EXPECT_EQ(doc.nodes[4].text_content(), "éẹ");
  EXPECT_EQ(parse_tei(emit_tei(doc)), doc);
}

TEST(TeiTest, MalformedXmlReportsLocation) {
  const std::vector<std::string> bad{"<item><w>a</item>", "<item", "<item a=b/>", "<item>&bogus;</item>",
                                     "<item>\n  <w x=\"1\" x=\"2\"/></item>", "</item>", "<item><!-- x"};
  for (const auto& xml : bad) {
    try {
      parse_tei(xml);
      ADD_FAILURE() << "accepted: " << xml;
    } catch (const ParseError& e) {
      EXPECT_GT(e.line(), 0) << xml;
      EXPECT_GT(e.column(), 0) << xml;
    }
  }
  try {
    parse_tei("<item>\n  <w x=\"1\" x=\"2\"/></item>");
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

// Random documents over the supported vocabulary, in canonical form: no
// adjacent or empty text nodes, attributes set through set_attr.
class DocumentGenerator {
 public:
  explicit DocumentGenerator(uint64_t seed) : rng_(seed) {}

  Document make() {
    Document d;
    if (rng_.below(2)) d.nodes.push_back(declaration());
    d.nodes.push_back(element(0));
    if (rng_.below(2)) d.nodes.push_back(Node::text_node("\n"));
    return d;
  }

 private:
  std::string pick(const std::vector<std::string>& v) { return v[rng_.below(v.size())]; }

  std::string text(std::size_t max_pieces) {
    static const std::vector<std::string> pieces{"a", "ẹ", " ", "\n", "&", "<", ">", "\"", "'", "Item",
                                                 "IIII", "qu", "ſ", "·", "\t", "]]", "--"};
    std::string s;
    const auto n = 1 + rng_.below(max_pieces);
    for (uint64_t i = 0; i < n; ++i) s += pick(pieces);
    return s;
  }

  Node declaration() {
    Node d;
    d.kind = NodeKind::kDeclaration;
    d.text = "?xml version=\"1.0\" encoding=\"UTF-8\"?";
    return d;
  }

  Node element(int depth) {
    static const std::vector<std::string> names{"item", "w", "pc", "entry", "form", "gramGrp", "pos", "re",
                                                "l", "lg", "pb", "lb", "div", "seg"};
    static const std::vector<std::string> attrs{"xml:id", "lemma", "lemmaRef", "n", "type", "source", "cert",
                                                "rend"};
    Node e = Node::element(pick(names));
    for (uint64_t i = rng_.below(4); i > 0; --i) e.set_attr(pick(attrs), text(3));
    const uint64_t n_children = depth > 3 ? 0 : rng_.below(5);
    for (uint64_t i = 0; i < n_children; ++i) {
      const auto r = rng_.below(10);
      const bool last_text = !e.children.empty() && e.children.back().kind == NodeKind::kText;
      if (r < 4 && !last_text) {
        e.children.push_back(Node::text_node(text(6)));
      } else if (r == 4) {
        Node c;
        c.kind = NodeKind::kComment;
        c.text = " " + pick({"note", "f. 2v", "ẹ"}) + " ";
        e.children.push_back(std::move(c));
      } else {
        e.children.push_back(element(depth + 1));
      }
    }
    return e;
  }

  Rng rng_;
};

TEST(TeiTest, RandomDocumentsRoundTrip) {
  DocumentGenerator gen(2024);
  for (int i = 0; i < 200; ++i) {
    const auto doc = gen.make();
    const auto xml = emit_tei(doc);
    const auto back = parse_tei(xml);
    ASSERT_EQ(back, doc) << xml;
    ASSERT_EQ(emit_tei(back), xml);
  }
}

TEST(TeiTest, AttributeOrderIsCanonical) {
  Node n = Node::element("w");
  n.set_attr("type", "t");
  n.set_attr("rend", "r");
  n.set_attr("lemmaRef", "#g");
  n.set_attr("lemma", "l");
  n.set_attr("xml:id", "w_1");
  n.set_attr("cert", "0.9");
  std::vector<std::string> keys;
  for (const auto& [k, v] : n.attributes) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"lemma", "xml:id", "lemmaRef", "type", "cert", "rend"}));
  EXPECT_TRUE(n.remove_attr("rend"));
  EXPECT_FALSE(n.remove_attr("rend"));
}

TEST(TeiTest, TokenNodeConversionRoundTrips) {
  Token t;
  t.id = "w_000001";
  t.surface = "ac";
  t.lemma = "avẹr";
  t.lemma_ref = "#gloss_a116_11";
  const auto back = to_token(to_node(t));
  EXPECT_EQ(back.id, t.id);
  EXPECT_EQ(back.surface, t.surface);
  EXPECT_EQ(back.lemma, t.lemma);
  EXPECT_EQ(back.lemma_ref, t.lemma_ref);
  Token p;
  p.kind = TokenKind::kPunct;
  p.surface = ".";
  EXPECT_TRUE(to_node(p).is_element("pc"));
}

}  // namespace
}  // namespace scriptorium::tei
