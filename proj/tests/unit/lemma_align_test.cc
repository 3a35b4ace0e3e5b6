// tests/unit/lemma_align_test.cc

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

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/lemma_align.hpp"
#include "scriptorium/random.hpp"
#include "scriptorium/structurer.hpp"
#include "scriptorium/unicode.hpp"
#include "test_support.h"

namespace scriptorium::lemma_align {
namespace {

using testing::TempDir;

std::filesystem::path fixture(const std::string& name) { return testing::data_dir() / "montferrand" / name; }

LemmaLexicon lexicon() { return LemmaLexicon::load(fixture("lexicon.tsv")); }

std::vector<GlossEntry> glossary() { return parse_glossary(tei::parse_tei(read_file(fixture("glossary.xml")))); }

std::vector<std::string> ids_of(const std::vector<GlossEntry>& entries) {
  std::vector<std::string> ids;
  for (const auto& e : entries) {
    ids.push_back(e.id);
    for (const auto& s : e.sub_entries) ids.push_back(s.id);
  }
  return ids;
}

const GlossEntry& entry(const std::vector<GlossEntry>& entries, const std::string& id) {
  return *std::find_if(entries.begin(), entries.end(), [&](const GlossEntry& e) { return e.id == id; });
}

Decision accept(const std::string& gloss, const std::string& lemma, const std::string& rid = "") {
  Decision d;
  d.gloss_id = gloss;
  d.action = Action::kAccept;
  d.lemma = lemma;
  d.reviewer = "tester";
  d.request_id = rid;
  return d;
}

TEST(FoldTest, StripsDotsAndLowercases) {
  EXPECT_EQ(fold_diacritics("avẹr"), "aver");
  EXPECT_EQ(fold_diacritics("jọrn"), "jorn");
  EXPECT_EQ(fold_diacritics("abc"), "abc");
  EXPECT_EQ(fold_diacritics("Ẹn"), "en");
  EXPECT_EQ(fold_diacritics("ċ"), "c");
  EXPECT_EQ(fold_diacritics("é"), "é");
}

TEST(FoldTest, IdempotentAndNeverLonger) {
  const std::vector<std::string> pieces{"a", "ẹ", "ọ", "É", "ċ", "n", "ç", "Ọ", "+", "2"};
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    for (uint64_t i = rng.below(10); i > 0; --i) s += pieces[rng.below(pieces.size())];
    const auto f = fold_diacritics(s);
    ASSERT_EQ(fold_diacritics(f), f);
    ASSERT_LE(unicode::length(unicode::nfd(f)), unicode::length(unicode::nfd(s)));
  }
}

TEST(LexiconTest, LoadsAndRoundTrips) {
  const auto lex = lexicon();
  EXPECT_EQ(lex.size(), 16u);
  ASSERT_NE(lex.find("avẹr"), nullptr);
  EXPECT_EQ(lex.find("avẹr")->pos, "verbe");
  EXPECT_EQ(LemmaLexicon::parse(lex.serialize()).entries(), lex.entries());
}

TEST(LexiconTest, RejectsDuplicatesAndUndocumentedProjectLemmas) {
  auto lex = lexicon();
  EXPECT_THROW(lex.add({"avẹr", "verbe", "DOM", Provenance::kReference, ""}), ValidationError);
  // Decomposed spelling of an existing lemma is the same lemma after NFC.
  EXPECT_THROW(lex.add({"avẹr", "verbe", "DOM", Provenance::kReference, ""}), ValidationError);
  EXPECT_THROW(lex.add({"nou", "nom", std::string(kProjectCreated), Provenance::kProjectCreated, ""}),
               ValidationError);
  EXPECT_THROW(LemmaLexicon::parse("a\tx\tDOM\na\ty\tDOM\n"), ParseError);
}

TEST(GlossaryTest, ParsesEntriesAndSubEntries) {
  const auto entries = glossary();
  ASSERT_EQ(entries.size(), 10u);
  const auto& aver = entry(entries, "gloss_a116");
  EXPECT_EQ(aver.headword, "aver");
  EXPECT_EQ(aver.pos(), "verbe");
  ASSERT_EQ(aver.sub_entries.size(), 2u);
  EXPECT_EQ(aver.sub_entries[0].id, "gloss_a116_1");
  EXPECT_EQ(aver.sub_entries[0].form, "avem");
}

TEST(GlossaryTest, AlignedFormIsNotTheHeadword) {
  const auto entries = parse_glossary(tei::parse_tei(read_file(fixture("glossary_entry.xml"))));
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].headword, "aver");
}

TEST(GlossaryTest, RejectsBadIds) {
  EXPECT_THROW(parse_glossary(tei::parse_tei("<div><entry><form>a</form></entry></div>")), ValidationError);
  EXPECT_THROW(parse_glossary(tei::parse_tei(
                   "<div><entry xml:id=\"g1\"><form>a</form></entry><entry xml:id=\"g1\"><form>b</form></entry></div>")),
               ValidationError);
  EXPECT_THROW(parse_glossary(tei::parse_tei(
                   "<entry xml:id=\"g1\"><form>a</form><re xml:id=\"h2\"><form>b</form></re></entry>")),
               ValidationError);
}

TEST(CandidateTest, ExactFoldedMatchRanksFirst) {
  LemmaLexicon lex;
  lex.add({"avars", "adjectif", "DOM", Provenance::kReference, ""});
  lex.add({"avẹr", "verbe", "DOM", Provenance::kReference, ""});
  const auto c = propose_candidates(entry(glossary(), "gloss_a116"), lex);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (Candidate{"avẹr", 1.0}));
  // aver -> avars: one substitution and one insertion over length 5.
  EXPECT_EQ(c[1].lemma, "avars");
  EXPECT_DOUBLE_EQ(c[1].score, 1.0 - 2.0 / 5.0);
}

TEST(CandidateTest, EmptyLexiconGivesNothing) {
  EXPECT_TRUE(propose_candidates(entry(glossary(), "gloss_a116"), LemmaLexicon{}).empty());
}

TEST(CandidateTest, NothingAboveThresholdIsEmpty) {
  GlossEntry e;
  e.id = "gloss_z1";
  e.headword = "zzzz";
  EXPECT_TRUE(propose_candidates(e, lexicon()).empty());
}

TEST(CandidateTest, ExactMatchOutranksEverythingForAllFixtures) {
  const auto lex = lexicon();
  for (const auto& e : glossary()) {
    const auto c = propose_candidates(e, lex, {16, 0.0, 0.1});
    ASSERT_FALSE(c.empty()) << e.id;
    for (std::size_t i = 1; i < c.size(); ++i) {
      const bool earlier_exact = fold_diacritics(c[i - 1].lemma) == fold_diacritics(e.headword);
      ASSERT_TRUE(earlier_exact || c[i - 1].score >= c[i].score) << e.id;
      ASSERT_NE(fold_diacritics(c[i].lemma), fold_diacritics(e.headword)) << e.id << " exact match not first";
    }
    for (const auto& cand : c) {
      ASSERT_GE(cand.score, 0.0);
      ASSERT_LE(cand.score, 1.0);
    }
  }
}

TEST(DecisionTest, AcceptSupersedeAndNew) {
  const auto entries = glossary();
  const auto ids = ids_of(entries);
  auto lex = lexicon();
  DecisionLog log;
  record_decision(log, lex, ids, accept("gloss_a116", "avẹr"));
  EXPECT_EQ(log.active().at("gloss_a116"), "avẹr");
  record_decision(log, lex, ids, accept("gloss_a116", "avars"));
  EXPECT_EQ(log.decisions().size(), 2u);
  EXPECT_EQ(log.active().at("gloss_a116"), "avars");

  Decision n;
  n.gloss_id = "gloss_d57";
  n.action = Action::kNew;
  n.lemma = "zzz-lemma";
  n.pos = "nom";
  n.documentation = "not in the reference dictionary";
  const auto before = lex.size();
  record_decision(log, lex, ids, n);
  EXPECT_EQ(lex.size(), before + 1);
  EXPECT_EQ(lex.find("zzz-lemma")->provenance, Provenance::kProjectCreated);

  Decision r;
  r.gloss_id = "gloss_a116";
  r.action = Action::kReject;
  record_decision(log, lex, ids, r);
  EXPECT_FALSE(log.active().contains("gloss_a116"));
  EXPECT_EQ(log.active().at("gloss_d57"), "zzz-lemma");
}

TEST(DecisionTest, InvalidDecisionsAreRejected) {
  const auto ids = ids_of(glossary());
  auto lex = lexicon();
  DecisionLog log;
  EXPECT_THROW(record_decision(log, lex, ids, accept("gloss_x999", "avẹr")), ValidationError);
  EXPECT_THROW(record_decision(log, lex, ids, accept("gloss_a116", "no-such-lemma")), ValidationError);
  Decision n;
  n.gloss_id = "gloss_a116";
  n.action = Action::kNew;
  n.lemma = "nou";
  EXPECT_THROW(record_decision(log, lex, ids, n), ValidationError);
  EXPECT_TRUE(log.decisions().empty());
}

TEST(DecisionTest, JsonRoundTrip) {
  auto d = accept("gloss_a116", "avẹr", "req-1");
  d.candidates = {{"avẹr", 1.0}, {"avars", 0.6}};
  d.timestamp = "2024-01-02T03:04:05Z";
  const auto back = Decision::from_json(d.to_json());
  EXPECT_EQ(back.gloss_id, d.gloss_id);
  EXPECT_EQ(back.lemma, d.lemma);
  EXPECT_EQ(back.candidates, d.candidates);
  EXPECT_EQ(back.request_id, "req-1");
  EXPECT_EQ(back.timestamp, d.timestamp);
}

TEST(DecisionTest, FileBackedLogReplaysAfterReopen) {
  TempDir dir("decisions");
  const auto ids = ids_of(glossary());
  auto lex = lexicon();
  std::map<std::string, std::string> expected;
  {
    DecisionLog log(dir / "decisions.log");
    record_decision(log, lex, ids, accept("gloss_a116", "avẹr", "r1"));
    record_decision(log, lex, ids, accept("gloss_q11", "que", "r2"));
    record_decision(log, lex, ids, accept("gloss_a116", "avars", "r3"));
    expected = log.active();
  }
  DecisionLog reopened(dir / "decisions.log");
  EXPECT_EQ(reopened.decisions().size(), 3u);
  EXPECT_EQ(reopened.active(), expected);
  EXPECT_TRUE(reopened.has_request("r2"));
  EXPECT_FALSE(reopened.has_request("r9"));
}

TEST(DecisionTest, ReplayMatchesIncrementalStateOnRandomLogs) {
  const auto entries = glossary();
  const auto ids = ids_of(entries);
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto lex = lexicon();
    DecisionLog log;
    std::map<std::string, std::string> state;
    for (int k = 0; k < 30; ++k) {
      const auto& gloss = ids[rng.below(ids.size())];
      Decision d;
      d.gloss_id = gloss;
      if (rng.below(5) == 0) {
        d.action = Action::kReject;
        state.erase(gloss);
      } else {
        d.action = Action::kAccept;
        d.lemma = lex.entries()[rng.below(lex.size())].lemma;
        state[gloss] = d.lemma;
      }
      record_decision(log, lex, ids, d);
      ASSERT_EQ(log.active(), state);
    }
    ASSERT_EQ(replay(log.decisions()), state);
  }
}

// Account item walk-through: accept candidates on the glossary, then inject.
TEST(InjectTest, AccountItemGetsDecidedLemmas) {
  const auto entries = glossary();
  const auto ids = ids_of(entries);
  auto lex = lexicon();
  DecisionLog log;
  for (const auto& e : entries) {
    const auto c = propose_candidates(e, lex);
    if (!c.empty() && fold_diacritics(c[0].lemma) == fold_diacritics(e.headword)) {
      record_decision(log, lex, ids, accept(e.id, c[0].lemma));
    }
  }
  record_decision(log, lex, ids, accept("gloss_d57", "da+lo2"));

  auto doc = tei::parse_tei(read_file(fixture("item.xml")));
  structurer::segment_document(doc);
  structurer::assign_ids(doc, {"w", 28267, 6, false});
  const auto before = tei::tokens(doc);
  const auto report = inject_lemmas(doc, log.active());
  const auto after = tei::tokens(doc);

  ASSERT_EQ(after.size(), before.size());
  for (std::size_t i = 0; i < after.size(); ++i) {
    ASSERT_EQ(after[i].surface, before[i].surface);
    ASSERT_EQ(after[i].id, before[i].id);
  }
  std::map<std::string, std::string> by_surface;
  for (const auto& t : after) {
    if (t.lemma) by_surface[t.surface] = *t.lemma;
  }
  EXPECT_EQ(by_surface["ac"], "avẹr");
  EXPECT_EQ(by_surface["IIII"], "@num@");
  EXPECT_EQ(by_surface["II"], "@num@");
  EXPECT_EQ(by_surface["dos"], "da+lo2");
  EXPECT_EQ(by_surface["gens"], "gẹn");
  EXPECT_EQ(by_surface["anet"], "anar");

  // The lemmas agree with the annotated rendering wherever both exist.
  const auto gold = tei::tokens(tei::parse_tei(read_file(fixture("item_lemmatized.xml"))));
  ASSERT_EQ(gold.size(), after.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (after[i].lemma) { EXPECT_EQ(*after[i].lemma, *gold[i].lemma) << after[i].surface; }
  }
  EXPECT_EQ(report.resolved, 10u);
  EXPECT_EQ(report.numerals, 2u);
  EXPECT_TRUE(report.dangling.empty());
  EXPECT_EQ(report.unresolved, 11u);
}

TEST(InjectTest, DanglingRefsAreReportedNotFatal) {
  auto doc = tei::parse_tei("<item><w lemmaRef=\"#gloss_x1\">foo</w><w>bar</w><w lemmaRef=\"#gloss_a116_11\">ac</w></item>");
  const auto report = inject_lemmas(doc, {{"gloss_a116", "avẹr"}});
  EXPECT_EQ(report.resolved, 1u);
  EXPECT_EQ(report.unresolved, 2u);
  EXPECT_EQ(report.dangling, (std::vector<std::string>{"#gloss_x1"}));
  const auto toks = tei::tokens(doc);
  EXPECT_FALSE(toks[0].lemma.has_value());
  EXPECT_FALSE(toks[1].lemma.has_value());
  EXPECT_EQ(toks[2].lemma, "avẹr");
}

TEST(InjectTest, SubEntryDecisionBeatsParent) {
  auto doc = tei::parse_tei("<item><w lemmaRef=\"#gloss_a116_11\">ac</w></item>");
  inject_lemmas(doc, {{"gloss_a116", "avẹr"}, {"gloss_a116_11", "avars"}});
  EXPECT_EQ(tei::tokens(doc)[0].lemma, "avars");
}

TEST(AnnotateTest, AddsAlignmentFormAfterHeadword) {
  auto doc = tei::parse_tei(read_file(fixture("glossary.xml")));
  annotate_glossary(doc, {{"gloss_a116", "avẹr"}});
  bool found = false;
  tei::for_each_element(doc, [&](const tei::Node& n) {
    if (!n.is_element("entry") || *n.attr("xml:id") != "gloss_a116") return;
    std::vector<const tei::Node*> forms;
    for (const auto& c : n.children) {
      if (c.is_element("form")) forms.push_back(&c);
    }
    ASSERT_GE(forms.size(), 2u);
    EXPECT_EQ(forms[0]->text_content(), "aver");
    EXPECT_EQ(forms[1]->text_content(), "avẹr");
    EXPECT_EQ(*forms[1]->attr("type"), "lmlv");
    EXPECT_EQ(*forms[1]->attr("source"), "#DOM");
    EXPECT_EQ(*forms[1]->attr("cert"), "high");
    found = true;
  });
  EXPECT_TRUE(found);
  EXPECT_EQ(parse_glossary(doc).size(), 10u);
  EXPECT_EQ(parse_glossary(doc)[1].headword, "aver");
}

}  // namespace
}  // namespace scriptorium::lemma_align
