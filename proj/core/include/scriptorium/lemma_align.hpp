// core/include/scriptorium/lemma_align.hpp

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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scriptorium/tei.hpp"

// Glossary -> reference lemma alignment with a human decision log, and
// injection of the decided lemmas into tokenized documents.
namespace scriptorium::lemma_align {

enum class Provenance { kReference, kProjectCreated };

struct LexiconEntry {
  std::string lemma;  // NFC
  std::string pos;
  std::string source;
  Provenance provenance = Provenance::kReference;
  std::string documentation;  // required for project-created lemmas

  bool operator==(const LexiconEntry&) const = default;
};

// File format: `lemma TAB pos TAB source[ TAB documentation]`, one entry
// per line. Source "project-created" marks lemmas created by reviewers.
class LemmaLexicon {
 public:
  static LemmaLexicon parse(std::string_view text);
  static LemmaLexicon load(const std::filesystem::path& path);
  std::string serialize() const;
  void save(const std::filesystem::path& path) const;

  // Throws ValidationError on a duplicate lemma (after NFC).
  void add(LexiconEntry entry);
  const LexiconEntry* find(std::string_view lemma) const;
  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<LexiconEntry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

inline constexpr std::string_view kProjectCreated = "project-created";

struct SubEntry {
  std::string id;
  std::string form;
  std::vector<std::pair<std::string, std::string>> gram;
};

struct GlossEntry {
  std::string id;
  std::string headword;
  std::vector<std::pair<std::string, std::string>> gram;  // gramGrp children
  std::vector<SubEntry> sub_entries;

  std::string pos() const;
};

// Every <entry> of a glossary document. The headword is the first <form>
// that is not itself an alignment result (type="lmlv").
std::vector<GlossEntry> parse_glossary(const tei::Document& doc);

// Strips combining dot below / dot above and lowercases.
std::string fold_diacritics(std::string_view lemma);

struct CandidateOptions {
  std::size_t k = 5;
  double threshold = 0.5;
  double pos_bonus = 0.1;
};

struct Candidate {
  std::string lemma;
  double score = 0.0;

  bool operator==(const Candidate&) const = default;
};

// score = 1 - levenshtein(folded headword, folded lemma) / max length, plus
// pos_bonus on a part-of-speech match, clamped to [0, 1]. Exact folded
// matches rank first, then score descending, then lemma.
std::vector<Candidate> propose_candidates(const GlossEntry& entry, const LemmaLexicon& lexicon,
                                          const CandidateOptions& options = {});

enum class Action { kAccept, kNew, kReject };

struct Decision {
  std::string gloss_id;
  Action action = Action::kAccept;
  std::string lemma;          // accept / new
  std::string pos;            // new
  std::string documentation;  // new
  std::string reviewer;
  std::string timestamp;      // ISO 8601, filled in when empty
  std::vector<Candidate> candidates;
  std::string request_id;

  std::string to_json() const;
  static Decision from_json(std::string_view line);
};

// Append-only decision log; a later decision on a gloss supersedes earlier
// ones. Backed by a JSON-lines file when a path is given.
class DecisionLog {
 public:
  DecisionLog() = default;
  explicit DecisionLog(std::filesystem::path path);

  const std::vector<Decision>& decisions() const { return decisions_; }
  // gloss id -> lemma for glosses whose latest decision is not a rejection.
  std::map<std::string, std::string> active() const;
  bool has_request(std::string_view request_id) const;

  void append(const Decision& d);

 private:
  std::optional<std::filesystem::path> path_;
  std::vector<Decision> decisions_;
};

// Validates and appends `d`. The gloss id must be one of `known_ids`;
// accepted lemmas must exist in the lexicon; a NEW lemma is added to the
// lexicon as project-created and needs documentation.
void record_decision(DecisionLog& log, LemmaLexicon& lexicon,
                     const std::vector<std::string>& known_ids, Decision d);

// Mapping obtained by replaying `decisions` from an empty state.
std::map<std::string, std::string> replay(const std::vector<Decision>& decisions);

inline constexpr std::string_view kNumeralLemma = "@num@";

struct InjectionReport {
  std::size_t resolved = 0;
  std::size_t numerals = 0;
  std::size_t unresolved = 0;             // word tokens left without a lemma
  std::vector<std::string> dangling;      // lemmaRef values with no decision
};

// Resolves lemmaRef "#gloss_a116_11" through the active mapping, falling
// back to its parents (gloss_a116_11 -> gloss_a116). Roman numerals get
// "@num@". Token surfaces and order are never changed.
InjectionReport inject_lemmas(tei::Document& doc,
                              const std::map<std::string, std::string>& active);

// Records each active alignment in the glossary as
// <form source="#DOM" type="lmlv" cert="high">lemma</form> after the headword.
void annotate_glossary(tei::Document& glossary, const std::map<std::string, std::string>& active,
                       const std::string& source = "#DOM");

}  // namespace scriptorium::lemma_align
