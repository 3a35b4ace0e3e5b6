// core/src/lemma_align.cpp

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

#include "scriptorium/lemma_align.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/corpus.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/eval.hpp"
#include "scriptorium/structurer.hpp"
#include "scriptorium/unicode.hpp"

namespace scriptorium::lemma_align {
namespace {

using json = nlohmann::json;
using tei::Node;

std::vector<std::pair<std::string, std::string>> read_gram(const Node& n) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& c : n.children) {
    if (c.kind == tei::NodeKind::kElement) out.emplace_back(c.name, c.text_content());
  }
  return out;
}

bool is_alignment_form(const Node& n) {
  const auto* type = n.attr("type");
  return n.is_element("form") && type && *type == "lmlv";
}

void collect_entries(const Node& n, std::vector<GlossEntry>& out) {
  if (n.kind != tei::NodeKind::kElement) return;
  if (!n.is_element("entry")) {
    for (const auto& c : n.children) collect_entries(c, out);
    return;
  }
  GlossEntry e;
  if (const auto* id = n.attr("xml:id")) e.id = *id;
  for (const auto& c : n.children) {
    if (c.is_element("form") && e.headword.empty() && !is_alignment_form(c)) {
      e.headword = unicode::nfc(c.text_content());
    } else if (c.is_element("gramGrp") && e.gram.empty()) {
      e.gram = read_gram(c);
    } else if (c.is_element("re")) {
      SubEntry s;
      if (const auto* id = c.attr("xml:id")) s.id = *id;
      for (const auto& rc : c.children) {
        if (rc.is_element("form") && s.form.empty()) s.form = unicode::nfc(rc.text_content());
        if (rc.is_element("gramGrp") && s.gram.empty()) s.gram = read_gram(rc);
      }
      e.sub_entries.push_back(std::move(s));
    }
  }
  out.push_back(std::move(e));
}

const char* action_name(Action a) {
  switch (a) {
    case Action::kAccept: return "accept";
    case Action::kNew: return "new";
    case Action::kReject: return "reject";
  }
  return "?";
}

Action parse_action(const std::string& s) {
  if (s == "accept") return Action::kAccept;
  if (s == "new") return Action::kNew;
  if (s == "reject") return Action::kReject;
  throw ValidationError("unknown decision action '" + s + "'");
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<std::string> resolve(std::string ref, const std::map<std::string, std::string>& active) {
  if (!ref.empty() && ref[0] == '#') ref.erase(0, 1);
  while (!ref.empty()) {
    if (auto it = active.find(ref); it != active.end()) return it->second;
    const auto us = ref.rfind('_');
    if (us == std::string::npos) break;
    const auto tail = ref.substr(us + 1);
    if (tail.empty() || !std::all_of(tail.begin(), tail.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      break;
    }
    ref.erase(us);
  }
  return std::nullopt;
}

}  // namespace

LemmaLexicon LemmaLexicon::parse(std::string_view text) {
  LemmaLexicon lex;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f[0].empty()) throw ParseError("lexicon: empty lemma", line_no, 1);
    LexiconEntry e;
    e.lemma = unicode::nfc(f[0]);
    if (f.size() > 1) e.pos = f[1];
    if (f.size() > 2) e.source = f[2];
    if (f.size() > 3) e.documentation = f[3];
    e.provenance = e.source == kProjectCreated ? Provenance::kProjectCreated : Provenance::kReference;
    try {
      lex.add(std::move(e));
    } catch (const ValidationError& err) {
      throw ParseError(std::string("lexicon: ") + err.what(), line_no, 1);
    }
  }
  return lex;
}

LemmaLexicon LemmaLexicon::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

std::string LemmaLexicon::serialize() const {
  std::string out;
  for (const auto& e : entries_) {
    out += e.lemma + "\t" + e.pos + "\t" + e.source;
    if (!e.documentation.empty()) out += "\t" + e.documentation;
    out += "\n";
  }
  return out;
}

void LemmaLexicon::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

void LemmaLexicon::add(LexiconEntry entry) {
  entry.lemma = unicode::nfc(entry.lemma);
  if (entry.lemma.empty()) throw ValidationError("lexicon: empty lemma");
  if (index_.contains(entry.lemma)) {
    throw ValidationError("lexicon: duplicate lemma '" + entry.lemma + "'");
  }
  if (entry.provenance == Provenance::kProjectCreated) {
    if (entry.documentation.empty()) {
      throw ValidationError("lexicon: project-created lemma '" + entry.lemma +
                            "' needs documentation");
    }
    entry.source = std::string(kProjectCreated);
  }
  index_.emplace(entry.lemma, entries_.size());
  entries_.push_back(std::move(entry));
}

const LexiconEntry* LemmaLexicon::find(std::string_view lemma) const {
  const auto it = index_.find(unicode::nfc(lemma));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::string GlossEntry::pos() const {
  for (const auto& [k, v] : gram) {
    if (k == "pos") return v;
  }
  return {};
}

std::vector<GlossEntry> parse_glossary(const tei::Document& doc) {
  std::vector<GlossEntry> out;
  for (const auto& n : doc.nodes) collect_entries(n, out);
  std::set<std::string> seen;
  for (const auto& e : out) {
    if (e.id.empty()) throw ValidationError("glossary: entry without xml:id");
    if (!seen.insert(e.id).second) throw ValidationError("glossary: duplicate id " + e.id);
    for (const auto& s : e.sub_entries) {
      if (!s.id.empty() && !s.id.starts_with(e.id)) {
        throw ValidationError("glossary: sub-entry " + s.id + " is not prefixed by " + e.id);
      }
    }
  }
  return out;
}

std::string fold_diacritics(std::string_view lemma) {
  std::u32string out;
  for (char32_t c : unicode::to_u32(unicode::nfd(lemma))) {
    if (c == 0x0323 || c == 0x0307) continue;
    out.push_back(unicode::to_lower(c));
  }
  return unicode::nfc(unicode::to_utf8(out));
}

std::vector<Candidate> propose_candidates(const GlossEntry& entry, const LemmaLexicon& lexicon,
                                          const CandidateOptions& options) {
  const auto head = fold_diacritics(entry.headword);
  const auto head_len = unicode::length(head);
  const auto pos = unicode::to_lower(entry.pos());
  struct Scored {
    Candidate c;
    bool exact;
  };
  std::vector<Scored> scored;
  for (const auto& e : lexicon.entries()) {
    const auto key = fold_diacritics(e.lemma);
    const auto len = std::max(head_len, unicode::length(key));
    const double dist = len == 0 ? 0.0 : static_cast<double>(eval::edit_distance(head, key)) / len;
    double score = 1.0 - dist;
    if (!pos.empty() && unicode::to_lower(e.pos) == pos) score += options.pos_bonus;
    score = std::clamp(score, 0.0, 1.0);
    const bool exact = key == head;
    if (!exact && score < options.threshold) continue;
    scored.push_back({{e.lemma, score}, exact});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.exact != b.exact) return a.exact;
    if (a.c.score != b.c.score) return a.c.score > b.c.score;
    return a.c.lemma < b.c.lemma;
  });
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < scored.size() && i < options.k; ++i) out.push_back(scored[i].c);
  return out;
}

std::string Decision::to_json() const {
  json j;
  j["gloss"] = gloss_id;
  j["action"] = action_name(action);
  if (action != Action::kReject) j["lemma"] = lemma;
  if (action == Action::kNew) {
    j["pos"] = pos;
    j["documentation"] = documentation;
  }
  j["reviewer"] = reviewer;
  j["timestamp"] = timestamp;
  json cands = json::array();
  for (const auto& c : candidates) cands.push_back({{"lemma", c.lemma}, {"score", c.score}});
  j["candidates"] = std::move(cands);
  if (!request_id.empty()) j["request_id"] = request_id;
  return j.dump();
}

Decision Decision::from_json(std::string_view line) {
  const auto j = json::parse(line);
  Decision d;
  d.gloss_id = j.at("gloss").get<std::string>();
  d.action = parse_action(j.at("action").get<std::string>());
  d.lemma = j.value("lemma", "");
  d.pos = j.value("pos", "");
  d.documentation = j.value("documentation", "");
  d.reviewer = j.value("reviewer", "");
  d.timestamp = j.value("timestamp", "");
  d.request_id = j.value("request_id", "");
  if (j.contains("candidates")) {
    for (const auto& c : j["candidates"]) {
      d.candidates.push_back({c.at("lemma").get<std::string>(), c.at("score").get<double>()});
    }
  }
  return d;
}

DecisionLog::DecisionLog(std::filesystem::path path) : path_(std::move(path)) {
  for (const auto& line : read_json_lines(*path_)) {
    // Other tools may share the log; only alignment decisions are read.
    const auto j = json::parse(line);
    if (j.contains("gloss")) decisions_.push_back(Decision::from_json(line));
  }
}

std::map<std::string, std::string> DecisionLog::active() const { return replay(decisions_); }

bool DecisionLog::has_request(std::string_view request_id) const {
  if (request_id.empty()) return false;
  return std::any_of(decisions_.begin(), decisions_.end(),
                     [&](const Decision& d) { return d.request_id == request_id; });
}

void DecisionLog::append(const Decision& d) {
  if (path_) append_json_line(*path_, d.to_json());
  decisions_.push_back(d);
}

void record_decision(DecisionLog& log, LemmaLexicon& lexicon,
                     const std::vector<std::string>& known_ids, Decision d) {
  if (std::find(known_ids.begin(), known_ids.end(), d.gloss_id) == known_ids.end()) {
    throw ValidationError("record_decision: unknown gloss id '" + d.gloss_id + "'");
  }
  d.lemma = unicode::nfc(d.lemma);
  switch (d.action) {
    case Action::kAccept:
      if (lexicon.find(d.lemma) == nullptr) {
        throw ValidationError("record_decision: lemma '" + d.lemma + "' is not in the lexicon");
      }
      break;
    case Action::kNew: {
      LexiconEntry e;
      e.lemma = d.lemma;
      e.pos = d.pos;
      e.provenance = Provenance::kProjectCreated;
      e.documentation = d.documentation;
      lexicon.add(std::move(e));
      break;
    }
    case Action::kReject:
      d.lemma.clear();
      break;
  }
  if (d.timestamp.empty()) d.timestamp = utc_now();
  log.append(d);
}

std::map<std::string, std::string> replay(const std::vector<Decision>& decisions) {
  std::map<std::string, std::string> active;
  for (const auto& d : decisions) {
    if (d.action == Action::kReject) {
      active.erase(d.gloss_id);
    } else {
      active[d.gloss_id] = d.lemma;
    }
  }
  return active;
}

InjectionReport inject_lemmas(tei::Document& doc,
                              const std::map<std::string, std::string>& active) {
  InjectionReport report;
  tei::for_each_token(doc, [&](Node& n) {
    if (!n.is_element("w")) return;
    if (const auto* ref = n.attr("lemmaRef")) {
      if (auto lemma = resolve(*ref, active)) {
        n.set_attr("lemma", *lemma);
        ++report.resolved;
        return;
      }
      report.dangling.push_back(*ref);
    }
    if (structurer::is_roman_numeral(n.text_content())) {
      n.set_attr("lemma", std::string(kNumeralLemma));
      ++report.numerals;
      return;
    }
    if (n.attr("lemma") == nullptr) ++report.unresolved;
  });
  return report;
}

void annotate_glossary(tei::Document& glossary, const std::map<std::string, std::string>& active,
                       const std::string& source) {
  std::function<void(Node&)> visit = [&](Node& n) {
    if (n.kind != tei::NodeKind::kElement) return;
    if (!n.is_element("entry")) {
      for (auto& c : n.children) visit(c);
      return;
    }
    const auto* id = n.attr("xml:id");
    if (!id) return;
    const auto it = active.find(*id);
    auto& ch = n.children;
    for (std::size_t i = 0; i < ch.size();) {
      if (is_alignment_form(ch[i])) {
        ch.erase(ch.begin() + static_cast<std::ptrdiff_t>(i));
        if (i > 0 && i <= ch.size() && ch[i - 1].kind == tei::NodeKind::kText) {
          ch.erase(ch.begin() + static_cast<std::ptrdiff_t>(i - 1));
          --i;
        }
      } else {
        ++i;
      }
    }
    if (it == active.end()) return;
    for (std::size_t i = 0; i < ch.size(); ++i) {
      if (!ch[i].is_element("form")) continue;
      Node form = Node::element("form");
      form.set_attr("source", source);
      form.set_attr("type", "lmlv");
      form.set_attr("cert", "high");
      form.children.push_back(Node::text_node(it->second));
      const std::string ws = i > 0 && ch[i - 1].kind == tei::NodeKind::kText ? ch[i - 1].text : "\n";
      ch.insert(ch.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(form));
      ch.insert(ch.begin() + static_cast<std::ptrdiff_t>(i) + 1, Node::text_node(ws));
      break;
    }
  };
  for (auto& n : glossary.nodes) visit(n);
}

}  // namespace scriptorium::lemma_align
