// tools/scriptorium/main.cpp

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

// Command-line front end of the workbench.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/conventions.hpp"
#include "scriptorium/corpus.hpp"
#include "scriptorium/embeddings.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/eval.hpp"
#include "scriptorium/lemma_align.hpp"
#include "scriptorium/lemmatizer.hpp"
#include "scriptorium/service.hpp"
#include "scriptorium/structurer.hpp"
#include "scriptorium/tei.hpp"
#include "scriptorium/unicode.hpp"
#include "scriptorium/workbench.hpp"
#include "scriptorium/workbench_tasks.hpp"

namespace fs = std::filesystem;
namespace wb = scriptorium::workbench;
namespace la = scriptorium::lemma_align;
using scriptorium::read_file;
using scriptorium::write_file;
using wb::json;

namespace {

struct Globals {
  std::string project = ".";
};

// Runs one pipeline job in the foreground and reports it.
int run_pipeline_job(const Globals& g, wb::JobKind kind, json params) {
  wb::ProjectStore store(g.project);
  wb::JobLog log(store.root() / "jobs.log");
  const auto job = wb::run_job(store, log, kind, std::move(params));
  std::cout << job.id << " " << wb::to_string(job.kind) << " " << wb::to_string(job.state) << ": "
            << job.message << "\n";
  return job.state == wb::JobState::kDone ? 0 : 1;
}

std::string relative_to(const fs::path& root, const std::string& p) {
  const fs::path abs = fs::absolute(p);
  const auto rel = fs::relative(abs, fs::absolute(root));
  return rel.empty() || rel.native().starts_with("..") ? abs.string() : rel.generic_string();
}

// Paths given on the command line are relative to the working directory;
// defaults are relative to the project.
std::string job_path(const Globals& g, const std::string& given, const std::string& fallback) {
  return given.empty() ? fallback : relative_to(g.project, given);
}

fs::path local_path(const Globals& g, const std::string& given, const std::string& fallback) {
  return given.empty() ? fs::path(g.project) / fallback : fs::path(given);
}

scriptorium::structurer::TokenizerRules tokenizer_rules(bool no_elision, bool no_numerals) {
  scriptorium::structurer::TokenizerRules rules;
  rules.split_elision = !no_elision;
  rules.detect_numerals = !no_numerals;
  return rules;
}

struct AlignInputs {
  std::vector<la::GlossEntry> entries;
  la::LemmaLexicon lexicon;
  la::DecisionLog log;
  fs::path lexicon_file;
};

AlignInputs load_align(const Globals& g, const std::string& glossary, const std::string& lexicon) {
  auto project = scriptorium::Project::open(g.project);
  AlignInputs in;
  const fs::path gl = glossary.empty() ? wb::glossary_path(project) : fs::path(glossary);
  in.lexicon_file = lexicon.empty() ? wb::lexicon_path(project) : fs::path(lexicon);
  in.entries = la::parse_glossary(scriptorium::tei::parse_tei(read_file(gl)));
  if (fs::exists(in.lexicon_file)) in.lexicon = la::LemmaLexicon::load(in.lexicon_file);
  in.log = la::DecisionLog(project.decisions_log());
  return in;
}

std::vector<std::string> gloss_ids(const AlignInputs& in) {
  std::vector<std::string> ids;
  for (const auto& e : in.entries) ids.push_back(e.id);
  return ids;
}

std::vector<std::vector<double>> selected_points(const scriptorium::embeddings::EmbeddingTable& t,
                                                 std::size_t top,
                                                 std::vector<std::string>& labels) {
  // The vocabulary is sorted by frequency.
  const std::size_t n = top > 0 ? std::min(top, t.vocab.size()) : t.vocab.size();
  std::vector<std::vector<double>> points;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = t.vector(i);
    points.emplace_back(v.begin(), v.end());
    labels.push_back(t.vocab.words[i]);
  }
  return points;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scriptorium: recognition, structuring and lemmatization of historical texts"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("-p,--project", g.project, "Project directory")->capture_default_str();

  // init
  auto* init = app.add_subcommand("init", "Create or open a project directory");
  std::string init_dir;
  init->add_option("dir", init_dir, "Project directory")->required();

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Binarize, deskew and segment a page into lines");
  std::string pre_page, pre_gt, pre_id, pre_method = "otsu";
  int pre_gap = 4, pre_pad = 3;
  bool pre_no_deskew = false, pre_force = false;
  pre->add_option("page", pre_page, "Page image (8-bit PNG)")->required()->check(CLI::ExistingFile);
  pre->add_option("--gt", pre_gt, "Ground truth, one line per segment (default <page>.gt.txt)");
  pre->add_option("--page-id", pre_id, "Page id (default: file stem)");
  pre->add_option("--min-gap", pre_gap, "Minimum blank rows between lines")->capture_default_str();
  pre->add_option("--pad", pre_pad, "Padding around line crops")->capture_default_str();
  pre->add_option("--binarize", pre_method, "otsu or sauvola")
      ->check(CLI::IsMember({"otsu", "sauvola"}))->capture_default_str();
  pre->add_flag("--no-deskew", pre_no_deskew, "Skip skew correction");
  pre->add_flag("--force", pre_force, "Run even when an identical job is up to date");

  // augment
  auto* aug = app.add_subcommand("augment", "Add degraded copies of ground-truth lines");
  int aug_mult = 9;
  uint64_t aug_seed = 1;
  std::vector<std::string> aug_recipes;
  bool aug_force = false;
  aug->add_option("--multiplier", aug_mult, "Synthetic copies per real line")->capture_default_str();
  aug->add_option("--seed", aug_seed, "Random seed")->capture_default_str();
  aug->add_option("--recipe", aug_recipes, "Degradation recipe, e.g. blur:variant=2,radius=1");
  aug->add_flag("--force", aug_force, "Run even when an identical job is up to date");

  // train-htr
  auto* tr = app.add_subcommand("train-htr", "Train a line recognizer on the project lines");
  std::string tr_name = "htr", tr_profile;
  double tr_lr = 1e-4, tr_momentum = 0.9, tr_clip = 0.0;
  int64_t tr_iter = 10000;
  int tr_ckpt = 1000, tr_hidden = 100, tr_height = 48, tr_eval_limit = 200;
  uint64_t tr_seed = 1, tr_split_seed = 7;
  bool tr_force = false;
  tr->add_option("--name", tr_name, "Model name under models/")->capture_default_str();
  tr->add_option("--iterations", tr_iter, "Training iterations (one line each)")->capture_default_str();
  tr->add_option("--lr", tr_lr, "Learning rate")->capture_default_str();
  tr->add_option("--momentum", tr_momentum, "Momentum")->capture_default_str();
  tr->add_option("--checkpoint", tr_ckpt, "Checkpoint interval")->capture_default_str();
  tr->add_option("--hidden", tr_hidden, "LSTM units per direction")->capture_default_str();
  tr->add_option("--height", tr_height, "Normalized line height")->capture_default_str();
  tr->add_option("--clip", tr_clip, "Gradient norm clip, 0 disables")->capture_default_str();
  tr->add_option("--train-eval-limit", tr_eval_limit, "Training lines scored per checkpoint")
      ->capture_default_str();
  tr->add_option("--seed", tr_seed, "Initialization and sampling seed")->capture_default_str();
  tr->add_option("--split-seed", tr_split_seed, "Train/dev/test split seed")->capture_default_str();
  tr->add_option("--profile", tr_profile, "Convention profile gating training lines");
  tr->add_flag("--force", tr_force, "Run even when an identical job is up to date");

  // recognize
  auto* rec = app.add_subcommand("recognize", "Predict transcriptions for project lines");
  std::string rec_model = "htr";
  bool rec_all = false, rec_force = false;
  rec->add_option("--model", rec_model, "Model name")->capture_default_str();
  rec->add_flag("--all", rec_all, "Also lines that already have ground truth");
  rec->add_flag("--force", rec_force, "Run even when an identical job is up to date");

  // eval
  auto* ev = app.add_subcommand("eval", "Character error rate of a model on a split");
  std::string ev_model = "htr", ev_split = "test";
  std::size_t ev_confusion = 20;
  bool ev_force = false;
  ev->add_option("--model", ev_model, "Model name")->capture_default_str();
  ev->add_option("--split", ev_split, "train, dev, test or all")
      ->check(CLI::IsMember({"train", "dev", "test", "all"}))->capture_default_str();
  ev->add_option("--confusion", ev_confusion, "Confusion rows to print, 0 for none")
      ->capture_default_str();
  ev->add_flag("--force", ev_force, "Run even when an identical job is up to date");

  // tokenize
  auto* tok = app.add_subcommand("tokenize", "Segment text or TEI into <w>/<pc> tokens with ids");
  std::string tok_in, tok_out, tok_prefix = "w";
  uint64_t tok_start = 1;
  bool tok_force_ids = false, tok_no_elision = false, tok_no_numerals = false, tok_lines = false;
  std::string tok_abbrev;
  tok->add_option("input", tok_in, "Plain text (.txt) or TEI (.xml)");
  tok->add_flag("--from-lines", tok_lines, "Use the project's line transcriptions as input");
  tok->add_option("-o,--output", tok_out, "Output XML")->required();
  tok->add_option("--id-prefix", tok_prefix, "Token id prefix")->capture_default_str();
  tok->add_option("--id-start", tok_start, "First token number")->capture_default_str();
  tok->add_flag("--force-ids", tok_force_ids, "Renumber tokens that already have ids");
  tok->add_flag("--no-elision", tok_no_elision, "Keep apostrophes inside words");
  tok->add_flag("--no-numerals", tok_no_numerals, "Do not flag roman numerals");
  tok->add_option("--expand", tok_abbrev, "Profile whose abbreviations are expanded first");

  // pre-encode
  auto* pe = app.add_subcommand("pre-encode", "Structure raw text with folio/stanza/verse patterns");
  std::string pe_in, pe_out, pe_patterns;
  pe->add_option("input", pe_in, "Raw text")->required()->check(CLI::ExistingFile);
  pe->add_option("-o,--output", pe_out, "Output XML")->required();
  pe->add_option("--patterns", pe_patterns, "Pattern file (kind TAB regex)")->required()
      ->check(CLI::ExistingFile);

  // align-lemmas
  auto* al = app.add_subcommand("align-lemmas", "Align glossary entries to the reference lexicon");
  al->require_subcommand(1);
  std::string al_glossary, al_lexicon, al_reviewer = "cli";
  al->add_option("--glossary", al_glossary, "Glossary TEI (default from project.cfg)");
  al->add_option("--lexicon", al_lexicon, "Lexicon TSV (default from project.cfg)");
  al->add_option("--reviewer", al_reviewer, "Name recorded with decisions")->capture_default_str();
  auto* al_cand = al->add_subcommand("candidates", "List candidates for undecided entries");
  bool al_all = false;
  al_cand->add_flag("--all", al_all, "Include entries that already have a decision");
  auto* al_dec = al->add_subcommand("decide", "Record a decision for one gloss entry");
  std::string al_id, al_accept, al_new, al_pos, al_doc;
  bool al_reject = false;
  al_dec->add_option("gloss", al_id, "Gloss entry id")->required();
  auto* accept_opt = al_dec->add_option("--accept", al_accept, "Accept this lexicon lemma");
  auto* new_opt = al_dec->add_option("--new", al_new, "Create this lemma");
  auto* reject_opt = al_dec->add_flag("--reject", al_reject, "Reject all candidates");
  accept_opt->excludes(new_opt)->excludes(reject_opt);
  new_opt->excludes(reject_opt);
  al_dec->add_option("--pos", al_pos, "Part of speech of a new lemma");
  al_dec->add_option("--doc", al_doc, "Documentation of a new lemma");
  auto* al_auto = al->add_subcommand("auto", "Accept every exact folded match");
  auto* al_inj = al->add_subcommand("inject", "Write decided lemmas into a tokenized document");
  std::string al_in, al_out, al_annotated;
  al_inj->add_option("input", al_in, "Tokenized TEI")->required()->check(CLI::ExistingFile);
  al_inj->add_option("-o,--output", al_out, "Output XML")->required();
  al_inj->add_option("--annotate-glossary", al_annotated, "Also write the annotated glossary here");

  // embed
  auto* em = app.add_subcommand("embed", "Skipgram word embeddings");
  em->require_subcommand(1);
  auto* em_train = em->add_subcommand("train", "Train embeddings on a corpus");
  std::string em_corpus, em_model;
  scriptorium::embeddings::SkipgramConfig em_cfg;
  bool em_force = false;
  em_train->add_option("corpus", em_corpus, "Corpus (.txt, .xml or annotated .tsv)")->required();
  em_train->add_option("-o,--output", em_model, "Output table (default models/embeddings.bin)");
  em_train->add_option("--dim", em_cfg.dim, "Dimensions")->capture_default_str();
  em_train->add_option("--window", em_cfg.window, "Context window")->capture_default_str();
  em_train->add_option("--negatives", em_cfg.negatives, "Negative samples")->capture_default_str();
  em_train->add_option("--epochs", em_cfg.epochs, "Epochs")->capture_default_str();
  em_train->add_option("--lr", em_cfg.learning_rate, "Initial learning rate")->capture_default_str();
  em_train->add_option("--min-count", em_cfg.min_count, "Minimum word count")->capture_default_str();
  em_train->add_option("--seed", em_cfg.seed, "Seed")->capture_default_str();
  em_train->add_flag("--force", em_force, "Run even when an identical job is up to date");
  auto* em_near = em->add_subcommand("nearest", "Most similar words by cosine");
  std::string em_word;
  std::size_t em_k = 10;
  em_near->add_option("word", em_word, "Query word")->required();
  em_near->add_option("--model", em_model, "Embedding table (default models/embeddings.bin)");
  em_near->add_option("-k", em_k, "Neighbours")->capture_default_str();
  auto* em_cluster = em->add_subcommand("cluster", "Ward clustering of the most frequent words");
  std::size_t em_clusters = 8, em_top = 200;
  em_cluster->add_option("--model", em_model, "Embedding table (default models/embeddings.bin)");
  em_cluster->add_option("--clusters", em_clusters, "Number of clusters")->capture_default_str();
  em_cluster->add_option("--top", em_top, "Words used, by frequency; 0 for all")->capture_default_str();
  auto* em_proj = em->add_subcommand("project", "PCA scatter plot colored by Ward cluster");
  std::string em_svg;
  em_proj->add_option("--model", em_model, "Embedding table (default models/embeddings.bin)");
  em_proj->add_option("--clusters", em_clusters, "Number of clusters")->capture_default_str();
  em_proj->add_option("--top", em_top, "Words plotted, by frequency; 0 for all")->capture_default_str();
  em_proj->add_option("-o,--output", em_svg, "SVG file")->required();

  // lemmatize
  auto* lm = app.add_subcommand("lemmatize", "Context-aware lemmatizer");
  lm->require_subcommand(1);
  auto* lm_train = lm->add_subcommand("train", "Train on an annotated corpus (80/10/10 split)");
  std::string lm_corpus, lm_emb, lm_model;
  scriptorium::lemmatizer::LemmatizerConfig lm_cfg;
  uint64_t lm_split_seed = 7;
  bool lm_force = false;
  lm_train->add_option("corpus", lm_corpus, "Annotated corpus (surface TAB lemma)")->required();
  lm_train->add_option("--embeddings", lm_emb, "Frozen context embeddings");
  lm_train->add_option("-o,--output", lm_model, "Output model (default models/lemmatizer.model)");
  lm_train->add_option("--epochs", lm_cfg.epochs, "Epochs")->capture_default_str();
  lm_train->add_option("--lr", lm_cfg.learning_rate, "Learning rate")->capture_default_str();
  lm_train->add_option("--hidden", lm_cfg.hidden, "Hidden units")->capture_default_str();
  lm_train->add_option("--filters", lm_cfg.filters, "Convolution filters")->capture_default_str();
  lm_train->add_option("--seed", lm_cfg.seed, "Seed")->capture_default_str();
  lm_train->add_option("--split-seed", lm_split_seed, "Sentence split seed")->capture_default_str();
  lm_train->add_flag("--force", lm_force, "Run even when an identical job is up to date");
  auto* lm_apply = lm->add_subcommand("apply", "Add lemma and cert to unlemmatized <w> tokens");
  std::string lm_in, lm_out;
  lm_apply->add_option("input", lm_in, "Tokenized TEI")->required();
  lm_apply->add_option("-o,--output", lm_out, "Output XML")->required();
  lm_apply->add_option("--model", lm_model, "Lemmatizer model (default models/lemmatizer.model)");
  lm_apply->add_flag("--force", lm_force, "Run even when an identical job is up to date");
  auto* lm_eval = lm->add_subcommand("eval", "Known/unknown accuracy on the held-out sentences");
  lm_eval->add_option("corpus", lm_corpus, "Annotated corpus used for training")->required();
  lm_eval->add_option("--model", lm_model, "Lemmatizer model (default models/lemmatizer.model)");
  lm_eval->add_option("--split-seed", lm_split_seed, "Sentence split seed")->capture_default_str();

  // convert
  auto* cv = app.add_subcommand("convert", "Apply a convention profile to a transcription");
  std::string cv_profile, cv_to = "graphematic", cv_in, cv_out;
  cv->add_option("--profile", cv_profile, "Convention profile")->required()->check(CLI::ExistingFile);
  cv->add_option("--to", cv_to, "graphematic or interpreted")
      ->check(CLI::IsMember({"graphematic", "interpreted"}))->capture_default_str();
  cv->add_option("input", cv_in, "UTF-8 text")->required()->check(CLI::ExistingFile);
  cv->add_option("-o,--output", cv_out, "Output (default stdout)");

  // serve
  auto* sv = app.add_subcommand("serve", "Serve the review API");
  wb::ServiceOptions sv_opts;
  sv->add_option("--host", sv_opts.host, "Listen address")->capture_default_str();
  sv->add_option("--port", sv_opts.port, "Port, 0 for any free port")->capture_default_str();

  // jobs
  auto* jb = app.add_subcommand("jobs", "List pipeline jobs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*init) {
      auto project = scriptorium::Project::open(init_dir);
      if (!project.config().has("glossary")) project.config().set("glossary", "lexicon/glossary.xml");
      if (!project.config().has("lexicon")) project.config().set("lexicon", "lexicon/lexicon.tsv");
      project.save_config();
      std::cout << "project " << project.root().string() << ": " << project.lines().size()
                << " lines\n";
      return 0;
    }
    if (*pre) {
      json p = {{"page", relative_to(g.project, pre_page)}, {"min_gap", pre_gap}, {"pad", pre_pad},
                {"binarize", pre_method}, {"deskew", !pre_no_deskew}};
      if (!pre_gt.empty()) p["gt"] = relative_to(g.project, pre_gt);
      if (!pre_id.empty()) p["page_id"] = pre_id;
      if (pre_force) p["force"] = true;
      return run_pipeline_job(g, wb::JobKind::kPreprocess, p);
    }
    if (*aug) {
      json p = {{"multiplier", aug_mult}, {"seed", aug_seed}};
      if (!aug_recipes.empty()) p["recipes"] = aug_recipes;
      if (aug_force) p["force"] = true;
      return run_pipeline_job(g, wb::JobKind::kAugment, p);
    }
    if (*tr) {
      json p = {{"name", tr_name}, {"iterations", tr_iter}, {"learning_rate", tr_lr},
                {"momentum", tr_momentum}, {"checkpoint_interval", tr_ckpt},
                {"hidden", tr_hidden}, {"height", tr_height}, {"clip_norm", tr_clip},
                {"train_eval_limit", tr_eval_limit}, {"seed", tr_seed},
                {"split_seed", tr_split_seed}};
      if (!tr_profile.empty()) p["profile"] = relative_to(g.project, tr_profile);
      if (tr_force) p["force"] = true;
      return run_pipeline_job(g, wb::JobKind::kTrainHtr, p);
    }
    if (*rec) {
      json p = {{"model", rec_model}, {"all", rec_all}};
      if (rec_force) p["force"] = true;
      return run_pipeline_job(g, wb::JobKind::kRecognize, p);
    }
    if (*ev) {
      json p = {{"model", ev_model}, {"split", ev_split}};
      if (ev_force) p["force"] = true;
      const int rc = run_pipeline_job(g, wb::JobKind::kEval, p);
      const fs::path report =
          fs::path(g.project) / "models" / (ev_model + ".eval." + ev_split + ".json");
      if (rc == 0 && ev_confusion > 0 && fs::exists(report)) {
        std::vector<scriptorium::eval::ConfusionRow> rows;
        const json parsed = json::parse(read_file(report));
        for (const auto& r : parsed.at("confusion")) {
          rows.push_back({r.at("freq").get<std::size_t>(), r.at("pred").get<std::string>(),
                          r.at("gt").get<std::string>()});
        }
        std::cout << scriptorium::eval::format_confusion_table(rows, ev_confusion);
      }
      return rc;
    }
    if (*tok) {
      const auto rules = tokenizer_rules(tok_no_elision, tok_no_numerals);
      scriptorium::tei::Document doc;
      std::string text;
      if (tok_lines) {
        const auto project = scriptorium::Project::open(g.project);
        for (const auto& [id, r] : project.lines()) {
          if (r.origin != scriptorium::LineOrigin::kReal) continue;
          const auto& t = r.status == scriptorium::LineStatus::kCorrected ||
                                  r.status == scriptorium::LineStatus::kValidated
                              ? r.gt_text
                              : r.pred_text;
          if (t) text += *t + "\n";
        }
      } else if (tok_in.empty()) {
        throw scriptorium::ValidationError("tokenize: give an input file or --from-lines");
      } else if (fs::path(tok_in).extension() == ".xml") {
        doc = scriptorium::tei::parse_tei(read_file(tok_in));
        scriptorium::structurer::segment_document(doc, rules);
      } else {
        text = read_file(tok_in);
      }
      if (doc.nodes.empty()) {
        text = scriptorium::unicode::nfc(text);
        if (!tok_abbrev.empty()) {
          const auto profile = scriptorium::conventions::load_profile(tok_abbrev);
          text = scriptorium::conventions::expand_abbreviations(text, profile).interpreted;
        }
        doc = scriptorium::structurer::pre_encode(text, {}, rules);
      }
      scriptorium::structurer::assign_ids(doc, {tok_prefix, tok_start, 6, tok_force_ids});
      write_file(tok_out, scriptorium::tei::emit_tei(doc));
      std::cout << scriptorium::tei::tokens(doc).size() << " tokens written to " << tok_out << "\n";
      return 0;
    }
    if (*pe) {
      const auto patterns = scriptorium::structurer::PatternSet::parse(read_file(pe_patterns));
      auto doc = scriptorium::structurer::pre_encode(
          scriptorium::unicode::nfc(read_file(pe_in)), patterns);
      scriptorium::structurer::assign_ids(doc, {});
      write_file(pe_out, scriptorium::tei::emit_tei(doc));
      std::cout << scriptorium::tei::tokens(doc).size() << " tokens written to " << pe_out << "\n";
      return 0;
    }
    if (*al) {
      auto in = load_align(g, al_glossary, al_lexicon);
      const auto active = in.log.active();
      std::set<std::string> decided;
      for (const auto& d : in.log.decisions()) decided.insert(d.gloss_id);
      if (*al_cand) {
        for (const auto& e : in.entries) {
          if (!al_all && decided.contains(e.id)) continue;
          std::cout << e.id << "\t" << e.headword;
          for (const auto& c : la::propose_candidates(e, in.lexicon)) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", c.score);
            std::cout << "\t" << c.lemma << " (" << buf << ")";
          }
          std::cout << "\n";
        }
        return 0;
      }
      if (*al_dec || *al_auto) {
        const auto ids = gloss_ids(in);
        const std::size_t before = in.lexicon.size();
        std::size_t recorded = 0;
        auto record = [&](la::Decision d) {
          d.reviewer = al_reviewer;
          la::record_decision(in.log, in.lexicon, ids, std::move(d));
          ++recorded;
        };
        if (*al_dec) {
          la::Decision d;
          d.gloss_id = al_id;
          if (!al_accept.empty()) {
            d.action = la::Action::kAccept;
            d.lemma = scriptorium::unicode::nfc(al_accept);
          } else if (!al_new.empty()) {
            d.action = la::Action::kNew;
            d.lemma = scriptorium::unicode::nfc(al_new);
            d.pos = al_pos;
            d.documentation = al_doc;
          } else if (al_reject) {
            d.action = la::Action::kReject;
          } else {
            throw scriptorium::ValidationError("decide: give --accept, --new or --reject");
          }
          for (const auto& e : in.entries) {
            if (e.id == al_id) d.candidates = la::propose_candidates(e, in.lexicon);
          }
          record(std::move(d));
        } else {
          for (const auto& e : in.entries) {
            if (decided.contains(e.id)) continue;
            const auto cands = la::propose_candidates(e, in.lexicon);
            if (cands.empty()) continue;
            if (la::fold_diacritics(cands.front().lemma) != la::fold_diacritics(e.headword)) continue;
            la::Decision d;
            d.gloss_id = e.id;
            d.action = la::Action::kAccept;
            d.lemma = cands.front().lemma;
            d.candidates = cands;
            record(std::move(d));
          }
        }
        if (in.lexicon.size() != before) in.lexicon.save(in.lexicon_file);
        std::cout << recorded << " decision(s) recorded\n";
        return 0;
      }
      if (*al_inj) {
        auto doc = scriptorium::tei::parse_tei(read_file(al_in));
        const auto report = la::inject_lemmas(doc, active);
        write_file(al_out, scriptorium::tei::emit_tei(doc));
        if (!al_annotated.empty()) {
          const auto project = scriptorium::Project::open(g.project);
          const fs::path gl = al_glossary.empty() ? wb::glossary_path(project) : fs::path(al_glossary);
          auto glossary = scriptorium::tei::parse_tei(read_file(gl));
          la::annotate_glossary(glossary, active);
          write_file(al_annotated, scriptorium::tei::emit_tei(glossary));
        }
        std::cout << report.resolved << " resolved, " << report.numerals << " numerals, "
                  << report.unresolved << " unresolved";
        if (!report.dangling.empty()) {
          std::cout << "; dangling:";
          for (const auto& d : report.dangling) std::cout << " " << d;
        }
        std::cout << "\n";
        return 0;
      }
    }
    if (*em_train) {
      json p = {{"corpus", relative_to(g.project, em_corpus)}, {"output", job_path(g, em_model, "models/embeddings.bin")},
                {"dim", em_cfg.dim}, {"window", em_cfg.window}, {"negatives", em_cfg.negatives},
                {"epochs", em_cfg.epochs}, {"learning_rate", em_cfg.learning_rate},
                {"min_count", em_cfg.min_count}, {"seed", em_cfg.seed}};
      if (em_force) p["force"] = true;
      return run_pipeline_job(g, wb::JobKind::kEmbed, p);
    }
    if (*em_near || *em_cluster || *em_proj) {
      const auto table = scriptorium::embeddings::EmbeddingTable::load(
          local_path(g, em_model, "models/embeddings.bin"));
      if (*em_near) {
        for (const auto& [w, s] : scriptorium::embeddings::nearest(table, em_word, em_k)) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.4f", s);
          std::cout << w << "\t" << buf << "\n";
        }
        return 0;
      }
      std::vector<std::string> labels;
      const auto points = selected_points(table, em_top, labels);
      const auto clusters = scriptorium::embeddings::cluster_ward(points, em_clusters);
      if (*em_cluster) {
        for (std::size_t i = 0; i < labels.size(); ++i) std::cout << clusters[i] << "\t" << labels[i] << "\n";
        return 0;
      }
      const auto proj = scriptorium::embeddings::project_2d(points);
      write_file(em_svg, scriptorium::embeddings::scatter_svg(proj.coords, labels, clusters));
      std::cout << labels.size() << " words plotted to " << em_svg << "\n";
      return 0;
    }
    if (*lm_train) {
      json p = {{"corpus", relative_to(g.project, lm_corpus)}, {"output", job_path(g, lm_model, "models/lemmatizer.model")},
                {"epochs", lm_cfg.epochs}, {"learning_rate", lm_cfg.learning_rate},
                {"hidden", lm_cfg.hidden}, {"filters", lm_cfg.filters}, {"seed", lm_cfg.seed},
                {"split_seed", lm_split_seed}};
      if (!lm_emb.empty()) p["embeddings"] = relative_to(g.project, lm_emb);
      if (lm_force) p["force"] = true;
      return run_pipeline_job(g, wb::JobKind::kLemmatizeTrain, p);
    }
    if (*lm_apply) {
      json p = {{"input", relative_to(g.project, lm_in)}, {"output", relative_to(g.project, lm_out)},
                {"model", job_path(g, lm_model, "models/lemmatizer.model")}};
      if (lm_force) p["force"] = true;
      return run_pipeline_job(g, wb::JobKind::kLemmatizeApply, p);
    }
    if (*lm_eval) {
      namespace lz = scriptorium::lemmatizer;
      const auto model = lz::LemmatizerModel::load(local_path(g, lm_model, "models/lemmatizer.model"));
      const auto sentences = wb::read_annotated_corpus(lm_corpus);
      std::vector<std::string> ids;
      for (std::size_t i = 0; i < sentences.size(); ++i) ids.push_back(std::to_string(i));
      const auto split = scriptorium::split_dataset(ids, scriptorium::kDefaultSplitRatios, lm_split_seed);
      auto collect = [&](const std::vector<std::string>& part) {
        std::vector<lz::AnnotatedToken> out;
        for (const auto& id : part) {
          const auto& s = sentences.at(std::stoul(id));
          const auto t = lz::in_context(s.surfaces, s.lemmas);
          out.insert(out.end(), t.begin(), t.end());
        }
        return out;
      };
      const auto train = collect(split.train_ids);
      const auto test = collect(split.test_ids);
      std::vector<std::string> surfaces;
      for (const auto& t : train) surfaces.push_back(t.surface);
      const auto r = lz::evaluate(model, test, surfaces);
      const std::vector<std::string> majority(test.size(), lz::majority_lemma(train));
      const auto b = lz::evaluate_predictions(test, majority, surfaces);
      auto fmt = [](const std::optional<double>& v) {
        if (!v) return std::string("NA");
        char buf[16];
        std::snprintf(buf, sizeof buf, "%.4f", *v);
        return std::string(buf);
      };
      std::cout << "bucket\tn\tmodel\tmajority\n"
                << "all\t" << r.n_all << "\t" << fmt(r.accuracy_all) << "\t" << fmt(b.accuracy_all) << "\n"
                << "known\t" << r.n_known << "\t" << fmt(r.accuracy_known) << "\t"
                << fmt(b.accuracy_known) << "\n"
                << "unknown\t" << r.n_unknown << "\t" << fmt(r.accuracy_unknown) << "\t"
                << fmt(b.accuracy_unknown) << "\n";
      return 0;
    }
    if (*cv) {
      const auto profile = scriptorium::conventions::load_profile(cv_profile);
      const auto text = scriptorium::unicode::nfc(read_file(cv_in));
      const std::string out = cv_to == "graphematic"
                                  ? scriptorium::conventions::to_graphematic(text, profile)
                                  : scriptorium::conventions::expand_abbreviations(text, profile).interpreted;
      if (cv_out.empty()) {
        std::cout << out;
      } else {
        write_file(cv_out, out);
      }
      return 0;
    }
    if (*sv) {
      wb::ProjectStore store(g.project);
      wb::JobLog log(store.root() / "jobs.log");
      wb::JobQueue queue(store, log);
      wb::Service service(store, log, queue, sv_opts);
      const int port = service.bind();
      std::cout << "serving " << store.root().string() << " on http://" << sv_opts.host << ":"
                << port << "/api/" << std::endl;
      service.listen();
      return 0;
    }
    if (*jb) {
      const auto project = scriptorium::Project::open(g.project);
      for (const auto& j : wb::read_jobs(project.jobs_log())) {
        std::cout << j.id << "\t" << wb::to_string(j.kind) << "\t" << wb::to_string(j.state) << "\t"
                  << j.message << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
