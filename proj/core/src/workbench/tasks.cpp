// core/src/workbench/tasks.cpp

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
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/conventions.hpp"
#include "scriptorium/embeddings.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/eval.hpp"
#include "scriptorium/imaging.hpp"
#include "scriptorium/lemmatizer.hpp"
#include "scriptorium/recognizer.hpp"
#include "scriptorium/structurer.hpp"
#include "scriptorium/unicode.hpp"
#include "scriptorium/workbench_tasks.hpp"

namespace scriptorium::workbench {
namespace fs = std::filesystem;

namespace {

std::string project_relative(const fs::path& root, const fs::path& p) {
  return fs::relative(p, root).generic_string();
}

bool has_truth(const LineRecord& r) {
  return r.gt_text && (r.status == LineStatus::kCorrected || r.status == LineStatus::kValidated);
}

std::vector<std::string> read_text_lines(const fs::path& p) {
  std::istringstream in(read_file(p));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

fs::path model_path(const fs::path& root, const std::string& name, const std::string& suffix) {
  return root / "models" / (name + suffix);
}

json split_to_json(const DatasetSplit& s) {
  return {{"train", s.train_ids}, {"dev", s.dev_ids}, {"test", s.test_ids}, {"seed", s.seed}};
}

std::vector<std::string> split_part(const json& split, const std::string& part) {
  if (part == "all") {
    std::vector<std::string> out;
    for (const char* k : {"train", "dev", "test"}) {
      const auto v = split.at(k).get<std::vector<std::string>>();
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }
  if (!split.contains(part)) throw ValidationError("unknown split '" + part + "'");
  return split.at(part).get<std::vector<std::string>>();
}

// --- preprocess ---------------------------------------------------------------

TaskResult preprocess(ProjectStore& store, const json& params) {
  const fs::path root = store.root();
  if (!params.contains("page")) throw ValidationError("preprocess: missing 'page'");
  const fs::path page = resolve_path(root, params.at("page").get<std::string>());
  const std::string page_id = params.value("page_id", page.stem().string());
  const int min_gap = params.value("min_gap", 4);
  const int pad = params.value("pad", 3);

  const auto gray = imaging::read_png(page);
  imaging::BinarizeOptions bopt;
  if (params.value("binarize", std::string("otsu")) == "sauvola") {
    bopt.method = imaging::BinarizeMethod::kSauvola;
  }
  auto binary = imaging::binarize(gray, bopt);
  auto straight = gray;
  double angle = 0.0;
  if (params.value("deskew", true)) {
    auto d = imaging::deskew(binary);
    angle = d.angle;
    if (angle != 0.0) {
      straight = imaging::rotate(gray, angle);
      binary = std::move(d.image);
    }
  }
  const auto boxes = imaging::segment_lines(binary, min_gap);

  std::vector<std::string> truth;
  fs::path gt_path = page;
  gt_path.replace_extension(".gt.txt");
  if (params.contains("gt")) gt_path = resolve_path(root, params["gt"].get<std::string>());
  const bool with_truth = fs::exists(gt_path);
  if (with_truth) {
    truth = read_text_lines(gt_path);
    if (truth.size() != boxes.size()) {
      throw ValidationError("preprocess: " + gt_path.filename().string() + " has " +
                            std::to_string(truth.size()) + " lines but the page has " +
                            std::to_string(boxes.size()) + " segments");
    }
  }

  TaskResult result;
  store.write([&](Project& project) {
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      LineRecord rec;
      rec.id = page_id + "_l" + format_id(i + 1, 4);
      rec.page_id = page_id;
      rec.bbox = boxes[i];
      rec.image_path = project.line_image_path(rec.id);
      imaging::write_png(rec.image_path, imaging::crop(straight, boxes[i], pad));
      if (with_truth) {
        rec.gt_text = clean_line_text(truth[i]);
        rec.status = LineStatus::kValidated;
      }
      project.save_line(rec);
      result.artifacts.push_back(project_relative(root, rec.image_path));
      result.artifacts.push_back(project_relative(root, project.lines_dir() / (rec.id + ".meta.json")));
      if (with_truth) {
        result.artifacts.push_back(project_relative(root, project.lines_dir() / (rec.id + ".gt.txt")));
      }
    }
  });
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu lines, skew %.1f deg", boxes.size(), angle);
  result.message = buf;
  return result;
}

// --- augment ------------------------------------------------------------------

TaskResult augment(ProjectStore& store, const json& params) {
  const fs::path root = store.root();
  const int multiplier = params.value("multiplier", 9);
  const uint64_t seed = params.value("seed", uint64_t{1});
  std::vector<imaging::DegradationRecipe> recipes;
  if (params.contains("recipes")) {
    for (const auto& r : params["recipes"]) recipes.push_back(imaging::DegradationRecipe::parse(r.get<std::string>()));
  } else {
    recipes = imaging::default_recipes();
  }
  std::vector<imaging::LineSample> real;
  store.read([&](const Project& project) {
    for (const auto& [id, rec] : project.lines()) {
      if (rec.origin == LineOrigin::kReal && has_truth(rec)) {
        real.push_back({rec, imaging::read_png(rec.image_path)});
      }
    }
    return 0;
  });
  if (real.empty()) throw ValidationError("augment: no real line with ground truth");
  auto synthetic = imaging::expand_ground_truth(real, multiplier, recipes, seed);
  TaskResult result;
  store.write([&](Project& project) {
    for (auto& s : synthetic) {
      s.record.image_path = project.line_image_path(s.record.id);
      imaging::write_png(s.record.image_path, s.image);
      project.save_line(s.record);
      result.artifacts.push_back(project_relative(root, s.record.image_path));
      result.artifacts.push_back(project_relative(root, project.lines_dir() / (s.record.id + ".meta.json")));
      result.artifacts.push_back(project_relative(root, project.lines_dir() / (s.record.id + ".gt.txt")));
    }
  });
  result.message = std::to_string(synthetic.size()) + " synthetic lines from " +
                   std::to_string(real.size()) + " real lines";
  return result;
}

// --- train_htr ----------------------------------------------------------------

TaskResult train_htr(ProjectStore& store, const json& params) {
  const fs::path root = store.root();
  const std::string name = params.value("name", std::string("htr"));
  recognizer::TrainingConfig cfg;
  cfg.learning_rate = params.value("learning_rate", cfg.learning_rate);
  cfg.momentum = params.value("momentum", cfg.momentum);
  cfg.max_iterations = params.value("iterations", cfg.max_iterations);
  cfg.checkpoint_interval = params.value("checkpoint_interval", cfg.checkpoint_interval);
  cfg.hidden_size = params.value("hidden", cfg.hidden_size);
  cfg.input_height = params.value("height", cfg.input_height);
  cfg.seed = params.value("seed", cfg.seed);
  cfg.clip_norm = params.value("clip_norm", cfg.clip_norm);
  cfg.train_eval_limit = params.value("train_eval_limit", cfg.train_eval_limit);
  cfg.keep_checkpoints = true;
  const uint64_t split_seed = params.value("split_seed", uint64_t{7});

  std::optional<conventions::ConventionProfile> profile;
  if (params.contains("profile")) {
    profile = conventions::load_profile(resolve_path(root, params["profile"].get<std::string>()));
  }

  std::vector<LineRecord> real, synthetic;
  store.read([&](const Project& project) {
    for (const auto& [id, rec] : project.lines()) {
      if (!has_truth(rec)) continue;
      (rec.origin == LineOrigin::kReal ? real : synthetic).push_back(rec);
    }
    return 0;
  });
  std::size_t gated = 0;
  auto admissible = [&](const LineRecord& r) {
    if (!profile || conventions::validate_transcription(*r.gt_text, *profile).empty()) return true;
    ++gated;
    return false;
  };
  std::vector<std::string> ids;
  for (const auto& r : real) ids.push_back(r.id);
  if (ids.empty()) throw ValidationError("empty dev set");
  const auto split = split_dataset(ids, kDefaultSplitRatios, split_seed);
  const std::set<std::string> train_ids(split.train_ids.begin(), split.train_ids.end());
  const std::set<std::string> dev_ids(split.dev_ids.begin(), split.dev_ids.end());

  std::vector<imaging::LineSample> train, dev;
  std::vector<std::string> texts;
  for (const auto& r : real) {
    texts.push_back(*r.gt_text);
    if (!admissible(r)) continue;
    if (train_ids.contains(r.id)) train.push_back({r, imaging::read_png(r.image_path)});
    if (dev_ids.contains(r.id)) dev.push_back({r, imaging::read_png(r.image_path)});
  }
  for (const auto& r : synthetic) {
    if (r.parent_id && train_ids.contains(*r.parent_id) && admissible(r)) {
      train.push_back({r, imaging::read_png(r.image_path)});
    }
  }
  if (dev.empty()) throw ValidationError("empty dev set");
  if (train.empty()) throw ValidationError("empty training set");
  const auto inventory = recognizer::CharacterInventory::from_texts(texts);

  auto run = recognizer::train(train, dev, inventory, cfg);
  if (run.history.empty()) throw ValidationError("train_htr: no checkpoint was produced");
  std::vector<std::pair<int64_t, double>> scores;
  for (const auto& h : run.history) scores.emplace_back(h.iteration, h.dev_cer);
  const auto best = eval::select_best(scores);
  auto model = run.checkpoints.at(best.index).model;
  model.checkpoint_iter = best.iteration;
  model.dev_cer = best.dev_cer;

  TaskResult result;
  const auto model_file = model_path(root, name, ".model");
  model.save(model_file);
  json history = json::array();
  for (const auto& h : run.history) {
    history.push_back({{"iteration", h.iteration}, {"train_loss", h.train_loss},
                       {"train_error", h.train_error}, {"train_error_all", h.train_error_all},
                       {"dev_cer", h.dev_cer}});
  }
  json meta = {{"history", history}, {"best_iteration", best.iteration}, {"dev_cer", best.dev_cer},
               {"train_lines", train.size()}, {"dev_lines", dev.size()},
               {"skipped_lines", run.skipped_lines}, {"gated_lines", gated}};
  write_file(model_path(root, name, ".history.json"), meta.dump(2));
  write_file(model_path(root, name, ".split.json"), split_to_json(split).dump(2));
  write_file(model_path(root, name, ".curve.svg"), learning_curve_svg(run.history));
  for (const char* suffix : {".model", ".history.json", ".split.json", ".curve.svg"}) {
    result.artifacts.push_back(project_relative(root, model_path(root, name, suffix)));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "best iteration %lld, dev CER %.4f",
                static_cast<long long>(best.iteration), best.dev_cer);
  result.message = buf;
  return result;
}

// --- recognize / eval -----------------------------------------------------------

TaskResult recognize_lines(ProjectStore& store, const json& params) {
  const fs::path root = store.root();
  const std::string name = params.value("model", std::string("htr"));
  const bool all = params.value("all", false);
  const auto model = recognizer::RecognizerModel::load(model_path(root, name, ".model"));
  std::vector<LineRecord> todo;
  store.read([&](const Project& project) {
    for (const auto& [id, rec] : project.lines()) {
      if (rec.origin != LineOrigin::kReal) continue;
      if (all || !rec.gt_text) todo.push_back(rec);
    }
    return 0;
  });
  std::vector<std::pair<LineRecord, std::string>> results;
  for (const auto& rec : todo) {
    results.emplace_back(rec, recognizer::recognize(model, imaging::read_png(rec.image_path)).text);
  }
  TaskResult result;
  store.write([&](Project& project) {
    for (auto& [rec, text] : results) {
      rec.pred_text = text;
      if (rec.status == LineStatus::kUnseen) rec.status = LineStatus::kPredicted;
      project.save_line(rec);
      result.artifacts.push_back(project_relative(root, project.lines_dir() / (rec.id + ".pred.txt")));
    }
  });
  result.message = std::to_string(results.size()) + " lines recognized";
  return result;
}

TaskResult evaluate_model(ProjectStore& store, const json& params) {
  const fs::path root = store.root();
  const std::string name = params.value("model", std::string("htr"));
  const std::string part = params.value("split", std::string("test"));
  std::vector<std::string> ids;
  if (params.contains("lines")) {
    ids = params["lines"].get<std::vector<std::string>>();
  } else {
    const auto split_file = model_path(root, name, ".split.json");
    if (fs::exists(split_file)) ids = split_part(json::parse(read_file(split_file)), part);
  }
  std::vector<LineRecord> lines;
  store.read([&](const Project& project) {
    for (const auto& id : ids) {
      const auto* rec = project.find_line(id);
      if (rec && has_truth(*rec)) lines.push_back(*rec);
    }
    return 0;
  });
  if (lines.empty()) throw ValidationError("empty dev set");
  const auto model = recognizer::RecognizerModel::load(model_path(root, name, ".model"));
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string diff;
  for (const auto& rec : lines) {
    const auto pred = recognizer::recognize(model, imaging::read_png(rec.image_path)).text;
    pairs.emplace_back(*rec.gt_text, pred);
    diff += eval::aligned_diff(rec.id, *rec.gt_text, pred);
  }
  const auto report = eval::evaluate(pairs);
  TaskResult result;
  const auto report_file = model_path(root, name, ".eval." + part + ".json");
  const auto diff_file = model_path(root, name, ".diff." + part + ".txt");
  write_file(report_file, eval::report_to_json(report));
  write_file(diff_file, diff);
  result.artifacts = {project_relative(root, report_file), project_relative(root, diff_file)};
  char buf[96];
  std::snprintf(buf, sizeof buf, "CER %.4f on %zu lines", report.cer, lines.size());
  result.message = buf;
  return result;
}

// --- embeddings / lemmatizer -------------------------------------------------------

TaskResult train_embeddings(ProjectStore& store, const json& params) {
  const fs::path root = store.root();
  if (!params.contains("corpus")) throw ValidationError("embed: missing 'corpus'");
  const auto words = read_word_stream(resolve_path(root, params["corpus"].get<std::string>()));
  embeddings::SkipgramConfig cfg;
  cfg.dim = params.value("dim", cfg.dim);
  cfg.window = params.value("window", cfg.window);
  cfg.negatives = params.value("negatives", cfg.negatives);
  cfg.epochs = params.value("epochs", cfg.epochs);
  cfg.learning_rate = params.value("learning_rate", cfg.learning_rate);
  cfg.min_count = params.value("min_count", cfg.min_count);
  cfg.seed = params.value("seed", cfg.seed);
  const auto table = embeddings::train_skipgram(words, cfg);
  const auto out = resolve_path(root, params.value("output", std::string("models/embeddings.bin")));
  table.save(out);
  TaskResult result;
  result.artifacts = {project_relative(root, out)};
  result.message = std::to_string(table.vocab.size()) + " words, d=" + std::to_string(table.dim);
  return result;
}

std::vector<lemmatizer::AnnotatedToken> tokens_of(const std::vector<AnnotatedSentence>& sentences,
                                                  const std::vector<std::string>& ids) {
  std::vector<lemmatizer::AnnotatedToken> out;
  for (const auto& id : ids) {
    const auto& s = sentences.at(std::stoul(id));
    auto t = lemmatizer::in_context(s.surfaces, s.lemmas);
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

TaskResult train_lemmatizer(ProjectStore& store, const json& params) {
  const fs::path root = store.root();
  if (!params.contains("corpus")) throw ValidationError("lemmatize_train: missing 'corpus'");
  const auto sentences = read_annotated_corpus(resolve_path(root, params["corpus"].get<std::string>()));
  embeddings::EmbeddingTable table;
  if (params.contains("embeddings")) {
    table = embeddings::EmbeddingTable::load(resolve_path(root, params["embeddings"].get<std::string>()));
  }
  lemmatizer::LemmatizerConfig cfg;
  cfg.epochs = params.value("epochs", cfg.epochs);
  cfg.learning_rate = params.value("learning_rate", cfg.learning_rate);
  cfg.seed = params.value("seed", cfg.seed);
  cfg.hidden = params.value("hidden", cfg.hidden);
  cfg.filters = params.value("filters", cfg.filters);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < sentences.size(); ++i) ids.push_back(std::to_string(i));
  const auto split = split_dataset(ids, kDefaultSplitRatios, params.value("split_seed", uint64_t{7}));
  const auto train = tokens_of(sentences, split.train_ids);
  const auto dev = tokens_of(sentences, split.dev_ids);
  const auto test = tokens_of(sentences, split.test_ids);
  const auto model = lemmatizer::train(train, dev, std::move(table), cfg);
  const auto out = resolve_path(root, params.value("output", std::string("models/lemmatizer.model")));
  model.save(out);

  std::vector<std::string> surfaces;
  for (const auto& t : train) surfaces.push_back(t.surface);
  json report = {{"epoch", model.epoch}, {"dev_accuracy", model.dev_accuracy},
                 {"final_epoch_dev_accuracy",
                  model.history.empty() ? 0.0 : model.history.back().dev_accuracy}};
  if (!test.empty()) {
    const auto r = lemmatizer::evaluate(model, test, surfaces);
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json("NA"); };
    report["test"] = {{"all", r.accuracy_all}, {"known", opt(r.accuracy_known)},
                      {"unknown", opt(r.accuracy_unknown)}, {"n_known", r.n_known},
                      {"n_unknown", r.n_unknown}};
    const std::vector<std::string> majority(test.size(), lemmatizer::majority_lemma(train));
    const auto b = lemmatizer::evaluate_predictions(test, majority, surfaces);
    report["baseline"] = {{"all", b.accuracy_all}, {"known", opt(b.accuracy_known)},
                          {"unknown", opt(b.accuracy_unknown)}};
  }
  fs::path report_file = out;
  report_file.replace_extension(".eval.json");
  write_file(report_file, report.dump(2));
  TaskResult result;
  result.artifacts = {project_relative(root, out), project_relative(root, report_file)};
  char buf[96];
  std::snprintf(buf, sizeof buf, "best epoch %d, dev accuracy %.4f", model.epoch, model.dev_accuracy);
  result.message = buf;
  return result;
}

TaskResult apply_lemmatizer(ProjectStore& store, const json& params) {
  const fs::path root = store.root();
  if (!params.contains("input")) throw ValidationError("lemmatize_apply: missing 'input'");
  const auto model = lemmatizer::LemmatizerModel::load(
      resolve_path(root, params.value("model", std::string("models/lemmatizer.model"))));
  const auto input = resolve_path(root, params["input"].get<std::string>());
  fs::path output = input;
  output.replace_extension(".lemmatized.xml");
  if (params.contains("output")) output = resolve_path(root, params["output"].get<std::string>());
  auto doc = tei::parse_tei(read_file(input));
  const auto n = lemmatize_document(doc, model);
  write_file(output, tei::emit_tei(doc));
  TaskResult result;
  result.artifacts = {project_relative(root, output)};
  result.message = std::to_string(n) + " tokens lemmatized";
  return result;
}

}  // namespace

fs::path resolve_path(const fs::path& root, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : root / path;
}

TaskResult run_task(ProjectStore& store, JobKind kind, const json& params) {
  switch (kind) {
    case JobKind::kPreprocess: return preprocess(store, params);
    case JobKind::kAugment: return augment(store, params);
    case JobKind::kTrainHtr: return train_htr(store, params);
    case JobKind::kRecognize: return recognize_lines(store, params);
    case JobKind::kEval: return evaluate_model(store, params);
    case JobKind::kEmbed: return train_embeddings(store, params);
    case JobKind::kLemmatizeTrain: return train_lemmatizer(store, params);
    case JobKind::kLemmatizeApply: return apply_lemmatizer(store, params);
  }
  throw ValidationError("unknown job kind");
}

std::vector<AnnotatedSentence> read_annotated_corpus(const fs::path& path) {
  std::vector<AnnotatedSentence> out(1);
  int line_no = 0;
  for (const auto& line : read_text_lines(path)) {
    ++line_no;
    if (line.empty()) {
      if (!out.back().surfaces.empty()) out.emplace_back();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("annotated corpus: expected surface<TAB>lemma", line_no, 1);
    out.back().surfaces.push_back(unicode::nfc(line.substr(0, tab)));
    out.back().lemmas.push_back(unicode::nfc(line.substr(tab + 1)));
  }
  if (out.back().surfaces.empty()) out.pop_back();
  if (out.empty()) throw ValidationError("annotated corpus " + path.string() + " is empty");
  return out;
}

void write_annotated_corpus(const fs::path& path, const std::vector<AnnotatedSentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.surfaces.size(); ++i) out += s.surfaces[i] + "\t" + s.lemmas[i] + "\n";
    out += "\n";
  }
  write_file(path, out);
}

std::vector<std::string> read_word_stream(const fs::path& path) {
  std::vector<std::string> words;
  const auto ext = path.extension().string();
  if (ext == ".xml") {
    for (const auto& t : tei::tokens(tei::parse_tei(read_file(path)))) {
      if (t.kind == tei::TokenKind::kWord) words.push_back(unicode::nfc(t.surface));
    }
  } else if (ext == ".tsv") {
    for (const auto& s : read_annotated_corpus(path)) {
      words.insert(words.end(), s.surfaces.begin(), s.surfaces.end());
    }
  } else {
    for (const auto& line : read_text_lines(path)) {
      for (const auto& t : structurer::tokenize(unicode::nfc(line))) {
        if (t.kind == tei::TokenKind::kWord) words.push_back(t.surface);
      }
    }
  }
  if (words.empty()) throw ValidationError("corpus " + path.string() + " has no words");
  return words;
}

std::size_t lemmatize_document(tei::Document& doc, const lemmatizer::LemmatizerModel& model) {
  std::vector<tei::Node*> words;
  tei::for_each_token(doc, [&](tei::Node& n) {
    if (n.is_element("w")) words.push_back(&n);
  });
  std::vector<std::string> surfaces;
  for (const auto* w : words) surfaces.push_back(w->text_content());
  const auto tokens = lemmatizer::in_context(surfaces);
  std::size_t n = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i]->attr("lemma")) continue;
    const auto p = lemmatizer::predict(model, tokens[i]);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.3f", p.confidence);
    words[i]->set_attr("lemma", p.lemma);
    words[i]->set_attr("cert", buf);
    ++n;
  }
  return n;
}

std::string learning_curve_svg(const std::vector<recognizer::HistoryEntry>& history) {
  constexpr double kW = 640, kH = 400, kLeft = 50, kRight = 20, kTop = 20, kBottom = 40;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (history.empty()) {
    out << "</svg>\n";
    return out.str();
  }
  const double max_iter = static_cast<double>(history.back().iteration);
  double max_err = 0.0;
  for (const auto& h : history) max_err = std::max({max_err, h.train_error, h.dev_cer});
  if (max_err <= 0.0) max_err = 1.0;
  auto px = [&](double it) { return kLeft + it / max_iter * (kW - kLeft - kRight); };
  auto py = [&](double e) { return kH - kBottom - e / max_err * (kH - kTop - kBottom); };
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight
      << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kH - kBottom << "\" stroke=\"black\"/>\n";
  auto series = [&](auto value, const char* color, const char* label, double y) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (const auto& h : history) out << px(static_cast<double>(h.iteration)) << "," << py(value(h)) << " ";
    out << "\"/>\n<text x=\"" << kW - 150 << "\" y=\"" << y << "\" fill=\"" << color
        << "\" font-size=\"12\" font-family=\"sans-serif\">" << label << "</text>\n";
  };
  series([](const auto& h) { return h.train_error; }, "#1f77b4", "train error", kTop + 12);
  series([](const auto& h) { return h.dev_cer; }, "#d62728", "dev CER", kTop + 28);
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 8
      << "\" font-size=\"12\" font-family=\"sans-serif\">iteration</text>\n</svg>\n";
  return out.str();
}

}  // namespace scriptorium::workbench
