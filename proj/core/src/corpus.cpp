// core/src/corpus.cpp

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

#include "scriptorium/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/random.hpp"
#include "scriptorium/unicode.hpp"

namespace scriptorium {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(LineStatus status) {
  switch (status) {
    case LineStatus::kUnseen: return "unseen";
    case LineStatus::kPredicted: return "predicted";
    case LineStatus::kCorrected: return "corrected";
    case LineStatus::kValidated: return "validated";
  }
  return "unseen";
}

std::string to_string(LineOrigin origin) {
  return origin == LineOrigin::kReal ? "real" : "synthetic";
}

LineStatus parse_line_status(const std::string& s) {
  if (s == "unseen") return LineStatus::kUnseen;
  if (s == "predicted") return LineStatus::kPredicted;
  if (s == "corrected") return LineStatus::kCorrected;
  if (s == "validated") return LineStatus::kValidated;
  throw ValidationError("unknown line status '" + s + "'");
}

LineOrigin parse_line_origin(const std::string& s) {
  if (s == "real") return LineOrigin::kReal;
  if (s == "synthetic") return LineOrigin::kSynthetic;
  throw ValidationError("unknown line origin '" + s + "'");
}

void LineRecord::validate() const {
  auto has_newline = [](const std::optional<std::string>& t) {
    return t && t->find_first_of("\r\n") != std::string::npos;
  };
  if (id.empty()) throw ValidationError("line record without id");
  if (has_newline(gt_text) || has_newline(pred_text)) {
    throw ValidationError("line " + id + ": text contains a newline");
  }
  if ((status == LineStatus::kCorrected || status == LineStatus::kValidated) &&
      !gt_text) {
    throw ValidationError("line " + id + ": status " + to_string(status) +
                          " requires ground truth");
  }
  if (origin == LineOrigin::kSynthetic && (!parent_id || parent_id->empty())) {
    throw ValidationError("synthetic line " + id + " has no parent id");
  }
}

std::string format_id(uint64_t n, int width) {
  std::ostringstream ss;
  ss << std::setw(width) << std::setfill('0') << n;
  return ss.str();
}

std::string clean_line_text(std::string_view text) {
  std::string_view t = text;
  while (!t.empty() && (t.back() == '\n' || t.back() == '\r')) t.remove_suffix(1);
  if (t.find_first_of("\r\n") != std::string_view::npos) {
    throw ValidationError("line text contains a newline");
  }
  return unicode::nfc(t);
}

DatasetSplit split_dataset(std::span<const std::string> ids,
                           std::array<double, 3> ratios, uint64_t seed) {
  if (ids.empty()) throw ValidationError("split_dataset: empty id set");
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9 || ratios[0] < 0 || ratios[1] < 0 ||
      ratios[2] < 0) {
    throw ValidationError("split_dataset: ratios must be non-negative and sum to 1");
  }
  std::vector<std::string> shuffled(ids.begin(), ids.end());
  // Sort first so the result depends on the id set, not the input order.
  std::sort(shuffled.begin(), shuffled.end());
  if (std::adjacent_find(shuffled.begin(), shuffled.end()) != shuffled.end()) {
    throw ValidationError("split_dataset: duplicate ids");
  }
  Rng rng(seed);
  rng.shuffle(std::span<std::string>(shuffled));

  const auto n = static_cast<long long>(shuffled.size());
  long long n_train = std::llround(static_cast<double>(n) * ratios[0]);
  long long n_dev = std::llround(static_cast<double>(n) * ratios[1]);
  n_train = std::min(n_train, n);
  n_dev = std::min(n_dev, n - n_train);

  DatasetSplit split;
  split.seed = seed;
  auto it = shuffled.begin();
  split.train_ids.assign(it, it + n_train);
  split.dev_ids.assign(it + n_train, it + n_train + n_dev);
  split.test_ids.assign(it + n_train + n_dev, shuffled.end());
  return split;
}

// --- Config ---------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
           c == '-';
  });
}

}  // namespace

Config Config::parse(std::string_view text) {
  Config config;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(t, "line " + std::to_string(lineno) + " has no '='");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (!valid_key(key)) {
      throw ConfigError(key, "line " + std::to_string(lineno) + ": invalid key");
    }
    if (config.values_.contains(key)) {
      throw ConfigError(key, "line " + std::to_string(lineno) + ": duplicate key");
    }
    config.values_[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return config;
}

std::string Config::serialize() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

void Config::set(const std::string& key, std::string value) {
  if (!valid_key(key)) throw ConfigError(key, "invalid key");
  if (value.find('\n') != std::string::npos || trim(value) != value) {
    throw ConfigError(key, "value must be a single trimmed line");
  }
  values_[key] = std::move(value);
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int Config::get_int(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    int v = std::stoi(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected integer, got '" + it->second + "'");
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected number, got '" + it->second + "'");
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError(key, "expected true/false, got '" + it->second + "'");
}

// --- Project --------------------------------------------------------------

namespace {

std::optional<std::string> read_text_if_exists(const fs::path& p) {
  if (!fs::exists(p)) return std::nullopt;
  return clean_line_text(read_file(p));
}

LineRecord load_line_record(const fs::path& dir, const std::string& id) {
  LineRecord rec;
  rec.id = id;
  rec.image_path = dir / (id + ".png");
  rec.gt_text = read_text_if_exists(dir / (id + ".gt.txt"));
  rec.pred_text = read_text_if_exists(dir / (id + ".pred.txt"));
  const fs::path meta = dir / (id + ".meta.json");
  if (fs::exists(meta)) {
    json j;
    try {
      j = json::parse(read_file(meta));
    } catch (const json::exception& e) {
      throw ParseError(meta.string() + ": " + e.what());
    }
    rec.page_id = j.value("page_id", "");
    if (j.contains("bbox")) {
      const auto& b = j["bbox"];
      rec.bbox = {b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(),
                  b.at(3).get<int>()};
    }
    rec.status = parse_line_status(j.value("status", "unseen"));
    rec.origin = parse_line_origin(j.value("origin", "real"));
    if (j.contains("parent") && !j["parent"].is_null()) {
      rec.parent_id = j["parent"].get<std::string>();
    }
  } else if (rec.gt_text) {
    rec.status = LineStatus::kCorrected;
  } else if (rec.pred_text) {
    rec.status = LineStatus::kPredicted;
  }
  rec.validate();
  return rec;
}

}  // namespace

Project Project::open(const fs::path& root) {
  Project p;
  fs::create_directories(root);
  p.root_ = fs::absolute(root).lexically_normal();
  for (const auto& d : {p.images_dir(), p.lines_dir(), p.models_dir(),
                        p.corpus_dir(), p.lexicon_dir()}) {
    fs::create_directories(d);
  }
  for (const auto& f : {p.decisions_log(), p.jobs_log()}) {
    if (!fs::exists(f)) std::ofstream(f, std::ios::app);
  }
  if (!fs::exists(p.config_path())) write_file(p.config_path(), "");
  p.reload();
  return p;
}

void Project::reload() {
  config_ = Config::parse(read_file(config_path()));
  lines_.clear();
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(lines_dir())) {
    if (entry.path().extension() == ".png") ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) lines_.emplace(id, load_line_record(lines_dir(), id));
}

void Project::save_config() const { write_file(config_path(), config_.serialize()); }

const LineRecord* Project::find_line(const std::string& id) const {
  auto it = lines_.find(id);
  return it == lines_.end() ? nullptr : &it->second;
}

std::vector<const LineRecord*> Project::lines_with_status(LineStatus status) const {
  std::vector<const LineRecord*> out;
  for (const auto& [id, rec] : lines_) {
    if (rec.status == status) out.push_back(&rec);
  }
  return out;
}

void Project::save_line(const LineRecord& record) {
  record.validate();
  LineRecord rec = record;
  rec.image_path = line_image_path(rec.id);
  if (!fs::exists(rec.image_path)) {
    throw ValidationError("line " + rec.id + ": image missing at " +
                          rec.image_path.string());
  }
  const fs::path dir = lines_dir();
  auto sync_text = [&](const std::string& suffix, const std::optional<std::string>& t) {
    const fs::path p = dir / (rec.id + suffix);
    if (t) {
      write_file(p, *t);
    } else if (fs::exists(p)) {
      fs::remove(p);
    }
  };
  sync_text(".gt.txt", rec.gt_text);
  sync_text(".pred.txt", rec.pred_text);
  json meta = {{"page_id", rec.page_id},
               {"bbox", {rec.bbox.x, rec.bbox.y, rec.bbox.width, rec.bbox.height}},
               {"status", to_string(rec.status)},
               {"origin", to_string(rec.origin)},
               {"parent", rec.parent_id ? json(*rec.parent_id) : json(nullptr)}};
  write_file(dir / (rec.id + ".meta.json"), meta.dump());
  lines_[rec.id] = std::move(rec);
}

void append_json_line(const fs::path& path, const std::string& json_text) {
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot append to " + path.string());
  out << json_text << '\n';
}

std::vector<std::string> read_json_lines(const fs::path& path) {
  std::vector<std::string> out;
  if (!fs::exists(path)) return out;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) out.push_back(line);
  }
  return out;
}

}  // namespace scriptorium
