// core/include/scriptorium/corpus.hpp

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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scriptorium {

struct BBox {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  int bottom() const { return y + height; }
  int right() const { return x + width; }
  bool operator==(const BBox&) const = default;
};

enum class LineStatus { kUnseen, kPredicted, kCorrected, kValidated };
enum class LineOrigin { kReal, kSynthetic };

std::string to_string(LineStatus status);
std::string to_string(LineOrigin origin);
LineStatus parse_line_status(const std::string& s);
LineOrigin parse_line_origin(const std::string& s);

// One text line: the atomic unit of recognition and correction.
struct LineRecord {
  std::string id;
  std::string page_id;
  BBox bbox;
  std::filesystem::path image_path;
  std::optional<std::string> gt_text;
  std::optional<std::string> pred_text;
  LineStatus status = LineStatus::kUnseen;
  LineOrigin origin = LineOrigin::kReal;
  std::optional<std::string> parent_id;  // set for synthetic lines

  // Throws ValidationError when an invariant is broken.
  void validate() const;
  bool operator==(const LineRecord&) const = default;
};

// Zero-padded decimal id, e.g. format_id(42, 4) == "0042".
std::string format_id(uint64_t n, int width);

// Normalizes to NFC and checks for newlines.
std::string clean_line_text(std::string_view text);

struct DatasetSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> dev_ids;
  std::vector<std::string> test_ids;
  uint64_t seed = 0;
};

inline constexpr std::array<double, 3> kDefaultSplitRatios{0.8, 0.1, 0.1};

// Seeded random partition into train/dev/test. Sizes are rounded from the
// ratios (train and dev rounded, test takes the remainder).
DatasetSplit split_dataset(std::span<const std::string> ids,
                           std::array<double, 3> ratios, uint64_t seed);

// Ordered `key = value` configuration with `#` comments.
class Config {
 public:
  static Config parse(std::string_view text);
  std::string serialize() const;

  bool has(const std::string& key) const { return values_.contains(key); }
  void set(const std::string& key, std::string value);
  std::string get(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  bool operator==(const Config&) const = default;

 private:
  std::map<std::string, std::string> values_;
};

// On-disk project: images/, lines/, models/, corpus/, lexicon/,
// decisions.log, jobs.log and project.cfg under one root.
class Project {
 public:
  // Creates the layout when missing; loads config and line records.
  static Project open(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path images_dir() const { return root_ / "images"; }
  std::filesystem::path lines_dir() const { return root_ / "lines"; }
  std::filesystem::path models_dir() const { return root_ / "models"; }
  std::filesystem::path corpus_dir() const { return root_ / "corpus"; }
  std::filesystem::path lexicon_dir() const { return root_ / "lexicon"; }
  std::filesystem::path decisions_log() const { return root_ / "decisions.log"; }
  std::filesystem::path jobs_log() const { return root_ / "jobs.log"; }
  std::filesystem::path config_path() const { return root_ / "project.cfg"; }

  const Config& config() const { return config_; }
  Config& config() { return config_; }
  void save_config() const;

  const std::map<std::string, LineRecord>& lines() const { return lines_; }
  const LineRecord* find_line(const std::string& id) const;
  std::vector<const LineRecord*> lines_with_status(LineStatus status) const;

  // Writes the record's text and metadata files. The image file must already
  // exist at record.image_path (use imaging::write_png first).
  void save_line(const LineRecord& record);
  std::filesystem::path line_image_path(const std::string& id) const {
    return lines_dir() / (id + ".png");
  }

  // Reloads everything from disk.
  void reload();

  bool operator==(const Project& other) const {
    return root_ == other.root_ && config_ == other.config_ &&
           lines_ == other.lines_;
  }

 private:
  std::filesystem::path root_;
  Config config_;
  std::map<std::string, LineRecord> lines_;
};

// Appends one compact JSON object per line; the file is created when missing.
void append_json_line(const std::filesystem::path& path, const std::string& json);
std::vector<std::string> read_json_lines(const std::filesystem::path& path);

}  // namespace scriptorium
