// core/include/scriptorium/eval.hpp

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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scriptorium/imaging.hpp"

namespace scriptorium::recognizer {
struct Checkpoint;
}

namespace scriptorium::eval {

enum class OpKind { kMatch, kSub, kIns, kDel };

// One step of an edit script over code points. `gt` is empty for kIns and
// `pred` is empty for kDel.
struct EditOp {
  OpKind kind;
  std::string gt;
  std::string pred;
  bool operator==(const EditOp&) const = default;
};

struct Alignment {
  std::vector<EditOp> ops;

  std::size_t cost() const;
  std::string reconstruct_gt() const;
  std::string reconstruct_pred() const;
};

// Minimal unit-cost edit script. On backtrace, ties prefer
// match > substitution > deletion > insertion.
Alignment align(std::string_view gt, std::string_view pred);
std::size_t edit_distance(std::string_view gt, std::string_view pred);

// Edit distance over |gt| in code points. With ignore_spaces, whitespace is
// removed from both strings first. Throws ValidationError on empty gt.
double cer(std::string_view gt, std::string_view pred, bool ignore_spaces = false);

// Display class for confusion rows: combining marks collapse to "[diacr.]",
// whitespace to "[space]"; std::nullopt is an absent character.
inline constexpr std::string_view kAbsent = "_";
inline constexpr std::string_view kDiacriticClass = "[diacr.]";
inline constexpr std::string_view kSpaceClass = "[space]";

struct ConfusionRow {
  std::size_t freq = 0;
  std::string pred;  // kAbsent for deletions
  std::string gt;    // kAbsent for insertions
  bool operator==(const ConfusionRow&) const = default;
};

// Aggregated over NFD-decomposed pairs; sorted by frequency, then pred, then gt.
std::vector<ConfusionRow> confusion_matrix(
    std::span<const std::pair<std::string, std::string>> gt_pred_pairs);

// Fixed-width table with columns freq, pred, GT.
std::string format_confusion_table(std::span<const ConfusionRow> rows, std::size_t limit = 0);

struct EvalReport {
  double cer = 0.0;
  double cer_no_spaces = 0.0;
  std::size_t n_gt_chars = 0;
  std::size_t n_lines = 0;
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::vector<ConfusionRow> confusion;
};

// Corpus-level report: total edits over total ground-truth characters.
EvalReport evaluate(std::span<const std::pair<std::string, std::string>> gt_pred_pairs);

std::string report_to_json(const EvalReport& report);

// Two-row diff with '_' in gaps, one block per line.
std::string aligned_diff(std::string_view id, std::string_view gt, std::string_view pred);

struct Selection {
  int64_t iteration = 0;
  double dev_cer = 0.0;
  std::size_t index = 0;  // position in the input list
};

// Minimal CER, ties to the smallest iteration. Throws on an empty list.
Selection select_best(std::span<const std::pair<int64_t, double>> iteration_cer);

// Evaluates each checkpoint on `dev` (CER over recognized dev lines) and
// selects the best one. Throws on an empty checkpoint list or dev set.
Selection select_best(std::span<const recognizer::Checkpoint> checkpoints,
                      std::span<const imaging::LineSample> dev);

}  // namespace scriptorium::eval
