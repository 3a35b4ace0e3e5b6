// core/src/eval.cpp

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

#include "scriptorium/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scriptorium/error.hpp"
#include "scriptorium/recognizer.hpp"
#include "scriptorium/unicode.hpp"

namespace scriptorium::eval {

std::size_t Alignment::cost() const {
  return static_cast<std::size_t>(std::count_if(
      ops.begin(), ops.end(), [](const EditOp& op) { return op.kind != OpKind::kMatch; }));
}

std::string Alignment::reconstruct_gt() const {
  std::string out;
  for (const auto& op : ops) out += op.gt;
  return out;
}

std::string Alignment::reconstruct_pred() const {
  std::string out;
  for (const auto& op : ops) out += op.pred;
  return out;
}

namespace {

Alignment align_code_points(const std::vector<std::string>& a,
                            const std::vector<std::string>& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  Alignment out;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && a[i - 1] == b[j - 1] && at(i, j) == at(i - 1, j - 1)) {
      out.ops.push_back({OpKind::kMatch, a[i - 1], b[j - 1]});
      --i, --j;
    } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1) {
      out.ops.push_back({OpKind::kSub, a[i - 1], b[j - 1]});
      --i, --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      out.ops.push_back({OpKind::kDel, a[i - 1], ""});
      --i;
    } else {
      out.ops.push_back({OpKind::kIns, "", b[j - 1]});
      --j;
    }
  }
  std::reverse(out.ops.begin(), out.ops.end());
  return out;
}

std::string strip_spaces(std::string_view s) {
  std::u32string out;
  for (char32_t c : unicode::to_u32(s)) {
    if (!unicode::is_space(c)) out.push_back(c);
  }
  return unicode::to_utf8(out);
}

std::string display_class(const std::string& cp) {
  if (cp.empty()) return std::string(kAbsent);
  const char32_t c = unicode::first_code_point(cp);
  if (unicode::is_combining_mark(c)) return std::string(kDiacriticClass);
  if (unicode::is_space(c)) return std::string(kSpaceClass);
  return cp;
}

}  // namespace

Alignment align(std::string_view gt, std::string_view pred) {
  return align_code_points(unicode::code_points(gt), unicode::code_points(pred));
}

std::size_t edit_distance(std::string_view gt, std::string_view pred) {
  const auto a = unicode::to_u32(gt), b = unicode::to_u32(pred);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1), prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double cer(std::string_view gt, std::string_view pred, bool ignore_spaces) {
  std::string g(gt), p(pred);
  if (ignore_spaces) {
    g = strip_spaces(g);
    p = strip_spaces(p);
  }
  const std::size_t n = unicode::length(g);
  if (n == 0) throw ValidationError("cer: empty ground truth");
  return static_cast<double>(edit_distance(g, p)) / static_cast<double>(n);
}

std::vector<ConfusionRow> confusion_matrix(
    std::span<const std::pair<std::string, std::string>> gt_pred_pairs) {
  std::map<std::pair<std::string, std::string>, std::size_t> counts;  // (pred, gt)
  for (const auto& [gt, pred] : gt_pred_pairs) {
    const Alignment a = align(unicode::nfd(gt), unicode::nfd(pred));
    for (const auto& op : a.ops) {
      if (op.kind == OpKind::kMatch) continue;
      ++counts[{display_class(op.pred), display_class(op.gt)}];
    }
  }
  std::vector<ConfusionRow> rows;
  for (const auto& [key, n] : counts) rows.push_back({n, key.first, key.second});
  std::stable_sort(rows.begin(), rows.end(), [](const ConfusionRow& a, const ConfusionRow& b) {
    if (a.freq != b.freq) return a.freq > b.freq;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.gt < b.gt;
  });
  return rows;
}

std::string format_confusion_table(std::span<const ConfusionRow> rows, std::size_t limit) {
  std::ostringstream ss;
  ss << std::left << std::setw(6) << "freq" << std::setw(10) << "pred" << "GT\n";
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (limit && n++ >= limit) break;
    // setw counts bytes; pad by code points so multibyte symbols line up.
    auto pad = [](const std::string& s, std::size_t w) {
      const std::size_t len = unicode::length(s);
      return s + std::string(len < w ? w - len : 1, ' ');
    };
    ss << pad(std::to_string(r.freq), 6) << pad(r.pred, 10) << r.gt << "\n";
  }
  return ss.str();
}

EvalReport evaluate(std::span<const std::pair<std::string, std::string>> gt_pred_pairs) {
  EvalReport report;
  std::size_t edits = 0, edits_ns = 0, chars_ns = 0;
  for (const auto& [gt, pred] : gt_pred_pairs) {
    const Alignment a = align(gt, pred);
    for (const auto& op : a.ops) {
      if (op.kind == OpKind::kSub) ++report.substitutions;
      if (op.kind == OpKind::kIns) ++report.insertions;
      if (op.kind == OpKind::kDel) ++report.deletions;
    }
    edits += a.cost();
    report.n_gt_chars += unicode::length(gt);
    const std::string g = strip_spaces(gt), p = strip_spaces(pred);
    edits_ns += edit_distance(g, p);
    chars_ns += unicode::length(g);
    ++report.n_lines;
  }
  if (report.n_gt_chars == 0) throw ValidationError("evaluate: empty ground truth");
  report.cer = static_cast<double>(edits) / static_cast<double>(report.n_gt_chars);
  report.cer_no_spaces =
      chars_ns == 0 ? 0.0 : static_cast<double>(edits_ns) / static_cast<double>(chars_ns);
  report.confusion = confusion_matrix(gt_pred_pairs);
  return report;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.confusion) {
    rows.push_back({{"freq", r.freq}, {"pred", r.pred}, {"gt", r.gt}});
  }
  nlohmann::json j = {{"cer", report.cer},
                      {"cer_no_spaces", report.cer_no_spaces},
                      {"n_gt_chars", report.n_gt_chars},
                      {"n_lines", report.n_lines},
                      {"substitutions", report.substitutions},
                      {"insertions", report.insertions},
                      {"deletions", report.deletions},
                      {"confusion", rows}};
  return j.dump(2);
}

std::string aligned_diff(std::string_view id, std::string_view gt, std::string_view pred) {
  const Alignment a = align(gt, pred);
  std::string top, bottom, marks;
  for (const auto& op : a.ops) {
    top += op.gt.empty() ? std::string(kAbsent) : op.gt;
    bottom += op.pred.empty() ? std::string(kAbsent) : op.pred;
    marks += op.kind == OpKind::kMatch ? ' ' : '^';
  }
  std::string out;
  out += "# " + std::string(id) + "\n";
  out += "GT:   " + top + "\n";
  out += "PRED: " + bottom + "\n";
  out += "      " + marks + "\n";
  return out;
}

Selection select_best(std::span<const std::pair<int64_t, double>> iteration_cer) {
  if (iteration_cer.empty()) throw ValidationError("select_best: no checkpoints");
  Selection best{iteration_cer[0].first, iteration_cer[0].second, 0};
  for (std::size_t i = 1; i < iteration_cer.size(); ++i) {
    const auto& [iter, c] = iteration_cer[i];
    if (c < best.dev_cer || (c == best.dev_cer && iter < best.iteration)) {
      best = {iter, c, i};
    }
  }
  return best;
}

Selection select_best(std::span<const recognizer::Checkpoint> checkpoints,
                      std::span<const imaging::LineSample> dev) {
  if (checkpoints.empty()) throw ValidationError("select_best: no checkpoints");
  if (dev.empty()) throw ValidationError("select_best: empty dev set");
  std::vector<std::pair<int64_t, double>> scores;
  for (const auto& cp : checkpoints) {
    std::size_t edits = 0, chars = 0;
    for (const auto& line : dev) {
      if (!line.record.gt_text) {
        throw ValidationError("select_best: dev line " + line.record.id + " has no ground truth");
      }
      edits += edit_distance(*line.record.gt_text,
                             recognizer::recognize(cp.model, line.image).text);
      chars += unicode::length(*line.record.gt_text);
    }
    if (chars == 0) throw ValidationError("select_best: empty dev ground truth");
    scores.emplace_back(cp.iteration, static_cast<double>(edits) / static_cast<double>(chars));
  }
  return select_best(scores);
}

}  // namespace scriptorium::eval
