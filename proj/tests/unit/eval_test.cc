// tests/unit/eval_test.cc

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

#include <functional>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "scriptorium/error.hpp"
#include "scriptorium/eval.hpp"
#include "scriptorium/random.hpp"
#include "scriptorium/recognizer.hpp"
#include "scriptorium/unicode.hpp"

namespace scriptorium::eval {
namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

// Memoized recursion over suffixes; independent of the library's iterative
// table and backtrace.
std::size_t oracle_distance(const std::string& gt, const std::string& pred) {
  const auto a = unicode::code_points(gt), b = unicode::code_points(pred);
  std::vector<std::vector<long>> memo(a.size() + 1, std::vector<long>(b.size() + 1, -1));
  std::function<long(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> long {
    if (i == a.size()) return static_cast<long>(b.size() - j);
    if (j == b.size()) return static_cast<long>(a.size() - i);
    long& m = memo[i][j];
    if (m >= 0) return m;
    m = std::min({d(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1), d(i + 1, j) + 1, d(i, j + 1) + 1});
    return m;
  };
  return static_cast<std::size_t>(d(0, 0));
}

std::string random_string(Rng& rng, std::size_t max_len, const std::vector<std::string>& alphabet) {
  std::string s;
  const auto n = rng.below(max_len + 1);
  for (uint64_t i = 0; i < n; ++i) s += alphabet[rng.below(alphabet.size())];
  return s;
}

const std::vector<std::string> kAlphabet{"a", "b", "c", "d", "ẹ", "o", " ", "ſ"};

TEST(AlignTest, IdenticalStringsAreAllMatches) {
  const auto a = align("abc", "abc");
  ASSERT_EQ(a.ops.size(), 3u);
  for (const auto& op : a.ops) EXPECT_EQ(op.kind, OpKind::kMatch);
  EXPECT_EQ(a.cost(), 0u);
}

TEST(AlignTest, DompnaDomnaIsOneDeletion) {
  const auto a = align("dompna", "domna");
  EXPECT_EQ(a.cost(), 1u);
  EXPECT_EQ(oracle_distance("dompna", "domna"), 1u);
  std::size_t matches = 0;
  for (const auto& op : a.ops) matches += op.kind == OpKind::kMatch;
  EXPECT_EQ(matches, 5u);
  ASSERT_EQ(a.ops.size(), 6u);
  EXPECT_EQ(a.ops[3], (EditOp{OpKind::kDel, "p", ""}));
}

TEST(AlignTest, EmptyGroundTruthIsInsertions) {
  const auto a = align("", "ab");
  ASSERT_EQ(a.ops.size(), 2u);
  EXPECT_EQ(a.ops[0], (EditOp{OpKind::kIns, "", "a"}));
  EXPECT_EQ(a.ops[1], (EditOp{OpKind::kIns, "", "b"}));
}

TEST(AlignTest, TieBreakPrefersSubstitution) {
  const auto a = align("eo", "oe");
  ASSERT_EQ(a.ops.size(), 2u);
  EXPECT_EQ(a.ops[0], (EditOp{OpKind::kSub, "e", "o"}));
  EXPECT_EQ(a.ops[1], (EditOp{OpKind::kSub, "o", "e"}));
}

TEST(AlignTest, RandomPairsMatchDpOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto gt = random_string(rng, 12, kAlphabet);
    const auto pred = random_string(rng, 12, kAlphabet);
    const auto a = align(gt, pred);
    const auto expected = oracle_distance(gt, pred);
    ASSERT_EQ(a.cost(), expected) << "'" << gt << "' vs '" << pred << "'";
    ASSERT_EQ(edit_distance(gt, pred), expected);
    ASSERT_EQ(a.reconstruct_gt(), gt);
    ASSERT_EQ(a.reconstruct_pred(), pred);
    for (const auto& op : a.ops) {
      if (op.kind == OpKind::kMatch) { ASSERT_EQ(op.gt, op.pred); }
      if (op.kind == OpKind::kSub) { ASSERT_NE(op.gt, op.pred); }
    }
  }
}

TEST(CerTest, Examples) {
  EXPECT_EQ(cer("domna", "domna"), 0.0);
  EXPECT_DOUBLE_EQ(cer("dompna", "domna"), 1.0 / 6.0);
  EXPECT_EQ(cer("a b", "ab", true), 0.0);
  EXPECT_DOUBLE_EQ(cer("a b", "ab", false), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(cer("ẹn", "en"), 0.5);
}

TEST(CerTest, IsNotSymmetric) {
  EXPECT_DOUBLE_EQ(cer("ab", "abcd"), 1.0);
  EXPECT_DOUBLE_EQ(cer("abcd", "ab"), 0.5);
}

TEST(CerTest, EmptyGroundTruthIsAnError) {
  EXPECT_THROW(cer("", "x"), ValidationError);
  EXPECT_THROW(cer("  ", "x", true), ValidationError);
}

TEST(ConfusionTest, AllCorrectIsEmpty) {
  const Pairs pairs{{"abc", "abc"}, {"domna", "domna"}};
  EXPECT_TRUE(confusion_matrix(pairs).empty());
}

TEST(ConfusionTest, SwappedPairGivesTwoSubstitutions) {
  const Pairs pairs{{"eo", "oe"}};
  const auto rows = confusion_matrix(pairs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (ConfusionRow{1, "e", "o"}));
  EXPECT_EQ(rows[1], (ConfusionRow{1, "o", "e"}));
}

TEST(ConfusionTest, DiacriticsAndSpacesHaveTheirOwnClasses) {
  const Pairs pairs{{"ẹn", "en"}, {"avẹr", "aver"}, {"a b", "ab"}, {"lo", "l o"}};
  const auto rows = confusion_matrix(pairs);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (ConfusionRow{2, std::string(kAbsent), std::string(kDiacriticClass)}));
  EXPECT_EQ(rows[1], (ConfusionRow{1, std::string(kSpaceClass), std::string(kAbsent)}));
  EXPECT_EQ(rows[2], (ConfusionRow{1, std::string(kAbsent), std::string(kSpaceClass)}));
}

TEST(ConfusionTest, FrequenciesSumToEditOperations) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    Pairs pairs;
    std::size_t edits = 0;
    for (int i = 0; i < 5; ++i) {
      pairs.emplace_back(random_string(rng, 10, kAlphabet), random_string(rng, 10, kAlphabet));
      edits += oracle_distance(unicode::nfd(pairs.back().first), unicode::nfd(pairs.back().second));
    }
    const auto rows = confusion_matrix(pairs);
    std::size_t total = 0;
    for (const auto& r : rows) total += r.freq;
    ASSERT_EQ(total, edits);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      ASSERT_GE(rows[i - 1].freq, rows[i].freq);
      if (rows[i - 1].freq == rows[i].freq) {
        ASSERT_LT(std::tie(rows[i - 1].pred, rows[i - 1].gt), std::tie(rows[i].pred, rows[i].gt));
      }
    }
  }
}

TEST(ConfusionTest, TableColumnsAreFreqPredGt) {
  const std::vector<ConfusionRow> rows{{21, "_", "[diacr.]"}, {13, "o", "e"}, {7, "ẹ", "e"}};
  const auto table = format_confusion_table(rows);
  EXPECT_EQ(table,
            "freq  pred      GT\n"
            "21    _         [diacr.]\n"
            "13    o         e\n"
            "7     ẹ         e\n");
  EXPECT_EQ(format_confusion_table(rows, 1), "freq  pred      GT\n21    _         [diacr.]\n");
}

TEST(EvaluateTest, CorpusCerIsTotalEditsOverTotalChars) {
  const Pairs pairs{{"dompna", "domna"}, {"abcd", "abxd"}, {"a b", "ab"}};
  const auto r = evaluate(pairs);
  EXPECT_EQ(r.n_lines, 3u);
  EXPECT_EQ(r.n_gt_chars, 13u);
  EXPECT_DOUBLE_EQ(r.cer, 3.0 / 13.0);
  EXPECT_DOUBLE_EQ(r.cer_no_spaces, 2.0 / 12.0);
  EXPECT_EQ(r.substitutions, 1u);
  EXPECT_EQ(r.deletions, 2u);
  EXPECT_EQ(r.insertions, 0u);
  const auto j = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(j.at("n_lines"), 3);
  EXPECT_EQ(j.at("confusion").size(), r.confusion.size());
}

TEST(EvaluateTest, MoreErrorsNeverLowerCer) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::string gt = random_string(rng, 12, kAlphabet);
    if (gt.empty()) gt = "a";
    std::string pred = gt;
    double last = cer(gt, pred);
    EXPECT_EQ(last, 0.0);
    for (int k = 0; k < 4; ++k) {
      pred += "z";
      const double next = cer(gt, pred);
      ASSERT_GT(next, last);
      last = next;
    }
  }
}

TEST(EvaluateTest, AlignedDiffMarksEdits) {
  EXPECT_EQ(aligned_diff("l1", "dompna", "domna"),
            "# l1\n"
            "GT:   dompna\n"
            "PRED: dom_na\n"
            "         ^  \n");
}

TEST(SelectBestTest, PicksMinimumWithEarliestTie) {
  const std::vector<std::pair<int64_t, double>> one{{500, 0.3}};
  EXPECT_EQ(select_best(one).iteration, 500);
  const std::vector<std::pair<int64_t, double>> three{{1000, 0.10}, {2000, 0.061}, {3000, 0.08}};
  const auto s = select_best(three);
  EXPECT_EQ(s.iteration, 2000);
  EXPECT_EQ(s.index, 1u);
  EXPECT_EQ(s.dev_cer, 0.061);
  const std::vector<std::pair<int64_t, double>> tie{{3000, 0.05}, {1000, 0.05}, {2000, 0.07}};
  EXPECT_EQ(select_best(tie).iteration, 1000);
  EXPECT_THROW(select_best(std::span<const std::pair<int64_t, double>>{}), ValidationError);
}

TEST(SelectBestTest, EvaluatesCheckpointsOnDev) {
  const recognizer::CharacterInventory inv({"a", "b"});
  std::vector<recognizer::Checkpoint> cps;
  for (int64_t it : {200, 100}) {
    cps.push_back({it, recognizer::RecognizerModel::zeros(inv, 8, 2)});
  }
  imaging::LineSample line;
  line.record.id = "d1";
  line.record.gt_text = "ab";
  line.image = imaging::GrayImage(20, 8);
  const std::vector<imaging::LineSample> dev{line};
  const auto s = select_best(cps, dev);
  EXPECT_EQ(s.iteration, 100);
  EXPECT_EQ(s.dev_cer, 1.0);
  EXPECT_THROW(select_best(cps, std::span<const imaging::LineSample>{}), ValidationError);
  EXPECT_THROW(select_best(std::span<const recognizer::Checkpoint>{}, dev), ValidationError);
}

}  // namespace
}  // namespace scriptorium::eval
