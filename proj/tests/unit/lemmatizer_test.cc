// tests/unit/lemmatizer_test.cc

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
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "scriptorium/error.hpp"
#include "scriptorium/lemmatizer.hpp"
#include "scriptorium/random.hpp"
#include "test_support.h"

namespace scriptorium::lemmatizer {
namespace {

using embeddings::EmbeddingTable;

EmbeddingTable toy_table(const std::vector<std::string>& words, int dim, uint64_t seed) {
  EmbeddingTable t;
  t.vocab.words = words;
  t.vocab.counts.assign(words.size(), 1);
  t.vocab.total_tokens = words.size();
  t.vocab.rebuild_index();
  t.dim = dim;
  Rng rng(seed);
  t.vectors.resize(words.size() * static_cast<std::size_t>(dim));
  for (auto& v : t.vectors) v = static_cast<float>(rng.uniform() * 2 - 1);
  return t;
}

LemmatizerConfig tiny_config() {
  LemmatizerConfig c;
  c.char_dim = 4;
  c.window = 3;
  c.filters = 5;
  c.hidden = 6;
  c.max_length = 8;
  c.epochs = 1;
  c.seed = 2;
  return c;
}

std::vector<AnnotatedToken> toy_tokens() {
  const std::vector<std::string> s{"ac", "avem", "dos", "que", "ac", "lo"};
  const std::vector<std::string> l{"avẹr", "avẹr", "da+lo2", "que", "avẹr", "que"};
  return in_context(s, l);
}

TEST(ContextTest, WindowsAreFilledFromNeighbours) {
  const std::vector<std::string> s{"a", "b", "c"};
  const auto t = in_context(s);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[1].context, (std::array<std::string, kContextSlots>{"", "a", "c", ""}));
  EXPECT_EQ(t[0].context, (std::array<std::string, kContextSlots>{"", "", "b", "c"}));
  EXPECT_TRUE(t[2].lemma.empty());
  const std::vector<std::string> short_lemmas{"x"};
  EXPECT_THROW(in_context(s, short_lemmas), ValidationError);
}

TEST(ModelTest, InitializeShapes) {
  const auto train = toy_tokens();
  const auto m = initialize(train, toy_table({"ac", "dos", "que"}, 3, 1), tiny_config());
  EXPECT_EQ(m.lemmas, (std::vector<std::string>{"avẹr", "da+lo2", "que"}));
  EXPECT_EQ(m.feature_size(), 5 + 4 * 3);
  EXPECT_EQ(m.hidden_weights.cols(), m.feature_size());
  EXPECT_EQ(m.output_weights.rows(), 3);
  EXPECT_EQ(m.char_embedding.rows(), static_cast<Eigen::Index>(m.chars.size() + 2));
  EXPECT_TRUE(m.all_finite());
  EXPECT_EQ(encode_token(m, train[0]).size(), m.feature_size());
}

TEST(ModelTest, LongSurfaceKeepsBothEnds) {
  const auto train = toy_tokens();
  const auto m = initialize(train, toy_table({"ac"}, 2, 1), tiny_config());
  const auto ids = m.char_ids("acacacacaz");
  ASSERT_EQ(ids.size(), 8u);
  EXPECT_EQ(ids.back(), 1);  // 'z' is not in the training characters
  EXPECT_EQ(ids.front(), m.char_ids("a")[0]);
}

TEST(GradientTest, MatchesFiniteDifferences) {
  const auto train = toy_tokens();
  auto m = initialize(train, toy_table({"ac", "avem", "dos", "que"}, 3, 7), tiny_config());
  const double h = 1e-6;
  for (const auto& tok : train) {
    const auto analytic = loss_and_gradient(m, tok);
    auto params = flatten_parameters(m);
    ASSERT_EQ(params.size(), analytic.gradient.size());
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params[i];
      params[i] = keep + h;
      assign_parameters(m, params);
      const double up = loss_and_gradient(m, tok).loss;
      params[i] = keep - h;
      assign_parameters(m, params);
      const double down = loss_and_gradient(m, tok).loss;
      params[i] = keep;
      const double numeric = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(numeric - analytic.gradient[i]));
      scale = std::max({scale, std::abs(numeric), std::abs(analytic.gradient[i])});
    }
    assign_parameters(m, params);
    EXPECT_LE(worst / scale, 1e-4) << tok.surface;
  }
}

TEST(GradientTest, UnknownGoldLemmaThrows) {
  const auto train = toy_tokens();
  const auto m = initialize(train, toy_table({"ac"}, 2, 1), tiny_config());
  AnnotatedToken t;
  t.surface = "ac";
  t.lemma = "nowhere";
  EXPECT_THROW(loss_and_gradient(m, t), ValidationError);
}

TEST(ParametersTest, FlattenAssignRoundTrip) {
  const auto train = toy_tokens();
  auto m = initialize(train, toy_table({"ac"}, 2, 1), tiny_config());
  auto p = flatten_parameters(m);
  for (auto& x : p) x *= 0.5;
  assign_parameters(m, p);
  EXPECT_EQ(flatten_parameters(m), p);
  p.pop_back();
  EXPECT_THROW(assign_parameters(m, p), ValidationError);
}

// 50 distinct surfaces, each with its own lemma.
std::vector<AnnotatedToken> bijective_corpus() {
  Rng rng(21);
  std::set<std::string> seen;
  std::vector<std::string> surfaces, lemmas;
  while (surfaces.size() < 50) {
    std::string s;
    for (int i = 0; i < 4; ++i) s += static_cast<char>('a' + rng.below(8));
    if (!seen.insert(s).second) continue;
    surfaces.push_back(s);
    lemmas.push_back("L" + s);
  }
  return in_context(surfaces, lemmas);
}

TEST(TrainTest, MemorizesSmallBijectiveCorpus) {
  const auto data = bijective_corpus();
  LemmatizerConfig c;
  c.filters = 32;
  c.hidden = 64;
  c.epochs = 80;
  c.learning_rate = 0.05;
  const auto m = train(data, data, toy_table({"x"}, 4, 1), c);
  ASSERT_TRUE(m.all_finite());
  std::vector<std::string> surfaces;
  for (const auto& t : data) surfaces.push_back(t.surface);
  const auto r = evaluate(m, data, surfaces);
  EXPECT_EQ(r.accuracy_all, 1.0);
  EXPECT_EQ(m.dev_accuracy, 1.0);
  EXPECT_LE(static_cast<std::size_t>(m.epoch), m.history.size());
}

TEST(TrainTest, KeepsBestDevEpochAndIsDeterministic) {
  const auto data = bijective_corpus();
  const std::vector<AnnotatedToken> train_set(data.begin(), data.begin() + 40);
  const std::vector<AnnotatedToken> dev(data.begin() + 40, data.end());
  LemmatizerConfig c = tiny_config();
  c.epochs = 6;
  const auto a = train(train_set, train_set, toy_table({"x"}, 2, 1), c);
  const auto b = train(train_set, train_set, toy_table({"x"}, 2, 1), c);
  EXPECT_EQ(flatten_parameters(a), flatten_parameters(b));
  ASSERT_EQ(a.history.size(), 6u);
  double best = -1.0;
  int best_epoch = 0;
  for (const auto& h : a.history) {
    if (h.dev_accuracy > best) {
      best = h.dev_accuracy;
      best_epoch = h.epoch;
    }
  }
  EXPECT_EQ(a.epoch, best_epoch);
  EXPECT_EQ(a.dev_accuracy, best);
  EXPECT_THROW(train(train_set, std::vector<AnnotatedToken>{}, toy_table({"x"}, 2, 1), c), ValidationError);
  EXPECT_THROW(train(std::vector<AnnotatedToken>{}, dev, toy_table({"x"}, 2, 1), c), ValidationError);
}

TEST(PredictTest, ProbabilitiesFormADistribution) {
  const auto train = toy_tokens();
  const auto m = initialize(train, toy_table({"ac", "dos"}, 3, 1), tiny_config());
  for (const auto& t : in_context(std::vector<std::string>{"zzz", "ac", "ẹẹ"})) {
    const auto p = predict(m, t);
    ASSERT_EQ(p.probabilities.size(), 3u);
    double sum = 0.0;
    for (double x : p.probabilities) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    const auto arg = std::max_element(p.probabilities.begin(), p.probabilities.end()) - p.probabilities.begin();
    EXPECT_EQ(p.lemma, m.lemmas[static_cast<std::size_t>(arg)]);
    EXPECT_DOUBLE_EQ(p.confidence, p.probabilities[static_cast<std::size_t>(arg)]);
  }
}

TEST(EvaluateTest, BucketsDecomposeOverall) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> s, l, pred, train_surfaces;
    for (uint64_t i = 1 + rng.below(20); i > 0; --i) {
      s.push_back("s" + std::to_string(rng.below(6)));
      l.push_back("l" + std::to_string(rng.below(3)));
      pred.push_back("l" + std::to_string(rng.below(3)));
    }
    for (uint64_t i = rng.below(6); i > 0; --i) train_surfaces.push_back("s" + std::to_string(rng.below(6)));
    const auto test = in_context(s, l);
    const auto r = evaluate_predictions(test, pred, train_surfaces);
    ASSERT_EQ(r.n_known + r.n_unknown, r.n_all);
    ASSERT_EQ(r.correct_known + r.correct_unknown, r.correct_all);
    ASSERT_EQ(r.accuracy_known.has_value(), r.n_known > 0);
    ASSERT_EQ(r.accuracy_unknown.has_value(), r.n_unknown > 0);
    const double weighted = r.accuracy_known.value_or(0.0) * static_cast<double>(r.n_known) +
                            r.accuracy_unknown.value_or(0.0) * static_cast<double>(r.n_unknown);
    ASSERT_NEAR(r.accuracy_all * static_cast<double>(r.n_all), weighted, 1e-9);
  }
}

TEST(EvaluateTest, EmptyUnknownBucketIsNa) {
  const auto test = in_context(std::vector<std::string>{"a", "b"}, std::vector<std::string>{"x", "y"});
  const std::vector<std::string> pred{"x", "x"};
  const auto r = evaluate_predictions(test, pred, {"a", "b"});
  EXPECT_FALSE(r.accuracy_unknown.has_value());
  EXPECT_EQ(*r.accuracy_known, 0.5);
  EXPECT_THROW(evaluate_predictions(std::vector<AnnotatedToken>{}, std::vector<std::string>{}, {}), ValidationError);
}

TEST(BaselineTest, MajorityLemmaWithLexicographicTies) {
  EXPECT_EQ(majority_lemma(toy_tokens()), "avẹr");
  const auto tie = in_context(std::vector<std::string>{"a", "b"}, std::vector<std::string>{"z", "m"});
  EXPECT_EQ(majority_lemma(tie), "m");
  EXPECT_THROW(majority_lemma(std::vector<AnnotatedToken>{}), ValidationError);
}

TEST(SerializationTest, RoundTripPreservesPredictions) {
  const auto train = toy_tokens();
  const auto m = initialize(train, toy_table({"ac", "dos"}, 3, 1), tiny_config());
  testing::TempDir dir("lem");
  m.save(dir / "m.bin");
  const auto back = LemmatizerModel::load(dir / "m.bin");
  EXPECT_EQ(flatten_parameters(back), flatten_parameters(m));
  EXPECT_EQ(back.lemmas, m.lemmas);
  EXPECT_EQ(back.chars, m.chars);
  for (const auto& t : train) EXPECT_EQ(predict(back, t).probabilities, predict(m, t).probabilities);
  auto bytes = m.serialize();
  bytes.resize(bytes.size() / 2);
  EXPECT_THROW(LemmatizerModel::deserialize(bytes), ParseError);
}

}  // namespace
}  // namespace scriptorium::lemmatizer
