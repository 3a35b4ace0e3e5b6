// tests/unit/ctc_test.cc

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
#include <vector>

#include <gtest/gtest.h>

#include "scriptorium/ctc.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/random.hpp"

namespace scriptorium::recognizer {
namespace {

Eigen::MatrixXd random_logits(Rng& rng, int t, int c, double scale = 2.0) {
  Eigen::MatrixXd m(t, c);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-scale, scale);
  return m;
}

std::vector<int> random_target(Rng& rng, int max_len, int classes, int frames) {
  for (;;) {
    std::vector<int> t(rng.below(static_cast<uint64_t>(max_len) + 1));
    for (auto& s : t) s = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(classes - 1)));
    if (ctc_min_frames(t) <= frames) return t;
  }
}

// Sums the probability of every frame labelling that collapses to target.
double brute_force_loss(const Eigen::MatrixXd& logits, const std::vector<int>& target) {
  const int T = static_cast<int>(logits.rows()), C = static_cast<int>(logits.cols());
  Eigen::MatrixXd p(T, C);
  for (int t = 0; t < T; ++t) {
    const double mx = logits.row(t).maxCoeff();
    double z = 0.0;
    for (int c = 0; c < C; ++c) z += std::exp(logits(t, c) - mx);
    for (int c = 0; c < C; ++c) p(t, c) = std::exp(logits(t, c) - mx) / z;
  }
  std::vector<int> path(static_cast<std::size_t>(T), 0);
  double total = 0.0;
  for (;;) {
    std::vector<int> collapsed;
    int prev = -1;
    for (int s : path) {
      if (s != prev && s != kBlank) collapsed.push_back(s);
      prev = s;
    }
    if (collapsed == target) {
      double prob = 1.0;
      for (int t = 0; t < T; ++t) prob *= p(t, path[t]);
      total += prob;
    }
    int k = 0;
    while (k < T && ++path[k] == C) path[k++] = 0;
    if (k == T) break;
  }
  return -std::log(total);
}

// max |a - n| / max(max |a|, max |n|), gradient entries compared as a whole.
double relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric) {
  const double scale = std::max(analytic.cwiseAbs().maxCoeff(), numeric.cwiseAbs().maxCoeff());
  return (analytic - numeric).cwiseAbs().maxCoeff() / std::max(scale, 1e-12);
}

Eigen::MatrixXd central_differences(const Eigen::MatrixXd& logits, const std::vector<int>& target,
                                    double h) {
  Eigen::MatrixXd g(logits.rows(), logits.cols());
  for (int i = 0; i < logits.size(); ++i) {
    Eigen::MatrixXd up = logits, down = logits;
    up.data()[i] += h;
    down.data()[i] -= h;
    g.data()[i] = (ctc_loss(up, target).loss - ctc_loss(down, target).loss) / (2 * h);
  }
  return g;
}

TEST(CtcTest, SingleFrameTwoClassesIsLn2) {
  Eigen::MatrixXd logits = Eigen::MatrixXd::Zero(1, 2);
  const std::vector<int> target{1};
  const auto r = ctc_loss(logits, target);
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-9);
  EXPECT_NEAR(r.grad(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(r.grad(0, 1), -0.5, 1e-12);
}

TEST(CtcTest, EmptyTargetIsOnlyBlankPath) {
  Rng rng(1);
  const auto logits = random_logits(rng, 6, 4);
  const auto lsm = log_softmax_rows(logits);
  const auto r = ctc_loss(logits, {});
  EXPECT_NEAR(r.loss, -lsm.col(kBlank).sum(), 1e-9);
}

TEST(CtcTest, MatchesPathEnumeration) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int T = 1 + static_cast<int>(rng.below(6));
    const int C = 2 + static_cast<int>(rng.below(3));
    const auto logits = random_logits(rng, T, C);
    const auto target = random_target(rng, 3, C, T);
    ASSERT_NEAR(ctc_loss(logits, target).loss, brute_force_loss(logits, target), 1e-9)
        << "trial " << trial;
  }
}

TEST(CtcTest, FiveByFourGradientMatchesFiniteDifferences) {
  Rng rng(3);
  const auto logits = random_logits(rng, 5, 4);
  const std::vector<int> target{2, 3};
  const auto r = ctc_loss(logits, target);
  EXPECT_LE(relative_error(r.grad, central_differences(logits, target, 1e-3)), 1e-4);
}

TEST(CtcTest, RandomGradientsMatchFiniteDifferences) {
  Rng rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int T = 1 + static_cast<int>(rng.below(12));
    const int C = 2 + static_cast<int>(rng.below(6));
    const auto logits = random_logits(rng, T, C);
    const auto target = random_target(rng, 5, C, T);
    const auto r = ctc_loss(logits, target);
    worst = std::max(worst, relative_error(r.grad, central_differences(logits, target, 1e-3)));
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(CtcTest, GradientRowsSumToZero) {
  Rng rng(5);
  const auto logits = random_logits(rng, 9, 5);
  const std::vector<int> target{1, 1, 4};
  const auto r = ctc_loss(logits, target);
  for (int t = 0; t < r.grad.rows(); ++t) EXPECT_NEAR(r.grad.row(t).sum(), 0.0, 1e-12);
}

TEST(CtcTest, MinFramesCountsRepeatSeparators) {
  EXPECT_EQ(ctc_min_frames(std::vector<int>{}), 0);
  EXPECT_EQ(ctc_min_frames(std::vector<int>{1, 2, 3}), 3);
  EXPECT_EQ(ctc_min_frames(std::vector<int>{1, 1}), 3);
  EXPECT_EQ(ctc_min_frames(std::vector<int>{2, 2, 2, 1}), 6);
}

TEST(CtcTest, InfeasibleTargetIsRejected) {
  const Eigen::MatrixXd logits = Eigen::MatrixXd::Zero(2, 3);
  EXPECT_THROW(ctc_loss(logits, std::vector<int>{1, 1}), ValidationError);
  EXPECT_THROW(ctc_loss(logits, std::vector<int>{1, 2, 1}), ValidationError);
  EXPECT_NO_THROW(ctc_loss(logits, std::vector<int>{1, 2}));
}

TEST(CtcTest, OutOfRangeClassIsRejected) {
  const Eigen::MatrixXd logits = Eigen::MatrixXd::Zero(4, 3);
  EXPECT_THROW(ctc_loss(logits, std::vector<int>{3}), ValidationError);
  EXPECT_THROW(ctc_loss(logits, std::vector<int>{0}), ValidationError);
}

TEST(CtcTest, LossIsNonNegativeAndFinite) {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const int T = 1 + static_cast<int>(rng.below(40));
    const int C = 2 + static_cast<int>(rng.below(10));
    const auto logits = random_logits(rng, T, C, 30.0);
    const auto target = random_target(rng, 15, C, T);
    const auto r = ctc_loss(logits, target);
    ASSERT_GE(r.loss, 0.0);
    ASSERT_TRUE(std::isfinite(r.loss));
    ASSERT_TRUE(r.grad.allFinite());
  }
}

TEST(CtcTest, LongSequencesDoNotUnderflow) {
  Rng rng(7);
  const auto logits = random_logits(rng, 2000, 30, 5.0);
  const auto target = random_target(rng, 200, 30, 2000);
  const auto r = ctc_loss(logits, target);
  EXPECT_TRUE(std::isfinite(r.loss));
  EXPECT_TRUE(r.grad.allFinite());
}

}  // namespace
}  // namespace scriptorium::recognizer
