// core/src/ctc.cpp

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

#include "scriptorium/ctc.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "scriptorium/error.hpp"

namespace scriptorium::recognizer {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

int ctc_min_frames(std::span<const int> target) {
  int n = static_cast<int>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target[i] == target[i - 1]) ++n;
  }
  return n;
}

Eigen::MatrixXd log_softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    const double lse = m + std::log((logits.row(t).array() - m).exp().sum());
    out.row(t) = logits.row(t).array() - lse;
  }
  return out;
}

CtcResult ctc_loss(const Eigen::MatrixXd& logits, std::span<const int> target) {
  const auto frames = static_cast<int>(logits.rows());
  const auto classes = static_cast<int>(logits.cols());
  if (classes < 1) throw ValidationError("ctc_loss: logits need at least the blank column");
  for (int c : target) {
    if (c <= kBlank || c >= classes) {
      throw ValidationError("ctc_loss: target class " + std::to_string(c) + " out of range");
    }
  }
  if (frames < ctc_min_frames(target) || frames == 0) {
    throw ValidationError("ctc_loss: infeasible alignment, " + std::to_string(frames) +
                          " frames for a target needing " +
                          std::to_string(std::max(1, ctc_min_frames(target))));
  }

  // Blank-augmented label sequence: b l1 b l2 ... lL b.
  const int S = 2 * static_cast<int>(target.size()) + 1;
  std::vector<int> label(static_cast<std::size_t>(S), kBlank);
  for (std::size_t i = 0; i < target.size(); ++i) label[2 * i + 1] = target[i];
  auto can_skip = [&](int s) {  // may jump from s-2 to s
    return s >= 2 && label[s] != kBlank && label[s] != label[s - 2];
  };

  const Eigen::MatrixXd logp = log_softmax_rows(logits);
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Constant(frames, S, kNegInf);
  Eigen::MatrixXd beta = Eigen::MatrixXd::Constant(frames, S, kNegInf);

  alpha(0, 0) = logp(0, label[0]);
  if (S > 1) alpha(0, 1) = logp(0, label[1]);
  for (int t = 1; t < frames; ++t) {
    for (int s = 0; s < S; ++s) {
      double a = alpha(t - 1, s);
      if (s >= 1) a = log_add(a, alpha(t - 1, s - 1));
      if (can_skip(s)) a = log_add(a, alpha(t - 1, s - 2));
      if (a != kNegInf) alpha(t, s) = a + logp(t, label[s]);
    }
  }

  // beta(t, s): log-probability of finishing from state s at frame t,
  // excluding the emission at t.
  beta(frames - 1, S - 1) = 0.0;
  if (S > 1) beta(frames - 1, S - 2) = 0.0;
  for (int t = frames - 2; t >= 0; --t) {
    for (int s = 0; s < S; ++s) {
      double b = beta(t + 1, s) + logp(t + 1, label[s]);
      if (s + 1 < S) b = log_add(b, beta(t + 1, s + 1) + logp(t + 1, label[s + 1]));
      if (s + 2 < S && can_skip(s + 2)) {
        b = log_add(b, beta(t + 1, s + 2) + logp(t + 1, label[s + 2]));
      }
      beta(t, s) = b;
    }
  }

  double log_p = alpha(frames - 1, S - 1);
  if (S > 1) log_p = log_add(log_p, alpha(frames - 1, S - 2));

  CtcResult result;
  result.loss = std::max(0.0, -log_p);
  result.grad = logp.array().exp();
  for (int t = 0; t < frames; ++t) {
    for (int s = 0; s < S; ++s) {
      const double occ = alpha(t, s) + beta(t, s);
      if (occ == kNegInf) continue;
      result.grad(t, label[s]) -= std::exp(occ - log_p);
    }
  }
  return result;
}

}  // namespace scriptorium::recognizer
