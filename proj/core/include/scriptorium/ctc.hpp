// core/include/scriptorium/ctc.hpp

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

#include <span>

#include <Eigen/Core>

namespace scriptorium::recognizer {

// Class index reserved for the CTC blank.
inline constexpr int kBlank = 0;

struct CtcResult {
  double loss = 0.0;       // -log p(target | softmax(logits))
  Eigen::MatrixXd grad;    // d loss / d logits, same shape as logits
};

// Fewest frames that can emit `target`: one per symbol plus a separating
// blank between each pair of equal neighbours.
int ctc_min_frames(std::span<const int> target);

// Connectionist temporal classification loss by log-space forward-backward.
// `logits` is T x C (one row per frame, column 0 = blank); target holds class
// indices in [1, C). Throws ValidationError when T < ctc_min_frames(target).
CtcResult ctc_loss(const Eigen::MatrixXd& logits, std::span<const int> target);

// Row-wise log-softmax.
Eigen::MatrixXd log_softmax_rows(const Eigen::MatrixXd& logits);

}  // namespace scriptorium::recognizer
