// core/include/scriptorium/lemmatizer.hpp

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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scriptorium/embeddings.hpp"

// Lemma classification from a character convolution over the token and
// pretrained embeddings of its neighbours.
namespace scriptorium::lemmatizer {

inline constexpr int kContextSlots = 4;  // two left, two right

struct AnnotatedToken {
  std::string surface;
  std::string lemma;  // gold; empty when unknown
  // left-2, left-1, right+1, right+2; empty string = no token there.
  std::array<std::string, kContextSlots> context;
};

// Tokens of one running text with their context windows filled in.
std::vector<AnnotatedToken> in_context(std::span<const std::string> surfaces,
                                       std::span<const std::string> lemmas = {});

struct LemmatizerConfig {
  int char_dim = 16;
  int window = 3;
  int filters = 64;
  int max_length = 20;  // longer surfaces keep their first and last 10 chars
  int hidden = 128;
  int epochs = 100;
  double learning_rate = 0.02;
  uint64_t seed = 1;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double dev_accuracy = 0.0;
};

struct LemmatizerModel {
  LemmatizerConfig config;
  std::vector<std::string> lemmas;   // output classes, sorted
  std::vector<char32_t> chars;       // index + 2; 0 = padding, 1 = unknown
  embeddings::EmbeddingTable context_table;  // frozen
  Eigen::MatrixXd char_embedding;    // (|chars| + 2) x char_dim, row 0 unused
  Eigen::MatrixXd conv_weights;      // filters x (window * char_dim)
  Eigen::VectorXd conv_bias;
  Eigen::MatrixXd hidden_weights;    // hidden x (filters + 4 * context dim)
  Eigen::VectorXd hidden_bias;
  Eigen::MatrixXd output_weights;    // |lemmas| x hidden
  Eigen::VectorXd output_bias;
  int epoch = 0;                     // epoch of the retained weights
  double dev_accuracy = 0.0;
  std::vector<EpochStats> history;

  int context_dim() const { return context_table.dim; }
  int feature_size() const { return config.filters + kContextSlots * context_dim(); }
  bool all_finite() const;
  std::vector<int> char_ids(const std::string& surface) const;

  std::string serialize() const;
  static LemmatizerModel deserialize(std::string bytes);
  void save(const std::filesystem::path& path) const;
  static LemmatizerModel load(const std::filesystem::path& path);
};

// Fresh model with output classes and character inventory taken from
// `train` and seeded random weights.
LemmatizerModel initialize(std::span<const AnnotatedToken> train,
                           embeddings::EmbeddingTable context_table,
                           const LemmatizerConfig& config);

// Char feature (max-pooled convolution) followed by the context vectors.
Eigen::VectorXd encode_token(const LemmatizerModel& model, const AnnotatedToken& token);

// Per-epoch seeded shuffle and SGD on cross-entropy; the weights with the
// best dev accuracy are kept (earliest epoch on ties). Throws when train
// or dev is empty.
LemmatizerModel train(std::span<const AnnotatedToken> train, std::span<const AnnotatedToken> dev,
                      embeddings::EmbeddingTable context_table, const LemmatizerConfig& config);

struct Prediction {
  std::string lemma;
  double confidence = 0.0;
  std::vector<double> probabilities;
};

Prediction predict(const LemmatizerModel& model, const AnnotatedToken& token);

struct LemmaEvalReport {
  std::size_t n_all = 0, n_known = 0, n_unknown = 0;
  std::size_t correct_all = 0, correct_known = 0, correct_unknown = 0;
  double accuracy_all = 0.0;
  std::optional<double> accuracy_known;    // empty bucket -> NA
  std::optional<double> accuracy_unknown;
};

LemmaEvalReport evaluate(const LemmatizerModel& model, std::span<const AnnotatedToken> test,
                         const std::vector<std::string>& train_surfaces);
// Same buckets for an arbitrary predictor (used for baselines).
LemmaEvalReport evaluate_predictions(std::span<const AnnotatedToken> test,
                                     std::span<const std::string> predicted,
                                     const std::vector<std::string>& train_surfaces);

// Most frequent training lemma, ties broken lexicographically.
std::string majority_lemma(std::span<const AnnotatedToken> train);

// Loss and gradient for one token, parameters flattened in the order
// char_embedding, conv_weights, conv_bias, hidden_weights, hidden_bias,
// output_weights, output_bias (column-major each).
struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};
LossAndGradient loss_and_gradient(const LemmatizerModel& model, const AnnotatedToken& token);
std::vector<double> flatten_parameters(const LemmatizerModel& model);
void assign_parameters(LemmatizerModel& model, std::span<const double> values);

}  // namespace scriptorium::lemmatizer
