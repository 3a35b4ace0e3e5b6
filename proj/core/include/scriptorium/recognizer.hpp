// core/include/scriptorium/recognizer.hpp

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
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "scriptorium/ctc.hpp"
#include "scriptorium/imaging.hpp"

namespace scriptorium::recognizer {

// Output symbols of the recognizer. Symbol i (0-based) is class i + 1;
// class 0 is the CTC blank and is never transcribable.
class CharacterInventory {
 public:
  CharacterInventory() = default;
  // Each symbol is one NFC code point; duplicates are rejected.
  explicit CharacterInventory(std::vector<std::string> symbols);

  // Sorted union of the code points used by `texts`.
  static CharacterInventory from_texts(std::span<const std::string> texts);

  std::size_t size() const { return symbols_.size(); }
  int num_classes() const { return static_cast<int>(symbols_.size()) + 1; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& symbol(int cls) const { return symbols_.at(static_cast<std::size_t>(cls - 1)); }
  std::optional<int> class_of(std::string_view symbol) const;
  bool contains(std::string_view symbol) const { return class_of(symbol).has_value(); }

  // Code-point offsets and symbols not covered by the inventory.
  std::vector<std::pair<std::size_t, std::string>> unknown_symbols(std::string_view text) const;

  // Throws ValidationError naming the first uncovered symbol and its offset.
  std::vector<int> encode(std::string_view text) const;
  std::string decode(std::span<const int> classes) const;

  bool operator==(const CharacterInventory& o) const { return symbols_ == o.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

// Line image to network input: aspect-preserving bilinear rescale to
// `target_height` rows, one column per frame, ink ~ 1 and background ~ 0.
Eigen::MatrixXf normalize_line(const imaging::GrayImage& line, int target_height = 48);

// Weights of one LSTM direction; gate rows are ordered input, forget,
// output, candidate.
struct LstmWeights {
  Eigen::MatrixXf input;      // 4H x In
  Eigen::MatrixXf recurrent;  // 4H x H
  Eigen::VectorXf bias;       // 4H
};

// Bidirectional LSTM followed by a linear projection to the CTC classes.
struct RecognizerModel {
  CharacterInventory inventory;
  int input_height = 48;
  int hidden_size = 100;
  LstmWeights forward_lstm;
  LstmWeights backward_lstm;
  Eigen::MatrixXf output_weights;  // C x 2H
  Eigen::VectorXf output_bias;     // C
  int64_t checkpoint_iter = 0;
  double dev_cer = -1.0;           // negative when not evaluated

  // Zero-initialized model of the given shape.
  static RecognizerModel zeros(CharacterInventory inventory, int input_height,
                               int hidden_size);
  // Seeded random initialization.
  static RecognizerModel initialize(CharacterInventory inventory, int input_height,
                                    int hidden_size, uint64_t seed);

  bool all_finite() const;
  std::size_t parameter_count() const;

  void save(const std::filesystem::path& path) const;
  static RecognizerModel load(const std::filesystem::path& path);
  std::string serialize() const;
  static RecognizerModel deserialize(std::string bytes);
};

// Logits, T x C with T = input columns. Throws on input height mismatch.
Eigen::MatrixXf forward(const RecognizerModel& model, const Eigen::MatrixXf& input);
std::vector<Eigen::MatrixXf> forward_batch(const RecognizerModel& model,
                                           std::span<const Eigen::MatrixXf> inputs);

// Per-frame argmax, merge repeats, drop blanks.
std::string decode_greedy(const Eigen::MatrixXf& logits, const CharacterInventory& inventory);
std::vector<int> best_path(const Eigen::MatrixXf& logits);

struct Recognition {
  std::string text;
  double confidence = 0.0;  // mean max-softmax over emitting frames
};

// A line with no ink pixel reads as "".
Recognition recognize(const RecognizerModel& model, const imaging::GrayImage& line);

// --- Training ---------------------------------------------------------------

struct TrainingConfig {
  double learning_rate = 1e-4;
  double momentum = 0.9;
  int checkpoint_interval = 1000;
  int64_t max_iterations = 10000;
  uint64_t seed = 1;
  int hidden_size = 100;
  int input_height = 48;
  // Lines used to measure training CER at each checkpoint (0 = all).
  int train_eval_limit = 200;
  // Global gradient-norm clip; 0 disables.
  double clip_norm = 0.0;
  bool keep_checkpoints = true;
};

struct HistoryEntry {
  int64_t iteration = 0;
  double train_loss = 0.0;       // mean CTC loss since the previous checkpoint
  double train_error = 0.0;      // CER on real training lines
  double train_error_all = 0.0;  // CER on all training lines, synthetic included
  double dev_cer = 0.0;
};

struct Checkpoint {
  int64_t iteration = 0;
  RecognizerModel model;
};

struct TrainingRun {
  TrainingConfig config;
  std::vector<HistoryEntry> history;
  std::vector<Checkpoint> checkpoints;  // empty unless keep_checkpoints
  int64_t skipped_lines = 0;            // lines too short for their target
};

using CheckpointCallback = std::function<void(const Checkpoint&, const HistoryEntry&)>;

// One line per iteration, plain SGD with momentum on the CTC loss. Every
// training line must carry ground truth covered by `inventory`; violations
// are reported with the line id before any update happens.
TrainingRun train(std::span<const imaging::LineSample> lines,
                  std::span<const imaging::LineSample> dev,
                  const CharacterInventory& inventory, const TrainingConfig& config,
                  const CheckpointCallback& on_checkpoint = {});

// Gradient of the CTC loss with respect to every parameter, flattened in
// the order used by flatten_parameters. Exposed for gradient checking.
struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};
LossAndGradient loss_and_gradient(const RecognizerModel& model, const Eigen::MatrixXf& input,
                                  std::span<const int> target);
std::vector<double> flatten_parameters(const RecognizerModel& model);
void assign_parameters(RecognizerModel& model, std::span<const double> values);

}  // namespace scriptorium::recognizer
