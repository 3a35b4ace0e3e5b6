// core/include/scriptorium/embeddings.hpp

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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scriptorium::embeddings {

// Words sorted by (count desc, word asc); indices are dense.
struct Vocab {
  std::vector<std::string> words;
  std::vector<uint64_t> counts;
  uint64_t total_tokens = 0;  // corpus size before min_count filtering

  std::size_t size() const { return words.size(); }
  // -1 when absent.
  int find(std::string_view word) const;
  void rebuild_index();

 private:
  std::map<std::string, int, std::less<>> index_;
};

Vocab build_vocab(std::span<const std::string> corpus, uint64_t min_count = 5);

struct SkipgramConfig {
  int dim = 100;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;  // decays linearly to 1e-4 of its value
  uint64_t min_count = 5;
  uint64_t seed = 1;
};

struct EmbeddingTable {
  Vocab vocab;
  int dim = 0;
  std::vector<float> vectors;  // |V| x dim, row-major
  SkipgramConfig config;
  std::vector<double> epoch_loss;  // mean pair loss per epoch

  std::span<const float> vector(std::size_t i) const {
    return {vectors.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  bool all_finite() const;

  // Header (magic, version, |V|, d, training settings), then the UTF-8
  // vocabulary with counts, then |V| x d little-endian float32 values.
  std::string serialize() const;
  static EmbeddingTable deserialize(std::string bytes);
  void save(const std::filesystem::path& path) const;
  static EmbeddingTable load(const std::filesystem::path& path);
};

// Logistic loss of one (center, context, negatives) example:
//   -log s(u_o . v_c) - sum_k log s(-u_k . v_c)
// with gradients for v_c, u_o and each u_k.
struct PairLoss {
  double loss = 0.0;
  std::vector<double> grad_center;
  std::vector<double> grad_context;
  std::vector<std::vector<double>> grad_negatives;
};

PairLoss pair_loss(std::span<const double> center, std::span<const double> context,
                   const std::vector<std::vector<double>>& negatives);

// Negative-sampling skipgram; negatives drawn from unigram^0.75.
// Deterministic for a fixed seed. Throws ValidationError when dim <= 0.
EmbeddingTable train_skipgram(std::span<const std::string> corpus, const SkipgramConfig& config);

double cosine(std::span<const float> a, std::span<const float> b);

// k most similar words by cosine, the word itself excluded.
// Throws ValidationError naming an out-of-vocabulary word.
std::vector<std::pair<std::string, double>> nearest(const EmbeddingTable& table,
                                                    std::string_view word, std::size_t k);

struct Merge {
  std::size_t a = 0;  // cluster slots (smallest member index), a < b
  std::size_t b = 0;
  double distance = 0.0;  // Lance-Williams Ward distance at merge time
  std::size_t size = 0;   // members of the merged cluster

  bool operator==(const Merge&) const = default;
};

// Full Ward agglomeration over Euclidean points via the Lance-Williams
// update on squared distances; ties go to the smallest (a, b) slot pair.
std::vector<Merge> ward_linkage(const std::vector<std::vector<double>>& points);

// Labels 0..n_clusters-1, numbered by each cluster's smallest member.
std::vector<int> cut_linkage(std::size_t n_points, const std::vector<Merge>& merges,
                             std::size_t n_clusters);

std::vector<int> cluster_ward(const std::vector<std::vector<double>>& points,
                              std::size_t n_clusters);
std::vector<int> cluster_ward(const EmbeddingTable& table, std::size_t n_clusters);

struct Projection {
  std::vector<std::pair<double, double>> coords;
  std::vector<double> mean;
  std::vector<std::vector<double>> components;  // 2 rows of length d
  std::vector<double> eigenvalues;              // all of them, descending
};

// Centered PCA on the covariance X^T X / n; every component is signed so
// that its largest-magnitude entry is positive. Components with a
// negligible eigenvalue are zeroed, giving a flat layout.
Projection project_2d(const std::vector<std::vector<double>>& points);
Projection project_2d(const EmbeddingTable& table);

// Symmetric eigendecomposition by cyclic Jacobi rotations; eigenvalues
// descending, eigenvectors as rows.
void symmetric_eigen(std::vector<std::vector<double>> a, std::vector<double>& values,
                     std::vector<std::vector<double>>& vectors);

std::string scatter_svg(const std::vector<std::pair<double, double>>& coords,
                        const std::vector<std::string>& labels,
                        const std::vector<int>& clusters);

std::vector<std::vector<double>> to_points(const EmbeddingTable& table);

}  // namespace scriptorium::embeddings
