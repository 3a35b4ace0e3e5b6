// benchmarks/embeddings_bench.cc

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

#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "scriptorium/embeddings.hpp"
#include "scriptorium/random.hpp"

namespace scriptorium::embeddings {
namespace {

std::vector<std::string> zipf_corpus(std::size_t n_tokens, uint64_t vocab) {
  Rng rng(8);
  std::vector<std::string> corpus;
  corpus.reserve(n_tokens);
  for (std::size_t i = 0; i < n_tokens; ++i) {
    // Squaring a uniform draw skews toward low ranks.
    const double u = rng.uniform();
    corpus.push_back("w" + std::to_string(static_cast<uint64_t>(u * u * static_cast<double>(vocab))));
  }
  return corpus;
}

// Tokens per epoch; dim 100, window 5, 5 negatives.
void BM_TrainSkipgram(benchmark::State& state) {
  const auto corpus = zipf_corpus(static_cast<std::size_t>(state.range(0)), 2000);
  SkipgramConfig cfg;
  cfg.epochs = 1;
  cfg.min_count = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_skipgram(corpus, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainSkipgram)->Arg(20000)->Unit(benchmark::kMillisecond);

std::vector<std::vector<double>> random_points(std::size_t n, std::size_t dim) {
  Rng rng(9);
  std::vector<std::vector<double>> p(n, std::vector<double>(dim));
  for (auto& x : p) {
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  }
  return p;
}

void BM_WardLinkage(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 100);
  for (auto _ : state) benchmark::DoNotOptimize(ward_linkage(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WardLinkage)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond)->Complexity();

void BM_Project2d(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 100);
  for (auto _ : state) benchmark::DoNotOptimize(project_2d(pts));
}
BENCHMARK(BM_Project2d)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace scriptorium::embeddings
