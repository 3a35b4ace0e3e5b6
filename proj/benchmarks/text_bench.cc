// benchmarks/text_bench.cc

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

#include "scriptorium/binary_io.hpp"
#include "scriptorium/eval.hpp"
#include "scriptorium/random.hpp"
#include "scriptorium/tei.hpp"

namespace scriptorium {
namespace {

std::string random_text(Rng& rng, std::size_t n) {
  static const std::vector<std::string> alphabet{"a", "e", "ẹ", "o", "m", "n", "p", "s", "ſ", " "};
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += alphabet[rng.below(alphabet.size())];
  return s;
}

// Line length in code points; the prediction differs in about one in ten.
void BM_Align(benchmark::State& state) {
  Rng rng(5);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto gt = random_text(rng, n);
  auto pred = gt;
  Rng noise(6);
  const auto noisy = random_text(noise, n);
  for (std::size_t i = 0; i + 1 < pred.size() && i < noisy.size(); i += 10) pred[i] = noisy[i];
  for (auto _ : state) benchmark::DoNotOptimize(eval::align(gt, pred));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Align)->Arg(40)->Arg(400);

void BM_CorpusEvaluate(benchmark::State& state) {
  Rng rng(7);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < state.range(0); ++i) pairs.emplace_back(random_text(rng, 30), random_text(rng, 30));
  for (auto _ : state) benchmark::DoNotOptimize(eval::evaluate(pairs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CorpusEvaluate)->Arg(100);

void BM_TeiParseEmit(benchmark::State& state) {
  const auto xml = read_file(std::string(SCRIPTORIUM_DATA_DIR) + "/montferrand/glossary.xml");
  for (auto _ : state) benchmark::DoNotOptimize(tei::emit_tei(tei::parse_tei(xml)));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(xml.size()));
}
BENCHMARK(BM_TeiParseEmit);

}  // namespace
}  // namespace scriptorium
