// core/src/embeddings.cpp

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

#include "scriptorium/embeddings.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/random.hpp"
#include "scriptorium/tei.hpp"

namespace scriptorium::embeddings {
namespace {

constexpr std::string_view kMagic = "SCREMB";
constexpr uint32_t kVersion = 1;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
// -log(sigmoid(x)), stable for large |x|.
double neg_log_sigmoid(double x) { return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// Cumulative unigram^0.75 distribution sampled by binary search.
class NegativeSampler {
 public:
  explicit NegativeSampler(const std::vector<uint64_t>& counts) {
    cumulative_.reserve(counts.size());
    double total = 0.0;
    for (auto c : counts) {
      total += std::pow(static_cast<double>(c), 0.75);
      cumulative_.push_back(total);
    }
    for (auto& c : cumulative_) c /= total;
  }
  std::size_t sample(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                 cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

int Vocab::find(std::string_view word) const {
  const auto it = index_.find(word);
  return it == index_.end() ? -1 : it->second;
}

void Vocab::rebuild_index() {
  index_.clear();
  for (std::size_t i = 0; i < words.size(); ++i) index_.emplace(words[i], static_cast<int>(i));
}

Vocab build_vocab(std::span<const std::string> corpus, uint64_t min_count) {
  if (corpus.empty()) throw ValidationError("build_vocab: empty corpus");
  std::map<std::string, uint64_t, std::less<>> counts;
  for (const auto& w : corpus) ++counts[w];
  std::vector<std::pair<std::string, uint64_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= min_count) kept.emplace_back(w, c);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocab v;
  v.total_tokens = corpus.size();
  for (auto& [w, c] : kept) {
    v.words.push_back(w);
    v.counts.push_back(c);
  }
  v.rebuild_index();
  return v;
}

bool EmbeddingTable::all_finite() const {
  return std::all_of(vectors.begin(), vectors.end(), [](float x) { return std::isfinite(x); });
}

std::string EmbeddingTable::serialize() const {
  BinaryWriter w;
  w.magic(kMagic);
  w.u32(kVersion);
  w.u64(vocab.size());
  w.u32(static_cast<uint32_t>(dim));
  w.u32(static_cast<uint32_t>(config.window));
  w.u32(static_cast<uint32_t>(config.negatives));
  w.u32(static_cast<uint32_t>(config.epochs));
  w.f64(config.learning_rate);
  w.u64(config.min_count);
  w.u64(config.seed);
  w.u64(vocab.total_tokens);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    w.str(vocab.words[i]);
    w.u64(vocab.counts[i]);
  }
  w.u64(epoch_loss.size());
  for (double l : epoch_loss) w.f64(l);
  w.floats(vectors.data(), vectors.size());
  return w.bytes();
}

EmbeddingTable EmbeddingTable::deserialize(std::string bytes) {
  BinaryReader r(std::move(bytes));
  r.expect_magic(kMagic);
  const auto version = r.u32();
  if (version != kVersion) {
    throw ParseError("embedding table: unsupported version " + std::to_string(version));
  }
  EmbeddingTable t;
  const auto n = r.u64();
  t.dim = static_cast<int>(r.u32());
  t.config.dim = t.dim;
  t.config.window = static_cast<int>(r.u32());
  t.config.negatives = static_cast<int>(r.u32());
  t.config.epochs = static_cast<int>(r.u32());
  t.config.learning_rate = r.f64();
  t.config.min_count = r.u64();
  t.config.seed = r.u64();
  t.vocab.total_tokens = r.u64();
  for (uint64_t i = 0; i < n; ++i) {
    t.vocab.words.push_back(r.str());
    t.vocab.counts.push_back(r.u64());
  }
  t.vocab.rebuild_index();
  const auto n_loss = r.u64();
  for (uint64_t i = 0; i < n_loss; ++i) t.epoch_loss.push_back(r.f64());
  t.vectors = r.floats();
  if (t.vectors.size() != n * static_cast<uint64_t>(t.dim) || !r.at_end()) {
    throw ParseError("embedding table: matrix size does not match header");
  }
  return t;
}

void EmbeddingTable::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

PairLoss pair_loss(std::span<const double> center, std::span<const double> context,
                   const std::vector<std::vector<double>>& negatives) {
  const int d = static_cast<int>(center.size());
  PairLoss out;
  out.grad_center.assign(d, 0.0);
  out.grad_context.assign(d, 0.0);
  const double fo = dot(center.data(), context.data(), d);
  out.loss = neg_log_sigmoid(fo);
  const double go = sigmoid(fo) - 1.0;
  for (int i = 0; i < d; ++i) {
    out.grad_center[i] += go * context[i];
    out.grad_context[i] = go * center[i];
  }
  for (const auto& u : negatives) {
    const double f = dot(center.data(), u.data(), d);
    out.loss += neg_log_sigmoid(-f);
    const double g = sigmoid(f);
    std::vector<double> gu(d);
    for (int i = 0; i < d; ++i) {
      out.grad_center[i] += g * u[i];
      gu[i] = g * center[i];
    }
    out.grad_negatives.push_back(std::move(gu));
  }
  return out;
}

EmbeddingTable train_skipgram(std::span<const std::string> corpus, const SkipgramConfig& config) {
  if (config.dim <= 0) throw ValidationError("train_skipgram: dimension must be positive");
  if (config.window <= 0 || config.negatives < 0 || config.epochs <= 0) {
    throw ValidationError("train_skipgram: window and epochs must be positive");
  }
  EmbeddingTable table;
  table.config = config;
  table.dim = config.dim;
  table.vocab = build_vocab(corpus, config.min_count);
  const std::size_t nv = table.vocab.size();
  if (nv == 0) throw ValidationError("train_skipgram: no word reaches min_count");
  const int d = config.dim;

  std::vector<int> ids;
  ids.reserve(corpus.size());
  for (const auto& w : corpus) {
    const int id = table.vocab.find(w);
    if (id >= 0) ids.push_back(id);
  }

  Rng rng(config.seed);
  std::vector<double> in(nv * d), out(nv * d, 0.0);
  for (auto& x : in) x = (rng.uniform() - 0.5) / d;
  const NegativeSampler sampler(table.vocab.counts);

  const double total_steps = static_cast<double>(config.epochs) * static_cast<double>(ids.size());
  double step = 0.0;
  std::vector<double> grad_center(d);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    uint64_t pairs = 0;
    for (std::size_t pos = 0; pos < ids.size(); ++pos, step += 1.0) {
      const double lr = config.learning_rate * std::max(1e-4, 1.0 - step / total_steps);
      double* vc = &in[static_cast<std::size_t>(ids[pos]) * d];
      const std::size_t lo = pos >= static_cast<std::size_t>(config.window) ? pos - config.window : 0;
      const std::size_t hi = std::min(ids.size(), pos + config.window + 1);
      for (std::size_t c = lo; c < hi; ++c) {
        if (c == pos) continue;
        std::fill(grad_center.begin(), grad_center.end(), 0.0);
        const auto ctx = static_cast<std::size_t>(ids[c]);
        for (int k = -1; k < config.negatives; ++k) {
          std::size_t target = ctx;
          if (k >= 0) {
            if (nv == 1) break;
            do {
              target = sampler.sample(rng);
            } while (target == ctx);
          }
          double* u = &out[target * d];
          const double f = dot(vc, u, d);
          const double g = k < 0 ? sigmoid(f) - 1.0 : sigmoid(f);
          loss_sum += k < 0 ? neg_log_sigmoid(f) : neg_log_sigmoid(-f);
          for (int i = 0; i < d; ++i) {
            grad_center[i] += g * u[i];
            u[i] -= lr * g * vc[i];
          }
        }
        for (int i = 0; i < d; ++i) vc[i] -= lr * grad_center[i];
        ++pairs;
      }
    }
    table.epoch_loss.push_back(pairs ? loss_sum / static_cast<double>(pairs) : 0.0);
  }
  table.vectors.assign(in.begin(), in.end());
  return table;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

std::vector<std::pair<std::string, double>> nearest(const EmbeddingTable& table,
                                                    std::string_view word, std::size_t k) {
  const int id = table.vocab.find(word);
  if (id < 0) throw ValidationError("nearest: word '" + std::string(word) + "' is not in the vocabulary");
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < table.vocab.size(); ++i) {
    if (static_cast<int>(i) == id) continue;
    out.emplace_back(table.vocab.words[i], cosine(table.vector(id), table.vector(i)));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

std::vector<Merge> ward_linkage(const std::vector<std::vector<double>>& points) {
  const std::size_t n = points.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < points[i].size(); ++t) {
        const double diff = points[i][t] - points[j][t];
        s += diff * diff;
      }
      dist[i * n + j] = dist[j * n + i] = s;
    }
  }
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  std::vector<Merge> merges;
  merges.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t ba = 0, bb = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (active[j] && dist[i * n + j] < best) {
          best = dist[i * n + j];
          ba = i;
          bb = j;
        }
      }
    }
    const double na = static_cast<double>(size[ba]), nb = static_cast<double>(size[bb]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == ba || k == bb) continue;
      const double nk = static_cast<double>(size[k]);
      const double v = ((na + nk) * dist[ba * n + k] + (nb + nk) * dist[bb * n + k] - nk * best) /
                       (na + nb + nk);
      dist[ba * n + k] = dist[k * n + ba] = v;
    }
    size[ba] += size[bb];
    active[bb] = false;
    merges.push_back({ba, bb, best, size[ba]});
  }
  return merges;
}

std::vector<int> cut_linkage(std::size_t n_points, const std::vector<Merge>& merges,
                             std::size_t n_clusters) {
  if (n_clusters == 0 || n_clusters > n_points) {
    throw ValidationError("cluster count must be in 1.." + std::to_string(n_points));
  }
  std::vector<std::size_t> parent(n_points);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t m = 0; m < n_points - n_clusters; ++m) {
    parent[root(merges[m].b)] = root(merges[m].a);
  }
  std::vector<int> label_of_root(n_points, -1), labels(n_points);
  int next = 0;
  for (std::size_t i = 0; i < n_points; ++i) {
    auto& l = label_of_root[root(i)];
    if (l < 0) l = next++;
    labels[i] = l;
  }
  return labels;
}

std::vector<int> cluster_ward(const std::vector<std::vector<double>>& points,
                              std::size_t n_clusters) {
  if (n_clusters > points.size() || n_clusters == 0) {
    throw ValidationError("cluster_ward: cluster count " + std::to_string(n_clusters) +
                          " not in 1.." + std::to_string(points.size()));
  }
  return cut_linkage(points.size(), ward_linkage(points), n_clusters);
}

std::vector<std::vector<double>> to_points(const EmbeddingTable& table) {
  std::vector<std::vector<double>> pts(table.vocab.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto v = table.vector(i);
    pts[i].assign(v.begin(), v.end());
  }
  return pts;
}

std::vector<int> cluster_ward(const EmbeddingTable& table, std::size_t n_clusters) {
  return cluster_ward(to_points(table), n_clusters);
}

void symmetric_eigen(std::vector<std::vector<double>> a, std::vector<double>& values,
                     std::vector<std::vector<double>>& vectors) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  double norm = 0.0;
  for (const auto& row : a) {
    for (double x : row) norm += x * x;
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off <= 1e-30 * norm || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  values.resize(n);
  vectors.assign(n, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    values[r] = a[order[r]][order[r]];
    for (std::size_t k = 0; k < n; ++k) vectors[r][k] = v[k][order[r]];
  }
}

Projection project_2d(const std::vector<std::vector<double>>& points) {
  const std::size_t n = points.size();
  if (n < 2) throw ValidationError("project_2d: need at least two points");
  const std::size_t d = points[0].size();
  Projection p;
  p.mean.assign(d, 0.0);
  for (const auto& x : points) {
    for (std::size_t k = 0; k < d; ++k) p.mean[k] += x[k];
  }
  for (auto& m : p.mean) m /= static_cast<double>(n);
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (const auto& x : points) {
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = x[i] - p.mean[i];
      for (std::size_t j = i; j < d; ++j) cov[i][j] += xi * (x[j] - p.mean[j]);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) cov[j][i] = cov[i][j] /= static_cast<double>(n);
  }
  std::vector<std::vector<double>> vecs;
  symmetric_eigen(cov, p.eigenvalues, vecs);
  const double top = p.eigenvalues.empty() ? 0.0 : std::max(p.eigenvalues[0], 0.0);
  p.components.assign(2, std::vector<double>(d, 0.0));
  for (std::size_t c = 0; c < 2 && c < d; ++c) {
    if (top == 0.0 || p.eigenvalues[c] <= 1e-12 * top) continue;  // flat direction
    auto comp = vecs[c];
    std::size_t arg = 0;
    for (std::size_t k = 1; k < d; ++k) {
      if (std::abs(comp[k]) > std::abs(comp[arg]) + 1e-12) arg = k;
    }
    if (comp[arg] < 0) {
      for (auto& x : comp) x = -x;
    }
    p.components[c] = std::move(comp);
  }
  p.coords.reserve(n);
  for (const auto& x : points) {
    double cx = 0.0, cy = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      cx += (x[k] - p.mean[k]) * p.components[0][k];
      cy += (x[k] - p.mean[k]) * p.components[1][k];
    }
    p.coords.emplace_back(cx, cy);
  }
  return p;
}

Projection project_2d(const EmbeddingTable& table) { return project_2d(to_points(table)); }

std::string scatter_svg(const std::vector<std::pair<double, double>>& coords,
                        const std::vector<std::string>& labels,
                        const std::vector<int>& clusters) {
  static constexpr std::array<const char*, 10> kPalette{
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
      "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  constexpr double kW = 800, kH = 600, kMargin = 40;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto [x, y] = coords[i];
    if (i == 0 || x < x0) x0 = x;
    if (i == 0 || x > x1) x1 = x;
    if (i == 0 || y < y0) y0 = y;
    if (i == 0 || y > y1) y1 = y;
  }
  const double sx = x1 > x0 ? (kW - 2 * kMargin) / (x1 - x0) : 0.0;
  const double sy = y1 > y0 ? (kH - 2 * kMargin) / (y1 - y0) : 0.0;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double px = sx > 0 ? kMargin + (coords[i].first - x0) * sx : kW / 2;
    const double py = sy > 0 ? kH - kMargin - (coords[i].second - y0) * sy : kH / 2;
    const int c = i < clusters.size() ? clusters[i] : 0;
    const char* color = kPalette[static_cast<std::size_t>(std::max(c, 0)) % kPalette.size()];
    out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3\" fill=\"" << color << "\"/>";
    if (i < labels.size()) {
      out << "<text x=\"" << px + 4 << "\" y=\"" << py - 4
          << "\" font-size=\"10\" font-family=\"sans-serif\">" << tei::escape_text(labels[i])
          << "</text>";
    }
    out << "\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace scriptorium::embeddings
