// core/src/lemmatizer.cpp

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

#include "scriptorium/lemmatizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/random.hpp"
#include "scriptorium/unicode.hpp"

namespace scriptorium::lemmatizer {
namespace {

constexpr std::string_view kMagic = "SCRLEM";
constexpr uint32_t kVersion = 1;

struct Gradients {
  Eigen::MatrixXd char_embedding, conv_weights, hidden_weights, output_weights;
  Eigen::VectorXd conv_bias, hidden_bias, output_bias;

  explicit Gradients(const LemmatizerModel& m)
      : char_embedding(Eigen::MatrixXd::Zero(m.char_embedding.rows(), m.char_embedding.cols())),
        conv_weights(Eigen::MatrixXd::Zero(m.conv_weights.rows(), m.conv_weights.cols())),
        hidden_weights(Eigen::MatrixXd::Zero(m.hidden_weights.rows(), m.hidden_weights.cols())),
        output_weights(Eigen::MatrixXd::Zero(m.output_weights.rows(), m.output_weights.cols())),
        conv_bias(Eigen::VectorXd::Zero(m.conv_bias.size())),
        hidden_bias(Eigen::VectorXd::Zero(m.hidden_bias.size())),
        output_bias(Eigen::VectorXd::Zero(m.output_bias.size())) {}
};

void uniform_init(Eigen::MatrixXd& m, double scale, Rng& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-scale, scale);
  }
}

struct Forward {
  std::vector<int> ids;
  Eigen::MatrixXd windows;      // (window*char_dim) x positions
  Eigen::MatrixXd activations;  // filters x positions
  std::vector<Eigen::Index> argmax;
  Eigen::VectorXd features;
  Eigen::VectorXd hidden;
  Eigen::VectorXd probabilities;
};

Eigen::VectorXd context_vector(const LemmatizerModel& m, const std::string& word) {
  const int d = m.context_dim();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  if (word.empty()) return v;
  const int id = m.context_table.vocab.find(word);
  if (id < 0) return v;
  const auto row = m.context_table.vector(static_cast<std::size_t>(id));
  for (int i = 0; i < d; ++i) v[i] = row[i];
  return v;
}

Forward run_forward(const LemmatizerModel& m, const AnnotatedToken& tok) {
  const auto& c = m.config;
  Forward f;
  f.ids = m.char_ids(tok.surface);
  const int positions = c.max_length - c.window + 1;
  f.windows.resize(c.window * c.char_dim, positions);
  for (int p = 0; p < positions; ++p) {
    for (int k = 0; k < c.window; ++k) {
      const int id = f.ids[p + k];
      if (id == 0) {
        f.windows.block(k * c.char_dim, p, c.char_dim, 1).setZero();
      } else {
        f.windows.block(k * c.char_dim, p, c.char_dim, 1) = m.char_embedding.row(id).transpose();
      }
    }
  }
  f.activations = ((m.conv_weights * f.windows).colwise() + m.conv_bias).array().tanh().matrix();
  f.features.resize(m.feature_size());
  f.argmax.resize(c.filters);
  for (int k = 0; k < c.filters; ++k) {
    Eigen::Index arg = 0;
    for (int p = 1; p < positions; ++p) {
      if (f.activations(k, p) > f.activations(k, arg)) arg = p;
    }
    f.argmax[k] = arg;
    f.features[k] = f.activations(k, arg);
  }
  for (int s = 0; s < kContextSlots; ++s) {
    f.features.segment(c.filters + s * m.context_dim(), m.context_dim()) =
        context_vector(m, tok.context[s]);
  }
  f.hidden = (m.hidden_weights * f.features + m.hidden_bias).array().tanh().matrix();
  Eigen::VectorXd logits = m.output_weights * f.hidden + m.output_bias;
  logits.array() -= logits.maxCoeff();
  f.probabilities = logits.array().exp().matrix();
  f.probabilities /= f.probabilities.sum();
  return f;
}

int class_of(const LemmatizerModel& m, const std::string& lemma) {
  const auto it = std::lower_bound(m.lemmas.begin(), m.lemmas.end(), lemma);
  return it != m.lemmas.end() && *it == lemma ? static_cast<int>(it - m.lemmas.begin()) : -1;
}

double backward(const LemmatizerModel& m, const Forward& f, int target, Gradients& g) {
  const auto& c = m.config;
  const double loss = -std::log(std::max(f.probabilities[target], 1e-300));
  Eigen::VectorXd dlogits = f.probabilities;
  dlogits[target] -= 1.0;
  g.output_weights.noalias() += dlogits * f.hidden.transpose();
  g.output_bias += dlogits;
  Eigen::VectorXd dh = m.output_weights.transpose() * dlogits;
  dh.array() *= 1.0 - f.hidden.array().square();
  g.hidden_weights.noalias() += dh * f.features.transpose();
  g.hidden_bias += dh;
  const Eigen::VectorXd dfeat = m.hidden_weights.leftCols(c.filters).transpose() * dh;
  for (int k = 0; k < c.filters; ++k) {
    const Eigen::Index p = f.argmax[k];
    const double a = f.activations(k, p);
    const double dz = dfeat[k] * (1.0 - a * a);
    if (dz == 0.0) continue;
    g.conv_weights.row(k) += dz * f.windows.col(p).transpose();
    g.conv_bias[k] += dz;
    const Eigen::VectorXd dwin = dz * m.conv_weights.row(k).transpose();
    for (int w = 0; w < c.window; ++w) {
      const int id = f.ids[p + w];
      if (id != 0) g.char_embedding.row(id) += dwin.segment(w * c.char_dim, c.char_dim).transpose();
    }
  }
  return loss;
}

template <typename Fn>
void for_each_param(LemmatizerModel& m, Fn fn) {
  fn(m.char_embedding.data(), m.char_embedding.size());
  fn(m.conv_weights.data(), m.conv_weights.size());
  fn(m.conv_bias.data(), m.conv_bias.size());
  fn(m.hidden_weights.data(), m.hidden_weights.size());
  fn(m.hidden_bias.data(), m.hidden_bias.size());
  fn(m.output_weights.data(), m.output_weights.size());
  fn(m.output_bias.data(), m.output_bias.size());
}

void sgd_step(LemmatizerModel& m, Gradients& g, double lr) {
  m.char_embedding -= lr * g.char_embedding;
  m.conv_weights -= lr * g.conv_weights;
  m.conv_bias -= lr * g.conv_bias;
  m.hidden_weights -= lr * g.hidden_weights;
  m.hidden_bias -= lr * g.hidden_bias;
  m.output_weights -= lr * g.output_weights;
  m.output_bias -= lr * g.output_bias;
  g.char_embedding.setZero();
  g.conv_weights.setZero();
  g.conv_bias.setZero();
  g.hidden_weights.setZero();
  g.hidden_bias.setZero();
  g.output_weights.setZero();
  g.output_bias.setZero();
}

double accuracy(const LemmatizerModel& m, std::span<const AnnotatedToken> tokens) {
  if (tokens.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& t : tokens) ok += predict(m, t).lemma == t.lemma;
  return static_cast<double>(ok) / static_cast<double>(tokens.size());
}

void write_matrix(BinaryWriter& w, const Eigen::MatrixXd& m) {
  w.u64(static_cast<uint64_t>(m.rows()));
  w.u64(static_cast<uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.size(); ++i) w.f64(m.data()[i]);
}

Eigen::MatrixXd read_matrix(BinaryReader& r) {
  const auto rows = static_cast<Eigen::Index>(r.u64());
  const auto cols = static_cast<Eigen::Index>(r.u64());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.f64();
  return m;
}

}  // namespace

std::vector<AnnotatedToken> in_context(std::span<const std::string> surfaces,
                                       std::span<const std::string> lemmas) {
  if (!lemmas.empty() && lemmas.size() != surfaces.size()) {
    throw ValidationError("in_context: surfaces and lemmas differ in length");
  }
  std::vector<AnnotatedToken> out(surfaces.size());
  const auto n = static_cast<std::ptrdiff_t>(surfaces.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto& t = out[i];
    t.surface = unicode::nfc(surfaces[i]);
    if (!lemmas.empty()) t.lemma = unicode::nfc(lemmas[i]);
    const std::array<std::ptrdiff_t, kContextSlots> offsets{-2, -1, 1, 2};
    for (int s = 0; s < kContextSlots; ++s) {
      const auto j = i + offsets[s];
      if (j >= 0 && j < n) t.context[s] = unicode::nfc(surfaces[j]);
    }
  }
  return out;
}

bool LemmatizerModel::all_finite() const {
  auto finite = [](const auto& m) { return m.allFinite(); };
  return finite(char_embedding) && finite(conv_weights) && finite(conv_bias) &&
         finite(hidden_weights) && finite(hidden_bias) && finite(output_weights) &&
         finite(output_bias);
}

std::vector<int> LemmatizerModel::char_ids(const std::string& surface) const {
  auto cps = unicode::to_u32(unicode::nfc(surface));
  const auto limit = static_cast<std::size_t>(config.max_length);
  if (cps.size() > limit) {
    const std::size_t head = limit / 2;
    cps = cps.substr(0, head) + cps.substr(cps.size() - (limit - head));
  }
  std::vector<int> ids(limit, 0);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const auto it = std::lower_bound(chars.begin(), chars.end(), cps[i]);
    ids[i] = it != chars.end() && *it == cps[i] ? static_cast<int>(it - chars.begin()) + 2 : 1;
  }
  return ids;
}

LemmatizerModel initialize(std::span<const AnnotatedToken> train,
                           embeddings::EmbeddingTable context_table,
                           const LemmatizerConfig& config) {
  if (train.empty()) throw ValidationError("lemmatizer: empty training set");
  if (config.max_length < config.window || config.window <= 0 || config.filters <= 0 ||
      config.hidden <= 0 || config.char_dim <= 0) {
    throw ValidationError("lemmatizer: invalid layer sizes");
  }
  LemmatizerModel m;
  m.config = config;
  m.context_table = std::move(context_table);
  std::set<std::string> lemmas;
  std::set<char32_t> chars;
  for (const auto& t : train) {
    if (t.lemma.empty()) throw ValidationError("lemmatizer: training token '" + t.surface + "' has no lemma");
    lemmas.insert(t.lemma);
    for (char32_t c : unicode::to_u32(unicode::nfc(t.surface))) chars.insert(c);
  }
  m.lemmas.assign(lemmas.begin(), lemmas.end());
  m.chars.assign(chars.begin(), chars.end());

  Rng rng(mix_seed(config.seed, 0x1e33));
  const int fan_conv = config.window * config.char_dim;
  m.char_embedding.resize(static_cast<Eigen::Index>(m.chars.size()) + 2, config.char_dim);
  uniform_init(m.char_embedding, 0.5, rng);
  m.char_embedding.row(0).setZero();
  m.conv_weights.resize(config.filters, fan_conv);
  uniform_init(m.conv_weights, 1.0 / std::sqrt(fan_conv), rng);
  m.conv_bias = Eigen::VectorXd::Zero(config.filters);
  m.hidden_weights.resize(config.hidden, m.feature_size());
  uniform_init(m.hidden_weights, 1.0 / std::sqrt(m.feature_size()), rng);
  m.hidden_bias = Eigen::VectorXd::Zero(config.hidden);
  m.output_weights.resize(static_cast<Eigen::Index>(m.lemmas.size()), config.hidden);
  uniform_init(m.output_weights, 1.0 / std::sqrt(config.hidden), rng);
  m.output_bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.lemmas.size()));
  return m;
}

Eigen::VectorXd encode_token(const LemmatizerModel& model, const AnnotatedToken& token) {
  return run_forward(model, token).features;
}

LemmatizerModel train(std::span<const AnnotatedToken> train_set, std::span<const AnnotatedToken> dev,
                      embeddings::EmbeddingTable context_table, const LemmatizerConfig& config) {
  if (dev.empty()) throw ValidationError("lemmatizer: empty dev set, model selection impossible");
  LemmatizerModel m = initialize(train_set, std::move(context_table), config);
  std::vector<int> targets(train_set.size());
  for (std::size_t i = 0; i < train_set.size(); ++i) targets[i] = class_of(m, train_set[i].lemma);

  LemmatizerModel best = m;
  best.dev_accuracy = -1.0;
  Gradients g(m);
  Rng rng(mix_seed(config.seed, 0x5eed));
  std::vector<std::size_t> order(train_set.size());
  std::vector<EpochStats> history;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));
    double loss = 0.0;
    for (auto i : order) {
      const auto f = run_forward(m, train_set[i]);
      loss += backward(m, f, targets[i], g);
      sgd_step(m, g, config.learning_rate);
    }
    EpochStats s;
    s.epoch = epoch;
    s.train_loss = loss / static_cast<double>(train_set.size());
    s.train_accuracy = accuracy(m, train_set);
    s.dev_accuracy = accuracy(m, dev);
    history.push_back(s);
    if (s.dev_accuracy > best.dev_accuracy) {
      best = m;
      best.epoch = epoch;
      best.dev_accuracy = s.dev_accuracy;
    }
  }
  best.history = std::move(history);
  return best;
}

Prediction predict(const LemmatizerModel& model, const AnnotatedToken& token) {
  const auto f = run_forward(model, token);
  Prediction p;
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < f.probabilities.size(); ++i) {
    if (f.probabilities[i] > f.probabilities[arg]) arg = i;  // first max = smallest lemma
  }
  p.lemma = model.lemmas[static_cast<std::size_t>(arg)];
  p.confidence = f.probabilities[arg];
  p.probabilities.assign(f.probabilities.data(), f.probabilities.data() + f.probabilities.size());
  return p;
}

LemmaEvalReport evaluate_predictions(std::span<const AnnotatedToken> test,
                                     std::span<const std::string> predicted,
                                     const std::vector<std::string>& train_surfaces) {
  if (test.empty()) throw ValidationError("lemmatizer evaluate: empty test set");
  const std::set<std::string> seen(train_surfaces.begin(), train_surfaces.end());
  LemmaEvalReport r;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const bool ok = predicted[i] == test[i].lemma;
    ++r.n_all;
    r.correct_all += ok;
    if (seen.contains(test[i].surface)) {
      ++r.n_known;
      r.correct_known += ok;
    } else {
      ++r.n_unknown;
      r.correct_unknown += ok;
    }
  }
  r.accuracy_all = static_cast<double>(r.correct_all) / static_cast<double>(r.n_all);
  if (r.n_known) r.accuracy_known = static_cast<double>(r.correct_known) / static_cast<double>(r.n_known);
  if (r.n_unknown) {
    r.accuracy_unknown = static_cast<double>(r.correct_unknown) / static_cast<double>(r.n_unknown);
  }
  return r;
}

LemmaEvalReport evaluate(const LemmatizerModel& model, std::span<const AnnotatedToken> test,
                         const std::vector<std::string>& train_surfaces) {
  std::vector<std::string> predicted;
  predicted.reserve(test.size());
  for (const auto& t : test) predicted.push_back(predict(model, t).lemma);
  return evaluate_predictions(test, predicted, train_surfaces);
}

std::string majority_lemma(std::span<const AnnotatedToken> train) {
  if (train.empty()) throw ValidationError("majority_lemma: empty training set");
  std::map<std::string, std::size_t> counts;
  for (const auto& t : train) ++counts[t.lemma];
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

LossAndGradient loss_and_gradient(const LemmatizerModel& model, const AnnotatedToken& token) {
  const int target = class_of(model, token.lemma);
  if (target < 0) throw ValidationError("lemmatizer: lemma '" + token.lemma + "' is not an output class");
  Gradients g(model);
  const auto f = run_forward(model, token);
  LossAndGradient out;
  out.loss = backward(model, f, target, g);
  auto append = [&](const auto& m) { out.gradient.insert(out.gradient.end(), m.data(), m.data() + m.size()); };
  append(g.char_embedding);
  append(g.conv_weights);
  append(g.conv_bias);
  append(g.hidden_weights);
  append(g.hidden_bias);
  append(g.output_weights);
  append(g.output_bias);
  return out;
}

std::vector<double> flatten_parameters(const LemmatizerModel& model) {
  std::vector<double> out;
  auto& m = const_cast<LemmatizerModel&>(model);
  for_each_param(m, [&](double* p, Eigen::Index n) { out.insert(out.end(), p, p + n); });
  return out;
}

void assign_parameters(LemmatizerModel& model, std::span<const double> values) {
  std::size_t pos = 0;
  for_each_param(model, [&](double* p, Eigen::Index n) {
    if (pos + static_cast<std::size_t>(n) > values.size()) {
      throw ValidationError("assign_parameters: too few values");
    }
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), n, p);
    pos += static_cast<std::size_t>(n);
  });
  if (pos != values.size()) throw ValidationError("assign_parameters: too many values");
}

std::string LemmatizerModel::serialize() const {
  BinaryWriter w;
  w.magic(kMagic);
  w.u32(kVersion);
  for (int v : {config.char_dim, config.window, config.filters, config.max_length, config.hidden,
                config.epochs}) {
    w.u32(static_cast<uint32_t>(v));
  }
  w.f64(config.learning_rate);
  w.u64(config.seed);
  w.u64(lemmas.size());
  for (const auto& l : lemmas) w.str(l);
  w.u64(chars.size());
  for (char32_t c : chars) w.u32(static_cast<uint32_t>(c));
  w.str(context_table.serialize());
  for (const auto* m : {&char_embedding, &conv_weights, &hidden_weights, &output_weights}) {
    write_matrix(w, *m);
  }
  for (const auto* v : {&conv_bias, &hidden_bias, &output_bias}) write_matrix(w, *v);
  w.u32(static_cast<uint32_t>(epoch));
  w.f64(dev_accuracy);
  w.u64(history.size());
  for (const auto& h : history) {
    w.u32(static_cast<uint32_t>(h.epoch));
    w.f64(h.train_loss);
    w.f64(h.train_accuracy);
    w.f64(h.dev_accuracy);
  }
  return w.bytes();
}

LemmatizerModel LemmatizerModel::deserialize(std::string bytes) {
  BinaryReader r(std::move(bytes));
  r.expect_magic(kMagic);
  const auto version = r.u32();
  if (version != kVersion) {
    throw ParseError("lemmatizer model: unsupported version " + std::to_string(version));
  }
  LemmatizerModel m;
  for (int* v : {&m.config.char_dim, &m.config.window, &m.config.filters, &m.config.max_length,
                 &m.config.hidden, &m.config.epochs}) {
    *v = static_cast<int>(r.u32());
  }
  m.config.learning_rate = r.f64();
  m.config.seed = r.u64();
  const auto nl = r.u64();
  for (uint64_t i = 0; i < nl; ++i) m.lemmas.push_back(r.str());
  const auto nc = r.u64();
  for (uint64_t i = 0; i < nc; ++i) m.chars.push_back(static_cast<char32_t>(r.u32()));
  m.context_table = embeddings::EmbeddingTable::deserialize(r.str());
  for (auto* mat : {&m.char_embedding, &m.conv_weights, &m.hidden_weights, &m.output_weights}) {
    *mat = read_matrix(r);
  }
  for (auto* v : {&m.conv_bias, &m.hidden_bias, &m.output_bias}) {
    const Eigen::MatrixXd col = read_matrix(r);
    *v = Eigen::Map<const Eigen::VectorXd>(col.data(), col.size());
  }
  m.epoch = static_cast<int>(r.u32());
  m.dev_accuracy = r.f64();
  const auto nh = r.u64();
  for (uint64_t i = 0; i < nh; ++i) {
    EpochStats s;
    s.epoch = static_cast<int>(r.u32());
    s.train_loss = r.f64();
    s.train_accuracy = r.f64();
    s.dev_accuracy = r.f64();
    m.history.push_back(s);
  }
  if (!r.at_end()) throw ParseError("lemmatizer model: trailing bytes");
  if (m.output_weights.rows() != static_cast<Eigen::Index>(m.lemmas.size()) ||
      m.hidden_weights.cols() != m.feature_size()) {
    throw ParseError("lemmatizer model: layer shapes do not match header");
  }
  return m;
}

void LemmatizerModel::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

LemmatizerModel LemmatizerModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

}  // namespace scriptorium::lemmatizer
