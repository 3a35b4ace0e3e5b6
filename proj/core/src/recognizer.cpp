// core/src/recognizer.cpp

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

#include "scriptorium/recognizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "scriptorium/binary_io.hpp"
#include "scriptorium/error.hpp"
#include "scriptorium/eval.hpp"
#include "scriptorium/random.hpp"
#include "scriptorium/unicode.hpp"

namespace scriptorium::recognizer {

using Eigen::MatrixXf;
using Eigen::VectorXf;

// --- CharacterInventory -------------------------------------------------------

CharacterInventory::CharacterInventory(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const std::string& s = symbols_[i];
    if (unicode::length(s) != 1 || unicode::nfc(s) != s) {
      throw ValidationError("inventory symbol '" + s + "' is not a single NFC code point");
    }
    if (!index_.emplace(s, static_cast<int>(i) + 1).second) {
      throw ValidationError("duplicate inventory symbol '" + s + "'");
    }
  }
}

CharacterInventory CharacterInventory::from_texts(std::span<const std::string> texts) {
  std::set<std::string> seen;
  for (const auto& t : texts) {
    for (auto& cp : unicode::code_points(unicode::nfc(t))) seen.insert(cp);
  }
  return CharacterInventory(std::vector<std::string>(seen.begin(), seen.end()));
}

std::optional<int> CharacterInventory::class_of(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::size_t, std::string>> CharacterInventory::unknown_symbols(
    std::string_view text) const {
  std::vector<std::pair<std::size_t, std::string>> out;
  const auto cps = unicode::code_points(text);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (!index_.contains(cps[i])) out.emplace_back(i, cps[i]);
  }
  return out;
}

std::vector<int> CharacterInventory::encode(std::string_view text) const {
  std::vector<int> out;
  const auto cps = unicode::code_points(text);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    auto it = index_.find(cps[i]);
    if (it == index_.end()) {
      throw ValidationError("symbol '" + cps[i] + "' at offset " + std::to_string(i) +
                            " is not in the character inventory");
    }
    out.push_back(it->second);
  }
  return out;
}

std::string CharacterInventory::decode(std::span<const int> classes) const {
  std::string out;
  for (int c : classes) {
    if (c > kBlank && c < num_classes()) out += symbol(c);
  }
  return out;
}

// --- Input normalization --------------------------------------------------

MatrixXf normalize_line(const imaging::GrayImage& line, int target_height) {
  if (line.empty()) throw ValidationError("normalize_line: empty image");
  if (target_height < 1) throw ValidationError("normalize_line: bad target height");
  const double scale = static_cast<double>(target_height) / line.height;
  const int out_w = std::max(1, static_cast<int>(std::lround(line.width * scale)));
  const double sx = static_cast<double>(line.width) / out_w;
  const double sy = static_cast<double>(line.height) / target_height;

  // Precompute horizontal taps; half-pixel centers, clamped at the borders.
  std::vector<int> x0(out_w), x1(out_w);
  std::vector<float> fx(out_w);
  for (int x = 0; x < out_w; ++x) {
    double src = std::clamp((x + 0.5) * sx - 0.5, 0.0, line.width - 1.0);
    x0[x] = static_cast<int>(std::floor(src));
    x1[x] = std::min(x0[x] + 1, line.width - 1);
    fx[x] = static_cast<float>(src - x0[x]);
  }
  MatrixXf out(target_height, out_w);
  for (int y = 0; y < target_height; ++y) {
    const double src = std::clamp((y + 0.5) * sy - 0.5, 0.0, line.height - 1.0);
    const int y0 = static_cast<int>(std::floor(src));
    const int y1 = std::min(y0 + 1, line.height - 1);
    const float fy = static_cast<float>(src - y0);
    for (int x = 0; x < out_w; ++x) {
      const float top = (1 - fx[x]) * line.at(x0[x], y0) + fx[x] * line.at(x1[x], y0);
      const float bot = (1 - fx[x]) * line.at(x0[x], y1) + fx[x] * line.at(x1[x], y1);
      out(y, x) = 1.0f - ((1 - fy) * top + fy * bot) / 255.0f;
    }
  }
  return out;
}

// --- Model ----------------------------------------------------------------

namespace {

LstmWeights lstm_zeros(int in, int hidden) {
  return {MatrixXf::Zero(4 * hidden, in), MatrixXf::Zero(4 * hidden, hidden),
          VectorXf::Zero(4 * hidden)};
}

void fill_uniform(MatrixXf& m, double bound, Rng& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m(i, j) = static_cast<float>(rng.uniform(-bound, bound));
    }
  }
}

}  // namespace

RecognizerModel RecognizerModel::zeros(CharacterInventory inventory, int input_height,
                                       int hidden_size) {
  if (input_height < 1 || hidden_size < 1) {
    throw ValidationError("recognizer: input height and hidden size must be positive");
  }
  RecognizerModel m;
  m.inventory = std::move(inventory);
  m.input_height = input_height;
  m.hidden_size = hidden_size;
  m.forward_lstm = lstm_zeros(input_height, hidden_size);
  m.backward_lstm = lstm_zeros(input_height, hidden_size);
  m.output_weights = MatrixXf::Zero(m.inventory.num_classes(), 2 * hidden_size);
  m.output_bias = VectorXf::Zero(m.inventory.num_classes());
  return m;
}

RecognizerModel RecognizerModel::initialize(CharacterInventory inventory, int input_height,
                                            int hidden_size, uint64_t seed) {
  RecognizerModel m = zeros(std::move(inventory), input_height, hidden_size);
  Rng rng(seed);
  const double lstm_bound = 1.0 / std::sqrt(static_cast<double>(input_height + hidden_size));
  for (LstmWeights* w : {&m.forward_lstm, &m.backward_lstm}) {
    fill_uniform(w->input, lstm_bound, rng);
    fill_uniform(w->recurrent, lstm_bound, rng);
    w->bias.segment(hidden_size, hidden_size).setConstant(1.0f);  // forget gate
  }
  fill_uniform(m.output_weights, 1.0 / std::sqrt(2.0 * hidden_size), rng);
  return m;
}

bool RecognizerModel::all_finite() const {
  auto ok = [](const auto& m) { return m.allFinite(); };
  return ok(forward_lstm.input) && ok(forward_lstm.recurrent) && ok(forward_lstm.bias) &&
         ok(backward_lstm.input) && ok(backward_lstm.recurrent) && ok(backward_lstm.bias) &&
         ok(output_weights) && ok(output_bias);
}

std::size_t RecognizerModel::parameter_count() const {
  auto n = [](const auto& m) { return static_cast<std::size_t>(m.size()); };
  return 2 * (n(forward_lstm.input) + n(forward_lstm.recurrent) + n(forward_lstm.bias)) +
         n(output_weights) + n(output_bias);
}

namespace {

constexpr std::string_view kModelMagic = "SCRHTR";
constexpr uint32_t kModelVersion = 1;

void write_matrix(BinaryWriter& w, const MatrixXf& m) {
  w.u32(static_cast<uint32_t>(m.rows()));
  w.u32(static_cast<uint32_t>(m.cols()));
  w.floats(m.data(), static_cast<std::size_t>(m.size()));
}

MatrixXf read_matrix(BinaryReader& r) {
  const auto rows = r.u32(), cols = r.u32();
  auto data = r.floats();
  if (data.size() != static_cast<std::size_t>(rows) * cols) {
    throw ParseError("model file: matrix size mismatch");
  }
  return Eigen::Map<MatrixXf>(data.data(), rows, cols);
}

}  // namespace

std::string RecognizerModel::serialize() const {
  BinaryWriter w;
  w.magic(kModelMagic);
  w.u32(kModelVersion);
  w.u32(static_cast<uint32_t>(inventory.size()));
  for (const auto& s : inventory.symbols()) w.str(s);
  w.u32(static_cast<uint32_t>(input_height));
  w.u32(static_cast<uint32_t>(hidden_size));
  w.i64(checkpoint_iter);
  w.f64(dev_cer);
  for (const LstmWeights* l : {&forward_lstm, &backward_lstm}) {
    write_matrix(w, l->input);
    write_matrix(w, l->recurrent);
    write_matrix(w, l->bias);
  }
  write_matrix(w, output_weights);
  write_matrix(w, output_bias);
  return w.bytes();
}

RecognizerModel RecognizerModel::deserialize(std::string bytes) {
  BinaryReader r(std::move(bytes));
  r.expect_magic(kModelMagic);
  const auto version = r.u32();
  if (version != kModelVersion) {
    throw ParseError("unsupported recognizer model version " + std::to_string(version));
  }
  std::vector<std::string> symbols(r.u32());
  for (auto& s : symbols) s = r.str();
  const int height = static_cast<int>(r.u32());
  const int hidden = static_cast<int>(r.u32());
  RecognizerModel m = zeros(CharacterInventory(std::move(symbols)), height, hidden);
  m.checkpoint_iter = r.i64();
  m.dev_cer = r.f64();
  for (LstmWeights* l : {&m.forward_lstm, &m.backward_lstm}) {
    l->input = read_matrix(r);
    l->recurrent = read_matrix(r);
    l->bias = read_matrix(r);
  }
  m.output_weights = read_matrix(r);
  m.output_bias = read_matrix(r);
  const RecognizerModel shape = zeros(m.inventory, height, hidden);
  if (m.parameter_count() != shape.parameter_count() ||
      m.output_weights.rows() != shape.output_weights.rows() ||
      m.forward_lstm.input.cols() != shape.forward_lstm.input.cols()) {
    throw ParseError("model file: inconsistent tensor shapes");
  }
  if (!r.at_end()) throw ParseError("model file: trailing bytes");
  return m;
}

void RecognizerModel::save(const std::filesystem::path& path) const {
  write_file(path, serialize());
}

RecognizerModel RecognizerModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

// --- Network --------------------------------------------------------------

namespace {

struct LstmTrace {
  MatrixXf gates;      // 4H x T, post-activation
  MatrixXf cell;       // H x T
  MatrixXf tanh_cell;  // H x T
  MatrixXf hidden;     // H x T
};

inline auto sigmoid(const Eigen::ArrayXf& x) { return (1.0f + (-x).exp()).inverse(); }

void lstm_forward(const LstmWeights& w, const MatrixXf& x, LstmTrace& tr) {
  const Eigen::Index H = w.recurrent.cols(), T = x.cols();
  tr.gates.noalias() = w.input * x;
  tr.gates.colwise() += w.bias;
  tr.cell.resize(H, T);
  tr.tanh_cell.resize(H, T);
  tr.hidden.resize(H, T);
  VectorXf h = VectorXf::Zero(H), c = VectorXf::Zero(H);
  for (Eigen::Index t = 0; t < T; ++t) {
    auto z = tr.gates.col(t);
    if (t > 0) z.noalias() += w.recurrent * h;
    z.segment(0, 3 * H) = sigmoid(z.segment(0, 3 * H).array()).matrix();
    z.segment(3 * H, H) = z.segment(3 * H, H).array().tanh().matrix();
    c = z.segment(H, H).cwiseProduct(c) + z.segment(0, H).cwiseProduct(z.segment(3 * H, H));
    tr.cell.col(t) = c;
    tr.tanh_cell.col(t) = c.array().tanh().matrix();
    h = z.segment(2 * H, H).cwiseProduct(tr.tanh_cell.col(t));
    tr.hidden.col(t) = h;
  }
}

// Accumulates parameter gradients into `grad` given dLoss/dhidden (H x T).
void lstm_backward(const LstmWeights& w, const MatrixXf& x, const LstmTrace& tr,
                   const MatrixXf& dhidden, LstmWeights& grad) {
  const Eigen::Index H = w.recurrent.cols(), T = x.cols();
  MatrixXf dz(4 * H, T);
  VectorXf dh_next = VectorXf::Zero(H), dc_next = VectorXf::Zero(H);
  Eigen::ArrayXf dh(H), dc(H);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const auto gates = tr.gates.col(t).array();
    const auto i = gates.segment(0, H);
    const auto f = gates.segment(H, H);
    const auto o = gates.segment(2 * H, H);
    const auto g = gates.segment(3 * H, H);
    const auto tc = tr.tanh_cell.col(t).array();
    dh = dhidden.col(t).array() + dh_next.array();
    dc = dh * o * (1.0f - tc.square()) + dc_next.array();
    auto dzt = dz.col(t).array();
    dzt.segment(0, H) = dc * g * i * (1.0f - i);
    if (t > 0) {
      dzt.segment(H, H) = dc * tr.cell.col(t - 1).array() * f * (1.0f - f);
    } else {
      dzt.segment(H, H).setZero();
    }
    dzt.segment(2 * H, H) = dh * tc * o * (1.0f - o);
    dzt.segment(3 * H, H) = dc * i * (1.0f - g.square());
    dc_next = (dc * f).matrix();
    dh_next.noalias() = w.recurrent.transpose() * dz.col(t);
  }
  grad.input.noalias() += dz * x.transpose();
  grad.bias += dz.rowwise().sum();
  if (T > 1) {
    grad.recurrent.noalias() += dz.rightCols(T - 1) * tr.hidden.leftCols(T - 1).transpose();
  }
}

struct NetworkTrace {
  MatrixXf reversed_input;
  LstmTrace fwd, bwd;
  MatrixXf features;  // 2H x T
  MatrixXf logits;    // T x C
};

void network_forward(const RecognizerModel& m, const MatrixXf& input, NetworkTrace& tr) {
  if (input.rows() != m.input_height) {
    throw ValidationError("forward: input height " + std::to_string(input.rows()) +
                          " does not match model input height " +
                          std::to_string(m.input_height));
  }
  const Eigen::Index H = m.hidden_size, T = input.cols();
  lstm_forward(m.forward_lstm, input, tr.fwd);
  tr.reversed_input = input.rowwise().reverse();
  lstm_forward(m.backward_lstm, tr.reversed_input, tr.bwd);
  tr.features.resize(2 * H, T);
  tr.features.topRows(H) = tr.fwd.hidden;
  tr.features.bottomRows(H) = tr.bwd.hidden.rowwise().reverse();
  MatrixXf y = m.output_weights * tr.features;
  y.colwise() += m.output_bias;
  tr.logits = y.transpose();
}

// Parameter gradients share the model layout.
RecognizerModel zero_like(const RecognizerModel& m) {
  RecognizerModel g;
  g.hidden_size = m.hidden_size;
  g.input_height = m.input_height;
  g.forward_lstm = lstm_zeros(m.input_height, m.hidden_size);
  g.backward_lstm = lstm_zeros(m.input_height, m.hidden_size);
  g.output_weights = MatrixXf::Zero(m.output_weights.rows(), m.output_weights.cols());
  g.output_bias = VectorXf::Zero(m.output_bias.size());
  return g;
}

void network_backward(const RecognizerModel& m, const MatrixXf& input, const NetworkTrace& tr,
                      const MatrixXf& dlogits, RecognizerModel& grad) {
  const Eigen::Index H = m.hidden_size;
  const MatrixXf dy = dlogits.transpose();  // C x T
  grad.output_weights.noalias() += dy * tr.features.transpose();
  grad.output_bias += dy.rowwise().sum();
  const MatrixXf dfeat = m.output_weights.transpose() * dy;
  lstm_backward(m.forward_lstm, input, tr.fwd, dfeat.topRows(H), grad.forward_lstm);
  const MatrixXf dbwd = dfeat.bottomRows(H).rowwise().reverse();
  lstm_backward(m.backward_lstm, tr.reversed_input, tr.bwd, dbwd, grad.backward_lstm);
}

template <typename Fn>
void for_each_tensor(RecognizerModel& m, Fn&& fn) {
  for (LstmWeights* l : {&m.forward_lstm, &m.backward_lstm}) {
    fn(l->input.data(), l->input.size());
    fn(l->recurrent.data(), l->recurrent.size());
    fn(l->bias.data(), l->bias.size());
  }
  fn(m.output_weights.data(), m.output_weights.size());
  fn(m.output_bias.data(), m.output_bias.size());
}

}  // namespace

MatrixXf forward(const RecognizerModel& model, const MatrixXf& input) {
  NetworkTrace tr;
  network_forward(model, input, tr);
  return tr.logits;
}

std::vector<MatrixXf> forward_batch(const RecognizerModel& model,
                                    std::span<const MatrixXf> inputs) {
  std::vector<MatrixXf> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) out.push_back(forward(model, in));
  return out;
}

std::vector<int> best_path(const MatrixXf& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    Eigen::Index arg = 0;
    logits.row(t).maxCoeff(&arg);
    out[t] = static_cast<int>(arg);
  }
  return out;
}

std::string decode_greedy(const MatrixXf& logits, const CharacterInventory& inventory) {
  std::vector<int> collapsed;
  int prev = -1;
  for (int c : best_path(logits)) {
    if (c != prev && c != kBlank) collapsed.push_back(c);
    prev = c;
  }
  return inventory.decode(collapsed);
}

Recognition recognize(const RecognizerModel& model, const imaging::GrayImage& line) {
  const MatrixXf input = normalize_line(line, model.input_height);
  const MatrixXf logits = forward(model, input);
  Recognition r;
  // A line without a single ink pixel has nothing to read.
  const bool inkless = input.maxCoeff() < 0.5f / 255.0f;
  if (!inkless) r.text = decode_greedy(logits, model.inventory);
  double emitting = 0.0, all = 0.0;
  int n_emitting = 0;
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    Eigen::Index arg = 0;
    const float m = logits.row(t).maxCoeff(&arg);
    const double p = 1.0 / (logits.row(t).array() - m).exp().sum();
    all += p;
    if (arg != kBlank && !inkless) {
      emitting += p;
      ++n_emitting;
    }
  }
  if (n_emitting > 0) {
    r.confidence = emitting / n_emitting;
  } else if (logits.rows() > 0) {
    r.confidence = all / static_cast<double>(logits.rows());
  }
  return r;
}

// --- Gradients ------------------------------------------------------------

std::vector<double> flatten_parameters(const RecognizerModel& model) {
  std::vector<double> out;
  RecognizerModel& m = const_cast<RecognizerModel&>(model);
  for_each_tensor(m, [&](const float* p, Eigen::Index n) { out.insert(out.end(), p, p + n); });
  return out;
}

void assign_parameters(RecognizerModel& model, std::span<const double> values) {
  std::size_t k = 0;
  for_each_tensor(model, [&](float* p, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) p[i] = static_cast<float>(values[k++]);
  });
  if (k != values.size()) throw ValidationError("assign_parameters: size mismatch");
}

LossAndGradient loss_and_gradient(const RecognizerModel& model, const MatrixXf& input,
                                  std::span<const int> target) {
  NetworkTrace tr;
  network_forward(model, input, tr);
  const CtcResult ctc = ctc_loss(tr.logits.cast<double>(), target);
  RecognizerModel grad = zero_like(model);
  network_backward(model, input, tr, ctc.grad.cast<float>(), grad);
  return {ctc.loss, flatten_parameters(grad)};
}

// --- Training -------------------------------------------------------------

namespace {

double corpus_cer(const RecognizerModel& model, std::span<const imaging::LineSample> lines,
                  std::span<const std::size_t> which) {
  std::size_t edits = 0, chars = 0;
  for (std::size_t i : which) {
    const auto& gt = *lines[i].record.gt_text;
    const auto pred = recognize(model, lines[i].image).text;
    edits += eval::edit_distance(gt, pred);
    chars += unicode::length(gt);
  }
  return chars == 0 ? 0.0 : static_cast<double>(edits) / static_cast<double>(chars);
}

std::vector<std::size_t> evenly_spaced(const std::vector<std::size_t>& pool, int limit) {
  if (limit <= 0 || pool.size() <= static_cast<std::size_t>(limit)) return pool;
  std::vector<std::size_t> out;
  for (int k = 0; k < limit; ++k) {
    out.push_back(pool[static_cast<std::size_t>(k) * pool.size() / static_cast<std::size_t>(limit)]);
  }
  return out;
}

}  // namespace

TrainingRun train(std::span<const imaging::LineSample> lines,
                  std::span<const imaging::LineSample> dev,
                  const CharacterInventory& inventory, const TrainingConfig& config,
                  const CheckpointCallback& on_checkpoint) {
  if (lines.empty()) throw ValidationError("train: no training lines");
  if (config.checkpoint_interval < 1 || config.max_iterations < 0) {
    throw ValidationError("train: bad checkpoint interval or iteration count");
  }
  if (!(config.learning_rate > 0.0) || config.momentum < 0.0 || config.momentum >= 1.0) {
    throw ValidationError("train: learning rate must be positive and momentum in [0,1)");
  }
  // Validate every target before touching the weights.
  std::vector<std::vector<int>> targets;
  targets.reserve(lines.size());
  for (const auto& l : lines) {
    if (!l.record.gt_text) {
      throw ValidationError("train: line " + l.record.id + " has no ground truth");
    }
    try {
      targets.push_back(inventory.encode(*l.record.gt_text));
    } catch (const ValidationError& e) {
      throw ValidationError("train: line " + l.record.id + ": " + e.what());
    }
  }
  for (const auto& l : dev) {
    if (!l.record.gt_text) throw ValidationError("train: dev line " + l.record.id + " has no ground truth");
  }

  TrainingRun run;
  run.config = config;
  RecognizerModel model =
      RecognizerModel::initialize(inventory, config.input_height, config.hidden_size, config.seed);
  RecognizerModel velocity = zero_like(model);
  RecognizerModel grad = zero_like(model);

  std::vector<std::size_t> real_pool, all_pool, dev_all;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    all_pool.push_back(i);
    if (lines[i].record.origin == LineOrigin::kReal) real_pool.push_back(i);
  }
  for (std::size_t i = 0; i < dev.size(); ++i) dev_all.push_back(i);
  const auto real_eval = evenly_spaced(real_pool, config.train_eval_limit);
  const auto all_eval = evenly_spaced(all_pool, config.train_eval_limit);

  Rng rng(mix_seed(config.seed, 0x7261696eull));
  const auto lr = static_cast<float>(config.learning_rate);
  const auto mu = static_cast<float>(config.momentum);
  double loss_sum = 0.0;
  int64_t loss_count = 0;
  NetworkTrace tr;

  for (int64_t iter = 1; iter <= config.max_iterations; ++iter) {
    const std::size_t idx = rng.below(lines.size());
    const MatrixXf input = normalize_line(lines[idx].image, config.input_height);
    const auto& target = targets[idx];
    if (input.cols() < std::max(1, ctc_min_frames(target))) {
      ++run.skipped_lines;
    } else {
      network_forward(model, input, tr);
      const CtcResult ctc = ctc_loss(tr.logits.cast<double>(), target);
      loss_sum += ctc.loss;
      ++loss_count;
      for_each_tensor(grad, [](float* p, Eigen::Index n) { std::fill(p, p + n, 0.0f); });
      network_backward(model, input, tr, ctc.grad.cast<float>(), grad);

      float scale = 1.0f;
      if (config.clip_norm > 0.0) {
        double sq = 0.0;
        for_each_tensor(grad, [&](const float* p, Eigen::Index n) {
          for (Eigen::Index i = 0; i < n; ++i) sq += static_cast<double>(p[i]) * p[i];
        });
        const double norm = std::sqrt(sq);
        if (norm > config.clip_norm) scale = static_cast<float>(config.clip_norm / norm);
      }
      // velocity = mu * velocity - lr * grad; weights += velocity
      std::vector<float*> vel_ptrs, grad_ptrs;
      std::vector<Eigen::Index> sizes;
      for_each_tensor(velocity, [&](float* p, Eigen::Index n) { vel_ptrs.push_back(p); sizes.push_back(n); });
      for_each_tensor(grad, [&](float* p, Eigen::Index) { grad_ptrs.push_back(p); });
      std::size_t k = 0;
      for_each_tensor(model, [&](float* w, Eigen::Index n) {
        Eigen::Map<Eigen::ArrayXf> wv(w, n), vv(vel_ptrs[k], n), gv(grad_ptrs[k], n);
        vv = mu * vv - (lr * scale) * gv;
        wv += vv;
        ++k;
      });
    }

    if (iter % config.checkpoint_interval == 0 || iter == config.max_iterations) {
      HistoryEntry h;
      h.iteration = iter;
      h.train_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
      h.train_error = real_eval.empty() ? 0.0 : corpus_cer(model, lines, real_eval);
      h.train_error_all = corpus_cer(model, lines, all_eval);
      h.dev_cer = dev.empty() ? 0.0 : corpus_cer(model, dev, dev_all);
      loss_sum = 0.0;
      loss_count = 0;
      if (!model.all_finite()) throw Error("train: weights diverged at iteration " + std::to_string(iter));
      model.checkpoint_iter = iter;
      model.dev_cer = h.dev_cer;
      run.history.push_back(h);
      Checkpoint cp{iter, model};
      if (on_checkpoint) on_checkpoint(cp, h);
      if (config.keep_checkpoints) run.checkpoints.push_back(std::move(cp));
    }
  }
  return run;
}

}  // namespace scriptorium::recognizer
