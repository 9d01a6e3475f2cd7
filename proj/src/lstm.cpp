#include "locomode/lstm.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "locomode/error.hpp"
#include "locomode/rng.hpp"

namespace locomode {
namespace {

constexpr double kProbFloor = 1e-12;

// Activations over whole gate blocks; Eigen vectorizes the exp calls.
Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

// Everything the backward pass needs, one entry per timestep.
struct BatchCache {
  std::vector<Eigen::MatrixXd> x;                          // input x B
  std::vector<Eigen::MatrixXd> gi, gf, go, gg, c, tanh_c, h;  // H x B
  Eigen::MatrixXd probs;                                   // out x B
};

void check_batch(const LstmModel& model,
                 std::span<const Eigen::MatrixXd* const> windows) {
  if (windows.empty()) throw Error(ErrorKind::EmptyInput, "empty batch");
  const Eigen::Index steps = windows.front()->rows();
  if (steps < 1) throw Error(ErrorKind::TooFewFrames, "window has no frames");
  for (const Eigen::MatrixXd* w : windows) {
    if (w->cols() != model.input_dim)
      throw Error(ErrorKind::ShapeMismatch,
                  "window has " + std::to_string(w->cols()) +
                      " channels, model expects " +
                      std::to_string(model.input_dim));
    if (w->rows() != steps)
      throw Error(ErrorKind::MixedShapes,
                  "windows in one batch differ in frame count");
  }
}

BatchCache forward_batch(const LstmModel& model,
                         std::span<const Eigen::MatrixXd* const> windows) {
  check_batch(model, windows);
  const Eigen::Index batch = static_cast<Eigen::Index>(windows.size());
  const Eigen::Index steps = windows.front()->rows();
  const Eigen::Index hid = model.hidden_dim;

  BatchCache cache;
  cache.x.resize(steps);
  cache.gi.resize(steps);
  cache.gf.resize(steps);
  cache.go.resize(steps);
  cache.gg.resize(steps);
  cache.c.resize(steps);
  cache.tanh_c.resize(steps);
  cache.h.resize(steps);

  Eigen::MatrixXd h_prev = Eigen::MatrixXd::Zero(hid, batch);
  Eigen::MatrixXd c_prev = Eigen::MatrixXd::Zero(hid, batch);
  Eigen::MatrixXd z(4 * hid, batch);
  for (Eigen::Index t = 0; t < steps; ++t) {
    Eigen::MatrixXd& x_t = cache.x[t];
    x_t.resize(model.input_dim, batch);
    for (Eigen::Index b = 0; b < batch; ++b)
      x_t.col(b) = windows[static_cast<std::size_t>(b)]->row(t).transpose();

    z.noalias() = model.w_input * x_t;
    z.noalias() += model.w_recur * h_prev;
    z.colwise() += model.bias.col(0);

    cache.gi[t] = sigmoid(z.topRows(hid));
    cache.gf[t] = sigmoid(z.middleRows(hid, hid));
    cache.go[t] = sigmoid(z.middleRows(2 * hid, hid));
    cache.gg[t] = z.bottomRows(hid).array().tanh().matrix();

    cache.c[t] = cache.gf[t].cwiseProduct(c_prev) + cache.gi[t].cwiseProduct(cache.gg[t]);
    cache.tanh_c[t] = cache.c[t].array().tanh().matrix();
    cache.h[t] = cache.go[t].cwiseProduct(cache.tanh_c[t]);

    h_prev = cache.h[t];
    c_prev = cache.c[t];
  }

  Eigen::MatrixXd logits = model.w_head * cache.h[static_cast<std::size_t>(steps - 1)];
  logits.colwise() += model.b_head.col(0);
  cache.probs.resize(logits.rows(), logits.cols());
  for (Eigen::Index b = 0; b < batch; ++b) {
    Eigen::VectorXd shifted = logits.col(b).array() - logits.col(b).maxCoeff();
    Eigen::VectorXd e = shifted.array().exp();
    cache.probs.col(b) = e / e.sum();
  }
  return cache;
}

LstmGradients backward_batch(const LstmModel& model, const BatchCache& cache,
                             std::span<const TaskCategory> truths) {
  const Eigen::Index batch = cache.probs.cols();
  const Eigen::Index steps = static_cast<Eigen::Index>(cache.h.size());
  const Eigen::Index hid = model.hidden_dim;
  LstmGradients grads = LstmGradients::zero(model);

  // d(mean CE)/d(logits) = (p - onehot) / B
  Eigen::MatrixXd d_logits = cache.probs;
  for (Eigen::Index b = 0; b < batch; ++b)
    d_logits(static_cast<Eigen::Index>(truths[static_cast<std::size_t>(b)]), b) -= 1.0;
  d_logits /= static_cast<double>(batch);

  grads.w_head.noalias() = d_logits * cache.h[static_cast<std::size_t>(steps - 1)].transpose();
  grads.b_head = d_logits.rowwise().sum();

  Eigen::MatrixXd d_h = model.w_head.transpose() * d_logits;
  Eigen::MatrixXd d_c = Eigen::MatrixXd::Zero(hid, batch);
  Eigen::MatrixXd d_z(4 * hid, batch);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const std::size_t ti = static_cast<std::size_t>(t);
    const Eigen::MatrixXd& gi = cache.gi[ti];
    const Eigen::MatrixXd& gf = cache.gf[ti];
    const Eigen::MatrixXd& go = cache.go[ti];
    const Eigen::MatrixXd& gg = cache.gg[ti];
    const Eigen::MatrixXd& tc = cache.tanh_c[ti];

    d_c.array() += d_h.array() * go.array() * (1.0 - tc.array().square());
    d_z.topRows(hid).array() =                     // input gate, pre-sigmoid
        d_c.array() * gg.array() * gi.array() * (1.0 - gi.array());
    if (t > 0) {                                   // forget gate, pre-sigmoid
      d_z.middleRows(hid, hid).array() =
          d_c.array() * cache.c[ti - 1].array() * gf.array() * (1.0 - gf.array());
    } else {
      d_z.middleRows(hid, hid).setZero();          // c_{-1} = 0
    }
    d_z.middleRows(2 * hid, hid).array() =         // output gate, pre-sigmoid
        d_h.array() * tc.array() * go.array() * (1.0 - go.array());
    d_z.bottomRows(hid).array() =                  // candidate, pre-tanh
        d_c.array() * gi.array() * (1.0 - gg.array().square());

    grads.w_input.noalias() += d_z * cache.x[ti].transpose();
    if (t > 0) grads.w_recur.noalias() += d_z * cache.h[ti - 1].transpose();
    grads.bias.col(0) += d_z.rowwise().sum();

    d_c.array() *= gf.array();                     // flows to c_{t-1}
    if (t > 0) d_h.noalias() = model.w_recur.transpose() * d_z;
  }
  return grads;
}

double batch_loss_sum(const Eigen::MatrixXd& probs,
                      std::span<const TaskCategory> truths) {
  double sum = 0.0;
  for (Eigen::Index b = 0; b < probs.cols(); ++b) {
    const double p = probs(static_cast<Eigen::Index>(truths[static_cast<std::size_t>(b)]), b);
    sum += -std::log(std::max(p, kProbFloor));
  }
  return sum;
}

void clip_gradients(LstmGradients& grads, double max_norm) {
  const double norm = grads.global_norm();
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (Eigen::MatrixXd* g : grads.tensors()) *g *= scale;
  }
}

// Fill a parameter block row by row from the shared generator.
template <typename Block>
void fill_uniform(Block&& block, Rng& rng, double bound) {
  for (Eigen::Index r = 0; r < block.rows(); ++r)
    for (Eigen::Index c = 0; c < block.cols(); ++c)
      block(r, c) = (2.0 * rng.uniform() - 1.0) * bound;
}

}  // namespace

std::vector<const Eigen::MatrixXd*> LstmModel::tensors() const {
  return {&w_input, &w_recur, &bias, &w_head, &b_head};
}

std::vector<Eigen::MatrixXd*> LstmModel::tensors() {
  return {&w_input, &w_recur, &bias, &w_head, &b_head};
}

bool LstmModel::all_finite() const {
  for (const Eigen::MatrixXd* t : tensors())
    if (!t->allFinite()) return false;
  return true;
}

LstmGradients LstmGradients::zero(const LstmModel& model) {
  LstmGradients g;
  g.w_input = Eigen::MatrixXd::Zero(model.w_input.rows(), model.w_input.cols());
  g.w_recur = Eigen::MatrixXd::Zero(model.w_recur.rows(), model.w_recur.cols());
  g.bias = Eigen::MatrixXd::Zero(model.bias.rows(), 1);
  g.w_head = Eigen::MatrixXd::Zero(model.w_head.rows(), model.w_head.cols());
  g.b_head = Eigen::MatrixXd::Zero(model.b_head.rows(), 1);
  return g;
}

std::vector<const Eigen::MatrixXd*> LstmGradients::tensors() const {
  return {&w_input, &w_recur, &bias, &w_head, &b_head};
}

std::vector<Eigen::MatrixXd*> LstmGradients::tensors() {
  return {&w_input, &w_recur, &bias, &w_head, &b_head};
}

double LstmGradients::global_norm() const {
  double sq = 0.0;
  for (const Eigen::MatrixXd* t : tensors()) sq += t->squaredNorm();
  return std::sqrt(sq);
}

LstmModel lstm_init(Eigen::Index input_dim, Eigen::Index hidden_dim,
                    Eigen::Index output_dim, std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || output_dim < 1)
    throw Error(ErrorKind::DimensionMismatch, "model dimensions must be positive");
  LstmModel model;
  model.input_dim = input_dim;
  model.hidden_dim = hidden_dim;
  model.output_dim = output_dim;
  model.rng_seed = seed;
  model.w_input.setZero(4 * hidden_dim, input_dim);
  model.w_recur.setZero(4 * hidden_dim, hidden_dim);
  model.bias.setZero(4 * hidden_dim, 1);
  model.w_head.setZero(output_dim, hidden_dim);
  model.b_head.setZero(output_dim, 1);

  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  Rng rng(seed);
  // Draw order is part of the on-disk contract: the four input-to-hidden
  // blocks, the four recurrent blocks, then the head.
  for (int gate = 0; gate < 4; ++gate)
    fill_uniform(model.w_input.middleRows(gate * hidden_dim, hidden_dim), rng, bound);
  for (int gate = 0; gate < 4; ++gate)
    fill_uniform(model.w_recur.middleRows(gate * hidden_dim, hidden_dim), rng, bound);
  fill_uniform(model.w_head, rng, bound);
  model.bias.col(0).segment(hidden_dim, hidden_dim).setOnes();  // forget gate
  return model;
}

Eigen::VectorXd lstm_forward(const LstmModel& model, const Eigen::MatrixXd& window) {
  const Eigen::MatrixXd* ptr = &window;
  BatchCache cache = forward_batch(model, std::span<const Eigen::MatrixXd* const>(&ptr, 1));
  return cache.probs.col(0);
}

double cross_entropy(const Eigen::VectorXd& probs, TaskCategory truth) {
  const Eigen::Index idx = static_cast<Eigen::Index>(truth);
  if (idx < 0 || idx >= probs.size())
    throw Error(ErrorKind::DimensionMismatch, "truth index out of range");
  return -std::log(std::max(probs(idx), kProbFloor));
}

LstmGradients lstm_backward(const LstmModel& model,
                            std::span<const Eigen::MatrixXd* const> windows,
                            std::span<const TaskCategory> truths) {
  if (windows.size() != truths.size())
    throw Error(ErrorKind::LengthMismatch, "window/label count mismatch");
  BatchCache cache = forward_batch(model, windows);
  return backward_batch(model, cache, truths);
}

AdamOptimizer::AdamOptimizer(double lr, double beta1, double beta2, double epsilon)
    : lr_(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  if (lr <= 0.0 || beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0 ||
      epsilon <= 0.0)
    throw Error(ErrorKind::TypeError, "bad optimizer hyperparameters");
}

void AdamOptimizer::step(std::span<Eigen::MatrixXd* const> params,
                         std::span<const Eigen::MatrixXd* const> grads) {
  if (params.size() != grads.size())
    throw Error(ErrorKind::LengthMismatch, "param/grad tensor count mismatch");
  if (m_.empty()) {
    for (const Eigen::MatrixXd* p : params) {
      m_.emplace_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
      v_.emplace_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
    }
  }
  if (params.size() != m_.size())
    throw Error(ErrorKind::ShapeMismatch, "tensor count changed between steps");

  ++step_count_;
  const double corr1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double corr2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Eigen::MatrixXd& p = *params[i];
    const Eigen::MatrixXd& g = *grads[i];
    if (p.rows() != g.rows() || p.cols() != g.cols() || p.rows() != m_[i].rows() ||
        p.cols() != m_[i].cols())
      throw Error(ErrorKind::ShapeMismatch, "param/grad shape mismatch");
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i].array() = beta2_ * v_[i].array() + (1.0 - beta2_) * g.array().square();
    p.array() -= lr_ * (m_[i].array() / corr1) /
                 ((v_[i].array() / corr2).sqrt() + epsilon_);
  }
}

TrainResult lstm_train(LstmModel model, std::span<const LabeledWindow> windows,
                       const TrainConfig& config) {
  if (windows.empty()) throw Error(ErrorKind::EmptyInput, "no training windows");
  if (config.epochs < 1 || config.batch_size < 1)
    throw Error(ErrorKind::TypeError, "epochs and batch size must be positive");

  const std::size_t n = windows.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  Rng rng(config.shuffle_seed);
  AdamOptimizer opt(config.learning_rate, config.beta1, config.beta2, config.epsilon);
  std::vector<Eigen::MatrixXd*> params = model.tensors();

  TrainResult result;
  result.epoch_mean_loss.reserve(static_cast<std::size_t>(config.epochs));
  std::vector<const Eigen::MatrixXd*> batch_windows;
  std::vector<TaskCategory> batch_truths;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    int batch_index = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size), ++batch_index) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(config.batch_size));
      batch_windows.clear();
      batch_truths.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch_windows.push_back(&windows[order[i]].data);
        batch_truths.push_back(windows[order[i]].train_label);
      }

      BatchCache cache = forward_batch(model, batch_windows);
      const double batch_sum = batch_loss_sum(cache.probs, batch_truths);
      if (!std::isfinite(batch_sum))
        throw Error(ErrorKind::NonFiniteLoss,
                    "non-finite loss at epoch " + std::to_string(epoch) +
                        ", batch " + std::to_string(batch_index));
      loss_sum += batch_sum;

      LstmGradients grads = backward_batch(model, cache, batch_truths);
      clip_gradients(grads, config.grad_clip_norm);
      opt.step(params, grads.tensors());
      if (!model.all_finite())
        throw Error(ErrorKind::NonFiniteLoss,
                    "non-finite parameters at epoch " + std::to_string(epoch) +
                        ", batch " + std::to_string(batch_index));
    }
    result.epoch_mean_loss.push_back(loss_sum / static_cast<double>(n));
  }
  result.model = std::move(model);
  return result;
}

TaskCategory lstm_predict(const LstmModel& model, const Eigen::MatrixXd& window) {
  const Eigen::VectorXd probs = lstm_forward(model, window);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < probs.size(); ++k)
    if (probs(k) > probs(best)) best = k;
  return static_cast<TaskCategory>(best);
}

namespace {

// Named per-gate views over the fused tensors, in file order.
struct NamedTensor {
  const char* name;
  Eigen::MatrixXd block;
};

std::vector<NamedTensor> named_tensors(const LstmModel& m) {
  const Eigen::Index hid = m.hidden_dim;
  std::vector<NamedTensor> out;
  const char* w_names[4] = {"W_i", "W_f", "W_o", "W_g"};
  const char* u_names[4] = {"U_i", "U_f", "U_o", "U_g"};
  const char* b_names[4] = {"b_i", "b_f", "b_o", "b_g"};
  for (int gate = 0; gate < 4; ++gate)
    out.push_back({w_names[gate], m.w_input.middleRows(gate * hid, hid)});
  for (int gate = 0; gate < 4; ++gate)
    out.push_back({u_names[gate], m.w_recur.middleRows(gate * hid, hid)});
  for (int gate = 0; gate < 4; ++gate)
    out.push_back({b_names[gate], m.bias.col(0).segment(gate * hid, hid)});
  out.push_back({"W_y", m.w_head});
  out.push_back({"b_y", m.b_head});
  return out;
}

}  // namespace

void save_lstm(const LstmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  out << "LOCOMODE-LSTM v1\n";
  out << "input " << model.input_dim << "\n";
  out << "hidden " << model.hidden_dim << "\n";
  out << "output " << model.output_dim << "\n";
  out << "seed " << model.rng_seed << "\n";
  char buf[64];
  for (const NamedTensor& t : named_tensors(model)) {
    out << "tensor " << t.name << " " << t.block.rows() << " " << t.block.cols() << "\n";
    for (Eigen::Index r = 0; r < t.block.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.block.cols(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", t.block(r, c));
        out << (c ? " " : "") << buf;
      }
      out << "\n";
    }
  }
  if (!out.flush()) throw Error(ErrorKind::IoFailure, "short write to " + path.string());
}

LstmModel load_lstm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "LOCOMODE-LSTM v1")
    throw Error(ErrorKind::IoFailure, "bad header in " + path.string());

  auto read_kv = [&](const char* key) -> std::uint64_t {
    std::string word;
    std::uint64_t value = 0;
    if (!(in >> word >> value) || word != key)
      throw Error(ErrorKind::IoFailure,
                  "expected '" + std::string(key) + "' in " + path.string());
    return value;
  };
  const Eigen::Index input = static_cast<Eigen::Index>(read_kv("input"));
  const Eigen::Index hidden = static_cast<Eigen::Index>(read_kv("hidden"));
  const Eigen::Index output = static_cast<Eigen::Index>(read_kv("output"));
  const std::uint64_t seed = read_kv("seed");
  if (input < 1 || hidden < 1 || output < 1)
    throw Error(ErrorKind::IoFailure, "bad dimensions in " + path.string());

  LstmModel model;
  model.input_dim = input;
  model.hidden_dim = hidden;
  model.output_dim = output;
  model.rng_seed = seed;
  model.w_input.setZero(4 * hidden, input);
  model.w_recur.setZero(4 * hidden, hidden);
  model.bias.setZero(4 * hidden, 1);
  model.w_head.setZero(output, hidden);
  model.b_head.setZero(output, 1);

  struct Slot {
    const char* name;
    Eigen::Index rows, cols;
  };
  const std::vector<Slot> slots = {
      {"W_i", hidden, input},  {"W_f", hidden, input},  {"W_o", hidden, input},
      {"W_g", hidden, input},  {"U_i", hidden, hidden}, {"U_f", hidden, hidden},
      {"U_o", hidden, hidden}, {"U_g", hidden, hidden}, {"b_i", hidden, 1},
      {"b_f", hidden, 1},      {"b_o", hidden, 1},      {"b_g", hidden, 1},
      {"W_y", output, hidden}, {"b_y", output, 1}};

  for (std::size_t s = 0; s < slots.size(); ++s) {
    std::string word, name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> word >> name >> rows >> cols) || word != "tensor" ||
        name != slots[s].name || rows != slots[s].rows || cols != slots[s].cols)
      throw Error(ErrorKind::IoFailure,
                  "bad tensor block '" + std::string(slots[s].name) + "' in " +
                      path.string());
    Eigen::MatrixXd block(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        if (!(in >> block(r, c)))
          throw Error(ErrorKind::IoFailure,
                      "bad value in tensor '" + std::string(slots[s].name) +
                          "' in " + path.string());
    const int gate = static_cast<int>(s % 4);
    if (s < 4)
      model.w_input.middleRows(gate * hidden, hidden) = block;
    else if (s < 8)
      model.w_recur.middleRows(gate * hidden, hidden) = block;
    else if (s < 12)
      model.bias.col(0).segment(gate * hidden, hidden) = block.col(0);
    else if (s == 12)
      model.w_head = block;
    else
      model.b_head = block;
  }
  if (!model.all_finite())
    throw Error(ErrorKind::IoFailure, "non-finite values in " + path.string());
  return model;
}

}  // namespace locomode
