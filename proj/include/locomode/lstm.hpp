#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "locomode/categories.hpp"
#include "locomode/windowing.hpp"

namespace locomode {

inline constexpr int kLstmHiddenDim = 100;

// Sequence-to-label LSTM: one recurrent layer, dense softmax head over the
// five categories reading the final hidden state. Gate parameters are stored
// fused, rows ordered [input; forget; output; candidate]; the named per-gate
// tensors (W_i, U_f, ...) used by the persistence format are views into the
// fused blocks.
struct LstmModel {
  Eigen::Index input_dim = 0;
  Eigen::Index hidden_dim = kLstmHiddenDim;
  Eigen::Index output_dim = kTaskCategoryCount;
  std::uint64_t rng_seed = 0;

  Eigen::MatrixXd w_input;  // 4H x input
  Eigen::MatrixXd w_recur;  // 4H x H
  Eigen::MatrixXd bias;     // 4H x 1
  Eigen::MatrixXd w_head;   // out x H
  Eigen::MatrixXd b_head;   // out x 1

  // Parameter tensors in a fixed order (shared with gradients/Adam state).
  std::vector<const Eigen::MatrixXd*> tensors() const;
  std::vector<Eigen::MatrixXd*> tensors();

  bool all_finite() const;
};

// Gradients w.r.t. every parameter tensor, same shapes as the model.
struct LstmGradients {
  Eigen::MatrixXd w_input, w_recur, bias, w_head, b_head;

  static LstmGradients zero(const LstmModel& model);
  std::vector<const Eigen::MatrixXd*> tensors() const;
  std::vector<Eigen::MatrixXd*> tensors();
  double global_norm() const;
};

struct TrainConfig {
  int epochs = 70;
  int batch_size = 50;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t shuffle_seed = 0;
  double grad_clip_norm = 5.0;
};

// Weights drawn uniformly from +-1/sqrt(hidden_dim) with the seeded
// generator; biases zero except the forget gate's, which starts at 1.
LstmModel lstm_init(Eigen::Index input_dim, Eigen::Index hidden_dim,
                    Eigen::Index output_dim, std::uint64_t seed);

// Softmax probabilities for one window (timesteps x input_dim).
Eigen::VectorXd lstm_forward(const LstmModel& model, const Eigen::MatrixXd& window);

// -ln(max(probs[truth], 1e-12))
double cross_entropy(const Eigen::VectorXd& probs, TaskCategory truth);

// Gradient of the mean batch cross-entropy via backpropagation through time.
LstmGradients lstm_backward(const LstmModel& model,
                            std::span<const Eigen::MatrixXd* const> windows,
                            std::span<const TaskCategory> truths);

// Adam with bias correction: theta <- theta - lr * m_hat / (sqrt(v_hat) + eps).
// Moment tensors mirror the parameter list handed to the first step() call.
class AdamOptimizer {
 public:
  AdamOptimizer(double lr, double beta1, double beta2, double epsilon);

  void step(std::span<Eigen::MatrixXd* const> params,
            std::span<const Eigen::MatrixXd* const> grads);

  std::int64_t step_count() const { return step_count_; }
  const std::vector<Eigen::MatrixXd>& first_moments() const { return m_; }
  const std::vector<Eigen::MatrixXd>& second_moments() const { return v_; }

 private:
  double lr_, beta1_, beta2_, epsilon_;
  std::int64_t step_count_ = 0;
  std::vector<Eigen::MatrixXd> m_, v_;
};

struct TrainResult {
  LstmModel model;
  std::vector<double> epoch_mean_loss;  // one entry per epoch
};

// Minibatch Adam over seeded shuffles; the last incomplete batch of each
// epoch is kept. Gradients are clipped to a global norm of
// config.grad_clip_norm before each step. Deterministic given the model and
// config seeds. Aborts with NonFiniteLoss if the loss or parameters leave
// the finite range, naming the epoch and batch.
TrainResult lstm_train(LstmModel model, std::span<const LabeledWindow> windows,
                       const TrainConfig& config);

TaskCategory lstm_predict(const LstmModel& model, const Eigen::MatrixXd& window);

void save_lstm(const LstmModel& model, const std::filesystem::path& path);
LstmModel load_lstm(const std::filesystem::path& path);

}  // namespace locomode
