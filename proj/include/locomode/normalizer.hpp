#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

namespace locomode {

// Per-channel z-score statistics, fit on training data only and applied to
// both training and test inputs. Standard deviations use the population
// formula and are clamped to >= 1e-8 so constant channels map to zero.
class Normalizer {
 public:
  Normalizer() = default;
  Normalizer(Eigen::VectorXd mean, Eigen::VectorXd stddev);

  // Statistics over the concatenated frames of all input matrices.
  static Normalizer fit(const std::vector<Eigen::MatrixXd>& matrices);
  static Normalizer fit(std::span<const Eigen::MatrixXd* const> matrices);

  // (x - mean) / std, column-wise.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& matrix) const;

  // Inverse transform; recovers apply()'s input for non-clamped channels.
  Eigen::MatrixXd invert(const Eigen::MatrixXd& matrix) const;

  Eigen::Index channel_count() const { return mean_.size(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& stddev() const { return stddev_; }

  static constexpr double kMinStd = 1e-8;

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd stddev_;
};

}  // namespace locomode
