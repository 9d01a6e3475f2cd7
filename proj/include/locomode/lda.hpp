#pragma once

#include <Eigen/Core>
#include <array>
#include <filesystem>
#include <vector>

#include "locomode/categories.hpp"

namespace locomode {

inline constexpr double kDefaultLdaShrinkage = 1e-6;

// Gaussian linear discriminant classifier: per-category means, one pooled
// within-category covariance with trace-scaled shrinkage, empirical priors.
// Discriminants are computed through a single SPD factorization of the
// covariance taken at fit (or load) time; no explicit inverse is formed.
class LdaModel {
 public:
  // features: one row-vector per sample (as columns of equal length D).
  // Each category present in `labels` needs at least two samples.
  static LdaModel fit(const std::vector<Eigen::VectorXd>& features,
                      const std::vector<TaskCategory>& labels,
                      double shrinkage = kDefaultLdaShrinkage);

  // Discriminant delta_k for the 5 categories in canonical order. Categories
  // absent from training score -infinity.
  std::array<double, kTaskCategoryCount> scores(const Eigen::VectorXd& x) const;

  // Argmax of scores(); exact ties go to the lowest canonical index.
  TaskCategory predict(const Eigen::VectorXd& x) const;

  Eigen::Index feature_dim() const { return means_.cols(); }
  const Eigen::MatrixXd& means() const { return means_; }
  const Eigen::MatrixXd& pooled_covariance() const { return covariance_; }
  const Eigen::VectorXd& priors() const { return priors_; }
  double shrinkage() const { return shrinkage_; }

  void save(const std::filesystem::path& path) const;
  static LdaModel load(const std::filesystem::path& path);

 private:
  LdaModel() = default;
  void build_discriminants();

  Eigen::MatrixXd means_;       // 5 x D (zero rows for absent categories)
  Eigen::MatrixXd covariance_;  // D x D, after shrinkage
  Eigen::VectorXd priors_;      // 5 (zero for absent categories)
  double shrinkage_ = kDefaultLdaShrinkage;

  // Derived at fit/load: delta_k(x) = alpha_.col(k) . x + offset_[k].
  Eigen::MatrixXd alpha_;   // D x 5
  Eigen::VectorXd offset_;  // 5
};

}  // namespace locomode
