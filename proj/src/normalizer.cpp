#include "locomode/normalizer.hpp"

#include <cmath>

#include "locomode/error.hpp"

namespace locomode {

Normalizer::Normalizer(Eigen::VectorXd mean, Eigen::VectorXd stddev)
    : mean_(std::move(mean)), stddev_(std::move(stddev)) {
  if (mean_.size() != stddev_.size())
    throw Error(ErrorKind::ChannelMismatch, "mean/std size mismatch");
  stddev_ = stddev_.cwiseMax(kMinStd);
}

Normalizer Normalizer::fit(const std::vector<Eigen::MatrixXd>& matrices) {
  std::vector<const Eigen::MatrixXd*> ptrs;
  ptrs.reserve(matrices.size());
  for (const auto& m : matrices) ptrs.push_back(&m);
  return fit(std::span<const Eigen::MatrixXd* const>(ptrs));
}

Normalizer Normalizer::fit(std::span<const Eigen::MatrixXd* const> matrices) {
  if (matrices.empty()) throw Error(ErrorKind::EmptyInput, "no matrices");
  const Eigen::Index channels = matrices.front()->cols();
  Eigen::Index total = 0;
  for (const auto* m : matrices) {
    if (m->cols() != channels)
      throw Error(ErrorKind::ChannelMismatch,
                  std::to_string(m->cols()) + " vs " + std::to_string(channels) +
                      " channels");
    total += m->rows();
  }
  if (total < 2)
    throw Error(ErrorKind::EmptyInput, "need at least 2 frames in total");

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(channels);
  for (const auto* m : matrices) sum += m->colwise().sum();
  const Eigen::VectorXd mean = sum / static_cast<double>(total);

  Eigen::VectorXd sq = Eigen::VectorXd::Zero(channels);
  for (const auto* m : matrices)
    sq += (m->rowwise() - mean.transpose()).array().square().colwise().sum().matrix();
  const Eigen::VectorXd stddev =
      (sq / static_cast<double>(total)).array().sqrt().matrix();

  return Normalizer(mean, stddev);
}

Eigen::MatrixXd Normalizer::apply(const Eigen::MatrixXd& matrix) const {
  if (matrix.cols() != mean_.size())
    throw Error(ErrorKind::ChannelMismatch,
                std::to_string(matrix.cols()) + " vs " + std::to_string(mean_.size()));
  return (matrix.rowwise() - mean_.transpose()).array().rowwise() /
         stddev_.transpose().array();
}

Eigen::MatrixXd Normalizer::invert(const Eigen::MatrixXd& matrix) const {
  if (matrix.cols() != mean_.size())
    throw Error(ErrorKind::ChannelMismatch,
                std::to_string(matrix.cols()) + " vs " + std::to_string(mean_.size()));
  return (matrix.array().rowwise() * stddev_.transpose().array()).matrix().rowwise() +
         mean_.transpose();
}

}  // namespace locomode
