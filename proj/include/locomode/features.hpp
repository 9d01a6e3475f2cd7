#pragma once

#include <Eigen/Core>

#include "locomode/windowing.hpp"

namespace locomode {

inline constexpr int kFeaturesPerChannel = 6;

// Six time-domain statistics per channel, channel-major:
// (min, max, mean, std, first, last). Std is the population formula.
// A 12-channel window yields 72 values, fusion yields 216.
Eigen::VectorXd extract_features(const Eigen::MatrixXd& window_data);

inline Eigen::VectorXd extract_features(const LabeledWindow& window) {
  return extract_features(window.data);
}

}  // namespace locomode
