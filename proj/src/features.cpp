#include "locomode/features.hpp"

#include <cmath>

#include "locomode/error.hpp"

namespace locomode {

Eigen::VectorXd extract_features(const Eigen::MatrixXd& window_data) {
  const Eigen::Index frames = window_data.rows();
  const Eigen::Index channels = window_data.cols();
  if (frames < 2)
    throw Error(ErrorKind::TooFewFrames,
                std::to_string(frames) + " frames, need at least 2");

  Eigen::VectorXd features(channels * kFeaturesPerChannel);
  for (Eigen::Index c = 0; c < channels; ++c) {
    // Single streaming pass per channel; variance via Welford's recurrence.
    double mn = window_data(0, c);
    double mx = mn;
    double mean = 0.0;
    double m2 = 0.0;
    for (Eigen::Index r = 0; r < frames; ++r) {
      const double x = window_data(r, c);
      mn = std::min(mn, x);
      mx = std::max(mx, x);
      const double delta = x - mean;
      mean += delta / static_cast<double>(r + 1);
      m2 += delta * (x - mean);
    }
    const double stddev = std::sqrt(m2 / static_cast<double>(frames));
    const Eigen::Index base = c * kFeaturesPerChannel;
    features[base + 0] = mn;
    features[base + 1] = mx;
    features[base + 2] = mean;
    features[base + 3] = stddev;
    features[base + 4] = window_data(0, c);
    features[base + 5] = window_data(frames - 1, c);
  }
  return features;
}

}  // namespace locomode
