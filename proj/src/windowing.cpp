#include "locomode/windowing.hpp"

#include "locomode/error.hpp"

namespace locomode {

std::vector<LabeledWindow> segment_windows(const Eigen::MatrixXd& matrix,
                                           const std::vector<TaskCategory>& labels,
                                           const std::vector<SubLabel>& sublabels,
                                           const std::string& trial_id,
                                           const std::string& subject_id) {
  const Eigen::Index n = matrix.rows();
  if (labels.size() != static_cast<std::size_t>(n) ||
      sublabels.size() != static_cast<std::size_t>(n))
    throw Error(ErrorKind::LengthMismatch, "labels do not match frame count");
  if (n < kWindowFrames)
    throw Error(ErrorKind::TooShort,
                std::to_string(n) + " frames, need at least " +
                    std::to_string(kWindowFrames));

  const Eigen::Index count = (n - kWindowFrames) / kWindowStride + 1;
  std::vector<LabeledWindow> windows;
  windows.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index w = 0; w < count; ++w) {
    const Eigen::Index start = w * kWindowStride;
    const auto last = static_cast<std::size_t>(start + kWindowFrames - 1);
    LabeledWindow window;
    window.data = matrix.middleRows(start, kWindowFrames);
    window.truth = make_report_category(labels[last], sublabels[last]);
    window.train_label = collapse(window.truth);
    window.trial_id = trial_id;
    window.subject_id = subject_id;
    window.start_frame = start;
    windows.push_back(std::move(window));
  }
  return windows;
}

}  // namespace locomode
