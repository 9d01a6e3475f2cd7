#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "locomode/categories.hpp"

namespace locomode {

inline constexpr int kWindowFrames = 50;  // 500 ms at 100 Hz
inline constexpr int kWindowStride = 25;  // 250 ms increment

// A 50-frame slice of a trial with one ground-truth category. The truth is
// the report category of the window's final frame; train_label collapses
// LWp/LWf onto LW.
struct LabeledWindow {
  Eigen::MatrixXd data;  // 50 x C
  ReportCategory truth = ReportCategory::LW;
  TaskCategory train_label = TaskCategory::LW;
  std::string trial_id;
  std::string subject_id;
  Eigen::Index start_frame = 0;
};

// Cuts sliding windows (size 50, stride 25) from a channel matrix. Window
// count is floor((N-50)/25)+1; throws TooShort for N < 50.
std::vector<LabeledWindow> segment_windows(
    const Eigen::MatrixXd& matrix, const std::vector<TaskCategory>& labels,
    const std::vector<SubLabel>& sublabels, const std::string& trial_id = "",
    const std::string& subject_id = "");

}  // namespace locomode
