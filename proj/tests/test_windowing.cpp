#include <vector>

#include "doctest.h"
#include "locomode/error.hpp"
#include "locomode/rng.hpp"
#include "locomode/windowing.hpp"

using namespace locomode;

namespace {

// Independent oracle: enumerate every (start, start+50) slice at stride 25.
std::vector<Eigen::Index> oracle_starts(Eigen::Index frames) {
  std::vector<Eigen::Index> starts;
  for (Eigen::Index s = 0; s + kWindowFrames <= frames; s += kWindowStride)
    starts.push_back(s);
  return starts;
}

Eigen::MatrixXd ramp_matrix(Eigen::Index frames, Eigen::Index channels) {
  Eigen::MatrixXd m(frames, channels);
  for (Eigen::Index i = 0; i < frames; ++i)
    for (Eigen::Index c = 0; c < channels; ++c)
      m(i, c) = static_cast<double>(i * 100 + c);
  return m;
}

}  // namespace

TEST_CASE("window count and starts match the slice-enumeration oracle") {
  Rng rng(2024);
  for (int rep = 0; rep < 40; ++rep) {
    auto frames = static_cast<Eigen::Index>(50 + rng.uniform_int(1500));
    Eigen::MatrixXd m = ramp_matrix(frames, 3);
    std::vector<TaskCategory> labels(static_cast<std::size_t>(frames),
                                     TaskCategory::RA);
    std::vector<SubLabel> subs(static_cast<std::size_t>(frames), SubLabel::None);

    auto windows = segment_windows(m, labels, subs);
    auto starts = oracle_starts(frames);
    REQUIRE(windows.size() == starts.size());
    CHECK(static_cast<Eigen::Index>(windows.size()) ==
          (frames - kWindowFrames) / kWindowStride + 1);
    for (std::size_t w = 0; w < windows.size(); ++w) {
      CHECK(windows[w].start_frame == starts[w]);
      REQUIRE(windows[w].data.rows() == kWindowFrames);
      CHECK(windows[w].data == m.middleRows(starts[w], kWindowFrames));
    }
  }
}

TEST_CASE("twelve hundred frames give forty-seven windows") {
  Eigen::MatrixXd m = ramp_matrix(1200, 2);
  std::vector<TaskCategory> labels(1200, TaskCategory::LW);
  std::vector<SubLabel> subs(1200, SubLabel::None);
  CHECK(segment_windows(m, labels, subs).size() == 47);
}

TEST_CASE("exactly fifty frames give a single window at frame zero") {
  Eigen::MatrixXd m = ramp_matrix(50, 4);
  std::vector<TaskCategory> labels(50, TaskCategory::SD);
  std::vector<SubLabel> subs(50, SubLabel::None);
  auto windows = segment_windows(m, labels, subs, "t01", "hc01");
  REQUIRE(windows.size() == 1);
  CHECK(windows[0].start_frame == 0);
  CHECK(windows[0].truth == ReportCategory::SD);
  CHECK(windows[0].train_label == TaskCategory::SD);
  CHECK(windows[0].trial_id == "t01");
  CHECK(windows[0].subject_id == "hc01");
}

TEST_CASE("window truth is the category of its final frame") {
  // frames 0-48 labeled SA, frame 49 is LW with sub-label LWf
  Eigen::MatrixXd m = ramp_matrix(50, 2);
  std::vector<TaskCategory> labels(50, TaskCategory::SA);
  std::vector<SubLabel> subs(50, SubLabel::None);
  labels[49] = TaskCategory::LW;
  subs[49] = SubLabel::LWf;

  auto windows = segment_windows(m, labels, subs);
  REQUIRE(windows.size() == 1);
  CHECK(windows[0].truth == ReportCategory::LWf);
  CHECK(windows[0].train_label == TaskCategory::LW);
}

TEST_CASE("each frame lands in at most two windows") {
  Eigen::MatrixXd m = ramp_matrix(431, 1);
  std::vector<TaskCategory> labels(431, TaskCategory::RA);
  std::vector<SubLabel> subs(431, SubLabel::None);
  auto windows = segment_windows(m, labels, subs);

  std::vector<int> cover(431, 0);
  for (const auto& w : windows)
    for (Eigen::Index i = 0; i < kWindowFrames; ++i)
      ++cover[static_cast<std::size_t>(w.start_frame + i)];
  for (int c : cover) CHECK(c <= 2);
}

TEST_CASE("fewer than fifty frames is rejected") {
  Eigen::MatrixXd m = ramp_matrix(49, 2);
  std::vector<TaskCategory> labels(49, TaskCategory::RA);
  std::vector<SubLabel> subs(49, SubLabel::None);
  try {
    segment_windows(m, labels, subs);
    FAIL("expected TooShort");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooShort);
  }
}

TEST_CASE("label and sub-label lengths must match the matrix") {
  Eigen::MatrixXd m = ramp_matrix(100, 2);
  std::vector<TaskCategory> labels(99, TaskCategory::RA);
  std::vector<SubLabel> subs(100, SubLabel::None);
  CHECK_THROWS_AS(segment_windows(m, labels, subs), Error);
}
