#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace locomode {

// The five trainable locomotor modes, in canonical order. Classifiers train
// and predict over exactly these; ties break toward the lower index.
enum class TaskCategory : int { RA = 0, RD = 1, SA = 2, SD = 3, LW = 4 };

inline constexpr int kTaskCategoryCount = 5;
inline constexpr std::array<TaskCategory, 5> kTaskCategories = {
    TaskCategory::RA, TaskCategory::RD, TaskCategory::SA, TaskCategory::SD,
    TaskCategory::LW};

// Ground-truth vocabulary. LWp/LWf refine LW for reporting; they are never
// predicted. Plain LW (platform walking between the inclines) has no row in
// the confusion matrix and is excluded from scored test sets.
enum class ReportCategory : int {
  RA = 0,
  RD = 1,
  SA = 2,
  SD = 3,
  LW = 4,
  LWp = 5,
  LWf = 6,
};

// Confusion-matrix row order: RA, RD, SA, SD, LWp, LWf.
inline constexpr int kReportRowCount = 6;
inline constexpr std::array<ReportCategory, 6> kReportRows = {
    ReportCategory::RA,  ReportCategory::RD,  ReportCategory::SA,
    ReportCategory::SD,  ReportCategory::LWp, ReportCategory::LWf};

// Optional per-frame refinement of an LW label.
enum class SubLabel : int { None = 0, LWp = 1, LWf = 2 };

enum class Cohort : int { Healthy = 0, Pd = 1 };
enum class Leg : int { Left = 0, Right = 1 };
enum class CircuitOrder : int { SaFirst = 0, RaFirst = 1 };

// Collapses ground truth onto the trainable vocabulary (LWp/LWf -> LW).
TaskCategory collapse(ReportCategory c);

// Row index in the 6x5 confusion matrix, or -1 for plain LW.
int report_row_index(ReportCategory c);

ReportCategory make_report_category(TaskCategory label, SubLabel sub);

std::string_view to_string(TaskCategory c);
std::string_view to_string(ReportCategory c);
std::string_view to_string(SubLabel s);
std::string_view to_string(Cohort c);
std::string_view to_string(Leg l);
std::string_view to_string(CircuitOrder o);

std::optional<TaskCategory> parse_task_category(std::string_view s);
std::optional<SubLabel> parse_sublabel(std::string_view s);
std::optional<Cohort> parse_cohort(std::string_view s);
std::optional<Leg> parse_leg(std::string_view s);
std::optional<CircuitOrder> parse_circuit_order(std::string_view s);

// ---------------------------------------------------------------------------
// Channel map
//
// Canonical column order of the 36-channel signal matrix: segments
// foot_l, foot_r, forearm_l, forearm_r, trunk, pelvis; within each segment
// acc_x, acc_y, acc_z, gyr_x, gyr_y, gyr_z. Column names follow
// "<segment>_<sensor>_<axis>".
// ---------------------------------------------------------------------------

inline constexpr int kChannelCount = 36;
inline constexpr int kSegmentCount = 6;
inline constexpr int kChannelsPerSegment = 6;

enum class Segment : int {
  FootL = 0,
  FootR = 1,
  ForearmL = 2,
  ForearmR = 3,
  Trunk = 4,
  Pelvis = 5,
};

// Channel subsets selectable as classifier input.
enum class SignalSource : int { Feet = 0, TrunkPelvis = 1, Forearms = 2, Fusion = 3 };

inline constexpr std::array<SignalSource, 4> kSignalSources = {
    SignalSource::Feet, SignalSource::TrunkPelvis, SignalSource::Forearms,
    SignalSource::Fusion};

std::string_view to_string(SignalSource s);
std::optional<SignalSource> parse_signal_source(std::string_view s);

// Canonical channel names, index 0..35.
const std::array<std::string, kChannelCount>& channel_names();

// Canonical channel indices selected by a source, in canonical order.
// Feet and Forearms and TrunkPelvis are disjoint 12-channel sets whose union
// is Fusion (all 36).
std::vector<int> source_channels(SignalSource source);

int source_channel_count(SignalSource source);

Segment channel_segment(int channel);

// True for channels carried on the foot or forearm segments (the tremor mask).
bool tremor_masked(int channel);

}  // namespace locomode
