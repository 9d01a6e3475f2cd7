#include "locomode/categories.hpp"

namespace locomode {

TaskCategory collapse(ReportCategory c) {
  switch (c) {
    case ReportCategory::RA: return TaskCategory::RA;
    case ReportCategory::RD: return TaskCategory::RD;
    case ReportCategory::SA: return TaskCategory::SA;
    case ReportCategory::SD: return TaskCategory::SD;
    case ReportCategory::LW:
    case ReportCategory::LWp:
    case ReportCategory::LWf: return TaskCategory::LW;
  }
  return TaskCategory::LW;
}

int report_row_index(ReportCategory c) {
  switch (c) {
    case ReportCategory::RA: return 0;
    case ReportCategory::RD: return 1;
    case ReportCategory::SA: return 2;
    case ReportCategory::SD: return 3;
    case ReportCategory::LWp: return 4;
    case ReportCategory::LWf: return 5;
    case ReportCategory::LW: return -1;
  }
  return -1;
}

ReportCategory make_report_category(TaskCategory label, SubLabel sub) {
  if (label == TaskCategory::LW) {
    if (sub == SubLabel::LWp) return ReportCategory::LWp;
    if (sub == SubLabel::LWf) return ReportCategory::LWf;
    return ReportCategory::LW;
  }
  return static_cast<ReportCategory>(static_cast<int>(label));
}

std::string_view to_string(TaskCategory c) {
  switch (c) {
    case TaskCategory::RA: return "RA";
    case TaskCategory::RD: return "RD";
    case TaskCategory::SA: return "SA";
    case TaskCategory::SD: return "SD";
    case TaskCategory::LW: return "LW";
  }
  return "?";
}

std::string_view to_string(ReportCategory c) {
  switch (c) {
    case ReportCategory::RA: return "RA";
    case ReportCategory::RD: return "RD";
    case ReportCategory::SA: return "SA";
    case ReportCategory::SD: return "SD";
    case ReportCategory::LW: return "LW";
    case ReportCategory::LWp: return "LWp";
    case ReportCategory::LWf: return "LWf";
  }
  return "?";
}

std::string_view to_string(SubLabel s) {
  switch (s) {
    case SubLabel::None: return "";
    case SubLabel::LWp: return "LWp";
    case SubLabel::LWf: return "LWf";
  }
  return "";
}

std::string_view to_string(Cohort c) {
  return c == Cohort::Healthy ? "healthy" : "pd";
}

std::string_view to_string(Leg l) { return l == Leg::Left ? "left" : "right"; }

std::string_view to_string(CircuitOrder o) {
  return o == CircuitOrder::SaFirst ? "sa_first" : "ra_first";
}

std::optional<TaskCategory> parse_task_category(std::string_view s) {
  for (TaskCategory c : kTaskCategories)
    if (s == to_string(c)) return c;
  return std::nullopt;
}

std::optional<SubLabel> parse_sublabel(std::string_view s) {
  if (s.empty()) return SubLabel::None;
  if (s == "LWp") return SubLabel::LWp;
  if (s == "LWf") return SubLabel::LWf;
  return std::nullopt;
}

std::optional<Cohort> parse_cohort(std::string_view s) {
  if (s == "healthy") return Cohort::Healthy;
  if (s == "pd") return Cohort::Pd;
  return std::nullopt;
}

std::optional<Leg> parse_leg(std::string_view s) {
  if (s == "left") return Leg::Left;
  if (s == "right") return Leg::Right;
  return std::nullopt;
}

std::optional<CircuitOrder> parse_circuit_order(std::string_view s) {
  if (s == "sa_first") return CircuitOrder::SaFirst;
  if (s == "ra_first") return CircuitOrder::RaFirst;
  return std::nullopt;
}

std::string_view to_string(SignalSource s) {
  switch (s) {
    case SignalSource::Feet: return "feet";
    case SignalSource::TrunkPelvis: return "trunk_pelvis";
    case SignalSource::Forearms: return "forearms";
    case SignalSource::Fusion: return "fusion";
  }
  return "?";
}

std::optional<SignalSource> parse_signal_source(std::string_view s) {
  for (SignalSource src : kSignalSources)
    if (s == to_string(src)) return src;
  return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, kSegmentCount> kSegmentNames = {
    "foot_l", "foot_r", "forearm_l", "forearm_r", "trunk", "pelvis"};
constexpr std::array<std::string_view, kChannelsPerSegment> kSensorAxisNames = {
    "acc_x", "acc_y", "acc_z", "gyr_x", "gyr_y", "gyr_z"};

std::array<std::string, kChannelCount> build_channel_names() {
  std::array<std::string, kChannelCount> names;
  int k = 0;
  for (const auto& seg : kSegmentNames)
    for (const auto& sa : kSensorAxisNames)
      names[k++] = std::string(seg) + "_" + std::string(sa);
  return names;
}

}  // namespace

const std::array<std::string, kChannelCount>& channel_names() {
  static const std::array<std::string, kChannelCount> names = build_channel_names();
  return names;
}

std::vector<int> source_channels(SignalSource source) {
  auto segment_range = [](Segment a, Segment b) {
    std::vector<int> out;
    for (Segment s : {a, b})
      for (int i = 0; i < kChannelsPerSegment; ++i)
        out.push_back(static_cast<int>(s) * kChannelsPerSegment + i);
    return out;
  };
  switch (source) {
    case SignalSource::Feet:
      return segment_range(Segment::FootL, Segment::FootR);
    case SignalSource::TrunkPelvis:
      return segment_range(Segment::Trunk, Segment::Pelvis);
    case SignalSource::Forearms:
      return segment_range(Segment::ForearmL, Segment::ForearmR);
    case SignalSource::Fusion: {
      std::vector<int> all(kChannelCount);
      for (int i = 0; i < kChannelCount; ++i) all[i] = i;
      return all;
    }
  }
  return {};
}

int source_channel_count(SignalSource source) {
  return source == SignalSource::Fusion ? kChannelCount : 12;
}

Segment channel_segment(int channel) {
  return static_cast<Segment>(channel / kChannelsPerSegment);
}

bool tremor_masked(int channel) {
  Segment s = channel_segment(channel);
  return s == Segment::FootL || s == Segment::FootR || s == Segment::ForearmL ||
         s == Segment::ForearmR;
}

}  // namespace locomode
