#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "locomode/categories.hpp"

namespace locomode {

inline constexpr double kSampleRateHz = 100.0;

// One circuit recording: 36-channel signal matrix at 100 Hz with per-frame
// labels/sub-labels, plus subject metadata carried over from the manifest.
// Immutable after construction; concurrent readers are safe.
struct Trial {
  std::string subject_id;
  Cohort cohort = Cohort::Healthy;
  std::string trial_id;
  Leg leading_leg = Leg::Left;
  CircuitOrder circuit_order = CircuitOrder::SaFirst;
  bool handrail = false;
  double sample_rate = kSampleRateHz;

  Eigen::MatrixXd signal;  // frames x 36, canonical channel order
  std::vector<TaskCategory> labels;
  std::vector<SubLabel> sublabels;

  Eigen::Index frames() const { return signal.rows(); }

  ReportCategory report_category(Eigen::Index frame) const {
    return make_report_category(labels[static_cast<std::size_t>(frame)],
                                sublabels[static_cast<std::size_t>(frame)]);
  }
};

// Checks the Trial invariants (row counts agree, sublabels only on LW frames,
// finite signal) and throws on violation.
void validate_trial(const Trial& trial);

// Reads a trial CSV (header `t,<36 channels>,label,sublabel`). Channel
// columns may appear in any order in the file; the returned matrix is in
// canonical order. Subject metadata is left at defaults; the dataset loader
// fills it from the manifest.
Trial load_trial(const std::filesystem::path& path);

// Writes the trial CSV in canonical column order. Signal values are printed
// with enough digits to round-trip doubles exactly, so load(save(t)) == t.
void save_trial(const Trial& trial, const std::filesystem::path& path);

// One manifest row; `path` is stored as written (resolved against the
// manifest's directory when relative).
struct ManifestEntry {
  std::string subject_id;
  Cohort cohort = Cohort::Healthy;
  std::string trial_id;
  std::string path;
  Leg leading_leg = Leg::Left;
  CircuitOrder circuit_order = CircuitOrder::SaFirst;
  bool handrail = false;
};

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);
void save_manifest(const std::vector<ManifestEntry>& entries,
                   const std::filesystem::path& path);

struct Dataset {
  std::vector<Trial> trials;
};

// Loads every trial named by the manifest and attaches its metadata.
Dataset load_dataset(const std::filesystem::path& manifest_path);

}  // namespace locomode
