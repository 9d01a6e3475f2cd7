#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "locomode/categories.hpp"
#include "locomode/trial.hpp"

namespace locomode {

// Every invented constant of the generator lives here, under one version tag,
// so tests cite a single source of truth. Amplitudes follow
//   A[mode][channel][harmonic] = activity(segment, mode) * axis_weight(axis)
//       * sensor_scale(sensor) * harmonic_decay(h) * jitter(mode, channel, h)
// with jitter hashed from jitter_seed, and per-mode fundamentals
//   f_mode = subject cadence * mode_tempo[mode].
// Feet react strongly to the mode, forearms barely, trunk/pelvis in between,
// so channel subsets differ in how much mode information they carry.
struct GeneratorConstants {
  std::string version = "locomode-synth-1";

  double noise_sigma = 0.05;   // additive white noise, all channels
  double label_lead_s = 0.2;   // labels switch this far ahead of the kinematics

  // Subject parameter distributions.
  double gain_log_sigma = 0.15;       // per-channel gain: exp(N(0, sigma^2))
  double cadence_healthy = 0.9;       // strides/s
  double cadence_pd = 0.75;
  double cadence_spread = 0.10;       // +-10% per subject
  // Gait phase relations between body segments are stereotyped (arms
  // counter-swing the legs, the trunk rides in between); subjects deviate
  // from the canonical pattern by at most this much, in radians.
  double phase_spread = 0.4;
  double tremor_amp_lo = 0.3, tremor_amp_hi = 0.8;    // pd only
  double tremor_freq_lo = 4.0, tremor_freq_hi = 6.0;  // Hz

  // Per-mode activity level by body segment, indexed by TaskCategory
  // (RA, RD, SA, SD, LW).
  std::array<double, kTaskCategoryCount> feet_activity = {1.6, 1.8, 1.4, 2.0, 1.0};
  std::array<double, kTaskCategoryCount> forearm_activity = {1.05, 1.1, 1.03, 1.15, 1.0};
  std::array<double, kTaskCategoryCount> trunk_activity = {1.3, 1.4, 1.2, 1.5, 1.0};

  // Per-mode tempo multiplier on the subject cadence. Kept below 1.33 so the
  // third harmonic of any fundamental stays under 4 Hz, clear of the tremor
  // band.
  std::array<double, kTaskCategoryCount> mode_tempo = {0.85, 1.1, 0.72, 1.2, 1.0};

  std::array<double, 3> axis_weight = {1.0, 0.8, 0.6};   // x, y, z
  double acc_scale = 2.0, gyr_scale = 1.2;
  std::array<double, 3> harmonic_decay = {1.0, 0.5, 0.25};
  double jitter_lo = 0.75, jitter_hi = 1.25;
  std::uint64_t jitter_seed = 0x10c0300e5eedULL;

  // Segment durations (seconds) at the reference healthy cadence.
  double dur_walkway = 3.0;
  double dur_stair = 2.5;
  double dur_platform = 3.0;
  double dur_ramp = 3.0;

  // Holding the rail damps the forearms' gait harmonics (never the tremor).
  double handrail_arm_damp = 0.9;
};

const GeneratorConstants& default_constants();

struct SubjectProfile {
  std::string subject_id;
  Cohort cohort = Cohort::Healthy;
  std::array<double, kChannelCount> gains{};
  double cadence = 0.0;            // strides/s
  double tremor_amplitude = 0.0;   // 0 for healthy
  double tremor_frequency = 0.0;   // Hz; 0 for healthy
  std::array<double, kChannelCount> phases{};
  std::uint64_t rng_seed = 0;
};

struct CircuitSegment {
  TaskCategory mode = TaskCategory::LW;
  SubLabel sub = SubLabel::None;   // LWp/LWf on the walkway legs
  double duration_s = 0.0;
};

// The terrain-park course as an ordered segment timeline. `order` names which
// incline sits nearer the start point; traversing in `reverse` meets them the
// other way round (and swaps ascent for descent).
struct CircuitSpec {
  std::vector<CircuitSegment> segments;
  CircuitOrder order = CircuitOrder::SaFirst;
  bool reverse = false;
};

// Segment timeline for one traversal. `duration_scale` stretches every
// segment (used both for subject cadence and for small test cohorts).
// sa_first forward: LWp walkway, SA, LW platform, RD, LWf walkway;
// ra_first forward: LWp walkway, RA, LW platform, SD, LWf walkway;
// reverse flips which incline comes first and ascent vs descent.
CircuitSpec make_circuit(CircuitOrder order, bool reverse, double duration_scale,
                         const GeneratorConstants& constants = default_constants());

// Throws BadCircuit unless there is exactly one stair and one ramp segment,
// the platform walk sits strictly between them, and every segment lasts at
// least 1 s.
void validate_circuit(const CircuitSpec& circuit);

// Deterministic in (cohort, index, master_seed).
SubjectProfile make_subject(Cohort cohort, int index, std::uint64_t master_seed,
                            const GeneratorConstants& constants = default_constants());

// Metadata for one recording that also shapes the signal: leading with the
// right leg swaps the left/right phase offsets, the handrail damps forearm
// gait harmonics.
struct TrialAttrs {
  std::string trial_id;
  Leg leading_leg = Leg::Left;
  bool handrail = false;
};

// Pure in (profile, circuit, trial_seed, attrs): same inputs, bit-identical
// trial. Labels run 200 ms ahead of the kinematic mode switches.
Trial synth_trial(const SubjectProfile& profile, const CircuitSpec& circuit,
                  std::uint64_t trial_seed, const TrialAttrs& attrs,
                  const GeneratorConstants& constants = default_constants());

struct GenerateConfig {
  int healthy_subjects = 5;
  int pd_subjects = 5;
  int trials_per_subject = 10;
  std::uint64_t master_seed = 0;
  // Stretches or shrinks every circuit segment; small cohorts for fast tests
  // use < 1. Values low enough to break the 1 s segment floor are rejected.
  double duration_scale = 1.0;
};

// In-memory cohort: healthy subjects hc01.., pd subjects pd01.., trials
// t01... Healthy trials split half rail-assisted, half free; pd trials split
// by leading leg; circuit order alternates per trial for everyone.
Dataset generate_dataset(const GenerateConfig& config,
                         const GeneratorConstants& constants = default_constants());

// Writes manifest.csv plus trials/<subject>_<trial>.csv under out_dir.
void write_dataset(const Dataset& dataset, const std::filesystem::path& out_dir);

// generate_dataset + write_dataset.
Dataset synth_dataset(const GenerateConfig& config, const std::filesystem::path& out_dir,
                      const GeneratorConstants& constants = default_constants());

}  // namespace locomode
