#include "locomode/synthgen.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "locomode/error.hpp"
#include "locomode/rng.hpp"

namespace locomode {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinSegmentSeconds = 1.0;
constexpr int kHarmonics = 3;

// Seed-stream tags so every draw site gets an independent stream.
constexpr std::uint64_t kTagHealthy = 0x48;  // 'H'
constexpr std::uint64_t kTagPd = 0x50;       // 'P'
constexpr std::uint64_t kTagTrial = 0x54;    // 'T'

double activity(const GeneratorConstants& k, Segment seg, TaskCategory mode) {
  const std::size_t m = static_cast<std::size_t>(mode);
  switch (seg) {
    case Segment::FootL:
    case Segment::FootR:
      return k.feet_activity[m];
    case Segment::ForearmL:
    case Segment::ForearmR:
      return k.forearm_activity[m];
    case Segment::Trunk:
    case Segment::Pelvis:
      return k.trunk_activity[m];
  }
  return 1.0;
}

bool is_acc(int channel) { return channel % kChannelsPerSegment < 3; }
int channel_axis(int channel) { return channel % kChannelsPerSegment % 3; }

// Canonical gait phase of a channel: legs anti-phase with each other, each
// arm counter-swinging its own leg, trunk and pelvis riding in between,
// with a small per-axis stagger. Subjects deviate from this pattern by at
// most phase_spread.
double canonical_phase(int channel) {
  double base = 0.0;
  switch (channel_segment(channel)) {
    case Segment::FootL: base = 0.0; break;
    case Segment::FootR: base = std::numbers::pi; break;
    case Segment::ForearmL: base = std::numbers::pi; break;
    case Segment::ForearmR: base = 0.0; break;
    case Segment::Trunk: base = 0.5 * std::numbers::pi; break;
    case Segment::Pelvis: base = 1.5 * std::numbers::pi; break;
  }
  return base + 0.3 * channel_axis(channel);
}

// Deterministic amplitude jitter, a pure hash of (mode, channel, harmonic).
double jitter(const GeneratorConstants& k, int mode, int channel, int harmonic) {
  Rng rng(mix_seed(k.jitter_seed,
                   {static_cast<std::uint64_t>(mode), static_cast<std::uint64_t>(channel),
                    static_cast<std::uint64_t>(harmonic)}));
  return rng.uniform(k.jitter_lo, k.jitter_hi);
}

// A[mode][channel][harmonic], rebuilt per trial (540 entries, negligible).
using AmplitudeTable =
    std::array<std::array<std::array<double, kHarmonics>, kChannelCount>, kTaskCategoryCount>;

AmplitudeTable amplitude_table(const GeneratorConstants& k, bool handrail) {
  AmplitudeTable table;
  for (int m = 0; m < kTaskCategoryCount; ++m) {
    for (int c = 0; c < kChannelCount; ++c) {
      const Segment seg = channel_segment(c);
      double base = activity(k, seg, static_cast<TaskCategory>(m)) *
                    k.axis_weight[static_cast<std::size_t>(channel_axis(c))] *
                    (is_acc(c) ? k.acc_scale : k.gyr_scale);
      if (handrail && (seg == Segment::ForearmL || seg == Segment::ForearmR))
        base *= k.handrail_arm_damp;
      for (int h = 0; h < kHarmonics; ++h)
        table[static_cast<std::size_t>(m)][static_cast<std::size_t>(c)]
             [static_cast<std::size_t>(h)] =
                 base * k.harmonic_decay[static_cast<std::size_t>(h)] * jitter(k, m, c, h);
    }
  }
  return table;
}

// Left/right counterpart of a channel; trunk and pelvis map to themselves.
int mirrored_channel(int channel) {
  const int seg = channel / kChannelsPerSegment;
  const int within = channel % kChannelsPerSegment;
  switch (static_cast<Segment>(seg)) {
    case Segment::FootL:
      return static_cast<int>(Segment::FootR) * kChannelsPerSegment + within;
    case Segment::FootR:
      return static_cast<int>(Segment::FootL) * kChannelsPerSegment + within;
    case Segment::ForearmL:
      return static_cast<int>(Segment::ForearmR) * kChannelsPerSegment + within;
    case Segment::ForearmR:
      return static_cast<int>(Segment::ForearmL) * kChannelsPerSegment + within;
    case Segment::Trunk:
    case Segment::Pelvis:
      return channel;
  }
  return channel;
}

std::string two_digit_id(const char* prefix, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%02d", prefix, index + 1);
  return buf;
}

}  // namespace

const GeneratorConstants& default_constants() {
  static const GeneratorConstants k;
  return k;
}

CircuitSpec make_circuit(CircuitOrder order, bool reverse, double duration_scale,
                         const GeneratorConstants& k) {
  // Which incline is met first, and climbed or descended, falls out of the
  // traversal direction.
  const bool stair_first = (order == CircuitOrder::SaFirst) != reverse;
  CircuitSpec circuit;
  circuit.order = order;
  circuit.reverse = reverse;
  const double s = duration_scale;
  circuit.segments = {
      {TaskCategory::LW, SubLabel::LWp, k.dur_walkway * s},
      {stair_first ? TaskCategory::SA : TaskCategory::RA, SubLabel::None,
       (stair_first ? k.dur_stair : k.dur_ramp) * s},
      {TaskCategory::LW, SubLabel::None, k.dur_platform * s},
      {stair_first ? TaskCategory::RD : TaskCategory::SD, SubLabel::None,
       (stair_first ? k.dur_ramp : k.dur_stair) * s},
      {TaskCategory::LW, SubLabel::LWf, k.dur_walkway * s},
  };
  return circuit;
}

void validate_circuit(const CircuitSpec& circuit) {
  int stair = -1, ramp = -1, platform = -1;
  for (std::size_t i = 0; i < circuit.segments.size(); ++i) {
    const CircuitSegment& seg = circuit.segments[i];
    if (seg.duration_s < kMinSegmentSeconds)
      throw Error(ErrorKind::BadCircuit,
                  "segment " + std::to_string(i) + " lasts " +
                      std::to_string(seg.duration_s) + " s, below the 1 s floor");
    const bool is_stair = seg.mode == TaskCategory::SA || seg.mode == TaskCategory::SD;
    const bool is_ramp = seg.mode == TaskCategory::RA || seg.mode == TaskCategory::RD;
    if (is_stair) {
      if (stair >= 0) throw Error(ErrorKind::BadCircuit, "more than one stair segment");
      stair = static_cast<int>(i);
    } else if (is_ramp) {
      if (ramp >= 0) throw Error(ErrorKind::BadCircuit, "more than one ramp segment");
      ramp = static_cast<int>(i);
    } else if (seg.sub == SubLabel::None) {
      platform = static_cast<int>(i);
    }
  }
  if (stair < 0 || ramp < 0)
    throw Error(ErrorKind::BadCircuit, "circuit needs one stair and one ramp segment");
  if (platform < 0 || !(std::min(stair, ramp) < platform && platform < std::max(stair, ramp)))
    throw Error(ErrorKind::BadCircuit, "platform walk must sit between the inclines");
}

SubjectProfile make_subject(Cohort cohort, int index, std::uint64_t master_seed,
                            const GeneratorConstants& k) {
  if (index < 0) throw Error(ErrorKind::TypeError, "subject index must be nonnegative");
  SubjectProfile p;
  p.cohort = cohort;
  p.subject_id = two_digit_id(cohort == Cohort::Pd ? "pd" : "hc", index);
  p.rng_seed = mix_seed(master_seed, {cohort == Cohort::Pd ? kTagPd : kTagHealthy,
                                      static_cast<std::uint64_t>(index)});
  Rng rng(p.rng_seed);
  for (double& g : p.gains) g = rng.lognormal(0.0, k.gain_log_sigma);
  const double base = cohort == Cohort::Pd ? k.cadence_pd : k.cadence_healthy;
  p.cadence = base * (1.0 + k.cadence_spread * (2.0 * rng.uniform() - 1.0));
  for (int c = 0; c < kChannelCount; ++c)
    p.phases[static_cast<std::size_t>(c)] =
        std::fmod(canonical_phase(c) + rng.uniform(-k.phase_spread, k.phase_spread) +
                      2.0 * kTwoPi,
                  kTwoPi);
  if (cohort == Cohort::Pd) {
    p.tremor_amplitude = rng.uniform(k.tremor_amp_lo, k.tremor_amp_hi);
    p.tremor_frequency = rng.uniform(k.tremor_freq_lo, k.tremor_freq_hi);
  }
  return p;
}

Trial synth_trial(const SubjectProfile& profile, const CircuitSpec& circuit,
                  std::uint64_t trial_seed, const TrialAttrs& attrs,
                  const GeneratorConstants& k) {
  validate_circuit(circuit);
  if (profile.cadence <= 0.0)
    throw Error(ErrorKind::TypeError, "subject cadence must be positive");

  // Kinematic timeline: first frame of each segment, then total length.
  std::vector<Eigen::Index> starts;
  Eigen::Index frames = 0;
  for (const CircuitSegment& seg : circuit.segments) {
    starts.push_back(frames);
    frames += static_cast<Eigen::Index>(std::llround(seg.duration_s * kSampleRateHz));
  }
  const auto segment_at = [&](Eigen::Index frame) {
    std::size_t s = circuit.segments.size() - 1;
    while (s > 0 && frame < starts[s]) --s;
    return s;
  };

  Trial trial;
  trial.subject_id = profile.subject_id;
  trial.cohort = profile.cohort;
  trial.trial_id = attrs.trial_id;
  trial.leading_leg = attrs.leading_leg;
  trial.circuit_order = circuit.order;
  trial.handrail = attrs.handrail;
  trial.signal.resize(frames, kChannelCount);
  trial.labels.resize(static_cast<std::size_t>(frames));
  trial.sublabels.resize(static_cast<std::size_t>(frames));

  const AmplitudeTable amp = amplitude_table(k, attrs.handrail);
  std::array<double, kChannelCount> phase;
  for (int c = 0; c < kChannelCount; ++c)
    phase[static_cast<std::size_t>(c)] =
        profile.phases[static_cast<std::size_t>(
            attrs.leading_leg == Leg::Right ? mirrored_channel(c) : c)];

  const Eigen::Index lead = static_cast<Eigen::Index>(std::llround(k.label_lead_s * kSampleRateHz));
  Rng noise(mix_seed(trial_seed, kTagTrial));
  for (Eigen::Index frame = 0; frame < frames; ++frame) {
    const double t = static_cast<double>(frame) / kSampleRateHz;
    const std::size_t kin_seg = segment_at(frame);
    const TaskCategory mode = circuit.segments[kin_seg].mode;
    const std::size_t m = static_cast<std::size_t>(mode);
    const double fundamental = profile.cadence * k.mode_tempo[m];

    const std::size_t label_seg = segment_at(std::min(frames - 1, frame + lead));
    trial.labels[static_cast<std::size_t>(frame)] = circuit.segments[label_seg].mode;
    trial.sublabels[static_cast<std::size_t>(frame)] = circuit.segments[label_seg].sub;

    const double tremor = profile.tremor_amplitude == 0.0
                              ? 0.0
                              : profile.tremor_amplitude *
                                    std::sin(kTwoPi * profile.tremor_frequency * t);
    for (int c = 0; c < kChannelCount; ++c) {
      const std::size_t ci = static_cast<std::size_t>(c);
      double gait = 0.0;
      for (int h = 0; h < kHarmonics; ++h)
        gait += amp[m][ci][static_cast<std::size_t>(h)] *
                std::sin(kTwoPi * (h + 1) * fundamental * t + phase[ci]);
      double value = profile.gains[ci] * gait + noise.normal(0.0, k.noise_sigma);
      if (tremor != 0.0 && tremor_masked(c)) value += tremor;
      trial.signal(frame, c) = value;
    }
  }
  validate_trial(trial);
  return trial;
}

Dataset generate_dataset(const GenerateConfig& config, const GeneratorConstants& k) {
  if (config.healthy_subjects < 1 || config.pd_subjects < 1 ||
      config.trials_per_subject < 1)
    throw Error(ErrorKind::CohortTooSmall, "cohort sizes must be at least 1");

  Dataset dataset;
  const auto add_subject = [&](Cohort cohort, int index) {
    const SubjectProfile profile = make_subject(cohort, index, config.master_seed, k);
    const int half = (config.trials_per_subject + 1) / 2;
    for (int trial_index = 0; trial_index < config.trials_per_subject; ++trial_index) {
      TrialAttrs attrs;
      attrs.trial_id = two_digit_id("t", trial_index);
      if (cohort == Cohort::Pd) {
        // Patients split trials by leading leg and keep the rail at hand.
        attrs.leading_leg = trial_index < half ? Leg::Left : Leg::Right;
        attrs.handrail = true;
      } else {
        // Healthy subjects walk half their trials rail-assisted, half free.
        attrs.handrail = trial_index < half;
        attrs.leading_leg = trial_index % 2 == 0 ? Leg::Left : Leg::Right;
      }
      const CircuitOrder order =
          trial_index % 2 == 0 ? CircuitOrder::SaFirst : CircuitOrder::RaFirst;
      // Slow walkers take proportionally longer over every stretch.
      const double scale =
          config.duration_scale * (k.cadence_healthy / profile.cadence);
      const CircuitSpec circuit = make_circuit(order, false, scale, k);
      const std::uint64_t trial_seed =
          mix_seed(profile.rng_seed, static_cast<std::uint64_t>(trial_index));
      dataset.trials.push_back(synth_trial(profile, circuit, trial_seed, attrs, k));
    }
  };
  for (int i = 0; i < config.healthy_subjects; ++i) add_subject(Cohort::Healthy, i);
  for (int i = 0; i < config.pd_subjects; ++i) add_subject(Cohort::Pd, i);
  return dataset;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "trials", ec);
  if (ec)
    throw Error(ErrorKind::IoFailure, "cannot create " + (out_dir / "trials").string());
  std::vector<ManifestEntry> manifest;
  for (const Trial& trial : dataset.trials) {
    const std::string name = trial.subject_id + "_" + trial.trial_id + ".csv";
    save_trial(trial, out_dir / "trials" / name);
    ManifestEntry entry;
    entry.subject_id = trial.subject_id;
    entry.cohort = trial.cohort;
    entry.trial_id = trial.trial_id;
    entry.path = "trials/" + name;
    entry.leading_leg = trial.leading_leg;
    entry.circuit_order = trial.circuit_order;
    entry.handrail = trial.handrail;
    manifest.push_back(std::move(entry));
  }
  save_manifest(manifest, out_dir / "manifest.csv");
}

Dataset synth_dataset(const GenerateConfig& config, const std::filesystem::path& out_dir,
                      const GeneratorConstants& k) {
  Dataset dataset = generate_dataset(config, k);
  write_dataset(dataset, out_dir);
  return dataset;
}

}  // namespace locomode
