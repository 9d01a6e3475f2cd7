#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "locomode/eval.hpp"

namespace locomode {

// Parsed experiment description. The config file is flat `key = value` text
// with `#` comments; unknown keys are rejected by name. Defaults select
// every paradigm, classifier, and source; the seed has no default so runs
// never depend on the clock.
struct ExperimentConfig {
  std::string dataset_dir;
  std::string output_dir;
  std::uint64_t master_seed = 0;
  std::vector<Paradigm> paradigms = {Paradigm::Si1, Paradigm::Si2, Paradigm::Sd};
  std::vector<ClassifierKind> classifiers = {ClassifierKind::Lda, ClassifierKind::Lstm};
  std::vector<SignalSource> sources = {SignalSource::Feet, SignalSource::TrunkPelvis,
                                       SignalSource::Forearms, SignalSource::Fusion};
  double lda_shrinkage = kDefaultLdaShrinkage;
  TrainConfig lstm;

  EvalConfig eval_config() const {
    EvalConfig c;
    c.master_seed = master_seed;
    c.lda_shrinkage = lda_shrinkage;
    c.lstm = lstm;
    return c;
  }
};

// Recognized keys: dataset_dir, output_dir, master_seed (required);
// paradigms, classifiers, sources (comma lists); lda_shrinkage; epochs,
// batch_size, learning_rate, beta1, beta2, epsilon, grad_clip_norm.
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config(const std::filesystem::path& path);

struct CombinationOutcome {
  Paradigm paradigm = Paradigm::Si1;
  ClassifierKind classifier = ClassifierKind::Lda;
  SignalSource source = SignalSource::Feet;
  bool ok = false;
  std::string error;  // diagnostic when !ok
  std::optional<ParadigmReport> report;
};

struct RunResult {
  std::vector<CombinationOutcome> outcomes;  // canonical order
  std::string summary_text;
  bool all_ok = false;
};

// Executes paradigms x classifiers x sources over the dataset named by the
// config. Each combination writes <p>_<c>_<s>_report.csv,
// <p>_<c>_<s>_confusion.csv, and its trained models under models/<p>_<c>_<s>/
// in output_dir; summary.txt collects the per-combination text grids. A
// failing combination is recorded and skipped, never fatal to the rest.
// `jobs` bounds how many combinations run concurrently; results and files do
// not depend on it.
RunResult run_experiments(const ExperimentConfig& config, int jobs = 1);

// Rebuilds the summary text from the report/confusion CSVs a previous run
// left in output_dir, without retraining anything.
std::string rerender_from_csv(const std::filesystem::path& output_dir);

}  // namespace locomode
