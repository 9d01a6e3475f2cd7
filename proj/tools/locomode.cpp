// Command-line front end: generate synthetic cohorts, run experiments from a
// config file, re-render stored reports, and validate datasets.
#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "locomode/error.hpp"
#include "locomode/eval.hpp"
#include "locomode/experiment.hpp"
#include "locomode/synthgen.hpp"
#include "locomode/trial.hpp"
#include "locomode/windowing.hpp"

namespace {

int cmd_generate(int healthy, int pd, int trials, std::uint64_t seed,
                 const std::string& out) {
  locomode::GenerateConfig config;
  config.healthy_subjects = healthy;
  config.pd_subjects = pd;
  config.trials_per_subject = trials;
  config.master_seed = seed;
  const locomode::Dataset dataset = locomode::synth_dataset(config, out);
  std::cout << "wrote " << dataset.trials.size() << " trials for "
            << healthy + pd << " subjects under " << out << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, int jobs, bool seed_set,
            std::uint64_t seed, const std::string& out_override) {
  locomode::ExperimentConfig config = locomode::parse_config(config_path);
  if (seed_set) config.master_seed = seed;
  if (!out_override.empty()) config.output_dir = out_override;
  const locomode::RunResult result = locomode::run_experiments(config, jobs);
  std::cout << result.summary_text;
  if (!result.all_ok) {
    std::cerr << "error: one or more combinations failed (see summary above)\n";
    return 1;
  }
  return 0;
}

int cmd_report(const std::string& out_dir) {
  std::cout << locomode::rerender_from_csv(out_dir);
  return 0;
}

int cmd_inspect(const std::string& data) {
  namespace fs = std::filesystem;
  fs::path manifest(data);
  if (fs::is_directory(manifest)) manifest /= "manifest.csv";
  const locomode::Dataset dataset = locomode::load_dataset(manifest);

  struct SubjectStats {
    locomode::Cohort cohort = locomode::Cohort::Healthy;
    int trials = 0;
    Eigen::Index frames = 0;
    std::size_t windows = 0;
  };
  std::map<std::string, SubjectStats> subjects;
  std::map<locomode::ReportCategory, std::size_t> truth_histogram;
  for (const locomode::Trial& trial : dataset.trials) {
    SubjectStats& s = subjects[trial.subject_id];
    s.cohort = trial.cohort;
    ++s.trials;
    s.frames += trial.frames();
    const auto windows = locomode::segment_windows(
        trial.signal, trial.labels, trial.sublabels, trial.trial_id, trial.subject_id);
    s.windows += windows.size();
    for (const locomode::LabeledWindow& w : windows) ++truth_histogram[w.truth];
  }

  std::cout << "dataset " << manifest.string() << ": " << dataset.trials.size()
            << " trials, " << subjects.size() << " subjects\n";
  for (const auto& [id, s] : subjects)
    std::cout << "  " << id << " (" << locomode::to_string(s.cohort) << "): " << s.trials
              << " trials, " << s.frames << " frames, " << s.windows << " windows\n";
  std::cout << "window truth counts:";
  for (const auto& [category, count] : truth_histogram)
    std::cout << " " << locomode::to_string(category) << "=" << count;
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"locomotor activity recognition over wearable motion signals"};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand("generate", "write a synthetic cohort to disk");
  int healthy = 5, pd = 5, trials = 10;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  generate->add_option("--subjects-healthy", healthy, "healthy subject count")
      ->check(CLI::Range(1, 1000));
  generate->add_option("--subjects-pd", pd, "pd subject count")->check(CLI::Range(1, 1000));
  generate->add_option("--trials-per-subject", trials, "trials per subject")
      ->check(CLI::Range(1, 1000));
  generate->add_option("--seed", gen_seed, "generator master seed");
  generate->add_option("--out", gen_out, "output directory")->required();

  auto* run = app.add_subcommand("run", "run the experiments named by a config file");
  std::string config_path, run_out;
  std::uint64_t run_seed = 0;
  int jobs = 1;
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--jobs", jobs, "max concurrent combinations")->check(CLI::Range(1, 256));
  auto* seed_option = run->add_option("--seed", run_seed, "override the config seed");
  run->add_option("--out", run_out, "override the config output_dir");

  auto* report = app.add_subcommand("report", "re-render summaries from stored CSVs");
  std::string report_out;
  report->add_option("--out", report_out, "output directory of a previous run")->required();

  auto* inspect = app.add_subcommand("inspect", "load and validate a dataset");
  std::string inspect_data;
  inspect->add_option("--data", inspect_data, "dataset directory or manifest path")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed())
      return cmd_generate(healthy, pd, trials, gen_seed, gen_out);
    if (run->parsed())
      return cmd_run(config_path, jobs, seed_option->count() > 0, run_seed, run_out);
    if (report->parsed()) return cmd_report(report_out);
    if (inspect->parsed()) return cmd_inspect(inspect_data);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
