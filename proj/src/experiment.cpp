#include "locomode/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "locomode/error.hpp"

namespace locomode {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> items;
  while (true) {
    const std::size_t comma = s.find(',');
    items.emplace_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return items;
}

std::uint64_t parse_u64(const std::string& key, std::string_view value) {
  if (value.empty() || !std::all_of(value.begin(), value.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      }))
    throw Error(ErrorKind::TypeError, key + " must be a nonnegative integer, got '" +
                                          std::string(value) + "'");
  errno = 0;
  const std::uint64_t parsed = std::strtoull(std::string(value).c_str(), nullptr, 10);
  if (errno != 0)
    throw Error(ErrorKind::TypeError, key + " is out of range: '" + std::string(value) + "'");
  return parsed;
}

double parse_double(const std::string& key, std::string_view value) {
  const std::string text(value);
  char* end = nullptr;
  const double parsed = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw Error(ErrorKind::TypeError,
                key + " must be a number, got '" + text + "'");
  return parsed;
}

int parse_positive_int(const std::string& key, std::string_view value) {
  const std::uint64_t parsed = parse_u64(key, value);
  if (parsed < 1 || parsed > 1000000)
    throw Error(ErrorKind::TypeError, key + " must be in [1, 1000000], got '" +
                                          std::string(value) + "'");
  return static_cast<int>(parsed);
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  bool have_dataset = false, have_output = false, have_seed = false;

  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::TypeError,
                  "line " + std::to_string(line_no) + " is not 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty())
      throw Error(ErrorKind::TypeError, "line " + std::to_string(line_no) + " has no key");
    if (!seen.insert(key).second)
      throw Error(ErrorKind::TypeError, "duplicate key '" + key + "'");
    if (value.empty())
      throw Error(ErrorKind::TypeError, "key '" + key + "' has an empty value");

    if (key == "dataset_dir") {
      config.dataset_dir = value;
      have_dataset = true;
    } else if (key == "output_dir") {
      config.output_dir = value;
      have_output = true;
    } else if (key == "master_seed") {
      config.master_seed = parse_u64(key, value);
      have_seed = true;
    } else if (key == "paradigms") {
      config.paradigms.clear();
      for (const std::string& item : split_list(value)) {
        const auto parsed = parse_paradigm(item);
        if (!parsed)
          throw Error(ErrorKind::TypeError, "unknown paradigm '" + item + "'");
        if (std::find(config.paradigms.begin(), config.paradigms.end(), *parsed) !=
            config.paradigms.end())
          throw Error(ErrorKind::TypeError, "duplicate paradigm '" + item + "'");
        config.paradigms.push_back(*parsed);
      }
    } else if (key == "classifiers") {
      config.classifiers.clear();
      for (const std::string& item : split_list(value)) {
        const auto parsed = parse_classifier(item);
        if (!parsed)
          throw Error(ErrorKind::TypeError, "unknown classifier '" + item + "'");
        if (std::find(config.classifiers.begin(), config.classifiers.end(), *parsed) !=
            config.classifiers.end())
          throw Error(ErrorKind::TypeError, "duplicate classifier '" + item + "'");
        config.classifiers.push_back(*parsed);
      }
    } else if (key == "sources") {
      config.sources.clear();
      for (const std::string& item : split_list(value)) {
        const auto parsed = parse_signal_source(item);
        if (!parsed)
          throw Error(ErrorKind::TypeError, "unknown source '" + item + "'");
        if (std::find(config.sources.begin(), config.sources.end(), *parsed) !=
            config.sources.end())
          throw Error(ErrorKind::TypeError, "duplicate source '" + item + "'");
        config.sources.push_back(*parsed);
      }
    } else if (key == "lda_shrinkage") {
      config.lda_shrinkage = parse_double(key, value);
      if (config.lda_shrinkage < 0.0)
        throw Error(ErrorKind::TypeError, "lda_shrinkage must be nonnegative");
    } else if (key == "epochs") {
      config.lstm.epochs = parse_positive_int(key, value);
    } else if (key == "batch_size") {
      config.lstm.batch_size = parse_positive_int(key, value);
    } else if (key == "learning_rate") {
      config.lstm.learning_rate = parse_double(key, value);
      if (config.lstm.learning_rate <= 0.0)
        throw Error(ErrorKind::TypeError, "learning_rate must be positive");
    } else if (key == "beta1") {
      config.lstm.beta1 = parse_double(key, value);
      if (config.lstm.beta1 < 0.0 || config.lstm.beta1 >= 1.0)
        throw Error(ErrorKind::TypeError, "beta1 must lie in [0, 1)");
    } else if (key == "beta2") {
      config.lstm.beta2 = parse_double(key, value);
      if (config.lstm.beta2 < 0.0 || config.lstm.beta2 >= 1.0)
        throw Error(ErrorKind::TypeError, "beta2 must lie in [0, 1)");
    } else if (key == "epsilon") {
      config.lstm.epsilon = parse_double(key, value);
      if (config.lstm.epsilon <= 0.0)
        throw Error(ErrorKind::TypeError, "epsilon must be positive");
    } else if (key == "grad_clip_norm") {
      config.lstm.grad_clip_norm = parse_double(key, value);
      if (config.lstm.grad_clip_norm <= 0.0)
        throw Error(ErrorKind::TypeError, "grad_clip_norm must be positive");
    } else {
      throw Error(ErrorKind::UnknownKey, key);
    }
  }

  if (!have_dataset) throw Error(ErrorKind::MissingRequired, "dataset_dir");
  if (!have_output) throw Error(ErrorKind::MissingRequired, "output_dir");
  if (!have_seed) throw Error(ErrorKind::MissingRequired, "master_seed");
  if (config.paradigms.empty())
    throw Error(ErrorKind::TypeError, "paradigms must not be empty");
  if (config.classifiers.empty())
    throw Error(ErrorKind::TypeError, "classifiers must not be empty");
  if (config.sources.empty())
    throw Error(ErrorKind::TypeError, "sources must not be empty");
  return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

namespace {

std::string combo_name(Paradigm p, ClassifierKind c, SignalSource s) {
  return std::string(to_string(p)) + "_" + std::string(to_string(c)) + "_" +
         std::string(to_string(s));
}

std::string sanitize(std::string name) {
  for (char& c : name)
    if (c == '/') c = '_';
  return name;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error(ErrorKind::IoFailure, "short write to " + path.string());
}

}  // namespace

RunResult run_experiments(const ExperimentConfig& config, int jobs) {
  if (jobs < 1) throw Error(ErrorKind::TypeError, "jobs must be at least 1");
  const std::filesystem::path dataset_dir(config.dataset_dir);
  const Dataset dataset = load_dataset(dataset_dir / "manifest.csv");

  const std::filesystem::path out_dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + out_dir.string());

  RunResult result;
  for (Paradigm p : config.paradigms)
    for (ClassifierKind c : config.classifiers)
      for (SignalSource s : config.sources) {
        CombinationOutcome outcome;
        outcome.paradigm = p;
        outcome.classifier = c;
        outcome.source = s;
        result.outcomes.push_back(std::move(outcome));
      }

  const EvalConfig eval_config = config.eval_config();
  const auto run_one = [&](CombinationOutcome& outcome) {
    const std::string name =
        combo_name(outcome.paradigm, outcome.classifier, outcome.source);
    try {
      const std::filesystem::path model_dir = out_dir / "models" / name;
      std::error_code mk;
      std::filesystem::create_directories(model_dir, mk);
      if (mk) throw Error(ErrorKind::IoFailure, "cannot create " + model_dir.string());
      const ModelHook hook = [&](const std::string& model_name, const LdaModel* lda,
                                 const LstmModel* lstm) {
        const std::filesystem::path path = model_dir / (sanitize(model_name) + ".txt");
        if (lda) lda->save(path);
        if (lstm) save_lstm(*lstm, path);
      };
      ParadigmReport report = run_paradigm(dataset, outcome.paradigm, outcome.classifier,
                                           outcome.source, eval_config, hook);
      write_text(out_dir / (name + "_report.csv"), render_report(report, ReportFormat::Csv));
      write_text(out_dir / (name + "_confusion.csv"), render_confusion_csv(report));
      outcome.report = std::move(report);
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.error = e.what();
    }
  };

  const std::size_t n = result.outcomes.size();
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), n));
  if (workers <= 1) {
    for (CombinationOutcome& outcome : result.outcomes) run_one(outcome);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          run_one(result.outcomes[i]);
        }
      });
    for (std::thread& t : pool) t.join();
  }

  std::ostringstream summary;
  result.all_ok = true;
  for (const CombinationOutcome& outcome : result.outcomes) {
    if (outcome.ok) {
      summary << render_report(*outcome.report, ReportFormat::Text) << "\n";
    } else {
      result.all_ok = false;
      summary << "experiment "
              << combo_name(outcome.paradigm, outcome.classifier, outcome.source)
              << " FAILED: " << outcome.error << "\n\n";
    }
  }
  result.summary_text = summary.str();
  write_text(out_dir / "summary.txt", result.summary_text);
  return result;
}

namespace {

std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos
                                                                   : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::string rerender_from_csv(const std::filesystem::path& output_dir) {
  std::vector<std::filesystem::path> report_files;
  for (const auto& entry : std::filesystem::directory_iterator(output_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 11 && name.substr(name.size() - 11) == "_report.csv")
      report_files.push_back(entry.path());
  }
  std::sort(report_files.begin(), report_files.end());
  if (report_files.empty())
    throw Error(ErrorKind::IoFailure,
                "no *_report.csv files under " + output_dir.string());

  std::ostringstream rendered;
  for (const std::filesystem::path& report_path : report_files) {
    std::ifstream in(report_path);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + report_path.string());

    ParadigmReport report;
    bool key_set = false;
    std::set<std::string> fold_ids;
    std::map<std::string, std::array<double, kReportRowCount>> subject_f1;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("paradigm,", 0) == 0) continue;
      const std::vector<std::string> fields = csv_fields(line);
      if (fields.size() != 8)
        throw Error(ErrorKind::IoFailure, "bad row in " + report_path.string());
      if (!key_set) {
        const auto paradigm = parse_paradigm(fields[0]);
        const auto classifier = parse_classifier(fields[1]);
        const auto source = parse_signal_source(fields[2]);
        if (!paradigm || !classifier || !source)
          throw Error(ErrorKind::IoFailure, "bad combination in " + report_path.string());
        report.paradigm = *paradigm;
        report.classifier = *classifier;
        report.source = *source;
        key_set = true;
      }
      int row = -1;
      for (int r = 0; r < kReportRowCount; ++r)
        if (fields[3] == to_string(kReportRows[static_cast<std::size_t>(r)])) row = r;
      if (row < 0)
        throw Error(ErrorKind::IoFailure, "bad category in " + report_path.string());
      const std::string& fold_id = fields[4];
      if (fold_id == "SUMMARY") {
        report.mean_f1[static_cast<std::size_t>(row)] =
            parse_double("mean_f1", fields[5]);
        report.std_f1[static_cast<std::size_t>(row)] = parse_double("std_f1", fields[6]);
      } else {
        // Subject-level rows: every fold for si1/si2, the pooled per-subject
        // rows (no '/') for sd.
        fold_ids.insert(fold_id);
        if (fold_id.find('/') == std::string::npos)
          subject_f1[fold_id][static_cast<std::size_t>(row)] =
              parse_double("f1", fields[7]);
      }
    }
    if (!key_set)
      throw Error(ErrorKind::IoFailure, "no data rows in " + report_path.string());

    // sd fold rows carry a '/' and are not subjects; drop them from the count
    // of rendered folds only for the label, keeping the true fold total.
    std::size_t fold_count = 0;
    for (const std::string& id : fold_ids)
      if (report.paradigm != Paradigm::Sd || id.find('/') != std::string::npos)
        ++fold_count;
    report.folds.resize(fold_count);
    for (const auto& [subject, f1s] : subject_f1) {
      SubjectResult s;
      s.subject_id = subject;
      double sum = 0.0;
      for (int r = 0; r < kReportRowCount; ++r) {
        s.scores.per_category[static_cast<std::size_t>(r)].f1 =
            f1s[static_cast<std::size_t>(r)];
        sum += f1s[static_cast<std::size_t>(r)];
      }
      s.scores.macro_f1 = sum / kReportRowCount;
      report.subjects.push_back(std::move(s));
    }

    const std::string confusion_name =
        combo_name(report.paradigm, report.classifier, report.source) + "_confusion.csv";
    std::ifstream confusion_in(output_dir / confusion_name);
    if (!confusion_in)
      throw Error(ErrorKind::IoFailure, "cannot open " + (output_dir / confusion_name).string());
    while (std::getline(confusion_in, line)) {
      if (line.empty() || line.rfind("paradigm,", 0) == 0) continue;
      const std::vector<std::string> fields = csv_fields(line);
      if (fields.size() != static_cast<std::size_t>(4 + kTaskCategoryCount))
        throw Error(ErrorKind::IoFailure, "bad row in " + confusion_name);
      int row = -1;
      for (int r = 0; r < kReportRowCount; ++r)
        if (fields[3] == to_string(kReportRows[static_cast<std::size_t>(r)])) row = r;
      if (row < 0) throw Error(ErrorKind::IoFailure, "bad category in " + confusion_name);
      for (int c = 0; c < kTaskCategoryCount; ++c)
        report.pooled.counts[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)] =
            static_cast<long>(parse_u64("count", fields[static_cast<std::size_t>(4 + c)]));
    }
    report.pooled_scores = f1_breakdown(report.pooled);
    rendered << render_report(report, ReportFormat::Text) << "\n";
  }
  return rendered.str();
}

}  // namespace locomode
