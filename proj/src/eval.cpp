#include "locomode/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "locomode/error.hpp"
#include "locomode/features.hpp"
#include "locomode/normalizer.hpp"
#include "locomode/rng.hpp"
#include "locomode/windowing.hpp"

namespace locomode {

long ConfusionMatrix::total() const {
  long n = 0;
  for (const auto& row : counts)
    for (long cell : row) n += cell;
  return n;
}

long ConfusionMatrix::row_sum(int row) const {
  long n = 0;
  for (long cell : counts[static_cast<std::size_t>(row)]) n += cell;
  return n;
}

long ConfusionMatrix::col_sum(int col) const {
  long n = 0;
  for (const auto& row : counts) n += row[static_cast<std::size_t>(col)];
  return n;
}

void ConfusionMatrix::add(const ConfusionMatrix& other) {
  for (int r = 0; r < kReportRowCount; ++r)
    for (int c = 0; c < kTaskCategoryCount; ++c)
      counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] +=
          other.counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
}

ConfusionMatrix build_confusion(std::span<const ReportCategory> truths,
                                std::span<const TaskCategory> preds) {
  if (truths.size() != preds.size())
    throw Error(ErrorKind::LengthMismatch, "truth/prediction count mismatch");
  if (truths.empty()) throw Error(ErrorKind::EmptyInput, "nothing to score");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const int row = report_row_index(truths[i]);
    if (row < 0)
      throw Error(ErrorKind::BadLabel, "plain LW is not a scored category");
    ++cm.counts[static_cast<std::size_t>(row)][static_cast<std::size_t>(preds[i])];
  }
  return cm;
}

namespace {

constexpr int kLwColumn = static_cast<int>(TaskCategory::LW);

double ratio(long num, long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1_of(double precision, double recall) {
  const double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

}  // namespace

F1Breakdown f1_breakdown(const ConfusionMatrix& cm) {
  F1Breakdown out;
  double f1_sum = 0.0;
  for (int r = 0; r < kReportRowCount; ++r) {
    // Rows RA..SD score their diagonal column; LWp/LWf score the LW column.
    const int col = r < 4 ? r : kLwColumn;
    const long hit = cm.counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
    CategoryScore& s = out.per_category[static_cast<std::size_t>(r)];
    s.recall = ratio(hit, cm.row_sum(r));
    s.precision = ratio(hit, cm.col_sum(col));
    s.f1 = f1_of(s.precision, s.recall);
    f1_sum += s.f1;
  }
  out.macro_f1 = f1_sum / kReportRowCount;
  return out;
}

std::string_view to_string(Paradigm p) {
  switch (p) {
    case Paradigm::Si1: return "si1";
    case Paradigm::Si2: return "si2";
    case Paradigm::Sd: return "sd";
  }
  return "?";
}

std::string_view to_string(ClassifierKind c) {
  return c == ClassifierKind::Lda ? "lda" : "lstm";
}

std::optional<Paradigm> parse_paradigm(std::string_view s) {
  if (s == "si1") return Paradigm::Si1;
  if (s == "si2") return Paradigm::Si2;
  if (s == "sd") return Paradigm::Sd;
  return std::nullopt;
}

std::optional<ClassifierKind> parse_classifier(std::string_view s) {
  if (s == "lda") return ClassifierKind::Lda;
  if (s == "lstm") return ClassifierKind::Lstm;
  return std::nullopt;
}

namespace {

// One trial's windows on the selected channels, with its fold bookkeeping.
struct TrialWindows {
  std::string subject_id;
  std::string trial_id;
  Cohort cohort = Cohort::Healthy;
  std::vector<LabeledWindow> windows;
};

std::vector<TrialWindows> cut_windows(const Dataset& dataset, SignalSource source) {
  const std::vector<int> channels = source_channels(source);
  std::vector<TrialWindows> out;
  out.reserve(dataset.trials.size());
  for (const Trial& trial : dataset.trials) {
    TrialWindows tw;
    tw.subject_id = trial.subject_id;
    tw.trial_id = trial.trial_id;
    tw.cohort = trial.cohort;
    const Eigen::MatrixXd selected = trial.signal(Eigen::all, channels);
    tw.windows = segment_windows(selected, trial.labels, trial.sublabels,
                                 trial.trial_id, trial.subject_id);
    out.push_back(std::move(tw));
  }
  // Canonical order: by subject, then trial.
  std::sort(out.begin(), out.end(), [](const TrialWindows& a, const TrialWindows& b) {
    return std::tie(a.subject_id, a.trial_id) < std::tie(b.subject_id, b.trial_id);
  });
  return out;
}

// A fold as index lists into the TrialWindows vector.
struct FoldPlan {
  std::string fold_id;
  std::string subject_id;
  std::vector<std::size_t> train, test;
};

std::vector<std::string> sorted_subjects(const std::vector<TrialWindows>& trials,
                                         Cohort cohort) {
  std::set<std::string> ids;
  for (const TrialWindows& t : trials)
    if (t.cohort == cohort) ids.insert(t.subject_id);
  return {ids.begin(), ids.end()};
}

std::vector<FoldPlan> plan_folds(const std::vector<TrialWindows>& trials,
                                 Paradigm paradigm) {
  const std::vector<std::string> pd = sorted_subjects(trials, Cohort::Pd);
  const std::vector<std::string> healthy = sorted_subjects(trials, Cohort::Healthy);
  std::vector<FoldPlan> folds;

  if (paradigm == Paradigm::Si1 || paradigm == Paradigm::Si2) {
    if (healthy.empty() || pd.size() < 2)
      throw Error(ErrorKind::CohortTooSmall,
                  "subject-independent paradigms need at least 1 healthy and 2 pd "
                  "subjects, got " +
                      std::to_string(healthy.size()) + " and " + std::to_string(pd.size()));
    for (const std::string& subject : pd) {
      FoldPlan fold;
      fold.fold_id = subject;
      fold.subject_id = subject;
      for (std::size_t i = 0; i < trials.size(); ++i) {
        const TrialWindows& t = trials[i];
        if (t.subject_id == subject)
          fold.test.push_back(i);
        else if (paradigm == Paradigm::Si1 ? t.cohort == Cohort::Healthy
                                           : t.cohort == Cohort::Pd)
          fold.train.push_back(i);
      }
      folds.push_back(std::move(fold));
    }
    return folds;
  }

  // sd: within each patient, hold out one trial at a time.
  if (pd.empty())
    throw Error(ErrorKind::CohortTooSmall, "subject-dependent paradigm needs pd subjects");
  for (const std::string& subject : pd) {
    std::vector<std::size_t> own;
    for (std::size_t i = 0; i < trials.size(); ++i)
      if (trials[i].subject_id == subject) own.push_back(i);
    if (own.size() < 2)
      throw Error(ErrorKind::TrialCountTooSmall,
                  "subject " + subject + " has " + std::to_string(own.size()) +
                      " trials; leave-one-trial-out needs at least 2");
    for (std::size_t held : own) {
      FoldPlan fold;
      fold.fold_id = subject + "/" + trials[held].trial_id;
      fold.subject_id = subject;
      fold.test.push_back(held);
      for (std::size_t i : own)
        if (i != held) fold.train.push_back(i);
      folds.push_back(std::move(fold));
    }
  }
  return folds;
}

void audit_fold(const std::vector<TrialWindows>& trials, const FoldPlan& fold,
                Paradigm paradigm) {
  const std::string held_trial =
      fold.fold_id.size() > fold.subject_id.size()
          ? fold.fold_id.substr(fold.subject_id.size() + 1)
          : std::string();
  for (std::size_t idx : fold.train) {
    const TrialWindows& t = trials[idx];
    const bool leak =
        (paradigm == Paradigm::Si1 && t.cohort == Cohort::Pd) ||
        (paradigm == Paradigm::Si2 && t.subject_id == fold.subject_id) ||
        (paradigm == Paradigm::Sd && t.subject_id == fold.subject_id &&
         t.trial_id == held_trial);
    if (leak)
      throw std::logic_error("fold audit failed: " + std::string(to_string(paradigm)) +
                             " fold " + fold.fold_id + " trains on " + t.subject_id +
                             "/" + t.trial_id);
  }
}

// A fold's fitted pipeline: z-score stats from the training windows plus one
// trained classifier.
class TrainedModel {
 public:
  static TrainedModel train(ClassifierKind classifier, SignalSource source,
                            const EvalConfig& config,
                            const std::vector<const LabeledWindow*>& train_windows,
                            std::uint64_t model_seed, const std::string& name,
                            const ModelHook& hook) {
    if (train_windows.empty())
      throw Error(ErrorKind::EmptyInput, "fold has no training windows");
    TrainedModel model;
    std::vector<const Eigen::MatrixXd*> train_data;
    train_data.reserve(train_windows.size());
    for (const LabeledWindow* w : train_windows) train_data.push_back(&w->data);
    model.norm_ = Normalizer::fit(train_data);

    if (classifier == ClassifierKind::Lda) {
      std::vector<Eigen::VectorXd> features;
      std::vector<TaskCategory> labels;
      features.reserve(train_windows.size());
      labels.reserve(train_windows.size());
      for (const LabeledWindow* w : train_windows) {
        features.push_back(extract_features(model.norm_.apply(w->data)));
        labels.push_back(w->train_label);
      }
      model.lda_ = LdaModel::fit(features, labels, config.lda_shrinkage);
      if (hook) hook(name, &*model.lda_, nullptr);
    } else {
      std::vector<LabeledWindow> normalized;
      normalized.reserve(train_windows.size());
      for (const LabeledWindow* w : train_windows) {
        LabeledWindow copy = *w;
        copy.data = model.norm_.apply(w->data);
        normalized.push_back(std::move(copy));
      }
      LstmModel init = lstm_init(source_channel_count(source), kLstmHiddenDim,
                                 kTaskCategoryCount, mix_seed(model_seed, 0));
      TrainConfig train_config = config.lstm;
      train_config.shuffle_seed = mix_seed(model_seed, 1);
      model.lstm_ = lstm_train(std::move(init), normalized, train_config).model;
      if (hook) hook(name, nullptr, &*model.lstm_);
    }
    return model;
  }

  TaskCategory predict(const LabeledWindow& window) const {
    const Eigen::MatrixXd normalized = norm_.apply(window.data);
    if (lda_) return lda_->predict(extract_features(normalized));
    return lstm_predict(*lstm_, normalized);
  }

 private:
  Normalizer norm_;
  std::optional<LdaModel> lda_;
  std::optional<LstmModel> lstm_;
};

// Scores the scored (non-plain-LW) windows of `test` under `model`.
ConfusionMatrix score_windows(const TrainedModel& model,
                              const std::vector<const LabeledWindow*>& test) {
  std::vector<ReportCategory> truths;
  std::vector<TaskCategory> preds;
  truths.reserve(test.size());
  preds.reserve(test.size());
  for (const LabeledWindow* w : test) {
    if (report_row_index(w->truth) < 0) continue;
    truths.push_back(w->truth);
    preds.push_back(model.predict(*w));
  }
  if (truths.empty())
    throw Error(ErrorKind::EmptyInput, "fold has no scored test windows");
  return build_confusion(truths, preds);
}

}  // namespace

ParadigmReport run_paradigm(const Dataset& dataset, Paradigm paradigm,
                            ClassifierKind classifier, SignalSource source,
                            const EvalConfig& config, const ModelHook& hook) {
  if (dataset.trials.empty()) throw Error(ErrorKind::EmptyInput, "empty dataset");

  ParadigmReport report;
  report.paradigm = paradigm;
  report.classifier = classifier;
  report.source = source;
  report.config = config;

  const std::vector<TrialWindows> trials = cut_windows(dataset, source);
  const std::vector<FoldPlan> folds = plan_folds(trials, paradigm);
  for (const FoldPlan& fold : folds) audit_fold(trials, fold, paradigm);

  const std::uint64_t scope_seed =
      mix_seed(config.master_seed,
               {static_cast<std::uint64_t>(paradigm), static_cast<std::uint64_t>(classifier),
                static_cast<std::uint64_t>(source)});

  const auto collect = [&](const std::vector<std::size_t>& idxs) {
    std::vector<const LabeledWindow*> out;
    for (std::size_t i : idxs)
      for (const LabeledWindow& w : trials[i].windows) out.push_back(&w);
    return out;
  };

  // si1 trains its single healthy-cohort model once; the other paradigms
  // train per fold.
  std::optional<TrainedModel> shared;
  if (paradigm == Paradigm::Si1)
    shared = TrainedModel::train(classifier, source, config, collect(folds.front().train),
                                 mix_seed(scope_seed, 0), "healthy", hook);

  for (std::size_t f = 0; f < folds.size(); ++f) {
    const FoldPlan& fold = folds[f];
    const std::vector<const LabeledWindow*> train = collect(fold.train);
    std::optional<TrainedModel> own;
    if (!shared)
      own = TrainedModel::train(classifier, source, config, train,
                                mix_seed(scope_seed, f + 1), fold.fold_id, hook);
    const TrainedModel& model = shared ? *shared : *own;
    FoldResult result;
    result.fold_id = fold.fold_id;
    result.subject_id = fold.subject_id;
    result.train_window_count = train.size();
    result.confusion = score_windows(model, collect(fold.test));
    result.test_window_count = static_cast<std::size_t>(result.confusion.total());
    result.scores = f1_breakdown(result.confusion);
    report.folds.push_back(std::move(result));
  }

  // Subject rollups: pool each subject's folds (identity for si1/si2).
  std::map<std::string, ConfusionMatrix> by_subject;
  for (const FoldResult& fold : report.folds) {
    by_subject[fold.subject_id].add(fold.confusion);
    report.pooled.add(fold.confusion);
  }
  for (const auto& [subject, cm] : by_subject)
    report.subjects.push_back({subject, cm, f1_breakdown(cm)});
  report.pooled_scores = f1_breakdown(report.pooled);

  const double n = static_cast<double>(report.subjects.size());
  for (int r = 0; r < kReportRowCount; ++r) {
    double mean = 0.0;
    for (const SubjectResult& s : report.subjects)
      mean += s.scores.per_category[static_cast<std::size_t>(r)].f1;
    mean /= n;
    double var = 0.0;
    for (const SubjectResult& s : report.subjects) {
      const double d = s.scores.per_category[static_cast<std::size_t>(r)].f1 - mean;
      var += d * d;
    }
    report.mean_f1[static_cast<std::size_t>(r)] = mean;
    report.std_f1[static_cast<std::size_t>(r)] = n > 1.0 ? std::sqrt(var / (n - 1.0)) : 0.0;
  }
  return report;
}

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

std::string report_key(const ParadigmReport& r) {
  return std::string(to_string(r.paradigm)) + "," + std::string(to_string(r.classifier)) +
         "," + std::string(to_string(r.source));
}

}  // namespace

std::string render_report(const ParadigmReport& report, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::Text) {
    out << "experiment " << to_string(report.paradigm) << "/"
        << to_string(report.classifier) << "/" << to_string(report.source) << "\n";
    out << "folds " << report.folds.size() << ", subjects " << report.subjects.size()
        << ", scored windows " << report.pooled.total() << "\n";
    out << "category   mean (std)    pooled\n";
    char line[96];
    for (int r = 0; r < kReportRowCount; ++r) {
      std::snprintf(line, sizeof(line), "%-10s %.2f (%.2f)   %.3f\n",
                    std::string(to_string(kReportRows[static_cast<std::size_t>(r)])).c_str(),
                    report.mean_f1[static_cast<std::size_t>(r)],
                    report.std_f1[static_cast<std::size_t>(r)],
                    report.pooled_scores.per_category[static_cast<std::size_t>(r)].f1);
      out << line;
    }
    // Macro line: mean/std across subjects of their macro F1.
    double mean = 0.0, var = 0.0;
    const double n = static_cast<double>(report.subjects.size());
    for (const SubjectResult& s : report.subjects) mean += s.scores.macro_f1;
    mean /= n;
    for (const SubjectResult& s : report.subjects) {
      const double d = s.scores.macro_f1 - mean;
      var += d * d;
    }
    std::snprintf(line, sizeof(line), "%-10s %.2f (%.2f)   %.3f\n", "macro", mean,
                  n > 1.0 ? std::sqrt(var / (n - 1.0)) : 0.0, report.pooled_scores.macro_f1);
    out << line;

    out << "pooled confusion (rows: truth, cols: predicted)\n";
    out << "      ";
    for (TaskCategory c : kTaskCategories) {
      std::snprintf(line, sizeof(line), "%7s", std::string(to_string(c)).c_str());
      out << line;
    }
    out << "\n";
    for (int r = 0; r < kReportRowCount; ++r) {
      std::snprintf(line, sizeof(line), "%-6s",
                    std::string(to_string(kReportRows[static_cast<std::size_t>(r)])).c_str());
      out << line;
      for (int c = 0; c < kTaskCategoryCount; ++c) {
        std::snprintf(line, sizeof(line), "%7ld",
                      report.pooled.counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
        out << line;
      }
      out << "\n";
    }
    return out.str();
  }

  // CSV form.
  out << "# locomode report\n";
  out << "# master_seed=" << report.config.master_seed << "\n";
  if (report.classifier == ClassifierKind::Lda) {
    out << "# lda_shrinkage=" << fmt("%g", report.config.lda_shrinkage) << "\n";
  } else {
    const TrainConfig& t = report.config.lstm;
    out << "# lstm epochs=" << t.epochs << " batch=" << t.batch_size
        << " lr=" << fmt("%g", t.learning_rate) << " beta1=" << fmt("%g", t.beta1)
        << " beta2=" << fmt("%g", t.beta2) << " eps=" << fmt("%g", t.epsilon)
        << " clip=" << fmt("%g", t.grad_clip_norm) << "\n";
  }
  out << "# SUMMARY rows carry mean_f1,std_f1,pooled_f1 in the last three columns\n";
  out << "paradigm,classifier,source,category,fold_id,precision,recall,f1\n";
  const std::string key = report_key(report);
  const auto emit = [&](const std::string& fold_id, const F1Breakdown& scores) {
    for (int r = 0; r < kReportRowCount; ++r) {
      const CategoryScore& s = scores.per_category[static_cast<std::size_t>(r)];
      out << key << "," << to_string(kReportRows[static_cast<std::size_t>(r)]) << ","
          << fold_id << "," << fmt("%.6f", s.precision) << "," << fmt("%.6f", s.recall)
          << "," << fmt("%.6f", s.f1) << "\n";
    }
  };
  for (const FoldResult& fold : report.folds) emit(fold.fold_id, fold.scores);
  if (report.paradigm == Paradigm::Sd)
    for (const SubjectResult& s : report.subjects) emit(s.subject_id, s.scores);
  for (int r = 0; r < kReportRowCount; ++r) {
    out << key << "," << to_string(kReportRows[static_cast<std::size_t>(r)])
        << ",SUMMARY," << fmt("%.6f", report.mean_f1[static_cast<std::size_t>(r)]) << ","
        << fmt("%.6f", report.std_f1[static_cast<std::size_t>(r)]) << ","
        << fmt("%.6f", report.pooled_scores.per_category[static_cast<std::size_t>(r)].f1)
        << "\n";
  }
  return out.str();
}

std::string render_confusion_csv(const ParadigmReport& report) {
  std::ostringstream out;
  out << "paradigm,classifier,source,true_category,pred_RA,pred_RD,pred_SA,pred_SD,pred_LW\n";
  for (int r = 0; r < kReportRowCount; ++r) {
    out << report_key(report) << ","
        << to_string(kReportRows[static_cast<std::size_t>(r)]);
    for (int c = 0; c < kTaskCategoryCount; ++c)
      out << ","
          << report.pooled.counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    out << "\n";
  }
  return out.str();
}

}  // namespace locomode
