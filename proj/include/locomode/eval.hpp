#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "locomode/categories.hpp"
#include "locomode/lda.hpp"
#include "locomode/lstm.hpp"
#include "locomode/trial.hpp"

namespace locomode {

// 6 true rows (RA, RD, SA, SD, LWp, LWf) x 5 predicted columns
// (RA, RD, SA, SD, LW). Plain LW ground truth has no row and never enters a
// scored set.
struct ConfusionMatrix {
  std::array<std::array<long, kTaskCategoryCount>, kReportRowCount> counts{};

  long total() const;
  long row_sum(int row) const;
  long col_sum(int col) const;
  void add(const ConfusionMatrix& other);
};

ConfusionMatrix build_confusion(std::span<const ReportCategory> truths,
                                std::span<const TaskCategory> preds);

struct CategoryScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Per-category precision/recall/F1 over the six report rows. The correct
// cell for LWp/LWf is their LW column; their precision shares the whole
// predicted-LW column as denominator since predictions carry no p/f
// distinction. All 0/0 ratios resolve to 0.
struct F1Breakdown {
  std::array<CategoryScore, kReportRowCount> per_category{};
  double macro_f1 = 0.0;  // mean of the six F1 values
};

F1Breakdown f1_breakdown(const ConfusionMatrix& cm);

enum class Paradigm : int { Si1 = 0, Si2 = 1, Sd = 2 };
enum class ClassifierKind : int { Lda = 0, Lstm = 1 };

std::string_view to_string(Paradigm p);
std::string_view to_string(ClassifierKind c);
std::optional<Paradigm> parse_paradigm(std::string_view s);
std::optional<ClassifierKind> parse_classifier(std::string_view s);

struct EvalConfig {
  std::uint64_t master_seed = 0;
  double lda_shrinkage = kDefaultLdaShrinkage;
  TrainConfig lstm;  // epochs/batch/Adam settings; seeds are derived per fold
};

struct FoldResult {
  std::string fold_id;     // subject id, or subject/trial for sd
  std::string subject_id;
  std::size_t train_window_count = 0;
  std::size_t test_window_count = 0;    // scored (plain LW excluded)
  ConfusionMatrix confusion;
  F1Breakdown scores;
};

// Per-subject pooled result: for sd, the sum of the subject's trial folds;
// for si1/si2 identical to the subject's single fold.
struct SubjectResult {
  std::string subject_id;
  ConfusionMatrix confusion;
  F1Breakdown scores;
};

struct ParadigmReport {
  Paradigm paradigm = Paradigm::Si1;
  ClassifierKind classifier = ClassifierKind::Lda;
  SignalSource source = SignalSource::Feet;
  EvalConfig config;

  std::vector<FoldResult> folds;        // canonical (subject, trial) order
  std::vector<SubjectResult> subjects;  // canonical subject order
  std::array<double, kReportRowCount> mean_f1{};  // across subjects
  std::array<double, kReportRowCount> std_f1{};   // sample std (n-1)
  ConfusionMatrix pooled;               // sum over folds
  F1Breakdown pooled_scores;
};

// Called once per trained model: si1 passes "healthy" (its single model),
// si2/sd pass the fold id. Exactly one of the model pointers is set.
using ModelHook =
    std::function<void(const std::string& name, const LdaModel* lda, const LstmModel* lstm)>;

// Runs one (paradigm, classifier, source) experiment over the dataset.
//   si1: one model on all healthy windows, one evaluation fold per pd subject;
//   si2: leave-one-subject-out over the pd subjects;
//   sd:  per pd subject, leave-one-trial-out.
// Windows are z-scored with statistics fit on the fold's training windows
// only; plain-LW-truth windows train (as LW) but are never scored. Each
// fold's training set is audited against leakage of the held-out
// subject/trial. Throws CohortTooSmall / TrialCountTooSmall when the dataset
// cannot support the paradigm.
ParadigmReport run_paradigm(const Dataset& dataset, Paradigm paradigm,
                            ClassifierKind classifier, SignalSource source,
                            const EvalConfig& config, const ModelHook& hook = {});

enum class ReportFormat { Text, Csv };

// Text: per-category "mean (std)" grid across subjects plus the pooled
// confusion block. Csv: one row per (category, fold) —
//   paradigm,classifier,source,category,fold_id,precision,recall,f1
// sd adds per-subject pooled rows (fold_id = subject id), and each category
// gets a SUMMARY row carrying mean_f1, std_f1, and pooled_f1.
std::string render_report(const ParadigmReport& report, ReportFormat format);

// paradigm,classifier,source,true_category,pred_RA,pred_RD,pred_SA,pred_SD,pred_LW
std::string render_confusion_csv(const ParadigmReport& report);

}  // namespace locomode
