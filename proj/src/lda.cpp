#include "locomode/lda.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "locomode/error.hpp"

namespace locomode {

namespace {

constexpr const char* kHeader = "LOCOMODE-LDA v1";

void write_value(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

LdaModel LdaModel::fit(const std::vector<Eigen::VectorXd>& features,
                       const std::vector<TaskCategory>& labels,
                       double shrinkage) {
  if (features.empty()) throw Error(ErrorKind::EmptyInput, "no training samples");
  if (features.size() != labels.size())
    throw Error(ErrorKind::LengthMismatch, "feature/label count mismatch");
  if (shrinkage < 0.0)
    throw Error(ErrorKind::TypeError, "shrinkage must be nonnegative");

  const Eigen::Index dim = features.front().size();
  for (const auto& f : features)
    if (f.size() != dim)
      throw Error(ErrorKind::DimensionMismatch,
                  "feature length " + std::to_string(f.size()) + " vs " +
                      std::to_string(dim));

  std::array<Eigen::Index, kTaskCategoryCount> counts{};
  for (TaskCategory label : labels) counts[static_cast<std::size_t>(label)]++;
  int present = 0;
  for (int k = 0; k < kTaskCategoryCount; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 1)
      throw Error(ErrorKind::InsufficientSamples,
                  std::string(to_string(static_cast<TaskCategory>(k))) +
                      " has a single sample");
    if (counts[static_cast<std::size_t>(k)] > 0) ++present;
  }

  LdaModel model;
  model.shrinkage_ = shrinkage;
  model.means_ = Eigen::MatrixXd::Zero(kTaskCategoryCount, dim);
  model.priors_ = Eigen::VectorXd::Zero(kTaskCategoryCount);

  const auto n = static_cast<double>(features.size());
  for (std::size_t i = 0; i < features.size(); ++i)
    model.means_.row(static_cast<int>(labels[i])) += features[i].transpose();
  for (int k = 0; k < kTaskCategoryCount; ++k) {
    const auto nk = counts[static_cast<std::size_t>(k)];
    if (nk > 0) {
      model.means_.row(k) /= static_cast<double>(nk);
      model.priors_[k] = static_cast<double>(nk) / n;
    }
  }

  // Pooled within-category scatter, normalized by (n - #present categories).
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(dim, dim);
  {
    // Accumulate via one centered GEMM per category.
    for (int k = 0; k < kTaskCategoryCount; ++k) {
      const auto nk = counts[static_cast<std::size_t>(k)];
      if (nk == 0) continue;
      Eigen::MatrixXd centered(nk, dim);
      Eigen::Index row = 0;
      for (std::size_t i = 0; i < features.size(); ++i)
        if (static_cast<int>(labels[i]) == k)
          centered.row(row++) = features[i].transpose() - model.means_.row(k);
      scatter.noalias() += centered.transpose() * centered;
    }
  }
  model.covariance_ = scatter / (n - static_cast<double>(present));
  const double trace_scale = model.covariance_.trace() / static_cast<double>(dim);
  model.covariance_ += shrinkage * trace_scale *
                       Eigen::MatrixXd::Identity(dim, dim);

  model.build_discriminants();
  return model;
}

void LdaModel::build_discriminants() {
  const Eigen::Index dim = means_.cols();
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::NumericalFailure,
                "pooled covariance is not positive definite; "
                "increase shrinkage");

  alpha_.resize(dim, kTaskCategoryCount);
  offset_.resize(kTaskCategoryCount);
  for (int k = 0; k < kTaskCategoryCount; ++k) {
    if (priors_[k] <= 0.0) {
      alpha_.col(k).setZero();
      offset_[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    alpha_.col(k) = llt.solve(means_.row(k).transpose());
    offset_[k] = -0.5 * means_.row(k).dot(alpha_.col(k)) + std::log(priors_[k]);
  }
}

std::array<double, kTaskCategoryCount> LdaModel::scores(
    const Eigen::VectorXd& x) const {
  if (x.size() != feature_dim())
    throw Error(ErrorKind::DimensionMismatch,
                "query length " + std::to_string(x.size()) + " vs " +
                    std::to_string(feature_dim()));
  std::array<double, kTaskCategoryCount> out{};
  for (int k = 0; k < kTaskCategoryCount; ++k) {
    out[static_cast<std::size_t>(k)] =
        priors_[k] > 0.0 ? alpha_.col(k).dot(x) + offset_[k]
                         : -std::numeric_limits<double>::infinity();
  }
  return out;
}

TaskCategory LdaModel::predict(const Eigen::VectorXd& x) const {
  const auto delta = scores(x);
  int best = 0;
  for (int k = 1; k < kTaskCategoryCount; ++k)
    if (delta[static_cast<std::size_t>(k)] > delta[static_cast<std::size_t>(best)])
      best = k;
  return static_cast<TaskCategory>(best);
}

void LdaModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  out << kHeader << "\n";
  out << "dim " << feature_dim() << "\n";
  out << "categories";
  for (TaskCategory c : kTaskCategories) out << ' ' << to_string(c);
  out << "\n";
  out << "shrinkage ";
  write_value(out, shrinkage_);
  out << "\npriors";
  for (int k = 0; k < kTaskCategoryCount; ++k) {
    out << ' ';
    write_value(out, priors_[k]);
  }
  out << "\nmeans\n";
  for (int k = 0; k < kTaskCategoryCount; ++k) {
    for (Eigen::Index j = 0; j < feature_dim(); ++j) {
      if (j) out << ' ';
      write_value(out, means_(k, j));
    }
    out << "\n";
  }
  out << "covariance\n";
  for (Eigen::Index i = 0; i < feature_dim(); ++i) {
    for (Eigen::Index j = 0; j < feature_dim(); ++j) {
      if (j) out << ' ';
      write_value(out, covariance_(i, j));
    }
    out << "\n";
  }
  if (!out) throw Error(ErrorKind::IoFailure, "short write to " + path.string());
}

LdaModel LdaModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw Error(ErrorKind::IoFailure, "bad header in " + path.string());

  auto expect_word = [&](const std::string& want) {
    std::string word;
    if (!(in >> word) || word != want)
      throw Error(ErrorKind::IoFailure,
                  "expected '" + want + "' in " + path.string());
  };

  LdaModel model;
  Eigen::Index dim = 0;
  expect_word("dim");
  if (!(in >> dim) || dim <= 0)
    throw Error(ErrorKind::IoFailure, "bad dim in " + path.string());
  expect_word("categories");
  for (TaskCategory c : kTaskCategories) expect_word(std::string(to_string(c)));
  expect_word("shrinkage");
  if (!(in >> model.shrinkage_))
    throw Error(ErrorKind::IoFailure, "bad shrinkage in " + path.string());
  expect_word("priors");
  model.priors_.resize(kTaskCategoryCount);
  for (int k = 0; k < kTaskCategoryCount; ++k)
    if (!(in >> model.priors_[k]))
      throw Error(ErrorKind::IoFailure, "bad priors in " + path.string());
  expect_word("means");
  model.means_.resize(kTaskCategoryCount, dim);
  for (int k = 0; k < kTaskCategoryCount; ++k)
    for (Eigen::Index j = 0; j < dim; ++j)
      if (!(in >> model.means_(k, j)))
        throw Error(ErrorKind::IoFailure, "bad means in " + path.string());
  expect_word("covariance");
  model.covariance_.resize(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      if (!(in >> model.covariance_(i, j)))
        throw Error(ErrorKind::IoFailure, "bad covariance in " + path.string());

  model.build_discriminants();
  return model;
}

}  // namespace locomode
