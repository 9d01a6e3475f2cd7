#include <unistd.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include <Eigen/LU>

#include "doctest.h"
#include "locomode/error.hpp"
#include "locomode/lda.hpp"
#include "locomode/rng.hpp"

using namespace locomode;
namespace fs = std::filesystem;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

// Gaussian blob training set: `per_cat` samples around each given mean.
void make_blobs(const std::vector<Eigen::VectorXd>& means, int per_cat,
                double spread, Rng& rng, std::vector<Eigen::VectorXd>& xs,
                std::vector<TaskCategory>& ys) {
  for (std::size_t k = 0; k < means.size(); ++k) {
    for (int i = 0; i < per_cat; ++i) {
      Eigen::VectorXd x = means[k];
      for (Eigen::Index d = 0; d < x.size(); ++d) x(d) += rng.normal(0.0, spread);
      xs.push_back(x);
      ys.push_back(static_cast<TaskCategory>(k));
    }
  }
}

// Macro-F1 over the five trainable categories, computed from scratch.
double macro_f1(const std::vector<TaskCategory>& truth,
                const std::vector<TaskCategory>& pred) {
  double total = 0.0;
  for (int k = 0; k < kTaskCategoryCount; ++k) {
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      bool t = truth[i] == static_cast<TaskCategory>(k);
      bool p = pred[i] == static_cast<TaskCategory>(k);
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    double prec = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
    double rec = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
    total += prec + rec == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
  }
  return total / kTaskCategoryCount;
}

}  // namespace

TEST_CASE("one-dimensional fit matches the hand computation") {
  // two categories at {-1,+1} and {3,5}: means (0,4), pooled variance
  // (2+2)/(4-2) = 2, priors (1/2, 1/2)
  std::vector<Eigen::VectorXd> xs = {vec1(-1), vec1(1), vec1(3), vec1(5)};
  std::vector<TaskCategory> ys = {TaskCategory::RA, TaskCategory::RA,
                                  TaskCategory::RD, TaskCategory::RD};
  LdaModel m = LdaModel::fit(xs, ys, 0.0);

  CHECK(m.means()(0, 0) == 0.0);
  CHECK(m.means()(1, 0) == 4.0);
  CHECK(m.pooled_covariance()(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(m.priors()(0) == 0.5);
  CHECK(m.priors()(1) == 0.5);
  CHECK(m.priors()(4) == 0.0);
}

TEST_CASE("discriminants tie exactly on the midpoint and split around it") {
  // symmetric categories at means 0 and 2 with equal spread: the decision
  // boundary sits at x = 1, and the exact tie resolves to the lower index
  std::vector<Eigen::VectorXd> xs = {vec1(-1), vec1(1), vec1(1), vec1(3)};
  std::vector<TaskCategory> ys = {TaskCategory::RA, TaskCategory::RA,
                                  TaskCategory::RD, TaskCategory::RD};
  LdaModel m = LdaModel::fit(xs, ys, 0.0);

  auto at_boundary = m.scores(vec1(1.0));
  CHECK(at_boundary[0] == doctest::Approx(at_boundary[1]).epsilon(1e-12));
  CHECK(m.predict(vec1(0.99)) == TaskCategory::RA);
  CHECK(m.predict(vec1(1.01)) == TaskCategory::RD);
  CHECK(m.predict(vec1(1.0)) == TaskCategory::RA);  // tie -> lower index

  // absent categories never win
  auto s = m.scores(vec1(100.0));
  CHECK(s[2] == -std::numeric_limits<double>::infinity());
  CHECK(s[3] == -std::numeric_limits<double>::infinity());
  CHECK(s[4] == -std::numeric_limits<double>::infinity());
}

TEST_CASE("unequal category counts give empirical priors") {
  std::vector<Eigen::VectorXd> xs = {vec1(-1), vec1(0), vec1(1), vec1(-1),
                                     vec1(9), vec1(11)};
  std::vector<TaskCategory> ys(4, TaskCategory::SA);
  ys.push_back(TaskCategory::LW);
  ys.push_back(TaskCategory::LW);
  LdaModel m = LdaModel::fit(xs, ys);
  CHECK(m.priors()(2) == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
  CHECK(m.priors()(4) == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("shrinkage adds a trace-scaled ridge to the pooled covariance") {
  std::vector<Eigen::VectorXd> xs = {vec1(-1), vec1(1), vec1(3), vec1(5)};
  std::vector<TaskCategory> ys = {TaskCategory::RA, TaskCategory::RA,
                                  TaskCategory::RD, TaskCategory::RD};
  LdaModel raw = LdaModel::fit(xs, ys, 0.0);
  LdaModel shrunk = LdaModel::fit(xs, ys, 0.5);
  // 1-D: trace/D = 2, so the ridge adds 0.5 * 2
  CHECK(shrunk.pooled_covariance()(0, 0) ==
        doctest::Approx(raw.pooled_covariance()(0, 0) + 1.0).epsilon(1e-15));
  CHECK(shrunk.shrinkage() == 0.5);
}

TEST_CASE("identity covariance with equal priors reduces to nearest mean") {
  // Build the model through its file format so the covariance is exactly
  // the identity; a fitted covariance is only approximately spherical and
  // queries far from the means would amplify the difference.
  Rng rng(1234);
  Eigen::MatrixXd means(5, 6);
  for (Eigen::Index k = 0; k < 5; ++k)
    for (Eigen::Index j = 0; j < 6; ++j) means(k, j) = rng.uniform(-5, 5);

  fs::path file = fs::temp_directory_path() /
                  ("locomode_lda_nm_" + std::to_string(::getpid()) + ".txt");
  {
    std::ofstream out(file);
    out.precision(17);
    out << "LOCOMODE-LDA v1\n";
    out << "dim 6\n";
    out << "categories RA RD SA SD LW\n";
    out << "shrinkage 0\n";
    out << "priors 0.2 0.2 0.2 0.2 0.2\n";
    out << "means\n";
    for (Eigen::Index k = 0; k < 5; ++k) {
      for (Eigen::Index j = 0; j < 6; ++j) out << (j ? " " : "") << means(k, j);
      out << "\n";
    }
    out << "covariance\n";
    for (Eigen::Index i = 0; i < 6; ++i) {
      for (Eigen::Index j = 0; j < 6; ++j) out << (j ? " " : "") << (i == j ? 1 : 0);
      out << "\n";
    }
  }
  LdaModel m = LdaModel::load(file);
  fs::remove(file);

  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd x(6);
    for (Eigen::Index d = 0; d < 6; ++d) x(d) = rng.uniform(-12, 12);
    int nearest = 0;
    double best = (x - means.row(0).transpose()).squaredNorm();
    for (int k = 1; k < 5; ++k) {
      double d2 = (x - means.row(k).transpose()).squaredNorm();
      if (d2 < best) {
        best = d2;
        nearest = k;
      }
    }
    CHECK(m.predict(x) == static_cast<TaskCategory>(nearest));
  }
}

TEST_CASE("five well-separated blobs classify nearly perfectly") {
  Rng rng(777);
  std::vector<Eigen::VectorXd> means;
  for (int k = 0; k < 5; ++k) {
    Eigen::VectorXd mu(10);
    for (Eigen::Index d = 0; d < 10; ++d) mu(d) = rng.normal();
    mu *= 8.0 / mu.norm();  // separation 8 from the origin
    means.push_back(mu);
  }
  std::vector<Eigen::VectorXd> train_x, test_x;
  std::vector<TaskCategory> train_y, test_y;
  make_blobs(means, 100, 1.0, rng, train_x, train_y);
  make_blobs(means, 50, 1.0, rng, test_x, test_y);

  LdaModel m = LdaModel::fit(train_x, train_y);
  std::vector<TaskCategory> pred;
  for (const auto& x : test_x) pred.push_back(m.predict(x));
  CHECK(macro_f1(test_y, pred) >= 0.99);
}

TEST_CASE("predictions are invariant under invertible affine maps") {
  Rng rng(2468);
  std::vector<Eigen::VectorXd> means;
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd mu(5);
    for (Eigen::Index d = 0; d < 5; ++d) mu(d) = rng.normal(0.0, 4.0);
    means.push_back(mu);
  }
  std::vector<Eigen::VectorXd> xs;
  std::vector<TaskCategory> ys;
  make_blobs(means, 40, 1.0, rng, xs, ys);

  // a well-conditioned invertible map x -> Ax + b
  Eigen::MatrixXd A(5, 5);
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 5; ++j) A(i, j) = rng.normal(0.0, 0.3);
  A += 2.0 * Eigen::MatrixXd::Identity(5, 5);
  Eigen::VectorXd b(5);
  for (Eigen::Index i = 0; i < 5; ++i) b(i) = rng.normal(0.0, 2.0);

  std::vector<Eigen::VectorXd> xs_t;
  for (const auto& x : xs) xs_t.push_back(A * x + b);

  LdaModel m0 = LdaModel::fit(xs, ys, 0.0);
  LdaModel m1 = LdaModel::fit(xs_t, ys, 0.0);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd x = xs[rng.uniform_int(xs.size())];
    Eigen::VectorXd jittered = x;
    for (Eigen::Index d = 0; d < 5; ++d) jittered(d) += rng.normal(0.0, 0.5);
    CHECK(m0.predict(jittered) == m1.predict(A * jittered + b));
  }
}

TEST_CASE("discriminant differences equal posterior log-odds") {
  Rng rng(135);
  std::vector<Eigen::VectorXd> means;
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd mu(3);
    for (Eigen::Index d = 0; d < 3; ++d) mu(d) = rng.normal(0.0, 3.0);
    means.push_back(mu);
  }
  std::vector<Eigen::VectorXd> xs;
  std::vector<TaskCategory> ys;
  make_blobs(means, 30, 1.5, rng, xs, ys);
  // unequal priors: drop some samples from category 2
  for (int i = 0; i < 10; ++i) {
    xs.pop_back();
    ys.pop_back();
  }

  LdaModel m = LdaModel::fit(xs, ys, 0.0);
  Eigen::MatrixXd sigma_inv = m.pooled_covariance().inverse();  // 3x3 oracle

  auto log_density = [&](const Eigen::VectorXd& x, int k) {
    Eigen::VectorXd mu = m.means().row(k).transpose();
    return -0.5 * ((x - mu).transpose() * sigma_inv * (x - mu))(0) +
           std::log(m.priors()(k));
  };

  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd x(3);
    for (Eigen::Index d = 0; d < 3; ++d) x(d) = rng.uniform(-6, 6);
    auto s = m.scores(x);
    for (int k = 1; k < 3; ++k) {
      double want = log_density(x, k) - log_density(x, 0);
      CHECK(s[static_cast<std::size_t>(k)] - s[0] ==
            doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("a category with one sample cannot be fit") {
  std::vector<Eigen::VectorXd> xs = {vec1(0), vec1(1), vec1(5)};
  std::vector<TaskCategory> ys = {TaskCategory::RA, TaskCategory::RA,
                                  TaskCategory::RD};
  try {
    LdaModel::fit(xs, ys);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientSamples);
  }
  CHECK_THROWS_AS(LdaModel::fit({}, {}), Error);
}

TEST_CASE("models survive a save/load round trip bit for bit") {
  Rng rng(555);
  std::vector<Eigen::VectorXd> means = {vec1(0), vec1(6), vec1(12)};
  std::vector<Eigen::VectorXd> xs;
  std::vector<TaskCategory> ys;
  make_blobs(means, 20, 1.0, rng, xs, ys);
  LdaModel m = LdaModel::fit(xs, ys);

  fs::path file = fs::temp_directory_path() /
                  ("locomode_lda_" + std::to_string(::getpid()) + ".txt");
  m.save(file);
  LdaModel back = LdaModel::load(file);
  fs::remove(file);

  CHECK(back.means() == m.means());
  CHECK(back.pooled_covariance() == m.pooled_covariance());
  CHECK(back.priors() == m.priors());
  CHECK(back.shrinkage() == m.shrinkage());
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd x = vec1(rng.uniform(-5, 20));
    auto a = m.scores(x);
    auto s = back.scores(x);
    for (int k = 0; k < 5; ++k) CHECK(a[static_cast<std::size_t>(k)] ==
                                      s[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("loading a malformed model file fails cleanly") {
  fs::path file = fs::temp_directory_path() /
                  ("locomode_lda_bad_" + std::to_string(::getpid()) + ".txt");
  std::ofstream(file) << "not a model\n";
  CHECK_THROWS_AS(LdaModel::load(file), Error);
  fs::remove(file);
  CHECK_THROWS_AS(LdaModel::load(file), Error);  // missing file
}
