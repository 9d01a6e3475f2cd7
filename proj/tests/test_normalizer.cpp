#include <cmath>
#include <vector>

#include "doctest.h"
#include "locomode/error.hpp"
#include "locomode/normalizer.hpp"
#include "locomode/rng.hpp"

using namespace locomode;

TEST_CASE("statistics match a direct two-pass recomputation") {
  // single channel {2,4,4,4,6,6,8} split across two matrices
  Eigen::MatrixXd a(4, 1), b(3, 1);
  a << 2, 4, 4, 4;
  b << 6, 6, 8;
  Normalizer n = Normalizer::fit(std::vector<Eigen::MatrixXd>{a, b});

  double mean = (2 + 4 + 4 + 4 + 6 + 6 + 8) / 7.0;
  double sq = 0.0;
  for (double v : {2.0, 4.0, 4.0, 4.0, 6.0, 6.0, 8.0})
    sq += (v - mean) * (v - mean);
  double sd = std::sqrt(sq / 7.0);

  REQUIRE(n.channel_count() == 1);
  CHECK(n.mean()(0) == doctest::Approx(mean).epsilon(1e-15));
  CHECK(n.mean()(0) == doctest::Approx(4.857142857142857).epsilon(1e-15));
  CHECK(n.stddev()(0) == doctest::Approx(sd).epsilon(1e-15));
}

TEST_CASE("constant channels clamp to the minimum std and map to zero") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(10, 2, 5.0);
  Normalizer n = Normalizer::fit(std::vector<Eigen::MatrixXd>{m});
  CHECK(n.mean()(0) == 5.0);
  CHECK(n.stddev()(0) == Normalizer::kMinStd);
  CHECK(n.apply(m).isZero(0.0));
}

TEST_CASE("applying subtracts the mean and divides by the std") {
  Normalizer n{Eigen::VectorXd::Constant(1, 2.0),
               Eigen::VectorXd::Constant(1, 2.0)};
  Eigen::MatrixXd x(1, 1);
  x << 4.0;
  CHECK(n.apply(x)(0, 0) == 1.0);
}

TEST_CASE("a fit normalizer standardizes its own training data") {
  Rng rng(31);
  Eigen::MatrixXd m(200, 4);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(i, c) = rng.normal(3.0 * static_cast<double>(c), 1.0 + static_cast<double>(c));
  Normalizer n = Normalizer::fit(std::vector<Eigen::MatrixXd>{m});
  Eigen::MatrixXd z = n.apply(m);
  for (Eigen::Index c = 0; c < 4; ++c) {
    double mean = z.col(c).mean();
    double sd = std::sqrt(z.col(c).array().square().mean() - mean * mean);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(sd - 1.0) < 1e-9);
  }
}

TEST_CASE("apply then invert recovers the input") {
  Rng rng(8);
  Eigen::MatrixXd train(50, 3), probe(20, 3);
  for (Eigen::Index i = 0; i < train.rows(); ++i)
    for (Eigen::Index c = 0; c < 3; ++c) train(i, c) = rng.uniform(-10, 10);
  for (Eigen::Index i = 0; i < probe.rows(); ++i)
    for (Eigen::Index c = 0; c < 3; ++c) probe(i, c) = rng.uniform(-10, 10);

  Normalizer n = Normalizer::fit(std::vector<Eigen::MatrixXd>{train});
  Eigen::MatrixXd back = n.invert(n.apply(probe));
  CHECK(((back - probe).array().abs() <=
         1e-9 * probe.array().abs().max(1.0))
            .all());
}

TEST_CASE("mismatched channel counts are rejected") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 12);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(5, 36);
  try {
    Normalizer::fit(std::vector<Eigen::MatrixXd>{a, b});
    FAIL("expected ChannelMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ChannelMismatch);
  }

  Normalizer n = Normalizer::fit(std::vector<Eigen::MatrixXd>{a});
  CHECK_THROWS_AS(n.apply(b), Error);
}

TEST_CASE("fewer than two total frames is rejected") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Zero(1, 2);
  try {
    Normalizer::fit(std::vector<Eigen::MatrixXd>{one});
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyInput);
  }
  CHECK_THROWS_AS(Normalizer::fit(std::vector<Eigen::MatrixXd>{}), Error);
}
