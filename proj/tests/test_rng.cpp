#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "locomode/rng.hpp"

using namespace locomode;

TEST_CASE("identical seeds give identical streams") {
  Rng a(123456789), b(123456789);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(123456789), d(987654321);
  int differing = 0;
  for (int i = 0; i < 64; ++i)
    if (c.next_u64() != d.next_u64()) ++differing;
  CHECK(differing == 64);
}

TEST_CASE("uniform draws stay inside their interval") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform(-3.0, 5.0);
    CHECK(u >= -3.0);
    CHECK(u < 5.0);
  }
}

TEST_CASE("uniform integers cover the requested range roughly evenly") {
  Rng rng(99);
  std::vector<int> counts(10, 0);
  for (int i = 0; i < 100000; ++i)
    ++counts[static_cast<std::size_t>(rng.uniform_int(10))];
  for (int c : counts) {
    CHECK(c > 9000);
    CHECK(c < 11000);
  }
}

TEST_CASE("normal draws have the requested moments") {
  Rng rng(42);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = rng.normal(2.0, 3.0);
    sum += v;
    sq += v * v;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(2.0).epsilon(0.02));
  CHECK(std::sqrt(var) == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("lognormal is exp of the underlying normal") {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i)
    CHECK(a.lognormal(0.0, 0.15) == doctest::Approx(std::exp(b.normal(0.0, 0.15))));
}

TEST_CASE("shuffle permutes without losing elements") {
  Rng rng(3);
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> orig = v;
  rng.shuffle(v);
  CHECK(v != orig);  // astronomically unlikely to be identity
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == orig);
}

TEST_CASE("mixed seeds separate streams by tag") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t tag = 0; tag < 100; ++tag)
    seeds.insert(mix_seed(0, tag));
  CHECK(seeds.size() == 100);

  // tag lists chain: mix(s, {a, b}) == mix(mix(s, a), b)
  CHECK(mix_seed(77, {1, 2}) == mix_seed(mix_seed(77, 1), 2));
  CHECK(mix_seed(77, {1, 2}) != mix_seed(77, {2, 1}));
}
