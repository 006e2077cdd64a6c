#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rlex/rng.hpp"

using rlex::Rng;

TEST_CASE("identical seeds give identical streams") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("run splitting yields distinct streams") {
  Rng a = Rng::for_run(42, 0);
  Rng b = Rng::for_run(42, 1);
  int equal = 0;
  for (int i = 0; i < 100; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  REQUIRE(equal == 0);
}

TEST_CASE("uniform doubles live in [0,1) with the right mean") {
  Rng rng(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  REQUIRE(std::fabs(sum / n - 0.5) < 0.01);
}

TEST_CASE("uniform_int covers its range uniformly") {
  Rng rng(11);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) counts[rng.uniform_int(7)]++;
  for (int c : counts) REQUIRE(std::fabs(c / static_cast<double>(n) - 1.0 / 7) < 0.01);
  REQUIRE_THROWS_AS(rng.uniform_int(0), std::invalid_argument);
}

TEST_CASE("normal moments") {
  Rng rng(13);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  REQUIRE(std::fabs(mean) < 0.01);
  REQUIRE(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("gamma sampler matches its mean and variance") {
  Rng rng(17);
  const double shape = 2.5;
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.gamma(shape);
    REQUIRE(x > 0.0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  REQUIRE(std::fabs(mean - shape) < 0.03);
  REQUIRE(std::fabs(var - shape) < 0.06);
  REQUIRE_THROWS_AS(rng.gamma(0.0), std::invalid_argument);
}

TEST_CASE("gamma sampler handles shape below one") {
  Rng rng(19);
  const double shape = 0.4;
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += rng.gamma(shape);
  REQUIRE(std::fabs(sum / n - shape) < 0.02);
}

TEST_CASE("beta sampler mean") {
  Rng rng(23);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.beta(2.0, 3.0);
    REQUIRE(x >= 0.0);
    REQUIRE(x <= 1.0);
    sum += x;
  }
  REQUIRE(std::fabs(sum / n - 0.4) < 0.01);
}

TEST_CASE("categorical frequencies match weights") {
  Rng rng(29);
  const std::vector<double> w{0.3, 0.7};
  int ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ones += rng.categorical(w);
  REQUIRE(std::fabs(ones / static_cast<double>(n) - 0.7) < 0.01);
}
