#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rlex/linalg.hpp"
#include "rlex/rng.hpp"

using rlex::Matrix;
using rlex::solve_linear;

TEST_CASE("solves a known 3x3 system") {
  Matrix a(3, 3);
  a(0, 0) = 2;  a(0, 1) = 1;  a(0, 2) = -1;
  a(1, 0) = -3; a(1, 1) = -1; a(1, 2) = 2;
  a(2, 0) = -2; a(2, 1) = 1;  a(2, 2) = 2;
  const std::vector<double> b{8, -11, -3};
  const std::vector<double> x = solve_linear(a, b);
  REQUIRE(x[0] == Catch::Approx(2.0).margin(1e-12));
  REQUIRE(x[1] == Catch::Approx(3.0).margin(1e-12));
  REQUIRE(x[2] == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("rejects singular systems") {
  Matrix a(2, 2);
  a(0, 0) = 1; a(0, 1) = 2;
  a(1, 0) = 2; a(1, 1) = 4;
  REQUIRE_THROWS_AS(solve_linear(a, {1.0, 2.0}), std::runtime_error);
}

TEST_CASE("recovers random solutions to high accuracy") {
  rlex::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + rng.uniform_int(12);
    Matrix a(n, n);
    for (auto& v : a.data) v = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < n; ++i) a(i, i) += n;  // well conditioned
    std::vector<double> x_true(n);
    for (auto& v : x_true) v = rng.uniform(-5.0, 5.0);
    std::vector<double> b(n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) b[i] += a(i, j) * x_true[j];
    }
    const std::vector<double> x = solve_linear(a, b);
    REQUIRE(rlex::max_abs_diff(x, x_true) < 1e-10);
  }
}
