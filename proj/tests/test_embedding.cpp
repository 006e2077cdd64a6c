#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rlex/embedding.hpp"
#include "rlex/linalg.hpp"
#include "rlex/rng.hpp"

using rlex::EpisodicMemory;
using rlex::one_hot_encode;
using rlex::RandomProjectionEncoder;

TEST_CASE("projection is linear and seed-deterministic") {
  RandomProjectionEncoder enc(8, 4, 99);
  RandomProjectionEncoder twin(8, 4, 99);
  rlex::Rng rng(1);
  std::vector<double> x1(8);
  std::vector<double> x2(8);
  for (int i = 0; i < 8; ++i) {
    x1[i] = rng.uniform(-1.0, 1.0);
    x2[i] = rng.uniform(-1.0, 1.0);
  }
  const auto zero = enc.encode(std::vector<double>(8, 0.0));
  for (double v : zero) REQUIRE(v == 0.0);

  std::vector<double> sum(8);
  for (int i = 0; i < 8; ++i) sum[i] = x1[i] + x2[i];
  const auto lhs = enc.encode(sum);
  const auto y1 = enc.encode(x1);
  const auto y2 = enc.encode(x2);
  for (int i = 0; i < 4; ++i) REQUIRE(std::fabs(lhs[i] - y1[i] - y2[i]) < 1e-12);
  REQUIRE(enc.encode(x1) == twin.encode(x1));

  REQUIRE_THROWS_AS(enc.encode(std::vector<double>(7, 0.0)), std::invalid_argument);
}

TEST_CASE("orthonormal rows never expand the norm") {
  RandomProjectionEncoder enc(12, 5, 7, /*orthonormal_rows=*/true);
  rlex::Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x(12);
    double nx = 0.0;
    for (double& v : x) {
      v = rng.normal();
      nx += v * v;
    }
    const auto y = enc.encode(x);
    double ny = 0.0;
    for (double v : y) ny += v * v;
    REQUIRE(ny <= nx + 1e-9);
  }
  REQUIRE_THROWS_AS(RandomProjectionEncoder(4, 6, 1, true), std::invalid_argument);
}

TEST_CASE("one-hot encoding geometry") {
  const auto v = one_hot_encode(0, 3);
  REQUIRE(v == std::vector<double>{1.0, 0.0, 0.0});
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double d = rlex::euclidean_distance(one_hot_encode(i, 5), one_hot_encode(j, 5));
      if (i == j) {
        REQUIRE(d == 0.0);
      } else {
        REQUIRE(d == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
      }
    }
  }
  REQUIRE_THROWS_AS(one_hot_encode(5, 5), std::invalid_argument);
  REQUIRE_THROWS_AS(one_hot_encode(-1, 5), std::invalid_argument);
}

TEST_CASE("projected one-hot states stay distinct") {
  const int n_states = 20;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomProjectionEncoder enc(n_states, 8, seed);
    std::vector<std::vector<double>> embedded;
    for (int s = 0; s < n_states; ++s) embedded.push_back(enc.encode(one_hot_encode(s, n_states)));
    double min_dist = 1e9;
    for (int i = 0; i < n_states; ++i) {
      for (int j = i + 1; j < n_states; ++j)
        min_dist = std::min(min_dist, rlex::euclidean_distance(embedded[i], embedded[j]));
    }
    REQUIRE(min_dist > 0.0);
  }
}

TEST_CASE("episodic pseudo-count of exact duplicates") {
  const int k = 5;
  EpisodicMemory memory(k, 100, 1e-3, /*count_constant=*/0.0);
  const std::vector<double> e{0.4, -0.2, 1.0};
  for (int copies = 1; copies <= k; ++copies) {
    memory.insert(e);
    const double reward = memory.pseudo_count_reward(e);
    REQUIRE(reward == Catch::Approx(1.0 / std::sqrt(static_cast<double>(copies))).margin(1e-9));
  }
}

TEST_CASE("far queries approach the count-constant ceiling") {
  EpisodicMemory memory(3, 100, 1e-3, 1e-3);
  rlex::Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    memory.insert({rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)});
    memory.pseudo_count_reward({rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)});
  }
  const double reward = memory.pseudo_count_reward({1e6, 1e6});
  REQUIRE(reward == Catch::Approx(31.6227766).margin(0.5));
}

TEST_CASE("repeat insertion never raises the reward") {
  EpisodicMemory memory(4, 100, 1e-3, 1e-3);
  const std::vector<double> e{1.0, 2.0};
  memory.insert({0.0, 0.0});
  double last = 1e100;
  for (int i = 0; i < 10; ++i) {
    memory.insert(e);
    const double reward = memory.pseudo_count_reward(e);
    REQUIRE(reward <= last + 1e-12);
    last = reward;
  }
}

TEST_CASE("empty memory falls back to the configured values") {
  EpisodicMemory with_constant(3, 10, 1e-3, 0.004);
  REQUIRE(with_constant.pseudo_count_reward({1.0}) == Catch::Approx(1.0 / std::sqrt(0.004)));
  EpisodicMemory no_constant(3, 10, 1e-3, 0.0, /*max_reward=*/77.0);
  REQUIRE(no_constant.pseudo_count_reward({1.0}) == 77.0);
}

TEST_CASE("reset clears the buffer and statistics") {
  EpisodicMemory memory(2, 10, 1e-3, 0.01);
  memory.insert({1.0});
  memory.insert({2.0});
  memory.pseudo_count_reward({1.5});
  REQUIRE(memory.size() == 2);
  memory.reset();
  REQUIRE(memory.size() == 0);
  // After the reset the memory behaves exactly like a fresh one.
  EpisodicMemory fresh(2, 10, 1e-3, 0.01);
  memory.insert({3.0});
  fresh.insert({3.0});
  REQUIRE(memory.pseudo_count_reward({3.0}) == fresh.pseudo_count_reward({3.0}));
}

TEST_CASE("capacity evicts in ring-buffer order") {
  EpisodicMemory memory(1, 2, 1e-3, 0.0);
  memory.insert({0.0});
  memory.insert({1.0});
  memory.insert({2.0});  // evicts {0.0}
  REQUIRE(memory.size() == 2);
  // {0.0} gone: a query at 0 no longer sees an exact duplicate.
  const double reward = memory.pseudo_count_reward({0.0});
  REQUIRE(reward > 1.0);
}
