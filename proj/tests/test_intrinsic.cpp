#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rlex/core_mdp.hpp"
#include "rlex/intrinsic.hpp"
#include "rlex/rng.hpp"

using rlex::IntrinsicConfig;
using rlex::IntrinsicKind;
using rlex::LinearRnd;
using rlex::PointSet;
using rlex::PseudoCountModel;
using rlex::RenyiOrder;

namespace {

PointSet line_points(std::initializer_list<double> xs) {
  PointSet ps(xs.size(), 1);
  std::size_t i = 0;
  for (double x : xs) ps.point(i++)[0] = x;
  return ps;
}

}  // namespace

TEST_CASE("rise reward arithmetic") {
  const PointSet neighbors = line_points({0.0, 0.0, 0.0});
  REQUIRE(rlex::rise_reward({0.0}, neighbors, RenyiOrder(0.5), 2) == 0.0);
  REQUIRE(rlex::rise_reward({4.0}, neighbors, RenyiOrder(0.5), 2) == Catch::Approx(2.0).margin(1e-12));
  REQUIRE_THROWS_AS(rlex::rise_reward({1.0}, neighbors, RenyiOrder(0.5), 4), std::invalid_argument);
  REQUIRE_THROWS_AS(rlex::rise_reward({1.0}, neighbors, RenyiOrder(2.0), 2), std::invalid_argument);
}

TEST_CASE("rise reward monotonicity in distance and order") {
  const PointSet origin = line_points({0.0});
  double prev = -1.0;
  for (double d : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const double r = rlex::rise_reward({d}, origin, RenyiOrder(0.3), 1);
    REQUIRE(r > prev);
    prev = r;
  }
  // d^(1-alpha) rises with alpha below distance one, falls above it.
  const double near_lo = rlex::rise_reward({0.5}, origin, RenyiOrder(0.2), 1);
  const double near_hi = rlex::rise_reward({0.5}, origin, RenyiOrder(0.8), 1);
  REQUIRE(near_hi > near_lo);
  const double far_lo = rlex::rise_reward({3.0}, origin, RenyiOrder(0.2), 1);
  const double far_hi = rlex::rise_reward({3.0}, origin, RenyiOrder(0.8), 1);
  REQUIRE(far_hi < far_lo);
}

TEST_CASE("re3 reward follows log(distance + 1)") {
  const PointSet origin = line_points({0.0});
  REQUIRE(rlex::re3_reward({0.0}, origin, 1) == 0.0);
  REQUIRE(rlex::re3_reward({std::exp(1.0) - 1.0}, origin, 1) == Catch::Approx(1.0).margin(1e-12));
  double prev = -1.0;
  for (double d : {0.1, 0.4, 1.5, 9.0}) {
    const double r = rlex::re3_reward({d}, origin, 1);
    REQUIRE(r > prev);
    prev = r;
  }
}

TEST_CASE("rise and re3 induce the same novelty ordering") {
  rlex::Rng rng(3);
  PointSet batch(40, 3);
  for (double& v : batch.data) v = rng.uniform(-2.0, 2.0);
  const auto dists = rlex::kth_neighbor_distances(batch, 4);
  std::vector<double> rise(40);
  std::vector<double> re3(40);
  for (int i = 0; i < 40; ++i) {
    rise[i] = std::pow(dists[i], 1.0 - 0.3);
    re3[i] = std::log1p(dists[i]);
  }
  std::vector<int> order_a(40);
  std::vector<int> order_b(40);
  std::iota(order_a.begin(), order_a.end(), 0);
  std::iota(order_b.begin(), order_b.end(), 0);
  std::sort(order_a.begin(), order_a.end(), [&](int a, int b) { return rise[a] < rise[b]; });
  std::sort(order_b.begin(), order_b.end(), [&](int a, int b) { return re3[a] < re3[b]; });
  REQUIRE(order_a == order_b);
}

TEST_CASE("pseudo-count arithmetic on the worked densities") {
  const rlex::PseudoCountResult res = rlex::pseudo_count_from_densities(0.1, 0.12);
  REQUIRE(res.pseudo_count == Catch::Approx(4.4).margin(1e-12));
  REQUIRE(res.reward == Catch::Approx(std::sqrt(1.0 / 4.4)).margin(1e-12));
  REQUIRE(res.pg_approximation == Catch::Approx(5.0).margin(1e-12));
  REQUIRE(res.prediction_gain == Catch::Approx(std::log(0.12 / 0.1)).margin(1e-15));
}

TEST_CASE("dirichlet density model is a valid learning-positive distribution") {
  PseudoCountModel model(4, 0.01);
  rlex::Rng rng(5);
  for (int t = 0; t < 500; ++t) {
    const int s = rng.uniform_int(4);
    const rlex::PseudoCountResult res = rlex::pseudo_count_reward(model, s);
    REQUIRE(res.pseudo_count > 0.0);
    REQUIRE(res.reward > 0.0);
    model.observe(s);
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
      REQUIRE(model.density(i) > 0.0);
      total += model.density(i);
    }
    REQUIRE(total == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("pseudo-count recovers true visit counts as smoothing vanishes") {
  PseudoCountModel model(3, 1e-6);
  for (int i = 0; i < 100; ++i) model.observe(0);
  for (int i = 0; i < 57; ++i) model.observe(1);
  const double n0 = rlex::pseudo_count_reward(model, 0).pseudo_count;
  REQUIRE(std::fabs(n0 - 100.0) / 100.0 <= 0.01);
}

TEST_CASE("pseudo-count grows strictly with repeated observations") {
  PseudoCountModel model(5, 0.01);
  double prev = 0.0;
  for (int t = 0; t < 50; ++t) {
    model.observe(2);
    const double n = rlex::pseudo_count_reward(model, 2).pseudo_count;
    REQUIRE(n > prev);
    prev = n;
  }
}

TEST_CASE("linear distillation basics") {
  LinearRnd rnd(6, 4, 11, 0.05);
  const std::vector<double> x{1.0, -0.5, 0.25, 0.0, 2.0, -1.0};
  LinearRnd matched = rnd;
  matched.copy_target_into_predictor();
  REQUIRE(matched.reward(x) == 0.0);

  const double initial = rnd.reward(x);
  REQUIRE(initial > 0.0);
  for (int i = 0; i < 1000; ++i) rnd.train(x);
  REQUIRE(rnd.reward(x) < 0.01 * initial);
}

TEST_CASE("training leaves orthogonal inputs untouched") {
  LinearRnd rnd(4, 3, 13, 0.05);
  std::vector<double> e0{1.0, 0.0, 0.0, 0.0};
  std::vector<double> e1{0.0, 1.0, 0.0, 0.0};
  const double before = rnd.reward(e1);
  for (int i = 0; i < 500; ++i) rnd.train(e0);
  REQUIRE(rnd.reward(e1) == Catch::Approx(before).margin(1e-12));
  REQUIRE(rnd.reward(e1) >= 0.5 * before);
}

TEST_CASE("never-give-up mixing clamps the lifelong factor") {
  REQUIRE(rlex::ngu_mixed_reward(0.7, 0.2, 5.0) == Catch::Approx(0.7));
  REQUIRE(rlex::ngu_mixed_reward(0.7, 9.0, 5.0) == Catch::Approx(3.5));
  REQUIRE(rlex::ngu_mixed_reward(0.5, 2.0, 5.0) == Catch::Approx(1.0));
  REQUIRE_THROWS_AS(rlex::ngu_mixed_reward(0.5, 2.0, 0.5), std::invalid_argument);
}

TEST_CASE("impact reward arithmetic") {
  REQUIRE(rlex::ride_reward({1.0, 2.0}, {1.0, 2.0}, 3) == 0.0);
  REQUIRE(rlex::ride_reward({0.0, 0.0}, {2.0, 0.0}, 4) == Catch::Approx(1.0));
  REQUIRE_THROWS_AS(rlex::ride_reward({0.0}, {1.0}, 0), std::invalid_argument);
  // Quadrupling the count halves the reward.
  const double r1 = rlex::ride_reward({0.0}, {1.0}, 2);
  const double r4 = rlex::ride_reward({0.0}, {1.0}, 8);
  REQUIRE(r1 / r4 == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("potential shaping identities") {
  const std::vector<double> constant(4, 3.0);
  REQUIRE(rlex::pbrs_shaping(constant, 0, 2, 1.0) == 0.0);
  REQUIRE(rlex::pbrs_shaping(constant, 0, 2, 0.9) == Catch::Approx((0.9 - 1.0) * 3.0));

  // Manhattan potential on a 3x3 grid with the goal in a corner.
  std::vector<std::pair<int, int>> cells;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) cells.emplace_back(r, c);
  const std::vector<double> phi = rlex::manhattan_potential(cells, {2, 2});
  const int center = 4;   // (1,1)
  const int closer = 5;   // (1,2)
  const int farther = 1;  // (0,1)
  REQUIRE(rlex::pbrs_shaping(phi, center, closer, 1.0) == Catch::Approx(1.0));
  REQUIRE(rlex::pbrs_shaping(phi, center, farther, 1.0) == Catch::Approx(-1.0));

  // Telescoping along any trajectory at gamma = 1.
  rlex::Rng rng(7);
  std::vector<int> path{0};
  for (int t = 0; t < 30; ++t) path.push_back(rng.uniform_int(9));
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < path.size(); ++t)
    total += rlex::pbrs_shaping(phi, path[t], path[t + 1], 1.0);
  REQUIRE(total == Catch::Approx(phi[path.back()] - phi[path.front()]).margin(1e-12));
}

TEST_CASE("optimal policies survive potential-based shaping") {
  rlex::Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 5;
    const int actions = 2;
    rlex::TabularMdp mdp(n, actions, 0.9);
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < actions; ++a) {
        std::vector<double> row(n);
        double total = 0.0;
        for (int s2 = 0; s2 < n; ++s2) {
          row[s2] = -std::log(1.0 - rng.next_double());
          total += row[s2];
        }
        for (int s2 = 0; s2 < n; ++s2) mdp.t(s, a, s2) = row[s2] / total;
        mdp.r(s, a) = rng.uniform(-1.0, 1.0);
      }
    }
    mdp.initial_dist.assign(n, 1.0 / n);

    std::vector<double> phi(n);
    for (double& p : phi) p = rng.uniform(-3.0, 3.0);
    rlex::TabularMdp shaped = mdp;
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < actions; ++a) {
        double expected_next_potential = 0.0;
        for (int s2 = 0; s2 < n; ++s2) expected_next_potential += mdp.t(s, a, s2) * phi[s2];
        shaped.r(s, a) += mdp.discount * expected_next_potential - phi[s];
      }
    }

    // Exhaustive deterministic-policy enumeration under both rewards.
    const int policy_count = 1 << n;  // actions == 2
    std::vector<std::vector<double>> value_base;
    std::vector<std::vector<double>> value_shaped;
    for (int code = 0; code < policy_count; ++code) {
      rlex::TabularPolicy pi(n, actions);
      for (int s = 0; s < n; ++s) pi.p(s, (code >> s) & 1) = 1.0;
      value_base.push_back(rlex::policy_evaluation_exact(mdp, pi).v);
      value_shaped.push_back(rlex::policy_evaluation_exact(shaped, pi).v);
    }
    const auto optimal_set = [n, policy_count](const std::vector<std::vector<double>>& values) {
      std::vector<int> best;
      for (int code = 0; code < policy_count; ++code) {
        bool dominant = true;
        for (int other = 0; other < policy_count && dominant; ++other) {
          for (int s = 0; s < n; ++s) {
            if (values[code][s] < values[other][s] - 1e-8) {
              dominant = false;
              break;
            }
          }
        }
        if (dominant) best.push_back(code);
      }
      return best;
    };
    REQUIRE(optimal_set(value_base) == optimal_set(value_shaped));
  }
}

TEST_CASE("decay schedule") {
  REQUIRE(rlex::decay_coefficient(0.1, 1e-5, 0) == Catch::Approx(0.1));
  REQUIRE(rlex::decay_coefficient(0.25, 0.0, 100000) == Catch::Approx(0.25));
  REQUIRE(rlex::decay_coefficient(0.1, 1e-5, 100000) ==
          Catch::Approx(0.036787760176824655).epsilon(1e-12));
  REQUIRE_THROWS_AS(rlex::decay_coefficient(0.1, 1.0, 10), std::invalid_argument);
}

TEST_CASE("total reward composition") {
  REQUIRE(rlex::compose_total_reward(1.5, 7.0, 0.0, 0.0, {1.0}) == Catch::Approx(1.5));
  REQUIRE(rlex::compose_total_reward(1.0, 2.0, 0.1, 0.01, {0.25, 0.25, 0.25, 0.25}) ==
          Catch::Approx(1.213862943611199).margin(1e-12));
  REQUIRE(rlex::compose_total_reward(1.0, 2.0, 0.1, 0.5, {0.0, 1.0, 0.0}) == Catch::Approx(1.2));
}

TEST_CASE("reward generators produce finite non-negative values") {
  IntrinsicConfig config;
  config.k = 2;
  std::vector<std::vector<double>> embeddings;
  for (int s = 0; s < 12; ++s) embeddings.push_back({static_cast<double>(s % 4), static_cast<double>(s / 4)});
  rlex::Rng rng(23);
  for (IntrinsicKind kind : {IntrinsicKind::kRise, IntrinsicKind::kRe3, IntrinsicKind::kPseudoCount,
                             IntrinsicKind::kRnd, IntrinsicKind::kNgu, IntrinsicKind::kRide}) {
    rlex::RewardGenerator gen(kind, config, embeddings, 5);
    for (int episode = 0; episode < 3; ++episode) {
      int state = 0;
      gen.begin_episode(state);
      for (int t = 0; t < 50; ++t) {
        const int next = rng.uniform_int(12);
        const double bonus = gen.transition_bonus(state, next);
        REQUIRE(std::isfinite(bonus));
        REQUIRE(bonus >= 0.0);
        state = next;
      }
    }
  }
}

TEST_CASE("episode novelty matches a brute-force k-NN over the trajectory") {
  IntrinsicConfig config;
  config.k = 3;
  config.alpha = 0.4;
  std::vector<std::vector<double>> embeddings;
  for (int s = 0; s < 9; ++s)
    embeddings.push_back({static_cast<double>(s % 3), static_cast<double>(s / 3)});
  rlex::RewardGenerator gen(IntrinsicKind::kRise, config, embeddings, 1);

  rlex::Rng rng(29);
  int state = 4;
  gen.begin_episode(state);
  std::vector<int> buffer{state};
  for (int t = 0; t < 200; ++t) {
    const int next = rng.uniform_int(9);
    const double bonus = gen.transition_bonus(state, next);

    double expected = 0.0;
    if (static_cast<int>(buffer.size()) >= config.k) {
      std::vector<double> dists;
      for (int s : buffer) dists.push_back(rlex::euclidean_distance(embeddings[s], embeddings[next]));
      std::sort(dists.begin(), dists.end());
      const double dk = dists[config.k - 1];
      expected = dk <= 1e-12 ? 0.0 : std::pow(dk, 1.0 - config.alpha);
    }
    REQUIRE(bonus == Catch::Approx(expected).margin(1e-12));
    buffer.push_back(next);
    state = next;
  }
}

TEST_CASE("generator names resolve and reject unknowns") {
  REQUIRE(rlex::intrinsic_kind_from_string("rise") == IntrinsicKind::kRise);
  REQUIRE(rlex::intrinsic_kind_from_string("none") == IntrinsicKind::kNone);
  REQUIRE(rlex::to_string(IntrinsicKind::kPseudoCount) == "pseudo_count");
  REQUIRE_THROWS_WITH(rlex::intrinsic_kind_from_string("surprise"),
                      Catch::Matchers::ContainsSubstring("valid names"));
}
