#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <deque>
#include <set>
#include <vector>

#include "rlex/envs.hpp"
#include "rlex/rng.hpp"

using rlex::build_gridworld;
using rlex::build_maze;
using rlex::CompiledGridEnv;
using rlex::EnvState;
using rlex::generate_maze_spec;
using rlex::MazeSpec;

namespace {

MazeSpec corridor(int length) {
  MazeSpec spec;
  spec.rows = 1;
  spec.cols = length;
  spec.walls.assign(length, 0);
  spec.start_cell = 0;
  spec.goal_cell = length - 1;
  return spec;
}

// Breadth-first shortest path over the compiled transition graph.
int bfs_steps(const CompiledGridEnv& env, int from, int to) {
  std::vector<int> dist(env.mdp.n_states, -1);
  std::deque<int> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int a = 0; a < env.mdp.n_actions; ++a) {
      for (int v = 0; v < env.mdp.n_states; ++v) {
        if (env.mdp.t(u, a, v) > 0.0 && dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
  }
  return dist[to];
}

}  // namespace

TEST_CASE("smallest corridor compiles to two states") {
  const CompiledGridEnv env = build_maze(corridor(2), 0.99);
  REQUIRE(env.mdp.n_states == 2);
  REQUIRE(env.mdp.terminal[env.goal_state] == 1);
  // Action "right" from the start reaches the terminal goal in one step.
  REQUIRE(env.mdp.t(env.start_state, rlex::kRight, env.goal_state) == 1.0);
  REQUIRE(env.mdp.r(env.start_state, rlex::kRight) == -1.0);
  // Bumping the left wall keeps position.
  REQUIRE(env.mdp.t(env.start_state, rlex::kLeft, env.start_state) == 1.0);
}

TEST_CASE("entering a portal cell relocates to its twin") {
  MazeSpec spec = corridor(5);
  spec.portal_pairs = {{1, 3}};
  const CompiledGridEnv env = build_maze(spec, 0.99);
  const int s0 = env.cell_state[0];
  const int s3 = env.cell_state[3];
  const int s1 = env.cell_state[1];
  // Stepping right from cell 0 onto portal cell 1 lands on cell 3.
  REQUIRE(env.mdp.t(s0, rlex::kRight, s3) == 1.0);
  // Stepping left from cell 2 onto portal cell 1 also lands on cell 3.
  const int s2 = env.cell_state[2];
  REQUIRE(env.mdp.t(s2, rlex::kLeft, s3) == 1.0);
  // Standing on the portal cell and bumping a wall stays put.
  REQUIRE(env.mdp.t(s1, rlex::kUp, s1) == 1.0);
  // Portal transitions keep rows stochastic.
  env.mdp.validate();
}

TEST_CASE("generated maze state count matches a flood fill of its free cells") {
  const MazeSpec spec = generate_maze_spec(10, 7);
  const CompiledGridEnv env = build_maze(spec, 0.99);
  int free_cells = 0;
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      if (!spec.wall(r, c)) ++free_cells;
    }
  }
  REQUIRE(env.mdp.n_states == free_cells);
  env.mdp.validate();
}

TEST_CASE("maze generation is a pure function of its inputs") {
  const MazeSpec a = generate_maze_spec(10, 123);
  const MazeSpec b = generate_maze_spec(10, 123);
  REQUIRE(a.walls == b.walls);
  REQUIRE(a.portal_pairs == b.portal_pairs);
  REQUIRE(a.start_cell == b.start_cell);
  const CompiledGridEnv ea = build_maze(a, 0.99);
  const CompiledGridEnv eb = build_maze(b, 0.99);
  REQUIRE(ea.mdp.transition == eb.mdp.transition);
  REQUIRE(ea.mdp.reward == eb.mdp.reward);
}

TEST_CASE("every state of a generated maze is reachable without crossing the goal") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MazeSpec spec = generate_maze_spec(10, seed);
    const CompiledGridEnv env = build_maze(spec, 0.99);
    std::vector<std::uint8_t> seen(env.mdp.n_states, 0);
    std::deque<int> queue{env.start_state};
    seen[env.start_state] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      if (env.mdp.terminal[u]) continue;
      for (int a = 0; a < env.mdp.n_actions; ++a) {
        for (int v = 0; v < env.mdp.n_states; ++v) {
          if (env.mdp.t(u, a, v) > 0.0 && !seen[v]) {
            seen[v] = 1;
            queue.push_back(v);
          }
        }
      }
    }
    for (std::uint8_t s : seen) REQUIRE(s == 1);
  }
}

TEST_CASE("gridworld basics") {
  const CompiledGridEnv tiny = build_gridworld(2, 0.99);
  REQUIRE(tiny.mdp.n_states == 4);
  REQUIRE(bfs_steps(tiny, tiny.start_state, tiny.goal_state) == 2);

  const CompiledGridEnv env = build_gridworld(10, 0.9999);
  REQUIRE(bfs_steps(env, env.start_state, env.goal_state) == 18);
  // Optimal return from the corner approximates -(Manhattan distance) as the
  // discount approaches one.
  const rlex::ValueTables tables = rlex::value_iteration(env.mdp, 1e-10);
  REQUIRE(tables.v[env.start_state] == Catch::Approx(-18.0).margin(0.05));
  REQUIRE_THROWS_AS(build_gridworld(1), std::invalid_argument);
}

TEST_CASE("stepping follows deterministic rows regardless of the rng") {
  const CompiledGridEnv env = build_maze(corridor(3), 0.99);
  for (std::uint64_t seed : {1ULL, 99ULL}) {
    rlex::Rng rng(seed);
    EnvState state(&env.mdp);
    state.reset_to(env.start_state);
    const rlex::StepResult step = state.step(rlex::kRight, rng);
    REQUIRE(step.next_state == env.cell_state[1]);
    REQUIRE(!step.done);
  }
}

TEST_CASE("step sequences are reproducible per seed") {
  rlex::TabularMdp mdp(2, 1, 0.9);
  mdp.t(0, 0, 0) = 0.5;
  mdp.t(0, 0, 1) = 0.5;
  mdp.t(1, 0, 0) = 0.5;
  mdp.t(1, 0, 1) = 0.5;
  mdp.initial_dist = {1.0, 0.0};
  std::vector<int> first;
  for (int rep = 0; rep < 2; ++rep) {
    rlex::Rng rng(77);
    EnvState state(&mdp);
    state.reset_to(0);
    std::vector<int> visited;
    for (int t = 0; t < 50; ++t) visited.push_back(state.step(0, rng).next_state);
    if (rep == 0) {
      first = visited;
    } else {
      REQUIRE(first == visited);
    }
  }
}

TEST_CASE("empirical transition frequencies match the row") {
  rlex::TabularMdp mdp(2, 1, 0.9);
  mdp.t(0, 0, 0) = 0.3;
  mdp.t(0, 0, 1) = 0.7;
  mdp.t(1, 0, 0) = 1.0;
  mdp.initial_dist = {1.0, 0.0};
  rlex::Rng rng(5);
  EnvState state(&mdp);
  int to_one = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    state.reset_to(0);
    to_one += state.step(0, rng).next_state;
  }
  REQUIRE(std::fabs(to_one / static_cast<double>(n) - 0.7) < 0.01);
}

TEST_CASE("stepping a terminated episode is a contract violation") {
  const CompiledGridEnv env = build_maze(corridor(2), 0.99);
  rlex::Rng rng(1);
  EnvState state(&env.mdp);
  state.reset_to(env.start_state);
  state.step(rlex::kRight, rng);
  REQUIRE(state.done());
  REQUIRE_THROWS_AS(state.step(rlex::kRight, rng), std::logic_error);
}

TEST_CASE("maze art marks walls, start, goal and portal letters") {
  MazeSpec spec = corridor(5);
  spec.portal_pairs = {{1, 3}};
  const std::string art = rlex::maze_to_text(spec);
  REQUIRE(art == "Sa.aG\n");
  const MazeSpec generated = generate_maze_spec(10, 3);
  const std::string big = rlex::maze_to_text(generated);
  REQUIRE(big.find('S') != std::string::npos);
  REQUIRE(big.find('G') != std::string::npos);
  REQUIRE(std::count(big.begin(), big.end(), 'a') == 2);
  REQUIRE(std::count(big.begin(), big.end(), 'b') == 2);
  REQUIRE(std::count(big.begin(), big.end(), '\n') == generated.rows);
}

TEST_CASE("coverage needs at least states-minus-one steps on an open grid") {
  const CompiledGridEnv env = build_gridworld(5, 0.99);
  rlex::Rng rng(9);
  rlex::CoverageCounter coverage(env.mdp.n_states);
  EnvState state(&env.mdp);
  state.reset_to(env.start_state);
  coverage.visit(state.state());
  while (!coverage.complete()) {
    if (state.done()) state.reset_to(env.start_state);
    const rlex::StepResult step = state.step(rng.uniform_int(4), rng);
    coverage.count_step();
    coverage.visit(step.next_state);
  }
  REQUIRE(coverage.steps_taken() >= env.mdp.n_states - 1);
  REQUIRE(coverage.completion_step() == coverage.steps_taken());
}

TEST_CASE("spec validation rejects malformed mazes") {
  MazeSpec spec = corridor(3);
  spec.goal_cell = 0;  // equals start
  REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);

  MazeSpec blocked = corridor(3);
  blocked.walls[1] = 1;  // goal unreachable
  REQUIRE_THROWS_AS(blocked.validate(), std::invalid_argument);

  MazeSpec portal_on_start = corridor(4);
  portal_on_start.portal_pairs = {{0, 2}};
  REQUIRE_THROWS_AS(portal_on_start.validate(), std::invalid_argument);
}
