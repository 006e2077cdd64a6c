#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rlex/core_mdp.hpp"
#include "rlex/rng.hpp"

namespace rlex {

// Actions of the grid environments, in index order.
enum GridAction { kLeft = 0, kRight = 1, kUp = 2, kDown = 3 };
inline constexpr int kGridActionCount = 4;

/// Reward scheme of a compiled grid environment. The default charges -1 per
/// step with a zero-reward absorbing goal; the sparse variant pays the goal
/// and charges a small per-step cost scaled by the grid area.
struct GridRewardScheme {
  double step_reward = -1.0;
  double goal_reward = 0.0;

  static GridRewardScheme unit_cost() { return {-1.0, 0.0}; }
  static GridRewardScheme sparse(int rows, int cols) {
    return {-0.1 / (static_cast<double>(rows) * cols), 1.0};
  }
};

/// Maze description on a cell grid: wall cells, teleport pairs, start and
/// goal. The grid may be rectangular so that tiny corridor fixtures are
/// expressible; generated mazes are square.
struct MazeSpec {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> walls;              // rows * cols
  std::vector<std::pair<int, int>> portal_pairs;  // cell index pairs
  int start_cell = 0;
  int goal_cell = 0;
  std::uint64_t seed = 0;

  int cell(int r, int c) const { return r * cols + c; }
  bool wall(int r, int c) const { return walls[static_cast<std::size_t>(r) * cols + c] != 0; }

  void validate() const {
    if (rows < 1 || cols < 1) throw std::invalid_argument("maze spec: empty grid");
    if (walls.size() != static_cast<std::size_t>(rows) * cols)
      throw std::invalid_argument("maze spec: wall table shape mismatch");
    if (start_cell == goal_cell) throw std::invalid_argument("maze spec: start equals goal");
    auto check_cell = [&](int c, const char* what) {
      if (c < 0 || c >= rows * cols) throw std::invalid_argument(std::string("maze spec: ") + what + " out of range");
      if (walls[c]) throw std::invalid_argument(std::string("maze spec: ") + what + " on a wall cell");
    };
    check_cell(start_cell, "start");
    check_cell(goal_cell, "goal");
    std::vector<std::uint8_t> is_portal(walls.size(), 0);
    for (const auto& [a, b] : portal_pairs) {
      if (a == b) throw std::invalid_argument("maze spec: portal pairs must join distinct cells");
      check_cell(a, "portal");
      check_cell(b, "portal");
      if (a == start_cell || b == start_cell || a == goal_cell || b == goal_cell)
        throw std::invalid_argument("maze spec: portals may not sit on start or goal");
      if (is_portal[a] || is_portal[b]) throw std::invalid_argument("maze spec: portal cells must be distinct");
      is_portal[a] = is_portal[b] = 1;
    }
    // Flood fill over cell adjacency: the goal must be reachable from start.
    std::vector<std::uint8_t> seen(walls.size(), 0);
    std::deque<int> queue{start_cell};
    seen[start_cell] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      const int r = u / cols;
      const int c = u % cols;
      const int dr[4] = {0, 0, -1, 1};
      const int dc[4] = {-1, 1, 0, 0};
      for (int i = 0; i < 4; ++i) {
        const int nr = r + dr[i];
        const int nc = c + dc[i];
        if (nr < 0 || nr >= rows || nc < 0 || nc >= cols || wall(nr, nc)) continue;
        const int v = cell(nr, nc);
        if (!seen[v]) {
          seen[v] = 1;
          queue.push_back(v);
        }
      }
    }
    if (!seen[goal_cell]) throw std::invalid_argument("maze spec: goal not reachable from start");
  }
};

/// A compiled grid environment: the MDP plus the cell geometry behind each
/// state index.
struct CompiledGridEnv {
  TabularMdp mdp;
  std::vector<std::pair<int, int>> state_cells;  // state -> (row, col)
  std::vector<int> cell_state;                   // cell -> state index or -1
  int start_state = 0;
  int goal_state = 0;
  int rows = 0;
  int cols = 0;
  std::int64_t episode_step_cap = 0;  // 10 * rows * cols by default
};

/// Compiles a maze spec to a tabular MDP: one state per non-wall cell, four
/// deterministic actions, wall bumps keep position, entering a portal cell
/// relocates to its twin, the goal is absorbing.
inline CompiledGridEnv build_maze(const MazeSpec& spec, double gamma = 0.99,
                                  GridRewardScheme rewards = GridRewardScheme::unit_cost()) {
  spec.validate();
  CompiledGridEnv env;
  env.rows = spec.rows;
  env.cols = spec.cols;
  env.cell_state.assign(static_cast<std::size_t>(spec.rows) * spec.cols, -1);
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      if (spec.wall(r, c)) continue;
      env.cell_state[spec.cell(r, c)] = static_cast<int>(env.state_cells.size());
      env.state_cells.emplace_back(r, c);
    }
  }
  const int n = static_cast<int>(env.state_cells.size());
  std::vector<int> portal_twin(static_cast<std::size_t>(spec.rows) * spec.cols, -1);
  for (const auto& [a, b] : spec.portal_pairs) {
    portal_twin[a] = b;
    portal_twin[b] = a;
  }
  env.mdp = TabularMdp(n, kGridActionCount, gamma);
  env.start_state = env.cell_state[spec.start_cell];
  env.goal_state = env.cell_state[spec.goal_cell];
  const int dr[4] = {0, 0, -1, 1};  // left, right, up, down
  const int dc[4] = {-1, 1, 0, 0};
  for (int s = 0; s < n; ++s) {
    const auto [r, c] = env.state_cells[s];
    for (int a = 0; a < kGridActionCount; ++a) {
      int nr = r + dr[a];
      int nc = c + dc[a];
      if (nr < 0 || nr >= spec.rows || nc < 0 || nc >= spec.cols || spec.wall(nr, nc)) {
        nr = r;
        nc = c;
      }
      int dest = spec.cell(nr, nc);
      if (dest != spec.cell(r, c) && portal_twin[dest] >= 0) dest = portal_twin[dest];
      const int s2 = env.cell_state[dest];
      env.mdp.t(s, a, s2) = 1.0;
      // Every step charges the step reward; landing on the goal adds its
      // bonus on top (zero under the unit-cost scheme).
      env.mdp.r(s, a) = rewards.step_reward + (s2 == env.goal_state ? rewards.goal_reward : 0.0);
    }
  }
  env.mdp.mark_terminal(env.goal_state);
  env.mdp.initial_dist.assign(n, 0.0);
  env.mdp.initial_dist[env.start_state] = 1.0;
  env.episode_step_cap = 10LL * spec.rows * spec.cols;
  env.mdp.validate();
  return env;
}

namespace detail {

// Every state must be reachable from the start without passing through the
// absorbing goal, otherwise full coverage is impossible.
inline bool all_states_coverable(const CompiledGridEnv& env) {
  const int n = env.mdp.n_states;
  std::vector<std::uint8_t> seen(n, 0);
  std::deque<int> queue{env.start_state};
  seen[env.start_state] = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (env.mdp.terminal[u]) continue;
    for (int a = 0; a < env.mdp.n_actions; ++a) {
      for (int v = 0; v < n; ++v) {
        if (env.mdp.t(u, a, v) > 0.0 && !seen[v]) {
          seen[v] = 1;
          queue.push_back(v);
        }
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](std::uint8_t x) { return x != 0; });
}

}  // namespace detail

/// Generates a maze by recursive backtracking over the odd-coordinate room
/// grid, then places random portal pairs. Candidate mazes whose compiled
/// transition graph cannot reach every state from the start (the goal is
/// absorbing, so corridors behind it are dead) are rejected and regenerated
/// with the next seed; gives up after 100 attempts.
inline MazeSpec generate_maze_spec(int size, std::uint64_t seed, int portal_pairs = 2) {
  if (size < 5) throw std::invalid_argument("generate_maze_spec: size must be >= 5");
  if (portal_pairs < 0) throw std::invalid_argument("generate_maze_spec: portal pairs must be >= 0");
  for (int attempt = 0; attempt < 100; ++attempt) {
    const std::uint64_t attempt_seed = seed + static_cast<std::uint64_t>(attempt);
    Rng rng(attempt_seed);
    MazeSpec spec;
    spec.rows = spec.cols = size;
    spec.seed = attempt_seed;
    spec.walls.assign(static_cast<std::size_t>(size) * size, 1);

    std::vector<std::pair<int, int>> rooms;
    for (int r = 1; r + 1 < size; r += 2)
      for (int c = 1; c + 1 < size; c += 2) rooms.emplace_back(r, c);
    if (rooms.size() < 2) throw std::invalid_argument("generate_maze_spec: size too small for two rooms");
    for (const auto& [r, c] : rooms) spec.walls[spec.cell(r, c)] = 0;

    // Iterative recursive-backtracker over rooms; carving opens the wall
    // cell between adjacent rooms.
    std::vector<std::uint8_t> visited(rooms.size(), 0);
    auto room_index = [&](int r, int c) -> int {
      if (r < 1 || r + 1 >= size || c < 1 || c + 1 >= size || (r % 2) == 0 || (c % 2) == 0) return -1;
      const int per_row = (size - 1) / 2;
      return (r - 1) / 2 * per_row + (c - 1) / 2;
    };
    std::vector<int> stack{0};
    visited[0] = 1;
    while (!stack.empty()) {
      const auto [r, c] = rooms[stack.back()];
      int options[4];
      int option_count = 0;
      const int dr[4] = {0, 0, -2, 2};
      const int dc[4] = {-2, 2, 0, 0};
      for (int i = 0; i < 4; ++i) {
        const int ri = room_index(r + dr[i], c + dc[i]);
        if (ri >= 0 && !visited[ri]) options[option_count++] = i;
      }
      if (option_count == 0) {
        stack.pop_back();
        continue;
      }
      const int pick = options[rng.uniform_int(option_count)];
      const int nr = r + dr[pick];
      const int nc = c + dc[pick];
      spec.walls[spec.cell((r + nr) / 2, (c + nc) / 2)] = 0;
      const int ri = room_index(nr, nc);
      visited[ri] = 1;
      stack.push_back(ri);
    }

    spec.start_cell = spec.cell(rooms.front().first, rooms.front().second);
    spec.goal_cell = spec.cell(rooms.back().first, rooms.back().second);

    std::vector<int> free_cells;
    for (int cellid = 0; cellid < size * size; ++cellid) {
      if (!spec.walls[cellid] && cellid != spec.start_cell && cellid != spec.goal_cell)
        free_cells.push_back(cellid);
    }
    if (static_cast<int>(free_cells.size()) < 2 * portal_pairs) continue;
    for (std::size_t i = free_cells.size(); i > 1; --i)
      std::swap(free_cells[i - 1], free_cells[rng.uniform_int(static_cast<int>(i))]);
    for (int p = 0; p < portal_pairs; ++p)
      spec.portal_pairs.emplace_back(free_cells[2 * p], free_cells[2 * p + 1]);

    spec.validate();
    const CompiledGridEnv env = build_maze(spec);
    if (detail::all_states_coverable(env)) return spec;
  }
  throw std::runtime_error("generate_maze_spec: no coverable maze after 100 attempts");
}

/// Open M x M grid: four actions, -1 per step, absorbing goal in the
/// opposite corner from the start.
inline CompiledGridEnv build_gridworld(int size, double gamma = 0.99,
                                       GridRewardScheme rewards = GridRewardScheme::unit_cost()) {
  if (size < 2) throw std::invalid_argument("build_gridworld: size must be >= 2");
  MazeSpec spec;
  spec.rows = spec.cols = size;
  spec.walls.assign(static_cast<std::size_t>(size) * size, 0);
  spec.start_cell = spec.cell(0, 0);
  spec.goal_cell = spec.cell(size - 1, size - 1);
  return build_maze(spec, gamma, rewards);
}

/// Plain-text rendering: walls '#', start 'S', goal 'G', portal pairs share
/// a lower-case letter, free cells '.'.
inline std::string maze_to_text(const MazeSpec& spec) {
  std::string out;
  out.reserve(static_cast<std::size_t>(spec.rows) * (spec.cols + 1));
  std::vector<char> mark(static_cast<std::size_t>(spec.rows) * spec.cols, 0);
  char letter = 'a';
  for (const auto& [a, b] : spec.portal_pairs) {
    mark[a] = mark[b] = letter;
    if (letter < 'z') ++letter;
  }
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const int id = spec.cell(r, c);
      char ch = spec.wall(r, c) ? '#' : '.';
      if (id == spec.start_cell) ch = 'S';
      else if (id == spec.goal_cell) ch = 'G';
      else if (!spec.wall(r, c) && mark[id] != 0) ch = mark[id];
      out.push_back(ch);
    }
    out.push_back('\n');
  }
  return out;
}

/// Deterministic birth-death chain: action 0 moves left, action 1 moves
/// right, both saturating at the ends. No terminal states; the episode
/// starts at state 0. Rewards default to zero.
inline TabularMdp build_chain(int n_states, double gamma) {
  if (n_states < 1) throw std::invalid_argument("build_chain: need at least one state");
  TabularMdp mdp(n_states, 2, gamma);
  for (int s = 0; s < n_states; ++s) {
    const int left = std::max(0, s - 1);
    const int right = std::min(n_states - 1, s + 1);
    mdp.t(s, 0, left) = 1.0;
    mdp.t(s, 1, right) = 1.0;
  }
  mdp.initial_dist[0] = 1.0;
  mdp.validate();
  return mdp;
}

struct StepResult {
  int next_state = 0;
  double reward = 0.0;
  bool done = false;
};

/// Sampling interface over a tabular MDP with per-episode mutable state.
class EnvState {
 public:
  explicit EnvState(const TabularMdp* mdp) : mdp_(mdp) {
    if (mdp == nullptr) throw std::invalid_argument("env state: null mdp");
  }

  int reset(Rng& rng) {
    state_ = rng.categorical(mdp_->initial_dist);
    done_ = mdp_->terminal[state_] != 0;
    return state_;
  }

  int reset_to(int state) {
    state_ = state;
    done_ = mdp_->terminal[state_] != 0;
    return state_;
  }

  int state() const { return state_; }
  bool done() const { return done_; }

  StepResult step(int action, Rng& rng) {
    if (done_) throw std::logic_error("env state: stepping a terminated episode");
    if (action < 0 || action >= mdp_->n_actions) throw std::invalid_argument("env state: invalid action");
    const double* row =
        mdp_->transition.data() + (static_cast<std::size_t>(state_) * mdp_->n_actions + action) *
                                      mdp_->n_states;
    // Inverse-CDF draw over the transition row.
    double u = rng.next_double();
    int next = mdp_->n_states - 1;
    double acc = 0.0;
    for (int s2 = 0; s2 < mdp_->n_states; ++s2) {
      acc += row[s2];
      if (u < acc) {
        next = s2;
        break;
      }
    }
    StepResult result;
    result.reward = mdp_->r(state_, action);
    result.next_state = next;
    result.done = mdp_->terminal[next] != 0;
    state_ = next;
    done_ = result.done;
    return result;
  }

 private:
  const TabularMdp* mdp_;
  int state_ = 0;
  bool done_ = true;
};

/// Tracks which states have been visited and the step count at which the
/// last one was first seen.
class CoverageCounter {
 public:
  explicit CoverageCounter(int n_states) : visited_(n_states, 0) {}

  void visit(int state) {
    if (!visited_[state]) {
      visited_[state] = 1;
      ++visited_count_;
      if (complete()) completion_step_ = steps_taken_;
    }
  }

  void count_step() { ++steps_taken_; }

  bool complete() const { return visited_count_ == static_cast<int>(visited_.size()); }
  std::int64_t steps_taken() const { return steps_taken_; }
  // Step index at which coverage completed, -1 while incomplete.
  std::int64_t completion_step() const { return complete() ? completion_step_ : -1; }
  int visited_count() const { return visited_count_; }

 private:
  std::vector<std::uint8_t> visited_;
  int visited_count_ = 0;
  std::int64_t steps_taken_ = 0;
  std::int64_t completion_step_ = 0;
};

}  // namespace rlex
