#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rlex/core_mdp.hpp"
#include "rlex/envs.hpp"
#include "rlex/intrinsic.hpp"
#include "rlex/rng.hpp"

namespace rlex {

struct QLearningConfig {
  double step_size = 0.2;
  double epsilon = 0.001;
  bool epsilon_decay = false;  // epsilon_t = epsilon / sqrt(t) over global steps
  double gamma = 0.99;
};

struct EpisodeStats {
  std::int64_t steps = 0;
  double extrinsic_return = 0.0;
  double intrinsic_sum = 0.0;
  bool reached_terminal = false;
  bool truncated = false;  // hit the step cap
};

/// Tabular Q-learning with epsilon-greedy behaviour and an optional
/// intrinsic reward generator. The Q-table starts at zero; terminal states
/// are never written, so Q(terminal, .) stays zero.
class QLearningAgent {
 public:
  QLearningAgent(int n_states, int n_actions, QLearningConfig config)
      : n_states_(n_states),
        n_actions_(n_actions),
        config_(config),
        q_(static_cast<std::size_t>(n_states) * n_actions, 0.0) {}

  void attach_intrinsic(std::unique_ptr<RewardGenerator> generator, IntrinsicConfig config) {
    config.validate();
    intrinsic_ = std::move(generator);
    intrinsic_config_ = config;
  }

  double q(int s, int a) const { return q_[static_cast<std::size_t>(s) * n_actions_ + a]; }
  double& q(int s, int a) { return q_[static_cast<std::size_t>(s) * n_actions_ + a]; }
  const std::vector<double>& q_table() const { return q_; }
  std::uint64_t global_step() const { return global_step_; }

  int greedy_action(int s) const {
    return argmax_lowest_index(q_.data() + static_cast<std::size_t>(s) * n_actions_, n_actions_);
  }

  // With probability epsilon a uniform action (the greedy one included), so
  // the greedy arm carries probability 1 - eps + eps/|A|.
  int select_action(int s, Rng& rng) {
    double eps = config_.epsilon;
    if (config_.epsilon_decay) eps = config_.epsilon / std::sqrt(static_cast<double>(global_step_ + 1));
    if (rng.next_double() < eps) return rng.uniform_int(n_actions_);
    return greedy_action(s);
  }

  // One-cell update with the already-composed total reward; a terminal next
  // state contributes no bootstrap term.
  void update(int s, int a, double total_reward, int next_state, bool next_terminal) {
    double target = total_reward;
    if (!next_terminal) {
      const double* row = q_.data() + static_cast<std::size_t>(next_state) * n_actions_;
      target += config_.gamma * row[argmax_lowest_index(row, n_actions_)];
    }
    double& cell = q_[static_cast<std::size_t>(s) * n_actions_ + a];
    cell += config_.step_size * (target - cell);
  }

  // Action distribution of the current epsilon-greedy policy at s.
  std::vector<double> policy_row(int s) const {
    double eps = config_.epsilon;
    if (config_.epsilon_decay) eps = config_.epsilon / std::sqrt(static_cast<double>(global_step_ + 1));
    std::vector<double> row(n_actions_, eps / n_actions_);
    row[greedy_action(s)] += 1.0 - eps;
    return row;
  }

  /// Runs one episode: epsilon-greedy behaviour, per-step Q updates on the
  /// composed total reward, coverage accounting, truncation at `step_cap`.
  EpisodeStats run_episode(const TabularMdp& mdp, EnvState& env, Rng& rng, std::int64_t step_cap,
                           CoverageCounter* coverage = nullptr) {
    EpisodeStats stats;
    if (coverage != nullptr) coverage->visit(env.state());
    if (intrinsic_ != nullptr) intrinsic_->begin_episode(env.state());
    while (!env.done() && stats.steps < step_cap) {
      const int s = env.state();
      const int a = select_action(s, rng);
      const StepResult step = env.step(a, rng);
      ++global_step_;
      ++stats.steps;
      stats.extrinsic_return += step.reward;
      double total = step.reward;
      if (intrinsic_ != nullptr && intrinsic_->kind() != IntrinsicKind::kNone) {
        const double bonus = intrinsic_->transition_bonus(s, step.next_state);
        const double lambda =
            decay_coefficient(intrinsic_config_.lambda0, intrinsic_config_.kappa, global_step_);
        stats.intrinsic_sum += lambda * bonus;
        total = compose_total_reward(step.reward, bonus, lambda, intrinsic_config_.zeta,
                                     intrinsic_config_.zeta != 0.0 ? policy_row(s) : std::vector<double>{1.0});
      }
      update(s, a, total, step.next_state, step.done);
      if (coverage != nullptr) {
        coverage->count_step();
        coverage->visit(step.next_state);
      }
      if (step.done) {
        stats.reached_terminal = true;
        break;
      }
    }
    stats.truncated = !stats.reached_terminal;
    return stats;
  }

 private:
  int n_states_;
  int n_actions_;
  QLearningConfig config_;
  std::vector<double> q_;
  std::unique_ptr<RewardGenerator> intrinsic_;
  IntrinsicConfig intrinsic_config_;
  std::uint64_t global_step_ = 0;
};

struct SoftmaxPgConfig {
  double step_size = 0.1;
  double gamma = 0.99;
  double critic_step_size = 0.1;
};

/// Softmax-preference policy-gradient agent with a TD(0) value-table critic
/// and a clipped-surrogate update variant.
class SoftmaxPgAgent {
 public:
  SoftmaxPgAgent(int n_states, int n_actions, SoftmaxPgConfig config)
      : n_states_(n_states),
        n_actions_(n_actions),
        config_(config),
        preferences_(static_cast<std::size_t>(n_states) * n_actions, 0.0),
        values_(n_states, 0.0) {}

  TabularPolicy policy() const {
    return TabularPolicy::from_preferences(n_states_, n_actions_, preferences_);
  }

  double preference(int s, int a) const { return preferences_[static_cast<std::size_t>(s) * n_actions_ + a]; }
  std::vector<double>& preferences() { return preferences_; }
  const std::vector<double>& values() const { return values_; }

  std::vector<double> policy_row(int s) const {
    const double* h = preferences_.data() + static_cast<std::size_t>(s) * n_actions_;
    double hi = h[0];
    for (int a = 1; a < n_actions_; ++a) hi = std::max(hi, h[a]);
    std::vector<double> row(n_actions_);
    double total = 0.0;
    for (int a = 0; a < n_actions_; ++a) {
      row[a] = std::exp(h[a] - hi);
      total += row[a];
    }
    for (double& p : row) p /= total;
    return row;
  }

  int sample_action(int s, Rng& rng) {
    const std::vector<double> row = policy_row(s);
    return rng.categorical(row);
  }

  /// Monte-Carlo policy-gradient update over a complete episode:
  /// h(s,a) += step * gamma^t * G_t * (1{a = a_t} - pi(a | s_t)).
  void vpg_update(const Trajectory& trajectory) {
    std::vector<double> rewards;
    rewards.reserve(trajectory.steps.size());
    for (const Transition& tr : trajectory.steps) rewards.push_back(tr.extrinsic_reward);
    const std::vector<double> returns = discounted_returns(rewards, config_.gamma);
    double discount = 1.0;
    for (std::size_t t = 0; t < trajectory.steps.size(); ++t) {
      const Transition& tr = trajectory.steps[t];
      const std::vector<double> row = policy_row(tr.state);
      const double scale = config_.step_size * discount * returns[t];
      double* h = preferences_.data() + static_cast<std::size_t>(tr.state) * n_actions_;
      for (int a = 0; a < n_actions_; ++a) {
        const double indicator = (a == tr.action) ? 1.0 : 0.0;
        h[a] += scale * (indicator - row[a]);
      }
      discount *= config_.gamma;
    }
  }

  void td0_update(const Transition& tr, bool next_terminal) {
    const double bootstrap = next_terminal ? 0.0 : config_.gamma * values_[tr.next_state];
    double& v = values_[tr.state];
    v += config_.critic_step_size * (tr.extrinsic_reward + bootstrap - v);
  }

  double td0_advantage(const Transition& tr, bool next_terminal) const {
    const double bootstrap = next_terminal ? 0.0 : config_.gamma * values_[tr.next_state];
    return tr.extrinsic_reward + bootstrap - values_[tr.state];
  }

  /// Ascends the clipped surrogate min(ratio * Z, Z + clip * |Z|): the
  /// gradient flows only where the ratio term attains the minimum, and at
  /// the old policy (ratio 1) it equals the unclipped surrogate gradient.
  void clipped_surrogate_update(const Trajectory& trajectory, const TabularPolicy& old_policy,
                                const std::vector<double>& advantages, double clip_epsilon) {
    if (advantages.size() != trajectory.steps.size())
      throw std::invalid_argument("clipped_surrogate_update: advantage count mismatch");
    if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0))
      throw std::invalid_argument("clipped_surrogate_update: clip epsilon must lie in (0,1)");
    for (std::size_t t = 0; t < trajectory.steps.size(); ++t) {
      const Transition& tr = trajectory.steps[t];
      const double z = advantages[t];
      if (z == 0.0) continue;
      const std::vector<double> row = policy_row(tr.state);
      const double old_p = old_policy.p(tr.state, tr.action);
      if (old_p <= 0.0) throw std::invalid_argument("clipped_surrogate_update: action impossible under old policy");
      const double ratio = row[tr.action] / old_p;
      if (ratio * z >= z + clip_epsilon * std::fabs(z)) continue;  // clipped: constant branch active
      const double scale = config_.step_size * z * ratio;
      double* h = preferences_.data() + static_cast<std::size_t>(tr.state) * n_actions_;
      for (int a = 0; a < n_actions_; ++a) {
        const double indicator = (a == tr.action) ? 1.0 : 0.0;
        h[a] += scale * (indicator - row[a]);
      }
    }
  }

 private:
  int n_states_;
  int n_actions_;
  SoftmaxPgConfig config_;
  std::vector<double> preferences_;
  std::vector<double> values_;
};

/// Collects one episode under the agent's softmax policy.
inline Trajectory collect_episode(SoftmaxPgAgent& agent, const TabularMdp& mdp, EnvState& env, Rng& rng,
                                  std::int64_t step_cap) {
  Trajectory trajectory;
  while (!env.done() && static_cast<std::int64_t>(trajectory.steps.size()) < step_cap) {
    Transition tr;
    tr.state = env.state();
    tr.action = agent.sample_action(tr.state, rng);
    const StepResult step = env.step(tr.action, rng);
    tr.extrinsic_reward = step.reward;
    tr.next_state = step.next_state;
    trajectory.steps.push_back(std::move(tr));
    if (step.done) break;
  }
  return trajectory;
}

}  // namespace rlex
