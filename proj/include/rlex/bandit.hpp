#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlex/rng.hpp"

namespace rlex {

/// K-armed bandit with Bernoulli or Gaussian payouts.
class BanditEnv {
 public:
  enum class Payout { kBernoulli, kGaussian };

  static BanditEnv bernoulli(std::vector<double> probs) {
    for (double p : probs) {
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bandit: Bernoulli p must lie in [0,1]");
    }
    BanditEnv env;
    env.payout_ = Payout::kBernoulli;
    env.means_ = std::move(probs);
    env.check_arms();
    return env;
  }

  static BanditEnv gaussian(std::vector<double> means, std::vector<double> stddevs) {
    if (means.size() != stddevs.size()) throw std::invalid_argument("bandit: mean/stddev count mismatch");
    for (double s : stddevs) {
      if (!(s >= 0.0)) throw std::invalid_argument("bandit: stddev must be >= 0");
    }
    BanditEnv env;
    env.payout_ = Payout::kGaussian;
    env.means_ = std::move(means);
    env.stddevs_ = std::move(stddevs);
    env.check_arms();
    return env;
  }

  int arms() const { return static_cast<int>(means_.size()); }
  Payout payout() const { return payout_; }
  double mean(int arm) const { return means_.at(arm); }
  double best_mean() const { return *std::max_element(means_.begin(), means_.end()); }

  double pull(int arm, Rng& rng) const {
    if (arm < 0 || arm >= arms()) throw std::invalid_argument("bandit: arm out of range");
    if (payout_ == Payout::kBernoulli) return rng.bernoulli(means_[arm]) ? 1.0 : 0.0;
    return rng.normal(means_[arm], stddevs_[arm]);
  }

 private:
  void check_arms() const {
    if (means_.empty()) throw std::invalid_argument("bandit: need at least one arm");
  }

  Payout payout_ = Payout::kBernoulli;
  std::vector<double> means_;
  std::vector<double> stddevs_;
};

/// Running statistics of a bandit run: per-arm means Q(i) maintained by the
/// incremental rule, pull counts, total reward, and the Thompson Beta
/// parameters.
struct BanditState {
  std::vector<double> q;
  std::vector<std::int64_t> counts;
  std::int64_t total_pulls = 0;
  double total_reward = 0.0;
  std::vector<double> ts_alpha;
  std::vector<double> ts_beta;

  explicit BanditState(int arms)
      : q(arms, 0.0), counts(arms, 0), ts_alpha(arms, 1.0), ts_beta(arms, 1.0) {}

  int arms() const { return static_cast<int>(q.size()); }

  // Q(k) <- (Q(k) count(k) + v) / (count(k) + 1)
  void record(int arm, double reward) {
    q[arm] = (q[arm] * static_cast<double>(counts[arm]) + reward) / static_cast<double>(counts[arm] + 1);
    counts[arm] += 1;
    total_pulls += 1;
    total_reward += reward;
  }
};

inline int argmax_arm(const std::vector<double>& values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

/// With probability eps a uniform arm (the greedy one included), otherwise
/// the greedy arm, so P(greedy) = 1 - eps + eps/K.
inline int select_epsilon_greedy(const BanditState& state, double eps, Rng& rng) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("epsilon-greedy: eps must lie in [0,1]");
  if (rng.next_double() < eps) return rng.uniform_int(state.arms());
  return argmax_arm(state.q);
}

/// argmax_i Q(i) + c sqrt(ln t / N(i)); an unpulled arm has an infinite
/// index and is selected before any pulled arm (lowest index first).
inline int select_ucb(const BanditState& state, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("ucb: c must be positive");
  if (state.total_pulls < 1) throw std::invalid_argument("ucb: needs at least one pull recorded");
  for (int i = 0; i < state.arms(); ++i) {
    if (state.counts[i] == 0) return i;
  }
  const double log_t = std::log(static_cast<double>(state.total_pulls));
  int best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < state.arms(); ++i) {
    const double index = state.q[i] + c * std::sqrt(log_t / static_cast<double>(state.counts[i]));
    if (index > best_index) {
      best_index = index;
      best = i;
    }
  }
  return best;
}

/// Boltzmann selection probabilities exp(Q/tau)/sum exp(Q/tau), stabilised
/// by max subtraction.
inline std::vector<double> boltzmann_probs(const std::vector<double>& q, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("boltzmann: temperature must be positive");
  if (q.empty()) throw std::invalid_argument("boltzmann: empty value vector");
  const double hi = *std::max_element(q.begin(), q.end());
  std::vector<double> probs(q.size());
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    probs[i] = std::exp((q[i] - hi) / tau);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

inline int select_boltzmann(const BanditState& state, double tau, Rng& rng) {
  return rng.categorical(boltzmann_probs(state.q, tau));
}

struct ThompsonStep {
  int arm = 0;
  double reward = 0.0;
};

/// One Thompson-sampling interaction: sample Q~(i) from Beta(alpha_i, beta_i)
/// per arm, pull the argmax, then update only the chosen arm's parameters by
/// alpha += r, beta += 1 - r. Requires Bernoulli rewards.
inline ThompsonStep thompson_step(BanditState& state, const BanditEnv& env, Rng& rng) {
  if (env.payout() != BanditEnv::Payout::kBernoulli)
    throw std::invalid_argument("thompson sampling: supports Bernoulli rewards only");
  std::vector<double> samples(state.arms());
  for (int i = 0; i < state.arms(); ++i) samples[i] = rng.beta(state.ts_alpha[i], state.ts_beta[i]);
  ThompsonStep step;
  step.arm = argmax_arm(samples);
  step.reward = env.pull(step.arm, rng);
  state.ts_alpha[step.arm] += step.reward;
  state.ts_beta[step.arm] += 1.0 - step.reward;
  state.record(step.arm, step.reward);
  return step;
}

enum class BanditStrategy { kEpsilonGreedy, kEpsilonGreedyDecay, kUcb, kThompson, kBoltzmann };

inline BanditStrategy bandit_strategy_from_string(const std::string& name) {
  if (name == "epsilon_greedy") return BanditStrategy::kEpsilonGreedy;
  if (name == "epsilon_greedy_decay") return BanditStrategy::kEpsilonGreedyDecay;
  if (name == "ucb") return BanditStrategy::kUcb;
  if (name == "thompson") return BanditStrategy::kThompson;
  if (name == "boltzmann") return BanditStrategy::kBoltzmann;
  throw std::invalid_argument("unknown bandit strategy \"" + name +
                              "\"; valid names: epsilon_greedy, epsilon_greedy_decay, ucb, thompson, boltzmann");
}

struct BanditStrategyConfig {
  BanditStrategy strategy = BanditStrategy::kEpsilonGreedy;
  double epsilon = 0.1;      // fixed rate, or the numerator of eps/sqrt(t) when decaying
  double ucb_c = 1.0;
  double temperature = 0.5;
};

struct BanditHistory {
  std::vector<int> arms;
  std::vector<double> rewards;
  std::vector<double> cumulative_reward;
  std::vector<double> cumulative_regret;  // t * best_mean - G_t
};

/// Runs one strategy for T steps; deterministic given the seed.
inline BanditHistory run_bandit(const BanditStrategyConfig& config, const BanditEnv& env, std::int64_t horizon,
                                std::uint64_t seed) {
  if (horizon < 1) throw std::invalid_argument("run_bandit: horizon must be >= 1");
  Rng rng(seed);
  BanditState state(env.arms());
  BanditHistory history;
  history.arms.reserve(horizon);
  history.rewards.reserve(horizon);
  history.cumulative_reward.reserve(horizon);
  history.cumulative_regret.reserve(horizon);
  const double best = env.best_mean();
  for (std::int64_t t = 1; t <= horizon; ++t) {
    int arm = 0;
    bool recorded = false;
    double reward = 0.0;
    switch (config.strategy) {
      case BanditStrategy::kEpsilonGreedy:
        arm = select_epsilon_greedy(state, config.epsilon, rng);
        break;
      case BanditStrategy::kEpsilonGreedyDecay:
        arm = select_epsilon_greedy(state, std::min(1.0, config.epsilon / std::sqrt(static_cast<double>(t))),
                                    rng);
        break;
      case BanditStrategy::kUcb: {
        bool unpulled = false;
        for (int i = 0; i < state.arms(); ++i) {
          if (state.counts[i] == 0) {
            arm = i;
            unpulled = true;
            break;
          }
        }
        if (!unpulled) arm = select_ucb(state, config.ucb_c);
        break;
      }
      case BanditStrategy::kThompson: {
        const ThompsonStep step = thompson_step(state, env, rng);
        arm = step.arm;
        reward = step.reward;
        recorded = true;
        break;
      }
      case BanditStrategy::kBoltzmann:
        arm = select_boltzmann(state, config.temperature, rng);
        break;
    }
    if (!recorded) {
      reward = env.pull(arm, rng);
      state.record(arm, reward);
    }
    history.arms.push_back(arm);
    history.rewards.push_back(reward);
    history.cumulative_reward.push_back(state.total_reward);
    history.cumulative_regret.push_back(static_cast<double>(t) * best - state.total_reward);
  }
  return history;
}

}  // namespace rlex
