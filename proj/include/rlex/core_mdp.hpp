#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlex/linalg.hpp"

namespace rlex {

inline constexpr double kSimplexTolerance = 1e-9;

/// Finite MDP with dense transition tensor T[s][a][s'], reward table r[s][a],
/// initial distribution and discount. Terminal states are absorbing
/// (self-loop with probability 1) and carry zero reward, so infinite-horizon
/// formulas apply uniformly.
struct TabularMdp {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> transition;    // n_states * n_actions * n_states
  std::vector<double> reward;        // n_states * n_actions
  std::vector<double> initial_dist;  // n_states
  double discount = 0.0;
  std::vector<std::uint8_t> terminal;  // n_states

  TabularMdp() = default;
  TabularMdp(int states, int actions, double gamma)
      : n_states(states),
        n_actions(actions),
        transition(static_cast<std::size_t>(states) * actions * states, 0.0),
        reward(static_cast<std::size_t>(states) * actions, 0.0),
        initial_dist(states, 0.0),
        discount(gamma),
        terminal(states, 0) {}

  double t(int s, int a, int s2) const {
    return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
  }
  double& t(int s, int a, int s2) {
    return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
  }
  double r(int s, int a) const { return reward[static_cast<std::size_t>(s) * n_actions + a]; }
  double& r(int s, int a) { return reward[static_cast<std::size_t>(s) * n_actions + a]; }

  void mark_terminal(int s) {
    terminal[s] = 1;
    for (int a = 0; a < n_actions; ++a) {
      for (int s2 = 0; s2 < n_states; ++s2) t(s, a, s2) = (s2 == s) ? 1.0 : 0.0;
      r(s, a) = 0.0;
    }
  }

  void validate() const {
    if (n_states <= 0 || n_actions <= 0) throw std::invalid_argument("mdp: empty state or action space");
    if (!(discount >= 0.0) || discount >= 1.0) throw std::invalid_argument("mdp: discount must lie in [0,1)");
    for (int s = 0; s < n_states; ++s) {
      for (int a = 0; a < n_actions; ++a) {
        double total = 0.0;
        for (int s2 = 0; s2 < n_states; ++s2) {
          const double p = t(s, a, s2);
          if (p < 0.0) throw std::invalid_argument("mdp: negative transition probability");
          total += p;
        }
        if (std::fabs(total - 1.0) > kSimplexTolerance)
          throw std::invalid_argument("mdp: transition row does not sum to 1");
      }
      if (terminal[s]) {
        for (int a = 0; a < n_actions; ++a) {
          if (std::fabs(t(s, a, s) - 1.0) > kSimplexTolerance || r(s, a) != 0.0)
            throw std::invalid_argument("mdp: terminal state must self-loop with zero reward");
        }
      }
    }
    double rho = 0.0;
    for (double p : initial_dist) {
      if (p < 0.0) throw std::invalid_argument("mdp: negative initial probability");
      rho += p;
    }
    if (std::fabs(rho - 1.0) > kSimplexTolerance)
      throw std::invalid_argument("mdp: initial distribution does not sum to 1");
  }

  /// Text form: header "n_states n_actions gamma", one line per (s,a) with
  /// the reward followed by the transition row, then the initial
  /// distribution. Round-trips losslessly.
  void save(std::ostream& out) const {
    out << std::setprecision(17);
    out << n_states << ' ' << n_actions << ' ' << discount << '\n';
    for (int s = 0; s < n_states; ++s) {
      for (int a = 0; a < n_actions; ++a) {
        out << r(s, a);
        for (int s2 = 0; s2 < n_states; ++s2) out << ' ' << t(s, a, s2);
        out << '\n';
      }
    }
    for (int s = 0; s < n_states; ++s) out << initial_dist[s] << (s + 1 == n_states ? '\n' : ' ');
  }

  static TabularMdp load(std::istream& in) {
    int states = 0;
    int actions = 0;
    double gamma = 0.0;
    if (!(in >> states >> actions >> gamma)) throw std::invalid_argument("mdp load: bad header");
    if (states <= 0 || actions <= 0) throw std::invalid_argument("mdp load: bad dimensions");
    TabularMdp mdp(states, actions, gamma);
    for (int s = 0; s < states; ++s) {
      for (int a = 0; a < actions; ++a) {
        if (!(in >> mdp.r(s, a))) throw std::invalid_argument("mdp load: truncated reward");
        for (int s2 = 0; s2 < states; ++s2) {
          if (!(in >> mdp.t(s, a, s2))) throw std::invalid_argument("mdp load: truncated transition row");
        }
      }
    }
    for (int s = 0; s < states; ++s) {
      if (!(in >> mdp.initial_dist[s])) throw std::invalid_argument("mdp load: truncated initial distribution");
    }
    // Terminal flags are implied by the absorbing-with-zero-reward shape.
    for (int s = 0; s < states; ++s) {
      bool absorbing = true;
      for (int a = 0; a < actions && absorbing; ++a) {
        if (std::fabs(mdp.t(s, a, s) - 1.0) > kSimplexTolerance || mdp.r(s, a) != 0.0) absorbing = false;
      }
      mdp.terminal[s] = absorbing ? 1 : 0;
    }
    mdp.validate();
    return mdp;
  }
};

/// Stochastic tabular policy. Rows are probability distributions over
/// actions; a policy may be stored directly or derived from an action
/// preference table through a row-wise softmax.
struct TabularPolicy {
  enum class Representation { kExplicit, kSoftmaxPreferences };

  int n_states = 0;
  int n_actions = 0;
  std::vector<double> probs;  // n_states * n_actions
  Representation representation = Representation::kExplicit;

  TabularPolicy() = default;
  TabularPolicy(int states, int actions)
      : n_states(states), n_actions(actions), probs(static_cast<std::size_t>(states) * actions, 0.0) {}

  double p(int s, int a) const { return probs[static_cast<std::size_t>(s) * n_actions + a]; }
  double& p(int s, int a) { return probs[static_cast<std::size_t>(s) * n_actions + a]; }

  static TabularPolicy uniform(int states, int actions) {
    TabularPolicy pi(states, actions);
    const double w = 1.0 / actions;
    for (auto& v : pi.probs) v = w;
    return pi;
  }

  // Row-wise softmax of a preference table, stabilised by max subtraction.
  static TabularPolicy from_preferences(int states, int actions, const std::vector<double>& h) {
    if (h.size() != static_cast<std::size_t>(states) * actions)
      throw std::invalid_argument("from_preferences: preference table shape mismatch");
    TabularPolicy pi(states, actions);
    pi.representation = Representation::kSoftmaxPreferences;
    for (int s = 0; s < states; ++s) {
      const double* row = h.data() + static_cast<std::size_t>(s) * actions;
      double hi = row[0];
      for (int a = 1; a < actions; ++a) hi = std::max(hi, row[a]);
      double total = 0.0;
      for (int a = 0; a < actions; ++a) {
        const double e = std::exp(row[a] - hi);
        pi.p(s, a) = e;
        total += e;
      }
      for (int a = 0; a < actions; ++a) pi.p(s, a) /= total;
    }
    return pi;
  }

  void validate() const {
    for (int s = 0; s < n_states; ++s) {
      double total = 0.0;
      for (int a = 0; a < n_actions; ++a) {
        if (p(s, a) < 0.0) throw std::invalid_argument("policy: negative probability");
        total += p(s, a);
      }
      if (std::fabs(total - 1.0) > kSimplexTolerance)
        throw std::invalid_argument("policy: row does not sum to 1");
    }
  }
};

struct ValueTables {
  std::vector<double> v;  // per state
  std::vector<double> q;  // per state-action
  int n_actions = 0;

  double value(int s) const { return v[s]; }
  double action_value(int s, int a) const { return q[static_cast<std::size_t>(s) * n_actions + a]; }
  double advantage(int s, int a) const { return action_value(s, a) - v[s]; }
};

/// Probability vector over states, the symbol d(s).
struct StateDistribution {
  std::vector<double> probs;

  StateDistribution() = default;
  explicit StateDistribution(std::vector<double> p) : probs(std::move(p)) {}

  void validate() const {
    double total = 0.0;
    for (double p : probs) {
      if (p < 0.0) throw std::invalid_argument("state distribution: negative entry");
      total += p;
    }
    if (std::fabs(total - 1.0) > kSimplexTolerance)
      throw std::invalid_argument("state distribution: does not sum to 1");
  }
};

struct Transition {
  int state = 0;
  int action = 0;
  double extrinsic_reward = 0.0;
  int next_state = 0;
  std::optional<std::vector<double>> embedding;
  std::optional<double> intrinsic_reward;
};

struct Trajectory {
  std::vector<Transition> steps;
  std::uint64_t episode_id = 0;
  std::uint64_t seed = 0;
};

/// Weighted collection of policies. Appending with step size eta rescales
/// the existing weights by (1 - eta), so after t appends the weights are
/// eta (1-eta)^{t-i} with (1-eta)^t left on the initial member.
struct MixedPolicy {
  std::vector<TabularPolicy> members;
  std::vector<double> weights;

  static MixedPolicy single(TabularPolicy pi) {
    MixedPolicy mix;
    mix.members.push_back(std::move(pi));
    mix.weights.push_back(1.0);
    return mix;
  }

  void append(TabularPolicy pi, double eta) {
    for (double& w : weights) w *= (1.0 - eta);
    members.push_back(std::move(pi));
    weights.push_back(eta);
  }

  void validate() const {
    if (members.empty()) throw std::invalid_argument("mixed policy: empty mixture");
    if (members.size() != weights.size()) throw std::invalid_argument("mixed policy: weight count mismatch");
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("mixed policy: negative weight");
      total += w;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw std::invalid_argument("mixed policy: weights do not sum to 1");
  }
};

// Discounted returns computed backward over a reward sequence:
// G_t = R_{t+1} + gamma * G_{t+1}.
inline std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma) {
  std::vector<double> g(rewards.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + gamma * acc;
    g[i] = acc;
  }
  return g;
}

inline int argmax_lowest_index(const double* values, int count) {
  int best = 0;
  for (int i = 1; i < count; ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

/// Greedy deterministic policy from Q, ties broken toward the lowest action
/// index.
inline TabularPolicy greedy_policy(const TabularMdp& mdp, const ValueTables& tables) {
  TabularPolicy pi(mdp.n_states, mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s) {
    const int a = argmax_lowest_index(tables.q.data() + static_cast<std::size_t>(s) * mdp.n_actions,
                                      mdp.n_actions);
    pi.p(s, a) = 1.0;
  }
  return pi;
}

/// Value iteration to a Bellman optimality residual below `tol` in max-norm.
/// `initial_q` warm-starts the iteration; correctness does not depend on it
/// because the stopping rule is residual-based.
inline ValueTables value_iteration(const TabularMdp& mdp, double tol,
                                   const std::vector<double>& initial_q = {}) {
  if (!(tol > 0.0)) throw std::invalid_argument("value_iteration: tol must be positive");
  if (mdp.discount >= 1.0) throw std::invalid_argument("value_iteration: discount 1 unsupported");
  mdp.validate();
  const int ns = mdp.n_states;
  const int na = mdp.n_actions;
  std::vector<double> q(static_cast<std::size_t>(ns) * na, 0.0);
  if (!initial_q.empty()) {
    if (initial_q.size() != q.size()) throw std::invalid_argument("value_iteration: initial_q shape mismatch");
    q = initial_q;
  }
  std::vector<double> v(ns, 0.0);
  for (int s = 0; s < ns; ++s) v[s] = *std::max_element(q.begin() + static_cast<std::size_t>(s) * na,
                                                        q.begin() + static_cast<std::size_t>(s + 1) * na);
  double residual = std::numeric_limits<double>::infinity();
  while (residual > tol) {
    residual = 0.0;
    for (int s = 0; s < ns; ++s) {
      for (int a = 0; a < na; ++a) {
        double backup = mdp.r(s, a);
        const double* row = mdp.transition.data() + (static_cast<std::size_t>(s) * na + a) * ns;
        double expect = 0.0;
        for (int s2 = 0; s2 < ns; ++s2) expect += row[s2] * v[s2];
        backup += mdp.discount * expect;
        double& cell = q[static_cast<std::size_t>(s) * na + a];
        residual = std::max(residual, std::fabs(backup - cell));
        cell = backup;
      }
      v[s] = *std::max_element(q.begin() + static_cast<std::size_t>(s) * na,
                               q.begin() + static_cast<std::size_t>(s + 1) * na);
    }
  }
  return ValueTables{std::move(v), std::move(q), na};
}

namespace detail {

// Per-policy transition matrix P_pi[s][s2] and reward vector r_pi[s].
inline void policy_kernel(const TabularMdp& mdp, const TabularPolicy& pi, Matrix& p_pi,
                          std::vector<double>& r_pi) {
  const int ns = mdp.n_states;
  const int na = mdp.n_actions;
  p_pi = Matrix(ns, ns);
  r_pi.assign(ns, 0.0);
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      const double w = pi.p(s, a);
      if (w == 0.0) continue;
      r_pi[s] += w * mdp.r(s, a);
      const double* row = mdp.transition.data() + (static_cast<std::size_t>(s) * na + a) * ns;
      for (int s2 = 0; s2 < ns; ++s2) p_pi(s, s2) += w * row[s2];
    }
  }
}

}  // namespace detail

/// Iterative policy evaluation to a fixed-point residual below `tol`.
inline ValueTables policy_evaluation(const TabularMdp& mdp, const TabularPolicy& pi, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("policy_evaluation: tol must be positive");
  if (mdp.discount >= 1.0) throw std::invalid_argument("policy_evaluation: discount 1 unsupported");
  mdp.validate();
  pi.validate();
  const int ns = mdp.n_states;
  const int na = mdp.n_actions;
  Matrix p_pi;
  std::vector<double> r_pi;
  detail::policy_kernel(mdp, pi, p_pi, r_pi);
  std::vector<double> v(ns, 0.0);
  double residual = std::numeric_limits<double>::infinity();
  while (residual > tol) {
    residual = 0.0;
    for (int s = 0; s < ns; ++s) {
      double next = r_pi[s];
      double expect = 0.0;
      for (int s2 = 0; s2 < ns; ++s2) expect += p_pi(s, s2) * v[s2];
      next += mdp.discount * expect;
      residual = std::max(residual, std::fabs(next - v[s]));
      v[s] = next;
    }
  }
  std::vector<double> q(static_cast<std::size_t>(ns) * na, 0.0);
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      double backup = mdp.r(s, a);
      double expect = 0.0;
      for (int s2 = 0; s2 < ns; ++s2) expect += mdp.t(s, a, s2) * v[s2];
      q[static_cast<std::size_t>(s) * na + a] = backup + mdp.discount * expect;
    }
  }
  return ValueTables{std::move(v), std::move(q), na};
}

/// Exact policy evaluation through the linear system (I - gamma P_pi) V = r_pi.
inline ValueTables policy_evaluation_exact(const TabularMdp& mdp, const TabularPolicy& pi) {
  if (mdp.discount >= 1.0) throw std::invalid_argument("policy_evaluation_exact: discount 1 unsupported");
  mdp.validate();
  pi.validate();
  const int ns = mdp.n_states;
  const int na = mdp.n_actions;
  Matrix p_pi;
  std::vector<double> r_pi;
  detail::policy_kernel(mdp, pi, p_pi, r_pi);
  Matrix system(ns, ns);
  for (int s = 0; s < ns; ++s) {
    for (int s2 = 0; s2 < ns; ++s2) system(s, s2) = (s == s2 ? 1.0 : 0.0) - mdp.discount * p_pi(s, s2);
  }
  std::vector<double> v = solve_linear(std::move(system), std::move(r_pi));
  std::vector<double> q(static_cast<std::size_t>(ns) * na, 0.0);
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      double expect = 0.0;
      for (int s2 = 0; s2 < ns; ++s2) expect += mdp.t(s, a, s2) * v[s2];
      q[static_cast<std::size_t>(s) * na + a] = mdp.r(s, a) + mdp.discount * expect;
    }
  }
  return ValueTables{std::move(v), std::move(q), na};
}

/// Discounted state occupancy d(s) = (1 - gamma) sum_t gamma^t Pr(s_t = s),
/// obtained exactly from (I - gamma P_pi^T) x = (1 - gamma) rho.
inline StateDistribution state_occupancy(const TabularMdp& mdp, const TabularPolicy& pi) {
  if (mdp.discount >= 1.0) throw std::invalid_argument("state_occupancy: discount 1 unsupported");
  mdp.validate();
  pi.validate();
  const int ns = mdp.n_states;
  Matrix p_pi;
  std::vector<double> r_pi;
  detail::policy_kernel(mdp, pi, p_pi, r_pi);
  Matrix system(ns, ns);
  for (int s = 0; s < ns; ++s) {
    for (int s2 = 0; s2 < ns; ++s2) system(s, s2) = (s == s2 ? 1.0 : 0.0) - mdp.discount * p_pi(s2, s);
  }
  std::vector<double> rhs(ns);
  for (int s = 0; s < ns; ++s) rhs[s] = (1.0 - mdp.discount) * mdp.initial_dist[s];
  StateDistribution d(solve_linear(std::move(system), std::move(rhs)));
  for (double& p : d.probs) p = std::max(p, 0.0);
  d.validate();
  return d;
}

/// Occupancy of a mixture: the weight-convex combination of the members'
/// occupancies.
inline StateDistribution occupancy_of_mixture(const TabularMdp& mdp, const MixedPolicy& mix) {
  mix.validate();
  StateDistribution out(std::vector<double>(mdp.n_states, 0.0));
  for (std::size_t i = 0; i < mix.members.size(); ++i) {
    if (mix.weights[i] == 0.0) continue;
    const StateDistribution di = state_occupancy(mdp, mix.members[i]);
    for (int s = 0; s < mdp.n_states; ++s) out.probs[s] += mix.weights[i] * di.probs[s];
  }
  out.validate();
  return out;
}

}  // namespace rlex
