#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rlex/core_mdp.hpp"
#include "rlex/entropy.hpp"
#include "rlex/rng.hpp"

namespace rlex {

struct MepcConfig {
  std::int64_t iterations = 0;   // T
  double step_size = 0.0;        // eta
  double planning_tol = 0.0;     // eps1
  double distribution_tol = 0.0;  // eps2; the exact oracle satisfies any value
  double sigma = 0.0;
  double alpha = 0.0;  // in (0,1)

  void validate() const {
    if (iterations < 1) throw std::invalid_argument("mepc config: iterations must be >= 1");
    if (!(step_size > 0.0 && step_size <= 1.0)) throw std::invalid_argument("mepc config: step size must lie in (0,1]");
    if (!(planning_tol > 0.0)) throw std::invalid_argument("mepc config: planning tolerance must be positive");
    if (distribution_tol < 0.0) throw std::invalid_argument("mepc config: distribution tolerance must be >= 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("mepc config: sigma must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("mepc config: alpha must lie in (0,1)");
  }
};

/// Near-optimal policy for a state-indexed reward, broadcast over actions.
/// Value iteration runs to a Bellman residual of eps1 * (1 - gamma), which
/// makes the returned greedy policy eps1-optimal. `warm_q` carries the
/// Q-table between calls; the residual-based stop keeps the guarantee
/// independent of the starting point.
inline TabularPolicy planning_oracle(const TabularMdp& mdp, const std::vector<double>& state_reward,
                                     double eps1, std::vector<double>* warm_q = nullptr) {
  if (state_reward.size() != static_cast<std::size_t>(mdp.n_states))
    throw std::invalid_argument("planning_oracle: reward must be indexed by state");
  if (!(eps1 > 0.0)) throw std::invalid_argument("planning_oracle: tolerance must be positive");
  const int ns = mdp.n_states;
  const int na = mdp.n_actions;
  const double tol = eps1 * (1.0 - mdp.discount);
  std::vector<double> local;
  std::vector<double>& q = warm_q != nullptr ? *warm_q : local;
  if (q.size() != static_cast<std::size_t>(ns) * na) q.assign(static_cast<std::size_t>(ns) * na, 0.0);
  std::vector<double> v(ns, 0.0);
  for (int s = 0; s < ns; ++s)
    v[s] = *std::max_element(q.begin() + static_cast<std::size_t>(s) * na,
                             q.begin() + static_cast<std::size_t>(s + 1) * na);
  double residual = std::numeric_limits<double>::infinity();
  while (residual > tol) {
    residual = 0.0;
    for (int s = 0; s < ns; ++s) {
      for (int a = 0; a < na; ++a) {
        double expect = 0.0;
        const double* row = mdp.transition.data() + (static_cast<std::size_t>(s) * na + a) * ns;
        for (int s2 = 0; s2 < ns; ++s2) expect += row[s2] * v[s2];
        const double backup = state_reward[s] + mdp.discount * expect;
        double& cell = q[static_cast<std::size_t>(s) * na + a];
        residual = std::max(residual, std::fabs(backup - cell));
        cell = backup;
      }
      v[s] = *std::max_element(q.begin() + static_cast<std::size_t>(s) * na,
                               q.begin() + static_cast<std::size_t>(s + 1) * na);
    }
  }
  TabularPolicy pi(ns, na);
  for (int s = 0; s < ns; ++s) {
    const int a = argmax_lowest_index(q.data() + static_cast<std::size_t>(s) * na, na);
    pi.p(s, a) = 1.0;
  }
  return pi;
}

/// Exact state-distribution oracle: the occupancy of the mixture, which
/// meets any tolerance.
inline StateDistribution distribution_oracle(const TabularMdp& mdp, const MixedPolicy& mix,
                                             double /*eps2*/ = 0.0) {
  return occupancy_of_mixture(mdp, mix);
}

/// Sampling-mode state-distribution estimate: Monte-Carlo rollouts of the
/// mixture with discounted visit weights.
inline StateDistribution distribution_oracle_sampled(const TabularMdp& mdp, const MixedPolicy& mix,
                                                     Rng& rng, int rollouts) {
  mix.validate();
  if (rollouts < 1) throw std::invalid_argument("distribution oracle: need at least one rollout");
  const int ns = mdp.n_states;
  std::vector<double> mass(ns, 0.0);
  // Horizon where the discarded tail weight drops below 1e-10.
  const int horizon = static_cast<int>(std::ceil(std::log(1e-10) / std::log(mdp.discount)));
  for (int run = 0; run < rollouts; ++run) {
    const int member = rng.categorical(mix.weights);
    const TabularPolicy& pi = mix.members[member];
    int state = rng.categorical(mdp.initial_dist);
    double weight = 1.0;
    for (int t = 0; t < horizon; ++t) {
      mass[state] += weight;
      const double* row = pi.probs.data() + static_cast<std::size_t>(state) * mdp.n_actions;
      const int action = rng.categorical(std::vector<double>(row, row + mdp.n_actions));
      const double* trow =
          mdp.transition.data() + (static_cast<std::size_t>(state) * mdp.n_actions + action) * mdp.n_states;
      double u = rng.next_double();
      int next = ns - 1;
      double acc = 0.0;
      for (int s2 = 0; s2 < ns; ++s2) {
        acc += trow[s2];
        if (u < acc) {
          next = s2;
          break;
        }
      }
      state = next;
      weight *= mdp.discount;
    }
  }
  double total = 0.0;
  for (double m : mass) total += m;
  StateDistribution d(std::move(mass));
  for (double& p : d.probs) p /= total;
  d.validate();
  return d;
}

struct MepcResult {
  MixedPolicy mixture;
  std::vector<double> entropy_trace;  // smoothed entropy of the mixture per iteration
  StateDistribution final_occupancy;
};

/// Maximum-entropy policy computation: at every iteration the reward is the
/// gradient of the smoothed entropy at the current mixture occupancy, the
/// planning oracle supplies a near-optimal policy for it, and the mixture
/// takes a (1-eta, eta) step toward that policy. The mixture occupancy is
/// maintained incrementally, one exact solve per new member.
inline MepcResult run_mepc(const TabularMdp& mdp, const MepcConfig& config) {
  config.validate();
  mdp.validate();
  const SmoothedEntropyParams params(config.alpha, config.sigma);

  MepcResult result;
  TabularPolicy initial = TabularPolicy::uniform(mdp.n_states, mdp.n_actions);
  StateDistribution mix_occupancy = state_occupancy(mdp, initial);
  result.mixture = MixedPolicy::single(std::move(initial));
  result.entropy_trace.reserve(config.iterations + 1);
  result.entropy_trace.push_back(smoothed_renyi(mix_occupancy, params));

  std::vector<double> warm_q;
  for (std::int64_t t = 0; t < config.iterations; ++t) {
    const std::vector<double> reward = smoothed_renyi_gradient(mix_occupancy, params);
    TabularPolicy next = planning_oracle(mdp, reward, config.planning_tol, &warm_q);
    const StateDistribution next_occupancy = state_occupancy(mdp, next);
    result.mixture.append(std::move(next), config.step_size);
    for (int s = 0; s < mdp.n_states; ++s) {
      mix_occupancy.probs[s] =
          (1.0 - config.step_size) * mix_occupancy.probs[s] + config.step_size * next_occupancy.probs[s];
    }
    result.entropy_trace.push_back(smoothed_renyi(mix_occupancy, params));
  }
  mix_occupancy.validate();
  result.final_occupancy = std::move(mix_occupancy);
  return result;
}

struct IterationBound {
  std::int64_t iterations = 1;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double eta = 0.0;
  double beta = 0.0;
  bool vacuous = false;  // log argument <= 1, bound carries no information
};

/// Smallest iteration count satisfying
///   T >= (10 alpha sigma^(alpha-2) / eps) log(10 alpha sigma^(alpha-1) / ((1-alpha) eps)),
/// along with the prescribed oracle tolerances eps1 = 0.1 eps and
/// eps2 = eta = 0.1 eps / beta.
inline IterationBound iteration_bound(double alpha, double sigma, double eps) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("iteration_bound: alpha must lie in (0,1)");
  if (!(sigma > 0.0)) throw std::invalid_argument("iteration_bound: sigma must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("iteration_bound: eps must be positive");
  IterationBound out;
  out.beta = alpha * std::pow(sigma, alpha - 2.0);
  out.eps1 = 0.1 * eps;
  out.eps2 = 0.1 * eps / out.beta;
  out.eta = 0.1 * eps / out.beta;
  const double log_arg = 10.0 * alpha * std::pow(sigma, alpha - 1.0) / ((1.0 - alpha) * eps);
  if (log_arg <= 1.0) {
    out.iterations = 1;
    out.vacuous = true;
    return out;
  }
  const double bound = (10.0 * out.beta / eps) * std::log(log_arg);
  out.iterations = static_cast<std::int64_t>(std::ceil(bound));
  return out;
}

namespace detail {

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fb, double fm, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Expected number of draws to collect every state at least once under
/// visitation distribution d:
///   E[T] = integral_0^inf (1 - prod_i (1 - e^(-d_i t))) dt.
/// Adaptive Simpson on [0, T_max] with T_max chosen so the analytic tail
/// bound sum_i e^(-d_i T)/d_i stays below tol/2; the quadrature gets the
/// other tol/2.
inline double ccp_expected_time(const StateDistribution& d, double tol) {
  d.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("ccp_expected_time: tol must be positive");
  double d_min = std::numeric_limits<double>::infinity();
  for (double p : d.probs) {
    if (p <= 0.0)
      throw std::invalid_argument("ccp_expected_time: zero-probability state makes the expectation diverge");
    d_min = std::min(d_min, p);
  }
  const double n = static_cast<double>(d.probs.size());
  const double t_max = std::log(2.0 * n / (tol * d_min)) / d_min;
  const auto integrand = [&](double t) {
    double prod = 1.0;
    for (double p : d.probs) prod *= 1.0 - std::exp(-p * t);
    return 1.0 - prod;
  };
  const double fa = integrand(0.0);
  const double fb = integrand(t_max);
  const double fm = integrand(0.5 * t_max);
  const double whole = t_max / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson(integrand, 0.0, t_max, fa, fb, fm, whole, 0.5 * tol, 48);
}

}  // namespace rlex
