#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlex/embedding.hpp"
#include "rlex/entropy.hpp"
#include "rlex/knn.hpp"
#include "rlex/linalg.hpp"
#include "rlex/rng.hpp"

namespace rlex {

/// Reward-composition parameters. Defaults follow the standard configuration:
/// alpha 0.1, lambda0 0.1, kappa 1e-5, k 5.
struct IntrinsicConfig {
  double alpha = 0.1;    // entropy order, restricted to (0,1)
  double lambda0 = 0.1;  // initial intrinsic coefficient
  double kappa = 1e-5;   // per-step decay rate
  double zeta = 0.0;     // action-entropy coefficient
  int k = 5;             // neighbor order
  int embedding_dim = 16;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("intrinsic config: alpha must lie in (0,1)");
    if (lambda0 < 0.0) throw std::invalid_argument("intrinsic config: lambda0 must be >= 0");
    if (!(kappa >= 0.0 && kappa < 1.0)) throw std::invalid_argument("intrinsic config: kappa must lie in [0,1)");
    if (zeta < 0.0) throw std::invalid_argument("intrinsic config: zeta must be >= 0");
    if (k < 1) throw std::invalid_argument("intrinsic config: k must be >= 1");
    if (embedding_dim < 1) throw std::invalid_argument("intrinsic config: embedding dim must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// Stateless reward formulas
// ---------------------------------------------------------------------------

/// Distance to the k-th nearest neighbor raised to (1 - alpha); zero for
/// exact duplicates.
inline double rise_reward(const std::vector<double>& embedding, const PointSet& neighbors, RenyiOrder order,
                          int k) {
  if (!(order.alpha < 1.0)) throw std::invalid_argument("rise_reward: requires alpha in (0,1)");
  const double dist = kth_neighbor_distance_of(neighbors, embedding, k);
  if (dist <= kDuplicateDistanceFloor) return 0.0;
  return std::pow(dist, 1.0 - order.alpha);
}

/// log(distance to the k-th nearest neighbor + 1).
inline double re3_reward(const std::vector<double>& embedding, const PointSet& neighbors, int k) {
  const double dist = kth_neighbor_distance_of(neighbors, embedding, k);
  return std::log1p(dist);
}

/// Never-give-up mixing: the episodic reward modulated by the clamped
/// life-long factor min(max(alpha_t, 1), beta_cap).
inline double ngu_mixed_reward(double episodic_reward, double lifelong_factor, double beta_cap) {
  if (!(beta_cap >= 1.0)) throw std::invalid_argument("ngu_mixed_reward: beta_cap must be >= 1");
  return episodic_reward * std::min(std::max(lifelong_factor, 1.0), beta_cap);
}

/// Embedding change between consecutive states discounted by the square root
/// of the episodic visitation count of the arrival state.
inline double ride_reward(const std::vector<double>& phi_state, const std::vector<double>& phi_next,
                          std::int64_t episodic_count) {
  if (episodic_count < 1)
    throw std::invalid_argument("ride_reward: arrival state must be counted upon visit");
  return euclidean_distance(phi_state, phi_next) / std::sqrt(static_cast<double>(episodic_count));
}

/// Potential-based shaping term gamma * phi(s') - phi(s).
inline double pbrs_shaping(const std::vector<double>& potential, int state, int next_state, double gamma) {
  return gamma * potential[next_state] - potential[state];
}

/// The negative-Manhattan-distance potential over grid cells.
inline std::vector<double> manhattan_potential(const std::vector<std::pair<int, int>>& state_cells,
                                               std::pair<int, int> goal_cell) {
  std::vector<double> phi(state_cells.size());
  for (std::size_t s = 0; s < state_cells.size(); ++s) {
    phi[s] = -static_cast<double>(std::abs(state_cells[s].first - goal_cell.first) +
                                  std::abs(state_cells[s].second - goal_cell.second));
  }
  return phi;
}

/// lambda_t = lambda0 (1 - kappa)^t.
inline double decay_coefficient(double lambda0, double kappa, std::uint64_t t) {
  if (!(kappa >= 0.0 && kappa < 1.0)) throw std::invalid_argument("decay_coefficient: kappa must lie in [0,1)");
  return lambda0 * std::pow(1.0 - kappa, static_cast<double>(t));
}

/// r_total = r + lambda_t * r_hat + zeta * H(pi(.|s)).
inline double compose_total_reward(double extrinsic, double intrinsic, double lambda_t, double zeta,
                                   const std::vector<double>& policy_row) {
  double entropy_term = 0.0;
  if (zeta != 0.0) entropy_term = zeta * action_entropy(policy_row);
  return extrinsic + lambda_t * intrinsic + entropy_term;
}

// ---------------------------------------------------------------------------
// Stateful reward models
// ---------------------------------------------------------------------------

/// Dirichlet-smoothed categorical density over a finite state space:
/// psi(s) = (N(s) + a) / (n + a |S|).
class PseudoCountModel {
 public:
  PseudoCountModel(int n_states, double smoothing = 0.01) : counts_(n_states, 0), smoothing_(smoothing) {
    if (n_states < 1) throw std::invalid_argument("pseudo-count model: need at least one state");
    if (!(smoothing > 0.0)) throw std::invalid_argument("pseudo-count model: smoothing must be positive");
  }

  void observe(int state) {
    counts_.at(state) += 1;
    total_ += 1;
  }

  std::int64_t visits(int state) const { return counts_.at(state); }

  double density(int state) const {
    return (counts_.at(state) + smoothing_) / (total_ + smoothing_ * counts_.size());
  }

  // The probability the model would assign after one more observation of s.
  double density_after_observing(int state) const {
    return (counts_.at(state) + 1 + smoothing_) / (total_ + 1 + smoothing_ * counts_.size());
  }

 private:
  std::vector<std::int64_t> counts_;
  double smoothing_;
  double total_ = 0.0;
};

struct PseudoCountResult {
  double pseudo_count = 0.0;     // exact N-hat
  double reward = 0.0;           // sqrt(1 / N-hat)
  double prediction_gain = 0.0;  // log psi' - log psi
  double pg_approximation = 0.0;  // (e^PG - 1)^-1
};

/// Pseudo-count arithmetic on a density pair: N-hat = psi (1 - psi') /
/// (psi' - psi) with reward sqrt(1/N-hat), plus the prediction-gain
/// approximation (e^PG - 1)^-1 for cross-checking.
inline PseudoCountResult pseudo_count_from_densities(double psi, double psi_next) {
  if (!(psi > 0.0) || !(psi_next > psi))
    throw std::runtime_error("pseudo count: density model is not learning-positive");
  PseudoCountResult out;
  out.pseudo_count = psi * (1.0 - psi_next) / (psi_next - psi);
  out.reward = std::sqrt(1.0 / out.pseudo_count);
  out.prediction_gain = std::log(psi_next) - std::log(psi);
  out.pg_approximation = 1.0 / (std::exp(out.prediction_gain) - 1.0);
  return out;
}

inline PseudoCountResult pseudo_count_reward(const PseudoCountModel& model, int state) {
  return pseudo_count_from_densities(model.density(state), model.density_after_observing(state));
}

/// Random-distillation novelty with linear maps: a fixed random target
/// f(x) = A x and a predictor f^(x) = B x trained online on the squared
/// error. The reward is the Euclidean prediction error.
class LinearRnd {
 public:
  LinearRnd(int input_dim, int output_dim, std::uint64_t seed, double learning_rate = 0.05)
      : input_dim_(input_dim), output_dim_(output_dim), learning_rate_(learning_rate) {
    if (input_dim < 1 || output_dim < 1) throw std::invalid_argument("linear rnd: dimensions must be positive");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("linear rnd: learning rate must be positive");
    Rng rng(seed);
    target_.resize(static_cast<std::size_t>(output_dim) * input_dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
    for (double& w : target_) w = scale * rng.normal();
    predictor_.assign(target_.size(), 0.0);
  }

  // Test hook: a predictor that already matches the target has zero error.
  void copy_target_into_predictor() { predictor_ = target_; }

  double reward(const std::vector<double>& x) const {
    double acc = 0.0;
    for (int r = 0; r < output_dim_; ++r) acc += residual(r, x) * residual(r, x);
    return std::sqrt(acc);
  }

  // One gradient step on ||B x - A x||^2.
  void train(const std::vector<double>& x) {
    check_dim(x);
    for (int r = 0; r < output_dim_; ++r) {
      const double res = residual(r, x);
      double* row = predictor_.data() + static_cast<std::size_t>(r) * input_dim_;
      const double step = 2.0 * learning_rate_ * res;
      for (int c = 0; c < input_dim_; ++c) row[c] -= step * x[c];
    }
  }

 private:
  void check_dim(const std::vector<double>& x) const {
    if (x.size() != static_cast<std::size_t>(input_dim_))
      throw std::invalid_argument("linear rnd: input dimension mismatch");
  }

  double residual(int r, const std::vector<double>& x) const {
    check_dim(x);
    const double* trow = target_.data() + static_cast<std::size_t>(r) * input_dim_;
    const double* prow = predictor_.data() + static_cast<std::size_t>(r) * input_dim_;
    double acc = 0.0;
    for (int c = 0; c < input_dim_; ++c) acc += (prow[c] - trow[c]) * x[c];
    return acc;
  }

  int input_dim_;
  int output_dim_;
  double learning_rate_;
  std::vector<double> target_;
  std::vector<double> predictor_;
};

// ---------------------------------------------------------------------------
// Generator selection
// ---------------------------------------------------------------------------

enum class IntrinsicKind { kNone, kRise, kRe3, kPseudoCount, kRnd, kNgu, kRide };

inline IntrinsicKind intrinsic_kind_from_string(const std::string& name) {
  if (name == "none") return IntrinsicKind::kNone;
  if (name == "rise") return IntrinsicKind::kRise;
  if (name == "re3") return IntrinsicKind::kRe3;
  if (name == "pseudo_count") return IntrinsicKind::kPseudoCount;
  if (name == "rnd") return IntrinsicKind::kRnd;
  if (name == "ngu") return IntrinsicKind::kNgu;
  if (name == "ride") return IntrinsicKind::kRide;
  throw std::invalid_argument("unknown intrinsic reward generator \"" + name +
                              "\"; valid names: none, rise, re3, pseudo_count, rnd, ngu, ride");
}

inline std::string to_string(IntrinsicKind kind) {
  switch (kind) {
    case IntrinsicKind::kNone: return "none";
    case IntrinsicKind::kRise: return "rise";
    case IntrinsicKind::kRe3: return "re3";
    case IntrinsicKind::kPseudoCount: return "pseudo_count";
    case IntrinsicKind::kRnd: return "rnd";
    case IntrinsicKind::kNgu: return "ngu";
    case IntrinsicKind::kRide: return "ride";
  }
  return "none";
}

namespace detail {

class RunningMean {
 public:
  void update(double x) { mean_ += (x - mean_) / static_cast<double>(++count_); }
  double value() const { return count_ == 0 ? 0.0 : mean_; }
  bool empty() const { return count_ == 0; }

 private:
  double mean_ = 0.0;
  std::uint64_t count_ = 0;
};

// Exact within-episode k-NN distances over a state-indexed embedding table.
// Duplicates are multiplicities of the same state, so the k-th neighbor
// distance only needs one pass over the distinct states visited this episode.
class EpisodeNoveltyBuffer {
 public:
  explicit EpisodeNoveltyBuffer(const std::vector<std::vector<double>>* state_embeddings)
      : embeddings_(state_embeddings), counts_(state_embeddings->size(), 0) {}

  void reset() {
    for (int s : distinct_) counts_[s] = 0;
    distinct_.clear();
    total_ = 0;
  }

  void add(int state) {
    if (counts_[state] == 0) distinct_.push_back(state);
    counts_[state] += 1;
    total_ += 1;
  }

  std::int64_t total() const { return total_; }
  std::int64_t count(int state) const { return counts_[state]; }

  // Distance from `state`'s embedding to its k-th nearest buffer entry, or
  // a negative value when the buffer holds fewer than k entries.
  double kth_distance(int state, int k) const {
    if (total_ < k) return -1.0;
    const std::vector<double>& query = (*embeddings_)[state];
    scratch_.clear();
    for (int s : distinct_) {
      double d2 = 0.0;
      const std::vector<double>& e = (*embeddings_)[s];
      for (std::size_t i = 0; i < e.size(); ++i) {
        const double diff = e[i] - query[i];
        d2 += diff * diff;
      }
      scratch_.push_back({d2, counts_[s]});
    }
    std::sort(scratch_.begin(), scratch_.end());
    std::int64_t seen = 0;
    for (const auto& [d2, mult] : scratch_) {
      seen += mult;
      if (seen >= k) return std::sqrt(d2);
    }
    return -1.0;
  }

 private:
  const std::vector<std::vector<double>>* embeddings_;
  std::vector<std::int64_t> counts_;
  std::vector<int> distinct_;
  std::int64_t total_ = 0;
  mutable std::vector<std::pair<double, std::int64_t>> scratch_;
};

}  // namespace detail

/// Stateful per-step reward generator for tabular agents. The embedding
/// table maps each state to the vector used for k-NN novelty; generators
/// with global state (pseudo-counts, distillation) persist across episodes
/// while episodic buffers reset with begin_episode.
class RewardGenerator {
 public:
  RewardGenerator(IntrinsicKind kind, const IntrinsicConfig& config,
                  std::vector<std::vector<double>> state_embeddings, std::uint64_t seed,
                  double ngu_beta_cap = 5.0)
      : kind_(kind),
        config_(config),
        embeddings_(std::move(state_embeddings)),
        novelty_(&embeddings_),
        episodic_counts_(embeddings_.size(), 0),
        ngu_beta_cap_(ngu_beta_cap) {
    config_.validate();
    if (embeddings_.empty()) throw std::invalid_argument("reward generator: empty embedding table");
    const int dim = static_cast<int>(embeddings_.front().size());
    switch (kind_) {
      case IntrinsicKind::kPseudoCount:
        pseudo_ = std::make_unique<PseudoCountModel>(static_cast<int>(embeddings_.size()));
        break;
      case IntrinsicKind::kRnd:
        rnd_ = std::make_unique<LinearRnd>(dim, config_.embedding_dim, seed);
        break;
      case IntrinsicKind::kNgu:
        rnd_ = std::make_unique<LinearRnd>(dim, config_.embedding_dim, seed);
        memory_ = std::make_unique<EpisodicMemory>(config_.k);
        break;
      default:
        break;
    }
  }

  IntrinsicKind kind() const { return kind_; }

  void begin_episode(int start_state) {
    if (kind_ == IntrinsicKind::kNone) return;
    novelty_.reset();
    for (int s : episodic_distinct_) episodic_counts_[s] = 0;
    episodic_distinct_.clear();
    if (memory_) memory_->reset();
    touch_episodic(start_state);
    episodic_counts_[start_state] += 1;
    novelty_.add(start_state);
    if (memory_) memory_->insert(embeddings_[start_state]);
  }

  /// Raw intrinsic reward r-hat for arriving in `next_state`; the caller
  /// scales it by the decayed coefficient when composing the total reward.
  double transition_bonus(int state, int next_state) {
    switch (kind_) {
      case IntrinsicKind::kNone:
        return 0.0;
      case IntrinsicKind::kRise:
      case IntrinsicKind::kRe3: {
        const double dist = novelty_.kth_distance(next_state, config_.k);
        novelty_.add(next_state);
        if (dist < 0.0) return 0.0;  // buffer still smaller than k
        if (kind_ == IntrinsicKind::kRise) {
          return dist <= kDuplicateDistanceFloor ? 0.0 : std::pow(dist, 1.0 - config_.alpha);
        }
        return std::log1p(dist);
      }
      case IntrinsicKind::kPseudoCount: {
        const PseudoCountResult res = pseudo_count_reward(*pseudo_, next_state);
        pseudo_->observe(next_state);
        return res.reward;
      }
      case IntrinsicKind::kRnd: {
        const double err = rnd_->reward(embeddings_[next_state]);
        rnd_->train(embeddings_[next_state]);
        return err;
      }
      case IntrinsicKind::kNgu: {
        const double episodic = memory_->pseudo_count_reward(embeddings_[next_state]);
        memory_->insert(embeddings_[next_state]);
        const double err = rnd_->reward(embeddings_[next_state]);
        rnd_->train(embeddings_[next_state]);
        rnd_error_mean_.update(err);
        const double lifelong = rnd_error_mean_.value() > 0.0 ? err / rnd_error_mean_.value() : 1.0;
        return ngu_mixed_reward(episodic, lifelong, ngu_beta_cap_);
      }
      case IntrinsicKind::kRide: {
        touch_episodic(next_state);
        episodic_counts_[next_state] += 1;
        return ride_reward(embeddings_[state], embeddings_[next_state], episodic_counts_[next_state]);
      }
    }
    return 0.0;
  }

 private:
  void touch_episodic(int state) {
    if (episodic_counts_[state] == 0) episodic_distinct_.push_back(state);
  }

  IntrinsicKind kind_;
  IntrinsicConfig config_;
  std::vector<std::vector<double>> embeddings_;
  detail::EpisodeNoveltyBuffer novelty_;
  std::vector<std::int64_t> episodic_counts_;
  std::vector<int> episodic_distinct_;
  std::unique_ptr<PseudoCountModel> pseudo_;
  std::unique_ptr<LinearRnd> rnd_;
  std::unique_ptr<EpisodicMemory> memory_;
  detail::RunningMean rnd_error_mean_;
  double ngu_beta_cap_;
};

}  // namespace rlex
