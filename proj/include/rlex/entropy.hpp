#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rlex/core_mdp.hpp"
#include "rlex/knn.hpp"
#include "rlex/rng.hpp"
#include "rlex/special.hpp"

namespace rlex {

// Distances this small are treated as exact duplicates: floored inside
// logarithms, zero per-point reward.
inline constexpr double kDuplicateDistanceFloor = 1e-12;

/// Entropy order alpha in (0,1) or (1,inf).
struct RenyiOrder {
  double alpha;

  explicit RenyiOrder(double a) : alpha(a) {
    if (!(a > 0.0) || a == 1.0) throw std::invalid_argument("renyi order: alpha must lie in (0,1) or (1,inf)");
  }
};

/// Parameters of the smoothed entropy surrogate; beta() is its smoothness
/// constant alpha * sigma^(alpha-2).
struct SmoothedEntropyParams {
  double alpha;
  double sigma;

  SmoothedEntropyParams(double a, double s) : alpha(a), sigma(s) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("smoothed entropy: alpha must lie in (0,1)");
    if (!(s > 0.0)) throw std::invalid_argument("smoothed entropy: sigma must be positive");
  }

  double beta() const { return alpha * std::pow(sigma, alpha - 2.0); }
};

/// N sample vectors in R^m together with the neighbor order k, 1 <= k < N.
struct SampleSet {
  PointSet points;
  int k = 1;

  SampleSet(PointSet p, int neighbor_order) : points(std::move(p)), k(neighbor_order) {
    if (points.count < 2) throw std::invalid_argument("sample set: need at least two points");
    if (points.dim < 1) throw std::invalid_argument("sample set: dimension must be >= 1");
    if (k < 1 || static_cast<std::size_t>(k) >= points.count)
      throw std::invalid_argument("sample set: need 1 <= k < N");
  }
};

/// Shannon entropy of a discrete distribution, natural log, 0 log 0 := 0.
inline double shannon_entropy_discrete(const StateDistribution& d) {
  d.validate();
  double h = 0.0;
  for (double p : d.probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

/// Shannon entropy of one policy row (or any probability vector).
inline double action_entropy(const std::vector<double>& row) {
  StateDistribution d(row);
  return shannon_entropy_discrete(d);
}

/// Discrete Renyi entropy (1/(1-alpha)) log sum_i d_i^alpha.
inline double renyi_entropy_discrete(const StateDistribution& d, RenyiOrder order) {
  d.validate();
  double total = 0.0;
  for (double p : d.probs) {
    if (p > 0.0) total += std::pow(p, order.alpha);
  }
  return std::log(total) / (1.0 - order.alpha);
}

/// Smoothed surrogate (1/(1-alpha)) sum_i (d_i + sigma)^alpha.
inline double smoothed_renyi(const StateDistribution& d, const SmoothedEntropyParams& params) {
  double total = 0.0;
  for (double p : d.probs) total += std::pow(p + params.sigma, params.alpha);
  return total / (1.0 - params.alpha);
}

/// Gradient of the smoothed surrogate: component s is
/// (alpha/(1-alpha)) (d_s + sigma)^(alpha-1); strictly positive and
/// decreasing in d_s.
inline std::vector<double> smoothed_renyi_gradient(const StateDistribution& d,
                                                   const SmoothedEntropyParams& params) {
  std::vector<double> grad(d.probs.size());
  const double scale = params.alpha / (1.0 - params.alpha);
  for (std::size_t i = 0; i < d.probs.size(); ++i)
    grad[i] = scale * std::pow(d.probs[i] + params.sigma, params.alpha - 1.0);
  return grad;
}

struct ShannonEstimate {
  double value = 0.0;         // full-constant estimate
  double proportional = 0.0;  // (1/T) sum log ||x_i - x~_i||
};

/// k-NN Shannon entropy estimate with full constants:
///   (1/T) sum log( T eps_i^m pi^{m/2} / (k Gamma(m/2+1)) ) + log k - digamma(k).
inline ShannonEstimate knn_shannon_estimate(const SampleSet& samples,
                                            KnnBackend backend = KnnBackend::kAuto) {
  const std::size_t n = samples.points.count;
  const int m = static_cast<int>(samples.points.dim);
  const std::vector<double> eps = kth_neighbor_distances(samples.points, samples.k, backend);
  double log_sum = 0.0;
  for (double e : eps) log_sum += std::log(std::max(e, kDuplicateDistanceFloor));
  const double mean_log = log_sum / static_cast<double>(n);
  ShannonEstimate out;
  out.proportional = mean_log;
  out.value = std::log(static_cast<double>(n)) + std::log(unit_ball_volume(m)) + m * mean_log -
              digamma(static_cast<double>(samples.k));
  return out;
}

/// The constant C_k = [Gamma(k) / Gamma(k + 1 - alpha)]^(1/(1-alpha)).
inline double renyi_estimator_ck(int k, RenyiOrder order) {
  const double arg = k + 1.0 - order.alpha;
  if (!(arg > 0.0)) throw std::invalid_argument("renyi estimator: k + 1 - alpha must be positive");
  return std::pow(gamma_fn(static_cast<double>(k)) / gamma_fn(arg), 1.0 / (1.0 - order.alpha));
}

struct RenyiEstimate {
  double statistic = 0.0;  // sample mean of [(N-1) V_m C_k eps^m]^(1-alpha)
  double entropy = 0.0;    // log(statistic) / (1 - alpha)
  std::vector<double> per_point_rewards;  // eps_i^(1-alpha), 0 for duplicates
};

/// k-NN Renyi entropy estimate for alpha in (0,1). The printed sample-mean
/// statistic converges to the alpha-integral of the density, so the entropy
/// value is reported through the log/(1-alpha) transform; both are exposed.
inline RenyiEstimate knn_renyi_estimate(const SampleSet& samples, RenyiOrder order,
                                        KnnBackend backend = KnnBackend::kAuto) {
  if (!(order.alpha < 1.0)) throw std::invalid_argument("renyi estimator: requires alpha in (0,1)");
  const std::size_t n = samples.points.count;
  const int m = static_cast<int>(samples.points.dim);
  const double one_minus_alpha = 1.0 - order.alpha;
  const double ck = renyi_estimator_ck(samples.k, order);
  const double vm = unit_ball_volume(m);
  const std::vector<double> eps = kth_neighbor_distances(samples.points, samples.k, backend);
  RenyiEstimate out;
  out.per_point_rewards.reserve(n);
  double acc = 0.0;
  for (double e : eps) {
    const double floored = std::max(e, kDuplicateDistanceFloor);
    acc += std::pow((n - 1.0) * vm * ck * std::pow(floored, m), one_minus_alpha);
    out.per_point_rewards.push_back(e <= kDuplicateDistanceFloor ? 0.0 : std::pow(e, one_minus_alpha));
  }
  out.statistic = acc / static_cast<double>(n);
  out.entropy = std::log(out.statistic) / one_minus_alpha;
  return out;
}

struct KSearchResult {
  int k = 1;
  std::vector<double> dispersion;  // delta[k-1] for k = 1..k_max
};

/// Subset-stability search for the neighbor order (the min-max ratio rule).
/// Points are dealt into K random subsets (seeded); for each k the per-subset
/// entropy estimates are compared through
///   delta = (max - min) / (|mean| + 1e-12),
/// falling back to (max - min) when |mean| < 1e-9 so that differential
/// entropies of either sign stay comparable. Lowest k wins ties.
inline KSearchResult search_k(const PointSet& points, int subset_count, int k_max, RenyiOrder order,
                              std::uint64_t seed, KnnBackend backend = KnnBackend::kAuto) {
  if (subset_count < 2) throw std::invalid_argument("search_k: need at least two subsets");
  if (k_max < 1) throw std::invalid_argument("search_k: k_max must be >= 1");
  if (points.count < static_cast<std::size_t>(subset_count) * (k_max + 1))
    throw std::invalid_argument("search_k: need at least subsets*(k_max+1) samples");

  std::vector<std::size_t> order_ix(points.count);
  std::iota(order_ix.begin(), order_ix.end(), 0);
  Rng rng(seed);
  for (std::size_t i = points.count; i > 1; --i)
    std::swap(order_ix[i - 1], order_ix[rng.uniform_int(static_cast<int>(i))]);

  // Deal the shuffled indices into contiguous blocks of near-equal size.
  std::vector<PointSet> subsets;
  subsets.reserve(subset_count);
  const std::size_t base = points.count / subset_count;
  std::size_t extra = points.count % subset_count;
  std::size_t cursor = 0;
  for (int s = 0; s < subset_count; ++s) {
    const std::size_t size = base + (extra > 0 ? 1 : 0);
    if (extra > 0) --extra;
    PointSet sub(size, points.dim);
    for (std::size_t i = 0; i < size; ++i)
      std::copy_n(points.point(order_ix[cursor + i]), points.dim, sub.point(i));
    cursor += size;
    subsets.push_back(std::move(sub));
  }

  // One neighbor table per subset serves every k.
  std::vector<std::vector<std::vector<double>>> tables;
  tables.reserve(subset_count);
  for (const auto& sub : subsets) tables.push_back(neighbor_distance_table(sub, k_max, backend));

  KSearchResult result;
  result.dispersion.resize(k_max);
  double best = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double mean = 0.0;
    for (int s = 0; s < subset_count; ++s) {
      const std::size_t n = subsets[s].count;
      const double vm = unit_ball_volume(static_cast<int>(points.dim));
      const double ck = renyi_estimator_ck(k, order);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double e = std::max(tables[s][i][k - 1], kDuplicateDistanceFloor);
        acc += std::pow((n - 1.0) * vm * ck * std::pow(e, static_cast<double>(points.dim)),
                        1.0 - order.alpha);
      }
      const double entropy = std::log(acc / static_cast<double>(n)) / (1.0 - order.alpha);
      lo = std::min(lo, entropy);
      hi = std::max(hi, entropy);
      mean += entropy / subset_count;
    }
    const double spread = hi - lo;
    const double delta = std::fabs(mean) < 1e-9 ? spread : spread / (std::fabs(mean) + 1e-12);
    result.dispersion[k - 1] = delta;
    if (k == 1 || delta < best) {
      best = delta;
      result.k = k;
    }
  }
  return result;
}

}  // namespace rlex
