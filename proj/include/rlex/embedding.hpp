#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rlex/knn.hpp"
#include "rlex/rng.hpp"

namespace rlex {

/// Fixed random linear map R^n -> R^m. Entries are seeded Gaussians scaled
/// by 1/sqrt(n); rows can optionally be orthonormalised (m <= n), which makes
/// the map non-expansive.
class RandomProjectionEncoder {
 public:
  RandomProjectionEncoder(int input_dim, int embedding_dim, std::uint64_t seed,
                          bool orthonormal_rows = false)
      : input_dim_(input_dim), embedding_dim_(embedding_dim) {
    if (input_dim < 1 || embedding_dim < 1)
      throw std::invalid_argument("random projection: dimensions must be positive");
    if (orthonormal_rows && embedding_dim > input_dim)
      throw std::invalid_argument("random projection: orthonormal rows need m <= n");
    Rng rng(seed);
    weights_.resize(static_cast<std::size_t>(embedding_dim) * input_dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
    for (double& w : weights_) w = scale * rng.normal();
    if (orthonormal_rows) orthonormalise();
  }

  int input_dim() const { return input_dim_; }
  int embedding_dim() const { return embedding_dim_; }

  std::vector<double> encode(const std::vector<double>& observation) const {
    if (observation.size() != static_cast<std::size_t>(input_dim_))
      throw std::invalid_argument("encode: observation dimension mismatch");
    std::vector<double> out(embedding_dim_, 0.0);
    for (int r = 0; r < embedding_dim_; ++r) {
      const double* row = weights_.data() + static_cast<std::size_t>(r) * input_dim_;
      double acc = 0.0;
      for (int c = 0; c < input_dim_; ++c) acc += row[c] * observation[c];
      out[r] = acc;
    }
    return out;
  }

 private:
  void orthonormalise() {
    // Modified Gram-Schmidt on rows.
    for (int r = 0; r < embedding_dim_; ++r) {
      double* row = weights_.data() + static_cast<std::size_t>(r) * input_dim_;
      for (int prev = 0; prev < r; ++prev) {
        const double* other = weights_.data() + static_cast<std::size_t>(prev) * input_dim_;
        double proj = 0.0;
        for (int c = 0; c < input_dim_; ++c) proj += row[c] * other[c];
        for (int c = 0; c < input_dim_; ++c) row[c] -= proj * other[c];
      }
      double norm = 0.0;
      for (int c = 0; c < input_dim_; ++c) norm += row[c] * row[c];
      norm = std::sqrt(norm);
      if (norm < 1e-12) throw std::runtime_error("random projection: degenerate row during orthonormalisation");
      for (int c = 0; c < input_dim_; ++c) row[c] /= norm;
    }
  }

  int input_dim_;
  int embedding_dim_;
  std::vector<double> weights_;
};

/// Standard basis vector for a tabular state.
inline std::vector<double> one_hot_encode(int state_id, int n_states) {
  if (state_id < 0 || state_id >= n_states) throw std::invalid_argument("one_hot_encode: state out of range");
  std::vector<double> v(n_states, 0.0);
  v[state_id] = 1.0;
  return v;
}

/// Within-episode embedding buffer with the inverse-quadratic kernel
/// pseudo-count. Squared neighbor distances are normalised by their running
/// mean; the reward is 1/sqrt(sum of kernel values + c).
class EpisodicMemory {
 public:
  explicit EpisodicMemory(int neighbor_order, std::size_t capacity = 30000, double kernel_epsilon = 1e-3,
                          double count_constant = 1e-3, double max_reward = 100.0)
      : k_(neighbor_order),
        capacity_(capacity),
        kernel_epsilon_(kernel_epsilon),
        count_constant_(count_constant),
        max_reward_(max_reward) {
    if (neighbor_order < 1) throw std::invalid_argument("episodic memory: neighbor order must be >= 1");
    if (capacity == 0) throw std::invalid_argument("episodic memory: capacity must be positive");
    if (count_constant < 0.0) throw std::invalid_argument("episodic memory: count constant must be >= 0");
  }

  std::size_t size() const { return buffer_.size(); }

  void reset() {
    buffer_.clear();
    next_slot_ = 0;
    distance_mean_ = 0.0;
    distance_samples_ = 0;
  }

  void insert(const std::vector<double>& embedding) {
    if (buffer_.size() < capacity_) {
      buffer_.push_back(embedding);
    } else {
      buffer_[next_slot_] = embedding;  // ring-buffer eviction
      next_slot_ = (next_slot_ + 1) % capacity_;
    }
  }

  /// Pseudo-count reward of a candidate embedding against the buffer.
  double pseudo_count_reward(const std::vector<double>& embedding) {
    if (buffer_.empty()) {
      if (count_constant_ == 0.0) return max_reward_;
      return 1.0 / std::sqrt(count_constant_);
    }
    const std::size_t used = std::min<std::size_t>(k_, buffer_.size());
    // Exact brute-force k-NN over the buffer.
    std::vector<double> best;
    best.reserve(used + 1);
    for (const auto& e : buffer_) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < e.size(); ++i) {
        const double diff = e[i] - embedding[i];
        d2 += diff * diff;
      }
      if (best.size() < used) {
        best.push_back(d2);
        std::push_heap(best.begin(), best.end());
      } else if (d2 < best.front()) {
        std::pop_heap(best.begin(), best.end());
        best.back() = d2;
        std::push_heap(best.begin(), best.end());
      }
    }
    double kernel_sum = 0.0;
    for (double d2 : best) {
      double normalised;
      if (distance_mean_ > 0.0) {
        normalised = d2 / distance_mean_;
      } else {
        normalised = (d2 == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
      }
      kernel_sum += std::isinf(normalised) ? 0.0 : kernel_epsilon_ / (normalised + kernel_epsilon_);
    }
    // The running mean absorbs this query's neighbor distances only after
    // the kernel is computed, so an outlier cannot deflate its own novelty.
    for (double d2 : best) {
      distance_mean_ += (d2 - distance_mean_) / static_cast<double>(++distance_samples_);
    }
    const double denom = kernel_sum + count_constant_;
    if (denom <= 0.0) return max_reward_;
    return std::min(1.0 / std::sqrt(denom), max_reward_);
  }

 private:
  int k_;
  std::size_t capacity_;
  double kernel_epsilon_;
  double count_constant_;
  double max_reward_;
  std::vector<std::vector<double>> buffer_;
  std::size_t next_slot_ = 0;
  double distance_mean_ = 0.0;
  std::uint64_t distance_samples_ = 0;
};

}  // namespace rlex
