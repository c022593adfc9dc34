#pragma once

// Gamma marginal likelihoods of a distance matrix given a partition.
//
// Quadratic mode models every pair: within-cluster distances are
// Gamma(delta1, lambda_k) with lambda_k ~ Gamma(mu, beta), between-cluster
// distances Gamma(delta2, theta_kt) with theta_kt ~ Gamma(zeta, gamma_rate).
// Linear mode models only medoid-to-member distances plus, optionally, a
// Gamma(delta2, theta_rate) repulsion between medoids.

#include <cstddef>
#include <vector>

#include "bdc/core.hpp"

namespace bdc {

enum class LikelihoodMode { Quadratic, Linear };

struct LikelihoodConfig {
  double delta1 = 0.5;
  double delta2 = 2.0;
  double mu = 1.0;
  double beta = 1.0;
  double zeta = 1.0;
  double gamma_rate = 1.0;
  double theta_rate = 1.0;
  LikelihoodMode mode = LikelihoodMode::Quadratic;
  bool repulsion = true;

  /// Throws InvalidConfig unless 0 < delta1 < 1 < delta2 and every other
  /// shape and rate is positive.
  void validate() const;
};

/// Sufficient statistics of one block of distances.
struct BlockStats {
  double n_pairs = 0.0;
  double sum_log = 0.0;
  double sum = 0.0;

  void add(double d, double log_d) noexcept {
    n_pairs += 1.0;
    sum_log += log_d;
    sum += d;
  }
  BlockStats &operator+=(const BlockStats &o) noexcept {
    n_pairs += o.n_pairs;
    sum_log += o.sum_log;
    sum += o.sum;
    return *this;
  }
  BlockStats &operator-=(const BlockStats &o) noexcept {
    n_pairs -= o.n_pairs;
    sum_log -= o.sum_log;
    sum -= o.sum;
    return *this;
  }
};

/// ln of int prod_l Gamma(d_l; shape, r) Gamma(r; prior_shape, prior_rate) dr.
/// Zero for an empty block.
[[nodiscard]] double log_block_marginal(const BlockStats &s, double shape,
                                        double prior_shape, double prior_rate);

[[nodiscard]] double loglik_quadratic(const DistanceMatrix &d, const Partition &t,
                                      const LikelihoodConfig &cfg);

/// Throws InconsistentPartition when t cannot have been induced by medoids.
[[nodiscard]] double loglik_linear(const DistanceMatrix &d, const MedoidSet &medoids,
                                   const Partition &t, const LikelihoodConfig &cfg);

/// Induces the partition and dispatches on cfg.mode.
[[nodiscard]] double loglik(const DistanceMatrix &d, const MedoidSet &medoids,
                            const LikelihoodConfig &cfg);

/// Repeated evaluation against one matrix; log-distances are computed once.
class LikelihoodEvaluator {
public:
  LikelihoodEvaluator(const DistanceMatrix &d, LikelihoodConfig cfg);

  [[nodiscard]] const DistanceMatrix &distances() const noexcept { return *d_; }
  [[nodiscard]] const LikelihoodConfig &config() const noexcept { return cfg_; }
  [[nodiscard]] double log_distance(std::size_t i, std::size_t j) const noexcept {
    return log_d_[i * n_ + j];
  }
  [[nodiscard]] double distance(std::size_t i, std::size_t j) const noexcept {
    return d_->positive(i, j);
  }

  [[nodiscard]] double quadratic(const Partition &t) const;
  /// No consistency check; t must be induced by medoids.
  [[nodiscard]] double linear(const MedoidSet &medoids, const Partition &t) const;
  [[nodiscard]] double operator()(const MedoidSet &medoids, const Partition &t) const;

private:
  const DistanceMatrix *d_;
  LikelihoodConfig cfg_;
  std::size_t n_;
  std::vector<double> log_d_;
};

/// Label-based bookkeeping of quadratic-mode block statistics, updated one
/// object at a time. Used by the partition Gibbs samplers.
class ClusterStats {
public:
  ClusterStats(const LikelihoodEvaluator &eval, std::vector<std::size_t> labels);

  [[nodiscard]] std::size_t k() const noexcept { return sizes_.size(); }
  [[nodiscard]] std::size_t size(std::size_t c) const noexcept { return sizes_[c]; }
  [[nodiscard]] const std::vector<std::size_t> &sizes() const noexcept { return sizes_; }
  [[nodiscard]] const std::vector<std::size_t> &labels() const noexcept { return labels_; }

  /// Current total log-likelihood.
  [[nodiscard]] double total() const;

  /// Takes object j out of its cluster (dropping the cluster if it empties)
  /// and fills `log_weights` with the log-likelihood change of placing j into
  /// each existing cluster, then into a new one (last entry).
  void detach(std::size_t j, std::vector<double> &log_weights);
  /// Places the detached object into cluster c; c == k() opens a new cluster.
  void attach(std::size_t j, std::size_t c);

private:
  [[nodiscard]] double within(const BlockStats &s) const;
  [[nodiscard]] double between(const BlockStats &s) const;
  BlockStats &pair(std::size_t a, std::size_t b) { return between_[a * cap_ + b]; }
  void grow();
  void drop_cluster(std::size_t c);

  const LikelihoodEvaluator *eval_;
  std::vector<std::size_t> labels_;
  std::vector<std::size_t> sizes_;
  std::vector<BlockStats> within_;
  std::vector<BlockStats> between_; // cap_ x cap_, symmetric
  std::size_t cap_ = 0;
  std::vector<BlockStats> to_cluster_; // detached object's stats per cluster
  std::size_t detached_ = static_cast<std::size_t>(-1);
};

} // namespace bdc
