#include "bdc/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bdc/numerics.hpp"

namespace bdc {

void LikelihoodConfig::validate() const {
  auto fail = [](const std::string &what) {
    throw Error(ErrorCode::InvalidConfig, what);
  };
  if (!(delta1 > 0.0 && delta1 < 1.0)) fail("delta1 must lie in (0, 1)");
  if (!(delta2 > 1.0) || !std::isfinite(delta2)) fail("delta2 must exceed 1");
  for (double v : {mu, beta, zeta, gamma_rate, theta_rate}) {
    if (!(v > 0.0) || !std::isfinite(v)) fail("shapes and rates must be positive");
  }
}

double log_block_marginal(const BlockStats &s, double shape, double prior_shape,
                          double prior_rate) {
  if (s.n_pairs <= 0.0) return 0.0;
  const double post_shape = prior_shape + s.n_pairs * shape;
  return -s.n_pairs * numerics::log_gamma_fn(shape) + numerics::log_gamma_fn(post_shape) -
         numerics::log_gamma_fn(prior_shape) + prior_shape * std::log(prior_rate) +
         (shape - 1.0) * s.sum_log - post_shape * std::log(prior_rate + s.sum);
}

namespace {

template <typename LogD>
double quadratic_impl(const DistanceMatrix &d, const Partition &t,
                      const LikelihoodConfig &cfg, LogD log_d) {
  const std::size_t n = d.size();
  const std::size_t k = t.k();
  std::vector<BlockStats> within(k);
  std::vector<BlockStats> between(cfg.repulsion ? k * k : 0);
  const auto labels = t.labels();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t li = labels[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t lj = labels[j];
      if (li == lj) {
        within[li].add(d.positive(i, j), log_d(i, j));
      } else if (cfg.repulsion) {
        const std::size_t a = std::min(li, lj);
        const std::size_t b = std::max(li, lj);
        between[a * k + b].add(d.positive(i, j), log_d(i, j));
      }
    }
  }
  double total = 0.0;
  for (const auto &s : within) total += log_block_marginal(s, cfg.delta1, cfg.mu, cfg.beta);
  for (const auto &s : between) {
    total += log_block_marginal(s, cfg.delta2, cfg.zeta, cfg.gamma_rate);
  }
  return total;
}

template <typename LogD>
double linear_impl(const DistanceMatrix &d, const MedoidSet &medoids, const Partition &t,
                   const LikelihoodConfig &cfg, LogD log_d) {
  const std::size_t k = medoids.size();
  std::vector<BlockStats> cohesion(k);
  const auto labels = t.labels();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const std::size_t m = medoids[labels[j]];
    if (m != j) cohesion[labels[j]].add(d.positive(m, j), log_d(m, j));
  }
  double total = 0.0;
  for (const auto &s : cohesion) total += log_block_marginal(s, cfg.delta1, cfg.mu, cfg.beta);
  if (cfg.repulsion && k > 1) {
    const double norm = cfg.delta2 * std::log(cfg.theta_rate) -
                        numerics::log_gamma_fn(cfg.delta2);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        const double x = d.positive(medoids[a], medoids[b]);
        total += norm + (cfg.delta2 - 1.0) * log_d(medoids[a], medoids[b]) -
                 cfg.theta_rate * x;
      }
    }
  }
  return total;
}

void check_linear_consistency(const DistanceMatrix &d, const MedoidSet &medoids,
                              const Partition &t) {
  if (t.size() != d.size() || medoids.universe() != d.size() || t.k() != medoids.size()) {
    throw Error(ErrorCode::InconsistentPartition,
                "partition and medoid set disagree in size or cluster count");
  }
  for (std::size_t pos = 0; pos < medoids.size(); ++pos) {
    if (t.label(medoids[pos]) != pos) {
      throw Error(ErrorCode::InconsistentPartition,
                  "medoid " + std::to_string(medoids[pos]) + " is not in its own cluster");
    }
  }
}

} // namespace

double loglik_quadratic(const DistanceMatrix &d, const Partition &t,
                        const LikelihoodConfig &cfg) {
  cfg.validate();
  if (t.size() != d.size()) {
    throw Error(ErrorCode::LengthMismatch, "partition size differs from matrix size");
  }
  return quadratic_impl(d, t, cfg,
                        [&](std::size_t i, std::size_t j) { return std::log(d.positive(i, j)); });
}

double loglik_linear(const DistanceMatrix &d, const MedoidSet &medoids, const Partition &t,
                     const LikelihoodConfig &cfg) {
  cfg.validate();
  check_linear_consistency(d, medoids, t);
  return linear_impl(d, medoids, t, cfg,
                     [&](std::size_t i, std::size_t j) { return std::log(d.positive(i, j)); });
}

double loglik(const DistanceMatrix &d, const MedoidSet &medoids, const LikelihoodConfig &cfg) {
  const Partition t = induce_partition(d, medoids);
  return cfg.mode == LikelihoodMode::Quadratic ? loglik_quadratic(d, t, cfg)
                                               : loglik_linear(d, medoids, t, cfg);
}

// ---------------------------------------------------------------------------
// LikelihoodEvaluator

LikelihoodEvaluator::LikelihoodEvaluator(const DistanceMatrix &d, LikelihoodConfig cfg)
    : d_(&d), cfg_(cfg), n_(d.size()), log_d_(n_ * n_, 0.0) {
  cfg_.validate();
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (i != j) log_d_[i * n_ + j] = std::log(d.positive(i, j));
    }
  }
}

double LikelihoodEvaluator::quadratic(const Partition &t) const {
  return quadratic_impl(*d_, t, cfg_,
                        [this](std::size_t i, std::size_t j) { return log_distance(i, j); });
}

double LikelihoodEvaluator::linear(const MedoidSet &medoids, const Partition &t) const {
  return linear_impl(*d_, medoids, t, cfg_,
                     [this](std::size_t i, std::size_t j) { return log_distance(i, j); });
}

double LikelihoodEvaluator::operator()(const MedoidSet &medoids, const Partition &t) const {
  return cfg_.mode == LikelihoodMode::Quadratic ? quadratic(t) : linear(medoids, t);
}

// ---------------------------------------------------------------------------
// ClusterStats

ClusterStats::ClusterStats(const LikelihoodEvaluator &eval, std::vector<std::size_t> labels)
    : eval_(&eval) {
  const Partition p = Partition::from_labels(std::span<const std::size_t>(labels));
  labels_.assign(p.labels().begin(), p.labels().end());
  const std::size_t k = p.k();
  sizes_ = p.sizes();
  within_.assign(k, {});
  cap_ = std::max<std::size_t>(8, 2 * k);
  between_.assign(cap_ * cap_, {});
  const std::size_t n = labels_.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t a = labels_[i];
      const std::size_t b = labels_[j];
      const double x = eval.distance(i, j);
      const double lx = eval.log_distance(i, j);
      if (a == b) {
        within_[a].add(x, lx);
      } else {
        pair(a, b).add(x, lx);
        pair(b, a).add(x, lx);
      }
    }
  }
}

double ClusterStats::within(const BlockStats &s) const {
  const auto &c = eval_->config();
  return log_block_marginal(s, c.delta1, c.mu, c.beta);
}

double ClusterStats::between(const BlockStats &s) const {
  const auto &c = eval_->config();
  return log_block_marginal(s, c.delta2, c.zeta, c.gamma_rate);
}

double ClusterStats::total() const {
  const bool rep = eval_->config().repulsion;
  double sum = 0.0;
  for (std::size_t a = 0; a < k(); ++a) {
    sum += within(within_[a]);
    if (!rep) continue;
    for (std::size_t b = a + 1; b < k(); ++b) sum += between(between_[a * cap_ + b]);
  }
  return sum;
}

void ClusterStats::grow() {
  const std::size_t cap = 2 * cap_;
  std::vector<BlockStats> next(cap * cap);
  for (std::size_t a = 0; a < cap_; ++a) {
    for (std::size_t b = 0; b < cap_; ++b) next[a * cap + b] = between_[a * cap_ + b];
  }
  between_ = std::move(next);
  cap_ = cap;
}

void ClusterStats::drop_cluster(std::size_t c) {
  const std::size_t last = k() - 1;
  if (c != last) {
    for (auto &l : labels_) {
      if (l == last) l = c;
    }
    sizes_[c] = sizes_[last];
    within_[c] = within_[last];
    to_cluster_[c] = to_cluster_[last];
    for (std::size_t t = 0; t < last; ++t) {
      if (t == c) continue;
      pair(c, t) = pair(last, t);
      pair(t, c) = pair(t, last);
    }
  }
  for (std::size_t t = 0; t <= last; ++t) {
    pair(last, t) = {};
    pair(t, last) = {};
  }
  pair(c, c) = {};
  sizes_.pop_back();
  within_.pop_back();
  to_cluster_.pop_back();
}

void ClusterStats::detach(std::size_t j, std::vector<double> &log_weights) {
  const std::size_t a = labels_[j];
  to_cluster_.assign(k(), {});
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (i != j) to_cluster_[labels_[i]].add(eval_->distance(i, j), eval_->log_distance(i, j));
  }
  within_[a] -= to_cluster_[a];
  for (std::size_t t = 0; t < k(); ++t) {
    if (t == a) continue;
    pair(a, t) -= to_cluster_[t];
    pair(t, a) -= to_cluster_[t];
  }
  --sizes_[a];
  labels_[j] = static_cast<std::size_t>(-1);
  if (sizes_[a] == 0) drop_cluster(a);
  detached_ = j;

  const bool rep = eval_->config().repulsion;
  const std::size_t kk = k();
  log_weights.assign(kk + 1, 0.0);
  double open_new = 0.0;
  if (rep) {
    for (std::size_t t = 0; t < kk; ++t) open_new += between(to_cluster_[t]);
  }
  for (std::size_t c = 0; c < kk; ++c) {
    BlockStats w = within_[c];
    w += to_cluster_[c];
    double delta = within(w) - within(within_[c]);
    if (rep) {
      for (std::size_t t = 0; t < kk; ++t) {
        if (t == c) continue;
        BlockStats b = between_[c * cap_ + t];
        b += to_cluster_[t];
        delta += between(b) - between(between_[c * cap_ + t]);
      }
    }
    log_weights[c] = delta;
  }
  log_weights[kk] = open_new;
}

void ClusterStats::attach(std::size_t j, std::size_t c) {
  if (j != detached_) {
    throw Error(ErrorCode::InvalidConfig, "attach called for an object that is not detached");
  }
  if (c == k()) {
    if (c + 1 > cap_) grow();
    sizes_.push_back(0);
    within_.emplace_back();
    to_cluster_.emplace_back();
  }
  within_[c] += to_cluster_[c];
  for (std::size_t t = 0; t < k(); ++t) {
    if (t == c) continue;
    pair(c, t) += to_cluster_[t];
    pair(t, c) += to_cluster_[t];
  }
  ++sizes_[c];
  labels_[j] = c;
  detached_ = static_cast<std::size_t>(-1);
}

} // namespace bdc
