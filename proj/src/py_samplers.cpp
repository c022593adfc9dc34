#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bdc/samplers.hpp"
#include "sampler_detail.hpp"

namespace bdc {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

void require_quadratic(const LikelihoodConfig &cfg) {
  cfg.validate();
  if (cfg.mode != LikelihoodMode::Quadratic) {
    throw Error(ErrorCode::InvalidConfig, "PY samplers support the quadratic likelihood only");
  }
}

std::vector<std::size_t> initial_labels(const DistanceMatrix &d, const ChainConfig &chain,
                                        std::mt19937_64 &rng) {
  const MedoidSet m = initial_medoids(d, chain.init, rng);
  const Partition p = induce_partition(d, m);
  return {p.labels().begin(), p.labels().end()};
}

// Adds log EPPF seating weights to the likelihood weights from detach():
// existing block c gets n_c - sigma, a new block M + K sigma. The common
// denominator is dropped.
void add_seating(std::vector<double> &w, const ClusterStats &s, const PYConfig &py) {
  const std::size_t k = s.k();
  for (std::size_t c = 0; c < k; ++c) {
    w[c] += std::log(static_cast<double>(s.size(c)) - py.discount);
  }
  w[k] += std::log(py.m + static_cast<double>(k) * py.discount);
}

double log_post(const ClusterStats &s, const PYConfig &py, bool prior_only) {
  return (prior_only ? 0.0 : s.total()) + log_py_eppf(s.sizes(), py);
}

} // namespace

TraceSet run_py_independent(const DistanceMatrix &d, const LikelihoodConfig &cfg,
                            const PYConfig &py, const ChainConfig &chain) {
  chain.validate();
  require_quadratic(cfg);
  py.validate();
  std::mt19937_64 rng(chain.seed);
  const LikelihoodEvaluator eval(d, cfg);
  ClusterStats stats(eval, initial_labels(d, chain, rng));
  TraceSet trace;
  trace.n = d.size();
  std::vector<double> w;
  for (std::size_t t = 1; t <= chain.iterations; ++t) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      stats.detach(j, w);
      if (chain.prior_only) std::fill(w.begin(), w.end(), 0.0);
      add_seating(w, stats, py);
      stats.attach(j, detail::sample_log_weights(w, rng));
    }
    if (detail::retained(t, chain)) {
      trace.iteration.push_back(t);
      trace.labels[0].push_back(stats.labels());
      trace.log_post.push_back(log_post(stats, py, chain.prior_only));
    }
  }
  return trace;
}

TraceSet run_py_dependent(const MultiViewData &mv, const LikelihoodConfig &cfg1,
                          const LikelihoodConfig &cfg2, const PYConfig &py,
                          const AlphaPriorConfig &alpha_prior, const ChainConfig &chain,
                          const PyDependentOptions &opts) {
  chain.validate();
  require_quadratic(cfg1);
  require_quadratic(cfg2);
  py.validate();
  alpha_prior.validate();
  if (opts.fixed_alpha && !(*opts.fixed_alpha >= 0.0 && *opts.fixed_alpha <= 1.0)) {
    throw Error(ErrorCode::OutOfRangeProbability, "fixed alpha must lie in [0, 1]");
  }
  const std::size_t n = mv.size();
  std::mt19937_64 rng(chain.seed);
  const LikelihoodEvaluator e1(mv.d1, cfg1);
  const LikelihoodEvaluator e2(mv.d2, cfg2);
  const auto init = initial_labels(mv.d1, chain, rng);
  ClusterStats s1(e1, init);
  ClusterStats s2(e2, init);
  double alpha = opts.fixed_alpha ? *opts.fixed_alpha
                                  : alpha_prior.a / (alpha_prior.a + alpha_prior.b);
  // kappa_i = 1: object i keeps its layer-1 allocation in layer 2.
  std::vector<char> kappa(n, 0);
  for (std::size_t i = 0; i < n; ++i) kappa[i] = detail::uniform01(rng) < alpha ? 1 : 0;

  TraceSet trace;
  trace.n = n;
  trace.layers = 2;
  std::vector<double> w;
  std::vector<std::size_t> r_count; // per cluster, members with kappa = 1
  for (std::size_t t = 1; t <= chain.iterations; ++t) {
    // kappa
    for (std::size_t i = 0; i < n; ++i) {
      const auto &z1 = s1.labels();
      const auto &z2 = s2.labels();
      std::size_t r = 0;
      std::size_t same2 = 0;
      bool compatible = true;
      r_count.assign(s2.k(), 0);
      for (std::size_t l = 0; l < n; ++l) {
        if (l == i || !kappa[l]) continue;
        ++r;
        ++r_count[z2[l]];
        const bool with1 = z1[l] == z1[i];
        const bool with2 = z2[l] == z2[i];
        if (with2) ++same2;
        if (with1 != with2) compatible = false;
      }
      const std::size_t blocks =
          static_cast<std::size_t>(std::count_if(r_count.begin(), r_count.end(),
                                                 [](std::size_t c) { return c > 0; }));
      const double denom = py.m + static_cast<double>(r);
      const double seat = same2 > 0
                              ? (static_cast<double>(same2) - py.discount) / denom
                              : (py.m + static_cast<double>(blocks) * py.discount) / denom;
      const double on = compatible ? alpha : 0.0;
      const double off = (1.0 - alpha) * seat;
      const double p_on = on + off > 0.0 ? on / (on + off) : 0.0;
      kappa[i] = detail::uniform01(rng) < p_on ? 1 : 0;
    }

    // z2 for objects free to move
    for (std::size_t j = 0; j < n; ++j) {
      if (kappa[j]) continue;
      s2.detach(j, w);
      if (chain.prior_only) std::fill(w.begin(), w.end(), 0.0);
      add_seating(w, s2, py);
      s2.attach(j, detail::sample_log_weights(w, rng));
    }

    // z1 for everyone, keeping layer 1 and layer 2 equal on kappa = 1
    for (std::size_t j = 0; j < n; ++j) {
      s1.detach(j, w);
      if (chain.prior_only) std::fill(w.begin(), w.end(), 0.0);
      add_seating(w, s1, py);
      if (kappa[j]) {
        const auto &z1 = s1.labels();
        const auto &z2 = s2.labels();
        std::size_t forced = kNone;
        r_count.assign(s1.k(), 0);
        for (std::size_t l = 0; l < n; ++l) {
          if (l == j || !kappa[l]) continue;
          ++r_count[z1[l]];
          if (z2[l] == z2[j]) forced = z1[l];
        }
        const double ninf = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < s1.k(); ++c) {
          const bool allowed = forced != kNone ? c == forced : r_count[c] == 0;
          if (!allowed) w[c] = ninf;
        }
        if (forced != kNone) w[s1.k()] = ninf;
      }
      s1.attach(j, detail::sample_log_weights(w, rng));
    }

    std::size_t kappa_sum = 0;
    for (char k : kappa) kappa_sum += static_cast<std::size_t>(k);
    if (!opts.fixed_alpha) alpha = sample_alpha_conditional(kappa_sum, n, alpha_prior, rng);

    if (detail::retained(t, chain)) {
      trace.iteration.push_back(t);
      trace.labels[0].push_back(s1.labels());
      trace.labels[1].push_back(s2.labels());
      trace.alpha.push_back(alpha);
      trace.log_post.push_back(log_post(s1, py, chain.prior_only) +
                               log_post(s2, py, chain.prior_only));
    }
  }
  return trace;
}

} // namespace bdc
