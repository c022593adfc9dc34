#pragma once

// Exact posteriors over medoid sets by enumeration, for checking samplers.

#include <cmath>
#include <map>
#include <unordered_map>
#include <vector>

#include "bdc/core.hpp"
#include "bdc/likelihood.hpp"
#include "bdc/priors.hpp"
#include "oracles.hpp"

namespace oracle {

using Key = std::vector<std::size_t>;

struct Distribution {
  std::vector<Key> states;
  std::map<Key, std::size_t> index;
  std::vector<double> p;

  /// Empirical frequencies of `draws` over the same states.
  [[nodiscard]] std::vector<double> empirical(const std::vector<Key> &draws) const {
    std::vector<double> f(states.size(), 0.0);
    for (const auto &k : draws) f[index.at(k)] += 1.0;
    for (double &v : f) v /= static_cast<double>(draws.size());
    return f;
  }
};

/// Pair-counting Rand index by brute force.
inline double brute_rand_index(const bdc::Partition &a, const bdc::Partition &b) {
  double agree = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      total += 1.0;
      agree += ((a.label(i) == a.label(j)) == (b.label(i) == b.label(j))) ? 1.0 : 0.0;
    }
  }
  return total > 0.0 ? agree / total : 1.0;
}

inline Distribution medoid_posterior(const bdc::DistanceMatrix &d,
                                     const bdc::LikelihoodConfig &cfg,
                                     const bdc::MedoidPriorConfig &prior, bool flat = false) {
  Distribution out;
  std::vector<double> lw;
  for (const auto &s : all_subsets(d.size())) {
    const bdc::MedoidSet m(s, d.size());
    out.index[s] = out.states.size();
    out.states.push_back(s);
    lw.push_back((flat ? 0.0 : bdc::loglik(d, m, cfg)) + bdc::log_medoid_prior(m, prior));
  }
  out.p = normalize_log(lw);
  return out;
}

/// Joint two-layer posterior with the Beta-marginalized agreement penalty,
/// the penalty taken from Boost quadrature.
inline Distribution joint_posterior(const bdc::MultiViewData &mv,
                                    const bdc::LikelihoodConfig &c1,
                                    const bdc::LikelihoodConfig &c2,
                                    const bdc::MedoidPriorConfig &prior,
                                    const bdc::AlphaPriorConfig &ap) {
  const std::size_t n = mv.size();
  const auto subsets = all_subsets(n);
  std::vector<bdc::Partition> t1;
  std::vector<bdc::Partition> t2;
  std::vector<double> s1;
  std::vector<double> s2;
  for (const auto &s : subsets) {
    const bdc::MedoidSet m(s, n);
    t1.push_back(bdc::induce_partition(mv.d1, m));
    t2.push_back(bdc::induce_partition(mv.d2, m));
    s1.push_back(bdc::loglik(mv.d1, m, c1) + bdc::log_medoid_prior(m, prior));
    s2.push_back(bdc::loglik(mv.d2, m, c2) + bdc::log_medoid_prior(m, prior));
  }
  std::unordered_map<double, double> pen;
  Distribution out;
  std::vector<double> lw;
  for (std::size_t a = 0; a < subsets.size(); ++a) {
    for (std::size_t b = 0; b < subsets.size(); ++b) {
      const double ri = brute_rand_index(t1[a], t2[b]);
      double lc = -std::numeric_limits<double>::infinity();
      if (ri > 0.0) {
        const double dist = 1.0 / ri - 1.0;
        auto it = pen.find(dist);
        if (it == pen.end()) {
          it = pen.emplace(dist, dist == 0.0 ? 0.0 : log_penalty_by_quadrature(dist, ap.a, ap.b))
                   .first;
        }
        lc = it->second;
      }
      Key k = subsets[a];
      k.push_back(n); // separator between the two layers
      k.insert(k.end(), subsets[b].begin(), subsets[b].end());
      out.index[k] = out.states.size();
      out.states.push_back(std::move(k));
      lw.push_back(s1[a] + s2[b] + lc);
    }
  }
  out.p = normalize_log(lw);
  return out;
}

inline Key joint_key(const std::vector<std::size_t> &m1, const std::vector<std::size_t> &m2,
                     std::size_t n) {
  Key k = m1;
  k.push_back(n);
  k.insert(k.end(), m2.begin(), m2.end());
  return k;
}

} // namespace oracle
