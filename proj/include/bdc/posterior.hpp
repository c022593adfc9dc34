#pragma once

// Summaries of retained draws: co-clustering, the VI point estimate, and the
// posterior of the number of clusters.

#include <cstddef>
#include <map>
#include <vector>

#include "bdc/core.hpp"
#include "bdc/metrics.hpp"
#include "bdc/samplers.hpp"

namespace bdc {

struct CoClusteringMatrix {
  std::size_t n = 0;
  std::vector<double> s; ///< row-major, s[j*n+k] = share of draws with z_j = z_k

  [[nodiscard]] double operator()(std::size_t j, std::size_t k) const noexcept {
    return s[j * n + k];
  }
};

using LabelDraws = std::vector<std::vector<std::size_t>>;

/// Draws of one layer; throws EmptyTrace when there are none.
[[nodiscard]] const LabelDraws &layer_draws(const TraceSet &trace, std::size_t layer);

[[nodiscard]] CoClusteringMatrix coclustering(const LabelDraws &draws);
[[nodiscard]] CoClusteringMatrix coclustering(const TraceSet &trace, std::size_t layer);

/// The draw with the smallest mean VI to all draws (duplicates weighted by
/// their multiplicity); ties go to the earliest draw.
[[nodiscard]] Partition point_estimate(const LabelDraws &draws);
[[nodiscard]] Partition point_estimate(const TraceSet &trace, std::size_t layer);

struct KPosterior {
  std::map<std::size_t, double> pmf;
  double mean = 0.0;
  double sd = 0.0; ///< n - 1 denominator; 0 for a single draw
};

[[nodiscard]] KPosterior k_posterior(const LabelDraws &draws);
[[nodiscard]] KPosterior k_posterior(const TraceSet &trace, std::size_t layer);

} // namespace bdc
