#pragma once

// PAM (BUILD + SWAP) K-medoids, the elbow rule used to pick K, and an
// exhaustive check that the K-medoids optimum is the posterior mode of the
// exp(-D) tessellation model with K fixed.

#include <cstddef>
#include <vector>

#include "bdc/core.hpp"

namespace bdc {

struct PamResult {
  MedoidSet medoids;
  Partition labels;
  double cost = 0.0; ///< sum of member-to-medoid distances
  std::size_t iterations = 0;
};

/// Sum over objects of the distance to the nearest medoid.
[[nodiscard]] double medoid_cost(const DistanceMatrix &d, const MedoidSet &medoids);

/// Deterministic: BUILD is greedy, SWAP applies the best improving exchange
/// until none remains.
[[nodiscard]] PamResult pam(const DistanceMatrix &d, std::size_t k);

/// PAM cost for every k in [k_lo, k_hi].
[[nodiscard]] std::vector<double> pam_cost_curve(const DistanceMatrix &d, std::size_t k_lo,
                                                 std::size_t k_hi);

/// Knee of the PAM cost curve: the k whose point lies farthest from the chord
/// joining the curve's endpoints, both axes rescaled to [0, 1]. Ties go to
/// the smaller k. Throws DegenerateRange for an empty or out-of-bounds range.
[[nodiscard]] std::size_t elbow_k(const DistanceMatrix &d, std::size_t k_lo, std::size_t k_hi);

struct MapEquivalenceReport {
  bool equivalent = false;
  std::vector<MedoidSet> posterior_modes; ///< all maximizers (ties kept)
  std::vector<MedoidSet> kmedoid_optima;  ///< all minimizers (ties kept)
};

/// Enumerates every size-k medoid set twice: once scoring the log posterior
/// sum over medoid-member pairs of ln exp(-D) with a flat fixed-K prior, once
/// scoring the K-medoids cost. Equivalent when the two argmax/argmin sets
/// coincide. Intended for N <= 10.
[[nodiscard]] MapEquivalenceReport map_equivalence_report(const DistanceMatrix &d,
                                                          std::size_t k);
[[nodiscard]] bool map_equivalence_check(const DistanceMatrix &d, std::size_t k);

} // namespace bdc
