#pragma once

// Partition agreement measures, all computed from the contingency table.

#include "bdc/core.hpp"

namespace bdc {

/// Unadjusted pair-counting Rand index; 1 when there are fewer than two
/// objects.
[[nodiscard]] double rand_index(const Partition &t1, const Partition &t2);

/// Hubert-Arabie adjusted Rand index. Returns 1 when both partitions are the
/// same trivial partition (the index is 0/0 there).
[[nodiscard]] double adjusted_rand(const Partition &t1, const Partition &t2);

/// H(t1) + H(t2) - 2 I(t1; t2), in nats.
[[nodiscard]] double variation_of_information(const Partition &t1, const Partition &t2);

} // namespace bdc
