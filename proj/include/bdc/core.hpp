#pragma once

// Domain types shared by every model: validated distance matrices, medoid
// sets, partitions, and the discrete Voronoi tessellation that maps a medoid
// set to a partition.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bdc/error.hpp"

namespace bdc {

/// Floor applied to off-diagonal distances before any Gamma density sees them.
inline constexpr double kMinDistance = 1e-12;
inline constexpr double kSymmetryTolerance = 1e-9;

class DistanceMatrix {
public:
  DistanceMatrix() = default;

  /// Validates a row-major n*n buffer. Entries (i,j),(j,i) within tolerance
  /// are replaced by their average; diagonal entries below tolerance are
  /// zeroed.
  static DistanceMatrix validate(std::size_t n, std::vector<double> raw);
  static DistanceMatrix validate(const std::vector<std::vector<double>> &rows);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept {
    return values_[i * n_ + j];
  }
  /// Distance floored at kMinDistance; use for anything evaluated under a
  /// Gamma density.
  [[nodiscard]] double positive(std::size_t i, std::size_t j) const noexcept {
    const double v = values_[i * n_ + j];
    return v < kMinDistance ? kMinDistance : v;
  }
  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * n_, n_};
  }
  [[nodiscard]] std::span<const double> values() const noexcept {
    return values_;
  }

  /// Relabels objects: result(i,j) = this(perm[i], perm[j]).
  [[nodiscard]] DistanceMatrix permuted(std::span<const std::size_t> perm) const;
  /// Restriction to the listed objects, in the listed order.
  [[nodiscard]] DistanceMatrix subset(std::span<const std::size_t> idx) const;

  friend bool operator==(const DistanceMatrix &, const DistanceMatrix &) = default;

private:
  DistanceMatrix(std::size_t n, std::vector<double> values)
      : n_(n), values_(std::move(values)) {}

  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Sorted, duplicate-free, nonempty set of object indices. Cluster ids of an
/// induced partition are positions in this sorted order.
class MedoidSet {
public:
  MedoidSet() = default;
  MedoidSet(std::vector<std::size_t> indices, std::size_t n);

  static MedoidSet all(std::size_t n);

  [[nodiscard]] std::span<const std::size_t> indices() const noexcept {
    return indices_;
  }
  [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
  [[nodiscard]] std::size_t universe() const noexcept { return n_; }
  [[nodiscard]] std::size_t operator[](std::size_t pos) const noexcept {
    return indices_[pos];
  }
  [[nodiscard]] bool contains(std::size_t object) const noexcept;
  [[nodiscard]] std::optional<std::size_t> position(std::size_t object) const noexcept;

  [[nodiscard]] MedoidSet with(std::size_t object) const;
  [[nodiscard]] MedoidSet without(std::size_t object) const;

  friend bool operator==(const MedoidSet &, const MedoidSet &) = default;
  friend auto operator<=>(const MedoidSet &a, const MedoidSet &b) {
    return a.indices_ <=> b.indices_;
  }

private:
  std::vector<std::size_t> indices_;
  std::size_t n_ = 0;
};

class Partition {
public:
  Partition() = default;
  /// Labels must lie in [0, k) and every id must be used.
  Partition(std::vector<std::size_t> labels, std::size_t k);

  /// Arbitrary labels, compacted to [0, K) in order of first appearance.
  static Partition from_labels(std::span<const std::size_t> labels);
  static Partition from_labels(std::span<const int> labels);

  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] std::size_t k() const noexcept { return clusters_.size(); }
  [[nodiscard]] std::span<const std::size_t> labels() const noexcept {
    return labels_;
  }
  [[nodiscard]] std::size_t label(std::size_t object) const noexcept {
    return labels_[object];
  }
  [[nodiscard]] const std::vector<std::vector<std::size_t>> &clusters() const noexcept {
    return clusters_;
  }
  [[nodiscard]] std::vector<std::size_t> sizes() const;

  /// Labels relabeled by first appearance; equal for equal partitions.
  [[nodiscard]] std::vector<std::size_t> canonical_labels() const;

  /// True iff both describe the same grouping, whatever the label ids.
  [[nodiscard]] bool same_grouping(const Partition &other) const;

  friend bool operator==(const Partition &, const Partition &) = default;

private:
  std::vector<std::size_t> labels_;
  std::vector<std::vector<std::size_t>> clusters_;
};

struct MultiViewData {
  MultiViewData(DistanceMatrix layer1, DistanceMatrix layer2);

  DistanceMatrix d1;
  DistanceMatrix d2;

  [[nodiscard]] std::size_t size() const noexcept { return d1.size(); }
};

struct NestedPartition {
  Partition layer1;
  Partition layer2;
};

/// Assigns every object to its nearest medoid. Ties go to the medoid with the
/// smallest index; a medoid always keeps itself, even at distance zero from
/// another medoid.
[[nodiscard]] Partition induce_partition(const DistanceMatrix &d,
                                         const MedoidSet &medoids);

/// Layer 1 as in induce_partition; layer 2 restricts each object's search to
/// layer-2 medoids lying in its own layer-1 cluster. Throws
/// EmptyMedoidIntersection when some layer-1 cluster has none.
[[nodiscard]] NestedPartition induce_nested_partition(const MultiViewData &mv,
                                                      const MedoidSet &layer1,
                                                      const MedoidSet &layer2);

/// Adds the layer-1 medoid of every layer-1 cluster lacking a layer-2 medoid.
[[nodiscard]] MedoidSet repair_nested_medoids(const MultiViewData &mv,
                                              const MedoidSet &layer1,
                                              const MedoidSet &layer2);

/// Definition of nesting: same layer-2 cluster implies same layer-1 cluster.
[[nodiscard]] bool is_refinement(const Partition &fine, const Partition &coarse);

} // namespace bdc
