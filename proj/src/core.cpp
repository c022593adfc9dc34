#include "bdc/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

namespace bdc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::NonSquare: return "NonSquare";
  case ErrorCode::AsymmetryBeyondTolerance: return "AsymmetryBeyondTolerance";
  case ErrorCode::NegativeEntry: return "NegativeEntry";
  case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
  case ErrorCode::NonZeroDiagonal: return "NonZeroDiagonal";
  case ErrorCode::InvalidMedoidSet: return "InvalidMedoidSet";
  case ErrorCode::EmptyMedoidIntersection: return "EmptyMedoidIntersection";
  case ErrorCode::NonPositiveArgument: return "NonPositiveArgument";
  case ErrorCode::OutOfRangeProbability: return "OutOfRangeProbability";
  case ErrorCode::NonConvergentQuadrature: return "NonConvergentQuadrature";
  case ErrorCode::InvalidConfig: return "InvalidConfig";
  case ErrorCode::InconsistentPartition: return "InconsistentPartition";
  case ErrorCode::NonFiniteDistance: return "NonFiniteDistance";
  case ErrorCode::DegenerateRange: return "DegenerateRange";
  case ErrorCode::DegenerateDistances: return "DegenerateDistances";
  case ErrorCode::EmptyTrace: return "EmptyTrace";
  case ErrorCode::LengthMismatch: return "LengthMismatch";
  case ErrorCode::Io: return "Io";
  case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// DistanceMatrix

DistanceMatrix DistanceMatrix::validate(std::size_t n, std::vector<double> raw) {
  if (raw.size() != n * n) {
    throw Error(ErrorCode::NonSquare, "expected " + std::to_string(n * n) +
                                          " entries, got " +
                                          std::to_string(raw.size()));
  }
  for (std::size_t idx = 0; idx < raw.size(); ++idx) {
    if (!std::isfinite(raw[idx])) {
      throw Error(ErrorCode::NonFiniteEntry,
                  "entry (" + std::to_string(idx / n) + "," +
                      std::to_string(idx % n) + ")");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double &diag = raw[i * n + i];
    if (std::abs(diag) >= kSymmetryTolerance) {
      throw Error(ErrorCode::NonZeroDiagonal,
                  "diagonal entry " + std::to_string(i) + " = " +
                      std::to_string(diag));
    }
    diag = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double &a = raw[i * n + j];
      double &b = raw[j * n + i];
      const double scale = std::max({1.0, std::abs(a), std::abs(b)});
      if (std::abs(a - b) > kSymmetryTolerance * scale) {
        throw Error(ErrorCode::AsymmetryBeyondTolerance,
                    "entries (" + std::to_string(i) + "," + std::to_string(j) +
                        ") differ by " + std::to_string(std::abs(a - b)));
      }
      const double avg = 0.5 * (a + b);
      if (avg < 0.0) {
        throw Error(ErrorCode::NegativeEntry,
                    "entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") = " + std::to_string(avg));
      }
      a = avg;
      b = avg;
    }
  }
  return DistanceMatrix(n, std::move(raw));
}

DistanceMatrix DistanceMatrix::validate(const std::vector<std::vector<double>> &rows) {
  const std::size_t n = rows.size();
  std::vector<double> flat;
  flat.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw Error(ErrorCode::NonSquare, "row " + std::to_string(i) + " has " +
                                            std::to_string(rows[i].size()) +
                                            " entries, expected " +
                                            std::to_string(n));
    }
    flat.insert(flat.end(), rows[i].begin(), rows[i].end());
  }
  return validate(n, std::move(flat));
}

DistanceMatrix DistanceMatrix::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != n_) {
    throw Error(ErrorCode::LengthMismatch, "permutation length");
  }
  std::vector<double> out(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      out[i * n_ + j] = (*this)(perm[i], perm[j]);
    }
  }
  return DistanceMatrix(n_, std::move(out));
}

DistanceMatrix DistanceMatrix::subset(std::span<const std::size_t> idx) const {
  const std::size_t m = idx.size();
  std::vector<double> out(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      out[i * m + j] = (*this)(idx[i], idx[j]);
    }
  }
  return DistanceMatrix(m, std::move(out));
}

// ---------------------------------------------------------------------------
// MedoidSet

MedoidSet::MedoidSet(std::vector<std::size_t> indices, std::size_t n)
    : indices_(std::move(indices)), n_(n) {
  if (indices_.empty()) {
    throw Error(ErrorCode::InvalidMedoidSet, "medoid set must be nonempty");
  }
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw Error(ErrorCode::InvalidMedoidSet, "duplicate medoid index");
  }
  if (indices_.back() >= n_) {
    throw Error(ErrorCode::InvalidMedoidSet,
                "medoid index " + std::to_string(indices_.back()) +
                    " out of range for " + std::to_string(n_) + " objects");
  }
}

MedoidSet MedoidSet::all(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return MedoidSet(std::move(idx), n);
}

bool MedoidSet::contains(std::size_t object) const noexcept {
  return std::binary_search(indices_.begin(), indices_.end(), object);
}

std::optional<std::size_t> MedoidSet::position(std::size_t object) const noexcept {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), object);
  if (it == indices_.end() || *it != object) return std::nullopt;
  return static_cast<std::size_t>(it - indices_.begin());
}

MedoidSet MedoidSet::with(std::size_t object) const {
  if (object >= n_ || contains(object)) {
    throw Error(ErrorCode::InvalidMedoidSet,
                "cannot add medoid " + std::to_string(object));
  }
  MedoidSet out = *this;
  out.indices_.insert(
      std::lower_bound(out.indices_.begin(), out.indices_.end(), object), object);
  return out;
}

MedoidSet MedoidSet::without(std::size_t object) const {
  auto pos = position(object);
  if (!pos || indices_.size() == 1) {
    throw Error(ErrorCode::InvalidMedoidSet,
                "cannot remove medoid " + std::to_string(object));
  }
  MedoidSet out = *this;
  out.indices_.erase(out.indices_.begin() + static_cast<std::ptrdiff_t>(*pos));
  return out;
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(std::vector<std::size_t> labels, std::size_t k)
    : labels_(std::move(labels)), clusters_(k) {
  for (std::size_t j = 0; j < labels_.size(); ++j) {
    if (labels_[j] >= k) {
      throw Error(ErrorCode::InconsistentPartition,
                  "label " + std::to_string(labels_[j]) + " >= " +
                      std::to_string(k));
    }
    clusters_[labels_[j]].push_back(j);
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (clusters_[c].empty()) {
      throw Error(ErrorCode::InconsistentPartition,
                  "cluster " + std::to_string(c) + " is empty");
    }
  }
}

Partition Partition::from_labels(std::span<const std::size_t> labels) {
  std::unordered_map<std::size_t, std::size_t> remap;
  std::vector<std::size_t> out(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) {
    auto [it, inserted] = remap.try_emplace(labels[j], remap.size());
    out[j] = it->second;
  }
  const std::size_t k = remap.size();
  return Partition(std::move(out), k);
}

Partition Partition::from_labels(std::span<const int> labels) {
  std::unordered_map<int, std::size_t> remap;
  std::vector<std::size_t> out(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) {
    auto [it, inserted] = remap.try_emplace(labels[j], remap.size());
    out[j] = it->second;
  }
  const std::size_t k = remap.size();
  return Partition(std::move(out), k);
}

std::vector<std::size_t> Partition::sizes() const {
  std::vector<std::size_t> out(clusters_.size());
  for (std::size_t c = 0; c < clusters_.size(); ++c) out[c] = clusters_[c].size();
  return out;
}

std::vector<std::size_t> Partition::canonical_labels() const {
  constexpr auto unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> remap(clusters_.size(), unset);
  std::vector<std::size_t> out(labels_.size());
  std::size_t next = 0;
  for (std::size_t j = 0; j < labels_.size(); ++j) {
    auto &r = remap[labels_[j]];
    if (r == unset) r = next++;
    out[j] = r;
  }
  return out;
}

bool Partition::same_grouping(const Partition &other) const {
  return size() == other.size() && k() == other.k() &&
         canonical_labels() == other.canonical_labels();
}

// ---------------------------------------------------------------------------
// MultiViewData

MultiViewData::MultiViewData(DistanceMatrix layer1, DistanceMatrix layer2)
    : d1(std::move(layer1)), d2(std::move(layer2)) {
  if (d1.size() != d2.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "layer sizes differ: " + std::to_string(d1.size()) + " vs " +
                    std::to_string(d2.size()));
  }
}

// ---------------------------------------------------------------------------
// Tessellation

namespace {

void check_universe(const DistanceMatrix &d, const MedoidSet &medoids) {
  if (medoids.universe() != d.size()) {
    throw Error(ErrorCode::InvalidMedoidSet,
                "medoid set built for " + std::to_string(medoids.universe()) +
                    " objects, matrix has " + std::to_string(d.size()));
  }
}

} // namespace

Partition induce_partition(const DistanceMatrix &d, const MedoidSet &medoids) {
  check_universe(d, medoids);
  const std::size_t n = d.size();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> labels(n, 0);
  // Row-major scan over medoid rows; strict '<' keeps the smallest index on
  // ties because medoids are visited in increasing order.
  for (std::size_t c = 0; c < medoids.size(); ++c) {
    const auto row = d.row(medoids[c]);
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] < best[j]) {
        best[j] = row[j];
        labels[j] = c;
      }
    }
  }
  for (std::size_t c = 0; c < medoids.size(); ++c) labels[medoids[c]] = c;
  return Partition(std::move(labels), medoids.size());
}

NestedPartition induce_nested_partition(const MultiViewData &mv,
                                        const MedoidSet &layer1,
                                        const MedoidSet &layer2) {
  check_universe(mv.d2, layer2);
  Partition first = induce_partition(mv.d1, layer1);
  const std::size_t n = mv.size();

  // Layer-2 medoid positions grouped by the layer-1 cluster that holds them.
  std::vector<std::vector<std::size_t>> local(first.k());
  for (std::size_t pos = 0; pos < layer2.size(); ++pos) {
    local[first.label(layer2[pos])].push_back(pos);
  }
  for (std::size_t c = 0; c < local.size(); ++c) {
    if (local[c].empty()) throw EmptyMedoidIntersection(c);
  }

  std::vector<std::size_t> labels(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto &candidates = local[first.label(j)];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t pos : candidates) {
      const double v = mv.d2(layer2[pos], j);
      if (v < best) {
        best = v;
        labels[j] = pos;
      }
    }
  }
  for (std::size_t pos = 0; pos < layer2.size(); ++pos) labels[layer2[pos]] = pos;
  return {std::move(first), Partition(std::move(labels), layer2.size())};
}

MedoidSet repair_nested_medoids(const MultiViewData &mv, const MedoidSet &layer1,
                                const MedoidSet &layer2) {
  check_universe(mv.d2, layer2);
  const Partition first = induce_partition(mv.d1, layer1);
  std::vector<bool> covered(first.k(), false);
  for (std::size_t m : layer2.indices()) covered[first.label(m)] = true;
  std::vector<std::size_t> out(layer2.indices().begin(), layer2.indices().end());
  for (std::size_t c = 0; c < first.k(); ++c) {
    if (!covered[c]) out.push_back(layer1[c]);
  }
  return MedoidSet(std::move(out), layer2.universe());
}

bool is_refinement(const Partition &fine, const Partition &coarse) {
  if (fine.size() != coarse.size()) return false;
  for (const auto &cluster : fine.clusters()) {
    const std::size_t owner = coarse.label(cluster.front());
    for (std::size_t j : cluster) {
      if (coarse.label(j) != owner) return false;
    }
  }
  return true;
}

} // namespace bdc
