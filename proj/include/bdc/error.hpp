#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bdc {

enum class ErrorCode {
  NonSquare,
  AsymmetryBeyondTolerance,
  NegativeEntry,
  NonFiniteEntry,
  NonZeroDiagonal,
  InvalidMedoidSet,
  EmptyMedoidIntersection,
  NonPositiveArgument,
  OutOfRangeProbability,
  NonConvergentQuadrature,
  InvalidConfig,
  InconsistentPartition,
  NonFiniteDistance,
  DegenerateRange,
  DegenerateDistances,
  EmptyTrace,
  LengthMismatch,
  Io,
  Parse,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// Raised when quadrature exhausts its node budget; carries the node count.
class NonConvergentQuadrature : public Error {
public:
  NonConvergentQuadrature(std::size_t nodes, double estimate, double error)
      : Error(ErrorCode::NonConvergentQuadrature,
              "quadrature did not converge after " + std::to_string(nodes) +
                  " nodes (estimate " + std::to_string(estimate) +
                  ", error " + std::to_string(error) + ")"),
        nodes_(nodes) {}

  [[nodiscard]] std::size_t nodes() const noexcept { return nodes_; }

private:
  std::size_t nodes_;
};

/// Raised by induce_nested_partition when a layer-1 cluster holds no layer-2
/// medoid.
class EmptyMedoidIntersection : public Error {
public:
  explicit EmptyMedoidIntersection(std::size_t cluster)
      : Error(ErrorCode::EmptyMedoidIntersection,
              "layer-1 cluster " + std::to_string(cluster) +
                  " contains no layer-2 medoid"),
        cluster_(cluster) {}

  [[nodiscard]] std::size_t cluster() const noexcept { return cluster_; }

private:
  std::size_t cluster_;
};

} // namespace bdc
