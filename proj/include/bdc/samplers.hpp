#pragma once

// MCMC over medoid sets (birth/death/move, Gibbs indicators, nested and
// joint two-layer variants) and over labels (Pitman-Yor marginal Gibbs,
// independent and dependent two-layer).

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bdc/core.hpp"
#include "bdc/likelihood.hpp"
#include "bdc/priors.hpp"

namespace bdc {

struct InitSpec {
  enum class Kind { FromPam, RandomK, Explicit };
  Kind kind = Kind::FromPam;
  std::size_t k = 0; ///< FromPam: 0 picks the elbow K. RandomK: required.
  std::vector<std::size_t> medoids; ///< Explicit, 0-based
};

struct ChainConfig {
  std::size_t iterations = 10000;
  std::size_t burn_in = 2500;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  InitSpec init;
  bool prior_only = false; ///< replace every likelihood by a constant

  void validate() const;
};

struct MoveStats {
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  [[nodiscard]] double rate() const noexcept {
    return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  }
};

/// Retained draws. Medoid lists are sorted and 0-based; labels are cluster
/// ids in [0, K). Medoid-free samplers leave `medoids` empty.
struct TraceSet {
  std::size_t n = 0;
  std::size_t layers = 1;
  std::vector<std::size_t> iteration;
  std::array<std::vector<std::vector<std::size_t>>, 2> medoids;
  std::array<std::vector<std::vector<std::size_t>>, 2> labels;
  std::vector<double> alpha;
  std::vector<double> log_post;
  std::map<std::string, MoveStats> moves;
  std::vector<std::size_t> chain; ///< originating chain per draw

  [[nodiscard]] std::size_t size() const noexcept { return iteration.size(); }
};

/// Hastings factor of each proposal type; exposed for tests.
[[nodiscard]] double birth_hastings(std::size_t n, std::size_t k_old);
[[nodiscard]] double death_hastings(std::size_t n, std::size_t k_old);

[[nodiscard]] MedoidSet initial_medoids(const DistanceMatrix &d, const InitSpec &init,
                                        std::mt19937_64 &rng);

[[nodiscard]] TraceSet run_bdm(const DistanceMatrix &d, const LikelihoodConfig &cfg,
                               const MedoidPriorConfig &prior, const ChainConfig &chain);

[[nodiscard]] TraceSet run_gibbs_indicators(const DistanceMatrix &d,
                                            const LikelihoodConfig &cfg,
                                            const MedoidPriorConfig &prior,
                                            const ChainConfig &chain);

/// Layer 2 is nested in layer 1; both layers share the medoid prior.
[[nodiscard]] TraceSet run_nested(const MultiViewData &mv, const LikelihoodConfig &cfg1,
                                  const LikelihoodConfig &cfg2, const MedoidPriorConfig &prior,
                                  const ChainConfig &chain);

/// Layers coupled through the Beta-marginalized agreement penalty; alpha is
/// drawn afterwards for each retained pair of partitions.
[[nodiscard]] TraceSet run_joint(const MultiViewData &mv, const LikelihoodConfig &cfg1,
                                 const LikelihoodConfig &cfg2, const MedoidPriorConfig &prior,
                                 const AlphaPriorConfig &alpha_prior, const ChainConfig &chain);

/// Indicator-variable Gibbs kernel for the joint model. O(N) likelihood
/// evaluations per sweep; meant for cross-checking run_joint on small N.
[[nodiscard]] TraceSet run_joint_gibbs(const MultiViewData &mv, const LikelihoodConfig &cfg1,
                                       const LikelihoodConfig &cfg2,
                                       const MedoidPriorConfig &prior,
                                       const AlphaPriorConfig &alpha_prior,
                                       const ChainConfig &chain);

/// Marginal Gibbs over labels with a PY prior; quadratic likelihood only.
[[nodiscard]] TraceSet run_py_independent(const DistanceMatrix &d, const LikelihoodConfig &cfg,
                                          const PYConfig &py, const ChainConfig &chain);

struct PyDependentOptions {
  std::optional<double> fixed_alpha; ///< hold alpha at this value
};

/// Stationary dependent PY partitions: kappa_i = 1 keeps object i's layer-2
/// allocation tied to layer 1; alpha ~ Beta(a, b) is the tie probability.
[[nodiscard]] TraceSet run_py_dependent(const MultiViewData &mv, const LikelihoodConfig &cfg1,
                                        const LikelihoodConfig &cfg2, const PYConfig &py,
                                        const AlphaPriorConfig &alpha_prior,
                                        const ChainConfig &chain,
                                        const PyDependentOptions &opts = {});

/// Draw from the alpha full conditional Beta(a + s, b + n - s).
[[nodiscard]] double sample_alpha_conditional(std::size_t kappa_sum, std::size_t n,
                                              const AlphaPriorConfig &prior,
                                              std::mt19937_64 &rng);

/// splitmix64 step.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t &state) noexcept;
/// Independent stream seed for chain `stream` of a run seeded with `master`.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

/// Worker cap: BDC_THREADS if set and positive, else hardware concurrency.
[[nodiscard]] std::size_t worker_limit();

/// Runs `chains` copies of `run` concurrently, chain c seeded with
/// derive_seed(base.seed, c). Results are in chain order.
[[nodiscard]] std::vector<TraceSet>
run_chains(std::size_t chains, const ChainConfig &base,
           const std::function<TraceSet(const ChainConfig &)> &run,
           std::size_t max_threads = 0);

/// Concatenates chains; move statistics are summed.
[[nodiscard]] TraceSet merge_traces(const std::vector<TraceSet> &parts);

} // namespace bdc
