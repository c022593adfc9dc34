#pragma once

// Run artifacts: NDJSON traces, co-clustering CSV/PGM, summaries, manifests.

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bdc/posterior.hpp"
#include "bdc/samplers.hpp"
#include "json.hpp"

namespace bdc::cli {

using nlohmann::json;

/// One record per retained draw; medoids and labels are 1-based.
/// `ids` maps trace positions to original object ids (0-based); empty means
/// the identity.
void write_trace_ndjson(const std::filesystem::path &path, const TraceSet &trace,
                        const std::vector<std::size_t> &ids = {});

/// Inverse of write_trace_ndjson; labels and medoids come back 0-based.
[[nodiscard]] TraceSet read_trace_ndjson(const std::filesystem::path &path);

void write_coclustering_csv(const std::filesystem::path &path, const CoClusteringMatrix &m);
/// Binary 8-bit PGM; black is always together, white never.
void write_coclustering_pgm(const std::filesystem::path &path, const CoClusteringMatrix &m);

[[nodiscard]] json k_posterior_json(const KPosterior &k);
[[nodiscard]] json move_stats_json(const TraceSet &trace);
[[nodiscard]] json scores_json(const Partition &estimate, const Partition &truth);

/// Wall-clock phases of a command, reported in the manifest.
class PhaseTimer {
public:
  void start(std::string name);
  void stop();
  [[nodiscard]] json to_json() const;
  [[nodiscard]] double total_seconds() const;

private:
  std::vector<std::pair<std::string, double>> done_;
  std::string current_;
  std::chrono::steady_clock::time_point t0_{};
};

[[nodiscard]] std::string iso_timestamp_utc();

void write_json(const std::filesystem::path &path, const json &j);

} // namespace bdc::cli
