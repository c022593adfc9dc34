#pragma once

// File formats:
//   distance CSV   square, comma separated, optional non-numeric header row
//   distance BDCM  "BDCM", u64 N (little endian), then N*N little-endian f64
//   labels CSV     one 1-based label per line, optional header
//   label matrix   one retained draw per row, 1-based labels

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bdc/core.hpp"

namespace bdc::io {

[[nodiscard]] DistanceMatrix read_distance_csv(const std::filesystem::path &path);
void write_distance_csv(const std::filesystem::path &path, const DistanceMatrix &d);

[[nodiscard]] DistanceMatrix read_distance_binary(const std::filesystem::path &path);
void write_distance_binary(const std::filesystem::path &path, const DistanceMatrix &d);

/// Dispatches on the file's leading magic bytes.
[[nodiscard]] DistanceMatrix read_distance(const std::filesystem::path &path);

/// Reads 1-based labels, returns them 0-based.
[[nodiscard]] std::vector<std::size_t> read_labels(const std::filesystem::path &path);
/// Writes 0-based labels as 1-based.
void write_labels(const std::filesystem::path &path, std::span<const std::size_t> labels);

void write_label_matrix(const std::filesystem::path &path,
                        const std::vector<std::vector<std::size_t>> &draws);

[[nodiscard]] std::string read_text(const std::filesystem::path &path);
void write_text(const std::filesystem::path &path, const std::string &content);

/// 64-bit FNV-1a content hash, hex encoded.
[[nodiscard]] std::string content_digest(std::string_view bytes);
[[nodiscard]] std::string file_digest(const std::filesystem::path &path);

} // namespace bdc::io
