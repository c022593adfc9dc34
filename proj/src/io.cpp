#include "bdc/io.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace bdc::io {

namespace {

constexpr std::array<char, 4> kMagic = {'B', 'D', 'C', 'M'};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_commas(const std::string &line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string &s, double &out) {
  if (s.empty()) return false;
  char *end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::ifstream open_in(const std::filesystem::path &path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path &path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

template <typename T> void put_le(std::ostream &out, T value) {
  static_assert(std::endian::native == std::endian::little,
                "big-endian hosts need byte swapping");
  out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T> T get_le(std::istream &in, const std::filesystem::path &path) {
  T value{};
  in.read(reinterpret_cast<char *>(&value), sizeof(T));
  if (!in) throw Error(ErrorCode::Parse, "truncated binary matrix " + path.string());
  return value;
}

} // namespace

DistanceMatrix read_distance_csv(const std::filesystem::path &path) {
  auto in = open_in(path, std::ios::in);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], row[c])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue; // header
      throw Error(ErrorCode::Parse,
                  path.string() + ":" + std::to_string(line_no) + ": non-numeric cell");
    }
    rows.push_back(std::move(row));
  }
  return DistanceMatrix::validate(rows);
}

void write_distance_csv(const std::filesystem::path &path, const DistanceMatrix &d) {
  auto out = open_out(path, std::ios::out | std::ios::trunc);
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ',';
      out << format_double(d(i, j));
    }
    out << '\n';
  }
}

DistanceMatrix read_distance_binary(const std::filesystem::path &path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw Error(ErrorCode::Parse, path.string() + ": missing BDCM magic");
  }
  const auto n = get_le<std::uint64_t>(in, path);
  std::vector<double> values(n * n);
  for (auto &v : values) v = get_le<double>(in, path);
  return DistanceMatrix::validate(n, std::move(values));
}

void write_distance_binary(const std::filesystem::path &path, const DistanceMatrix &d) {
  auto out = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint64_t>(out, d.size());
  for (double v : d.values()) put_le<double>(out, v);
}

DistanceMatrix read_distance(const std::filesystem::path &path) {
  std::array<char, 4> magic{};
  {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    in.read(magic.data(), magic.size());
  }
  return magic == kMagic ? read_distance_binary(path) : read_distance_csv(path);
}

std::vector<std::size_t> read_labels(const std::filesystem::path &path) {
  auto in = open_in(path, std::ios::in);
  std::vector<std::size_t> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cell = trim(line);
    if (cell.empty()) continue;
    long long value = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      if (labels.empty() && line_no == 1) continue; // header
      throw Error(ErrorCode::Parse,
                  path.string() + ":" + std::to_string(line_no) + ": bad label");
    }
    if (value < 1) {
      throw Error(ErrorCode::Parse,
                  path.string() + ":" + std::to_string(line_no) + ": labels are 1-based");
    }
    labels.push_back(static_cast<std::size_t>(value - 1));
  }
  return labels;
}

void write_labels(const std::filesystem::path &path, std::span<const std::size_t> labels) {
  auto out = open_out(path, std::ios::out | std::ios::trunc);
  for (std::size_t l : labels) out << (l + 1) << '\n';
}

void write_label_matrix(const std::filesystem::path &path,
                        const std::vector<std::vector<std::size_t>> &draws) {
  auto out = open_out(path, std::ios::out | std::ios::trunc);
  for (const auto &draw : draws) {
    for (std::size_t j = 0; j < draw.size(); ++j) {
      if (j) out << ',';
      out << (draw[j] + 1);
    }
    out << '\n';
  }
}

std::string read_text(const std::filesystem::path &path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path &path, const std::string &content) {
  auto out = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  out << content;
}

std::string content_digest(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

std::string file_digest(const std::filesystem::path &path) {
  return content_digest(read_text(path));
}

} // namespace bdc::io
