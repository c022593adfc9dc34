#include <filesystem>
#include <random>

#include "doctest.h"

#include "bdc/io.hpp"
#include "../support/oracles.hpp"

using namespace bdc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const auto dir = fs::temp_directory_path() / "bdc_unit_io";
  fs::create_directories(dir);
  return dir / name;
}

ErrorCode code_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidConfig;
}

} // namespace

TEST_CASE("distance CSV round trip is exact") {
  std::mt19937_64 rng(1);
  const auto d = oracle::random_distances(9, rng);
  const auto p = scratch("d.csv");
  io::write_distance_csv(p, d);
  CHECK(io::read_distance_csv(p) == d);
  CHECK(io::read_distance(p) == d);
}

TEST_CASE("distance CSV with a header row") {
  const auto p = scratch("h.csv");
  io::write_text(p, "a,b,c\n0,1,2\n1,0,3\n2,3,0\n");
  const auto d = io::read_distance_csv(p);
  CHECK(d.size() == 3u);
  CHECK(d(1, 2) == 3.0);
}

TEST_CASE("distance CSV errors") {
  const auto p = scratch("bad.csv");
  io::write_text(p, "0,1\n1,x\n");
  CHECK(code_of([&] { (void)io::read_distance_csv(p); }) == ErrorCode::Parse);
  io::write_text(p, "0,1\n2,0\n");
  CHECK(code_of([&] { (void)io::read_distance_csv(p); }) == ErrorCode::AsymmetryBeyondTolerance);
  CHECK(code_of([&] { (void)io::read_distance_csv(scratch("missing.csv")); }) == ErrorCode::Io);
}

TEST_CASE("binary matrix round trip and magic dispatch") {
  std::mt19937_64 rng(2);
  const auto d = oracle::random_distances(6, rng);
  const auto p = scratch("d.bdcm");
  io::write_distance_binary(p, d);
  CHECK(io::read_distance_binary(p) == d);
  CHECK(io::read_distance(p) == d);
  const auto raw = io::read_text(p);
  CHECK(raw.substr(0, 4) == "BDCM");
  CHECK(raw.size() == 4 + 8 + 36 * 8);
  io::write_text(p, raw.substr(0, raw.size() - 5));
  CHECK(code_of([&] { (void)io::read_distance_binary(p); }) == ErrorCode::Parse);
}

TEST_CASE("labels are 1-based on disk") {
  const auto p = scratch("z.csv");
  const std::vector<std::size_t> z{0, 2, 1, 0};
  io::write_labels(p, z);
  CHECK(io::read_text(p).substr(0, 2) == "1\n");
  CHECK(io::read_labels(p) == z);
  io::write_text(p, "label\n3\n1\n");
  CHECK(io::read_labels(p) == std::vector<std::size_t>{2, 0});
  io::write_text(p, "1\n0\n");
  CHECK(code_of([&] { (void)io::read_labels(p); }) == ErrorCode::Parse);
}

TEST_CASE("label matrix rows") {
  const auto p = scratch("m.csv");
  io::write_label_matrix(p, {{0, 1}, {1, 1}});
  CHECK(io::read_text(p) == "1,2\n2,2\n");
}

TEST_CASE("content digest") {
  CHECK(io::content_digest("") == "cbf29ce484222325");
  CHECK(io::content_digest("a") == "af63dc4c8601ec8c");
  const auto p = scratch("t.txt");
  io::write_text(p, "a");
  CHECK(io::file_digest(p) == io::content_digest("a"));
}
