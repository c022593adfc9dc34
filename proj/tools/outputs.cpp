#include "outputs.hpp"

#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "bdc/error.hpp"
#include "bdc/io.hpp"
#include "bdc/metrics.hpp"
#include "settings.hpp"

namespace bdc::cli {

namespace {

std::vector<std::size_t> shifted(const std::vector<std::size_t> &v,
                                 const std::vector<std::size_t> &ids) {
  std::vector<std::size_t> out;
  out.reserve(v.size());
  for (std::size_t x : v) out.push_back((ids.empty() ? x : ids[x]) + 1);
  return out;
}

std::vector<std::size_t> plus_one(const std::vector<std::size_t> &v) {
  std::vector<std::size_t> out(v);
  for (auto &x : out) ++x;
  return out;
}

std::vector<std::size_t> minus_one(const json &arr, const std::string &what) {
  std::vector<std::size_t> out;
  for (const auto &x : arr) {
    const auto v = x.get<std::size_t>();
    if (v == 0) throw Error(ErrorCode::Parse, what + " entries are 1-based");
    out.push_back(v - 1);
  }
  return out;
}

} // namespace

void write_trace_ndjson(const std::filesystem::path &path, const TraceSet &trace,
                        const std::vector<std::size_t> &ids) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  for (std::size_t s = 0; s < trace.size(); ++s) {
    json rec;
    rec["iteration"] = trace.iteration[s];
    rec["chain"] = trace.chain.empty() ? 0 : trace.chain[s];
    json medoids = json::array();
    json labels = json::array();
    for (std::size_t l = 0; l < trace.layers; ++l) {
      if (!trace.medoids[l].empty()) medoids.push_back(shifted(trace.medoids[l][s], ids));
      labels.push_back(plus_one(trace.labels[l][s]));
    }
    if (!medoids.empty()) rec["medoids"] = medoids;
    rec["labels"] = labels;
    if (!trace.alpha.empty()) rec["alpha"] = trace.alpha[s];
    rec["log_post"] = trace.log_post[s];
    out << rec.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

TraceSet read_trace_ndjson(const std::filesystem::path &path) {
  std::istringstream in(io::read_text(path));
  TraceSet t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
      const auto &labels = rec.at("labels");
      if (t.size() == 0) {
        t.layers = labels.size();
        if (t.layers < 1 || t.layers > 2) throw Error(ErrorCode::Parse, "1 or 2 layers expected");
        t.n = labels[0].size();
      } else if (labels.size() != t.layers) {
        throw Error(ErrorCode::Parse, "layer count changes");
      }
      t.iteration.push_back(rec.at("iteration").get<std::size_t>());
      t.chain.push_back(rec.value("chain", std::size_t{0}));
      for (std::size_t l = 0; l < t.layers; ++l) {
        auto z = minus_one(labels[l], "label");
        if (z.size() != t.n) throw Error(ErrorCode::Parse, "label vector length changes");
        t.labels[l].push_back(std::move(z));
        if (rec.contains("medoids")) t.medoids[l].push_back(minus_one(rec["medoids"][l], "medoid"));
      }
      if (rec.contains("alpha")) t.alpha.push_back(rec["alpha"].get<double>());
      t.log_post.push_back(rec.at("log_post").get<double>());
    } catch (const json::exception &e) {
      throw Error(ErrorCode::Parse,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const Error &e) {
      throw Error(ErrorCode::Parse,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (t.size() == 0) throw Error(ErrorCode::EmptyTrace, path.string() + " has no draws");
  return t;
}

void write_coclustering_csv(const std::filesystem::path &path, const CoClusteringMatrix &m) {
  std::string out;
  for (std::size_t j = 0; j < m.n; ++j) {
    for (std::size_t k = 0; k < m.n; ++k) {
      if (k) out += ',';
      out += format_real(m(j, k));
    }
    out += '\n';
  }
  io::write_text(path, out);
}

void write_coclustering_pgm(const std::filesystem::path &path, const CoClusteringMatrix &m) {
  std::string out = "P5\n" + std::to_string(m.n) + " " + std::to_string(m.n) + "\n255\n";
  out.reserve(out.size() + m.n * m.n);
  for (std::size_t j = 0; j < m.n; ++j) {
    for (std::size_t k = 0; k < m.n; ++k) {
      out += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (1.0 - m(j, k)))));
    }
  }
  io::write_text(path, out);
}

json k_posterior_json(const KPosterior &k) {
  json pmf = json::object();
  for (const auto &[kk, p] : k.pmf) pmf[std::to_string(kk)] = p;
  return {{"pmf", pmf}, {"mean", k.mean}, {"sd", k.sd}};
}

json move_stats_json(const TraceSet &trace) {
  json j = json::object();
  for (const auto &[name, s] : trace.moves) {
    j[name] = {{"proposed", s.proposed}, {"accepted", s.accepted}, {"rate", s.rate()}};
  }
  return j;
}

json scores_json(const Partition &estimate, const Partition &truth) {
  return {{"rand_index", rand_index(estimate, truth)},
          {"adjusted_rand", adjusted_rand(estimate, truth)},
          {"variation_of_information", variation_of_information(estimate, truth)},
          {"k_estimate", estimate.k()},
          {"k_truth", truth.k()}};
}

void PhaseTimer::start(std::string name) {
  stop();
  current_ = std::move(name);
  t0_ = std::chrono::steady_clock::now();
}

void PhaseTimer::stop() {
  if (current_.empty()) return;
  const double s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  done_.emplace_back(current_, s);
  current_.clear();
}

json PhaseTimer::to_json() const {
  json j = json::object();
  for (const auto &[name, s] : done_) j[name] = s;
  return j;
}

double PhaseTimer::total_seconds() const {
  double s = 0.0;
  for (const auto &[name, v] : done_) s += v;
  return s;
}

std::string iso_timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(const std::filesystem::path &path, const json &j) {
  io::write_text(path, j.dump(2) + "\n");
}

} // namespace bdc::cli
