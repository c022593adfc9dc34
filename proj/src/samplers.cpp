#include "bdc/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <unordered_map>

#include "bdc/hyper.hpp"
#include "bdc/kmedoids.hpp"
#include "sampler_detail.hpp"

namespace bdc {

namespace detail {

std::size_t sample_log_weights(const std::vector<double> &w, std::mt19937_64 &rng) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : w) hi = std::max(hi, v);
  std::vector<double> cum(w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += std::isfinite(hi) ? std::exp(w[i] - hi) : 0.0;
    cum[i] = acc;
  }
  if (!(acc > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "all candidate weights are zero");
  }
  const double u = uniform01(rng) * acc;
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  std::size_t idx = static_cast<std::size_t>(it - cum.begin());
  if (idx >= w.size()) idx = w.size() - 1;
  // Never land on a zero-weight entry through rounding at the boundary.
  while (idx > 0 && !(w[idx] > -std::numeric_limits<double>::infinity())) --idx;
  return idx;
}

double sample_beta(double a, double b, std::mt19937_64 &rng) {
  const double x = std::gamma_distribution<double>(a, 1.0)(rng);
  const double y = std::gamma_distribution<double>(b, 1.0)(rng);
  if (x + y == 0.0) return a >= b ? 1.0 : 0.0;
  return x / (x + y);
}

} // namespace detail

using detail::accept_log;
using detail::uniform01;
using detail::uniform_index;

void ChainConfig::validate() const {
  if (iterations == 0) throw Error(ErrorCode::InvalidConfig, "iterations must be positive");
  if (burn_in >= iterations) {
    throw Error(ErrorCode::InvalidConfig, "burn-in must be smaller than the iteration count");
  }
  if (thin == 0) throw Error(ErrorCode::InvalidConfig, "thin must be at least 1");
}

double birth_hastings(std::size_t n, std::size_t k_old) {
  return static_cast<double>(n - k_old) / static_cast<double>(k_old + 1);
}

double death_hastings(std::size_t n, std::size_t k_old) {
  return static_cast<double>(k_old) / static_cast<double>(n - k_old + 1);
}

MedoidSet initial_medoids(const DistanceMatrix &d, const InitSpec &init, std::mt19937_64 &rng) {
  const std::size_t n = d.size();
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "empty distance matrix");
  switch (init.kind) {
  case InitSpec::Kind::Explicit:
    return MedoidSet(init.medoids, n);
  case InitSpec::Kind::RandomK: {
    if (init.k < 1 || init.k > n) {
      throw Error(ErrorCode::InvalidConfig, "random init needs 1 <= k <= N");
    }
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(init.k);
    return MedoidSet(std::move(all), n);
  }
  case InitSpec::Kind::FromPam:
    break;
  }
  std::size_t k = init.k;
  if (k == 0) {
    if (n == 1) {
      k = 1;
    } else {
      const std::size_t lo = 2;
      const std::size_t hi = std::min(n, std::max<std::size_t>(2, default_k_max(n)));
      k = elbow_k(d, lo, hi);
    }
  }
  return pam(d, k).medoids;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Layer {
  MedoidSet medoids;
  Partition part;
  double loglik = 0.0;
  double logprior = 0.0;
  [[nodiscard]] double score() const { return loglik + logprior; }
};

class TessTarget {
public:
  TessTarget(const DistanceMatrix &d, const LikelihoodConfig &cfg,
             const MedoidPriorConfig &prior, bool prior_only)
      : d_(&d), eval_(d, cfg), prior_only_(prior_only), log_prior_(d.size() + 1, kNegInf) {
    for (std::size_t k = 1; k <= d.size(); ++k) log_prior_[k] = log_medoid_prior(k, d.size(), prior);
  }

  [[nodiscard]] std::size_t n() const { return d_->size(); }
  [[nodiscard]] const DistanceMatrix &d() const { return *d_; }
  [[nodiscard]] double logprior(std::size_t k) const { return log_prior_[k]; }
  [[nodiscard]] double loglik(const MedoidSet &m, const Partition &t) const {
    return prior_only_ ? 0.0 : eval_(m, t);
  }

  [[nodiscard]] Layer evaluate(MedoidSet m) const {
    Layer out;
    out.part = induce_partition(*d_, m);
    out.loglik = loglik(m, out.part);
    out.logprior = logprior(m.size());
    out.medoids = std::move(m);
    return out;
  }

  /// Layer-2 state of a nested pair.
  [[nodiscard]] Layer evaluate_nested(const MultiViewData &mv, const MedoidSet &layer1,
                                      MedoidSet m) const {
    Layer out;
    out.part = induce_nested_partition(mv, layer1, m).layer2;
    out.loglik = loglik(m, out.part);
    out.logprior = logprior(m.size());
    out.medoids = std::move(m);
    return out;
  }

private:
  const DistanceMatrix *d_;
  LikelihoodEvaluator eval_;
  bool prior_only_;
  std::vector<double> log_prior_;
};

// r-th object (0-based) not in the sorted medoid list.
std::size_t nth_non_medoid(std::span<const std::size_t> medoids, std::size_t r) {
  std::size_t candidate = r;
  for (std::size_t m : medoids) {
    if (m <= candidate) ++candidate;
    else break;
  }
  return candidate;
}

struct Proposal {
  bool valid = false;
  MedoidSet medoids;
  double log_beta = 0.0;
  const char *kind = "move";
};

// Birth/death/move on the full object set: even t moves, odd t births or
// kills with probability 1/2 each.
Proposal propose(const MedoidSet &cur, std::size_t t, std::mt19937_64 &rng) {
  const std::size_t n = cur.universe();
  const std::size_t k = cur.size();
  const double u = uniform01(rng);
  Proposal p;
  if (t % 2 == 0) {
    p.kind = "move";
    if (k == n) return p;
    const std::size_t out = cur[uniform_index(k, rng)];
    const std::size_t in = nth_non_medoid(cur.indices(), uniform_index(n - k, rng));
    p.medoids = cur.with(in).without(out);
    p.valid = true;
    return p;
  }
  if (u < 0.5) {
    p.kind = "birth";
    if (k == n) return p;
    const std::size_t in = nth_non_medoid(cur.indices(), uniform_index(n - k, rng));
    p.medoids = cur.with(in);
    p.log_beta = std::log(birth_hastings(n, k));
    p.valid = true;
    return p;
  }
  p.kind = "death";
  if (k == 1) return p;
  p.medoids = cur.without(cur[uniform_index(k, rng)]);
  p.log_beta = std::log(death_hastings(n, k));
  p.valid = true;
  return p;
}

// The same moves restricted to one layer-1 cluster: the cluster plays the
// role of the object set, and death must leave one layer-2 medoid inside it.
Proposal propose_within(const MedoidSet &cur, const std::vector<std::size_t> &cluster,
                        std::size_t t, std::mt19937_64 &rng) {
  std::vector<std::size_t> inside;
  std::vector<std::size_t> outside;
  for (std::size_t j : cluster) (cur.contains(j) ? inside : outside).push_back(j);
  const std::size_t s = cluster.size();
  const std::size_t m = inside.size();
  const double u = uniform01(rng);
  Proposal p;
  if (t % 2 == 0) {
    p.kind = "move2";
    if (outside.empty()) return p;
    const std::size_t out = inside[uniform_index(m, rng)];
    const std::size_t in = outside[uniform_index(outside.size(), rng)];
    p.medoids = cur.with(in).without(out);
    p.valid = true;
    return p;
  }
  if (u < 0.5) {
    p.kind = "birth2";
    if (outside.empty()) return p;
    p.medoids = cur.with(outside[uniform_index(outside.size(), rng)]);
    p.log_beta = std::log(birth_hastings(s, m));
    p.valid = true;
    return p;
  }
  p.kind = "death2";
  if (m <= 1) return p;
  p.medoids = cur.without(inside[uniform_index(m, rng)]);
  p.log_beta = std::log(death_hastings(s, m));
  p.valid = true;
  return p;
}

std::vector<std::size_t> to_vector(std::span<const std::size_t> s) {
  return {s.begin(), s.end()};
}

void record_layer(TraceSet &trace, std::size_t layer, const Layer &l) {
  trace.medoids[layer].push_back(to_vector(l.medoids.indices()));
  trace.labels[layer].push_back(to_vector(l.part.labels()));
}

void count(TraceSet &trace, const char *kind, bool accepted) {
  auto &s = trace.moves[kind];
  ++s.proposed;
  if (accepted) ++s.accepted;
}

// Memoized ln C(d); keyed by the exact distance value.
class PenaltyCache {
public:
  explicit PenaltyCache(const AlphaPriorConfig &cfg) : cfg_(cfg) { cfg_.validate(); }
  double operator()(double d) {
    auto it = cache_.find(d);
    if (it != cache_.end()) return it->second;
    const double v = log_penalty_C(d, cfg_);
    cache_.emplace(d, v);
    return v;
  }

private:
  AlphaPriorConfig cfg_;
  std::unordered_map<double, double> cache_;
};

void draw_alphas(TraceSet &trace, const std::vector<double> &distances,
                 const AlphaPriorConfig &cfg, std::mt19937_64 &rng) {
  std::unordered_map<double, std::unique_ptr<AlphaPosterior>> posts;
  trace.alpha.reserve(distances.size());
  for (double d : distances) {
    auto &slot = posts[d];
    if (!slot) slot = std::make_unique<AlphaPosterior>(d, cfg);
    trace.alpha.push_back(slot->sample(rng));
  }
}

} // namespace

// ---------------------------------------------------------------------------
// Single layer

TraceSet run_bdm(const DistanceMatrix &d, const LikelihoodConfig &cfg,
                 const MedoidPriorConfig &prior, const ChainConfig &chain) {
  chain.validate();
  std::mt19937_64 rng(chain.seed);
  const TessTarget target(d, cfg, prior, chain.prior_only);
  Layer cur = target.evaluate(initial_medoids(d, chain.init, rng));
  TraceSet trace;
  trace.n = d.size();
  for (std::size_t t = 1; t <= chain.iterations; ++t) {
    Proposal p = propose(cur.medoids, t, rng);
    if (p.valid) {
      Layer next = target.evaluate(std::move(p.medoids));
      const bool ok = accept_log(next.score() - cur.score() + p.log_beta, rng);
      if (ok) cur = std::move(next);
      count(trace, p.kind, ok);
    } else {
      count(trace, p.kind, false);
    }
    if (detail::retained(t, chain)) {
      trace.iteration.push_back(t);
      record_layer(trace, 0, cur);
      trace.log_post.push_back(cur.score());
    }
  }
  return trace;
}

TraceSet run_gibbs_indicators(const DistanceMatrix &d, const LikelihoodConfig &cfg,
                              const MedoidPriorConfig &prior, const ChainConfig &chain) {
  chain.validate();
  std::mt19937_64 rng(chain.seed);
  const TessTarget target(d, cfg, prior, chain.prior_only);
  Layer cur = target.evaluate(initial_medoids(d, chain.init, rng));
  TraceSet trace;
  trace.n = d.size();
  for (std::size_t t = 1; t <= chain.iterations; ++t) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      const bool is_medoid = cur.medoids.contains(i);
      if (is_medoid && cur.medoids.size() == 1) {
        count(trace, "gibbs", false);
        continue;
      }
      Layer alt = target.evaluate(is_medoid ? cur.medoids.without(i) : cur.medoids.with(i));
      const double on = is_medoid ? cur.score() : alt.score();
      const double off = is_medoid ? alt.score() : cur.score();
      // P(w_i = 1 | rest) = 1 / (1 + exp(off - on))
      const double p_on = 1.0 / (1.0 + std::exp(off - on));
      const bool want = uniform01(rng) < p_on;
      const bool flip = want != is_medoid;
      if (flip) cur = std::move(alt);
      count(trace, "gibbs", flip);
    }
    if (detail::retained(t, chain)) {
      trace.iteration.push_back(t);
      record_layer(trace, 0, cur);
      trace.log_post.push_back(cur.score());
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Nested

TraceSet run_nested(const MultiViewData &mv, const LikelihoodConfig &cfg1,
                    const LikelihoodConfig &cfg2, const MedoidPriorConfig &prior,
                    const ChainConfig &chain) {
  chain.validate();
  std::mt19937_64 rng(chain.seed);
  const TessTarget t1(mv.d1, cfg1, prior, chain.prior_only);
  const TessTarget t2(mv.d2, cfg2, prior, chain.prior_only);
  Layer l1 = t1.evaluate(initial_medoids(mv.d1, chain.init, rng));
  Layer l2 = t2.evaluate_nested(mv, l1.medoids, l1.medoids);
  TraceSet trace;
  trace.n = mv.size();
  trace.layers = 2;
  for (std::size_t t = 1; t <= chain.iterations; ++t) {
    // Layer 1 with the repaired layer-2 set, accepted jointly.
    Proposal p = propose(l1.medoids, t, rng);
    if (p.valid) {
      Layer n1 = t1.evaluate(std::move(p.medoids));
      Layer n2 = t2.evaluate_nested(mv, n1.medoids,
                                    repair_nested_medoids(mv, n1.medoids, l2.medoids));
      const double delta = n1.score() + n2.score() - l1.score() - l2.score() + p.log_beta;
      const bool ok = accept_log(delta, rng);
      if (ok) {
        l1 = std::move(n1);
        l2 = std::move(n2);
      }
      count(trace, p.kind, ok);
    } else {
      count(trace, p.kind, false);
    }
    // Layer 2, one restricted update per layer-1 cluster.
    const auto clusters = l1.part.clusters();
    for (const auto &cluster : clusters) {
      Proposal q = propose_within(l2.medoids, cluster, t, rng);
      if (!q.valid) {
        count(trace, q.kind, false);
        continue;
      }
      Layer n2 = t2.evaluate_nested(mv, l1.medoids, std::move(q.medoids));
      const bool ok = accept_log(n2.score() - l2.score() + q.log_beta, rng);
      if (ok) l2 = std::move(n2);
      count(trace, q.kind, ok);
    }
    if (detail::retained(t, chain)) {
      trace.iteration.push_back(t);
      record_layer(trace, 0, l1);
      record_layer(trace, 1, l2);
      trace.log_post.push_back(l1.score() + l2.score());
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Joint

TraceSet run_joint(const MultiViewData &mv, const LikelihoodConfig &cfg1,
                   const LikelihoodConfig &cfg2, const MedoidPriorConfig &prior,
                   const AlphaPriorConfig &alpha_prior, const ChainConfig &chain) {
  chain.validate();
  std::mt19937_64 rng(chain.seed);
  const TessTarget t1(mv.d1, cfg1, prior, chain.prior_only);
  const TessTarget t2(mv.d2, cfg2, prior, chain.prior_only);
  PenaltyCache log_c(alpha_prior);
  Layer l1 = t1.evaluate(initial_medoids(mv.d1, chain.init, rng));
  Layer l2 = t2.evaluate(initial_medoids(mv.d2, chain.init, rng));
  double dist = partition_distance(l1.part, l2.part);
  double pen = log_c(dist);
  TraceSet trace;
  trace.n = mv.size();
  trace.layers = 2;
  std::vector<double> kept_distances;
  for (std::size_t t = 1; t <= chain.iterations; ++t) {
    for (int layer = 0; layer < 2; ++layer) {
      Layer &cur = layer == 0 ? l1 : l2;
      const TessTarget &target = layer == 0 ? t1 : t2;
      Proposal p = propose(cur.medoids, t, rng);
      const std::string kind = std::string(p.kind) + (layer == 0 ? "1" : "2");
      if (!p.valid) {
        count(trace, kind.c_str(), false);
        continue;
      }
      Layer next = target.evaluate(std::move(p.medoids));
      const double nd = layer == 0 ? partition_distance(next.part, l2.part)
                                   : partition_distance(l1.part, next.part);
      const double npen = log_c(nd);
      const bool ok = accept_log(next.score() + npen - cur.score() - pen + p.log_beta, rng);
      if (ok) {
        cur = std::move(next);
        dist = nd;
        pen = npen;
      }
      count(trace, kind.c_str(), ok);
    }
    if (detail::retained(t, chain)) {
      trace.iteration.push_back(t);
      record_layer(trace, 0, l1);
      record_layer(trace, 1, l2);
      trace.log_post.push_back(l1.score() + l2.score() + pen);
      kept_distances.push_back(dist);
    }
  }
  draw_alphas(trace, kept_distances, alpha_prior, rng);
  return trace;
}

TraceSet run_joint_gibbs(const MultiViewData &mv, const LikelihoodConfig &cfg1,
                         const LikelihoodConfig &cfg2, const MedoidPriorConfig &prior,
                         const AlphaPriorConfig &alpha_prior, const ChainConfig &chain) {
  chain.validate();
  std::mt19937_64 rng(chain.seed);
  const TessTarget t1(mv.d1, cfg1, prior, chain.prior_only);
  const TessTarget t2(mv.d2, cfg2, prior, chain.prior_only);
  PenaltyCache log_c(alpha_prior);
  Layer l1 = t1.evaluate(initial_medoids(mv.d1, chain.init, rng));
  Layer l2 = t2.evaluate(initial_medoids(mv.d2, chain.init, rng));
  double dist = partition_distance(l1.part, l2.part);
  double pen = log_c(dist);
  TraceSet trace;
  trace.n = mv.size();
  trace.layers = 2;
  std::vector<double> kept_distances;
  for (std::size_t t = 1; t <= chain.iterations; ++t) {
    for (int layer = 0; layer < 2; ++layer) {
      Layer &cur = layer == 0 ? l1 : l2;
      const TessTarget &target = layer == 0 ? t1 : t2;
      for (std::size_t i = 0; i < mv.size(); ++i) {
        const bool is_medoid = cur.medoids.contains(i);
        if (is_medoid && cur.medoids.size() == 1) continue;
        Layer alt = target.evaluate(is_medoid ? cur.medoids.without(i) : cur.medoids.with(i));
        const double ad = layer == 0 ? partition_distance(alt.part, l2.part)
                                     : partition_distance(l1.part, alt.part);
        const double apen = log_c(ad);
        const double cur_total = cur.score() + pen;
        const double alt_total = alt.score() + apen;
        const double on = is_medoid ? cur_total : alt_total;
        const double off = is_medoid ? alt_total : cur_total;
        double p_on = 0.0;
        if (on == kNegInf && off == kNegInf) p_on = is_medoid ? 1.0 : 0.0;
        else p_on = 1.0 / (1.0 + std::exp(off - on));
        const bool want = uniform01(rng) < p_on;
        if (want != is_medoid) {
          cur = std::move(alt);
          dist = ad;
          pen = apen;
        }
      }
    }
    if (detail::retained(t, chain)) {
      trace.iteration.push_back(t);
      record_layer(trace, 0, l1);
      record_layer(trace, 1, l2);
      trace.log_post.push_back(l1.score() + l2.score() + pen);
      kept_distances.push_back(dist);
    }
  }
  draw_alphas(trace, kept_distances, alpha_prior, rng);
  return trace;
}

double sample_alpha_conditional(std::size_t kappa_sum, std::size_t n,
                                const AlphaPriorConfig &prior, std::mt19937_64 &rng) {
  prior.validate();
  if (kappa_sum > n) throw Error(ErrorCode::InvalidConfig, "kappa sum exceeds N");
  return detail::sample_beta(prior.a + static_cast<double>(kappa_sum),
                             prior.b + static_cast<double>(n - kappa_sum), rng);
}

// ---------------------------------------------------------------------------
// Chains

std::uint64_t splitmix64(std::uint64_t &state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  std::uint64_t state = master;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t i = 0; i < stream; ++i) out = splitmix64(state);
  return out;
}

std::size_t worker_limit() {
  if (const char *env = std::getenv("BDC_THREADS")) {
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<TraceSet> run_chains(std::size_t chains, const ChainConfig &base,
                                 const std::function<TraceSet(const ChainConfig &)> &run,
                                 std::size_t max_threads) {
  std::vector<TraceSet> out(chains);
  if (chains == 0) return out;
  std::size_t workers = max_threads ? max_threads : worker_limit();
  workers = std::min(workers, chains);
  std::vector<std::exception_ptr> errors(chains);
  std::size_t next = 0;
  std::mutex mu;
  auto work = [&] {
    while (true) {
      std::size_t c = 0;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= chains) return;
        c = next++;
      }
      ChainConfig cfg = base;
      cfg.seed = derive_seed(base.seed, c);
      try {
        out[c] = run(cfg);
        out[c].chain.assign(out[c].size(), c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto &th : pool) th.join();
  }
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

TraceSet merge_traces(const std::vector<TraceSet> &parts) {
  TraceSet out;
  if (parts.empty()) return out;
  out.n = parts.front().n;
  out.layers = parts.front().layers;
  for (std::size_t c = 0; c < parts.size(); ++c) {
    const TraceSet &p = parts[c];
    if (p.n != out.n || p.layers != out.layers) {
      throw Error(ErrorCode::LengthMismatch, "cannot merge traces of different shapes");
    }
    out.iteration.insert(out.iteration.end(), p.iteration.begin(), p.iteration.end());
    for (std::size_t l = 0; l < 2; ++l) {
      out.medoids[l].insert(out.medoids[l].end(), p.medoids[l].begin(), p.medoids[l].end());
      out.labels[l].insert(out.labels[l].end(), p.labels[l].begin(), p.labels[l].end());
    }
    out.alpha.insert(out.alpha.end(), p.alpha.begin(), p.alpha.end());
    out.log_post.insert(out.log_post.end(), p.log_post.begin(), p.log_post.end());
    if (p.chain.size() == p.size()) {
      out.chain.insert(out.chain.end(), p.chain.begin(), p.chain.end());
    } else {
      out.chain.insert(out.chain.end(), p.size(), c);
    }
    for (const auto &[k, s] : p.moves) {
      out.moves[k].proposed += s.proposed;
      out.moves[k].accepted += s.accepted;
    }
  }
  return out;
}

} // namespace bdc
