#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>

#include "bdc/hyper.hpp"
#include "bdc/io.hpp"
#include "bdc/kmedoids.hpp"
#include "bdc/metrics.hpp"
#include "bdc/posterior.hpp"
#include "bdc/samplers.hpp"
#include "bdc/simulate.hpp"
#include "outputs.hpp"

namespace bdc::cli {

namespace fs = std::filesystem;

namespace {

void log(const Context &ctx, const std::string &cmd, const std::string &msg) {
  if (!ctx.quiet) std::cerr << "bdc " << cmd << ": " << msg << '\n';
}

fs::path required_path(const Settings &s, const std::string &key) {
  if (!s.has(key)) throw ArgumentError("--" + key + " is required");
  return s.text(key, "");
}

fs::path output_dir(const Settings &s) {
  const fs::path out = required_path(s, "out");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out.string() + ": " + ec.message());
  return out;
}

Partition part(const std::vector<std::size_t> &z) {
  return Partition::from_labels(std::span<const std::size_t>(z));
}

// Point estimate on the fitted objects, extended to every original object:
// prefiltered singletons get a cluster of their own.
std::vector<std::size_t> full_estimate(const Partition &est, std::size_t n_total,
                                       const std::vector<std::size_t> &kept) {
  if (kept.empty()) return {est.labels().begin(), est.labels().end()};
  std::vector<std::size_t> z(n_total, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < kept.size(); ++i) z[kept[i]] = est.label(i);
  std::size_t next = est.k();
  for (auto &x : z) {
    if (x == std::numeric_limits<std::size_t>::max()) x = next++;
  }
  return z;
}

std::vector<std::size_t> one_based(const std::vector<std::size_t> &v) {
  std::vector<std::size_t> out(v);
  for (auto &x : out) ++x;
  return out;
}

json alpha_summary(std::vector<double> a) {
  std::sort(a.begin(), a.end());
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(a.size());
  return {{"mean", mean},
          {"median", sample_quantile(a, 0.5)},
          {"q05", sample_quantile(a, 0.05)},
          {"q95", sample_quantile(a, 0.95)}};
}

struct LayerData {
  fs::path path;
  DistanceMatrix full;
  DistanceMatrix fit; // after prefiltering
};

// Layer-level summaries shared by fit and summarize.
json summarize_layers(const TraceSet &trace, const fs::path &out, std::size_t n_total,
                      const std::vector<std::size_t> &kept,
                      const std::vector<std::optional<std::vector<std::size_t>>> &truth) {
  json layers = json::array();
  for (std::size_t l = 0; l < trace.layers; ++l) {
    const std::string tag = std::to_string(l + 1);
    io::write_label_matrix(out / ("labels" + tag + ".csv"), trace.labels[l]);
    const auto cc = coclustering(trace, l);
    write_coclustering_csv(out / ("coclustering" + tag + ".csv"), cc);
    write_coclustering_pgm(out / ("coclustering" + tag + ".pgm"), cc);
    const auto est = point_estimate(trace, l);
    const auto z = full_estimate(est, n_total, kept);
    io::write_labels(out / ("estimate" + tag + ".csv"), z);
    json lj{{"layer", l + 1},
            {"k_posterior", k_posterior_json(k_posterior(trace, l))},
            {"estimate_k", part(z).k()}};
    if (l < truth.size() && truth[l]) {
      if (truth[l]->size() != z.size()) {
        throw Error(ErrorCode::LengthMismatch, "truth" + tag + " has " +
                                                   std::to_string(truth[l]->size()) +
                                                   " labels, data has " +
                                                   std::to_string(z.size()));
      }
      lj["scores"] = scores_json(part(z), part(*truth[l]));
    }
    layers.push_back(lj);
  }
  return layers;
}

json manifest_base(const Context &ctx, const std::string &command, const std::string &config) {
  return {{"software", "bdc"},
          {"version", ctx.version},
          {"command", command},
          {"config_digest", io::content_digest(config)}};
}

} // namespace

int cmd_simulate(const Context &ctx) {
  const Settings &s = ctx.settings;
  SimConfig sc;
  sc.n = s.count("n", sc.n);
  sc.n_clusters = s.count("clusters", sc.n_clusters);
  sc.dim = s.count("dim", sc.dim);
  sc.sigma_s = s.real("sigma", sc.sigma_s);
  sc.alpha_s = s.real("alpha", sc.alpha_s);
  sc.dirichlet_alpha = s.real("dirichlet", sc.dirichlet_alpha);
  sc.seed = s.count("seed", sc.seed);
  const std::string format = s.text("format", "csv");
  if (format != "csv" && format != "binary") throw ArgumentError("--format must be csv or binary");
  const bool transform = s.flag("transform", false);
  sc.validate();
  const fs::path out = output_dir(s);

  auto sim = simulate_two_layer(sc);
  if (transform) {
    sim.d1 = gamma_quantile_transform(sim.d1);
    sim.d2 = gamma_quantile_transform(sim.d2);
  }
  const std::string ext = format == "csv" ? ".csv" : ".bdcm";
  const auto write_d = [&](const fs::path &p, const DistanceMatrix &d) {
    if (format == "csv") io::write_distance_csv(p, d);
    else io::write_distance_binary(p, d);
  };
  write_d(out / ("d1" + ext), sim.d1);
  write_d(out / ("d2" + ext), sim.d2);
  io::write_labels(out / "truth1.csv", sim.z1_true);
  io::write_labels(out / "truth2.csv", sim.z2_true);

  // No timestamps or output path here, so repeated runs with one seed are
  // byte-identical wherever they are written.
  Settings recorded = s;
  recorded.erase("out");
  const std::string config = recorded.render();
  json m = manifest_base(ctx, "simulate", config);
  m["seed"] = sc.seed;
  m["config"] = config;
  json digests = json::object();
  for (const std::string &name : {"d1" + ext, "d2" + ext, std::string("truth1.csv"),
                                 std::string("truth2.csv")}) {
    digests[name] = io::file_digest(out / name);
  }
  m["outputs"] = digests;
  write_json(out / "manifest.json", m);
  log(ctx, "simulate", "wrote " + std::to_string(sc.n) + " objects to " + out.string());
  return 0;
}

int cmd_hyper(const Context &ctx) {
  const Settings &s = ctx.settings;
  const std::size_t k_lo = s.count("k_min", 2);
  const std::size_t k_hi = s.count("k_max", 0);
  Settings found;
  json report = json::array();
  std::string comments;
  for (int l = 1; l <= 2; ++l) {
    const std::string key = "d" + std::to_string(l);
    if (!s.has(key)) {
      if (l == 1) throw ArgumentError("--d1 is required");
      continue;
    }
    const auto d = io::read_distance(s.text(key, ""));
    const auto h = select_hyperparameters(d, k_lo, k_hi);
    const std::string prefix = "l" + std::to_string(l) + ".";
    found.store_likelihood(prefix, h.cfg);
    comments += "# " + prefix + "k_elbow = " + std::to_string(h.k_elbow) + "\n";
    report.push_back({{"layer", l},
                      {"k_elbow", h.k_elbow},
                      {"a_set_size", h.a_set_size},
                      {"b_set_size", h.b_set_size},
                      {"a_mean", h.diagnostics.a_mean},
                      {"a_var", h.diagnostics.a_var},
                      {"b_mean", h.diagnostics.b_mean},
                      {"b_var", h.diagnostics.b_var},
                      {"delta1", h.cfg.delta1},
                      {"delta2", h.cfg.delta2},
                      {"theta_rate", h.cfg.theta_rate}});
  }
  const std::string text = comments + found.render();
  if (s.has("out")) {
    io::write_text(s.text("out", ""), text);
  } else {
    std::cout << text;
  }
  if (!ctx.quiet) std::cerr << report.dump(2) << '\n';
  return 0;
}

int cmd_fit(const Context &ctx) {
  PhaseTimer timer;
  const std::string started = iso_timestamp_utc();
  Settings s = ctx.settings;

  const std::string model = s.text("model", "tess-indep");
  const std::vector<std::string> models{"tess-indep", "tess-nested", "tess-joint",
                                        "py-indep",   "py-joint",    "kmedoids"};
  if (std::find(models.begin(), models.end(), model) == models.end()) {
    throw ArgumentError("unknown model '" + model + "'");
  }
  const std::string lik = s.text("likelihood", "quadratic");
  if (lik != "quadratic" && lik != "linear") {
    throw ArgumentError("--likelihood must be quadratic or linear");
  }
  if (model.rfind("py-", 0) == 0 && lik == "linear") {
    throw ArgumentError("PY models support only the quadratic likelihood");
  }
  const bool two_layer = model == "tess-nested" || model == "tess-joint" || model == "py-joint";
  if (two_layer && !s.has("d2")) throw ArgumentError("model " + model + " needs --d2");
  if (!two_layer && s.has("d2")) throw ArgumentError("model " + model + " uses one layer; drop --d2");
  const std::size_t chains = s.count("chains", 1);
  if (chains == 0) throw ArgumentError("--chains must be positive");
  const fs::path out = output_dir(s);

  timer.start("load");
  std::vector<LayerData> layers;
  for (int l = 1; l <= (two_layer ? 2 : 1); ++l) {
    LayerData ld;
    ld.path = required_path(s, "d" + std::to_string(l));
    ld.full = io::read_distance(ld.path);
    layers.push_back(std::move(ld));
  }
  const std::size_t n_total = layers[0].full.size();
  if (two_layer && layers[1].full.size() != n_total) {
    throw Error(ErrorCode::LengthMismatch, "d1 and d2 differ in size");
  }
  std::vector<std::optional<std::vector<std::size_t>>> truth(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string key = "truth" + std::to_string(l + 1);
    if (s.has(key)) truth[l] = io::read_labels(s.text(key, ""));
  }

  std::vector<std::size_t> kept;
  std::vector<std::size_t> singletons;
  if (s.has("singleton_threshold")) {
    const double thr = s.real("singleton_threshold", 0.0);
    const double q = s.real("singleton_quantile", 0.01);
    std::vector<bool> flags(n_total, false);
    for (const auto &ld : layers) {
      const auto f = singleton_flags(ld.full, q, thr);
      for (std::size_t i = 0; i < n_total; ++i) flags[i] = flags[i] || f[i];
    }
    for (auto &ld : layers) {
      auto r = apply_prefilter(ld.full, flags);
      ld.fit = std::move(r.restricted);
      kept = r.kept;
      singletons = r.singletons;
    }
    if (kept.empty()) throw Error(ErrorCode::DegenerateDistances, "prefilter removed every object");
    log(ctx, "fit", std::to_string(singletons.size()) + " objects prefiltered as singletons");
  } else {
    for (auto &ld : layers) ld.fit = ld.full;
  }

  json summary{{"model", model}, {"n", n_total}, {"n_fit", layers[0].fit.size()}};
  if (!kept.empty()) {
    summary["prefilter"] = {{"kept", one_based(kept)}, {"singletons", one_based(singletons)}};
  }

  if (model == "kmedoids") {
    timer.start("cluster");
    const auto &d = layers[0].fit;
    std::size_t k = s.count("k", 0);
    if (k == 0) k = elbow_k(d, std::min<std::size_t>(2, d.size()), default_k_max(d.size()));
    const auto r = pam(d, k);
    timer.start("write");
    const auto z = full_estimate(r.labels, n_total, kept);
    io::write_labels(out / "estimate1.csv", z);
    std::vector<std::size_t> med;
    for (std::size_t m : r.medoids.indices()) med.push_back((kept.empty() ? m : kept[m]) + 1);
    summary["k"] = k;
    summary["cost"] = r.cost;
    summary["medoids"] = med;
    if (truth[0]) summary["scores"] = scores_json(part(z), part(*truth[0]));
  } else {
    timer.start("hyper");
    std::vector<LikelihoodConfig> cfgs;
    json hyper = json::array();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const std::string prefix = "l" + std::to_string(l + 1) + ".";
      auto cfg = s.likelihood(prefix);
      if (!cfg) {
        const auto h = select_hyperparameters(layers[l].fit);
        cfg = h.cfg;
        s.store_likelihood(prefix, h.cfg);
        hyper.push_back({{"layer", l + 1}, {"k_elbow", h.k_elbow}});
        log(ctx, "fit", "layer " + std::to_string(l + 1) + " hyperparameters from elbow K = " +
                            std::to_string(h.k_elbow));
      }
      cfg->mode = lik == "linear" ? LikelihoodMode::Linear : LikelihoodMode::Quadratic;
      cfg->repulsion = s.flag("repulsion", true);
      cfg->validate();
      cfgs.push_back(*cfg);
    }
    if (!hyper.empty()) summary["hyperparameter_selection"] = hyper;

    ChainConfig base;
    base.iterations = s.count("iters", base.iterations);
    base.burn_in = s.count("burnin", base.burn_in);
    base.thin = s.count("thin", base.thin);
    base.seed = s.count("seed", base.seed);
    const std::string init = s.text("init", "pam");
    if (init == "pam") {
      base.init.kind = InitSpec::Kind::FromPam;
      base.init.k = s.count("k", 0);
    } else if (init == "random") {
      base.init.kind = InitSpec::Kind::RandomK;
      base.init.k = s.count("k", 1);
    } else {
      throw ArgumentError("--init must be pam or random");
    }
    base.validate();
    MedoidPriorConfig prior{s.real("p", 0.5)};
    prior.validate();
    PYConfig py{s.real("py_m", 1.0), s.real("py_discount", 0.01)};
    AlphaPriorConfig ap{s.real("alpha_a", 1.0), s.real("alpha_b", 1.0)};
    if (model.rfind("py-", 0) == 0) py.validate();
    if (model == "tess-joint" || model == "py-joint") ap.validate();

    std::function<TraceSet(const ChainConfig &)> run;
    const DistanceMatrix &d1 = layers[0].fit;
    std::optional<MultiViewData> mv;
    if (two_layer) mv.emplace(layers[0].fit, layers[1].fit);
    if (model == "tess-indep") {
      run = [&](const ChainConfig &c) { return run_bdm(d1, cfgs[0], prior, c); };
    } else if (model == "tess-nested") {
      run = [&](const ChainConfig &c) { return run_nested(*mv, cfgs[0], cfgs[1], prior, c); };
    } else if (model == "tess-joint") {
      run = [&](const ChainConfig &c) {
        return run_joint(*mv, cfgs[0], cfgs[1], prior, ap, c);
      };
    } else if (model == "py-indep") {
      run = [&](const ChainConfig &c) { return run_py_independent(d1, cfgs[0], py, c); };
    } else {
      run = [&](const ChainConfig &c) {
        return run_py_dependent(*mv, cfgs[0], cfgs[1], py, ap, c);
      };
    }

    timer.start("sample");
    log(ctx, "fit", "running " + std::to_string(chains) + " chain(s) of " +
                        std::to_string(base.iterations) + " iterations");
    const auto trace = merge_traces(run_chains(chains, base, run));
    log(ctx, "fit", std::to_string(trace.size()) + " draws retained");

    timer.start("write");
    write_trace_ndjson(out / "trace.ndjson", trace, kept);
    summary["chains"] = chains;
    summary["draws"] = trace.size();
    summary["moves"] = move_stats_json(trace);
    summary["layers"] = summarize_layers(trace, out, n_total, kept, truth);
    if (!trace.alpha.empty()) summary["alpha"] = alpha_summary(trace.alpha);
  }

  for (std::size_t l = 0; l < truth.size(); ++l) {
    if (truth[l]) io::write_labels(out / ("truth" + std::to_string(l + 1) + ".csv"), *truth[l]);
  }
  write_json(out / "summary.json", summary);
  const std::string config = s.render();
  io::write_text(out / "config.txt", config);
  timer.stop();

  json m = manifest_base(ctx, "fit", config);
  m["seed"] = s.count("seed", 1);
  json data = json::object();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    data["d" + std::to_string(l + 1)] = io::file_digest(layers[l].path);
  }
  m["data_digests"] = data;
  m["started_utc"] = started;
  m["wall_clock_seconds"] = timer.total_seconds();
  m["phases"] = timer.to_json();
  write_json(out / "manifest.json", m);
  log(ctx, "fit", "wrote results to " + out.string());
  return 0;
}

int cmd_score(const Context &ctx, const std::vector<fs::path> &batch) {
  const Settings &s = ctx.settings;
  if (batch.empty()) {
    const auto est = io::read_labels(required_path(s, "estimate"));
    const auto tru = io::read_labels(required_path(s, "truth"));
    if (est.size() != tru.size()) {
      throw Error(ErrorCode::LengthMismatch, "estimate has " + std::to_string(est.size()) +
                                                 " labels, truth has " +
                                                 std::to_string(tru.size()));
    }
    const json j = scores_json(part(est), part(tru));
    if (s.flag("json", false)) {
      std::cout << j.dump(2) << '\n';
    } else {
      std::printf("RI  %.6f\nARI %.6f\nVI  %.6f\nK   %zu\n", j["rand_index"].get<double>(),
                  j["adjusted_rand"].get<double>(),
                  j["variation_of_information"].get<double>(), j["k_estimate"].get<std::size_t>());
    }
    return 0;
  }
  const std::string est_name = s.text("estimate_name", "estimate1.csv");
  const std::string tru_name = s.text("truth_name", "truth1.csv");
  std::vector<double> ri, ari, vi, k;
  for (const auto &dir : batch) {
    const auto est = io::read_labels(dir / est_name);
    const auto tru = io::read_labels(dir / tru_name);
    if (est.size() != tru.size()) {
      throw Error(ErrorCode::LengthMismatch, dir.string() + ": label lengths differ");
    }
    const auto pe = part(est);
    const auto pt = part(tru);
    ri.push_back(rand_index(pe, pt));
    ari.push_back(adjusted_rand(pe, pt));
    vi.push_back(variation_of_information(pe, pt));
    k.push_back(static_cast<double>(pe.k()));
  }
  json table = json::object();
  std::printf("%-5s %10s %10s %10s\n", "", "median", "q25", "q75");
  for (const auto &[name, v] : std::vector<std::pair<std::string, std::vector<double> *>>{
           {"RI", &ri}, {"ARI", &ari}, {"VI", &vi}, {"K", &k}}) {
    const double med = sample_quantile(*v, 0.5);
    const double q1 = sample_quantile(*v, 0.25);
    const double q3 = sample_quantile(*v, 0.75);
    table[name] = {{"median", med}, {"q25", q1}, {"q75", q3}};
    std::printf("%-5s %10.4f %10.4f %10.4f\n", name.c_str(), med, q1, q3);
  }
  table["replicates"] = batch.size();
  if (s.has("out")) write_json(s.text("out", ""), table);
  return 0;
}

int cmd_summarize(const Context &ctx) {
  const Settings &s = ctx.settings;
  auto trace = read_trace_ndjson(required_path(s, "trace"));
  const fs::path out = output_dir(s);
  std::vector<std::optional<std::vector<std::size_t>>> truth(trace.layers);
  for (std::size_t l = 0; l < trace.layers; ++l) {
    const std::string key = "truth" + std::to_string(l + 1);
    if (s.has(key)) truth[l] = io::read_labels(s.text(key, ""));
  }
  json summary{{"n", trace.n}, {"draws", trace.size()}};
  summary["layers"] = summarize_layers(trace, out, trace.n, {}, truth);
  if (!trace.alpha.empty()) summary["alpha"] = alpha_summary(trace.alpha);
  write_json(out / "summary.json", summary);
  log(ctx, "summarize", std::to_string(trace.size()) + " draws summarized into " + out.string());
  return 0;
}

} // namespace bdc::cli
