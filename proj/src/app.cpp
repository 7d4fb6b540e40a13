#include "explore/app.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>

#include "explore/distance.hpp"
#include "explore/error.hpp"
#include "explore/parallel.hpp"
#include "explore/synthetic.hpp"

namespace explore {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  return hex.str();
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const char* basis_name(Basis b) { return b == Basis::Users ? "users" : "categories"; }

json report_json(const ExperimentReport& r) {
  json j;
  j["expected_steps_target"] = r.target_steps;
  j["lambda"] = r.lambda;
  j["gamma"] = r.gamma;
  j["expected_steps"] = r.expected_steps;
  j["k"] = r.k;
  j["trials"] = r.trials;
  j["users"] = r.users;
  j["max_distance_diversity"] = r.maxima.distance;
  j["max_coverage_diversity"] = r.maxima.coverage;
  j["max_coverage_is_lower_bound"] = true;
  j["max_horizon"] = r.maxima.horizon;
  j["zero_pair_fallbacks"] = r.zero_pair_fallbacks;
  j["anova_valid"] = r.anova_valid;
  if (r.anova_valid) {
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      const auto& a = r.anova[m];
      j["anova"][metric_name(static_cast<Metric>(m))] = {
          {"f", jnum(a.f)}, {"p", jnum(a.p)}, {"df_between", a.df_between},
          {"df_within", a.df_within}, {"identical_groups", a.identical_groups}};
    }
  }
  for (const auto& s : r.strategies) {
    json js;
    js["label"] = s.label;
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      const char* name = metric_name(static_cast<Metric>(m));
      js[name] = {{"mean", s.metric[m].mean}, {"std", s.metric[m].std}, {"trial_means", s.trial_means[m]}};
    }
    js["consumed"] = {{"mean", s.consumed.mean}, {"std", s.consumed.std}};
    js["delta_d"] = jnum(s.delta_d);
    js["delta_c"] = jnum(s.delta_c);
    js["delta_steps"] = jnum(s.delta_steps);
    js["hr"] = s.hr;
    js["precision"] = s.precision;
    js["recall"] = s.recall;
    js["accuracy_users"] = s.accuracy_users;
    js["traces"] = s.traces;
    js["failed"] = s.failed;
    js["failures"] = s.failures;
    js["quit_reasons"] = {{"weariness", s.quit_reasons[1]},
                          {"no_interest", s.quit_reasons[2]},
                          {"pool_exhausted", s.quit_reasons[3]}};
    js["uniform_fallbacks"] = s.uniform_fallbacks;
    j["strategies"].push_back(js);
  }
  return j;
}

// Writes a file and remembers its path for the manifest.
void emit(const fs::path& path, const std::string& content, std::vector<fs::path>& files) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed: " + path.string());
  files.push_back(path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

void write_report_tsv(const std::vector<ExperimentReport>& reports, std::ostream& out) {
  out << "strategy\texpected_steps\tdiv_d\tdiv_c\tkappa\tdelta_d\tdelta_c\tdelta_steps\thr\t"
         "precision\trecall\tf_div_d\tp_div_d\tf_div_c\tp_div_c\tf_kappa\tp_kappa\t"
         "div_d_std\tdiv_c_std\tkappa_std\tfailed\n";
  for (const auto& r : reports) {
    for (const auto& s : r.strategies) {
      out << s.label << '\t' << num(r.target_steps) << '\t' << num(s.metric[kDivD].mean) << '\t'
          << num(s.metric[kDivC].mean) << '\t' << num(s.metric[kKappa].mean) << '\t'
          << num(s.delta_d) << '\t' << num(s.delta_c) << '\t' << num(s.delta_steps) << '\t'
          << num(s.hr) << '\t' << num(s.precision) << '\t' << num(s.recall);
      for (std::size_t m = 0; m < kMetricCount; ++m) {
        const double nan = std::nan("");
        out << '\t' << num(r.anova_valid ? r.anova[m].f : nan) << '\t'
            << num(r.anova_valid ? r.anova[m].p : nan);
      }
      out << '\t' << num(s.metric[kDivD].std) << '\t' << num(s.metric[kDivC].std) << '\t'
          << num(s.metric[kKappa].std) << '\t' << s.failed << '\n';
    }
  }
}

RunResult execute_run(const RunConfig& c, std::ostream& log) {
  if (c.workers > 0) set_worker_count(c.workers);
  const Catalog catalog = load_dataset(c.ratings_path, c.schema);
  log << "loaded " << catalog.n_users() << " users, " << catalog.n_items() << " items, "
      << catalog.n_categories() << " categories, " << catalog.n_ratings() << " ratings\n";

  const SplitPair split = split_interactions(catalog, c.train_ratio, c.seed);
  const Catalog train = catalog.with_ratings(split.train);

  json run;
  run["seed"] = c.seed;
  run["users"] = catalog.n_users();
  run["items"] = catalog.n_items();
  run["categories"] = catalog.n_categories();
  run["ratings"] = catalog.n_ratings();
  run["train_ratings"] = split.train.size();
  run["test_ratings"] = split.test.size();

  std::unique_ptr<RelevanceModel> relevance;
  if (c.relevance == RelevanceSource::Mf) {
    MfParams mf = c.mf;
    if (!c.mf_seed_set) mf.seed = derive_seed(c.seed, {static_cast<std::uint64_t>(Stream::Mf)});
    auto model = std::make_unique<MfModel>(train_mf(split.train, catalog.n_items(), mf, catalog.scale()));
    run["relevance"] = "mf";
    run["mf_epoch_rmse"] = model->epoch_rmse();
    run["mf_test_rmse"] = jnum(split.test.size() ? rmse(*model, split.test) : std::nan(""));
    log << "mf: train rmse " << num(model->epoch_rmse().back()) << "\n";
    relevance = std::move(model);
  } else {
    relevance = std::make_unique<FrozenRelevanceModel>(
        load_score_table(c.score_table, catalog, c.score_delimiter));
    run["relevance"] = "table";
  }

  Basis basis = c.basis == "users" ? Basis::Users : Basis::Categories;
  if (c.basis == "auto") {
    const auto choice = choose_basis(train, c.sample_pairs, c.seed, c.rating_weighted);
    basis = choice.basis;
    run["basis_mean_users"] = choice.mean_users;
    run["basis_mean_categories"] = choice.mean_categories;
    run["basis_excluded_users"] = choice.excluded_users;
    run["basis_excluded_categories"] = choice.excluded_categories;
  }
  if (basis == Basis::Categories && catalog.n_categories() == 0)
    throw ConfigError("distance.basis: categories requested but the catalog has none");
  DistanceModel dist(train, basis, c.rating_weighted);
  dist.precompute_cache(std::min(c.hot_items, catalog.n_items()), ExecutionPolicy::Parallel);
  run["basis"] = basis_name(basis);
  run["cached_pairs"] = dist.cached_pairs();
  run["mean_distance"] = dist.estimate_mean(
      c.sample_pairs, derive_seed(c.seed, {static_cast<std::uint64_t>(Stream::BasisSample), 1}));
  log << "distance basis: " << basis_name(basis) << "\n";

  std::vector<UserId> users = users_with_test_items(split.test);
  if (c.max_users > 0 && users.size() > c.max_users) {
    Rng rng(derive_seed(c.seed, {static_cast<std::uint64_t>(Stream::UserSample)}));
    rng.shuffle(users.begin(), users.end());
    users.resize(c.max_users);
    std::sort(users.begin(), users.end());
  }
  run["simulated_users"] = users.size();

  ExperimentConfig ec;
  ec.catalog = &train;
  ec.test = &split.test;
  ec.relevance = relevance.get();
  ec.dist = &dist;
  for (const auto& e : c.strategies) ec.strategies.push_back({e.label, make_strategy(e)});
  ec.trials = c.trials;
  ec.users = users;
  ec.seed = c.seed;
  ec.trace.prune_top_n = c.prune_top_n;
  ec.policy = ExecutionPolicy::Parallel;
  ec.params.gamma = c.gamma;
  ec.params.k = c.k;
  ec.params.scale = catalog.scale();
  ec.params.sequential_consumption = c.sequential_consumption;

  RunResult result;
  for (double target : c.expected_steps) {
    const auto sol = solve_lambda(target, c.gamma);
    ec.params.lambda = sol.lambda;
    ec.target_steps = target;
    log << "E[steps] = " << num(target) << ": lambda " << num(sol.lambda) << "\n";
    result.reports.push_back(run_experiment(ec));
    for (const auto& s : result.reports.back().strategies)
      if (s.failed) log << "warning: " << s.label << " had " << s.failed << " failed traces\n";
  }

  fs::create_directories(c.output_dir);
  std::vector<fs::path>& files = result.files;

  std::ostringstream tsv;
  write_report_tsv(result.reports, tsv);
  emit(c.output_dir / "report.tsv", tsv.str(), files);

  json doc;
  doc["run"] = run;
  for (const auto& r : result.reports) doc["experiments"].push_back(report_json(r));
  emit(c.output_dir / "report.json", doc.dump(2) + "\n", files);

  std::ostringstream traces;
  traces << "strategy\texpected_steps\ttraces\tfailed\tconsumed_mean\tconsumed_std\tkappa_mean\t"
            "kappa_std\tquit_weariness\tquit_no_interest\tquit_pool_exhausted\tuniform_fallbacks\n";
  for (const auto& r : result.reports)
    for (const auto& s : r.strategies)
      traces << s.label << '\t' << num(r.target_steps) << '\t' << s.traces << '\t' << s.failed << '\t'
             << num(s.consumed.mean) << '\t' << num(s.consumed.std) << '\t'
             << num(s.metric[kKappa].mean) << '\t' << num(s.metric[kKappa].std) << '\t'
             << s.quit_reasons[1] << '\t' << s.quit_reasons[2] << '\t' << s.quit_reasons[3] << '\t'
             << s.uniform_fallbacks << '\n';
  emit(c.output_dir / "traces.tsv", traces.str(), files);

  // scatter data: recommendation quality on x, diversity on y
  for (Metric m : {kDivD, kDivC}) {
    std::ostringstream plot;
    plot << "expected_steps\tstrategy\thr\tprecision\trecall\t" << metric_name(m) << '\n';
    for (const auto& r : result.reports)
      for (const auto& s : r.strategies)
        plot << num(r.target_steps) << '\t' << s.label << '\t' << num(s.hr) << '\t'
             << num(s.precision) << '\t' << num(s.recall) << '\t' << num(s.metric[m].mean) << '\n';
    emit(c.output_dir / (std::string("plot_") + metric_name(m) + ".tsv"), plot.str(), files);
  }

  std::ostringstream manifest;
  manifest << "file\tbytes\tsha256\n";
  for (const auto& f : files) {
    const std::string body = read_file(f);
    manifest << f.filename().string() << '\t' << body.size() << '\t' << sha256_hex(body) << '\n';
  }
  emit(c.output_dir / "manifest.tsv", manifest.str(), files);
  return result;
}

int cmd_run(const fs::path& config_path, const RunOverrides& overrides, std::ostream& out,
            std::ostream& err) {
  RunConfig config;
  try {
    config = load_run_config(config_path);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.out) config.output_dir = *overrides.out;
  if (overrides.workers) config.workers = *overrides.workers;
  try {
    const auto result = execute_run(config, out);
    out << "wrote " << result.files.size() << " files to " << config.output_dir.string() << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_calibrate(double gamma, const std::vector<double>& targets, std::ostream& out,
                  std::ostream& err) {
  if (!(gamma > 0.0)) {
    err << "gamma must be > 0\n";
    return kExitConfig;
  }
  if (targets.empty()) {
    err << "no expected_steps targets given\n";
    return kExitConfig;
  }
  try {
    out << "gamma\ttarget\tlambda\tachieved\titerations\tmu\tmu_minus_1_le_E_le_mu_plus_1\n";
    for (double target : targets) {
      const auto sol = solve_lambda(target, gamma);
      UserModelParams p;
      p.lambda = sol.lambda;
      p.gamma = gamma;
      const double mu = continuous_weibull_mean(p);
      const bool within = sol.achieved >= mu - 1.0 && sol.achieved <= mu + 1.0;
      out << num(gamma) << '\t' << num(target) << '\t' << std::setprecision(12) << sol.lambda << '\t'
          << sol.achieved << '\t' << sol.iterations << '\t' << mu << '\t' << (within ? "yes" : "no")
          << '\n';
    }
    out << "note: mu = lambda * Gamma(1 + 1/gamma) is the continuous Weibull mean; the discrete "
           "expectation is only expected to lie within 1 of it.\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_ingest_check(const fs::path& config_path, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = load_run_config(config_path);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }
  try {
    const Catalog catalog = load_dataset(config.ratings_path, config.schema);
    std::size_t uncategorized = 0;
    for (ItemId i = 0; i < catalog.n_items(); ++i)
      if (catalog.item_categories(i).empty()) ++uncategorized;
    out << "ok: " << catalog.n_users() << " users, " << catalog.n_items() << " items, "
        << catalog.n_categories() << " categories, " << catalog.n_ratings() << " ratings, "
        << uncategorized << " uncategorized items\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_synth(const SynthOptions& o, std::ostream& out, std::ostream& err) {
  try {
    SyntheticDataset data;
    if (o.kind == "clustered") {
      ClusteredParams p;
      p.seed = o.seed;
      if (o.users) p.n_users = o.users;
      if (o.items) p.n_items = o.items;
      data = make_clustered(p);
    } else if (o.kind == "low-rank") {
      LowRankParams p;
      p.seed = o.seed;
      if (o.users) p.n_users = o.users;
      if (o.items) p.n_items = o.items;
      data = make_low_rank(p);
    } else {
      err << "unknown kind '" << o.kind << "' (expected clustered or low-rank)\n";
      return kExitConfig;
    }
    fs::create_directories(o.out_dir);
    dump_canonical(data.catalog, o.out_dir);
    std::ofstream table(o.out_dir / "relevance.tsv");
    const auto& cat = data.catalog;
    for (UserId u = 0; u < cat.n_users(); ++u)
      for (ItemId i = 0; i < cat.n_items(); ++i)
        table << cat.user_name(u) << '\t' << cat.item_name(i) << '\t'
              << num(data.relevance[u * cat.n_items() + i]) << '\n';
    out << "wrote " << cat.n_users() << " users, " << cat.n_items() << " items to "
        << o.out_dir.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace explore
