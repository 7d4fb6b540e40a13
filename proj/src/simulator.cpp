#include "explore/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "explore/error.hpp"

namespace explore {

const char* metric_name(Metric m) {
  switch (m) {
    case kDivD: return "div_d";
    case kDivC: return "div_c";
    case kKappa: return "kappa";
    default: return "?";
  }
}

ExplorationTrace simulate_user(UserId u, const Strategy& strategy, const RelevanceModel& relevance,
                               const DistanceModel& dist, const Catalog& catalog,
                               const UserModelParams& params, Rng& rng,
                               const TraceOptions& options) {
  const std::size_t n = catalog.n_items();
  ExplorationTrace trace{u, InteractionSet(catalog, dist), 0, QuitReason::None, {}, {}, 0};
  std::vector<double> rel(n);
  relevance.score_all(u, rel);
  const RatingScale scale = relevance.scale();

  std::vector<ItemId> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);
  const bool prune = options.prune_top_n > 0 && strategy.allows_pruning();

  std::vector<ItemId> cands;
  std::vector<double> cand_rel, list_b, list_r;
  for (std::size_t t = 0;; ++t) {
    if (remaining.empty()) {
      trace.reason = QuitReason::PoolExhausted;
      break;
    }
    cands = remaining;
    if (prune && cands.size() > options.prune_top_n) {
      const auto cut = cands.begin() + static_cast<std::ptrdiff_t>(options.prune_top_n);
      std::nth_element(cands.begin(), cut, cands.end(), [&](ItemId a, ItemId b) {
        if (rel[a] != rel[b]) return rel[a] > rel[b];
        return a < b;
      });
      cands.erase(cut, cands.end());
      std::sort(cands.begin(), cands.end());
    }
    cand_rel.resize(cands.size());
    for (std::size_t c = 0; c < cands.size(); ++c) cand_rel[c] = rel[cands[c]];

    StrategyContext ctx;
    ctx.user = u;
    ctx.candidates = cands;
    ctx.relevance = cand_rel;
    ctx.history = &trace.picked;
    ctx.dist = &dist;
    ctx.catalog = &catalog;
    ctx.k = params.k;
    ctx.rng = &rng;
    const auto list = strategy.next_list(ctx);

    if (list.size() != std::min(params.k, cands.size()))
      throw Error("strategy '" + strategy.name() + "' returned a list of the wrong length");
    for (std::size_t j = 0; j < list.size(); ++j) {
      if (!std::binary_search(cands.begin(), cands.end(), list[j]))
        throw Error("strategy '" + strategy.name() + "' recommended a non-candidate item");
      for (std::size_t h = 0; h < j; ++h)
        if (list[h] == list[j]) throw Error("strategy '" + strategy.name() + "' repeated an item");
    }
    if (t == 0) trace.first_list = list;
    if (options.record_lists) trace.lists.push_back(list);

    list_b.resize(list.size());
    list_r.resize(list.size());
    for (std::size_t j = 0; j < list.size(); ++j) {
      list_r[j] = rel[list[j]];
      list_b[j] = interest_prob(list_r[j], scale);
    }
    const auto outcome = step_behavior(list, list_b, list_r, t, params, rng);
    ++trace.kappa;
    if (outcome.uniform_fallback) ++trace.uniform_fallbacks;
    if (!outcome.consumed) {
      trace.reason = outcome.reason;
      break;
    }
    trace.picked.insert(outcome.item);
    remaining.erase(std::lower_bound(remaining.begin(), remaining.end(), outcome.item));
  }
  return trace;
}

std::vector<UserId> users_with_test_items(const Interactions& test) {
  std::vector<UserId> out;
  for (UserId u = 0; u < test.by_user.size(); ++u)
    if (!test.by_user[u].empty()) out.push_back(u);
  return out;
}

namespace {

struct UnitResult {
  bool ok = false;
  std::string error;
  std::array<double, kMetricCount> metric{};
  double consumed = 0.0;
  QuitReason reason = QuitReason::None;
  std::optional<Accuracy> accuracy;
  std::size_t uniform_fallbacks = 0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return m;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (!config.catalog || !config.relevance || !config.dist)
    throw Error("run_experiment: catalog, relevance and distance are required");
  if (config.strategies.empty()) throw Error("run_experiment: no strategies");
  if (config.trials < 1) throw Error("run_experiment: trials must be >= 1");
  config.params.validate();
  const Catalog& catalog = *config.catalog;

  std::vector<UserId> users = config.users;
  if (users.empty()) {
    if (config.test)
      users = users_with_test_items(*config.test);
    else {
      users.resize(catalog.n_users());
      std::iota(users.begin(), users.end(), 0);
    }
  }
  if (users.empty()) throw Error("run_experiment: no users to simulate");

  const std::size_t n_s = config.strategies.size(), n_t = config.trials, n_u = users.size();
  const std::size_t n_units = n_s * n_t * n_u;
  std::vector<UnitResult> results(n_units);
  const std::uint64_t fallbacks_before = config.dist->zero_pair_fallbacks();

  std::vector<std::vector<ItemId>> test_items;
  if (config.test) {
    test_items.resize(config.test->by_user.size());
    for (UserId u = 0; u < test_items.size(); ++u)
      for (const auto& r : config.test->by_user[u]) test_items[u].push_back(r.item);
  }

  auto run_unit = [&](std::size_t unit) {
    const std::size_t s = unit / (n_t * n_u);
    const std::size_t trial = (unit / n_u) % n_t;
    const UserId u = users[unit % n_u];
    UnitResult& out = results[unit];
    try {
      Rng rng(derive_seed(config.seed, {static_cast<std::uint64_t>(Stream::Simulation), u, trial}));
      const auto trace = simulate_user(u, *config.strategies[s].strategy, *config.relevance,
                                       *config.dist, catalog, config.params, rng, config.trace);
      out.metric[kDivD] = distance_diversity(trace.picked);
      out.metric[kDivC] = catalog.n_categories() ? coverage_diversity(trace.picked) : 0.0;
      out.metric[kKappa] = static_cast<double>(trace.kappa);
      out.consumed = static_cast<double>(trace.picked.size());
      out.reason = trace.reason;
      out.uniform_fallbacks = trace.uniform_fallbacks;
      if (u < test_items.size())
        out.accuracy = accuracy_at_k(trace.first_list, test_items[u], config.params.k);
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
    }
  };

  const auto units = static_cast<std::ptrdiff_t>(n_units);
  if (config.policy == ExecutionPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t unit = 0; unit < units; ++unit) run_unit(static_cast<std::size_t>(unit));
  } else {
    for (std::ptrdiff_t unit = 0; unit < units; ++unit) run_unit(static_cast<std::size_t>(unit));
  }

  ExperimentReport report;
  report.target_steps = config.target_steps;
  report.lambda = config.params.lambda;
  report.gamma = config.params.gamma;
  report.expected_steps = expected_steps(config.params);
  report.k = config.params.k;
  report.trials = n_t;
  report.users = n_u;
  report.maxima = max_scores(catalog, config.params);

  for (std::size_t s = 0; s < n_s; ++s) {
    StrategyResult sr;
    sr.label = config.strategies[s].label;
    std::array<std::vector<double>, kMetricCount> all;
    std::vector<double> consumed;
    double hr = 0, prec = 0, rec = 0;
    for (std::size_t trial = 0; trial < n_t; ++trial) {
      std::array<double, kMetricCount> sum{};
      std::size_t ok = 0;
      for (std::size_t ui = 0; ui < n_u; ++ui) {
        const auto& r = results[(s * n_t + trial) * n_u + ui];
        if (!r.ok) {
          ++sr.failed;
          if (sr.failures.size() < 5) sr.failures.push_back(r.error);
          continue;
        }
        ++ok;
        for (std::size_t m = 0; m < kMetricCount; ++m) {
          all[m].push_back(r.metric[m]);
          sum[m] += r.metric[m];
        }
        consumed.push_back(r.consumed);
        ++sr.quit_reasons[static_cast<std::size_t>(r.reason)];
        sr.uniform_fallbacks += r.uniform_fallbacks;
        if (r.accuracy) {
          hr += r.accuracy->hr;
          prec += r.accuracy->precision;
          rec += r.accuracy->recall;
          ++sr.accuracy_users;
        }
      }
      if (ok)
        for (std::size_t m = 0; m < kMetricCount; ++m)
          sr.trial_means[m].push_back(sum[m] / static_cast<double>(ok));
    }
    for (std::size_t m = 0; m < kMetricCount; ++m) sr.metric[m] = mean_std(all[m]);
    sr.consumed = mean_std(consumed);
    sr.traces = all[kDivD].size();
    if (sr.accuracy_users) {
      const double na = static_cast<double>(sr.accuracy_users);
      sr.hr = hr / na;
      sr.precision = prec / na;
      sr.recall = rec / na;
    }
    sr.delta_d = relative_gap(report.maxima.distance, sr.metric[kDivD].mean);
    sr.delta_c = relative_gap(report.maxima.coverage, sr.metric[kDivC].mean);
    sr.delta_steps = relative_gap(report.expected_steps, sr.metric[kKappa].mean);
    report.strategies.push_back(std::move(sr));
  }

  if (n_s >= 2 && n_t >= 2) {
    bool complete = true;
    for (const auto& sr : report.strategies)
      if (sr.trial_means[kDivD].size() < 2) complete = false;
    if (complete) {
      report.anova_valid = true;
      for (std::size_t m = 0; m < kMetricCount; ++m) {
        std::vector<std::vector<double>> groups;
        for (const auto& sr : report.strategies) groups.push_back(sr.trial_means[m]);
        report.anova[m] = anova_oneway(groups);
      }
    }
  }
  report.zero_pair_fallbacks = config.dist->zero_pair_fallbacks() - fallbacks_before;
  return report;
}

}  // namespace explore
