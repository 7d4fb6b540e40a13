#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "explore/error.hpp"
#include "explore/simulator.hpp"
#include "explore/synthetic.hpp"
#include "helpers.hpp"

using namespace explore;

namespace {

UserModelParams params(double lambda, double gamma, std::size_t k = 5) {
  UserModelParams p;
  p.lambda = lambda;
  p.gamma = gamma;
  p.k = k;
  return p;
}

class ThrowingStrategy final : public Strategy {
 public:
  std::vector<ItemId> next_list(const StrategyContext&) const override { throw Error("boom"); }
  std::string name() const override { return "throwing"; }
};

class ShortListStrategy final : public Strategy {
 public:
  std::vector<ItemId> next_list(const StrategyContext& ctx) const override {
    return {ctx.candidates.front()};
  }
  std::string name() const override { return "short"; }
};

struct World {
  SyntheticDataset data;
  DistanceModel dist;
  Interactions test;
  FrozenRelevanceModel rel;

  explicit World(std::uint64_t seed)
      : data(make(seed)), dist(data.catalog, Basis::Categories), test(data.catalog.ratings()),
        rel(data.relevance_model()) {}

  static SyntheticDataset make(std::uint64_t seed) {
    ClusteredParams p;
    p.n_users = 12;
    p.n_items = 40;
    p.n_categories = 5;
    p.ratings_per_user = 6;
    p.seed = seed;
    return make_clustered(p);
  }

  ExperimentConfig config(std::vector<StrategySpec> strategies, std::size_t trials) const {
    ExperimentConfig c;
    c.catalog = &data.catalog;
    c.test = &test;
    c.relevance = &rel;
    c.dist = &dist;
    c.strategies = std::move(strategies);
    c.params = params(solve_lambda(5.0, 2.0).lambda, 2.0);
    c.target_steps = 5.0;
    c.trials = trials;
    c.seed = 11;
    return c;
  }
};

}  // namespace

TEST_CASE("certain weariness ends the session on the first step") {
  const World w(1);
  const RelevanceStrategy s;
  Rng rng(2);
  const auto t = simulate_user(0, s, w.rel, w.dist, w.data.catalog, params(1e-9, 2.0), rng);
  CHECK(t.kappa == 1);
  CHECK(t.picked.empty());
  CHECK(t.reason == QuitReason::Weariness);
  CHECK(t.first_list.size() == 5);
}

TEST_CASE("a tireless user with full interest exhausts the pool") {
  const Catalog cat = testing::make_catalog(1, std::vector<std::vector<CategoryId>>(30, {0}), 1);
  DistanceModel d(cat, Basis::Categories);
  const FrozenRelevanceModel rel(1, 30, std::vector<double>(30, 5.0), RatingScale{1, 5});
  const RelevanceStrategy s;
  Rng rng(3);
  const auto t = simulate_user(0, s, rel, d, cat, params(std::numeric_limits<double>::infinity(), 2.0),
                               rng, {0, true});
  CHECK(t.picked.size() == 30);
  CHECK(t.kappa == 30);
  CHECK(t.reason == QuitReason::PoolExhausted);
  CHECK(t.lists.size() == 30);
  CHECK(t.lists.back().size() == 1);
}

TEST_CASE("traces are deterministic and respect the pool") {
  const World w(4);
  const ExploreStrategy s({DiversityKind::Distance, 0.5, true});
  for (UserId u = 0; u < 12; ++u) {
    Rng a(100 + u), b(100 + u);
    const auto p = params(solve_lambda(10.0, 2.0).lambda, 2.0);
    const auto x = simulate_user(u, s, w.rel, w.dist, w.data.catalog, p, a, {0, true});
    const auto y = simulate_user(u, s, w.rel, w.dist, w.data.catalog, p, b, {0, true});
    CHECK(x.picked.items() == y.picked.items());
    CHECK(x.kappa == y.kappa);
    CHECK(x.kappa - x.picked.size() <= 1);
    CHECK(x.kappa == x.lists.size());
    for (std::size_t t = 0; t < x.lists.size(); ++t)
      for (ItemId i : x.lists[t])
        for (std::size_t h = 0; h < t; ++h) CHECK(i != x.picked.items()[h]);
  }
}

TEST_CASE("invalid strategy output is rejected") {
  const World w(5);
  const ShortListStrategy s;
  Rng rng(1);
  CHECK_THROWS_AS(simulate_user(0, s, w.rel, w.dist, w.data.catalog, params(5, 2), rng), Error);
}

TEST_CASE("experiment shape and accounting") {
  const World w(6);
  auto cfg = w.config({{"rel", std::make_shared<RelevanceStrategy>()},
                       {"mmr", std::make_shared<MmrStrategy>(0.5)}},
                      3);
  cfg.users = {0, 1, 2, 3, 4};
  const auto r = run_experiment(cfg);
  REQUIRE(r.strategies.size() == 2);
  CHECK(r.trials == 3);
  CHECK(r.users == 5);
  for (const auto& s : r.strategies) {
    CHECK(s.traces == 15);
    CHECK(s.failed == 0);
    CHECK(s.trial_means[kKappa].size() == 3);
    std::size_t reasons = 0;
    for (auto n : s.quit_reasons) reasons += n;
    CHECK(reasons == 15);
    CHECK(s.metric[kKappa].mean >= 1.0);
  }
  CHECK(r.anova_valid);
  CHECK(std::abs(r.maxima.distance - r.expected_steps) < 1e-6);
}

TEST_CASE("serial and parallel experiments agree exactly") {
  const World w(7);
  auto cfg = w.config({{"rel", std::make_shared<RelevanceStrategy>()},
                       {"dpp", std::make_shared<DppStrategy>()},
                       {"xc", std::make_shared<ExploreStrategy>(ExploreOptions{DiversityKind::Coverage})}},
                      4);
  cfg.policy = ExecutionPolicy::Serial;
  const auto a = run_experiment(cfg);
  cfg.policy = ExecutionPolicy::Parallel;
  const auto b = run_experiment(cfg);
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      CHECK(a.strategies[s].metric[m].mean == b.strategies[s].metric[m].mean);
      CHECK(a.strategies[s].metric[m].std == b.strategies[s].metric[m].std);
      CHECK(a.strategies[s].trial_means[m] == b.strategies[s].trial_means[m]);
    }
}

TEST_CASE("the same strategy twice is not significantly different") {
  const World w(8);
  auto rel = std::make_shared<RelevanceStrategy>();
  const auto r = run_experiment(w.config({{"a", rel}, {"b", rel}}, 5));
  // common random numbers make both arms identical
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    CHECK(r.strategies[0].trial_means[m] == r.strategies[1].trial_means[m]);
    CHECK((std::isnan(r.anova[m].p) || r.anova[m].p > 0.01));
  }
}

TEST_CASE("a failing strategy is reported without aborting the run") {
  const World w(9);
  const auto r = run_experiment(w.config({{"ok", std::make_shared<RelevanceStrategy>()},
                                          {"bad", std::make_shared<ThrowingStrategy>()}},
                                         2));
  CHECK(r.strategies[0].failed == 0);
  CHECK(r.strategies[1].failed > 0);
  CHECK(r.strategies[1].traces == 0);
  REQUIRE_FALSE(r.strategies[1].failures.empty());
  CHECK(r.strategies[1].failures.front().find("boom") != std::string::npos);
}

TEST_CASE("experiment preconditions") {
  const World w(10);
  auto cfg = w.config({}, 2);
  CHECK_THROWS_AS(run_experiment(cfg), Error);
  cfg = w.config({{"rel", std::make_shared<RelevanceStrategy>()}}, 0);
  CHECK_THROWS_AS(run_experiment(cfg), Error);
}
