#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "explore/catalog.hpp"
#include "explore/diversity.hpp"
#include "explore/metrics.hpp"
#include "explore/parallel.hpp"
#include "explore/relevance.hpp"
#include "explore/strategies.hpp"
#include "explore/user_model.hpp"

namespace explore {

struct TraceOptions {
  /// Strategies that allow it only see the top-N candidates by relevance
  /// (0 disables pruning).
  std::size_t prune_top_n = 500;
  bool record_lists = false;
};

struct ExplorationTrace {
  UserId user = 0;
  InteractionSet picked;
  std::size_t kappa = 0;  // steps executed, including a final step without consumption
  QuitReason reason = QuitReason::None;
  std::vector<ItemId> first_list;
  std::vector<std::vector<ItemId>> lists;  // every L_t when record_lists is set
  std::size_t uniform_fallbacks = 0;
};

/// One exploration session: at each step the strategy ranks I \ X, the user
/// reacts, and a consumed item joins X, until the user quits or the pool
/// runs dry.
ExplorationTrace simulate_user(UserId u, const Strategy& strategy, const RelevanceModel& relevance,
                               const DistanceModel& dist, const Catalog& catalog,
                               const UserModelParams& params, Rng& rng,
                               const TraceOptions& options = {});

struct StrategySpec {
  std::string label;
  std::shared_ptr<const Strategy> strategy;
};

struct ExperimentConfig {
  const Catalog* catalog = nullptr;       // ratings used for training / distances
  const Interactions* test = nullptr;     // held-out ratings for first-step accuracy
  const RelevanceModel* relevance = nullptr;
  const DistanceModel* dist = nullptr;
  std::vector<StrategySpec> strategies;
  UserModelParams params;
  double target_steps = 0.0;  // the E[steps] value params were calibrated for
  std::size_t trials = 20;
  std::vector<UserId> users;  // empty: every user with a test rating
  std::uint64_t seed = 0;
  TraceOptions trace;
  ExecutionPolicy policy = ExecutionPolicy::Parallel;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
};

enum Metric : std::size_t { kDivD = 0, kDivC = 1, kKappa = 2, kMetricCount = 3 };
const char* metric_name(Metric m);

struct StrategyResult {
  std::string label;
  std::array<MeanStd, kMetricCount> metric{};  // over all traces
  std::array<std::vector<double>, kMetricCount> trial_means;
  MeanStd consumed;
  double hr = 0.0, precision = 0.0, recall = 0.0;
  std::size_t accuracy_users = 0;
  double delta_d = 0.0, delta_c = 0.0, delta_steps = 0.0;
  std::size_t traces = 0;
  std::size_t failed = 0;
  std::vector<std::string> failures;  // first few messages
  std::array<std::size_t, 4> quit_reasons{};  // indexed by QuitReason
  std::size_t uniform_fallbacks = 0;
};

struct ExperimentReport {
  double target_steps = 0.0;
  double lambda = 0.0, gamma = 0.0;
  double expected_steps = 0.0;  // of the calibrated user model
  std::size_t k = 0, trials = 0, users = 0;
  MaxScores maxima;
  std::vector<StrategyResult> strategies;
  std::array<AnovaResult, kMetricCount> anova{};
  bool anova_valid = false;
  std::uint64_t zero_pair_fallbacks = 0;
};

/// Every strategy x trial x user is an independent work unit with its own
/// rng stream derived from (seed, user, trial); results are merged in key
/// order, so serial and parallel runs produce identical reports.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Users with at least one held-out rating.
std::vector<UserId> users_with_test_items(const Interactions& test);

}  // namespace explore
