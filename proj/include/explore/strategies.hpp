#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "explore/catalog.hpp"
#include "explore/distance.hpp"
#include "explore/diversity.hpp"
#include "explore/rng.hpp"

namespace explore {

/// Everything a strategy sees when building the list for one step.
/// relevance[k] is R(u, candidates[k]).
struct StrategyContext {
  UserId user = 0;
  std::span<const ItemId> candidates;
  std::span<const double> relevance;
  const InteractionSet* history = nullptr;
  const DistanceModel* dist = nullptr;
  const Catalog* catalog = nullptr;
  std::size_t k = 10;
  Rng* rng = nullptr;  // only read by randomized strategies
};

/// Builds the ordered list L_t: a subset of the candidates without
/// duplicates, of length min(k, |candidates|).
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::vector<ItemId> next_list(const StrategyContext& ctx) const = 0;
  virtual std::string name() const = 0;
  /// Whether the simulator may hand over only the top-N candidates by relevance.
  virtual bool allows_pruning() const { return true; }
};

// Selection kernels. Each takes aligned candidate/relevance spans; ties are
// always broken by ascending item id.

std::vector<ItemId> topk_relevance(std::span<const ItemId> candidates,
                                   std::span<const double> relevance, std::size_t k);

/// Greedy maximal marginal relevance:
/// argmax beta R(u,i) - (1 - beta) max_{j in L} (1 - d(i, j)).
std::vector<ItemId> mmr_select(std::span<const ItemId> candidates, std::span<const double> relevance,
                               const DistanceModel& dist, double beta, std::size_t k);

inline constexpr double kDumMarginalFloor = 1e-12;

/// Greedy diversity-weighted utility: each pick maximizes
/// max(new categories, floor) * R(u, i).
std::vector<ItemId> dum_select(std::span<const ItemId> candidates, std::span<const double> relevance,
                               const Catalog& catalog, std::size_t k);

/// Literal DUM objective of an ordered list: sum_h [f(L[:h]) - f(L[:h-1])] R(i_h)
/// with f = number of covered categories.
double dum_objective(std::span<const ItemId> list, std::span<const double> list_relevance,
                     const Catalog& catalog);

inline constexpr double kDppRidge = 1e-6;

struct DppTrace {
  std::vector<ItemId> list;
  std::vector<double> log_det_gain;  // log det increment of each pick (pick 0: log S_ii)
  std::size_t skipped = 0;           // candidates dropped as numerically non-PD
  std::size_t filled = 0;            // tail slots filled by relevance order
};

/// Greedy log-det maximization over S_ij = 1 - d(i, j), diagonal 1 + ridge,
/// via incremental Cholesky. The first pick is argmax R.
DppTrace dpp_greedy_trace(std::span<const ItemId> candidates, std::span<const double> relevance,
                          const DistanceModel& dist, std::size_t k, double ridge = kDppRidge);
std::vector<ItemId> dpp_greedy_select(std::span<const ItemId> candidates,
                                      std::span<const double> relevance, const DistanceModel& dist,
                                      std::size_t k);

inline constexpr double kCopulaFloor = 1e-9;

/// Clayton copula [u^-a + v^-a - 1]^(-1/a), inputs clamped to [1e-9, 1].
double clayton_copula(double r_hat, double t_hat, double alpha);

struct ExploreOptions {
  DiversityKind kind = DiversityKind::Distance;
  double alpha = 0.5;
  /// false ranks by normalized marginal diversity alone (no copula).
  bool use_relevance = true;
};

/// Min-max normalized relevance and marginal diversity over the candidate
/// pool, fused with the Clayton copula; top-k by the fused score.
std::vector<ItemId> explore_select(std::span<const ItemId> candidates,
                                   std::span<const double> relevance, const InteractionSet& history,
                                   const ExploreOptions& options, std::size_t k);

// Strategy objects wrapping the kernels.

class RelevanceStrategy final : public Strategy {
 public:
  std::vector<ItemId> next_list(const StrategyContext& ctx) const override;
  std::string name() const override { return "relevance"; }
};

class MmrStrategy final : public Strategy {
 public:
  explicit MmrStrategy(double beta = 0.5);
  std::vector<ItemId> next_list(const StrategyContext& ctx) const override;
  std::string name() const override { return "mmr"; }

 private:
  double beta_;
};

class DumStrategy final : public Strategy {
 public:
  std::vector<ItemId> next_list(const StrategyContext& ctx) const override;
  std::string name() const override { return "dum"; }
};

class DppStrategy final : public Strategy {
 public:
  std::vector<ItemId> next_list(const StrategyContext& ctx) const override;
  std::string name() const override { return "dpp"; }
};

class ExploreStrategy final : public Strategy {
 public:
  explicit ExploreStrategy(ExploreOptions options);
  std::vector<ItemId> next_list(const StrategyContext& ctx) const override;
  std::string name() const override;
  const ExploreOptions& options() const { return options_; }

 private:
  ExploreOptions options_;
};

/// Uniformly random list; reference point for accuracy checks.
class RandomStrategy final : public Strategy {
 public:
  std::vector<ItemId> next_list(const StrategyContext& ctx) const override;
  std::string name() const override { return "random"; }
  bool allows_pruning() const override { return false; }
};

}  // namespace explore
