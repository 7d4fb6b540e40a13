#include "explore/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "explore/error.hpp"
#include "explore/relevance.hpp"

namespace explore {

namespace {

void check_aligned(std::span<const ItemId> candidates, std::span<const double> relevance) {
  if (candidates.size() != relevance.size())
    throw Error("strategy: candidates and relevance are not aligned");
}

// index with the highest score; ties to the smaller item id
template <class Pred>
std::ptrdiff_t best_index(std::span<const ItemId> candidates, std::span<const double> score,
                          Pred&& eligible) {
  std::ptrdiff_t best = -1;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (!eligible(k)) continue;
    if (best < 0 || score[k] > score[best] ||
        (score[k] == score[best] && candidates[k] < candidates[best]))
      best = static_cast<std::ptrdiff_t>(k);
  }
  return best;
}

}  // namespace

std::vector<ItemId> topk_relevance(std::span<const ItemId> candidates,
                                   std::span<const double> relevance, std::size_t k) {
  check_aligned(candidates, relevance);
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (relevance[a] != relevance[b]) return relevance[a] > relevance[b];
                      return candidates[a] < candidates[b];
                    });
  std::vector<ItemId> out(take);
  for (std::size_t j = 0; j < take; ++j) out[j] = candidates[order[j]];
  return out;
}

std::vector<ItemId> mmr_select(std::span<const ItemId> candidates, std::span<const double> relevance,
                               const DistanceModel& dist, double beta, std::size_t k) {
  check_aligned(candidates, relevance);
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error("mmr_select: beta must lie in [0, 1]");
  const std::size_t take = std::min(k, candidates.size());
  std::vector<ItemId> out;
  if (take == 0) return out;
  out.reserve(take);
  std::vector<bool> used(candidates.size(), false);
  // max similarity of each candidate to the partial list
  std::vector<double> max_sim(candidates.size(), 0.0);
  std::vector<double> score(candidates.size());

  auto first = best_index(candidates, relevance, [](std::size_t) { return true; });
  used[first] = true;
  out.push_back(candidates[first]);
  while (out.size() < take) {
    const ItemId last = out.back();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (used[c]) continue;
      max_sim[c] = std::max(max_sim[c], 1.0 - dist(candidates[c], last));
      score[c] = beta * relevance[c] - (1.0 - beta) * max_sim[c];
    }
    const auto next = best_index(candidates, score, [&](std::size_t c) { return !used[c]; });
    used[next] = true;
    out.push_back(candidates[next]);
  }
  return out;
}

std::vector<ItemId> dum_select(std::span<const ItemId> candidates, std::span<const double> relevance,
                               const Catalog& catalog, std::size_t k) {
  check_aligned(candidates, relevance);
  const std::size_t take = std::min(k, candidates.size());
  std::vector<ItemId> out;
  out.reserve(take);
  std::vector<bool> used(candidates.size(), false);
  std::vector<bool> covered(catalog.n_categories(), false);
  std::vector<double> score(candidates.size());
  while (out.size() < take) {
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (used[c]) continue;
      std::size_t fresh = 0;
      for (auto cat : catalog.item_categories(candidates[c]))
        if (!covered[cat]) ++fresh;
      score[c] = std::max(static_cast<double>(fresh), kDumMarginalFloor) * relevance[c];
    }
    const auto next = best_index(candidates, score, [&](std::size_t c) { return !used[c]; });
    used[next] = true;
    for (auto cat : catalog.item_categories(candidates[next])) covered[cat] = true;
    out.push_back(candidates[next]);
  }
  return out;
}

double dum_objective(std::span<const ItemId> list, std::span<const double> list_relevance,
                     const Catalog& catalog) {
  check_aligned(list, list_relevance);
  std::vector<bool> covered(catalog.n_categories(), false);
  double total = 0.0;
  for (std::size_t h = 0; h < list.size(); ++h) {
    std::size_t fresh = 0;
    for (auto cat : catalog.item_categories(list[h]))
      if (!covered[cat]) {
        covered[cat] = true;
        ++fresh;
      }
    total += static_cast<double>(fresh) * list_relevance[h];
  }
  return total;
}

DppTrace dpp_greedy_trace(std::span<const ItemId> candidates, std::span<const double> relevance,
                          const DistanceModel& dist, std::size_t k, double ridge) {
  check_aligned(candidates, relevance);
  constexpr double kPdFloor = 1e-12;
  const std::size_t m = candidates.size();
  const std::size_t take = std::min(k, m);
  DppTrace trace;
  if (take == 0) return trace;

  // Row c of `chol` holds the Cholesky coordinates of candidate c against
  // the picks so far; d2[c] is the squared residual (the log-det gain).
  std::vector<double> chol(m * take, 0.0);
  std::vector<double> d2(m, 1.0 + ridge);
  std::vector<bool> used(m, false), dead(m, false);

  auto pick = static_cast<std::size_t>(
      best_index(candidates, relevance, [](std::size_t) { return true; }));
  std::size_t rank = 0;
  while (true) {
    used[pick] = true;
    trace.list.push_back(candidates[pick]);
    trace.log_det_gain.push_back(std::log(d2[pick]));
    if (trace.list.size() == take) break;
    const double dj = std::sqrt(d2[pick]);
    const double* cj = chol.data() + static_cast<std::size_t>(pick) * take;
    for (std::size_t c = 0; c < m; ++c) {
      if (used[c] || dead[c]) continue;
      double* ci = chol.data() + c * take;
      double dot = 0.0;
      for (std::size_t r = 0; r < rank; ++r) dot += cj[r] * ci[r];
      const double s = 1.0 - dist(candidates[pick], candidates[c]);
      const double e = (s - dot) / dj;
      ci[rank] = e;
      d2[c] -= e * e;
      if (!(d2[c] > kPdFloor)) {
        dead[c] = true;
        ++trace.skipped;
      }
    }
    ++rank;
    const auto next = best_index(candidates, d2, [&](std::size_t c) { return !used[c] && !dead[c]; });
    if (next < 0) break;
    pick = static_cast<std::size_t>(next);
  }
  if (trace.list.size() < take) {
    // every remaining candidate is degenerate: fill by relevance
    std::vector<ItemId> rest;
    std::vector<double> rest_rel;
    for (std::size_t c = 0; c < m; ++c)
      if (!used[c]) {
        rest.push_back(candidates[c]);
        rest_rel.push_back(relevance[c]);
      }
    for (auto item : topk_relevance(rest, rest_rel, take - trace.list.size())) {
      trace.list.push_back(item);
      trace.log_det_gain.push_back(-std::numeric_limits<double>::infinity());
      ++trace.filled;
    }
  }
  return trace;
}

std::vector<ItemId> dpp_greedy_select(std::span<const ItemId> candidates,
                                      std::span<const double> relevance, const DistanceModel& dist,
                                      std::size_t k) {
  return dpp_greedy_trace(candidates, relevance, dist, k).list;
}

double clayton_copula(double r_hat, double t_hat, double alpha) {
  if (!(alpha > 0.0)) throw Error("clayton_copula: alpha must be > 0");
  const double u = std::clamp(r_hat, kCopulaFloor, 1.0);
  const double v = std::clamp(t_hat, kCopulaFloor, 1.0);
  // u^-a - 1 = expm1(-a ln u) keeps small alpha accurate
  const double s = std::expm1(-alpha * std::log(u)) + std::expm1(-alpha * std::log(v));
  return std::exp(-std::log1p(s) / alpha);
}

std::vector<ItemId> explore_select(std::span<const ItemId> candidates,
                                   std::span<const double> relevance, const InteractionSet& history,
                                   const ExploreOptions& options, std::size_t k) {
  check_aligned(candidates, relevance);
  if (candidates.empty()) throw Error("explore_select: empty candidate pool");
  std::optional<ItemId> anchor;
  if (options.kind == DiversityKind::Distance && history.empty()) {
    const auto a = best_index(candidates, relevance, [](std::size_t) { return true; });
    anchor = candidates[a];
  }
  std::vector<double> t_hat(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c)
    t_hat[c] = marginal_diversity(candidates[c], history, options.kind, anchor);
  minmax_normalize_inplace(t_hat);
  std::vector<double> z(candidates.size());
  if (options.use_relevance) {
    std::vector<double> r_hat(relevance.begin(), relevance.end());
    minmax_normalize_inplace(r_hat);
    for (std::size_t c = 0; c < candidates.size(); ++c)
      z[c] = clayton_copula(r_hat[c], t_hat[c], options.alpha);
  } else {
    z = t_hat;
  }
  return topk_relevance(candidates, z, k);
}

std::vector<ItemId> RelevanceStrategy::next_list(const StrategyContext& ctx) const {
  return topk_relevance(ctx.candidates, ctx.relevance, ctx.k);
}

MmrStrategy::MmrStrategy(double beta) : beta_(beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error("mmr: beta must lie in [0, 1]");
}

std::vector<ItemId> MmrStrategy::next_list(const StrategyContext& ctx) const {
  return mmr_select(ctx.candidates, ctx.relevance, *ctx.dist, beta_, ctx.k);
}

std::vector<ItemId> DumStrategy::next_list(const StrategyContext& ctx) const {
  return dum_select(ctx.candidates, ctx.relevance, *ctx.catalog, ctx.k);
}

std::vector<ItemId> DppStrategy::next_list(const StrategyContext& ctx) const {
  return dpp_greedy_select(ctx.candidates, ctx.relevance, *ctx.dist, ctx.k);
}

ExploreStrategy::ExploreStrategy(ExploreOptions options) : options_(options) {
  if (!(options_.alpha > 0.0)) throw Error("explore: alpha must be > 0");
}

std::vector<ItemId> ExploreStrategy::next_list(const StrategyContext& ctx) const {
  return explore_select(ctx.candidates, ctx.relevance, *ctx.history, options_, ctx.k);
}

std::string ExploreStrategy::name() const {
  std::string n = options_.kind == DiversityKind::Distance ? "explore_d" : "explore_c";
  if (!options_.use_relevance) n += "_norel";
  return n;
}

std::vector<ItemId> RandomStrategy::next_list(const StrategyContext& ctx) const {
  if (!ctx.rng) throw Error("random strategy needs an rng");
  std::vector<ItemId> pool(ctx.candidates.begin(), ctx.candidates.end());
  const std::size_t take = std::min(ctx.k, pool.size());
  for (std::size_t j = 0; j < take; ++j) {
    const auto r = j + ctx.rng->below(pool.size() - j);
    std::swap(pool[j], pool[r]);
  }
  pool.resize(take);
  return pool;
}

}  // namespace explore
