#include "explore/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "explore/error.hpp"
#include "explore/rng.hpp"

namespace explore {

FrozenRelevanceModel SyntheticDataset::relevance_model() const {
  return FrozenRelevanceModel(catalog.n_users(), catalog.n_items(), relevance, catalog.scale());
}

namespace {

std::vector<std::string> names(const char* prefix, std::size_t n) {
  std::vector<std::string> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = prefix + std::to_string(k);
  return out;
}

// Weighted sampling without replacement (Efraimidis-Spirakis keys).
std::vector<ItemId> weighted_sample(const std::vector<double>& weight, std::size_t m, Rng& rng) {
  std::vector<std::pair<double, ItemId>> keys(weight.size());
  for (ItemId i = 0; i < weight.size(); ++i) {
    const double u = std::max(rng.uniform(), 1e-300);
    keys[i] = {std::log(u) / weight[i], i};
  }
  m = std::min(m, keys.size());
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(m), keys.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<ItemId> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = keys[k].second;
  std::sort(out.begin(), out.end());
  return out;
}

double to_rating(double x, const RatingScale& s) { return std::clamp(std::round(x), s.lo, s.hi); }

}  // namespace

SyntheticDataset make_clustered(const ClusteredParams& p) {
  if (p.n_categories < 1 || p.n_items < p.n_categories || p.n_users < 1)
    throw Error("make_clustered: need users, and at least one item per category");
  Rng rng(derive_seed(p.seed, {static_cast<std::uint64_t>(Stream::Synthetic), 1}));
  const double span = p.scale.hi - p.scale.lo;

  std::vector<std::vector<CategoryId>> cats(p.n_items);
  std::vector<std::uint32_t> cluster(p.n_items);
  for (ItemId i = 0; i < p.n_items; ++i) {
    cluster[i] = static_cast<std::uint32_t>(i % p.n_categories);
    cats[i].push_back(cluster[i]);
    if (p.n_categories > 1 && rng.bernoulli(p.secondary_prob)) {
      auto extra = static_cast<CategoryId>(rng.below(p.n_categories - 1));
      if (extra >= cluster[i]) ++extra;
      cats[i].push_back(extra);
    }
  }

  SyntheticDataset out;
  out.relevance.resize(p.n_users * p.n_items);
  out.user_group.resize(p.n_users);
  Interactions ratings;
  ratings.by_user.resize(p.n_users);
  std::vector<double> weight(p.n_items);
  for (UserId u = 0; u < p.n_users; ++u) {
    const auto fav = static_cast<std::uint32_t>(u % p.n_categories);
    out.user_group[u] = fav;
    for (ItemId i = 0; i < p.n_items; ++i) {
      const bool favored = cluster[i] == fav;
      const double lo = favored ? p.favored_lo : p.other_lo;
      const double hi = favored ? p.favored_hi : p.other_hi;
      const double b = lo + (hi - lo) * rng.uniform();
      out.relevance[u * p.n_items + i] = p.scale.lo + b * span;
      weight[i] = b * b + 1e-6;
    }
    for (ItemId i : weighted_sample(weight, p.ratings_per_user, rng)) {
      const double r = out.relevance[u * p.n_items + i] + 0.5 * rng.normal();
      ratings.by_user[u].push_back({i, to_rating(r, p.scale)});
    }
  }
  out.catalog = Catalog(names("u", p.n_users), names("i", p.n_items), names("c", p.n_categories),
                        std::move(cats), std::move(ratings), p.scale);
  return out;
}

SyntheticDataset make_low_rank(const LowRankParams& p) {
  if (p.n_users < 1 || p.n_items < 4) throw Error("make_low_rank: catalog too small");
  Rng rng(derive_seed(p.seed, {static_cast<std::uint64_t>(Stream::Synthetic), 2}));
  constexpr std::size_t kRank = 2;
  std::vector<double> uf(p.n_users * kRank), vf(p.n_items * kRank);
  for (auto& x : uf) x = rng.normal();
  for (auto& x : vf) x = rng.normal();

  // four categories from the signs of the item factors
  std::vector<std::vector<CategoryId>> cats(p.n_items);
  for (ItemId i = 0; i < p.n_items; ++i)
    cats[i].push_back(static_cast<CategoryId>((vf[i * 2] > 0 ? 1 : 0) + (vf[i * 2 + 1] > 0 ? 2 : 0)));

  const double mid = 0.5 * (p.scale.lo + p.scale.hi);
  const double half = 0.5 * (p.scale.hi - p.scale.lo);
  SyntheticDataset out;
  out.relevance.resize(p.n_users * p.n_items);
  out.user_group.resize(p.n_users);
  Interactions ratings;
  ratings.by_user.resize(p.n_users);
  std::vector<double> weight(p.n_items);
  for (UserId u = 0; u < p.n_users; ++u) {
    out.user_group[u] = static_cast<std::uint32_t>((uf[u * 2] > 0 ? 1 : 0) + (uf[u * 2 + 1] > 0 ? 2 : 0));
    for (ItemId i = 0; i < p.n_items; ++i) {
      const double s = (uf[u * 2] * vf[i * 2] + uf[u * 2 + 1] * vf[i * 2 + 1]) / 2.0;
      out.relevance[u * p.n_items + i] = std::clamp(mid + half * std::tanh(s), p.scale.lo, p.scale.hi);
      weight[i] = std::exp(p.observe_temp * std::tanh(s));
    }
    for (ItemId i : weighted_sample(weight, p.ratings_per_user, rng)) {
      const double r = out.relevance[u * p.n_items + i] + p.noise * rng.normal();
      ratings.by_user[u].push_back({i, to_rating(r, p.scale)});
    }
  }
  out.catalog = Catalog(names("u", p.n_users), names("i", p.n_items), names("c", 4), std::move(cats),
                        std::move(ratings), p.scale);
  return out;
}

}  // namespace explore
