#include "explore/distance.hpp"

#include <algorithm>
#include <numeric>

#include "explore/error.hpp"
#include "explore/rng.hpp"

namespace explore {

double jaccard_distance(const SparseVector& a, const SparseVector& b) {
  if (a.dim != b.dim) throw Error("jaccard_distance: dimension mismatch");
  double num = 0.0, den = 0.0;
  std::size_t p = 0, q = 0;
  while (p < a.index.size() && q < b.index.size()) {
    if (a.index[p] == b.index[q]) {
      num += std::min(a.value[p], b.value[q]);
      den += std::max(a.value[p], b.value[q]);
      ++p, ++q;
    } else if (a.index[p] < b.index[q]) {
      den += a.value[p++];
    } else {
      den += b.value[q++];
    }
  }
  for (; p < a.index.size(); ++p) den += a.value[p];
  for (; q < b.index.size(); ++q) den += b.value[q];
  if (den <= 0.0) throw UndefinedDistance();
  return 1.0 - num / den;
}

DistanceModel::DistanceModel(const Catalog& catalog, Basis basis, bool rating_weighted)
    : basis_(basis), slot_(catalog.n_items(), -1) {
  vectors_.reserve(catalog.n_items());
  rating_count_.reserve(catalog.n_items());
  for (ItemId i = 0; i < catalog.n_items(); ++i) {
    vectors_.push_back(item_vector(catalog, i, basis, rating_weighted));
    rating_count_.push_back(static_cast<std::uint32_t>(catalog.item_raters(i).size()));
  }
}

double DistanceModel::compute(ItemId i, ItemId j) const {
  if (i == j) return 0.0;
  const auto& a = vectors_.at(i);
  const auto& b = vectors_.at(j);
  if (a.empty() && b.empty()) {
    fallbacks_->fetch_add(1, std::memory_order_relaxed);
    return 1.0;
  }
  return jaccard_distance(a, b);
}

std::size_t DistanceModel::tri_index(std::size_t a, std::size_t b) const {
  // row-major strict upper triangle
  return a * n_hot_ - a * (a + 1) / 2 + (b - a - 1);
}

double DistanceModel::operator()(ItemId i, ItemId j) const {
  if (i == j) return 0.0;
  const auto si = slot_[i], sj = slot_[j];
  if (si >= 0 && sj >= 0) {
    hits_->fetch_add(1, std::memory_order_relaxed);
    const auto a = static_cast<std::size_t>(std::min(si, sj));
    const auto b = static_cast<std::size_t>(std::max(si, sj));
    return cache_[tri_index(a, b)];
  }
  return compute(i, j);
}

void DistanceModel::precompute_cache(std::size_t hot_items, ExecutionPolicy policy) {
  const std::size_t n = vectors_.size();
  if (hot_items > n) throw Error("precompute_cache: hot_items exceeds catalog size");
  std::vector<ItemId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](ItemId a, ItemId b) { return rating_count_[a] > rating_count_[b]; });
  std::fill(slot_.begin(), slot_.end(), -1);
  n_hot_ = hot_items;
  std::vector<ItemId> hot(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(hot_items));
  std::sort(hot.begin(), hot.end());
  for (std::size_t s = 0; s < hot.size(); ++s) slot_[hot[s]] = static_cast<std::int32_t>(s);
  cache_.assign(hot_items * (hot_items ? hot_items - 1 : 0) / 2, 0.0);

  const auto rows = static_cast<std::ptrdiff_t>(hot_items);
  if (policy == ExecutionPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t a = 0; a < rows; ++a)
      for (std::size_t b = static_cast<std::size_t>(a) + 1; b < hot_items; ++b)
        cache_[tri_index(static_cast<std::size_t>(a), b)] = compute(hot[a], hot[b]);
  } else {
    for (std::ptrdiff_t a = 0; a < rows; ++a)
      for (std::size_t b = static_cast<std::size_t>(a) + 1; b < hot_items; ++b)
        cache_[tri_index(static_cast<std::size_t>(a), b)] = compute(hot[a], hot[b]);
  }
}

double DistanceModel::estimate_mean(std::size_t sample_pairs, std::uint64_t seed) const {
  const std::size_t n = vectors_.size();
  if (n < 2 || sample_pairs == 0) return 0.0;
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::BasisSample),
                             static_cast<std::uint64_t>(basis_)}));
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t s = 0; s < sample_pairs; ++s) {
    const auto i = static_cast<ItemId>(rng.below(n));
    auto j = static_cast<ItemId>(rng.below(n - 1));
    if (j >= i) ++j;
    if (vectors_[i].empty() && vectors_[j].empty()) continue;
    sum += jaccard_distance(vectors_[i], vectors_[j]);
    ++used;
  }
  return used ? sum / static_cast<double>(used) : 1.0;
}

namespace {

// Draws the same pair sequence for both bases so the comparison is paired.
std::pair<double, std::size_t> sampled_mean(const std::vector<SparseVector>& vecs,
                                            const std::vector<std::pair<ItemId, ItemId>>& pairs) {
  double sum = 0.0;
  std::size_t used = 0, excluded = 0;
  for (const auto& [i, j] : pairs) {
    if (vecs[i].empty() && vecs[j].empty()) {
      ++excluded;
      continue;
    }
    sum += jaccard_distance(vecs[i], vecs[j]);
    ++used;
  }
  return {used ? sum / static_cast<double>(used) : 1.0, excluded};
}

}  // namespace

BasisChoice choose_basis(const Catalog& catalog, std::size_t sample_pairs, std::uint64_t seed,
                         bool rating_weighted) {
  if (sample_pairs < 1) throw Error("choose_basis: sample_pairs must be >= 1");
  BasisChoice out;
  const std::size_t n = catalog.n_items();
  if (catalog.n_categories() == 0 || n < 2) {
    out.basis = Basis::Users;
    return out;
  }
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::BasisSample)}));
  std::vector<std::pair<ItemId, ItemId>> pairs(sample_pairs);
  for (auto& p : pairs) {
    p.first = static_cast<ItemId>(rng.below(n));
    p.second = static_cast<ItemId>(rng.below(n - 1));
    if (p.second >= p.first) ++p.second;
  }
  std::vector<SparseVector> users, cats;
  users.reserve(n);
  cats.reserve(n);
  for (ItemId i = 0; i < n; ++i) {
    users.push_back(item_vector(catalog, i, Basis::Users, rating_weighted));
    cats.push_back(item_vector(catalog, i, Basis::Categories));
  }
  std::tie(out.mean_users, out.excluded_users) = sampled_mean(users, pairs);
  std::tie(out.mean_categories, out.excluded_categories) = sampled_mean(cats, pairs);
  out.basis = out.mean_categories <= out.mean_users ? Basis::Categories : Basis::Users;
  return out;
}

}  // namespace explore
