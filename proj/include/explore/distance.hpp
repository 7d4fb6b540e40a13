#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "explore/catalog.hpp"
#include "explore/parallel.hpp"

namespace explore {

/// Weighted Jaccard distance 1 - sum(min) / sum(max).
/// Throws UndefinedDistance when both vectors are all-zero.
double jaccard_distance(const SparseVector& a, const SparseVector& b);

struct BasisChoice {
  Basis basis = Basis::Users;
  double mean_users = 1.0;
  double mean_categories = 1.0;
  std::size_t excluded_users = 0;  // sampled pairs skipped (both vectors empty)
  std::size_t excluded_categories = 0;
};

/// Picks the basis with the lower sampled mean pairwise distance; ties go to
/// Categories, and a catalog without categories always gets Users.
BasisChoice choose_basis(const Catalog& catalog, std::size_t sample_pairs, std::uint64_t seed,
                         bool rating_weighted = false);

/// Item-item distances over one basis, with an optional precomputed block for
/// the most-rated items. Lookups are safe to run concurrently.
class DistanceModel {
 public:
  DistanceModel(const Catalog& catalog, Basis basis, bool rating_weighted = false);

  DistanceModel(const DistanceModel&) = delete;
  DistanceModel& operator=(const DistanceModel&) = delete;
  DistanceModel(DistanceModel&&) = default;

  Basis basis() const { return basis_; }
  std::size_t n_items() const { return vectors_.size(); }
  const SparseVector& vector(ItemId i) const { return vectors_.at(i); }

  /// d(i, j); d(i, i) = 0. A pair of two empty vectors yields 1 and bumps
  /// the fallback counter.
  double operator()(ItemId i, ItemId j) const;

  /// Uncached evaluation, for cross-checks.
  double compute(ItemId i, ItemId j) const;

  /// Caches all pairs among the hot_items most-rated items (ties by id).
  void precompute_cache(std::size_t hot_items, ExecutionPolicy policy = ExecutionPolicy::Parallel);
  std::size_t cached_pairs() const { return cache_.size(); }
  bool is_hot(ItemId i) const { return slot_[i] >= 0; }

  /// Sampled mean over random pairs (pairs of two empty vectors excluded).
  double estimate_mean(std::size_t sample_pairs, std::uint64_t seed) const;

  std::uint64_t cache_hits() const { return hits_->load(std::memory_order_relaxed); }
  std::uint64_t zero_pair_fallbacks() const { return fallbacks_->load(std::memory_order_relaxed); }

 private:
  std::size_t tri_index(std::size_t a, std::size_t b) const;  // a < b, hot slots

  Basis basis_;
  std::vector<SparseVector> vectors_;
  std::vector<std::uint32_t> rating_count_;
  std::vector<std::int32_t> slot_;
  std::size_t n_hot_ = 0;
  std::vector<double> cache_;
  std::unique_ptr<std::atomic<std::uint64_t>> hits_ = std::make_unique<std::atomic<std::uint64_t>>(0);
  std::unique_ptr<std::atomic<std::uint64_t>> fallbacks_ =
      std::make_unique<std::atomic<std::uint64_t>>(0);
};

}  // namespace explore
