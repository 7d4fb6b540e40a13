#pragma once

#include <optional>
#include <vector>

#include "explore/catalog.hpp"
#include "explore/distance.hpp"

namespace explore {

enum class DiversityKind { Distance, Coverage };

/// The set X of consumed items in consumption order, with the running
/// category union and the ordered-pair distance sum kept up to date on insert.
class InteractionSet {
 public:
  InteractionSet(const Catalog& catalog, const DistanceModel& dist);

  /// Throws if the item is already present.
  void insert(ItemId item);

  bool contains(ItemId item) const { return member_[item]; }
  const std::vector<ItemId>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  /// sum over i, j in X of d(i, j), both orders, zero diagonal.
  double pair_sum() const { return pair_sum_; }
  std::size_t covered_count() const { return covered_count_; }
  bool covers(CategoryId c) const { return covered_[c]; }

  /// sum over j in X of d(item, j)
  double distance_to(ItemId item) const;
  /// categories of item not yet covered
  std::size_t new_categories(ItemId item) const;

  const Catalog& catalog() const { return *catalog_; }
  const DistanceModel& distance() const { return *dist_; }

 private:
  const Catalog* catalog_;
  const DistanceModel* dist_;
  std::vector<ItemId> items_;
  std::vector<bool> member_;
  std::vector<bool> covered_;
  std::size_t covered_count_ = 0;
  double pair_sum_ = 0.0;
};

/// |support of the union of y_i| / |C|; 0 for an empty set.
double coverage_diversity(const InteractionSet& x, std::size_t n_categories);
double coverage_diversity(const InteractionSet& x);

/// pair_sum / (|X| - 1) for |X| >= 2, else 0.
double distance_diversity(const InteractionSet& x);

/// div(X + {item}) - div(X). For an empty X the Distance kind needs the
/// bootstrap anchor and returns d(item, anchor); Coverage returns |y_i| / |C|.
double marginal_diversity(ItemId item, const InteractionSet& x, DiversityKind kind,
                          std::optional<ItemId> anchor = std::nullopt);

}  // namespace explore
