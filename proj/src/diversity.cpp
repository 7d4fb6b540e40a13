#include "explore/diversity.hpp"

#include "explore/error.hpp"

namespace explore {

InteractionSet::InteractionSet(const Catalog& catalog, const DistanceModel& dist)
    : catalog_(&catalog),
      dist_(&dist),
      member_(catalog.n_items(), false),
      covered_(catalog.n_categories(), false) {}

double InteractionSet::distance_to(ItemId item) const {
  double s = 0.0;
  for (auto j : items_) s += (*dist_)(item, j);
  return s;
}

std::size_t InteractionSet::new_categories(ItemId item) const {
  std::size_t fresh = 0;
  for (auto c : catalog_->item_categories(item))
    if (!covered_[c]) ++fresh;
  return fresh;
}

void InteractionSet::insert(ItemId item) {
  if (item >= member_.size()) throw Error("InteractionSet: unknown item");
  if (member_[item]) throw Error("InteractionSet: item already consumed");
  pair_sum_ += 2.0 * distance_to(item);
  for (auto c : catalog_->item_categories(item)) {
    if (!covered_[c]) {
      covered_[c] = true;
      ++covered_count_;
    }
  }
  member_[item] = true;
  items_.push_back(item);
}

double coverage_diversity(const InteractionSet& x, std::size_t n_categories) {
  if (n_categories == 0) throw Error("coverage_diversity: no categories");
  return static_cast<double>(x.covered_count()) / static_cast<double>(n_categories);
}

double coverage_diversity(const InteractionSet& x) {
  return coverage_diversity(x, x.catalog().n_categories());
}

double distance_diversity(const InteractionSet& x) {
  if (x.size() < 2) return 0.0;
  return x.pair_sum() / static_cast<double>(x.size() - 1);
}

double marginal_diversity(ItemId item, const InteractionSet& x, DiversityKind kind,
                          std::optional<ItemId> anchor) {
  if (x.contains(item)) throw Error("marginal_diversity: item already in X");
  if (kind == DiversityKind::Coverage) {
    const auto n_cat = x.catalog().n_categories();
    if (n_cat == 0) throw Error("marginal_diversity: coverage requires categories");
    return static_cast<double>(x.new_categories(item)) / static_cast<double>(n_cat);
  }
  const std::size_t t = x.size();
  if (t == 0) {
    if (!anchor) throw Error("marginal_diversity: empty X needs a bootstrap anchor");
    return x.distance()(item, *anchor);
  }
  const double after = (x.pair_sum() + 2.0 * x.distance_to(item)) / static_cast<double>(t);
  const double before = t >= 2 ? x.pair_sum() / static_cast<double>(t - 1) : 0.0;
  return after - before;
}

}  // namespace explore
