#pragma once

#include <cstdint>
#include <vector>

#include "explore/catalog.hpp"
#include "explore/relevance.hpp"

namespace explore {

/// Catalog whose items fall into clusters (one primary category each, an
/// optional secondary one), and users who each favor one cluster.
struct ClusteredParams {
  std::size_t n_users = 200;
  std::size_t n_items = 200;
  std::size_t n_categories = 10;
  double secondary_prob = 0.3;  // chance an item also carries a second category
  // interest b = (R - lo) / (hi - lo) drawn uniformly from these ranges
  double favored_lo = 0.6, favored_hi = 1.0;
  double other_lo = 0.1, other_hi = 0.85;
  std::size_t ratings_per_user = 20;
  RatingScale scale;
  std::uint64_t seed = 1;
};

struct SyntheticDataset {
  Catalog catalog;
  std::vector<double> relevance;  // n_users x n_items, ground-truth R(u, i)
  std::vector<std::uint32_t> user_group;  // favored cluster per user (or latent group)

  FrozenRelevanceModel relevance_model() const;
};

SyntheticDataset make_clustered(const ClusteredParams& params);

/// Ratings from a rank-2 latent model. Which items a user rates depends on
/// affinity, so held-out items are predictable from the training ratings.
struct LowRankParams {
  std::size_t n_users = 300;
  std::size_t n_items = 200;
  std::size_t ratings_per_user = 40;
  double noise = 0.3;         // rating noise std
  double observe_temp = 2.0;  // observation weight exp(temp * affinity)
  RatingScale scale;
  std::uint64_t seed = 1;
};

SyntheticDataset make_low_rank(const LowRankParams& params);

}  // namespace explore
