#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace explore {

using UserId = std::uint32_t;
using ItemId = std::uint32_t;
using CategoryId = std::uint32_t;

struct RatingScale {
  double lo = 1.0;
  double hi = 5.0;
  bool contains(double r) const { return r >= lo && r <= hi; }
  friend bool operator==(const RatingScale&, const RatingScale&) = default;
};

struct Rating {
  ItemId item;
  double value;
  friend bool operator==(const Rating&, const Rating&) = default;
};

/// Ratings grouped by user; each row sorted by item id, no duplicate items.
struct Interactions {
  std::vector<std::vector<Rating>> by_user;

  std::size_t size() const;
  friend bool operator==(const Interactions&, const Interactions&) = default;
};

/// Column roles for delimited-text ingestion. Columns are 0-based.
/// delimiter "whitespace" splits on runs of blanks and tabs.
struct IngestionSchema {
  std::string delimiter = "\t";
  int user_col = 0;
  int item_col = 1;
  int rating_col = 2;
  int category_col = -1;  // inline category list in the ratings file, -1 = none
  std::string category_delimiter = "|";

  // Optional item metadata file (e.g. MovieLens movies.dat).
  std::optional<std::filesystem::path> items_path;
  std::string items_delimiter = "\t";
  int items_item_col = 0;
  int items_category_col = 1;
  // When true, the items file defines the catalog's item set and id order,
  // including items nobody rated. Otherwise it only supplies categories.
  bool items_define_catalog = false;

  // Optional file with one category name per line; fixes category ids and
  // makes any other category name an error.
  std::optional<std::filesystem::path> categories_path;

  RatingScale scale;
  std::size_t min_interactions = 5;
  bool allow_uncategorized = false;
  bool skip_header = false;
};

enum class Basis { Users, Categories };

/// Sparse non-negative vector with strictly increasing indices.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  bool empty() const { return index.empty(); }
  std::vector<double> to_dense() const;
  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Users, items, categories and ratings. Immutable after construction; dense
/// internal ids are assigned in first-seen order and the external ids are
/// kept for output.
class Catalog {
 public:
  Catalog() = default;
  Catalog(std::vector<std::string> user_names, std::vector<std::string> item_names,
          std::vector<std::string> category_names,
          std::vector<std::vector<CategoryId>> item_categories, Interactions ratings,
          RatingScale scale);

  std::size_t n_users() const { return user_names_.size(); }
  std::size_t n_items() const { return item_names_.size(); }
  std::size_t n_categories() const { return category_names_.size(); }
  std::size_t n_ratings() const { return n_ratings_; }
  const RatingScale& scale() const { return scale_; }

  const std::string& user_name(UserId u) const { return user_names_.at(u); }
  const std::string& item_name(ItemId i) const { return item_names_.at(i); }
  const std::string& category_name(CategoryId c) const { return category_names_.at(c); }
  std::optional<UserId> find_user(const std::string& name) const;
  std::optional<ItemId> find_item(const std::string& name) const;

  std::span<const Rating> user_ratings(UserId u) const { return ratings_.by_user.at(u); }
  const Interactions& ratings() const { return ratings_; }
  /// Users who rated the item, ascending.
  std::span<const UserId> item_raters(ItemId i) const { return item_raters_.at(i); }
  /// Rating values aligned with item_raters(i).
  std::span<const double> item_rater_values(ItemId i) const { return item_rater_values_.at(i); }
  std::span<const CategoryId> item_categories(ItemId i) const { return item_categories_.at(i); }

  /// Same users/items/categories with a different rating set (e.g. a train split).
  Catalog with_ratings(Interactions ratings) const;

  friend bool operator==(const Catalog& a, const Catalog& b);

 private:
  void index();

  std::vector<std::string> user_names_, item_names_, category_names_;
  std::unordered_map<std::string, UserId> user_lookup_;
  std::unordered_map<std::string, ItemId> item_lookup_;
  std::vector<std::vector<CategoryId>> item_categories_;
  Interactions ratings_;
  std::vector<std::vector<UserId>> item_raters_;
  std::vector<std::vector<double>> item_rater_values_;
  RatingScale scale_;
  std::size_t n_ratings_ = 0;
};

Catalog load_dataset(const std::filesystem::path& ratings_path, const IngestionSchema& schema);

/// Writes ratings.tsv, items.tsv and categories.txt under dir. Reloading with
/// canonical_schema() reproduces an equal Catalog.
void dump_canonical(const Catalog& catalog, const std::filesystem::path& dir);
IngestionSchema canonical_schema(const std::filesystem::path& dir, RatingScale scale);

struct SplitPair {
  Interactions train;
  Interactions test;
  std::uint64_t seed = 0;
};

/// Per-user stratified split: floor(ratio * count) ratings go to train, the
/// rest to test, with at least one test rating for users with >= 2 ratings.
/// A user with a single rating keeps it in train.
SplitPair split_interactions(const Catalog& catalog, double ratio, std::uint64_t seed);

/// x_i (Users basis, binary or rating-weighted) or y_i (Categories basis).
SparseVector item_vector(const Catalog& catalog, ItemId item, Basis basis,
                         bool rating_weighted = false);

}  // namespace explore
