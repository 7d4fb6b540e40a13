#include "explore/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <string_view>

#include "explore/error.hpp"
#include "explore/rng.hpp"

namespace explore {

std::size_t Interactions::size() const {
  std::size_t n = 0;
  for (const auto& row : by_user) n += row.size();
  return n;
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dim, 0.0);
  for (std::size_t k = 0; k < index.size(); ++k) out[index[k]] = value[k];
  return out;
}

Catalog::Catalog(std::vector<std::string> user_names, std::vector<std::string> item_names,
                 std::vector<std::string> category_names,
                 std::vector<std::vector<CategoryId>> item_categories, Interactions ratings,
                 RatingScale scale)
    : user_names_(std::move(user_names)),
      item_names_(std::move(item_names)),
      category_names_(std::move(category_names)),
      item_categories_(std::move(item_categories)),
      ratings_(std::move(ratings)),
      scale_(scale) {
  if (item_categories_.size() != item_names_.size())
    throw Error("catalog: item_categories size does not match item count");
  if (ratings_.by_user.size() != user_names_.size())
    throw Error("catalog: ratings rows do not match user count");
  for (auto& cats : item_categories_) {
    std::sort(cats.begin(), cats.end());
    cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
    for (auto c : cats)
      if (c >= category_names_.size()) throw Error("catalog: category id out of range");
  }
  for (auto& row : ratings_.by_user) {
    std::sort(row.begin(), row.end(),
              [](const Rating& a, const Rating& b) { return a.item < b.item; });
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k].item >= item_names_.size()) throw Error("catalog: rating references unknown item");
      if (k > 0 && row[k].item == row[k - 1].item)
        throw Error("catalog: duplicate (user, item) rating");
    }
  }
  index();
}

void Catalog::index() {
  user_lookup_.clear();
  item_lookup_.clear();
  for (UserId u = 0; u < user_names_.size(); ++u) user_lookup_.emplace(user_names_[u], u);
  for (ItemId i = 0; i < item_names_.size(); ++i) item_lookup_.emplace(item_names_[i], i);
  item_raters_.assign(item_names_.size(), {});
  item_rater_values_.assign(item_names_.size(), {});
  n_ratings_ = 0;
  for (UserId u = 0; u < ratings_.by_user.size(); ++u) {
    for (const auto& r : ratings_.by_user[u]) {
      item_raters_[r.item].push_back(u);
      item_rater_values_[r.item].push_back(r.value);
      ++n_ratings_;
    }
  }
}

std::optional<UserId> Catalog::find_user(const std::string& name) const {
  auto it = user_lookup_.find(name);
  if (it == user_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<ItemId> Catalog::find_item(const std::string& name) const {
  auto it = item_lookup_.find(name);
  if (it == item_lookup_.end()) return std::nullopt;
  return it->second;
}

Catalog Catalog::with_ratings(Interactions ratings) const {
  return Catalog(user_names_, item_names_, category_names_, item_categories_, std::move(ratings),
                 scale_);
}

bool operator==(const Catalog& a, const Catalog& b) {
  return a.user_names_ == b.user_names_ && a.item_names_ == b.item_names_ &&
         a.category_names_ == b.category_names_ && a.item_categories_ == b.item_categories_ &&
         a.ratings_ == b.ratings_ && a.scale_ == b.scale_;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, std::string_view delim) {
  std::vector<std::string_view> out;
  if (delim == "whitespace") {
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      out.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    return out;
  }
  std::size_t pos = 0;
  while (true) {
    const auto hit = line.find(delim, pos);
    if (hit == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, hit - pos));
    pos = hit + delim.size();
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_categories(std::string_view field, std::string_view delim) {
  std::vector<std::string> out;
  field = trim(field);
  if (field.empty()) return out;
  for (auto part : split_fields(field, delim)) {
    part = trim(part);
    // MovieLens marks missing genres this way.
    if (!part.empty() && part != "(no genres listed)") out.emplace_back(part);
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

template <class Fn>
void for_each_line(const std::filesystem::path& path, bool skip_header, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot read '" + path.string() + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_header && lineno == 1) continue;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    fn(std::string_view(line), lineno);
  }
}

void check_delimiters(const IngestionSchema& schema, bool uses_categories) {
  if (schema.delimiter.empty()) throw IngestError("schema: empty field delimiter");
  if (!uses_categories) return;
  const auto& cd = schema.category_delimiter;
  const bool clashes = cd == schema.delimiter ||
                       (schema.items_path && cd == schema.items_delimiter) ||
                       (cd == "whitespace");
  if (cd.empty() || clashes)
    throw IngestError("schema: unknown category delimiter '" + cd + "'");
}

struct RawRating {
  std::string user, item;
  double value;
  std::size_t line;
};

}  // namespace

Catalog load_dataset(const std::filesystem::path& ratings_path, const IngestionSchema& schema) {
  const bool uses_categories = schema.items_path.has_value() || schema.category_col >= 0;
  check_delimiters(schema, uses_categories);
  if (!(schema.scale.hi > schema.scale.lo)) throw IngestError("schema: rating scale must have hi > lo");

  std::vector<std::string> category_names;
  std::unordered_map<std::string, CategoryId> category_lookup;
  const bool fixed_categories = schema.categories_path.has_value();
  if (fixed_categories) {
    for_each_line(*schema.categories_path, false, [&](std::string_view line, std::size_t) {
      std::string name(trim(line));
      if (category_lookup.emplace(name, category_names.size()).second)
        category_names.push_back(std::move(name));
    });
  }

  // item name -> category names, in file order
  std::vector<std::string> declared_items;
  std::unordered_map<std::string, std::vector<std::string>> item_meta;
  if (schema.items_path) {
    const int need = std::max(schema.items_item_col, schema.items_category_col);
    for_each_line(*schema.items_path, schema.skip_header, [&](std::string_view line, std::size_t no) {
      const auto f = split_fields(line, schema.items_delimiter);
      if (static_cast<int>(f.size()) <= need)
        throw IngestError("items file '" + schema.items_path->string() + "': malformed row, expected " +
                              std::to_string(need + 1) + " fields",
                          no);
      std::string name(trim(f[schema.items_item_col]));
      auto cats = split_categories(f[schema.items_category_col], schema.category_delimiter);
      auto [it, fresh] = item_meta.try_emplace(name);
      if (fresh) declared_items.push_back(name);
      it->second = std::move(cats);
    });
  }

  std::vector<RawRating> rows;
  std::unordered_map<std::string, std::vector<std::string>> inline_cats;
  {
    const int need = std::max({schema.user_col, schema.item_col, schema.rating_col, schema.category_col});
    for_each_line(ratings_path, schema.skip_header, [&](std::string_view line, std::size_t no) {
      const auto f = split_fields(line, schema.delimiter);
      if (static_cast<int>(f.size()) <= need)
        throw IngestError("malformed row: expected at least " + std::to_string(need + 1) +
                              " fields, got " + std::to_string(f.size()),
                          no);
      double value = 0;
      if (!parse_double(f[schema.rating_col], value) || !std::isfinite(value))
        throw IngestError("malformed row: rating '" + std::string(f[schema.rating_col]) +
                              "' is not a number",
                          no);
      if (!schema.scale.contains(value))
        throw IngestError("rating " + std::string(trim(f[schema.rating_col])) + " outside scale [" +
                              std::to_string(schema.scale.lo) + ", " +
                              std::to_string(schema.scale.hi) + "]",
                          no);
      RawRating r{std::string(trim(f[schema.user_col])), std::string(trim(f[schema.item_col])), value,
                  no};
      if (r.user.empty() || r.item.empty()) throw IngestError("malformed row: empty id", no);
      if (schema.category_col >= 0) {
        auto& dst = inline_cats[r.item];
        for (auto& c : split_categories(f[schema.category_col], schema.category_delimiter))
          if (std::find(dst.begin(), dst.end(), c) == dst.end()) dst.push_back(std::move(c));
      }
      rows.push_back(std::move(r));
    });
  }

  // Deduplicate (user, item): last occurrence wins.
  std::map<std::pair<std::string, std::string>, std::size_t> last;
  for (std::size_t k = 0; k < rows.size(); ++k) last[{rows[k].user, rows[k].item}] = k;
  std::unordered_map<std::string, std::size_t> per_user;
  for (const auto& [key, k] : last) ++per_user[key.first];

  std::vector<std::string> user_names, item_names;
  std::unordered_map<std::string, UserId> user_ids;
  std::unordered_map<std::string, ItemId> item_ids;
  if (schema.items_define_catalog) {
    if (!schema.items_path) throw IngestError("schema: items_define_catalog requires items_path");
    for (const auto& name : declared_items) {
      item_ids.emplace(name, item_names.size());
      item_names.push_back(name);
    }
  }

  std::vector<std::vector<Rating>> by_user;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (last[{r.user, r.item}] != k) continue;
    if (per_user[r.user] < schema.min_interactions) continue;
    auto [uit, unew] = user_ids.try_emplace(r.user, static_cast<UserId>(user_names.size()));
    if (unew) {
      user_names.push_back(r.user);
      by_user.emplace_back();
    }
    auto iit = item_ids.find(r.item);
    if (iit == item_ids.end()) {
      if (schema.items_define_catalog)
        throw IngestError("rating references item '" + r.item + "' missing from the items file", r.line);
      iit = item_ids.emplace(r.item, static_cast<ItemId>(item_names.size())).first;
      item_names.push_back(r.item);
    }
    by_user[uit->second].push_back({iit->second, r.value});
  }

  if (user_names.empty() || item_names.empty())
    throw IngestError("empty catalog: no ratings left after filtering users with fewer than " +
                      std::to_string(schema.min_interactions) + " interactions");

  std::vector<std::vector<CategoryId>> item_categories(item_names.size());
  if (uses_categories) {
    for (ItemId i = 0; i < item_names.size(); ++i) {
      std::vector<std::string> names;
      if (auto it = item_meta.find(item_names[i]); it != item_meta.end()) names = it->second;
      if (auto it = inline_cats.find(item_names[i]); it != inline_cats.end())
        for (const auto& c : it->second)
          if (std::find(names.begin(), names.end(), c) == names.end()) names.push_back(c);
      for (const auto& c : names) {
        auto cit = category_lookup.find(c);
        if (cit == category_lookup.end()) {
          if (fixed_categories)
            throw IngestError("item '" + item_names[i] + "' has undeclared category '" + c + "'");
          cit = category_lookup.emplace(c, static_cast<CategoryId>(category_names.size())).first;
          category_names.push_back(c);
        }
        item_categories[i].push_back(cit->second);
      }
      if (item_categories[i].empty() && !schema.allow_uncategorized)
        throw IngestError("item '" + item_names[i] +
                          "' has no categories (set allow_uncategorized to accept)");
    }
  }

  return Catalog(std::move(user_names), std::move(item_names), std::move(category_names),
                 std::move(item_categories), Interactions{std::move(by_user)}, schema.scale);
}

void dump_canonical(const Catalog& catalog, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "categories.txt");
    for (CategoryId c = 0; c < catalog.n_categories(); ++c) out << catalog.category_name(c) << '\n';
  }
  {
    std::ofstream out(dir / "items.tsv");
    for (ItemId i = 0; i < catalog.n_items(); ++i) {
      out << catalog.item_name(i) << '\t';
      const auto cats = catalog.item_categories(i);
      for (std::size_t k = 0; k < cats.size(); ++k)
        out << (k ? "|" : "") << catalog.category_name(cats[k]);
      out << '\n';
    }
  }
  std::ofstream out(dir / "ratings.tsv");
  char buf[64];
  for (UserId u = 0; u < catalog.n_users(); ++u) {
    for (const auto& r : catalog.user_ratings(u)) {
      std::snprintf(buf, sizeof buf, "%.17g", r.value);
      out << catalog.user_name(u) << '\t' << catalog.item_name(r.item) << '\t' << buf << '\n';
    }
  }
}

IngestionSchema canonical_schema(const std::filesystem::path& dir, RatingScale scale) {
  IngestionSchema s;
  s.delimiter = "\t";
  s.items_path = dir / "items.tsv";
  s.items_delimiter = "\t";
  s.items_define_catalog = true;
  s.categories_path = dir / "categories.txt";
  s.scale = scale;
  s.min_interactions = 0;
  s.allow_uncategorized = true;
  return s;
}

SplitPair split_interactions(const Catalog& catalog, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("split ratio must lie in (0, 1)");
  SplitPair out;
  out.seed = seed;
  out.train.by_user.resize(catalog.n_users());
  out.test.by_user.resize(catalog.n_users());
  for (UserId u = 0; u < catalog.n_users(); ++u) {
    const auto rows = catalog.user_ratings(u);
    std::vector<Rating> shuffled(rows.begin(), rows.end());
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Split), u}));
    rng.shuffle(shuffled.begin(), shuffled.end());
    const std::size_t count = shuffled.size();
    // small slack so that e.g. 0.8 * 10 lands on 8, not 7.999...
    std::size_t n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(count) + 1e-9));
    if (count >= 2 && n_train >= count) n_train = count - 1;
    if (count >= 2 && n_train == 0) n_train = 1;
    if (count == 1) n_train = 1;
    auto by_item = [](const Rating& a, const Rating& b) { return a.item < b.item; };
    out.train.by_user[u].assign(shuffled.begin(), shuffled.begin() + n_train);
    out.test.by_user[u].assign(shuffled.begin() + n_train, shuffled.end());
    std::sort(out.train.by_user[u].begin(), out.train.by_user[u].end(), by_item);
    std::sort(out.test.by_user[u].begin(), out.test.by_user[u].end(), by_item);
  }
  return out;
}

SparseVector item_vector(const Catalog& catalog, ItemId item, Basis basis, bool rating_weighted) {
  if (item >= catalog.n_items()) throw Error("item_vector: unknown item " + std::to_string(item));
  SparseVector v;
  if (basis == Basis::Users) {
    v.dim = catalog.n_users();
    const auto raters = catalog.item_raters(item);
    const auto values = catalog.item_rater_values(item);
    v.index.assign(raters.begin(), raters.end());
    if (rating_weighted)
      v.value.assign(values.begin(), values.end());
    else
      v.value.assign(raters.size(), 1.0);
  } else {
    v.dim = catalog.n_categories();
    const auto cats = catalog.item_categories(item);
    v.index.assign(cats.begin(), cats.end());
    v.value.assign(cats.size(), 1.0);
  }
  return v;
}

}  // namespace explore
