#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "explore/catalog.hpp"
#include "explore/rng.hpp"

namespace testing {

using namespace explore;

inline std::vector<std::string> names(const char* prefix, std::size_t n) {
  std::vector<std::string> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = prefix + std::to_string(k);
  return out;
}

/// Catalog from explicit item categories; each user in `raters[i]` rates i with 3.
inline Catalog make_catalog(std::size_t n_users, std::vector<std::vector<CategoryId>> cats,
                            std::size_t n_categories,
                            const std::vector<std::vector<UserId>>& raters = {}) {
  Interactions r;
  r.by_user.resize(n_users);
  for (ItemId i = 0; i < raters.size(); ++i)
    for (UserId u : raters[i]) r.by_user[u].push_back({i, 3.0});
  const std::size_t n_items = cats.size();
  return Catalog(names("u", n_users), names("i", n_items), names("c", n_categories), std::move(cats),
                 std::move(r), RatingScale{});
}

/// Random catalog: every item gets 1-3 categories and each user rates each
/// item with probability `density`, so Users-basis distances vary.
inline Catalog random_catalog(Rng& rng, std::size_t n_users, std::size_t n_items,
                              std::size_t n_categories, double density) {
  std::vector<std::vector<CategoryId>> cats(n_items);
  std::vector<std::vector<UserId>> raters(n_items);
  for (ItemId i = 0; i < n_items; ++i) {
    const std::size_t m = 1 + rng.below(3);
    for (std::size_t c = 0; c < m; ++c) cats[i].push_back(static_cast<CategoryId>(rng.below(n_categories)));
    for (UserId u = 0; u < n_users; ++u)
      if (rng.bernoulli(density)) raters[i].push_back(u);
    if (raters[i].empty()) raters[i].push_back(static_cast<UserId>(rng.below(n_users)));
  }
  return make_catalog(n_users, std::move(cats), n_categories, raters);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("explore_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing
