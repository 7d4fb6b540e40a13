#include <doctest.h>

#include <algorithm>

#include "explore/catalog.hpp"
#include "explore/error.hpp"
#include "helpers.hpp"

using namespace explore;
using testing::scratch_dir;
using testing::write_text;

namespace {

IngestionSchema loose_schema() {
  IngestionSchema s;
  s.min_interactions = 1;
  s.allow_uncategorized = true;
  return s;
}

}  // namespace

TEST_CASE("three-line ratings file") {
  auto dir = scratch_dir("three_line");
  write_text(dir / "r.tsv", "u1\ti1\t4\nu1\ti2\t2\nu2\ti1\t5\n");
  const Catalog c = load_dataset(dir / "r.tsv", loose_schema());
  CHECK(c.n_users() == 2);
  CHECK(c.n_items() == 2);
  CHECK(c.n_ratings() == 3);
  CHECK(c.user_name(0) == "u1");
  CHECK(c.item_name(1) == "i2");
  CHECK(c.scale() == RatingScale{1, 5});
}

TEST_CASE("whitespace and double-colon delimiters") {
  auto dir = scratch_dir("delims");
  write_text(dir / "ws.txt", "u1  i1 4\n u2\t i1   3 \n");
  auto s = loose_schema();
  s.delimiter = "whitespace";
  CHECK(load_dataset(dir / "ws.txt", s).n_ratings() == 2);

  write_text(dir / "ml.dat", "1::10::5::978300760\n1::20::3::978302109\n");
  write_text(dir / "movies.dat", "10::Toy Story (1995)::Animation|Comedy\n20::Heat (1995)::Action\n");
  s = IngestionSchema{};
  s.delimiter = "::";
  s.min_interactions = 1;
  s.items_path = dir / "movies.dat";
  s.items_delimiter = "::";
  s.items_category_col = 2;
  const Catalog c = load_dataset(dir / "ml.dat", s);
  CHECK(c.n_categories() == 3);
  CHECK(c.item_categories(0).size() == 2);
  CHECK(c.item_categories(1).size() == 1);
}

TEST_CASE("duplicate pairs keep the last rating") {
  auto dir = scratch_dir("dups");
  write_text(dir / "r.tsv", "a\tx\t1\na\ty\t2\na\tx\t5\n");
  const Catalog c = load_dataset(dir / "r.tsv", loose_schema());
  CHECK(c.n_ratings() == 2);
  const auto x = c.find_item("x");
  REQUIRE(x);
  for (const auto& r : c.user_ratings(0))
    if (r.item == *x) CHECK(r.value == 5.0);
}

TEST_CASE("users below the minimum are dropped") {
  auto dir = scratch_dir("minimum");
  std::string body;
  for (int i = 0; i < 5; ++i) body += "heavy\ti" + std::to_string(i) + "\t3\n";
  body += "light\ti0\t4\n";
  write_text(dir / "r.tsv", body);
  auto s = loose_schema();
  s.min_interactions = 5;
  const Catalog c = load_dataset(dir / "r.tsv", s);
  CHECK(c.n_users() == 1);
  CHECK(c.find_user("light") == std::nullopt);
  CHECK(c.find_user("heavy").has_value());
}

TEST_CASE("ingestion errors") {
  auto dir = scratch_dir("errors");
  SUBCASE("rating outside the scale names the row") {
    write_text(dir / "r.tsv", "u\ti\t4\nu\tj\t9\n");
    try {
      load_dataset(dir / "r.tsv", loose_schema());
      FAIL("expected an error");
    } catch (const IngestError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("malformed row") {
    write_text(dir / "r.tsv", "u\ti\t4\nu\tj\n");
    CHECK_THROWS_AS(load_dataset(dir / "r.tsv", loose_schema()), IngestError);
  }
  SUBCASE("non-numeric rating") {
    write_text(dir / "r.tsv", "u\ti\tgood\n");
    CHECK_THROWS_AS(load_dataset(dir / "r.tsv", loose_schema()), IngestError);
  }
  SUBCASE("empty catalog") {
    write_text(dir / "r.tsv", "");
    CHECK_THROWS_AS(load_dataset(dir / "r.tsv", loose_schema()), IngestError);
  }
  SUBCASE("unknown category delimiter") {
    write_text(dir / "r.tsv", "u\ti\t4\tA|B\n");
    auto s = loose_schema();
    s.category_col = 3;
    s.category_delimiter = "";
    CHECK_THROWS_AS(load_dataset(dir / "r.tsv", s), IngestError);
    s.category_delimiter = "\t";
    CHECK_THROWS_AS(load_dataset(dir / "r.tsv", s), IngestError);
  }
  SUBCASE("uncategorized items are rejected by default") {
    write_text(dir / "r.tsv", "u\ti\t4\tA\nu\tj\t4\t\n");
    auto s = loose_schema();
    s.category_col = 3;
    s.allow_uncategorized = false;
    CHECK_THROWS_AS(load_dataset(dir / "r.tsv", s), IngestError);
    s.allow_uncategorized = true;
    CHECK(load_dataset(dir / "r.tsv", s).item_categories(1).empty());
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_dataset(dir / "absent.tsv", loose_schema()), IngestError);
  }
}

TEST_CASE("canonical dump reloads to an equal catalog") {
  Rng rng(3);
  const Catalog c = testing::random_catalog(rng, 12, 15, 5, 0.4);
  auto dir = scratch_dir("roundtrip");
  dump_canonical(c, dir);
  auto schema = canonical_schema(dir, c.scale());
  schema.min_interactions = 1;
  const Catalog back = load_dataset(dir / "ratings.tsv", schema);
  CHECK(back == c);
}

TEST_CASE("split sizes") {
  Interactions r;
  r.by_user.resize(2);
  for (ItemId i = 0; i < 10; ++i) r.by_user[0].push_back({i, 3.0});
  for (ItemId i = 0; i < 5; ++i) r.by_user[1].push_back({i, 3.0});
  const Catalog c(testing::names("u", 2), testing::names("i", 10), {}, std::vector<std::vector<CategoryId>>(10),
                  r, RatingScale{});
  const auto s = split_interactions(c, 0.8, 11);
  CHECK(s.train.by_user[0].size() == 8);
  CHECK(s.test.by_user[0].size() == 2);
  CHECK(s.train.by_user[1].size() == 4);
  CHECK(s.test.by_user[1].size() == 1);
  CHECK(split_interactions(c, 0.8, 11).train == s.train);
  CHECK_THROWS_AS(split_interactions(c, 1.0, 1), Error);
  CHECK_THROWS_AS(split_interactions(c, 0.0, 1), Error);
}

TEST_CASE("split is a per-user partition near the ratio") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const Catalog c = testing::random_catalog(rng, 30, 40, 4, 0.3);
    const double ratio = 0.1 + 0.8 * rng.uniform();
    const auto s = split_interactions(c, ratio, rep);
    for (UserId u = 0; u < c.n_users(); ++u) {
      const auto all = c.user_ratings(u);
      const auto& tr = s.train.by_user[u];
      const auto& te = s.test.by_user[u];
      REQUIRE(tr.size() + te.size() == all.size());
      std::vector<Rating> merged(tr.begin(), tr.end());
      merged.insert(merged.end(), te.begin(), te.end());
      std::sort(merged.begin(), merged.end(), [](auto& a, auto& b) { return a.item < b.item; });
      CHECK(std::equal(merged.begin(), merged.end(), all.begin(), all.end()));
      if (all.size() >= 2) {
        CHECK(!te.empty());
        CHECK(!tr.empty());
        CHECK(std::abs(static_cast<double>(tr.size()) - ratio * static_cast<double>(all.size())) <= 1.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("item vectors") {
  // item 0 rated by users 1 and 3 of 4; categories {0, 2} of 3
  const Catalog c = testing::make_catalog(4, {{0, 2}, {1}}, 3, {{0, 2}, {1}});
  CHECK(item_vector(c, 0, Basis::Users).to_dense() == std::vector<double>{1, 0, 1, 0});
  CHECK(item_vector(c, 0, Basis::Categories).to_dense() == std::vector<double>{1, 0, 1});
  CHECK(item_vector(c, 0, Basis::Users) == item_vector(c, 0, Basis::Users));
  const Catalog lonely = testing::make_catalog(2, {{0}, {0}}, 1, {{0}});
  CHECK(item_vector(lonely, 1, Basis::Users).empty());
  CHECK_THROWS_AS(item_vector(c, 7, Basis::Users), Error);
}

TEST_CASE("rating-weighted user vectors carry the rating values") {
  Interactions r;
  r.by_user = {{{0, 2.0}}, {{0, 5.0}}};
  const Catalog c(testing::names("u", 2), testing::names("i", 1), testing::names("c", 1), {{0}}, r,
                  RatingScale{});
  CHECK(item_vector(c, 0, Basis::Users, true).to_dense() == std::vector<double>{2, 5});
}
