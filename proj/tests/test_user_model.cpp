#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "explore/error.hpp"
#include "explore/user_model.hpp"

using namespace explore;

namespace {

UserModelParams params(double lambda, double gamma) {
  UserModelParams p;
  p.lambda = lambda;
  p.gamma = gamma;
  return p;
}

}  // namespace

TEST_CASE("weariness probability") {
  const auto exp10 = params(10, 1);
  for (std::size_t t : {0u, 1u, 7u, 100u})
    CHECK(weariness_prob(t, exp10) == doctest::Approx(1.0 - std::exp(-0.1)).epsilon(1e-14));
  CHECK(1.0 - std::exp(-0.1) == doctest::Approx(0.09516).epsilon(1e-4));

  const auto w = params(5, 2);
  CHECK(w.q() == doctest::Approx(std::exp(-1.0 / 25.0)).epsilon(1e-12));
  CHECK(weariness_prob(0, w) == doctest::Approx(1.0 - std::exp(-1.0 / 25.0)).epsilon(1e-14));
  CHECK(weariness_prob(0, w) == doctest::Approx(0.039211).epsilon(1e-5));
  // t = 3: 1 - q^(16 - 9)
  CHECK(weariness_prob(3, w) == doctest::Approx(1.0 - std::pow(w.q(), 7.0)).epsilon(1e-12));

  CHECK(weariness_prob(5, params(std::numeric_limits<double>::infinity(), 2)) == 0.0);
  CHECK(weariness_prob(0, params(1e-6, 2)) == doctest::Approx(1.0));
}

TEST_CASE("weariness monotonicity in t") {
  for (double gamma : {1.5, 2.0, 3.0}) {
    const auto p = params(8, gamma);
    for (std::size_t t = 0; t < 50; ++t) CHECK(weariness_prob(t + 1, p) > weariness_prob(t, p));
  }
  const auto flat = params(8, 1);
  for (std::size_t t = 0; t < 50; ++t)
    CHECK(weariness_prob(t + 1, flat) == doctest::Approx(weariness_prob(t, flat)).epsilon(1e-14));
}

TEST_CASE("round quit probability hand cases") {
  for (double p : {0.0, 0.1, 0.37, 1.0}) {
    for (double b : {0.0, 0.4, 1.0}) CHECK(round_quit_prob(std::vector<double>{b}, p) == doctest::Approx(p));
    CHECK(round_quit_prob(std::vector<double>{0.0, 1.0}, p) == doctest::Approx(2 * p - p * p));
  }
  CHECK(round_quit_prob(std::vector<double>{0.3, 0.2, 0.9}, 0.0) == 0.0);
  CHECK_THROWS_AS(round_quit_prob(std::vector<double>{}, 0.5), Error);
}

TEST_CASE("expected steps closed forms") {
  const auto e = expected_steps_series(params(10, 1));
  const double q = std::exp(-0.1);
  CHECK(e.value == doctest::Approx(q / (1 - q)).epsilon(1e-10));
  CHECK(e.value == doctest::Approx(9.5083).epsilon(1e-5));
  // q = 0.5 with gamma = 1: lambda = 1 / ln 2
  CHECK(expected_steps(params(1.0 / std::log(2.0), 1)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(expected_steps(params(std::numeric_limits<double>::infinity(), 2)), Error);
  CHECK_THROWS_AS(expected_steps(params(5, 2), 0.0), Error);
}

TEST_CASE("expected steps: both series forms agree") {
  for (double gamma : {0.7, 1.0, 1.5, 2.0, 3.0})
    for (double lambda : {0.5, 2.0, 6.0, 20.0, 60.0}) {
      const auto e = expected_steps_series(params(lambda, gamma));
      CHECK(std::abs(e.value - e.telescoped) < 1e-9);
      CHECK(e.terms >= 1);
    }
}

TEST_CASE("khan interval diagnostic lies within one of the continuous mean") {
  for (double gamma : {1.0, 2.0, 3.0})
    for (double lambda : {3.0, 10.0, 30.0}) {
      const auto p = params(lambda, gamma);
      const double mu = continuous_weibull_mean(p);
      const double e = expected_steps(p);
      CHECK(e <= mu + 1.0);
      CHECK(e >= mu - 1.0);
    }
}

TEST_CASE("lambda calibration") {
  SUBCASE("exponential case inverts the closed form") {
    const auto s = solve_lambda(9.5083, 1.0);
    CHECK(s.lambda == doctest::Approx(10.0).epsilon(1e-4));
    for (double target : {0.5, 1.0, 5.0, 10.0, 20.0, 100.0}) {
      const auto sol = solve_lambda(target, 1.0);
      CHECK(sol.lambda == doctest::Approx(lambda_for_exponential(target)).epsilon(1e-8));
    }
  }
  SUBCASE("round trip") {
    for (double gamma : {0.8, 1.0, 2.0, 3.0})
      for (double target : {0.5, 5.0, 10.0, 20.0}) {
        const auto sol = solve_lambda(target, gamma);
        const double again = expected_steps(params(sol.lambda, gamma));
        CHECK(std::abs(again - target) < 1e-6);
        CHECK(std::abs(sol.achieved - target) < 1e-6);
      }
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(solve_lambda(0.1, 2.0), Error);
    CHECK_THROWS_AS(solve_lambda(5.0, 0.0), Error);
  }
}

TEST_CASE("step behavior edge cases") {
  const std::vector<ItemId> list{4, 8, 15};
  const std::vector<double> ones(3, 1.0), zeros(3, 0.0), rel{2, 3, 5};
  Rng rng(1);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto quit = step_behavior(list, ones, rel, 1.0, rng);
    CHECK_FALSE(quit.consumed);
    CHECK(quit.reason == QuitReason::Weariness);
    CHECK(quit.examinations == 0);
    const auto bored = step_behavior(list, zeros, rel, 0.0, rng);
    CHECK_FALSE(bored.consumed);
    CHECK(bored.reason == QuitReason::NoInterest);
    CHECK(bored.examinations == 3);
  }
  CHECK_THROWS_AS(step_behavior(std::vector<ItemId>{}, zeros, rel, 0.0, rng), Error);
  CHECK_THROWS_AS(step_behavior(list, std::vector<double>{1.0}, rel, 0.0, rng), Error);
}

TEST_CASE("consumption follows relevance proportions") {
  const std::vector<ItemId> list{0, 1, 2};
  const std::vector<double> ones(3, 1.0), rel{2, 3, 5};
  for (bool sequential : {false, true}) {
    Rng rng(sequential ? 5 : 6);
    std::vector<double> count(3, 0.0);
    constexpr int n = 100000;
    for (int rep = 0; rep < n; ++rep) {
      const auto out = step_behavior(list, ones, rel, 0.0, rng, sequential);
      REQUIRE(out.consumed);
      count[out.item] += 1.0;
    }
    // the sequential variant repeats sweeps of per-item trials, so item j wins
    // with prod_{h<j}(1 - s_h) s_j / (1 - prod_h (1 - s_h))
    const std::vector<double> s{0.2, 0.3, 0.5};
    std::vector<double> want = s;
    if (sequential) {
      const double none = 0.8 * 0.7 * 0.5;
      want = {0.2 / (1 - none), 0.8 * 0.3 / (1 - none), 0.8 * 0.7 * 0.5 / (1 - none)};
    }
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(count[j] / n - want[j]) < 0.01);
  }
}

TEST_CASE("non-positive relevances fall back to a uniform pick") {
  const std::vector<ItemId> list{0, 1};
  const std::vector<double> ones(2, 1.0), rel{0.0, -1.0};
  Rng rng(8);
  std::size_t first = 0;
  for (int rep = 0; rep < 4000; ++rep) {
    const auto out = step_behavior(list, ones, rel, 0.0, rng);
    REQUIRE(out.consumed);
    CHECK(out.uniform_fallback);
    if (out.item == 0) ++first;
  }
  CHECK(std::abs(first / 4000.0 - 0.5) < 0.05);
}

TEST_CASE("a list with one positive relevance always yields that item") {
  const std::vector<ItemId> list{0, 1, 2};
  const std::vector<double> ones(3, 1.0), rel{0.0, 4.0, -2.0};
  Rng rng(10);
  for (int rep = 0; rep < 500; ++rep) {
    const auto out = step_behavior(list, ones, rel, 0.0, rng);
    CHECK(out.item == 1);
    CHECK_FALSE(out.uniform_fallback);
  }
}

TEST_CASE("session length with partial interest stays below the expected steps") {
  const auto p = params(solve_lambda(10.0, 2.0).lambda, 2.0);
  const std::vector<double> b(10, 0.3);
  Rng rng(99);
  constexpr int n = 20000;
  double sum = 0, sq = 0;
  for (int rep = 0; rep < n; ++rep) {
    const double len = static_cast<double>(simulate_session_length(b, p, rng));
    sum += len;
    sq += len * len;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(mean <= expected_steps(p) + 3 * se);
}

TEST_CASE("session length caps at max_steps") {
  Rng rng(3);
  const std::vector<double> b(4, 1.0);
  CHECK(simulate_session_length(b, params(std::numeric_limits<double>::infinity(), 2), rng, 25) == 25);
}
