#include "explore/metrics.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "explore/error.hpp"

namespace explore {

std::optional<Accuracy> accuracy_at_k(std::span<const ItemId> list,
                                      std::span<const ItemId> test_items, std::size_t k) {
  if (test_items.empty()) return std::nullopt;
  const std::size_t len = std::min(k, list.size());
  Accuracy a;
  for (std::size_t j = 0; j < len; ++j)
    if (std::binary_search(test_items.begin(), test_items.end(), list[j])) ++a.hits;
  a.hr = a.hits > 0 ? 1.0 : 0.0;
  a.precision = len ? static_cast<double>(a.hits) / static_cast<double>(len) : 0.0;
  a.recall = static_cast<double>(a.hits) / static_cast<double>(test_items.size());
  return a;
}

std::vector<double> greedy_coverage_curve(const Catalog& catalog, std::size_t max_t) {
  const std::size_t n_cat = catalog.n_categories();
  std::vector<double> curve(max_t + 1, 0.0);
  if (n_cat == 0) return curve;
  std::vector<bool> covered(n_cat, false), used(catalog.n_items(), false);
  std::size_t count = 0;
  bool saturated = false;
  for (std::size_t t = 1; t <= max_t; ++t) {
    if (!saturated) {
      std::size_t best_gain = 0;
      ItemId best = 0;
      for (ItemId i = 0; i < catalog.n_items(); ++i) {
        if (used[i]) continue;
        std::size_t gain = 0;
        for (auto c : catalog.item_categories(i))
          if (!covered[c]) ++gain;
        if (gain > best_gain) {
          best_gain = gain;
          best = i;
        }
      }
      if (best_gain == 0) {
        saturated = true;
      } else {
        used[best] = true;
        for (auto c : catalog.item_categories(best))
          if (!covered[c]) {
            covered[c] = true;
            ++count;
          }
      }
    }
    curve[t] = static_cast<double>(count) / static_cast<double>(n_cat);
  }
  return curve;
}

MaxScores max_scores(const Catalog& catalog, const UserModelParams& params, double horizon_tol) {
  params.validate();
  const double lq = params.log_q();
  if (lq == 0.0) throw Error("max_scores: infinite lambda");
  const double g = params.gamma;
  MaxScores out;
  auto a = [&](double t) { return std::exp(lq * std::pow(t, g)); };
  auto tail = [&](double T) {
    return params.lambda / g * boost::math::tgamma(1.0 / g, std::pow(T / params.lambda, g));
  };
  // coverage prefixes grow lazily with the horizon
  std::vector<double> curve = greedy_coverage_curve(catalog, 64);
  for (std::size_t t = 1; t <= 10'000'000; ++t) {
    if (t >= curve.size()) curve = greedy_coverage_curve(catalog, curve.size() * 2);
    const double td = static_cast<double>(t);
    const double w = a(td) * -std::expm1(lq * (std::pow(td + 1.0, g) - std::pow(td, g)));
    out.distance += td * w;
    out.coverage += curve[t] * w;
    out.horizon = t;
    if (td * w < horizon_tol && td * a(td + 1.0) + tail(td) < horizon_tol) return out;
  }
  throw Error("max_scores: horizon did not converge");
}

double relative_gap(double max, double achieved) {
  if (max == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (max - achieved) / max;
}

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw Error("incomplete_beta: a and b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_distribution_sf(double f, double d1, double d2) {
  if (std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw Error("anova: need at least two groups");
  std::size_t n = 0;
  double grand = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw Error("anova: each group needs at least two samples");
    n += g.size();
    for (double v : g) grand += v;
  }
  grand /= static_cast<double>(n);
  double ss_between = 0.0, ss_within = 0.0;
  for (const auto& g : groups) {
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    ss_between += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
    for (double v : g) ss_within += (v - mean) * (v - mean);
  }
  AnovaResult r;
  r.df_between = static_cast<double>(groups.size() - 1);
  r.df_within = static_cast<double>(n - groups.size());
  // relative to the data's scale, sums this small are rounding noise
  const double scale = std::max(1.0, grand * grand) * static_cast<double>(n);
  const double noise = 1e-24 * scale;
  if (ss_within <= noise) {
    if (ss_between <= noise) {
      r.identical_groups = true;
      r.f = std::numeric_limits<double>::quiet_NaN();
      r.p = std::numeric_limits<double>::quiet_NaN();
    } else {
      r.f = std::numeric_limits<double>::infinity();
      r.p = 0.0;
    }
    return r;
  }
  r.f = (ss_between / r.df_between) / (ss_within / r.df_within);
  r.p = f_distribution_sf(r.f, r.df_between, r.df_within);
  return r;
}

}  // namespace explore
