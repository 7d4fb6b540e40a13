#pragma once

#include <optional>
#include <span>
#include <vector>

#include "explore/catalog.hpp"
#include "explore/user_model.hpp"

namespace explore {

struct Accuracy {
  double hr = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t hits = 0;
};

/// HR / Precision / Recall of the first k entries of a list against a test
/// set (sorted ascending). Returns nullopt for an empty test set. A list
/// shorter than k is scored at its own length.
std::optional<Accuracy> accuracy_at_k(std::span<const ItemId> list,
                                      std::span<const ItemId> test_items, std::size_t k);

struct MaxScores {
  double distance = 0.0;  // D-bar
  double coverage = 0.0;  // C-bar, a lower bound (greedy max coverage)
  std::size_t horizon = 0;
};

/// Weighted maxima sum_t M_t (q^(t^g) - q^((t+1)^g)), with M_t^D = t and M_t^C
/// the coverage of the greedy max-coverage prefix of size t.
MaxScores max_scores(const Catalog& catalog, const UserModelParams& params,
                     double horizon_tol = 1e-10);

/// Coverage fraction of the greedy max-coverage prefixes: out[t] for t = 0..max_t.
std::vector<double> greedy_coverage_curve(const Catalog& catalog, std::size_t max_t);

/// (max - achieved) / max
double relative_gap(double max, double achieved);

struct AnovaResult {
  double f = 0.0;
  double p = 1.0;
  double df_between = 0.0;
  double df_within = 0.0;
  bool identical_groups = false;  // zero variance everywhere, F undefined
};

/// One-way ANOVA; p is the upper tail of F(df1, df2).
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

/// P[F(d1, d2) > f]
double f_distribution_sf(double f, double d1, double d2);

}  // namespace explore
