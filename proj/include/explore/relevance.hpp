#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "explore/catalog.hpp"

namespace explore {

/// Black-box relevance R(u, i) on the catalog's rating scale.
class RelevanceModel {
 public:
  virtual ~RelevanceModel() = default;
  virtual double score(UserId u, ItemId i) const = 0;
  virtual std::size_t n_items() const = 0;
  virtual RatingScale scale() const = 0;

  /// Scores for every item, written into out (size n_items()).
  virtual void score_all(UserId u, std::span<double> out) const;
};

/// Dense precomputed table (users x items), e.g. ingested from a score file or
/// produced by a synthetic generator. Scores are clamped to the scale.
class FrozenRelevanceModel final : public RelevanceModel {
 public:
  FrozenRelevanceModel(std::size_t n_users, std::size_t n_items, std::vector<double> table,
                       RatingScale scale);

  double score(UserId u, ItemId i) const override;
  std::size_t n_items() const override { return n_items_; }
  RatingScale scale() const override { return scale_; }
  void score_all(UserId u, std::span<double> out) const override;

 private:
  std::size_t n_users_, n_items_;
  std::vector<double> table_;
  RatingScale scale_;
};

/// Reads "user<delim>item<delim>score" rows keyed by the catalog's external
/// ids. Pairs absent from the file score scale.lo.
FrozenRelevanceModel load_score_table(const std::filesystem::path& path, const Catalog& catalog,
                                      const std::string& delimiter = "\t");

struct MfParams {
  std::size_t factors = 8;
  std::size_t epochs = 50;
  double lr = 0.01;
  double reg = 0.02;
  double init_std = 0.1;
  std::uint64_t seed = 0;
};

/// Biased matrix factorization,
/// r(u, i) = clamp(mu + b_u + b_i + p_u . q_i, lo, hi).
class MfModel final : public RelevanceModel {
 public:
  MfModel(std::size_t n_users, std::size_t n_items, std::size_t factors, RatingScale scale);

  double score(UserId u, ItemId i) const override;
  std::size_t n_items() const override { return n_items_; }
  RatingScale scale() const override { return scale_; }

  /// Unclamped prediction (used by the trainer).
  double raw(UserId u, ItemId i) const;

  std::size_t factors() const { return f_; }
  const std::vector<double>& user_factors() const { return p_; }
  const std::vector<double>& item_factors() const { return q_; }
  const std::vector<double>& user_bias() const { return bu_; }
  const std::vector<double>& item_bias() const { return bi_; }
  double global_mean() const { return mu_; }

  /// Training RMSE after each epoch.
  const std::vector<double>& epoch_rmse() const { return rmse_; }

 private:
  friend MfModel train_mf(const Interactions&, std::size_t, const MfParams&, RatingScale);

  std::size_t n_users_, n_items_, f_;
  std::vector<double> p_, q_, bu_, bi_;
  double mu_ = 0.0;
  RatingScale scale_;
  std::vector<double> rmse_;
};

/// SGD on squared error with L2 regularization, ratings visited in a seeded
/// shuffled order each epoch. Single-threaded so the factors are bitwise
/// reproducible. Throws TrainingDiverged if the RMSE stops being finite.
MfModel train_mf(const Interactions& train, std::size_t n_items, const MfParams& params,
                 RatingScale scale);

/// RMSE of the model on a rating set.
double rmse(const RelevanceModel& model, const Interactions& ratings);

/// (clamp(r) - lo) / (hi - lo)
double interest_prob(double r, RatingScale scale);

/// Affine map onto [0, 1]; a constant input maps to all ones.
std::vector<double> minmax_normalize(std::span<const double> values);
void minmax_normalize_inplace(std::span<double> values);

}  // namespace explore
