#include "explore/relevance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "explore/error.hpp"
#include "explore/rng.hpp"

namespace explore {

void RelevanceModel::score_all(UserId u, std::span<double> out) const {
  for (ItemId i = 0; i < out.size(); ++i) out[i] = score(u, i);
}

FrozenRelevanceModel::FrozenRelevanceModel(std::size_t n_users, std::size_t n_items,
                                           std::vector<double> table, RatingScale scale)
    : n_users_(n_users), n_items_(n_items), table_(std::move(table)), scale_(scale) {
  if (table_.size() != n_users * n_items) throw Error("FrozenRelevanceModel: table size mismatch");
  for (auto& v : table_) {
    if (!std::isfinite(v)) throw Error("FrozenRelevanceModel: non-finite score");
    v = std::clamp(v, scale_.lo, scale_.hi);
  }
}

double FrozenRelevanceModel::score(UserId u, ItemId i) const {
  return table_[static_cast<std::size_t>(u) * n_items_ + i];
}

void FrozenRelevanceModel::score_all(UserId u, std::span<double> out) const {
  const auto* row = table_.data() + static_cast<std::size_t>(u) * n_items_;
  std::copy(row, row + n_items_, out.begin());
}

FrozenRelevanceModel load_score_table(const std::filesystem::path& path, const Catalog& catalog,
                                      const std::string& delimiter) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot read score table '" + path.string() + "'");
  std::vector<double> table(catalog.n_users() * catalog.n_items(), catalog.scale().lo);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto a = line.find(delimiter);
    const auto b = a == std::string::npos ? a : line.find(delimiter, a + delimiter.size());
    if (b == std::string::npos) throw IngestError("score table: malformed row", lineno);
    const auto user = line.substr(0, a);
    const auto item = line.substr(a + delimiter.size(), b - a - delimiter.size());
    const auto value_s = line.substr(b + delimiter.size());
    double value = 0;
    const auto res = std::from_chars(value_s.data(), value_s.data() + value_s.size(), value);
    if (res.ec != std::errc() || !std::isfinite(value))
      throw IngestError("score table: bad score '" + value_s + "'", lineno);
    const auto u = catalog.find_user(user);
    const auto i = catalog.find_item(item);
    if (!u || !i) continue;  // users dropped at load time
    table[static_cast<std::size_t>(*u) * catalog.n_items() + *i] = value;
  }
  return FrozenRelevanceModel(catalog.n_users(), catalog.n_items(), std::move(table),
                              catalog.scale());
}

MfModel::MfModel(std::size_t n_users, std::size_t n_items, std::size_t factors, RatingScale scale)
    : n_users_(n_users),
      n_items_(n_items),
      f_(factors),
      p_(n_users * factors, 0.0),
      q_(n_items * factors, 0.0),
      bu_(n_users, 0.0),
      bi_(n_items, 0.0),
      scale_(scale) {}

double MfModel::raw(UserId u, ItemId i) const {
  const double* pu = p_.data() + static_cast<std::size_t>(u) * f_;
  const double* qi = q_.data() + static_cast<std::size_t>(i) * f_;
  double dot = 0.0;
  for (std::size_t k = 0; k < f_; ++k) dot += pu[k] * qi[k];
  return mu_ + bu_[u] + bi_[i] + dot;
}

double MfModel::score(UserId u, ItemId i) const {
  return std::clamp(raw(u, i), scale_.lo, scale_.hi);
}

MfModel train_mf(const Interactions& train, std::size_t n_items, const MfParams& params,
                 RatingScale scale) {
  if (params.factors < 1) throw Error("train_mf: factors must be >= 1");
  if (!(params.lr > 0.0)) throw Error("train_mf: lr must be > 0");
  if (!(params.reg >= 0.0)) throw Error("train_mf: reg must be >= 0");
  struct Obs {
    UserId u;
    ItemId i;
    double r;
  };
  std::vector<Obs> obs;
  for (UserId u = 0; u < train.by_user.size(); ++u)
    for (const auto& r : train.by_user[u]) obs.push_back({u, r.item, r.value});
  if (obs.empty()) throw Error("train_mf: empty training set");

  const std::size_t f = params.factors;
  MfModel m(train.by_user.size(), n_items, f, scale);
  Rng rng(params.seed);
  for (auto& v : m.p_) v = params.init_std * rng.normal();
  for (auto& v : m.q_) v = params.init_std * rng.normal();
  double sum = 0.0;
  for (const auto& o : obs) sum += o.r;
  m.mu_ = sum / static_cast<double>(obs.size());

  const double lr = params.lr, reg = params.reg;
  std::vector<double> pu_old(f);
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(obs.begin(), obs.end());
    double sq = 0.0;
    for (const auto& o : obs) {
      const double err = o.r - m.raw(o.u, o.i);
      sq += err * err;
      double* pu = m.p_.data() + static_cast<std::size_t>(o.u) * f;
      double* qi = m.q_.data() + static_cast<std::size_t>(o.i) * f;
      m.bu_[o.u] += lr * (err - reg * m.bu_[o.u]);
      m.bi_[o.i] += lr * (err - reg * m.bi_[o.i]);
      std::copy(pu, pu + f, pu_old.begin());
      for (std::size_t k = 0; k < f; ++k) {
        pu[k] += lr * (err * qi[k] - reg * pu[k]);
        qi[k] += lr * (err * pu_old[k] - reg * qi[k]);
      }
    }
    const double epoch_rmse = std::sqrt(sq / static_cast<double>(obs.size()));
    m.rmse_.push_back(epoch_rmse);
    if (!std::isfinite(epoch_rmse))
      throw TrainingDiverged("train_mf: RMSE became non-finite at epoch " + std::to_string(epoch + 1) +
                             " (lr = " + std::to_string(lr) + "); try a lower learning rate");
  }
  return m;
}

double rmse(const RelevanceModel& model, const Interactions& ratings) {
  double sq = 0.0;
  std::size_t n = 0;
  for (UserId u = 0; u < ratings.by_user.size(); ++u) {
    for (const auto& r : ratings.by_user[u]) {
      const double e = r.value - model.score(u, r.item);
      sq += e * e;
      ++n;
    }
  }
  return n ? std::sqrt(sq / static_cast<double>(n)) : 0.0;
}

double interest_prob(double r, RatingScale scale) {
  if (!(scale.hi > scale.lo)) throw Error("interest_prob: degenerate rating scale");
  return (std::clamp(r, scale.lo, scale.hi) - scale.lo) / (scale.hi - scale.lo);
}

void minmax_normalize_inplace(std::span<double> values) {
  if (values.empty()) return;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) {
    std::fill(values.begin(), values.end(), 1.0);
    return;
  }
  const double span = hi - lo;
  for (auto& v : values) v = (v - lo) / span;
}

std::vector<double> minmax_normalize(std::span<const double> values) {
  if (values.empty()) throw Error("minmax_normalize: empty input");
  std::vector<double> out(values.begin(), values.end());
  minmax_normalize_inplace(out);
  return out;
}

}  // namespace explore
