#include "explore/user_model.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "explore/error.hpp"

namespace explore {

namespace {
constexpr std::size_t kMaxTerms = 10'000'000;
}

double UserModelParams::log_q() const {
  if (std::isinf(lambda)) return 0.0;
  return -std::pow(lambda, -gamma);
}

double UserModelParams::q() const { return std::exp(log_q()); }

void UserModelParams::validate() const {
  if (!(lambda > 0.0)) throw Error("user model: lambda must be > 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error("user model: gamma must be > 0");
  if (k < 1) throw Error("user model: k must be >= 1");
}

double weariness_prob(std::size_t t, const UserModelParams& params) {
  const double td = static_cast<double>(t);
  const double exponent = std::pow(td + 1.0, params.gamma) - std::pow(td, params.gamma);
  // 1 - q^x = -expm1(x log q)
  return -std::expm1(exponent * params.log_q());
}

double round_quit_prob(std::span<const double> b, double p) {
  if (b.empty()) throw Error("round_quit_prob: empty list");
  double total = 0.0;
  double reach = 1.0;  // (1-p)^(j-1) prod_{i<j} (1 - b_i)
  for (double bi : b) {
    total += p * reach;
    reach *= (1.0 - p) * (1.0 - bi);
  }
  return total;
}

ExpectedSteps expected_steps_series(const UserModelParams& params, double tail_tol) {
  params.validate();
  if (!(tail_tol > 0.0)) throw Error("expected_steps: tail_tol must be > 0");
  const double lq = params.log_q();
  if (lq == 0.0) throw Error("expected_steps: infinite lambda has no finite expectation");
  const double g = params.gamma;
  ExpectedSteps out;
  // Tail bound for sum_{t > T} q^(t^g): integral of exp(lq x^g) over (T, inf)
  // = (lambda / g) * Gamma(1/g, (T/lambda)^g).
  auto integral_tail = [&](double T) {
    return params.lambda / g * boost::math::tgamma(1.0 / g, std::pow(T / params.lambda, g));
  };
  for (std::size_t t = 1; t <= kMaxTerms; ++t) {
    const double td = static_cast<double>(t);
    const double a_t = std::exp(lq * std::pow(td, g));
    const double step = std::pow(td + 1.0, g) - std::pow(td, g);
    const double a_next = std::exp(lq * std::pow(td + 1.0, g));
    const double w_t = a_t * -std::expm1(lq * step);
    out.value += td * w_t;
    out.telescoped += a_t;
    out.terms = t;
    if (td * w_t < tail_tol) {
      // sum_{s > t} s w_s = t a_{t+1} + sum_{s > t} a_s
      const double bound = td * a_next + integral_tail(td);
      if (bound < tail_tol) return out;
    }
  }
  throw Error("expected_steps: series did not converge within 1e7 terms");
}

double expected_steps(const UserModelParams& params, double tail_tol) {
  return expected_steps_series(params, tail_tol).value;
}

double continuous_weibull_mean(const UserModelParams& params) {
  return params.lambda * std::tgamma(1.0 + 1.0 / params.gamma);
}

double lambda_for_exponential(double target_steps) {
  return -1.0 / std::log(target_steps / (target_steps + 1.0));
}

LambdaSolution solve_lambda(double target_steps, double gamma, double tol) {
  if (!(target_steps >= 0.5)) throw Error("solve_lambda: target expected steps must be >= 0.5");
  if (!(gamma > 0.0)) throw Error("solve_lambda: gamma must be > 0");
  UserModelParams p;
  p.gamma = gamma;
  auto eval = [&](double lambda) {
    p.lambda = lambda;
    // keep series error well below the requested tolerance
    return expected_steps(p, std::min(1e-10, tol * 1e-2));
  };
  LambdaSolution sol;
  double hi = 1.0;
  double e_hi = eval(hi);
  std::size_t doublings = 0;
  while (e_hi < target_steps) {
    if (++doublings > 200) throw Error("solve_lambda: bracket expansion failed");
    hi *= 2.0;
    e_hi = eval(hi);
  }
  double lo = hi / 2.0;
  while (eval(lo) >= target_steps) {
    if (++doublings > 400) throw Error("solve_lambda: bracket expansion failed");
    hi = lo;
    lo /= 2.0;
  }
  double mid = hi, e_mid = e_hi;
  for (std::size_t it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    e_mid = eval(mid);
    sol.iterations = it + 1;
    if (std::abs(e_mid - target_steps) < tol) break;
    if (e_mid < target_steps)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  sol.lambda = mid;
  sol.achieved = e_mid;
  return sol;
}

const char* to_string(QuitReason r) {
  switch (r) {
    case QuitReason::None: return "none";
    case QuitReason::Weariness: return "weariness";
    case QuitReason::NoInterest: return "no_interest";
    case QuitReason::PoolExhausted: return "pool_exhausted";
  }
  return "?";
}

namespace {

std::size_t pick_categorical(std::span<const double> relevance, Rng& rng, bool& fallback) {
  double total = 0.0;
  for (double r : relevance) total += std::max(r, 0.0);
  if (!(total > 0.0)) {
    fallback = true;
    return static_cast<std::size_t>(rng.below(relevance.size()));
  }
  const double x = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < relevance.size(); ++j) {
    const double w = std::max(relevance[j], 0.0);
    if (w <= 0.0) continue;
    acc += w;
    last_positive = j;
    if (x < acc) return j;
  }
  return last_positive;
}

std::size_t pick_sequential(std::span<const double> relevance, Rng& rng, bool& fallback) {
  double total = 0.0;
  for (double r : relevance) total += std::max(r, 0.0);
  if (!(total > 0.0)) {
    fallback = true;
    return static_cast<std::size_t>(rng.below(relevance.size()));
  }
  // Literal per-item trials with s_j; repeat sweeps until one succeeds.
  while (true) {
    for (std::size_t j = 0; j < relevance.size(); ++j)
      if (rng.bernoulli(std::max(relevance[j], 0.0) / total)) return j;
  }
}

}  // namespace

StepOutcome step_behavior(std::span<const ItemId> list, std::span<const double> interest,
                          std::span<const double> relevance, double weariness, Rng& rng,
                          bool sequential_consumption) {
  if (list.empty()) throw Error("step_behavior: empty list");
  if (interest.size() != list.size() || relevance.size() != list.size())
    throw Error("step_behavior: list, interest and relevance sizes differ");
  StepOutcome out;
  bool interested = false;
  for (std::size_t j = 0; j < list.size(); ++j) {
    if (rng.bernoulli(weariness)) {
      out.reason = QuitReason::Weariness;
      return out;
    }
    ++out.examinations;
    if (rng.bernoulli(interest[j])) {
      interested = true;
      break;
    }
  }
  if (!interested) {
    out.reason = QuitReason::NoInterest;
    return out;
  }
  const std::size_t pick = sequential_consumption
                               ? pick_sequential(relevance, rng, out.uniform_fallback)
                               : pick_categorical(relevance, rng, out.uniform_fallback);
  out.consumed = true;
  out.item = list[pick];
  return out;
}

StepOutcome step_behavior(std::span<const ItemId> list, std::span<const double> interest,
                          std::span<const double> relevance, std::size_t t,
                          const UserModelParams& params, Rng& rng) {
  return step_behavior(list, interest, relevance, weariness_prob(t, params), rng,
                       params.sequential_consumption);
}

std::size_t simulate_session_length(std::span<const double> interest, const UserModelParams& params,
                                    Rng& rng, std::size_t max_steps) {
  std::vector<ItemId> list(interest.size());
  std::iota(list.begin(), list.end(), 0);
  const std::vector<double> relevance(interest.size(), 1.0);
  std::size_t consumed = 0;
  for (std::size_t t = 0; consumed < max_steps; ++t) {
    const auto out = step_behavior(list, interest, relevance, t, params, rng);
    if (!out.consumed) break;
    ++consumed;
  }
  return consumed;
}

}  // namespace explore
