#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "explore/catalog.hpp"
#include "explore/rng.hpp"

namespace explore {

/// Discrete-Weibull patience model of the simulated user.
struct UserModelParams {
  double lambda = 10.0;  // scale, > 0 (infinity disables weariness)
  double gamma = 2.0;    // shape, > 0
  std::size_t k = 10;    // list length
  RatingScale scale;
  bool sequential_consumption = false;

  /// q = exp(-lambda^-gamma)
  double q() const;
  /// log q = -lambda^-gamma, kept separately to avoid underflow in q^x.
  double log_q() const;
  void validate() const;
};

/// p_t = 1 - q^((t+1)^gamma - t^gamma), t >= 0.
double weariness_prob(std::size_t t, const UserModelParams& params);

/// Probability the whole list is scanned without finding an interesting item
/// or quitting mid-scan:
/// sum_j p (1-p)^(j-1) prod_{i<j} (1 - b_i).
double round_quit_prob(std::span<const double> b, double p);

struct ExpectedSteps {
  double value = 0.0;      // sum_t t (q^(t^g) - q^((t+1)^g))
  double telescoped = 0.0; // sum_t q^(t^g), same quantity by telescoping
  std::size_t terms = 0;
};

/// Truncated series for the expected number of steps, stopped once both the
/// current term and a bound on the remaining tail fall below tail_tol.
ExpectedSteps expected_steps_series(const UserModelParams& params, double tail_tol = 1e-10);
double expected_steps(const UserModelParams& params, double tail_tol = 1e-10);

/// lambda * Gamma(1 + 1/gamma): the continuous Weibull mean quoted as a
/// diagnostic next to the discrete value.
double continuous_weibull_mean(const UserModelParams& params);

struct LambdaSolution {
  double lambda = 0.0;
  double achieved = 0.0;
  std::size_t iterations = 0;
};

/// Bisection on lambda so that expected_steps(lambda, gamma) hits the target.
LambdaSolution solve_lambda(double target_steps, double gamma, double tol = 1e-9);

/// lambda for gamma = 1 in closed form: -1 / ln(E / (E + 1)).
double lambda_for_exponential(double target_steps);

enum class QuitReason { None, Weariness, NoInterest, PoolExhausted };
const char* to_string(QuitReason r);

struct StepOutcome {
  bool consumed = false;
  ItemId item = 0;                  // valid when consumed
  QuitReason reason = QuitReason::None;
  std::size_t examinations = 0;     // items examined before the outcome
  bool uniform_fallback = false;    // phase-2 relevances were all <= 0
};

/// One step of the user: scan the list with a weariness check before each
/// item, then (if anything was interesting) consume one item with
/// probability proportional to its relevance.
StepOutcome step_behavior(std::span<const ItemId> list, std::span<const double> interest,
                          std::span<const double> relevance, double weariness, Rng& rng,
                          bool sequential_consumption = false);

StepOutcome step_behavior(std::span<const ItemId> list, std::span<const double> interest,
                          std::span<const double> relevance, std::size_t t,
                          const UserModelParams& params, Rng& rng);

/// Number of consumed items when every step shows a list with the given
/// interest probabilities (the user half of the exploration loop). Stops at
/// max_steps consumptions.
std::size_t simulate_session_length(std::span<const double> interest, const UserModelParams& params,
                                    Rng& rng, std::size_t max_steps = 1'000'000);

}  // namespace explore
