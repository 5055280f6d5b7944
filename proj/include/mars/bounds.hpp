#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mars/dataset.hpp"
#include "mars/hyperparams.hpp"

namespace mars {

/// Pruning quantities for the search. `m_cap` bounds the rule count of any
/// MAP model and `min_support` bounds the support of each of its rules;
/// both tighten as `v_best` (best log-posterior seen) rises.
struct BoundState {
  static constexpr std::size_t kNoCap = std::numeric_limits<std::size_t>::max();

  double upsilon = 1.0;
  /// min(upsilon, row_factor_floor): the base actually used for min_support.
  double support_base = 1.0;
  double log_omega = 0.0;
  double log_Lstar = 0.0;
  double log_prior_empty = 0.0;
  double alpha_M = 1.0;
  double v_best = -std::numeric_limits<double>::infinity();
  std::size_t m_cap = kNoCap;
  std::size_t min_support = 1;
  bool enabled = false;
  /// Why the bounds are disabled, if they are.
  std::vector<std::string> notices;

  double omega() const;
};

/// Slack applied toward the permissive side before rounding.
inline constexpr double kBoundSlack = 1e-9;

/// Worst-case per-row likelihood factor when a rule is removed.
double upsilon(std::size_t n_pos, std::size_t n_neg, const Hyperparams& h);
double upsilon(const Dataset& data, const Hyperparams& h);

/// Smallest likelihood factor one row can contribute when it enters the
/// coverage: min(β+/(N+ + α+ + β+), α+/(N- + α+ + β+)). Unlike `upsilon`
/// this holds for any class balance.
double row_factor_floor(std::size_t n_pos, std::size_t n_neg, const Hyperparams& h);

/// log Ω for `n_features` features; theta resolved to that length.
double log_omega(const Hyperparams& h, std::size_t n_features);
double omega(const Hyperparams& h, std::size_t n_features);

/// log of the perfect-classification likelihood.
double log_Lstar(std::size_t n_pos, std::size_t n_neg, const Hyperparams& h);
double log_Lstar(const Dataset& data, const Hyperparams& h);

/// Bounds before any solution is known (v_best = -inf, no pruning yet).
BoundState make_bounds(const Dataset& data, const Hyperparams& h);
BoundState make_bounds(std::size_t n_pos, std::size_t n_neg, std::size_t n_features, const Hyperparams& h);

/// Raises v_best to `new_log_posterior` if higher and recomputes the cap
/// and support floor. Returns the input unchanged otherwise.
BoundState update_bounds(BoundState b, double new_log_posterior);

/// Rule-count cap for a given v (before clamping), exposed for tests.
double raw_rule_cap(const BoundState& b, double v);

}  // namespace mars
