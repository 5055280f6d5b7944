#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mars {

/// Prior and likelihood hyperparameters. Gammas are shape/rate, so the
/// expected rule count is alpha_M / beta_M.
struct Hyperparams {
  double alpha_M = 1.0;
  double beta_M = 100.0;
  double alpha_L = 1.0;
  double beta_L = 100.0;
  /// Dirichlet weights, one per feature. Empty means all ones.
  std::vector<double> theta;
  double alpha_pos = 100.0;
  double beta_pos = 1.0;
  double alpha_neg = 100.0;
  double beta_neg = 1.0;

  /// Copy with `theta` expanded to `n_features` entries.
  Hyperparams resolved(std::size_t n_features) const;

  double theta_at(std::size_t j) const noexcept { return theta.empty() ? 1.0 : theta[j]; }

  /// Throws std::invalid_argument on non-positive values or a theta of the
  /// wrong length.
  void validate(std::size_t n_features) const;

  /// Human-readable list of violated pruning-bound preconditions
  /// (alpha_M < beta_M, alpha_L < beta_L, alpha_pos > beta_pos,
  /// alpha_neg > beta_neg). Empty when all hold.
  std::vector<std::string> bound_precondition_violations() const;

  /// Sets one field from its config key (alpha_M, beta_M, ..., theta).
  /// `theta` accepts a single value (broadcast) or a comma separated list.
  void set(std::string_view key, std::string_view value);
};

/// Reads `key = value` lines; '#' starts a comment. Unknown keys throw.
Hyperparams read_hyperparams(std::istream& in, Hyperparams base = {});
Hyperparams read_hyperparams_file(const std::string& path, Hyperparams base = {});

}  // namespace mars
