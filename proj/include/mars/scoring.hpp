#pragma once

#include <cstddef>
#include <span>

#include "mars/dataset.hpp"
#include "mars/hyperparams.hpp"
#include "mars/row_set.hpp"
#include "mars/rules.hpp"

namespace mars {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Log-posterior objective split into its parts.
struct Score {
  double log_prior = 0.0;
  double log_likelihood = 0.0;
  double log_posterior = 0.0;
  Confusion confusion;
};

double log_beta(double a, double b);

/// log P(K = k) for K ~ Poisson(λ), λ ~ Gamma(shape alpha, rate beta),
/// with λ integrated out (a negative binomial).
double log_poisson_gamma(std::size_t k, double alpha, double beta);

/// log p(M) for the number of rules.
double log_rule_count_prior(std::size_t n_rules, const Hyperparams& h);

/// log p(L) for a rule with L ≥ 1 items: the Poisson-Gamma mass at L with
/// L = 0 excluded from the support and no renormalization.
double log_rule_length_prior(std::size_t n_items, const Hyperparams& h);

/// log probability of one rule's ordered feature assignment under a
/// Dirichlet-multinomial with weights theta. `counts[j]` is the number of
/// items of feature j in the rule.
double log_feature_assignment(std::span<const std::size_t> counts, std::span<const double> theta);

/// log p(R). Values inside conditions do not enter; only M, each L_m and
/// the per-feature item counts l_mj do. Throws std::domain_error when some
/// l_mj exceeds |V_j|.
double log_prior(const RuleSet& rules, const Hyperparams& h, std::span<const FeatureSpec> features);

/// log B(tp+α+, fp+β+) + log B(tn+α-, fn+β-); the proportionality constant
/// is dropped.
double log_likelihood(const Confusion& c, const Hyperparams& h);

Confusion confusion_counts(const RuleSet& rules, const Dataset& data);
/// Confusion of a classifier whose positive predictions are `covered`.
Confusion confusion_from_coverage(const RowSet& covered, const Dataset& data);

Score make_score(double log_prior, const Confusion& c, const Hyperparams& h);
Score score(const RuleSet& rules, const Dataset& data, const Hyperparams& h);

/// Rows entering and leaving the union coverage of a rule set.
struct CoverDelta {
  RowSet entering;
  RowSet leaving;
};

/// Applies a coverage change to confusion counts. Throws std::logic_error
/// if a row both enters and leaves, or a count would go negative.
Confusion update_confusion(Confusion c, const CoverDelta& delta, const Dataset& data);

}  // namespace mars
