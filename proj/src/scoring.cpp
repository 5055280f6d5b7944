#include "mars/scoring.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mars {

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double log_poisson_gamma(std::size_t k, double alpha, double beta) {
  const double kd = static_cast<double>(k);
  return std::lgamma(kd + alpha) - std::lgamma(kd + 1.0) - std::lgamma(alpha) + alpha * std::log(beta / (beta + 1.0)) -
         kd * std::log1p(beta);
}

double log_rule_count_prior(std::size_t n_rules, const Hyperparams& h) {
  return log_poisson_gamma(n_rules, h.alpha_M, h.beta_M);
}

double log_rule_length_prior(std::size_t n_items, const Hyperparams& h) {
  if (n_items == 0) throw std::domain_error("rule length must be positive");
  return log_poisson_gamma(n_items, h.alpha_L, h.beta_L);
}

double log_feature_assignment(std::span<const std::size_t> counts, std::span<const double> theta) {
  double theta_sum = 0.0;
  for (double t : theta) theta_sum += t;
  std::size_t total = 0;
  double acc = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) continue;
    total += counts[j];
    acc += std::lgamma(static_cast<double>(counts[j]) + theta[j]) - std::lgamma(theta[j]);
  }
  return acc + std::lgamma(theta_sum) - std::lgamma(static_cast<double>(total) + theta_sum);
}

double log_prior(const RuleSet& rules, const Hyperparams& h, std::span<const FeatureSpec> features) {
  const Hyperparams hr = h.resolved(features.size());
  double theta_sum = 0.0;
  for (double t : hr.theta) theta_sum += t;
  const double lg_theta_sum = std::lgamma(theta_sum);

  double acc = log_rule_count_prior(rules.size(), hr);
  for (const auto& r : rules) {
    std::size_t items = 0;
    double assign = 0.0;
    for (const auto& c : r.conditions()) {
      const std::size_t l = c.values.size();
      if (c.feature >= features.size() || l > features[c.feature].size())
        throw std::domain_error("rule holds " + std::to_string(l) + " items of a feature with fewer values");
      const double t = hr.theta[c.feature];
      assign += std::lgamma(static_cast<double>(l) + t) - std::lgamma(t);
      items += l;
    }
    acc += log_rule_length_prior(items, hr);
    acc += assign + lg_theta_sum - std::lgamma(static_cast<double>(items) + theta_sum);
  }
  return acc;
}

double log_likelihood(const Confusion& c, const Hyperparams& h) {
  return log_beta(static_cast<double>(c.tp) + h.alpha_pos, static_cast<double>(c.fp) + h.beta_pos) +
         log_beta(static_cast<double>(c.tn) + h.alpha_neg, static_cast<double>(c.fn) + h.beta_neg);
}

Confusion confusion_from_coverage(const RowSet& covered, const Dataset& data) {
  Confusion c;
  c.tp = covered.count_and(data.positives());
  const std::size_t predicted = covered.count();
  c.fp = predicted - c.tp;
  c.fn = data.n_pos() - c.tp;
  c.tn = data.n_neg() - c.fp;
  return c;
}

Confusion confusion_counts(const RuleSet& rules, const Dataset& data) {
  return confusion_from_coverage(coverage(rules, data), data);
}

Score make_score(double log_prior_value, const Confusion& c, const Hyperparams& h) {
  Score s;
  s.log_prior = log_prior_value;
  s.log_likelihood = log_likelihood(c, h);
  s.log_posterior = s.log_prior + s.log_likelihood;
  s.confusion = c;
  return s;
}

Score score(const RuleSet& rules, const Dataset& data, const Hyperparams& h) {
  return make_score(log_prior(rules, h, data.features()), confusion_counts(rules, data), h);
}

Confusion update_confusion(Confusion c, const CoverDelta& delta, const Dataset& data) {
  if (delta.entering.size() != data.n_rows() || delta.leaving.size() != data.n_rows())
    throw std::logic_error("cover delta does not match dataset size");
  if (delta.entering.intersects(delta.leaving)) throw std::logic_error("cover delta: row both enters and leaves");
  const std::size_t in_pos = delta.entering.count_and(data.positives());
  const std::size_t in_neg = delta.entering.count() - in_pos;
  const std::size_t out_pos = delta.leaving.count_and(data.positives());
  const std::size_t out_neg = delta.leaving.count() - out_pos;
  if (in_pos > c.fn || in_neg > c.tn || out_pos > c.tp || out_neg > c.fp)
    throw std::logic_error("cover delta inconsistent with confusion counts");
  c.tp = c.tp + in_pos - out_pos;
  c.fn = c.fn - in_pos + out_pos;
  c.fp = c.fp + in_neg - out_neg;
  c.tn = c.tn - in_neg + out_neg;
  return c;
}

}  // namespace mars
