#include "mars/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "mars/scoring.hpp"

namespace mars {

double BoundState::omega() const { return std::exp(log_omega); }

double upsilon(std::size_t n_pos, std::size_t n_neg, const Hyperparams& h) {
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return h.beta_neg * (np + h.alpha_pos + h.beta_pos - 1.0) / ((nn + h.alpha_neg + h.beta_neg) * (np + h.alpha_pos - 1.0));
}

double upsilon(const Dataset& data, const Hyperparams& h) { return upsilon(data.n_pos(), data.n_neg(), h); }

double row_factor_floor(std::size_t n_pos, std::size_t n_neg, const Hyperparams& h) {
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  const double s = h.alpha_pos + h.beta_pos;
  return std::min(h.beta_pos / (np + s), h.alpha_pos / (nn + s));
}

double log_omega(const Hyperparams& h, std::size_t n_features) {
  const Hyperparams hr = h.resolved(n_features);
  double theta_sum = 0.0;
  double theta_max = 0.0;
  for (double t : hr.theta) {
    theta_sum += t;
    theta_max = std::max(theta_max, t);
  }
  return std::log1p(h.beta_M) + (h.alpha_L + 1.0) * std::log1p(h.beta_L) + std::log(theta_sum) -
         std::log(h.alpha_M) - h.alpha_L * std::log(h.beta_L) - std::log(h.alpha_L) - std::log(theta_max);
}

double omega(const Hyperparams& h, std::size_t n_features) { return std::exp(log_omega(h, n_features)); }

double log_Lstar(std::size_t n_pos, std::size_t n_neg, const Hyperparams& h) {
  return log_likelihood(Confusion{n_pos, 0, n_neg, 0}, h);
}

double log_Lstar(const Dataset& data, const Hyperparams& h) { return log_Lstar(data.n_pos(), data.n_neg(), h); }

BoundState make_bounds(std::size_t n_pos, std::size_t n_neg, std::size_t n_features, const Hyperparams& h) {
  BoundState b;
  b.upsilon = upsilon(n_pos, n_neg, h);
  b.support_base = std::min(b.upsilon, row_factor_floor(n_pos, n_neg, h));
  b.log_omega = log_omega(h, n_features);
  b.log_Lstar = log_Lstar(n_pos, n_neg, h);
  b.log_prior_empty = log_rule_count_prior(0, h);
  b.alpha_M = h.alpha_M;

  for (const auto& v : h.bound_precondition_violations()) b.notices.push_back("precondition fails: " + v);
  if (!(b.log_omega > 0.0)) b.notices.emplace_back("Omega <= 1");
  if (!(b.support_base < 1.0)) b.notices.emplace_back("Upsilon >= 1, no support pruning");
  b.enabled = b.notices.empty();
  return b;
}

BoundState make_bounds(const Dataset& data, const Hyperparams& h) {
  return make_bounds(data.n_pos(), data.n_neg(), data.n_features(), h);
}

double raw_rule_cap(const BoundState& b, double v) { return (b.log_Lstar + b.log_prior_empty - v) / b.log_omega; }

BoundState update_bounds(BoundState b, double new_log_posterior) {
  if (!(new_log_posterior > b.v_best)) return b;
  b.v_best = new_log_posterior;
  if (!b.enabled) {
    b.m_cap = BoundState::kNoCap;
    b.min_support = 1;
    return b;
  }

  const double cap = std::floor(raw_rule_cap(b, b.v_best) + kBoundSlack);
  std::size_t m = 1;
  if (cap >= 1.0) m = cap >= 1e15 ? BoundState::kNoCap : static_cast<std::size_t>(cap);
  b.m_cap = m;

  // with alpha_M = 1 the M-dependent factor is exactly 1/Omega
  const double md = m == BoundState::kNoCap ? 1e15 : static_cast<double>(m);
  const double log_ratio = std::log((md + b.alpha_M - 1.0) / (md * b.alpha_M)) - b.log_omega;
  const double bound = std::ceil(log_ratio / std::log(b.support_base) - kBoundSlack);
  const std::size_t support = bound > 1.0 ? static_cast<std::size_t>(bound) : 1;
  // the floor only tightens as v_best rises
  b.min_support = std::max(b.min_support, support);
  return b;
}

}  // namespace mars
