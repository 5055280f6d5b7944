#pragma once

// Independent reference implementations used by the tests. Nothing here calls
// the library's scoring or coverage code; rules are evaluated row by row and
// the prior is written out directly from its closed form.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "mars/dataset.hpp"
#include "mars/hyperparams.hpp"
#include "mars/rules.hpp"
#include "mars/scoring.hpp"

namespace oracle {

using mars::Dataset;
using mars::FeatureSpec;
using mars::Hyperparams;
using mars::Rule;
using mars::RuleSet;
using mars::ValueIndex;

inline FeatureSpec categorical(mars::FeatureId id, std::size_t vocab) {
  FeatureSpec f;
  f.id = id;
  f.name = "f" + std::to_string(id);
  f.kind = mars::FeatureKind::kCategorical;
  for (std::size_t v = 0; v < vocab; ++v) f.vocabulary.push_back(std::string(1, static_cast<char>('a' + v)));
  return f;
}

/// Random categorical data: labels come from a hidden one- or two-rule set,
/// with a few flipped, and both classes always present.
inline Dataset tiny_instance(std::uint64_t seed, std::size_t n_rows = 20, std::size_t n_features = 4,
                             std::size_t max_vocab = 3) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  std::vector<FeatureSpec> feats;
  for (std::size_t j = 0; j < n_features; ++j) feats.push_back(categorical(j, pick(2, max_vocab)));

  for (;;) {
    std::vector<ValueIndex> cells(n_rows * n_features);
    for (std::size_t i = 0; i < n_rows; ++i)
      for (std::size_t j = 0; j < n_features; ++j) cells[i * n_features + j] = static_cast<ValueIndex>(pick(0, feats[j].size() - 1));

    // hidden rules: each a conjunction of (feature == value) tests
    std::vector<std::vector<std::pair<std::size_t, ValueIndex>>> hidden(pick(1, 2));
    for (auto& r : hidden) {
      const std::size_t k = pick(1, 2);
      for (std::size_t c = 0; c < k; ++c) {
        const std::size_t j = pick(0, n_features - 1);
        r.emplace_back(j, static_cast<ValueIndex>(pick(0, feats[j].size() - 1)));
      }
    }
    std::vector<std::uint8_t> labels(n_rows);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n_rows; ++i) {
      bool y = false;
      for (const auto& r : hidden) {
        bool all = true;
        for (auto [j, v] : r) all = all && cells[i * n_features + j] == v;
        y = y || all;
      }
      if (pick(0, 9) == 0) y = !y;
      labels[i] = y ? 1 : 0;
      pos += labels[i];
    }
    if (pos > 0 && pos < n_rows) return Dataset(feats, std::move(cells), std::move(labels));
  }
}

inline bool covers(const Rule& r, const Dataset& d, std::size_t row) {
  for (const auto& c : r.conditions())
    if (std::find(c.values.begin(), c.values.end(), d.value(row, c.feature)) == c.values.end()) return false;
  return true;
}

inline bool predicts(const RuleSet& rs, const Dataset& d, std::size_t row) {
  return std::any_of(rs.begin(), rs.end(), [&](const Rule& r) { return covers(r, d, row); });
}

inline std::size_t support(const Rule& r, const Dataset& d) {
  std::size_t s = 0;
  for (std::size_t i = 0; i < d.n_rows(); ++i) s += covers(r, d, i) ? 1 : 0;
  return s;
}

inline mars::Confusion recount(const RuleSet& rs, const Dataset& d) {
  mars::Confusion c;
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    const bool p = predicts(rs, d, i);
    const bool y = d.label(i);
    if (p && y) ++c.tp;
    else if (p) ++c.fp;
    else if (y) ++c.fn;
    else ++c.tn;
  }
  return c;
}

inline double log_pg(double k, double a, double b) {
  return std::lgamma(k + a) - std::lgamma(k + 1) - std::lgamma(a) + a * std::log(b / (b + 1)) - k * std::log(b + 1);
}

inline double prior(const RuleSet& rs, const Hyperparams& h, std::size_t n_features) {
  double theta_sum = 0;
  for (std::size_t j = 0; j < n_features; ++j) theta_sum += h.theta_at(j);
  double lp = log_pg(static_cast<double>(rs.size()), h.alpha_M, h.beta_M);
  for (const auto& r : rs) {
    std::vector<double> l(n_features, 0.0);
    double total = 0;
    for (const auto& c : r.conditions()) {
      l[c.feature] = static_cast<double>(c.values.size());
      total += l[c.feature];
    }
    lp += log_pg(total, h.alpha_L, h.beta_L);
    lp += std::lgamma(theta_sum) - std::lgamma(total + theta_sum);
    for (std::size_t j = 0; j < n_features; ++j) lp += std::lgamma(l[j] + h.theta_at(j)) - std::lgamma(h.theta_at(j));
  }
  return lp;
}

inline double lbeta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

inline double likelihood(const mars::Confusion& c, const Hyperparams& h) {
  return lbeta(static_cast<double>(c.tp) + h.alpha_pos, static_cast<double>(c.fp) + h.beta_pos) +
         lbeta(static_cast<double>(c.tn) + h.alpha_neg, static_cast<double>(c.fn) + h.beta_neg);
}

inline double posterior(const RuleSet& rs, const Dataset& d, const Hyperparams& h) {
  return prior(rs, h, d.n_features()) + likelihood(recount(rs, d), h);
}

/// Every non-empty proper subset of {0..n-1}.
inline std::vector<std::vector<ValueIndex>> proper_subsets(std::size_t n) {
  std::vector<std::vector<ValueIndex>> out;
  for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<ValueIndex> s;
    for (std::size_t v = 0; v < n; ++v)
      if (mask & (1u << v)) s.push_back(static_cast<ValueIndex>(v));
    out.push_back(std::move(s));
  }
  return out;
}

/// All rules with 1..max_conditions non-vacuous conditions, in sorted order.
inline std::vector<Rule> all_rules(const Dataset& d, std::size_t max_conditions) {
  const std::size_t J = d.n_features();
  std::vector<Rule> out;
  for (std::uint32_t fmask = 1; fmask < (1u << J); ++fmask) {
    std::vector<mars::FeatureId> fs;
    for (std::size_t j = 0; j < J; ++j)
      if (fmask & (1u << j)) fs.push_back(static_cast<mars::FeatureId>(j));
    if (fs.size() > max_conditions) continue;
    std::vector<std::vector<std::vector<ValueIndex>>> options;
    for (auto j : fs) options.push_back(proper_subsets(d.feature(j).size()));
    std::vector<std::size_t> idx(fs.size(), 0);
    for (;;) {
      std::vector<mars::Condition> conds;
      for (std::size_t k = 0; k < fs.size(); ++k) conds.emplace_back(fs[k], options[k][idx[k]]);
      out.emplace_back(std::move(conds));
      std::size_t k = 0;
      while (k < fs.size() && ++idx[k] == options[k].size()) idx[k++] = 0;
      if (k == fs.size()) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// All sets of at most two distinct rules, each sorted.
inline std::vector<RuleSet> all_rule_sets(const std::vector<Rule>& rules) {
  std::vector<RuleSet> out;
  out.push_back({});
  for (std::size_t a = 0; a < rules.size(); ++a) {
    out.push_back({rules[a]});
    for (std::size_t b = a + 1; b < rules.size(); ++b) out.push_back({rules[a], rules[b]});
  }
  return out;
}

struct MapResult {
  RuleSet rules;
  double score = -std::numeric_limits<double>::infinity();
};

inline MapResult exhaustive_map(const Dataset& d, const Hyperparams& h, std::size_t max_conditions = 2) {
  MapResult best;
  for (auto& rs : all_rule_sets(all_rules(d, max_conditions))) {
    const double s = posterior(rs, d, h);
    if (s > best.score) best = {rs, s};
  }
  return best;
}

}  // namespace oracle
