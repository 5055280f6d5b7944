#include "mars/rules.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace mars {

Condition::Condition(FeatureId f, std::vector<ValueIndex> vs) : feature(f), values(std::move(vs)) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
}

bool Condition::contains(ValueIndex v) const noexcept {
  return std::binary_search(values.begin(), values.end(), v);
}

Rule::Rule(std::vector<Condition> conditions) {
  for (auto& c : conditions) add(std::move(c));
}

const Condition* Rule::find(FeatureId f) const noexcept {
  auto it = std::lower_bound(conditions_.begin(), conditions_.end(), f,
                             [](const Condition& c, FeatureId id) { return c.feature < id; });
  return (it != conditions_.end() && it->feature == f) ? &*it : nullptr;
}

void Rule::add(Condition c) {
  auto it = std::lower_bound(conditions_.begin(), conditions_.end(), c.feature,
                             [](const Condition& x, FeatureId id) { return x.feature < id; });
  if (it != conditions_.end() && it->feature == c.feature) {
    std::vector<ValueIndex> merged;
    merged.reserve(it->values.size() + c.values.size());
    std::set_union(it->values.begin(), it->values.end(), c.values.begin(), c.values.end(),
                   std::back_inserter(merged));
    it->values = std::move(merged);
  } else {
    conditions_.insert(it, Condition(c.feature, std::move(c.values)));
  }
}

bool Rule::erase(FeatureId f) {
  auto it = std::find_if(conditions_.begin(), conditions_.end(), [f](const Condition& c) { return c.feature == f; });
  if (it == conditions_.end()) return false;
  conditions_.erase(it);
  return true;
}

void Rule::add_value(FeatureId f, ValueIndex v) { add(Condition(f, {v})); }

std::size_t Rule::item_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : conditions_) n += c.values.size();
  return n;
}

bool Rule::covers(std::span<const ValueIndex> row) const noexcept {
  for (const auto& c : conditions_)
    if (c.feature >= row.size() || !c.contains(row[c.feature])) return false;
  return true;
}

int classify(const RuleSet& rules, std::span<const ValueIndex> row) noexcept {
  return first_covering_rule(rules, row) >= 0 ? 1 : 0;
}

int first_covering_rule(const RuleSet& rules, std::span<const ValueIndex> row) noexcept {
  for (std::size_t m = 0; m < rules.size(); ++m)
    if (rules[m].covers(row)) return static_cast<int>(m);
  return -1;
}

RowSet coverage(const Condition& c, const Dataset& data) {
  RowSet out(data.n_rows());
  for (ValueIndex v : c.values)
    if (v < data.feature(c.feature).size()) out |= data.rows_with(c.feature, v);
  return out;
}

RowSet coverage(const Rule& r, const Dataset& data) {
  RowSet out = data.all_rows();
  for (const auto& c : r.conditions()) out &= coverage(c, data);
  return out;
}

RowSet coverage(const RuleSet& rules, const Dataset& data) {
  RowSet out(data.n_rows());
  for (const auto& r : rules) out |= coverage(r, data);
  return out;
}

RuleSet normalize(RuleSet rules, std::span<const FeatureSpec> features) {
  RuleSet out;
  out.reserve(rules.size());
  for (auto& r : rules) {
    std::vector<Condition> kept;
    kept.reserve(r.size());
    for (const auto& c : r.conditions()) {
      if (c.values.empty()) continue;
      if (c.feature < features.size() && c.values.size() >= features[c.feature].size()) continue;
      kept.push_back(c);
    }
    if (kept.empty()) continue;
    out.emplace_back(std::move(kept));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void validate(const RuleSet& rules, std::span<const FeatureSpec> features) {
  for (std::size_t m = 0; m < rules.size(); ++m) {
    const Rule& r = rules[m];
    const std::string where = "rule " + std::to_string(m);
    if (r.empty()) throw std::invalid_argument(where + " has no conditions");
    for (const auto& c : r.conditions()) {
      if (c.feature >= features.size()) throw std::invalid_argument(where + " references an unknown feature");
      const std::size_t vocab = features[c.feature].size();
      if (c.values.empty() || c.values.size() + 1 > vocab)
        throw std::invalid_argument(where + ": condition on '" + features[c.feature].name + "' holds " +
                                    std::to_string(c.values.size()) + " of " + std::to_string(vocab) + " values");
      if (c.values.back() >= vocab)
        throw std::invalid_argument(where + ": value out of range for '" + features[c.feature].name + "'");
    }
    for (std::size_t k = 0; k < m; ++k)
      if (rules[k] == r) throw std::invalid_argument(where + " duplicates rule " + std::to_string(k));
  }
}

bool is_valid(const RuleSet& rules, std::span<const FeatureSpec> features) noexcept {
  try {
    validate(rules, features);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

ModelSize measure(const RuleSet& rules) {
  ModelSize s;
  s.n_rules = rules.size();
  std::set<FeatureId> used;
  for (const auto& r : rules) {
    s.n_conditions += r.item_count();
    for (const auto& c : r.conditions()) used.insert(c.feature);
  }
  s.n_features = used.size();
  return s;
}

}  // namespace mars
