#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "mars/dataset.hpp"
#include "mars/row_set.hpp"

namespace mars {

/// A feature with a set of interchangeable values; satisfied when the
/// row's value is in the set. `values` is kept sorted and unique.
struct Condition {
  FeatureId feature = 0;
  std::vector<ValueIndex> values;

  Condition() = default;
  Condition(FeatureId f, std::vector<ValueIndex> vs);

  bool contains(ValueIndex v) const noexcept;
  std::size_t size() const noexcept { return values.size(); }

  friend auto operator<=>(const Condition&, const Condition&) = default;
  friend bool operator==(const Condition&, const Condition&) = default;
};

/// Conjunction of conditions, at most one per feature, ordered by feature.
/// Adding a condition on a feature already present merges the value sets
/// (items of the same feature form one condition).
class Rule {
 public:
  Rule() = default;
  explicit Rule(std::vector<Condition> conditions);

  const std::vector<Condition>& conditions() const noexcept { return conditions_; }
  std::size_t size() const noexcept { return conditions_.size(); }
  bool empty() const noexcept { return conditions_.empty(); }

  const Condition* find(FeatureId f) const noexcept;
  bool has_feature(FeatureId f) const noexcept { return find(f) != nullptr; }

  void add(Condition c);
  bool erase(FeatureId f);
  /// Adds one value to the condition on `f`, creating it if absent.
  void add_value(FeatureId f, ValueIndex v);

  /// L_m: total number of (feature, value) items.
  std::size_t item_count() const noexcept;

  bool covers(std::span<const ValueIndex> row) const noexcept;

  friend auto operator<=>(const Rule&, const Rule&) = default;
  friend bool operator==(const Rule&, const Rule&) = default;

 private:
  std::vector<Condition> conditions_;
};

using RuleSet = std::vector<Rule>;

/// 1 iff some rule covers the row; the empty set never fires.
int classify(const RuleSet& rules, std::span<const ValueIndex> row) noexcept;

/// Index of the first rule covering the row, or -1.
int first_covering_rule(const RuleSet& rules, std::span<const ValueIndex> row) noexcept;

RowSet coverage(const Condition& c, const Dataset& data);
RowSet coverage(const Rule& r, const Dataset& data);
/// Union coverage of the rule set (rows classified positive).
RowSet coverage(const RuleSet& rules, const Dataset& data);
inline std::size_t support(const Rule& r, const Dataset& data) { return coverage(r, data).count(); }

/// Canonical form: full-vocabulary conditions removed, rules left empty
/// dropped, rules sorted and deduplicated.
RuleSet normalize(RuleSet rules, std::span<const FeatureSpec> features);

/// Throws std::invalid_argument unless every rule is non-empty, every
/// condition holds between 1 and |vocabulary|-1 values from its feature,
/// and no rule repeats.
void validate(const RuleSet& rules, std::span<const FeatureSpec> features);
bool is_valid(const RuleSet& rules, std::span<const FeatureSpec> features) noexcept;

/// Size measures of a model: rule count, total items Σ_m Σ_j |V_mj|,
/// and the number of distinct features used.
struct ModelSize {
  std::size_t n_rules = 0;
  std::size_t n_conditions = 0;
  std::size_t n_features = 0;
};
ModelSize measure(const RuleSet& rules);

}  // namespace mars
