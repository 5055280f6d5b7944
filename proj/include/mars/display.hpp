#pragma once

#include <span>
#include <string>

#include "mars/dataset.hpp"
#include "mars/rules.hpp"

namespace mars {

/// "[state = CA or TX]" for categorical features; numeric conditions list
/// their intervals with adjacent ones merged: "[age ∈ [0,30) ∪ [40,50)]".
std::string format_condition(const Condition& c, const FeatureSpec& f);

/// Conditions joined by " AND ".
std::string format_rule(const Rule& r, std::span<const FeatureSpec> features);

/// One line per rule, "rule <k>: ...". Says so when the set is empty.
std::string format_rule_set(const RuleSet& rules, std::span<const FeatureSpec> features);

}  // namespace mars
