#include "mars/display.hpp"

#include "mars/table.hpp"

namespace mars {

std::string format_condition(const Condition& c, const FeatureSpec& f) {
  std::string out = "[" + f.name;
  if (f.kind != FeatureKind::kNumeric) {
    out += " = ";
    for (std::size_t i = 0; i < c.values.size(); ++i) {
      if (i) out += " or ";
      out += f.vocabulary.at(c.values[i]);
    }
    return out + "]";
  }

  out += " ∈ ";
  std::string extra;
  bool first = true;
  const std::size_t n_int = f.interval_count();
  for (std::size_t i = 0; i < c.values.size();) {
    const ValueIndex v = c.values[i];
    if (!f.is_interval(v)) {
      extra += " or " + f.vocabulary.at(v);
      ++i;
      continue;
    }
    std::size_t k = i;
    while (k + 1 < c.values.size() && c.values[k + 1] == c.values[k] + 1 && f.is_interval(c.values[k + 1])) ++k;
    const std::size_t last = c.values[k];
    if (!first) out += " ∪ ";
    first = false;
    out += "[" + format_number(f.edges[v]) + "," + format_number(f.edges[last + 1]) + (last + 1 == n_int ? "]" : ")");
    i = k + 1;
  }
  if (first && !extra.empty()) extra.erase(0, 4);
  return out + extra + "]";
}

std::string format_rule(const Rule& r, std::span<const FeatureSpec> features) {
  std::string out;
  for (const auto& c : r.conditions()) {
    if (!out.empty()) out += " AND ";
    out += format_condition(c, features[c.feature]);
  }
  return out;
}

std::string format_rule_set(const RuleSet& rules, std::span<const FeatureSpec> features) {
  if (rules.empty()) return "(no rules: every row is predicted negative)\n";
  std::string out;
  for (std::size_t m = 0; m < rules.size(); ++m)
    out += "rule " + std::to_string(m + 1) + ": " + format_rule(rules[m], features) + "\n";
  return out;
}

}  // namespace mars
