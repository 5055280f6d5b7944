#include "mars/dataset.hpp"

#include <algorithm>
#include <set>

#include "mars/errors.hpp"
#include "mars/table.hpp"

namespace mars {

std::optional<ValueIndex> FeatureSpec::find(std::string_view label) const {
  for (std::size_t i = 0; i < vocabulary.size(); ++i)
    if (vocabulary[i] == label) return static_cast<ValueIndex>(i);
  return std::nullopt;
}

ValueIndex FeatureSpec::encode_number(double x) const {
  const std::size_t n = interval_count();
  if (n == 0) return kUnknownValue;
  // interior edges only: values below the first or above the last clamp
  auto first = edges.begin() + 1;
  auto last = edges.end() - 1;
  return static_cast<ValueIndex>(std::upper_bound(first, last, x) - first);
}

ValueIndex FeatureSpec::encode(std::string_view raw) const {
  if (kind == FeatureKind::kNumeric && raw != "?" && !raw.empty()) {
    if (auto x = parse_number(raw)) return encode_number(*x);
  }
  if (raw == "?" || raw.empty()) {
    if (auto idx = find(kMissingLabel)) return *idx;
    return kUnknownValue;
  }
  if (auto idx = find(raw)) return *idx;
  if (auto idx = find(kMissingLabel)) return *idx;
  return kUnknownValue;
}

void FeatureSpec::validate() const {
  if (vocabulary.empty()) throw InputError("feature '" + name + "' has an empty vocabulary");
  if (vocabulary.size() >= kUnknownValue) throw InputError("feature '" + name + "' has too many values");
  std::set<std::string_view> seen;
  for (const auto& v : vocabulary)
    if (!seen.insert(v).second) throw InputError("feature '" + name + "' has duplicate value '" + v + "'");
  if (kind == FeatureKind::kNumeric) {
    if (edges.size() < 2) throw InputError("numeric feature '" + name + "' needs at least one interval");
    for (std::size_t i = 1; i < edges.size(); ++i)
      if (!(edges[i - 1] < edges[i])) throw InputError("numeric feature '" + name + "' has unordered edges");
    if (vocabulary.size() < interval_count()) throw InputError("numeric feature '" + name + "' vocabulary too short");
  }
}

Dataset::Dataset(std::vector<FeatureSpec> features, std::vector<ValueIndex> cells, std::vector<std::uint8_t> labels)
    : features_(std::move(features)), cells_(std::move(cells)), labels_(std::move(labels)) {
  const std::size_t n = labels_.size();
  const std::size_t j_count = features_.size();
  if (cells_.size() != n * j_count) throw std::invalid_argument("dataset: cell count does not match rows × features");
  for (std::size_t j = 0; j < j_count; ++j) {
    features_[j].id = static_cast<FeatureId>(j);
    features_[j].validate();
  }

  offsets_.resize(j_count + 1, 0);
  for (std::size_t j = 0; j < j_count; ++j) offsets_[j + 1] = offsets_[j] + features_[j].size();
  value_rows_.assign(offsets_.back(), RowSet(n));
  positives_ = RowSet(n);

  for (std::size_t r = 0; r < n; ++r) {
    if (labels_[r] > 1) throw std::invalid_argument("dataset: labels must be 0 or 1");
    if (labels_[r]) {
      ++n_pos_;
      positives_.set(r);
    }
    for (std::size_t j = 0; j < j_count; ++j) {
      const ValueIndex v = cells_[r * j_count + j];
      if (v >= features_[j].size())
        throw std::invalid_argument("dataset: row " + std::to_string(r) + " has out-of-vocabulary value for '" +
                                    features_[j].name + "'");
      value_rows_[offsets_[j] + v].set(r);
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<ValueIndex> cells;
  cells.reserve(rows.size() * features_.size());
  std::vector<std::uint8_t> labels;
  labels.reserve(rows.size());
  for (std::size_t r : rows) {
    auto src = row(r);
    cells.insert(cells.end(), src.begin(), src.end());
    labels.push_back(labels_.at(r));
  }
  return Dataset(features_, std::move(cells), std::move(labels));
}

}  // namespace mars
