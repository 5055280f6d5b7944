#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mars/row_set.hpp"

namespace mars {

using FeatureId = std::uint32_t;
using ValueIndex = std::uint16_t;

/// Encoded value for a cell whose raw value is not in the feature's
/// vocabulary. Never a member of any condition, so no rule covers it.
inline constexpr ValueIndex kUnknownValue = std::numeric_limits<ValueIndex>::max();

/// Vocabulary entry used for "?" and other missing cells.
inline constexpr const char* kMissingLabel = "⟨missing⟩";

enum class FeatureKind { kCategorical, kNumeric };

/// One feature and the values it takes. For numeric features
/// `edges` has one more entry than there are intervals; interval i is
/// [edges[i], edges[i+1]) and the last one also includes its upper edge.
/// A numeric feature may carry a trailing ⟨missing⟩ vocabulary entry.
struct FeatureSpec {
  FeatureId id = 0;
  std::string name;
  FeatureKind kind = FeatureKind::kCategorical;
  std::vector<std::string> vocabulary;
  std::vector<double> edges;

  std::size_t size() const noexcept { return vocabulary.size(); }
  std::size_t interval_count() const noexcept { return edges.empty() ? 0 : edges.size() - 1; }
  bool is_interval(ValueIndex v) const noexcept { return kind == FeatureKind::kNumeric && v < interval_count(); }
  std::optional<ValueIndex> find(std::string_view label) const;

  /// Encodes a raw cell. Numeric values outside the training range clamp
  /// into the boundary intervals; unseen categories map to ⟨missing⟩ when
  /// the vocabulary has it, else to kUnknownValue.
  ValueIndex encode(std::string_view raw) const;
  ValueIndex encode_number(double x) const;

  /// Throws InputError when the vocabulary is empty or has duplicates,
  /// or numeric edges are not strictly increasing.
  void validate() const;
};

/// Immutable discretized training data with binary labels. Row-major cell
/// storage plus a per-(feature, value) row bitmap used by the scorer.
class Dataset {
 public:
  Dataset(std::vector<FeatureSpec> features, std::vector<ValueIndex> cells, std::vector<std::uint8_t> labels);

  std::size_t n_rows() const noexcept { return labels_.size(); }
  std::size_t n_features() const noexcept { return features_.size(); }
  std::size_t n_pos() const noexcept { return n_pos_; }
  std::size_t n_neg() const noexcept { return labels_.size() - n_pos_; }

  const std::vector<FeatureSpec>& features() const noexcept { return features_; }
  const FeatureSpec& feature(FeatureId j) const { return features_.at(j); }

  std::span<const ValueIndex> row(std::size_t n) const noexcept {
    return {cells_.data() + n * features_.size(), features_.size()};
  }
  ValueIndex value(std::size_t n, FeatureId j) const noexcept { return cells_[n * features_.size() + j]; }
  bool label(std::size_t n) const noexcept { return labels_[n] != 0; }
  const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }
  const std::vector<ValueIndex>& cells() const noexcept { return cells_; }

  /// Rows whose feature j takes value v.
  const RowSet& rows_with(FeatureId j, ValueIndex v) const { return value_rows_[offsets_[j] + v]; }
  const RowSet& positives() const noexcept { return positives_; }
  RowSet all_rows() const { return RowSet(n_rows(), true); }

  /// The listed rows, in order, as a new dataset with the same feature specs.
  Dataset subset(std::span<const std::size_t> rows) const;

 private:
  std::vector<FeatureSpec> features_;
  std::vector<ValueIndex> cells_;
  std::vector<std::uint8_t> labels_;
  std::size_t n_pos_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<RowSet> value_rows_;
  RowSet positives_;
};

}  // namespace mars
