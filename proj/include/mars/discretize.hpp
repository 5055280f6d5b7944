#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mars/dataset.hpp"
#include "mars/table.hpp"

namespace mars {

enum class Binning { kEqualWidth, kEqualFrequency };

struct DiscretizeOptions {
  std::string label = "label";
  std::size_t n_bins = 10;
  Binning binning = Binning::kEqualWidth;
  /// Raw label value treated as positive; inferred when unset.
  std::optional<std::string> positive;
};

/// How raw label text maps to {0, 1}.
struct LabelCoding {
  std::string column;
  std::string positive;
  std::string negative;
};

struct Discretized {
  Dataset data;
  LabelCoding labels;
};

/// Turns a raw table into a Dataset. Numeric columns (every non-missing
/// cell parses as a finite number) are cut into intervals over the observed
/// range; other columns keep their observed values in order of first
/// appearance. "?" and empty cells become ⟨missing⟩.
///
/// Throws InputError for a missing or non-binary label column, a column
/// with a single distinct value, or n_bins < 2; DegenerateLabelsError when
/// only one label value occurs.
Discretized discretize(const RawTable& table, const DiscretizeOptions& options);

/// Learns the bins for one numeric column.
std::vector<double> bin_edges(std::span<const double> values, std::size_t n_bins, Binning binning);

/// Rows of a table encoded against previously learned features, for
/// prediction and hold-out evaluation. `labels` is empty when the table
/// was encoded without a label coding.
struct EncodedTable {
  std::size_t n_features = 0;
  std::vector<ValueIndex> cells;
  std::vector<std::uint8_t> labels;

  std::size_t n_rows() const noexcept { return n_features ? cells.size() / n_features : 0; }
  std::span<const ValueIndex> row(std::size_t n) const noexcept {
    return {cells.data() + n * n_features, n_features};
  }
};

/// Encodes `table` column-by-name. Throws FeatureMismatchError listing any
/// feature columns the table lacks; InputError for bad label cells.
EncodedTable encode(const RawTable& table, std::span<const FeatureSpec> features, const LabelCoding* labels = nullptr);

EncodedTable encode(const Dataset& data);

}  // namespace mars
