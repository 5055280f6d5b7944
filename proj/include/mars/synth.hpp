#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mars/discretize.hpp"
#include "mars/hyperparams.hpp"
#include "mars/inference.hpp"
#include "mars/rules.hpp"
#include "mars/table.hpp"

namespace mars {

/// Planted-rule synthetic data: uniform [0,1] features, labels given by an
/// OR of conjunctions of per-feature ranges.
struct SynthSpec {
  std::size_t n_rows = 5000;
  std::size_t n_features = 15;
  std::size_t n_rules = 3;
  std::size_t max_conditions = 4;
  std::uint64_t seed = 0;
  /// Range endpoints are rounded to multiples of 1/snap so the planted rules
  /// line up with a snap-bin equal-width grid; 0 keeps them continuous.
  std::size_t snap = 10;
};

struct PlantedCondition {
  std::size_t feature = 0;
  double lo = 0.0;
  double hi = 1.0;
};

struct PlantedRule {
  std::vector<PlantedCondition> conditions;
  bool covers(std::span<const double> x) const noexcept;
};

struct SynthData {
  RawTable table;                  // columns x0..x{J-1}, label
  std::vector<double> values;      // row-major n_rows × n_features
  std::vector<std::uint8_t> labels;
  std::vector<PlantedRule> truth;
  std::size_t regenerated = 0;     // planted rules redrawn for covering no row or every row

  std::span<const double> row(std::size_t n, std::size_t n_features) const {
    return {values.data() + n * n_features, n_features};
  }
};

SynthData generate(const SynthSpec& spec);

/// Distinct features used by the planted rules.
std::size_t planted_feature_count(const std::vector<PlantedRule>& truth);

struct SweepSpec {
  /// Applied to beta_M and beta_L as a cross product.
  std::vector<double> beta_grid{1.0, 100.0, 10000.0};
  double train_fraction = 0.75;
  std::size_t replicates = 5;
  std::size_t n_bins = 10;
  std::size_t threads = 1;
};

struct SweepRow {
  double beta_M = 0.0;
  double beta_L = 0.0;
  std::size_t replicate = 0;
  double holdout_error = 0.0;
  double train_error = 0.0;
  std::size_t n_conditions = 0;
  std::size_t n_features = 0;
  double wall_time_s = 0.0;
};

struct CellSummary {
  double beta_M = 0.0;
  double beta_L = 0.0;
  double holdout_error = 0.0;
  double train_error = 0.0;
  double n_conditions = 0.0;
  double n_features = 0.0;
};

/// One train/test experiment: split, discretize on the training part,
/// learn, and measure.
struct TrialResult {
  RuleSet rules;
  Score score;
  double holdout_error = 0.0;
  double train_error = 0.0;
  ModelSize size;
};
TrialResult run_trial(const SynthData& data, double train_fraction, std::size_t n_bins, const Hyperparams& h,
                      const SearchConfig& cfg, std::uint64_t split_seed);

/// Every (beta_M, beta_L) cell for every replicate. Replicate r uses the
/// same data, split and search seed in every cell.
std::vector<SweepRow> sweep(const SynthSpec& spec, const SweepSpec& grid, const Hyperparams& base,
                            const SearchConfig& cfg);

/// Per-cell means over replicates, in grid order.
std::vector<CellSummary> summarize(const std::vector<SweepRow>& rows);

/// Columns: beta_M, beta_L, replicate, holdout_error, n_conditions,
/// n_features, wall_time_s.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

double error_rate(const RuleSet& rules, const EncodedTable& table);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace mars
