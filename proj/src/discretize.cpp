#include "mars/discretize.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "mars/errors.hpp"

namespace mars {
namespace {

bool is_missing(const std::string& s) { return s.empty() || s == "?"; }

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string interval_label(double lo, double hi, bool closed) {
  return "[" + format_number(lo) + "," + format_number(hi) + (closed ? "]" : ")");
}

LabelCoding infer_labels(const RawTable& table, std::size_t col, const DiscretizeOptions& opt) {
  std::vector<std::string> distinct;
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    const auto& v = table.rows[r][col];
    if (is_missing(v))
      throw InputError("row " + std::to_string(r + 1) + ": missing value in label column '" + opt.label + "'");
    if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) distinct.push_back(v);
  }
  if (distinct.size() > 2)
    throw InputError("label column '" + opt.label + "' is not binary (" + std::to_string(distinct.size()) +
                     " distinct values)");

  LabelCoding coding{opt.label, {}, {}};
  if (opt.positive) {
    coding.positive = *opt.positive;
    if (!distinct.empty() && std::find(distinct.begin(), distinct.end(), coding.positive) == distinct.end() &&
        distinct.size() == 2)
      throw InputError("positive label '" + coding.positive + "' does not occur in column '" + opt.label + "'");
  } else {
    static const char* kPositiveWords[] = {"1", "true", "yes", "y", "pos", "positive", "+"};
    for (const auto& d : distinct)
      for (const char* w : kPositiveWords)
        if (lower(d) == w && coding.positive.empty()) coding.positive = d;
    if (coding.positive.empty() && distinct.size() == 2) {
      auto a = parse_number(distinct[0]);
      auto b = parse_number(distinct[1]);
      if (!a || !b)
        throw InputError("cannot tell which value of label column '" + opt.label + "' is positive; pass --positive");
      coding.positive = *a > *b ? distinct[0] : distinct[1];
    }
  }
  for (const auto& d : distinct)
    if (d != coding.positive) coding.negative = d;
  if (distinct.size() < 2)
    throw DegenerateLabelsError("label column '" + opt.label + "' has a single class");
  return coding;
}

}  // namespace

std::vector<double> bin_edges(std::span<const double> values, std::size_t n_bins, Binning binning) {
  if (values.empty()) return {};
  auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn_it;
  const double hi = *mx_it;
  std::vector<double> edges{lo};
  if (binning == Binning::kEqualWidth) {
    for (std::size_t i = 1; i < n_bins; ++i) {
      const double e = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_bins);
      if (e > edges.back() && e < hi) edges.push_back(e);
    }
  } else {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < n_bins; ++i) {
      const double e = sorted[i * sorted.size() / n_bins];
      if (e > edges.back() && e < hi) edges.push_back(e);
    }
  }
  edges.push_back(hi);
  return edges;
}

Discretized discretize(const RawTable& table, const DiscretizeOptions& opt) {
  if (opt.n_bins < 2) throw InputError("number of bins must be at least 2");
  const auto label_col = table.column(opt.label);
  if (!label_col) throw InputError("label column '" + opt.label + "' not found in header");
  if (table.n_rows() == 0) throw InputError("table has no data rows");
  const LabelCoding coding = infer_labels(table, *label_col, opt);

  const std::size_t n = table.n_rows();
  std::vector<FeatureSpec> features;
  std::vector<std::vector<ValueIndex>> columns;

  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    if (c == *label_col) continue;
    FeatureSpec spec;
    spec.name = table.header[c];
    std::vector<ValueIndex> col(n);

    bool numeric = true;
    bool any_missing = false;
    std::vector<double> numbers;
    numbers.reserve(n);
    for (std::size_t r = 0; r < n && numeric; ++r) {
      const auto& cell = table.rows[r][c];
      if (is_missing(cell)) {
        any_missing = true;
        continue;
      }
      auto x = parse_number(cell);
      if (!x || !std::isfinite(*x)) numeric = false;
      else numbers.push_back(*x);
    }
    numeric = numeric && !numbers.empty();

    if (numeric) {
      spec.kind = FeatureKind::kNumeric;
      spec.edges = bin_edges(numbers, opt.n_bins, opt.binning);
      if (spec.edges.front() == spec.edges.back())
        throw InputError("column '" + spec.name + "' has a single distinct value");
      for (std::size_t i = 0; i + 1 < spec.edges.size(); ++i)
        spec.vocabulary.push_back(interval_label(spec.edges[i], spec.edges[i + 1], i + 2 == spec.edges.size()));
      if (any_missing) spec.vocabulary.emplace_back(kMissingLabel);
      for (std::size_t r = 0; r < n; ++r) {
        const auto& cell = table.rows[r][c];
        col[r] = is_missing(cell) ? static_cast<ValueIndex>(spec.vocabulary.size() - 1)
                                  : spec.encode_number(*parse_number(cell));
      }
    } else {
      spec.kind = FeatureKind::kCategorical;
      std::map<std::string, ValueIndex> index;
      for (std::size_t r = 0; r < n; ++r) {
        const std::string key = is_missing(table.rows[r][c]) ? std::string(kMissingLabel) : table.rows[r][c];
        auto [it, inserted] = index.try_emplace(key, static_cast<ValueIndex>(spec.vocabulary.size()));
        if (inserted) {
          if (spec.vocabulary.size() + 1 >= kUnknownValue)
            throw InputError("column '" + spec.name + "' has too many distinct values");
          spec.vocabulary.push_back(key);
        }
        col[r] = it->second;
      }
      if (spec.vocabulary.size() < 2) throw InputError("column '" + spec.name + "' has a single distinct value");
    }
    features.push_back(std::move(spec));
    columns.push_back(std::move(col));
  }
  if (features.empty()) throw InputError("table has no feature columns besides the label");

  const std::size_t j_count = features.size();
  std::vector<ValueIndex> cells(n * j_count);
  std::vector<std::uint8_t> labels(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < j_count; ++j) cells[r * j_count + j] = columns[j][r];
    labels[r] = table.rows[r][*label_col] == coding.positive ? 1 : 0;
  }
  return Discretized{Dataset(std::move(features), std::move(cells), std::move(labels)), coding};
}

EncodedTable encode(const RawTable& table, std::span<const FeatureSpec> features, const LabelCoding* labels) {
  std::vector<std::size_t> cols;
  std::string missing;
  for (const auto& f : features) {
    if (auto c = table.column(f.name)) cols.push_back(*c);
    else missing += (missing.empty() ? "" : ", ") + f.name;
  }
  std::optional<std::size_t> label_col;
  if (labels) {
    label_col = table.column(labels->column);
    if (!label_col) missing += (missing.empty() ? "" : ", ") + labels->column;
  }
  if (!missing.empty()) throw FeatureMismatchError("missing columns: " + missing);

  EncodedTable out;
  out.n_features = features.size();
  out.cells.reserve(table.n_rows() * features.size());
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    for (std::size_t j = 0; j < features.size(); ++j) out.cells.push_back(features[j].encode(table.rows[r][cols[j]]));
    if (label_col) {
      const auto& v = table.rows[r][*label_col];
      if (v == labels->positive) out.labels.push_back(1);
      else if (v == labels->negative || labels->negative.empty()) out.labels.push_back(0);
      else throw InputError("row " + std::to_string(r + 1) + ": unexpected label value '" + v + "'");
    }
  }
  return out;
}

EncodedTable encode(const Dataset& data) {
  return EncodedTable{data.n_features(), data.cells(), data.labels()};
}

}  // namespace mars
