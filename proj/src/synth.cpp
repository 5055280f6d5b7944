#include "mars/synth.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

namespace mars {

bool PlantedRule::covers(std::span<const double> x) const noexcept {
  for (const auto& c : conditions)
    if (!(x[c.feature] >= c.lo && x[c.feature] < c.hi)) return false;
  return true;
}

namespace {

PlantedRule draw_rule(Rng& rng, const SynthSpec& spec) {
  const std::size_t k = uniform_int<std::size_t>(rng, 1, std::min(spec.max_conditions, spec.n_features));
  std::vector<std::size_t> feats(spec.n_features);
  std::iota(feats.begin(), feats.end(), std::size_t{0});
  PlantedRule r;
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(feats[i], feats[uniform_int<std::size_t>(rng, i, feats.size() - 1)]);
    double a = 0.0, b = 0.0;
    while (!(a < b)) {
      a = uniform01(rng);
      b = uniform01(rng);
      if (a > b) std::swap(a, b);
      if (spec.snap > 0) {
        const double g = static_cast<double>(spec.snap);
        a = std::round(a * g) / g;
        b = std::round(b * g) / g;
      }
    }
    r.conditions.push_back({feats[i], a, b});
  }
  std::sort(r.conditions.begin(), r.conditions.end(),
            [](const PlantedCondition& p, const PlantedCondition& q) { return p.feature < q.feature; });
  return r;
}

}  // namespace

SynthData generate(const SynthSpec& spec) {
  if (spec.n_rows == 0 || spec.n_features == 0 || spec.n_rules == 0 || spec.max_conditions == 0)
    throw std::invalid_argument("synthetic spec sizes must be positive");
  Rng rng(spec.seed);
  SynthData d;
  const std::size_t n = spec.n_rows;
  const std::size_t j_count = spec.n_features;
  d.values.resize(n * j_count);
  for (double& v : d.values) v = uniform01(rng);

  auto rule_support = [&](const PlantedRule& r) {
    std::size_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += r.covers(d.row(i, j_count)) ? 1 : 0;
    return s;
  };
  for (std::size_t m = 0; m < spec.n_rules; ++m) {
    PlantedRule r = draw_rule(rng, spec);
    for (std::size_t s = rule_support(r); s == 0 || s == n; s = rule_support(r)) {
      ++d.regenerated;
      r = draw_rule(rng, spec);
    }
    d.truth.push_back(std::move(r));
  }

  d.labels.resize(n);
  d.table.header.reserve(j_count + 1);
  for (std::size_t j = 0; j < j_count; ++j) d.table.header.push_back("x" + std::to_string(j));
  d.table.header.emplace_back("label");
  d.table.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = d.row(i, j_count);
    bool y = false;
    for (const auto& r : d.truth) y = y || r.covers(x);
    d.labels[i] = y ? 1 : 0;
    std::vector<std::string> cells;
    cells.reserve(j_count + 1);
    for (double v : x) cells.push_back(format_number(v));
    cells.emplace_back(y ? "1" : "0");
    d.table.rows.push_back(std::move(cells));
  }
  return d;
}

std::size_t planted_feature_count(const std::vector<PlantedRule>& truth) {
  std::set<std::size_t> used;
  for (const auto& r : truth)
    for (const auto& c : r.conditions) used.insert(c.feature);
  return used.size();
}

double error_rate(const RuleSet& rules, const EncodedTable& table) {
  const std::size_t n = table.n_rows();
  if (n == 0) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (classify(rules, table.row(i)) != table.labels[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(n);
}

TrialResult run_trial(const SynthData& data, double train_fraction, std::size_t n_bins, const Hyperparams& h,
                      const SearchConfig& cfg, std::uint64_t split_seed) {
  const std::size_t n = data.table.n_rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(split_seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_int<std::size_t>(rng, 0, i - 1)]);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) throw std::invalid_argument("train fraction leaves an empty partition");

  RawTable train{data.table.header, {}};
  RawTable test{data.table.header, {}};
  for (std::size_t i = 0; i < n; ++i) (i < n_train ? train : test).rows.push_back(data.table.rows[order[i]]);

  DiscretizeOptions opt;
  opt.label = "label";
  opt.n_bins = n_bins;
  opt.positive = "1";
  Discretized disc = discretize(train, opt);
  const RunResult fit = run(disc.data, h, cfg);

  TrialResult out;
  out.rules = fit.rules;
  out.score = fit.score;
  out.size = measure(fit.rules);
  out.train_error = error_rate(fit.rules, encode(disc.data));
  out.holdout_error = error_rate(fit.rules, encode(test, disc.data.features(), &disc.labels));
  return out;
}

std::vector<SweepRow> sweep(const SynthSpec& spec, const SweepSpec& grid, const Hyperparams& base,
                            const SearchConfig& cfg) {
  if (grid.beta_grid.empty()) throw std::invalid_argument("beta grid must not be empty");
  if (grid.replicates == 0) throw std::invalid_argument("replicates must be positive");

  std::vector<SynthData> datasets;
  for (std::size_t r = 0; r < grid.replicates; ++r) {
    SynthSpec s = spec;
    s.seed = derive_seed(spec.seed, r);
    datasets.push_back(generate(s));
  }

  struct Job {
    std::size_t replicate;
    double beta_M;
    double beta_L;
  };
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < grid.replicates; ++r)
    for (double bm : grid.beta_grid)
      for (double bl : grid.beta_grid) jobs.push_back({r, bm, bl});

  std::vector<SweepRow> rows(jobs.size());
  auto do_job = [&](std::size_t i) {
    const Job& job = jobs[i];
    Hyperparams h = base;
    h.beta_M = job.beta_M;
    h.beta_L = job.beta_L;
    SearchConfig c = cfg;
    c.random_seed = derive_seed(cfg.random_seed, job.replicate);
    c.threads = 1;
    const auto start = std::chrono::steady_clock::now();
    const TrialResult t = run_trial(datasets[job.replicate], grid.train_fraction, grid.n_bins, h, c,
                                    derive_seed(spec.seed ^ 0x5EEDULL, job.replicate));
    const auto stop = std::chrono::steady_clock::now();
    rows[i] = SweepRow{job.beta_M,       job.beta_L,          job.replicate,
                       t.holdout_error,  t.train_error,       t.size.n_conditions,
                       t.size.n_features, std::chrono::duration<double>(stop - start).count()};
  };

  const std::size_t n_threads = std::clamp<std::size_t>(grid.threads, 1, jobs.size());
  if (n_threads == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) do_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs.size());
    {
      std::vector<std::jthread> workers;
      for (std::size_t w = 0; w < n_threads; ++w)
        workers.emplace_back([&] {
          for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
              do_job(i);
            } catch (...) {
              errors[i] = std::current_exception();
            }
          }
        });
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::vector<CellSummary> summarize(const std::vector<SweepRow>& rows) {
  std::vector<CellSummary> cells;
  std::vector<std::size_t> counts;
  for (const auto& r : rows) {
    auto it = std::find_if(cells.begin(), cells.end(),
                           [&](const CellSummary& c) { return c.beta_M == r.beta_M && c.beta_L == r.beta_L; });
    if (it == cells.end()) {
      cells.push_back(CellSummary{r.beta_M, r.beta_L, 0.0, 0.0, 0.0, 0.0});
      counts.push_back(0);
      it = cells.end() - 1;
    }
    const auto k = static_cast<std::size_t>(it - cells.begin());
    it->holdout_error += r.holdout_error;
    it->train_error += r.train_error;
    it->n_conditions += static_cast<double>(r.n_conditions);
    it->n_features += static_cast<double>(r.n_features);
    ++counts[k];
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto c = static_cast<double>(counts[k]);
    cells[k].holdout_error /= c;
    cells[k].train_error /= c;
    cells[k].n_conditions /= c;
    cells[k].n_features /= c;
  }
  return cells;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "beta_M,beta_L,replicate,holdout_error,n_conditions,n_features,wall_time_s\n";
  for (const auto& r : rows)
    out << format_number(r.beta_M) << ',' << format_number(r.beta_L) << ',' << r.replicate << ','
        << format_number(r.holdout_error) << ',' << r.n_conditions << ',' << r.n_features << ','
        << format_number(r.wall_time_s) << '\n';
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t k = i;
    while (k + 1 < idx.size() && v[idx[k + 1]] == v[idx[i]]) ++k;
    const double avg = (static_cast<double>(i) + static_cast<double>(k)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= k; ++t) r[idx[t]] = avg;
    i = k + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman needs two equal-length samples");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace mars
