#include "mars/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "mars/errors.hpp"

namespace mars {

void SearchConfig::validate() const {
  if (n_iter == 0) throw std::invalid_argument("n_iter must be positive");
  if (!(t0 > 1.0)) throw std::invalid_argument("t0 must exceed 1");
  if (!(explore_prob >= 0.0 && explore_prob <= 1.0)) throw std::invalid_argument("explore_prob must lie in [0, 1]");
  if (neighbor_budget == 0) throw std::invalid_argument("neighbor_budget must be positive");
}

double temperature(std::size_t t, std::size_t n_iter, double t0) {
  if (t >= n_iter) return 1.0;
  return std::pow(t0, 1.0 - static_cast<double>(t) / static_cast<double>(n_iter));
}

double acceptance_probability(double delta, double temperature) {
  if (delta >= 0.0) return 1.0;
  return std::exp(delta / temperature);
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::kAddValue: return "add_value";
    case Action::kRemoveCondition: return "remove_condition";
    case Action::kAddRule: return "add_rule";
    case Action::kAddCondition: return "add_condition";
    case Action::kRemoveRule: return "remove_rule";
  }
  return "?";
}

// ---------------------------------------------------------------------------

CoverageIndex::CoverageIndex(const RuleSet& rules, const Dataset& data)
    : counts_(data.n_rows(), 0), union_(data.n_rows()) {
  per_rule_.reserve(rules.size());
  for (const auto& r : rules) {
    per_rule_.push_back(coverage(r, data));
    per_rule_.back().for_each([&](std::size_t row) { ++counts_[row]; });
    union_ |= per_rule_.back();
  }
}

CoverDelta CoverageIndex::replace(const RuleSet& current, const RuleSet& next, const Dataset& data) {
  CoverDelta delta{RowSet(data.n_rows()), RowSet(data.n_rows())};
  std::vector<RowSet> next_cov;
  next_cov.reserve(next.size());
  // both sides are normalized (sorted), so a merge finds kept/dropped/added rules
  std::size_t i = 0;
  std::size_t k = 0;
  while (i < current.size() || k < next.size()) {
    if (k == next.size() || (i < current.size() && current[i] < next[k])) {
      per_rule_[i].for_each([&](std::size_t row) {
        if (--counts_[row] == 0) delta.leaving.set(row);
      });
      ++i;
    } else if (i == current.size() || next[k] < current[i]) {
      next_cov.push_back(coverage(next[k], data));
      next_cov.back().for_each([&](std::size_t row) {
        if (counts_[row]++ == 0) delta.entering.set(row);
      });
      ++k;
    } else {
      next_cov.push_back(std::move(per_rule_[i]));
      ++i;
      ++k;
    }
  }
  // a row may drop to zero and come back within one replace
  RowSet both = delta.entering;
  both &= delta.leaving;
  delta.entering.subtract(both);
  delta.leaving.subtract(both);
  per_rule_ = std::move(next_cov);
  union_ |= delta.entering;
  union_.subtract(delta.leaving);
  return delta;
}

bool CoverageIndex::consistent_with(const RuleSet& rules, const Dataset& data) const {
  CoverageIndex fresh(rules, data);
  return fresh.per_rule_ == per_rule_ && fresh.counts_ == counts_ && fresh.union_ == union_;
}

std::string RunLog::to_jsonl() const {
  std::string out;
  for (const auto& e : events) {
    out += e.dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Random subset of `pool` of size in [1, pool.size()] that always contains `must`
// when given. `pool` excludes `must`.
std::vector<ValueIndex> random_values(Rng& rng, std::vector<ValueIndex> pool, std::size_t max_size,
                                      std::optional<ValueIndex> must) {
  std::vector<ValueIndex> out;
  std::size_t target = uniform_int<std::size_t>(rng, 1, std::max<std::size_t>(1, max_size));
  if (must) {
    out.push_back(*must);
    --target;
  }
  for (std::size_t i = 0; i < target && i < pool.size(); ++i) {
    const std::size_t pick = uniform_int<std::size_t>(rng, i, pool.size() - 1);
    std::swap(pool[i], pool[pick]);
    out.push_back(pool[i]);
  }
  return out;
}

// Values of feature j whose rows inside `scope` hold at least as many `good`
// rows as other rows (and at least one good row).
std::vector<ValueIndex> favoured_values(const Dataset& data, FeatureId j, const RowSet& scope, const RowSet& good) {
  std::vector<ValueIndex> out;
  RowSet tmp(data.n_rows());
  for (ValueIndex v = 0; v < data.feature(j).size(); ++v) {
    tmp = scope;
    tmp &= data.rows_with(j, v);
    const std::size_t g = tmp.count_and(good);
    if (g > 0 && 2 * g >= tmp.count()) out.push_back(v);
  }
  return out;
}

RowSet rows_matching(const Dataset& data, FeatureId j, std::span<const ValueIndex> values) {
  RowSet rows(data.n_rows());
  for (ValueIndex v : values) rows |= data.rows_with(j, v);
  return rows;
}

nlohmann::json cap_json(std::size_t cap) {
  return cap == BoundState::kNoCap ? nlohmann::json(nullptr) : nlohmann::json(cap);
}

}  // namespace

Searcher::Searcher(const Dataset& data, const Hyperparams& h, SearchConfig cfg)
    : data_(data), h_(h.resolved(data.n_features())), cfg_(cfg) {
  cfg_.validate();
  h_.validate(data.n_features());
  for (FeatureId j = 0; j < data.n_features(); ++j)
    if (data.feature(j).size() >= 2) usable_features_.push_back(j);
}

Score Searcher::evaluate(const RuleSet& rules) const {
  return make_score(log_prior(rules, h_, data_.features()), confusion_counts(rules, data_), h_);
}

RuleSet Searcher::random_rule_set(Rng& rng) const {
  if (usable_features_.empty()) return {};
  std::size_t n_rules = uniform_int<std::size_t>(rng, 1, 3);
  if (cfg_.max_rules) n_rules = std::min(n_rules, cfg_.max_rules);
  std::size_t cond_cap = std::min<std::size_t>(3, usable_features_.size());
  if (cfg_.max_conditions) cond_cap = std::min(cond_cap, cfg_.max_conditions);

  RuleSet rules;
  for (std::size_t m = 0; m < n_rules; ++m) {
    const std::size_t n_cond = uniform_int<std::size_t>(rng, 1, cond_cap);
    std::vector<FeatureId> feats = usable_features_;
    Rule r;
    for (std::size_t k = 0; k < n_cond; ++k) {
      const std::size_t pick = uniform_int<std::size_t>(rng, k, feats.size() - 1);
      std::swap(feats[k], feats[pick]);
      const FeatureId j = feats[k];
      std::vector<ValueIndex> pool(data_.feature(j).size());
      std::iota(pool.begin(), pool.end(), ValueIndex{0});
      r.add(Condition(j, random_values(rng, std::move(pool), data_.feature(j).size() - 1, std::nullopt)));
    }
    rules.push_back(std::move(r));
  }
  return normalize(std::move(rules), data_.features());
}

SearchState Searcher::init(std::uint64_t seed, std::size_t chain, RunLog* log) const {
  if (data_.n_pos() == 0 || data_.n_neg() == 0)
    throw DegenerateLabelsError("training data must contain both positive and negative examples");
  SearchState s;
  s.chain = chain;
  s.rng.seed(seed);
  s.current = random_rule_set(s.rng);
  s.current_score = evaluate(s.current);
  s.coverage = CoverageIndex(s.current, data_);
  s.best = s.current;
  s.best_score = s.current_score;
  s.bounds = make_bounds(data_, h_);
  s.bounds = update_bounds(s.bounds, s.current_score.log_posterior);
  if (log) {
    if (!s.bounds.enabled) log->add({{"event", "bounds_disabled"}, {"chain", chain}, {"notices", s.bounds.notices}});
    log->add({{"event", "start"},
              {"chain", chain},
              {"seed", seed},
              {"upsilon", s.bounds.upsilon},
              {"support_base", s.bounds.support_base},
              {"log_omega", s.bounds.log_omega},
              {"log_Lstar", s.bounds.log_Lstar},
              {"log_prior_empty", s.bounds.log_prior_empty}});
    log_improvement(s, log);
  }
  return s;
}

std::optional<Example> Searcher::sample_misclassified(SearchState& s) const {
  RowSet wrong = s.coverage.covered();
  wrong ^= data_.positives();
  const std::size_t n_wrong = wrong.count();
  if (n_wrong == 0) return std::nullopt;
  const std::size_t row = wrong.nth(uniform_int<std::size_t>(s.rng, 0, n_wrong - 1));
  return Example{row, data_.label(row)};
}

std::vector<RuleSet> Searcher::neighbors(SearchState& s, const Example& ex, Action a) const {
  const RuleSet& cur = s.current;
  const auto x = data_.row(ex.row);
  std::vector<RuleSet> out;
  auto emit = [&](RuleSet rs) {
    rs = normalize(std::move(rs), data_.features());
    if (rs != cur) out.push_back(std::move(rs));
  };

  switch (a) {
    case Action::kAddValue: {
      // prefer adding the example's own value; fall back to any missing value
      for (int pass = 0; pass < 2 && out.empty(); ++pass) {
        for (std::size_t m = 0; m < cur.size(); ++m) {
          for (const auto& c : cur[m].conditions()) {
            const std::size_t vocab = data_.feature(c.feature).size();
            for (ValueIndex v = 0; v < vocab; ++v) {
              if (c.contains(v)) continue;
              if (pass == 0 && v != x[c.feature]) continue;
              RuleSet rs = cur;
              rs[m].add_value(c.feature, v);
              emit(std::move(rs));
            }
          }
        }
      }
      break;
    }
    case Action::kRemoveCondition: {
      for (std::size_t m = 0; m < cur.size(); ++m) {
        if (cur[m].size() < 2) continue;
        for (const auto& c : cur[m].conditions()) {
          RuleSet rs = cur;
          rs[m].erase(c.feature);
          emit(std::move(rs));
        }
      }
      break;
    }
    case Action::kAddRule: {
      if (cfg_.max_rules && cur.size() >= cfg_.max_rules) break;
      if (s.bounds.m_cap != BoundState::kNoCap && cur.size() >= s.bounds.m_cap) break;
      std::vector<FeatureId> feats;
      for (FeatureId j : usable_features_)
        if (x[j] < data_.feature(j).size()) feats.push_back(j);
      if (feats.empty()) break;
      std::size_t cond_cap = std::min<std::size_t>(3, feats.size());
      if (cfg_.max_conditions) cond_cap = std::min(cond_cap, cfg_.max_conditions);
      for (std::size_t attempt = 0; attempt < cfg_.neighbor_budget; ++attempt) {
        const std::size_t n_cond = uniform_int<std::size_t>(s.rng, 1, cond_cap);
        Rule r;
        for (std::size_t k = 0; k < n_cond; ++k) {
          const std::size_t pick = uniform_int<std::size_t>(s.rng, k, feats.size() - 1);
          std::swap(feats[k], feats[pick]);
          const FeatureId j = feats[k];
          const std::size_t vocab = data_.feature(j).size();
          std::vector<ValueIndex> pool;
          for (ValueIndex v = 0; v < vocab; ++v)
            if (v != x[j]) pool.push_back(v);
          r.add(Condition(j, random_values(s.rng, std::move(pool), vocab - 1, x[j])));
        }
        if (support(r, data_) < s.bounds.min_support) continue;
        RuleSet rs = cur;
        rs.push_back(std::move(r));
        emit(std::move(rs));
      }
      // greedy rules grown around the example toward uncovered positives
      RowSet open = data_.all_rows();
      open.subtract(s.coverage.covered());
      RowSet good = data_.positives();
      good.subtract(s.coverage.covered());
      const std::size_t n_greedy = std::max<std::size_t>(1, cfg_.neighbor_budget / 5);
      for (std::size_t attempt = 0; attempt < n_greedy; ++attempt) {
        RowSet rows = open;
        Rule r;
        std::vector<FeatureId> pool = feats;
        const std::size_t n_cond = uniform_int<std::size_t>(s.rng, 1, cond_cap);
        for (std::size_t k = 0; k < n_cond && !pool.empty(); ++k) {
          const std::size_t pick = uniform_int<std::size_t>(s.rng, 0, pool.size() - 1);
          const FeatureId j = pool[pick];
          pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
          auto values = favoured_values(data_, j, rows, good);
          if (!std::binary_search(values.begin(), values.end(), x[j]))
            values.insert(std::upper_bound(values.begin(), values.end(), x[j]), x[j]);
          if (values.size() == data_.feature(j).size()) continue;
          rows &= rows_matching(data_, j, values);
          r.add(Condition(j, std::move(values)));
        }
        if (r.empty() || support(r, data_) < s.bounds.min_support) continue;
        RuleSet rs = cur;
        rs.push_back(std::move(r));
        emit(std::move(rs));
      }
      break;
    }
    case Action::kAddCondition: {
      for (std::size_t m = 0; m < cur.size(); ++m) {
        if (!cur[m].covers(x)) continue;
        if (cfg_.max_conditions && cur[m].size() >= cfg_.max_conditions) continue;
        // rows only this rule covers are the ones a new condition can fix or break
        RowSet sole = s.coverage.per_rule()[m];
        for (std::size_t k = 0; k < cur.size(); ++k)
          if (k != m) sole.subtract(s.coverage.per_rule()[k]);
        RowSet good = sole;
        good &= data_.positives();
        for (FeatureId j : usable_features_) {
          if (cur[m].has_feature(j)) continue;
          auto kept = favoured_values(data_, j, sole, good);
          std::erase(kept, x[j]);
          if (!kept.empty()) {
            RuleSet rs = cur;
            rs[m].add(Condition(j, std::move(kept)));
            emit(std::move(rs));
          }
        }
        for (FeatureId j : usable_features_) {
          if (cur[m].has_feature(j)) continue;
          const std::size_t vocab = data_.feature(j).size();
          std::vector<ValueIndex> others;
          for (ValueIndex v = 0; v < vocab; ++v)
            if (v != x[j]) others.push_back(v);
          // everything but the example's value: excludes it at least cost
          RuleSet rs = cur;
          rs[m].add(Condition(j, others));
          emit(std::move(rs));
          if (others.size() > 1) {
            RuleSet explore = cur;
            explore[m].add(Condition(j, random_values(s.rng, others, others.size() - 1, std::nullopt)));
            emit(std::move(explore));
          }
        }
      }
      break;
    }
    case Action::kRemoveRule: {
      for (std::size_t m = 0; m < cur.size(); ++m) {
        RuleSet rs = cur;
        rs.erase(rs.begin() + static_cast<std::ptrdiff_t>(m));
        emit(std::move(rs));
      }
      break;
    }
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Proposal Searcher::select(SearchState& s, std::vector<RuleSet> candidates, Action a) const {
  Proposal p;
  p.action = a;
  if (candidates.empty()) {
    p.stalled = true;
    p.rules = s.current;
    p.score = s.current_score;
    return p;
  }
  if (candidates.size() > cfg_.neighbor_budget) {
    for (std::size_t i = 0; i < cfg_.neighbor_budget; ++i) {
      const std::size_t pick = uniform_int<std::size_t>(s.rng, i, candidates.size() - 1);
      std::swap(candidates[i], candidates[pick]);
    }
    candidates.resize(cfg_.neighbor_budget);
  }
  p.n_neighbors = candidates.size();

  std::vector<Score> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) scores.push_back(evaluate(c));

  std::size_t chosen = 0;
  if (uniform01(s.rng) < cfg_.explore_prob) {
    chosen = uniform_int<std::size_t>(s.rng, 0, candidates.size() - 1);
  } else {
    for (std::size_t i = 1; i < scores.size(); ++i)
      if (scores[i].log_posterior > scores[chosen].log_posterior) chosen = i;
  }
  p.rules = std::move(candidates[chosen]);
  p.score = scores[chosen];
  return p;
}

Proposal Searcher::propose(SearchState& s, const Example& ex, Action a) const {
  return select(s, neighbors(s, ex, a), a);
}

Proposal Searcher::propose(SearchState& s, const Example& ex, RunLog* log) const {
  std::vector<Action> order = ex.label
                                  ? std::vector<Action>{Action::kAddValue, Action::kRemoveCondition, Action::kAddRule}
                                  : std::vector<Action>{Action::kAddCondition, Action::kRemoveRule};
  // first pick is uniform; the rest is a random fallback order
  for (std::size_t i = 0; i < order.size(); ++i)
    std::swap(order[i], order[uniform_int<std::size_t>(s.rng, i, order.size() - 1)]);
  for (Action a : order) {
    auto candidates = neighbors(s, ex, a);
    if (!candidates.empty()) return select(s, std::move(candidates), a);
  }
  if (log) log->add({{"event", "stall"}, {"chain", s.chain}, {"t", s.t}, {"row", ex.row}, {"label", ex.label}});
  return select(s, {}, order.front());
}

void Searcher::log_improvement(const SearchState& s, RunLog* log) const {
  if (!log) return;
  const ModelSize size = measure(s.best);
  log->add({{"event", "improve"},
            {"chain", s.chain},
            {"t", s.t},
            {"log_posterior", s.best_score.log_posterior},
            {"M", size.n_rules},
            {"n_conditions", size.n_conditions},
            {"n_features", size.n_features},
            {"min_support", s.bounds.min_support},
            {"m_cap", cap_json(s.bounds.m_cap)}});
}

void Searcher::reseed_current(SearchState& s) const {
  s.current = random_rule_set(s.rng);
  s.current_score = evaluate(s.current);
  s.coverage = CoverageIndex(s.current, data_);
  s.stalls = 0;
}

void Searcher::anneal_step(SearchState& s, RunLog* log) const {
  if (s.t >= cfg_.n_iter) throw std::logic_error("anneal_step past n_iter");

  auto ex = sample_misclassified(s);
  if (!ex) {
    // perfect fit: keep simplifying around a random example
    const std::size_t row = uniform_int<std::size_t>(s.rng, 0, data_.n_rows() - 1);
    ex = Example{row, data_.label(row)};
  }
  Proposal p = propose(s, *ex, log);

  if (p.stalled) {
    if (++s.stalls >= cfg_.stall_limit) {
      reseed_current(s);
      if (log) log->add({{"event", "restart"}, {"chain", s.chain}, {"t", s.t}});
    }
    ++s.t;
    return;
  }
  s.stalls = 0;

  if (p.score.log_posterior > s.best_score.log_posterior) {
    s.best = p.rules;
    s.best_score = p.score;
    s.bounds = update_bounds(s.bounds, p.score.log_posterior);
    log_improvement(s, log);
  }

  const double delta = p.score.log_posterior - s.current_score.log_posterior;
  const double alpha = acceptance_probability(delta, temperature(s.t, cfg_.n_iter, cfg_.t0));
  if (uniform01(s.rng) < alpha) {
    const CoverDelta moved = s.coverage.replace(s.current, p.rules, data_);
    const Confusion c = update_confusion(s.current_score.confusion, moved, data_);
    assert(c == p.score.confusion);
    s.current = std::move(p.rules);
    s.current_score = make_score(p.score.log_prior, c, h_);
    assert(is_valid(s.current, data_.features()));
  }
  ++s.t;
}

// ---------------------------------------------------------------------------

namespace {

struct ChainOutput {
  RuleSet rules;
  Score score;
  RunLog log;
};

ChainOutput run_chain(const Searcher& searcher, std::uint64_t seed, std::size_t chain) {
  ChainOutput out;
  SearchState s = searcher.init(seed, chain, &out.log);
  while (s.t < searcher.config().n_iter) searcher.anneal_step(s, &out.log);
  const ModelSize size = measure(s.best);
  out.log.add({{"event", "end"},
               {"chain", chain},
               {"t", s.t},
               {"log_posterior", s.best_score.log_posterior},
               {"M", size.n_rules},
               {"n_conditions", size.n_conditions},
               {"n_features", size.n_features}});
  out.rules = std::move(s.best);
  out.score = s.best_score;
  return out;
}

}  // namespace

RunResult run(const Dataset& data, const Hyperparams& h, const SearchConfig& cfg) {
  const Searcher searcher(data, h, cfg);
  if (data.n_pos() == 0 || data.n_neg() == 0)
    throw DegenerateLabelsError("training data must contain both positive and negative examples");

  const std::size_t n_chains = cfg.n_restarts + 1;
  std::vector<ChainOutput> outputs(n_chains);
  const std::size_t n_threads = std::clamp<std::size_t>(cfg.threads, 1, n_chains);
  if (n_threads == 1) {
    for (std::size_t c = 0; c < n_chains; ++c) outputs[c] = run_chain(searcher, derive_seed(cfg.random_seed, c), c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n_chains);
    {
      std::vector<std::jthread> workers;
      for (std::size_t w = 0; w < n_threads; ++w) {
        workers.emplace_back([&] {
          for (std::size_t c = next++; c < n_chains; c = next++) {
            try {
              outputs[c] = run_chain(searcher, derive_seed(cfg.random_seed, c), c);
            } catch (...) {
              errors[c] = std::current_exception();
            }
          }
        });
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  RunResult result;
  for (std::size_t c = 0; c < n_chains; ++c) {
    if (c == 0 || outputs[c].score.log_posterior > result.score.log_posterior) {
      result.rules = outputs[c].rules;
      result.score = outputs[c].score;
      result.best_chain = c;
    }
    for (auto& e : outputs[c].log.events) result.log.add(std::move(e));
  }
  return result;
}

}  // namespace mars
