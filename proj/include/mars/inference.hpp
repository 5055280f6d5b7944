#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mars/bounds.hpp"
#include "mars/dataset.hpp"
#include "mars/hyperparams.hpp"
#include "mars/random.hpp"
#include "mars/rules.hpp"
#include "mars/scoring.hpp"

namespace mars {

struct SearchConfig {
  std::size_t n_iter = 5000;
  double t0 = 100.0;
  double explore_prob = 0.1;
  std::uint64_t random_seed = 0;
  /// Extra independent chains beyond the first.
  std::size_t n_restarts = 0;
  std::size_t neighbor_budget = 50;
  /// Structural caps on the search space; 0 means unlimited.
  std::size_t max_rules = 0;
  std::size_t max_conditions = 0;
  /// Consecutive stalled steps before a chain re-seeds its current state.
  std::size_t stall_limit = 20;
  /// Worker threads for running chains.
  std::size_t threads = 1;

  void validate() const;
};

/// T0^(1 - t/n_iter): T0 at t = 0, exactly 1 at t = n_iter.
double temperature(std::size_t t, std::size_t n_iter, double t0);
/// min{1, exp(delta / T)}.
double acceptance_probability(double delta, double temperature);

enum class Action { kAddValue, kRemoveCondition, kAddRule, kAddCondition, kRemoveRule };
std::string_view to_string(Action a);

struct Example {
  std::size_t row = 0;
  bool label = false;
};

/// Per-rule coverage plus, per row, how many rules cover it. Tracks the
/// union coverage incrementally as rules come and go.
class CoverageIndex {
 public:
  CoverageIndex() = default;
  CoverageIndex(const RuleSet& rules, const Dataset& data);

  /// Moves the index from `current` (the rule set it was built for) to
  /// `next`; returns the rows that enter and leave the union.
  CoverDelta replace(const RuleSet& current, const RuleSet& next, const Dataset& data);

  const RowSet& covered() const noexcept { return union_; }
  const std::vector<RowSet>& per_rule() const noexcept { return per_rule_; }
  std::uint32_t cover_count(std::size_t row) const { return counts_.at(row); }

  bool consistent_with(const RuleSet& rules, const Dataset& data) const;

 private:
  std::vector<RowSet> per_rule_;
  std::vector<std::uint32_t> counts_;
  RowSet union_;
};

/// Append-only event log, serialized as JSON lines.
struct RunLog {
  std::vector<nlohmann::json> events;

  void add(nlohmann::json event) { events.push_back(std::move(event)); }
  std::string to_jsonl() const;
};

struct SearchState {
  RuleSet current;
  Score current_score;
  CoverageIndex coverage;
  RuleSet best;
  Score best_score;
  BoundState bounds;
  Rng rng;
  std::size_t t = 0;
  std::size_t stalls = 0;
  std::size_t chain = 0;
};

struct Proposal {
  RuleSet rules;
  Score score;
  Action action = Action::kAddRule;
  std::size_t n_neighbors = 0;
  bool stalled = false;
};

/// Simulated-annealing MAP search over rule sets for one dataset and one
/// set of hyperparameters. Methods are const; all mutable search state
/// (including the random stream) lives in SearchState.
class Searcher {
 public:
  Searcher(const Dataset& data, const Hyperparams& h, SearchConfig cfg);

  const Dataset& data() const noexcept { return data_; }
  const Hyperparams& hyperparams() const noexcept { return h_; }
  const SearchConfig& config() const noexcept { return cfg_; }

  /// Random rule set of 1-3 rules with 1-3 conditions each, scored, with
  /// bounds seeded from its score. Throws DegenerateLabelsError when the
  /// data has a single class.
  SearchState init(std::uint64_t seed, std::size_t chain = 0, RunLog* log = nullptr) const;

  /// Uniform draw from the rows the current rule set misclassifies.
  std::optional<Example> sample_misclassified(SearchState& s) const;

  /// Every neighbor the action can produce from the current state for
  /// this example, normalized, excluding the current rule set itself.
  /// Candidate generation for AddRule/AddCondition consumes randomness.
  std::vector<RuleSet> neighbors(SearchState& s, const Example& ex, Action a) const;

  /// Picks an action for the example's label (1/3 each of AddValue,
  /// RemoveCondition, AddRule for positives; 1/2 each of AddCondition,
  /// RemoveRule for negatives), falling back to the other actions of the
  /// same group when one has no neighbors.
  Proposal propose(SearchState& s, const Example& ex, RunLog* log = nullptr) const;
  /// Same with the action fixed; stalled when it has no neighbors.
  Proposal propose(SearchState& s, const Example& ex, Action a) const;

  /// One iteration: sample, propose, track the best, accept or reject.
  void anneal_step(SearchState& s, RunLog* log = nullptr) const;

  /// Scores a normalized rule set.
  Score evaluate(const RuleSet& rules) const;

  /// Random rule set honoring the configured caps.
  RuleSet random_rule_set(Rng& rng) const;

 private:
  Proposal select(SearchState& s, std::vector<RuleSet> candidates, Action a) const;
  void log_improvement(const SearchState& s, RunLog* log) const;
  void reseed_current(SearchState& s) const;

  const Dataset& data_;
  Hyperparams h_;
  SearchConfig cfg_;
  std::vector<FeatureId> usable_features_;
};

struct RunResult {
  RuleSet rules;
  Score score;
  RunLog log;
  std::size_t best_chain = 0;
};

/// Runs 1 + n_restarts chains (in parallel up to cfg.threads) and returns
/// the best rule set found. Deterministic for a given seed regardless of
/// the thread count.
RunResult run(const Dataset& data, const Hyperparams& h, const SearchConfig& cfg);

}  // namespace mars
