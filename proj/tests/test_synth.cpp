#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mars/synth.hpp"

using namespace mars;

TEST_CASE("generated labels follow the planted rules") {
  SynthSpec spec;
  spec.n_rows = 3000;
  spec.seed = 4;
  const auto d = generate(spec);
  REQUIRE(d.truth.size() == 3);
  REQUIRE(d.table.header.back() == "label");
  for (std::size_t i = 0; i < spec.n_rows; ++i) {
    bool y = false;
    for (const auto& r : d.truth) y = y || r.covers(d.row(i, spec.n_features));
    CHECK(d.labels[i] == (y ? 1 : 0));
    CHECK(d.table.rows[i].back() == (y ? "1" : "0"));
  }
  for (const auto& r : d.truth) {
    CHECK(r.conditions.size() >= 1);
    CHECK(r.conditions.size() <= spec.max_conditions);
    for (const auto& c : r.conditions) {
      CHECK(c.lo < c.hi);
      CHECK(c.lo >= 0.0);
      CHECK(c.hi <= 1.0);
      // snapped to tenths
      CHECK(std::abs(c.lo * 10 - std::round(c.lo * 10)) < 1e-12);
    }
  }
}

TEST_CASE("same seed gives the same table") {
  SynthSpec spec;
  spec.n_rows = 500;
  spec.seed = 9;
  const auto a = generate(spec);
  const auto b = generate(spec);
  CHECK(a.values == b.values);
  CHECK(a.table.rows == b.table.rows);
  spec.seed = 10;
  CHECK(generate(spec).values != a.values);
}

TEST_CASE("continuous endpoints when snapping is off") {
  SynthSpec spec;
  spec.n_rows = 200;
  spec.snap = 0;
  spec.seed = 2;
  bool off_grid = false;
  for (const auto& r : generate(spec).truth)
    for (const auto& c : r.conditions) off_grid = off_grid || std::abs(c.lo * 10 - std::round(c.lo * 10)) > 1e-9;
  CHECK(off_grid);
}

TEST_CASE("uniform coverage of a planted range") {
  // one rule [x0 ∈ [0.2, 0.7)] over 1e5 uniform rows covers about half
  SynthSpec spec;
  spec.n_rows = 100000;
  spec.n_features = 1;
  spec.seed = 1;
  auto d = generate(spec);
  PlantedRule r{{{0, 0.2, 0.7}}};
  std::size_t hit = 0;
  for (std::size_t i = 0; i < spec.n_rows; ++i) hit += r.covers(d.row(i, 1));
  CHECK(std::abs(static_cast<double>(hit) / spec.n_rows - 0.5) <= 0.01);
}

TEST_CASE("planted feature count") {
  std::vector<PlantedRule> truth{{{{1, 0, 0.5}, {2, 0.1, 0.3}}}, {{{1, 0.6, 0.9}}}};
  CHECK(planted_feature_count(truth) == 2);
}

TEST_CASE("spearman with ties") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{10, 20, 30, 40, 50};
  CHECK(spearman(x, y) == doctest::Approx(1.0));
  const std::vector<double> rev{5, 4, 3, 2, 1};
  CHECK(spearman(x, rev) == doctest::Approx(-1.0));
  // ranks with ties: x = 1,1,2 -> 1.5,1.5,3 ; y = 3,2,1
  const std::vector<double> a{1, 1, 2}, b{3, 2, 1};
  CHECK(spearman(a, b) == doctest::Approx(-0.8660254037844386));
}

TEST_CASE("a small sweep has every cell and replicate") {
  SynthSpec spec;
  spec.n_rows = 600;
  spec.n_features = 6;
  spec.n_rules = 2;
  spec.max_conditions = 2;
  spec.seed = 3;
  SweepSpec grid;
  grid.beta_grid = {1.0, 1000.0};
  grid.replicates = 2;
  SearchConfig cfg;
  cfg.n_iter = 800;
  const auto rows = sweep(spec, grid, Hyperparams{}, cfg);
  CHECK(rows.size() == 8);
  for (const auto& r : rows) {
    CHECK(r.holdout_error >= 0.0);
    CHECK(r.holdout_error <= 1.0);
    CHECK(r.wall_time_s >= 0.0);
  }
  const auto cells = summarize(rows);
  CHECK(cells.size() == 4);

  std::ostringstream out;
  write_sweep_csv(out, rows);
  const std::string text = out.str();
  CHECK(text.rfind("beta_M,beta_L,replicate,holdout_error,n_conditions,n_features,wall_time_s\n", 0) == 0);

  grid.threads = 3;
  const auto again = sweep(spec, grid, Hyperparams{}, cfg);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(again[i].holdout_error == rows[i].holdout_error);
    CHECK(again[i].n_conditions == rows[i].n_conditions);
  }
}

TEST_CASE("train error is not above hold-out error on average") {
  SynthSpec spec;
  spec.n_rows = 2000;
  spec.seed = 12;
  SweepSpec grid;
  grid.beta_grid = {100.0};
  grid.replicates = 4;
  SearchConfig cfg;
  cfg.n_iter = 2000;
  const auto rows = sweep(spec, grid, Hyperparams{}, cfg);
  double train = 0, test = 0;
  for (const auto& r : rows) {
    train += r.train_error;
    test += r.holdout_error;
  }
  CHECK(train <= test + 1e-12);
}
