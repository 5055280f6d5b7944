#include <doctest.h>

#include <random>
#include <sstream>

#include "mars/discretize.hpp"
#include "mars/errors.hpp"
#include "mars/row_set.hpp"
#include "mars/rules.hpp"
#include "mars/table.hpp"
#include "support/oracle.hpp"

using namespace mars;

namespace {

RawTable csv(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in, "test");
}

// state: CA, TX, NY ; married: yes, no
Dataset people() {
  std::vector<FeatureSpec> f{oracle::categorical(0, 3), oracle::categorical(1, 2)};
  f[0].name = "state";
  f[0].vocabulary = {"CA", "TX", "NY"};
  f[1].name = "married";
  f[1].vocabulary = {"yes", "no"};
  return Dataset(f, {0, 0, 1, 0, 2, 1, 1, 1, 2, 0}, {1, 1, 0, 0, 1});
}

}  // namespace

TEST_CASE("row set basics") {
  RowSet a(130), b(130);
  a.set(0);
  a.set(64);
  a.set(129);
  b.set(64);
  b.set(100);
  CHECK(a.count() == 3);
  CHECK(a.count_and(b) == 1);
  CHECK((a | b).count() == 4);
  CHECK((a & b).to_indices() == std::vector<std::size_t>{64});
  CHECK(a.nth(2) == 129);
  RowSet full(130, true);
  CHECK(full.count() == 130);
  full.subtract(a);
  CHECK(full.count() == 127);
  CHECK(b.is_subset_of(b | a));
}

TEST_CASE("csv reader handles quotes and reports bad rows") {
  auto t = csv("a,b\n\"x, y\",\"he said \"\"hi\"\"\"\n\"multi\nline\",2\n");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "x, y");
  CHECK(t.rows[0][1] == "he said \"hi\"");
  CHECK(t.rows[1][0] == "multi\nline");
  CHECK_THROWS_AS(csv("a,b\n1,2,3\n"), InputError);
  CHECK_THROWS_AS(csv("a,b\n\"open,2\n"), InputError);
  CHECK_THROWS_AS(csv("a,a\n1,2\n"), InputError);
}

TEST_CASE("equal-width discretization places 0.35 in [0.3,0.4)") {
  auto t = csv("x,label\n0,0\n0.35,1\n1,0\n0.99,1\n");
  DiscretizeOptions opt;
  auto d = discretize(t, opt);
  const auto& f = d.data.feature(0);
  CHECK(f.kind == FeatureKind::kNumeric);
  CHECK(f.size() == 10);
  CHECK(d.data.value(1, 0) == 3);
  CHECK(f.vocabulary[3] == "[0.3,0.4)");
  CHECK(f.vocabulary[9] == "[0.9,1]");
  // out of range values clamp into the boundary intervals
  CHECK(f.encode_number(-5.0) == 0);
  CHECK(f.encode_number(7.0) == 9);
}

TEST_CASE("categorical columns pass through in first-appearance order") {
  auto t = csv("state,label\nCA,1\nTX,0\nCA,0\n");
  auto d = discretize(t, {});
  const auto& f = d.data.feature(0);
  CHECK(f.kind == FeatureKind::kCategorical);
  CHECK(f.vocabulary == std::vector<std::string>{"CA", "TX"});
  CHECK(d.data.value(0, 0) == 0);
  CHECK(d.data.value(1, 0) == 1);
  CHECK(d.data.value(2, 0) == 0);
}

TEST_CASE("missing cells get their own value") {
  auto t = csv("state,x,label\nCA,1,1\n?,2,0\nTX,,0\n");
  auto d = discretize(t, {});
  const auto missing = d.data.feature(0).find(kMissingLabel);
  REQUIRE(missing);
  CHECK(d.data.value(1, 0) == *missing);
  CHECK(d.data.feature(1).vocabulary.back() == kMissingLabel);
  CHECK(d.data.value(2, 1) == d.data.feature(1).size() - 1);
}

TEST_CASE("discretization errors") {
  SUBCASE("constant column is named") {
    try {
      discretize(csv("flat,x,label\nA,1,1\nA,2,0\n"), {});
      FAIL("expected an error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("flat") != std::string::npos);
    }
  }
  SUBCASE("non-binary label") { CHECK_THROWS_AS(discretize(csv("x,label\n1,a\n2,b\n3,c\n"), {}), InputError); }
  SUBCASE("single class") { CHECK_THROWS_AS(discretize(csv("x,label\n1,1\n2,1\n"), {}), DegenerateLabelsError); }
  SUBCASE("missing label column") { CHECK_THROWS_AS(discretize(csv("x,y\n1,1\n2,0\n"), {}), InputError); }
  SUBCASE("one bin") {
    DiscretizeOptions o;
    o.n_bins = 1;
    CHECK_THROWS_AS(discretize(csv("x,label\n1,1\n2,0\n"), o), InputError);
  }
}

TEST_CASE("fifty uniform features with ten bins give five hundred items") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RawTable t;
  for (int j = 0; j < 50; ++j) t.header.push_back("x" + std::to_string(j));
  t.header.push_back("label");
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> row;
    for (int j = 0; j < 50; ++j) row.push_back(format_number(u(rng)));
    row.push_back(i % 2 ? "1" : "0");
    t.rows.push_back(row);
  }
  auto d = discretize(t, {});
  std::size_t items = 0;
  for (const auto& f : d.data.features()) items += f.size();
  CHECK(items == 500);
}

TEST_CASE("discretization is deterministic") {
  auto t = csv("x,s,label\n0.1,a,1\n0.5,b,0\n0.7,a,1\n0.9,c,0\n");
  auto a = discretize(t, {});
  auto b = discretize(t, {});
  CHECK(a.data.cells() == b.data.cells());
  CHECK(a.data.labels() == b.data.labels());
}

TEST_CASE("rule cover semantics") {
  const auto d = people();
  Rule ca_tx({Condition(0, {0, 1})});
  // row 1 is (TX, yes)
  CHECK(ca_tx.covers(d.row(1)));
  Rule ca_married({Condition(0, {0}), Condition(1, {0})});
  CHECK_FALSE(ca_married.covers(d.row(1)));
  CHECK(classify({}, d.row(0)) == 0);
  CHECK(classify({ca_married, ca_tx}, d.row(1)) == 1);
  CHECK(first_covering_rule({ca_married, ca_tx}, d.row(1)) == 1);
  CHECK(first_covering_rule({ca_married}, d.row(1)) == -1);
}

TEST_CASE("coverage and support") {
  const auto d = people();
  Rule none({Condition(0, {0}), Condition(1, {1})});  // CA and not married: no such row
  CHECK(coverage(none, d).none());
  CHECK(support(none, d) == 0);
  // all but NY
  Rule not_ny({Condition(0, {0, 1})});
  std::size_t ny = 0;
  for (std::size_t i = 0; i < d.n_rows(); ++i) ny += d.value(i, 0) == 2;
  CHECK(support(not_ny, d) == d.n_rows() - ny);
}

TEST_CASE("one condition holding k of n values covers about k/n of uniform rows") {
  const std::size_t n = 8, rows = 40000;
  std::mt19937_64 rng(3);
  std::vector<ValueIndex> cells(rows);
  for (auto& c : cells) c = static_cast<ValueIndex>(rng() % n);
  std::vector<std::uint8_t> labels(rows, 0);
  labels[0] = 1;
  Dataset d({oracle::categorical(0, n)}, cells, labels);
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<ValueIndex> vs;
    for (std::size_t v = 0; v < k; ++v) vs.push_back(static_cast<ValueIndex>(v));
    const double freq = static_cast<double>(support(Rule({Condition(0, vs)}), d)) / rows;
    CHECK(freq == doctest::Approx(static_cast<double>(k) / n).epsilon(0.02));
  }
}

TEST_CASE("classify matches brute force and growth monotonicity") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = oracle::tiny_instance(rng(), 30, 4, 4);
    const auto rules = oracle::all_rules(d, 2);
    RuleSet rs;
    for (int m = 0; m < 3; ++m) rs.push_back(rules[rng() % rules.size()]);
    RuleSet bigger = rs;
    bigger.push_back(rules[rng() % rules.size()]);
    Rule tighter = rs[0];
    Rule looser = rs[0];
    const auto& c0 = looser.conditions().front();
    for (ValueIndex v = 0; v < d.feature(c0.feature).size(); ++v)
      if (!c0.contains(v)) {
        looser.add_value(c0.feature, v);
        break;
      }
    for (FeatureId j = 0; j < d.n_features(); ++j)
      if (!tighter.has_feature(j)) {
        tighter.add(Condition(j, {0}));
        break;
      }
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
      int brute = 0;
      for (const auto& r : rs) brute = std::max(brute, oracle::covers(r, d, i) ? 1 : 0);
      CHECK(classify(rs, d.row(i)) == brute);
      CHECK(classify(rs, d.row(i)) <= classify(bigger, d.row(i)));
      if (!rs[0].covers(d.row(i))) CHECK_FALSE(tighter.covers(d.row(i)));
      if (rs[0].covers(d.row(i))) CHECK(looser.covers(d.row(i)));
    }
    CHECK(coverage(rs, d).count() == oracle::recount(rs, d).tp + oracle::recount(rs, d).fp);
  }
}

TEST_CASE("normalize drops vacuous conditions, empty rules and duplicates") {
  const auto d = people();
  Rule r({Condition(0, {0, 1, 2}), Condition(1, {0})});
  auto n = normalize({r}, d.features());
  REQUIRE(n.size() == 1);
  CHECK(n[0] == Rule({Condition(1, {0})}));

  Rule s({Condition(0, {1})});
  CHECK(normalize({s, s}, d.features()).size() == 1);

  Rule all({Condition(0, {0, 1, 2})});
  CHECK(normalize({all}, d.features()).empty());
}

TEST_CASE("conditions on the same feature merge by union") {
  Rule r;
  r.add(Condition(0, {0}));
  r.add(Condition(0, {2}));
  REQUIRE(r.size() == 1);
  CHECK(r.conditions()[0].values == std::vector<ValueIndex>{0, 2});
  CHECK(r.item_count() == 2);
}

TEST_CASE("validate rejects out-of-vocabulary values") {
  const auto d = people();
  CHECK_FALSE(is_valid({Rule({Condition(1, {5})})}, d.features()));
  CHECK_FALSE(is_valid({Rule({Condition(0, {0, 1, 2})})}, d.features()));
  CHECK(is_valid({Rule({Condition(0, {0, 1})})}, d.features()));
}

TEST_CASE("model size counts values and features") {
  // {(f1,{a,b}), (f2,{c})} and {(f1,{a})}
  RuleSet rs{Rule({Condition(1, {0, 1}), Condition(2, {2})}), Rule({Condition(1, {0})})};
  const auto m = measure(rs);
  CHECK(m.n_rules == 2);
  CHECK(m.n_conditions == 4);
  CHECK(m.n_features == 2);
}

TEST_CASE("encoding new data") {
  auto train = csv("x,s,label\n0,a,1\n1,b,0\n");
  auto d = discretize(train, {});
  auto test = csv("s,x,label\nzzz,2,1\n");
  auto e = encode(test, d.data.features(), &d.labels);
  CHECK(e.row(0)[0] == d.data.feature(0).size() - 1);  // clamped
  CHECK(e.row(0)[1] == kUnknownValue);                  // unseen category
  CHECK(e.labels[0] == 1);
  CHECK_THROWS_AS(encode(csv("x,label\n1,1\n"), d.data.features()), FeatureMismatchError);
}
