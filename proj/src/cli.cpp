#include "mars/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mars/display.hpp"
#include "mars/errors.hpp"
#include "mars/inference.hpp"
#include "mars/model_io.hpp"
#include "mars/synth.hpp"

namespace mars::cli {

std::size_t thread_cap() {
  const char* env = std::getenv("MARS_THREADS");
  if (!env || !*env) return 1;
  const auto n = parse_number(env);
  if (!n || *n < 1) return 1;
  return static_cast<std::size_t>(*n);
}

namespace {

struct HyperFlags {
  std::string config;
  std::optional<double> alpha_M, beta_M, alpha_L, beta_L, alpha_pos, beta_pos, alpha_neg, beta_neg;
  std::optional<std::string> theta;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "key = value hyperparameter file");
    app.add_option("--alpha-m", alpha_M, "Gamma shape for the rule count");
    app.add_option("--beta-m", beta_M, "Gamma rate for the rule count");
    app.add_option("--alpha-l", alpha_L, "Gamma shape for rule length");
    app.add_option("--beta-l", beta_L, "Gamma rate for rule length");
    app.add_option("--theta", theta, "Dirichlet weight(s): one value or a comma list");
    app.add_option("--alpha-pos", alpha_pos, "Beta prior on precision of positive predictions");
    app.add_option("--beta-pos", beta_pos, "Beta prior on precision of positive predictions");
    app.add_option("--alpha-neg", alpha_neg, "Beta prior on precision of negative predictions");
    app.add_option("--beta-neg", beta_neg, "Beta prior on precision of negative predictions");
  }

  Hyperparams resolve() const {
    Hyperparams h;
    if (!config.empty()) h = read_hyperparams_file(config, h);
    auto put = [](double& field, const std::optional<double>& v) {
      if (v) field = *v;
    };
    put(h.alpha_M, alpha_M);
    put(h.beta_M, beta_M);
    put(h.alpha_L, alpha_L);
    put(h.beta_L, beta_L);
    put(h.alpha_pos, alpha_pos);
    put(h.beta_pos, beta_pos);
    put(h.alpha_neg, alpha_neg);
    put(h.beta_neg, beta_neg);
    if (theta) h.set("theta", *theta);
    return h;
  }
};

struct SearchFlags {
  SearchConfig cfg;
  void attach(CLI::App& app) {
    app.add_option("--seed", cfg.random_seed, "random seed");
    app.add_option("--iters", cfg.n_iter, "annealing iterations per chain");
    app.add_option("--t0", cfg.t0, "initial temperature");
    app.add_option("--explore", cfg.explore_prob, "probability of a random neighbor");
    app.add_option("--restarts", cfg.n_restarts, "extra independent chains");
    app.add_option("--neighbor-budget", cfg.neighbor_budget, "neighbors scored per step");
    app.add_option("--max-rules", cfg.max_rules, "cap on rules (0 = none)");
    app.add_option("--max-conditions", cfg.max_conditions, "cap on conditions per rule (0 = none)");
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
}

std::string fixed(double x, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

struct Evaluation {
  Confusion confusion;
  ModelSize size;
  double accuracy() const {
    const auto n = confusion.tp + confusion.fp + confusion.tn + confusion.fn;
    return n ? static_cast<double>(confusion.tp + confusion.tn) / static_cast<double>(n) : 0.0;
  }
};

Evaluation evaluate_rows(const RuleSet& rules, const EncodedTable& t) {
  Evaluation e;
  e.size = measure(rules);
  for (std::size_t i = 0; i < t.n_rows(); ++i) {
    const bool pred = classify(rules, t.row(i)) == 1;
    const bool y = t.labels[i] == 1;
    if (pred && y) ++e.confusion.tp;
    else if (pred) ++e.confusion.fp;
    else if (y) ++e.confusion.fn;
    else ++e.confusion.tn;
  }
  return e;
}

void print_evaluation(std::ostream& out, const Evaluation& e) {
  out << "accuracy: " << fixed(e.accuracy()) << "\n"
      << "rules: " << e.size.n_rules << "\n"
      << "conditions: " << e.size.n_conditions << "\n"
      << "features: " << e.size.n_features << "\n"
      << "tp: " << e.confusion.tp << " fp: " << e.confusion.fp << " tn: " << e.confusion.tn
      << " fn: " << e.confusion.fn << "\n";
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::string_view s = text;
  while (!s.empty()) {
    const auto comma = s.find(',');
    auto x = parse_number(s.substr(0, comma));
    if (!x || !(*x > 0)) throw InputError("--grid expects positive comma separated numbers");
    grid.push_back(*x);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return grid;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn and apply multi-value rule set classifiers", "mars"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "learn a rule set from a labeled CSV");
  std::string train_data, train_model, train_log, train_report;
  DiscretizeOptions disc;
  std::string binning = "equal-width";
  std::optional<std::string> positive;
  HyperFlags train_h;
  SearchFlags train_s;
  train->add_option("--data", train_data, "training CSV")->required();
  train->add_option("--label", disc.label, "label column name");
  train->add_option("--positive", positive, "label value treated as positive");
  train->add_option("--model", train_model, "output model file (JSON)")->required();
  train->add_option("--log", train_log, "run log output (JSON lines)");
  train->add_option("--report", train_report, "discretization report output (JSON)");
  train->add_option("--bins", disc.n_bins, "intervals per numeric feature");
  train->add_option("--binning", binning, "equal-width or equal-frequency")
      ->check(CLI::IsMember({"equal-width", "equal-frequency"}));
  train_h.attach(*train);
  train_s.attach(*train);

  // predict
  auto* predict = app.add_subcommand("predict", "apply a model to a CSV");
  std::string pred_model, pred_data, pred_out;
  predict->add_option("--model", pred_model)->required();
  predict->add_option("--data", pred_data)->required();
  predict->add_option("--out", pred_out, "predictions CSV (default stdout)");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "accuracy and model size on a labeled CSV");
  std::string eval_model, eval_data;
  evaluate->add_option("--model", eval_model)->required();
  evaluate->add_option("--data", eval_data)->required();

  // show
  auto* show = app.add_subcommand("show", "print a model's rules");
  std::string show_model;
  show->add_option("--model", show_model)->required();

  // gen
  auto* gen = app.add_subcommand("gen", "generate planted-rule synthetic data");
  SynthSpec gen_spec;
  std::string gen_out, gen_truth;
  gen->add_option("--rows", gen_spec.n_rows);
  gen->add_option("--features", gen_spec.n_features);
  gen->add_option("--rules", gen_spec.n_rules);
  gen->add_option("--max-conditions", gen_spec.max_conditions);
  gen->add_option("--seed", gen_spec.seed);
  gen->add_option("--snap", gen_spec.snap, "round range endpoints to multiples of 1/snap (0 = off)");
  gen->add_option("--out", gen_out, "output CSV")->required();
  gen->add_option("--truth", gen_truth, "planted rules output (JSON)");

  // sweep
  auto* sw = app.add_subcommand("sweep", "beta_M x beta_L trade-off sweep on synthetic data");
  SynthSpec sw_spec;
  SweepSpec sw_grid;
  std::string sw_grid_text = "1,100,10000";
  std::string sw_out;
  HyperFlags sw_h;
  SearchConfig sw_cfg;
  sw->add_option("--rows", sw_spec.n_rows);
  sw->add_option("--features", sw_spec.n_features);
  sw->add_option("--rules", sw_spec.n_rules);
  sw->add_option("--max-conditions", sw_spec.max_conditions);
  sw->add_option("--data-seed", sw_spec.seed);
  sw->add_option("--snap", sw_spec.snap, "round range endpoints to multiples of 1/snap (0 = off)");
  sw->add_option("--grid", sw_grid_text, "comma separated beta values");
  sw->add_option("--replicates", sw_grid.replicates);
  sw->add_option("--bins", sw_grid.n_bins);
  sw->add_option("--out", sw_out, "metrics CSV")->required();
  sw->add_option("--seed", sw_cfg.random_seed);
  sw->add_option("--iters", sw_cfg.n_iter);
  sw->add_option("--t0", sw_cfg.t0);
  sw->add_option("--explore", sw_cfg.explore_prob);
  sw->add_option("--restarts", sw_cfg.n_restarts);
  sw->add_option("--neighbor-budget", sw_cfg.neighbor_budget);
  sw_h.attach(*sw);

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "mars: " << e.what() << "\n";
    return 2;
  }

  try {
    const std::size_t threads = thread_cap();

    if (*train) {
      disc.binning = binning == "equal-frequency" ? Binning::kEqualFrequency : Binning::kEqualWidth;
      disc.positive = positive;
      const Hyperparams h = train_h.resolve();
      const RawTable table = read_csv_file(train_data);
      const Discretized d = discretize(table, disc);
      SearchConfig cfg = train_s.cfg;
      cfg.threads = threads;
      const RunResult fit = run(d.data, h, cfg);

      Model m;
      m.features = d.data.features();
      m.labels = d.labels;
      m.rules = fit.rules;
      m.hyperparams = h.resolved(d.data.n_features());
      m.training = {cfg.random_seed,
                    cfg.n_iter,
                    cfg.n_restarts,
                    d.data.n_rows(),
                    fit.score.log_posterior,
                    fit.score.log_prior,
                    fit.score.log_likelihood,
                    fit.score.confusion};
      save_model(m, train_model);
      if (!train_log.empty()) write_text(train_log, fit.log.to_jsonl());
      if (!train_report.empty()) write_text(train_report, features_to_json(m.features).dump(2) + "\n");

      print_evaluation(out, evaluate_rows(m.rules, encode(d.data)));
      out << "log_posterior: " << fixed(fit.score.log_posterior) << "\n";
      return 0;
    }

    if (*predict) {
      const Model m = load_model(pred_model);
      const RawTable table = read_csv_file(pred_data);
      const EncodedTable t = encode(table, m.features);
      std::ofstream file;
      if (!pred_out.empty()) {
        file.open(pred_out, std::ios::binary);
        if (!file) throw Error("cannot write '" + pred_out + "'");
      }
      std::ostream& sink = pred_out.empty() ? out : file;
      sink << "prediction,rule\n";
      for (std::size_t i = 0; i < t.n_rows(); ++i) {
        const int rule = first_covering_rule(m.rules, t.row(i));
        sink << (rule >= 0 ? 1 : 0) << ',' << rule << '\n';
      }
      return 0;
    }

    if (*evaluate) {
      const Model m = load_model(eval_model);
      const RawTable table = read_csv_file(eval_data);
      print_evaluation(out, evaluate_rows(m.rules, encode(table, m.features, &m.labels)));
      return 0;
    }

    if (*show) {
      const Model m = load_model(show_model);
      out << format_rule_set(m.rules, m.features);
      return 0;
    }

    if (*gen) {
      const SynthData data = generate(gen_spec);
      std::ofstream f(gen_out, std::ios::binary);
      if (!f) throw Error("cannot write '" + gen_out + "'");
      write_csv(f, data.table);
      if (!gen_truth.empty()) {
        nlohmann::json truth = nlohmann::json::array();
        for (const auto& r : data.truth) {
          nlohmann::json conds = nlohmann::json::array();
          for (const auto& c : r.conditions)
            conds.push_back({{"feature", data.table.header[c.feature]}, {"lo", c.lo}, {"hi", c.hi}});
          truth.push_back(conds);
        }
        write_text(gen_truth, truth.dump(2) + "\n");
      }
      out << "rows: " << gen_spec.n_rows << "\npositives: "
          << std::count(data.labels.begin(), data.labels.end(), std::uint8_t{1}) << "\n";
      return 0;
    }

    if (*sw) {
      sw_grid.beta_grid = parse_grid(sw_grid_text);
      sw_grid.threads = threads;
      const auto rows = sweep(sw_spec, sw_grid, sw_h.resolve(), sw_cfg);
      std::ofstream f(sw_out, std::ios::binary);
      if (!f) throw Error("cannot write '" + sw_out + "'");
      write_sweep_csv(f, rows);
      out << "beta_M,beta_L,holdout_error,n_conditions,n_features\n";
      for (const auto& c : summarize(rows))
        out << format_number(c.beta_M) << ',' << format_number(c.beta_L) << ',' << fixed(c.holdout_error) << ','
            << fixed(c.n_conditions, 2) << ',' << fixed(c.n_features, 2) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "mars: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::invalid_argument& e) {
    err << "mars: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "mars: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace mars::cli
