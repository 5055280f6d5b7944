#include "mars/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mars/errors.hpp"

namespace mars {

using nlohmann::json;

json features_to_json(std::span<const FeatureSpec> features) {
  json out = json::array();
  for (const auto& f : features) {
    json jf = {{"name", f.name},
               {"kind", f.kind == FeatureKind::kNumeric ? "numeric" : "categorical"},
               {"values", f.vocabulary}};
    if (f.kind == FeatureKind::kNumeric) jf["edges"] = f.edges;
    out.push_back(std::move(jf));
  }
  return out;
}

std::vector<FeatureSpec> features_from_json(const json& j) {
  if (!j.is_array()) throw ModelFormatError("'features' must be an array");
  std::vector<FeatureSpec> out;
  for (const auto& jf : j) {
    FeatureSpec f;
    f.id = static_cast<FeatureId>(out.size());
    f.name = jf.at("name").get<std::string>();
    const auto kind = jf.at("kind").get<std::string>();
    if (kind == "numeric") {
      f.kind = FeatureKind::kNumeric;
      f.edges = jf.at("edges").get<std::vector<double>>();
    } else if (kind == "categorical") {
      f.kind = FeatureKind::kCategorical;
    } else {
      throw ModelFormatError("unknown feature kind '" + kind + "'");
    }
    f.vocabulary = jf.at("values").get<std::vector<std::string>>();
    try {
      f.validate();
    } catch (const InputError& e) {
      throw ModelFormatError(e.what());
    }
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

json hyperparams_to_json(const Hyperparams& h) {
  return {{"alpha_M", h.alpha_M},     {"beta_M", h.beta_M},     {"alpha_L", h.alpha_L},
          {"beta_L", h.beta_L},       {"theta", h.theta},       {"alpha_pos", h.alpha_pos},
          {"beta_pos", h.beta_pos},   {"alpha_neg", h.alpha_neg}, {"beta_neg", h.beta_neg}};
}

Hyperparams hyperparams_from_json(const json& j) {
  Hyperparams h;
  h.alpha_M = j.at("alpha_M").get<double>();
  h.beta_M = j.at("beta_M").get<double>();
  h.alpha_L = j.at("alpha_L").get<double>();
  h.beta_L = j.at("beta_L").get<double>();
  h.theta = j.at("theta").get<std::vector<double>>();
  h.alpha_pos = j.at("alpha_pos").get<double>();
  h.beta_pos = j.at("beta_pos").get<double>();
  h.alpha_neg = j.at("alpha_neg").get<double>();
  h.beta_neg = j.at("beta_neg").get<double>();
  return h;
}

}  // namespace

json to_json(const Model& m) {
  json rules = json::array();
  for (const auto& r : m.rules) {
    json conds = json::array();
    for (const auto& c : r.conditions()) {
      const FeatureSpec& f = m.features.at(c.feature);
      json values = json::array();
      for (ValueIndex v : c.values) values.push_back(f.vocabulary.at(v));
      conds.push_back({{"feature", f.name}, {"values", std::move(values)}});
    }
    rules.push_back(std::move(conds));
  }
  const auto& t = m.training;
  return {{"format", "mars-model"},
          {"format_version", kModelFormatVersion},
          {"label", {{"column", m.labels.column}, {"positive", m.labels.positive}, {"negative", m.labels.negative}}},
          {"features", features_to_json(m.features)},
          {"rules", std::move(rules)},
          {"hyperparameters", hyperparams_to_json(m.hyperparams)},
          {"training",
           {{"seed", t.seed},
            {"iterations", t.iterations},
            {"restarts", t.restarts},
            {"n_rows", t.n_rows},
            {"log_posterior", t.log_posterior},
            {"log_prior", t.log_prior},
            {"log_likelihood", t.log_likelihood},
            {"confusion",
             {{"tp", t.confusion.tp}, {"fp", t.confusion.fp}, {"tn", t.confusion.tn}, {"fn", t.confusion.fn}}}}}};
}

Model model_from_json(const json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != "mars-model") throw ModelFormatError("not a MARS model file");
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      throw ModelFormatError("unsupported model format_version " + std::to_string(version) + " (this build reads " +
                             std::to_string(kModelFormatVersion) + ")");
    Model m;
    const auto& lab = j.at("label");
    m.labels = {lab.at("column").get<std::string>(), lab.at("positive").get<std::string>(),
                lab.at("negative").get<std::string>()};
    m.features = features_from_json(j.at("features"));

    for (const auto& jr : j.at("rules")) {
      Rule r;
      for (const auto& jc : jr) {
        const auto name = jc.at("feature").get<std::string>();
        auto it = std::find_if(m.features.begin(), m.features.end(), [&](const FeatureSpec& f) { return f.name == name; });
        if (it == m.features.end()) throw ModelFormatError("rule references unknown feature '" + name + "'");
        if (r.has_feature(it->id)) throw ModelFormatError("rule repeats feature '" + name + "'");
        std::vector<ValueIndex> values;
        for (const auto& jv : jc.at("values")) {
          auto v = it->find(jv.get<std::string>());
          if (!v) throw ModelFormatError("unknown value '" + jv.get<std::string>() + "' for feature '" + name + "'");
          values.push_back(*v);
        }
        r.add(Condition(it->id, std::move(values)));
      }
      m.rules.push_back(std::move(r));
    }
    try {
      validate(m.rules, m.features);
    } catch (const std::invalid_argument& e) {
      throw ModelFormatError(std::string("invalid rule set: ") + e.what());
    }

    m.hyperparams = hyperparams_from_json(j.at("hyperparameters"));
    const auto& jt = j.at("training");
    auto& t = m.training;
    t.seed = jt.at("seed").get<std::uint64_t>();
    t.iterations = jt.at("iterations").get<std::size_t>();
    t.restarts = jt.at("restarts").get<std::size_t>();
    t.n_rows = jt.at("n_rows").get<std::size_t>();
    t.log_posterior = jt.at("log_posterior").get<double>();
    t.log_prior = jt.at("log_prior").get<double>();
    t.log_likelihood = jt.at("log_likelihood").get<double>();
    const auto& jc = jt.at("confusion");
    t.confusion = {jc.at("tp").get<std::size_t>(), jc.at("fp").get<std::size_t>(), jc.at("tn").get<std::size_t>(),
                   jc.at("fn").get<std::size_t>()};
    return m;
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("corrupt model file: ") + e.what());
  }
}

std::string dump_model(const Model& m) { return to_json(m).dump(2) + "\n"; }

void save_model(const Model& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file '" + path + "'");
  out << dump_model(m);
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open model file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ModelFormatError("corrupt model file '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

}  // namespace mars
