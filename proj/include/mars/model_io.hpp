#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mars/dataset.hpp"
#include "mars/discretize.hpp"
#include "mars/hyperparams.hpp"
#include "mars/rules.hpp"
#include "mars/scoring.hpp"

namespace mars {

inline constexpr int kModelFormatVersion = 1;

struct TrainingMetadata {
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  std::size_t n_rows = 0;
  double log_posterior = 0.0;
  double log_prior = 0.0;
  double log_likelihood = 0.0;
  Confusion confusion;
};

/// Everything needed to reproduce predictions: the feature encodings the
/// rules refer to, the rules, and how the model was obtained.
struct Model {
  std::vector<FeatureSpec> features;
  LabelCoding labels;
  RuleSet rules;
  Hyperparams hyperparams;
  TrainingMetadata training;
};

/// Feature encodings as JSON (also the discretization report).
nlohmann::json features_to_json(std::span<const FeatureSpec> features);
std::vector<FeatureSpec> features_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Model& m);
/// Throws ModelFormatError for unknown versions or inconsistent content.
Model model_from_json(const nlohmann::json& j);

std::string dump_model(const Model& m);
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

}  // namespace mars
