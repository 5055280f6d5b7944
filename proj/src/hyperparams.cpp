#include "mars/hyperparams.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "mars/errors.hpp"
#include "mars/table.hpp"

namespace mars {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double positive_number(std::string_view key, std::string_view text) {
  auto x = parse_number(text);
  if (!x || !(*x > 0.0)) throw std::invalid_argument("hyperparameter " + std::string(key) + " must be a positive number");
  return *x;
}

}  // namespace

Hyperparams Hyperparams::resolved(std::size_t n_features) const {
  Hyperparams h = *this;
  if (h.theta.empty()) h.theta.assign(n_features, 1.0);
  else if (h.theta.size() == 1 && n_features > 1) h.theta.assign(n_features, h.theta.front());
  return h;
}

void Hyperparams::validate(std::size_t n_features) const {
  const std::pair<const char*, double> scalars[] = {
      {"alpha_M", alpha_M},     {"beta_M", beta_M},     {"alpha_L", alpha_L},     {"beta_L", beta_L},
      {"alpha_pos", alpha_pos}, {"beta_pos", beta_pos}, {"alpha_neg", alpha_neg}, {"beta_neg", beta_neg}};
  for (auto [name, v] : scalars)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("hyperparameter ") + name + " must be positive");
  if (!theta.empty() && theta.size() != n_features)
    throw std::invalid_argument("theta has " + std::to_string(theta.size()) + " entries for " +
                                std::to_string(n_features) + " features");
  for (double t : theta)
    if (!(t > 0.0)) throw std::invalid_argument("theta entries must be positive");
}

std::vector<std::string> Hyperparams::bound_precondition_violations() const {
  std::vector<std::string> out;
  if (!(alpha_M < beta_M)) out.emplace_back("alpha_M < beta_M");
  if (!(alpha_L < beta_L)) out.emplace_back("alpha_L < beta_L");
  if (!(alpha_pos > beta_pos)) out.emplace_back("alpha_pos > beta_pos");
  if (!(alpha_neg > beta_neg)) out.emplace_back("alpha_neg > beta_neg");
  return out;
}

void Hyperparams::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "theta") {
    theta.clear();
    while (!value.empty()) {
      const auto comma = value.find(',');
      theta.push_back(positive_number(key, value.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      value.remove_prefix(comma + 1);
    }
    return;
  }
  double* field = nullptr;
  if (key == "alpha_M") field = &alpha_M;
  else if (key == "beta_M") field = &beta_M;
  else if (key == "alpha_L") field = &alpha_L;
  else if (key == "beta_L") field = &beta_L;
  else if (key == "alpha_pos") field = &alpha_pos;
  else if (key == "beta_pos") field = &beta_pos;
  else if (key == "alpha_neg") field = &alpha_neg;
  else if (key == "beta_neg") field = &beta_neg;
  else throw std::invalid_argument("unknown hyperparameter '" + std::string(key) + "'");
  *field = positive_number(key, value);
}

Hyperparams read_hyperparams(std::istream& in, Hyperparams base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("hyperparameter config line " + std::to_string(line_no) + ": expected key = value");
    base.set(s.substr(0, eq), s.substr(eq + 1));
  }
  return base;
}

Hyperparams read_hyperparams_file(const std::string& path, Hyperparams base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open hyperparameter config '" + path + "'");
  return read_hyperparams(in, std::move(base));
}

}  // namespace mars
