#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "hypwalk/experiments.hpp"

namespace hypwalk {

// Everything a CLI run reads from its config file. Sections [graph],
// [weights], [experiment]; unknown sections or keys are errors.
struct RunConfig {
  ExperimentConfig exp;
  bool replicas_set = false;
  std::string out;
  std::string format = "json";
  std::string method = "quadrature";   // phi: quadrature | mc
  std::string capacity = "alpha";      // flow-build: alpha | boosted | uniform
  double capacity_value = 1.0;
  std::optional<double> strength;      // flow-build: default is the box min-cut
  bool lift = false;
};

RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

// Comma separated numbers; rows of a matrix are separated by '|'.
std::vector<double> parse_doubles(const std::string& text, const std::string& key);
std::vector<std::vector<double>> parse_matrix(const std::string& text, const std::string& key);

}  // namespace hypwalk
