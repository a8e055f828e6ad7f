#pragma once

// Experiment configuration read from an INI-style file:
//
//   [perturbation]   u = "c12 c23 c13";  w = "<expr>"  or  beta = ..., lambda = ...
//   [integrator]     method, step, tolerance
//   [experiment]     t, tmax, sigma, samples, seed, base_points, half_width,
//                    condition_samples, field, a
//   [output]         path ("-" for stdout), format (csv | json)
//
// Values may be wrapped in double quotes. Lines starting with ';' or '#'
// are comments.

#include "unipert/flow.hpp"
#include "unipert/perturbation.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace unipert::app {

struct PerturbationSection {
  std::array<double, 3> u{1.0, 0.0, 0.0};
  std::optional<std::string> w;
  std::optional<std::string> beta;
  std::optional<std::string> lambda;
};

struct ExperimentSection {
  double t = 10.0;
  double tmax = 128.0;
  double sigma = 1.0;
  int samples = 64;
  std::uint64_t seed = 42;
  int base_points = 4;
  double half_width = 0.5;
  int condition_samples = 1000;
  std::string field = "Z";
  double a = 1.0;
};

struct OutputSection {
  std::optional<std::string> path;
  std::string format = "csv";
};

struct ExperimentConfig {
  PerturbationSection perturbation;
  IntegratorConfig integrator;
  ExperimentSection experiment;
  OutputSection output;
  std::string source = "<defaults>";

  /// Shipped defaults: w = 0.05 sin(m12 + m13) with U = E12, output to stdout.
  static ExperimentConfig defaults();
};

/// Throws ParseError (with line) for malformed files or values, and for
/// unknown sections or keys.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");
ExperimentConfig load_config(const std::string& path);

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> notes;
  bool ok() const { return violations.empty(); }
};

/// Every violated invariant, including the sampled smallness condition on
/// W beta. Never throws.
ValidationReport validate(const ExperimentConfig& config);

/// Perturbation described by the config (no condition check).
PerturbationData build_perturbation(const ExperimentConfig& config);

/// Seeded base points from the experiment section.
std::vector<GroupElement> config_base_points(const ExperimentConfig& config);

/// Flat "section.key = value" view of the resolved config, in a fixed order.
std::vector<std::pair<std::string, std::string>> resolved_entries(const ExperimentConfig& config);

/// "%.17g".
std::string format_number(double x);

}  // namespace unipert::app
