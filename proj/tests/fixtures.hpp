#pragma once

// Shared test inputs: transfer functions, perturbations, base points.

#include "unipert/field.hpp"
#include "unipert/lie.hpp"
#include "unipert/perturbation.hpp"

#include <string>
#include <vector>

namespace fixtures {

using namespace unipert;

struct TransferCase {
  std::string name;
  AlgebraElement u;
  std::string w;
};

/// Transfer functions with non-trivial U w for the given U, small amplitude.
inline std::vector<TransferCase> transfer_cases() {
  return {
      {"sin12+13 / E12", unipotent(1.0, 0.0, 0.0), "0.05*sin(m12 + m13)"},
      {"cos-product / E12", unipotent(1.0, 0.0, 0.0), "0.03*cos(m12 - 0.5*m13)*m11"},
      {"sin23 / E12+E23", unipotent(1.0, 1.0, 0.0), "0.04*sin(m23 + 0.3*m13)"},
  };
}

/// w = eps sin(m12 + m13) with U = E12 for a sweep of amplitudes.
inline std::string sweep_w(double eps) {
  return std::to_string(eps) + "*sin(m12 + m13)";
}

inline PerturbationData transfer_perturbation(const AlgebraElement& u, const std::string& w) {
  SampleDomain domain;
  domain.count = 200;
  return from_transfer(ScalarField::parse(w), heisenberg_partner(u), sample_points(domain));
}

inline std::vector<GroupElement> base_points(int n, std::uint64_t seed, double half_width = 0.5) {
  SampleDomain domain;
  domain.count = n;
  domain.seed = seed;
  domain.half_width = half_width;
  return sample_points(domain);
}

}  // namespace fixtures
