#pragma once

// Perturbations U + beta Z, their invariant densities, and (U,Z)-cocycles.

#include "unipert/field.hpp"
#include "unipert/lie.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace unipert {

/// Sample points g = base * exp(x0 B0) ... exp(x7 B7) with each x_i uniform
/// in [-half_width, half_width]. The group is not compact, so every sup norm
/// in the library is a sampled sup over such a set (possibly enlarged with
/// orbit points).
struct SampleDomain {
  double half_width = 0.5;
  int count = 1000;
  std::uint64_t seed = 42;
  std::vector<GroupElement> base_points = {GroupElement::identity()};
};

std::vector<GroupElement> sample_points(const SampleDomain& domain);

/// Ordered product exp(x0 B0) ... exp(x7 B7).
GroupElement point_from_coordinates(const Vec8& x);

/// Perturbation data (beta, lambda) for the vector field U + beta Z, with the
/// Heisenberg triple of U. `w` is set when built from a transfer function.
struct PerturbationData {
  ScalarField beta;
  ScalarField lambda;
  std::optional<ScalarField> w;
  HeisenbergTriple triple;

  const AlgebraElement& u() const { return triple.u; }
  const AlgebraElement& w_dir() const { return triple.w; }
  const AlgebraElement& z() const { return triple.z; }
  double c() const { return triple.c; }

  /// lambda * (c + W beta), the integrand of the shearing averages.
  ScalarField shear_density() const;
};

/// Perturbation from explicit beta and lambda.
PerturbationData make_perturbation(const AlgebraElement& u, ScalarField beta,
                                   ScalarField lambda);

/// The unperturbed flow: beta = 0, lambda = 1.
PerturbationData unperturbed(const AlgebraElement& u);

/// beta = -U w / (1 + Z w), lambda = 1 + Z w. Throws DomainError when
/// Z w <= -1 at any of `samples`.
PerturbationData from_transfer(const ScalarField& w, const HeisenbergTriple& triple,
                               const std::vector<GroupElement>& samples);

/// U lambda + Z(beta lambda) at g.
double invariance_residual(const PerturbationData& p, const GroupElement& g);

/// (f, g) with U f + Z g = 0 expected. `mean_constant` stands in for the
/// global mean of lambda * beta.
struct CocyclePair {
  ScalarField f;
  ScalarField g;
  double mean_constant = 0.0;
  AlgebraElement u;
  AlgebraElement z;
};

/// f = lambda - 1, g = lambda beta - mean_constant.
CocyclePair cocycle_from_perturbation(const PerturbationData& p, double mean_constant);

/// U f + Z g at the point.
double cocycle_residual(const CocyclePair& pair, const GroupElement& point);

struct ConditionReport {
  double max_abs_w_beta = 0.0;
  double abs_c = 0.0;
  double min_lambda = 0.0;
  double max_lambda = 0.0;
  bool passed = false;  // max |W beta| < |c| and min lambda > 0
};

/// Sampled check of sup |W beta| < |c| and lambda > 0.
ConditionReport condition_check(const PerturbationData& p,
                                const std::vector<GroupElement>& samples);

}  // namespace unipert
