#include "unipert/perturbation.hpp"

#include "unipert/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace unipert {

namespace {

// Uniform double in [-1, 1) from raw 64-bit output; independent of the
// standard library's distribution implementations.
double symmetric_unit(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

}  // namespace

GroupElement point_from_coordinates(const Vec8& x) {
  Mat3 g = Mat3::Identity();
  for (int i = 0; i < kDim; ++i) g = g * exp_map(AlgebraElement::basis(i), x[i]).matrix();
  return GroupElement(g);
}

std::vector<GroupElement> sample_points(const SampleDomain& domain) {
  std::mt19937_64 rng(domain.seed);
  std::vector<GroupElement> out;
  out.reserve(static_cast<std::size_t>(domain.count));
  const std::size_t nbase = std::max<std::size_t>(1, domain.base_points.size());
  for (int k = 0; k < domain.count; ++k) {
    Vec8 x;
    for (int i = 0; i < kDim; ++i) x[i] = domain.half_width * symmetric_unit(rng);
    const GroupElement base = domain.base_points.empty()
                                  ? GroupElement::identity()
                                  : domain.base_points[static_cast<std::size_t>(k) % nbase];
    out.push_back(base * point_from_coordinates(x));
  }
  return out;
}

ScalarField PerturbationData::shear_density() const {
  return lambda * (ScalarField::constant(c()) + beta.along(w_dir()));
}

PerturbationData make_perturbation(const AlgebraElement& u, ScalarField beta,
                                   ScalarField lambda) {
  PerturbationData p;
  p.triple = heisenberg_partner(u);
  p.beta = std::move(beta);
  p.lambda = std::move(lambda);
  return p;
}

PerturbationData unperturbed(const AlgebraElement& u) {
  return make_perturbation(u, ScalarField(), ScalarField::constant(1.0));
}

PerturbationData from_transfer(const ScalarField& w, const HeisenbergTriple& triple,
                               const std::vector<GroupElement>& samples) {
  const ScalarField zw = w.along(triple.z);
  for (const auto& g : samples) {
    const double v = zw(g);
    if (!(v > -1.0)) {
      throw DomainError("transfer function violates Z w > -1 (Z w = " + std::to_string(v) +
                        " at a sample point)");
    }
  }
  PerturbationData p;
  p.triple = triple;
  p.lambda = ScalarField::constant(1.0) + zw;
  p.beta = -w.along(triple.u) / p.lambda;
  p.w = w;
  return p;
}

double invariance_residual(const PerturbationData& p, const GroupElement& g) {
  return p.lambda.derivative(p.u(), g) + (p.beta * p.lambda).derivative(p.z(), g);
}

CocyclePair cocycle_from_perturbation(const PerturbationData& p, double mean_constant) {
  CocyclePair pair;
  pair.f = p.lambda - ScalarField::constant(1.0);
  pair.g = p.lambda * p.beta - ScalarField::constant(mean_constant);
  pair.mean_constant = mean_constant;
  pair.u = p.u();
  pair.z = p.z();
  return pair;
}

double cocycle_residual(const CocyclePair& pair, const GroupElement& point) {
  return pair.f.derivative(pair.u, point) + pair.g.derivative(pair.z, point);
}

ConditionReport condition_check(const PerturbationData& p,
                                const std::vector<GroupElement>& samples) {
  ConditionReport r;
  r.abs_c = std::abs(p.c());
  r.min_lambda = std::numeric_limits<double>::infinity();
  r.max_lambda = -std::numeric_limits<double>::infinity();
  const ScalarField w_beta = p.beta.along(p.w_dir());
  for (const auto& g : samples) {
    r.max_abs_w_beta = std::max(r.max_abs_w_beta, std::abs(w_beta(g)));
    const double lam = p.lambda(g);
    r.min_lambda = std::min(r.min_lambda, lam);
    r.max_lambda = std::max(r.max_lambda, lam);
  }
  if (samples.empty()) r.min_lambda = r.max_lambda = p.lambda(GroupElement::identity());
  r.passed = r.max_abs_w_beta < r.abs_c && r.min_lambda > 0.0;
  return r;
}

}  // namespace unipert
