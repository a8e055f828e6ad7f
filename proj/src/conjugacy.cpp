#include "unipert/conjugacy.hpp"

#include "unipert/errors.hpp"
#include "unipert/pushforward.hpp"

#include <cmath>

namespace unipert {

ConjugacyMap::ConjugacyMap(ScalarField w, AlgebraElement z) : w_(std::move(w)), z_(std::move(z)) {}

GroupElement ConjugacyMap::operator()(const GroupElement& g) const {
  return g * exp_map(z_, w_(g));
}

GroupElement ConjugacyMap::inverse(const GroupElement& y, double tol, int max_iter) const {
  // p = y exp(-r Z) with r = w(p)
  double r = w_(y);
  for (int k = 0; k < max_iter; ++k) {
    const GroupElement p = y * exp_map(z_, -r);
    const double residual = r - w_(p);
    const double slope = 1.0 + w_.derivative(z_, p);
    if (!(slope > 0.0)) throw NumericalError("conjugacy inverse: 1 + Z w <= 0 on the fiber");
    const double delta = residual / slope;
    r -= delta;
    if (std::abs(delta) <= tol * (1.0 + std::abs(r))) return y * exp_map(z_, -r);
  }
  throw NumericalError("conjugacy inverse did not converge in " + std::to_string(max_iter) +
                       " iterations");
}

double conjugacy_residual(const ScalarField& w, const PerturbationData& p, double t,
                          const GroupElement& g, const IntegratorConfig& config) {
  const ConjugacyMap F(w, p.z());
  const GroupElement moved = flow_perturbed(FlowSpec::perturbed_unchecked(p, config), t, g);
  return distance(F(moved), F(g) * exp_map(p.u(), t));
}

namespace {

AlgebraElement frozen_velocity(const PerturbationData& p, const GroupElement& g) {
  return p.u() + p.beta(g) * p.z();
}

}  // namespace

double pushforward_identity_check(const ScalarField& w, const PerturbationData& p,
                                  const GroupElement& g, double fd_step) {
  if (!(fd_step > 0.0)) throw DomainError("finite-difference step must be > 0");
  const ConjugacyMap F(w, p.z());
  const AlgebraElement x = frozen_velocity(p, g);
  const Mat3 tangent =
      (F(g * exp_map(x, fd_step)).matrix() - F(g * exp_map(x, -fd_step)).matrix()) / (2.0 * fd_step);
  return (frame_coords_at(F(g), tangent) - p.u().coords()).norm();
}

ChainRuleTerms chain_rule_terms(const ScalarField& f, const ScalarField& w,
                                const PerturbationData& p, const GroupElement& g, double fd_step) {
  if (!(fd_step > 0.0)) throw DomainError("finite-difference step must be > 0");
  const ConjugacyMap F(w, p.z());
  const AlgebraElement x = frozen_velocity(p, g);
  const GroupElement image = F(g);

  ChainRuleTerms terms;
  terms.lhs = (f(F(g * exp_map(x, fd_step))) - f(F(g * exp_map(x, -fd_step)))) / (2.0 * fd_step);
  const double zf = f.derivative(p.z(), image);
  const double beta = p.beta(g);
  const double u_tilde_w = w.derivative(p.u(), g) + beta * w.derivative(p.z(), g);
  terms.z_term = zf * u_tilde_w;
  terms.u_term = f.derivative(p.u(), image);
  terms.beta_term = beta * zf;
  return terms;
}

BracketExpansion bracket_expansion_check(const Vec8& a, double c12, double c23, double c13) {
  const AlgebraElement v = AlgebraElement::from_coords(a);
  const AlgebraElement u = unipotent(c12, c23, c13);

  BracketExpansion out;
  out.bracket = unnormalized_diagonal(bracket(v, u).coords());

  const Vec8 b = unnormalized_diagonal(a);
  const double a31 = b[frame::E31], a21 = b[frame::E21], a32 = b[frame::E32];
  const double d1 = b[frame::H1], d2 = b[frame::H2];
  const double a12 = b[frame::E12], a23 = b[frame::E23];
  Vec8& d = out.display;
  d[frame::E31] = 0.0;
  d[frame::E21] = -c23 * a31;
  d[frame::E32] = c12 * a31;
  d[frame::H1] = -c12 * a21 - c13 * a31;
  d[frame::H2] = -c23 * a32 - c13 * a31;
  d[frame::E12] = -c13 * a32 + c12 * (2.0 * d1 - d2);
  d[frame::E23] = c13 * a21 + c23 * (2.0 * d2 - d1);
  d[frame::Z] = -c12 * a23 + c23 * a12 + c13 * (d1 + d2);

  out.residual = out.bracket - out.display;
  return out;
}

KakutaniSpec KakutaniSpec::shipped() {
  KakutaniSpec spec;
  spec.gr = [](const std::vector<int>& blocks) {
    double sum = 0.0;
    for (int d : blocks) sum += 0.5 * d * (d - 1);
    return sum;
  };
  return spec;
}

KakutaniResult kakutani_invariant(const AlgebraElement& v, const KakutaniSpec& spec) {
  if (v.is_zero()) throw DomainError("kakutani invariant needs a nonzero field");
  if (!spec.gr) throw DomainError("kakutani spec has no GR definition");
  KakutaniResult out;
  try {
    out.blocks = jordan_blocks(ad_matrix(v));
  } catch (const NumericalError&) {
    throw DomainError("kakutani invariant needs ad V nilpotent; got " + v.to_string());
  }
  out.value = spec.gr(out.blocks) + spec.offset;

  Vec8 rest = v.coords();
  rest[frame::Z] = 0.0;
  out.verified = rest.cwiseAbs().maxCoeff() <= 1e-12 * v.coords().cwiseAbs().maxCoeff();
  out.flag = out.verified ? "anchored: V is a multiple of Z"
                          : "definition unverified for this input (" + spec.name + ")";
  return out;
}

LambdaTransferSeries lambda_transfer_diagnostic(const ScalarField& lambda, double T,
                                                const GroupElement& g, int samples,
                                                const IntegratorConfig& config,
                                                const AlgebraElement& z) {
  if (!(T >= 0.0)) throw DomainError("T must be >= 0");
  if (samples < 1) throw DomainError("need at least one interval");
  if (!(lambda(g) > 0.0)) throw DomainError("lambda must be positive at the base point");

  LambdaTransferSeries out;
  out.times = uniform_grid(T, samples);
  const ScalarField rate = ScalarField::constant(1.0) / lambda;
  out.big_lambda = timechange_parameter_series(rate, z, out.times, g, config);
  out.excess.resize(out.times.size());
  for (std::size_t k = 0; k < out.times.size(); ++k) {
    if (!(lambda(g * exp_map(z, out.big_lambda[k])) > 0.0)) {
      throw DomainError("lambda is not positive along the orbit at t = " +
                        std::to_string(out.times[k]));
    }
    out.excess[k] = out.big_lambda[k] - out.times[k];
    out.sup_abs_excess = std::max(out.sup_abs_excess, std::abs(out.excess[k]));
    if (k > 0 && !(out.big_lambda[k] > out.big_lambda[k - 1])) out.strictly_increasing = false;
  }
  return out;
}

double telescoping_residual(const ScalarField& w, double T, const GroupElement& g, int samples,
                            const IntegratorConfig& config) {
  const AlgebraElement z = AlgebraElement::basis(frame::Z);
  const ScalarField lambda = ScalarField::constant(1.0) + w.along(z);
  const LambdaTransferSeries s = lambda_transfer_diagnostic(lambda, T, g, samples, config, z);
  const double w0 = w(g);
  double worst = 0.0;
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    const double dw = w(g * exp_map(z, s.big_lambda[k])) - w0;
    worst = std::max(worst, std::abs(s.excess[k] + dw));
  }
  return worst;
}

}  // namespace unipert
