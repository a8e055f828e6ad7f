#include "unipert/shear.hpp"

#include "unipert/errors.hpp"
#include "unipert/parallel.hpp"
#include "unipert/pushforward.hpp"

#include <cmath>
#include <limits>

namespace unipert {

namespace {

FlowSpec spec_of(const PerturbationData& p, const IntegratorConfig& config) {
  return FlowSpec::perturbed_unchecked(p, config);
}

void require_regime(double t) {
  if (!(t >= 1.0)) throw DomainError("shearing quantities need t >= 1");
}

}  // namespace

GroupElement shear_point(const PerturbationData& p, double t, double s, const GroupElement& base,
                         const IntegratorConfig& config) {
  require_regime(t);
  const FlowSpec spec = spec_of(p, config);
  const GroupElement back = flow_perturbed(spec, -t, base);
  return flow_perturbed(spec, t, back * exp_map(p.w_dir(), s / t));
}

ShearCurve shear_curve(const PerturbationData& p, double t, double sigma, const GroupElement& base,
                       int n_samples, const IntegratorConfig& config) {
  require_regime(t);
  if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
  if (n_samples < 2) throw DomainError("a shear curve needs at least 2 samples");
  const FlowSpec spec = spec_of(p, config);
  const GroupElement back = flow_perturbed(spec, -t, base);

  ShearCurve curve;
  curve.t = t;
  curve.sigma = sigma;
  curve.base_point = base;
  curve.s.resize(static_cast<std::size_t>(n_samples));
  curve.samples.resize(static_cast<std::size_t>(n_samples));
  for (int k = 0; k < n_samples; ++k) {
    curve.s[static_cast<std::size_t>(k)] = sigma * k / (n_samples - 1);
  }
  curve.s.back() = sigma;
  curve.samples[0] = base;
  parallel_for(curve.s.size() - 1, [&](std::size_t i) {
    const double s = curve.s[i + 1];
    curve.samples[i + 1] = flow_perturbed(spec, t, back * exp_map(p.w_dir(), s / t));
  });
  return curve;
}

double ell_t(const PerturbationData& p, double t, const GroupElement& base,
             const IntegratorConfig& config) {
  return orbit_average(p.shear_density(), spec_of(p, config), t, base, Direction::kBackward);
}

double tangent_residual(const PerturbationData& p, double t, const GroupElement& base,
                        double fd_step, const IntegratorConfig& config) {
  require_regime(t);
  if (!(fd_step > 0.0)) throw DomainError("finite-difference step must be > 0");
  const FlowSpec spec = spec_of(p, config);
  const GroupElement back = flow_perturbed(spec, -t, base);
  auto at = [&](double s) {
    return flow_perturbed(spec, t, back * exp_map(p.w_dir(), s / t)).matrix();
  };
  const Mat3 tangent = (at(fd_step) - at(-fd_step)) / (2.0 * fd_step);
  const Vec8 measured = frame_coords_at(base, tangent);
  const Vec8 predicted =
      ((1.0 / t) * p.w_dir() + (ell_t(p, t, base, config) / p.lambda(base)) * p.z()).coords();
  return (measured - predicted).norm();
}

SupNorms sampled_sup_norms(const PerturbationData& p, double t, const GroupElement& base,
                           const std::vector<GroupElement>& cloud, int stride,
                           const IntegratorConfig& config) {
  if (stride < 1) throw DomainError("stride must be >= 1");
  const ScalarField q = p.shear_density();
  const ScalarField w_beta = p.beta.along(p.w_dir());
  const ScalarField z_q = q.along(p.z());
  const ScalarField w_q = q.along(p.w_dir());

  SupNorms n;
  n.min_lambda = std::numeric_limits<double>::infinity();
  n.max_lambda = -std::numeric_limits<double>::infinity();
  auto visit = [&](const Mat3& g) {
    const double lam = p.lambda(g);
    n.min_lambda = std::min(n.min_lambda, lam);
    n.max_lambda = std::max(n.max_lambda, lam);
    n.sup_w_beta = std::max(n.sup_w_beta, std::abs(w_beta(g)));
    n.c1 = std::max(n.c1, std::abs(q(g)));
    n.c2 = std::max(n.c2, std::abs(z_q(g)));
    n.sup_w_q = std::max(n.sup_w_q, std::abs(w_q(g)));
  };
  const int steps = step_count(t, config.step);
  int k = 0;
  integrate(spec_of(p, config), -t, base, {}, {}, [&](double, const Mat3& g, const StateVector&) {
    if (k % stride == 0 || k == steps) visit(g);
    ++k;
  });
  for (const auto& g : cloud) visit(g.matrix());
  return n;
}

EllBounds ell_bounds(const PerturbationData& p, double t, const GroupElement& base,
                     const std::vector<GroupElement>& cloud, double fd_step,
                     const IntegratorConfig& config) {
  require_regime(t);
  EllBounds b;
  auto diff = [&](const AlgebraElement& v) {
    const double plus = ell_t(p, t, base * exp_map(v, fd_step), config);
    const double minus = ell_t(p, t, base * exp_map(v, -fd_step), config);
    return (plus - minus) / (2.0 * fd_step);
  };
  b.z_ell = diff(p.z());
  b.w_ell = diff(p.w_dir());
  b.norms = sampled_sup_norms(p, t, base, cloud, 10, config);
  const SupNorms& n = b.norms;
  b.z_bound = n.max_lambda / n.min_lambda * n.c2;
  b.w_bound = (n.sup_w_q + n.c1 * n.c2 / (2.0 * n.min_lambda)) * t;
  return b;
}

ZTildeFactor w_pushforward_of_ztilde(const PerturbationData& p, double t, double s,
                                     const GroupElement& g, const IntegratorConfig& config) {
  require_regime(t);
  ZTildeFactor f;
  if (s == 0.0) return f;
  const AlgebraElement v = (1.0 / t) * p.w_dir();
  const FlowSpec flow_w = FlowSpec::constant(v, config);

  const ScalarField log_rate = p.lambda.along(p.w_dir()) / p.lambda;
  const OrbitIntegral r = orbit_integral(log_rate, flow_w, s, g);
  f.quadrature = std::exp(r.integral / t);

  const AlgebraElement z_tilde = (1.0 / p.lambda(g)) * p.z();
  const FrameCoefficients fc = integrate_pushforward(flow_w, z_tilde, s, g);
  const GroupElement x = fc.points.back();
  f.variational = fc.coeffs.back()[frame::Z] * p.lambda(x);

  f.closed_form = p.lambda(x) / p.lambda(g);
  return f;
}

LimitComparison limit_comparison(const PerturbationData& p, const std::vector<double>& t_list,
                                 double sigma, const GroupElement& base, int n_samples,
                                 const IntegratorConfig& config) {
  LimitComparison out;
  out.t = t_list;
  out.ell_hat.resize(t_list.size());
  out.max_distance.resize(t_list.size());
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    const double t = t_list[i];
    const ShearCurve curve = shear_curve(p, t, sigma, base, n_samples, config);
    const double ell = ell_t(p, t, base, config);
    const ScalarField f = ScalarField::constant(ell) / p.lambda;
    const std::vector<double> rho = timechange_parameter_series(f, p.z(), curve.s, base, config);
    double worst = 0.0;
    for (std::size_t k = 0; k < curve.s.size(); ++k) {
      worst = std::max(worst, distance(curve.samples[k], base * exp_map(p.z(), rho[k])));
    }
    out.ell_hat[i] = ell;
    out.max_distance[i] = worst;
  }
  return out;
}

ShearDiagnostics shear_diagnostics(const PerturbationData& p, double t, double sigma,
                                   const GroupElement& base, const std::vector<GroupElement>& cloud,
                                   int n_samples, const IntegratorConfig& config) {
  ShearDiagnostics d;
  d.curve = shear_curve(p, t, sigma, base, n_samples, config);
  d.ell_t = ell_t(p, t, base, config);
  d.bounds = ell_bounds(p, t, base, cloud, 1e-4, config);

  const std::size_t n = d.curve.samples.size();
  d.tangent_residuals.assign(n, 0.0);
  // h_{-t} of a curve sample is on the same W-segment, so the identity holds there too
  parallel_for(n, [&](std::size_t k) {
    d.tangent_residuals[k] = tangent_residual(p, t, d.curve.samples[k], 1e-3, config);
  });

  const ScalarField f = ScalarField::constant(d.ell_t) / p.lambda;
  const std::vector<double> rho = timechange_parameter_series(f, p.z(), d.curve.s, base, config);
  d.limit_distance.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    d.limit_distance[k] = distance(d.curve.samples[k], base * exp_map(p.z(), rho[k]));
  }
  return d;
}

double max_curve_speed(const ShearCurve& curve) {
  double speed = 0.0;
  for (std::size_t k = 0; k + 1 < curve.samples.size(); ++k) {
    const double ds = curve.s[k + 1] - curve.s[k];
    const Mat3 chord = curve.samples[k + 1].matrix() - curve.samples[k].matrix();
    speed = std::max(speed, frame_coords_at(curve.samples[k], chord).norm() / ds);
  }
  return speed;
}

double lipschitz_bound(const PerturbationData& p, const SupNorms& norms) {
  return 1.0 + norms.max_lambda / norms.min_lambda * (std::abs(p.c()) + norms.sup_w_beta);
}

}  // namespace unipert
