#include "unipert/flow.hpp"

#include "unipert/errors.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

namespace unipert {

std::string_view method_name(Method m) {
  return m == Method::kLieRK4 ? "lie-rk4" : "rk4";
}

Method parse_method(std::string_view name) {
  if (name == "lie-rk4" || name == "lie") return Method::kLieRK4;
  if (name == "rk4" || name == "classical-rk4") return Method::kClassicalRK4;
  throw DomainError("unknown integrator method '" + std::string(name) +
                    "' (expected lie-rk4 or rk4)");
}

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("integrator step must be > 0");
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
    throw DomainError("integrator tolerance must be > 0");
  }
}

FlowSpec FlowSpec::constant(const AlgebraElement& v, IntegratorConfig config) {
  config.validate();
  FlowSpec s;
  s.kind_ = FlowKind::kConstant;
  s.base_ = v;
  s.config_ = config;
  return s;
}

FlowSpec FlowSpec::perturbed(PerturbationData p, IntegratorConfig config) {
  SampleDomain domain;
  domain.count = 200;
  const ConditionReport report = condition_check(p, sample_points(domain));
  if (!report.passed) {
    std::ostringstream msg;
    msg << "perturbation fails the sampled condition sup|W beta| < |c|, lambda > 0"
        << " (sup|W beta| = " << report.max_abs_w_beta << ", |c| = " << report.abs_c
        << ", min lambda = " << report.min_lambda << ")";
    throw DomainError(msg.str());
  }
  return perturbed_unchecked(std::move(p), config);
}

FlowSpec FlowSpec::perturbed_unchecked(PerturbationData p, IntegratorConfig config) {
  config.validate();
  FlowSpec s;
  s.kind_ = FlowKind::kPerturbed;
  s.base_ = p.u();
  s.phi_ = p.beta;
  s.direction_ = p.z();
  s.perturbation_ = std::move(p);
  s.config_ = config;
  return s;
}

FlowSpec FlowSpec::time_change(ScalarField f, const AlgebraElement& z, IntegratorConfig config) {
  config.validate();
  FlowSpec s;
  s.kind_ = FlowKind::kTimeChange;
  s.phi_ = std::move(f);
  s.direction_ = z;
  s.config_ = config;
  return s;
}

FlowSpec FlowSpec::general(const AlgebraElement& base, ScalarField phi,
                           const AlgebraElement& direction, IntegratorConfig config) {
  config.validate();
  FlowSpec s;
  s.kind_ = FlowKind::kGeneral;
  s.base_ = base;
  s.phi_ = std::move(phi);
  s.direction_ = direction;
  s.config_ = config;
  return s;
}

FlowSpec FlowSpec::with_config(IntegratorConfig config) const {
  config.validate();
  FlowSpec s = *this;
  s.config_ = config;
  return s;
}

const PerturbationData& FlowSpec::perturbation() const {
  if (!perturbation_) throw DomainError("flow spec does not carry perturbation data");
  return *perturbation_;
}

Mat3 FlowSpec::velocity(const Mat3& g) const {
  if (phi_.is_zero() || direction_.is_zero()) return base_.matrix();
  return base_.matrix() + phi_(g) * direction_.matrix();
}

AlgebraElement FlowSpec::velocity(const GroupElement& g) const {
  if (phi_.is_zero() || direction_.is_zero()) return base_;
  return base_ + phi_(g) * direction_;
}

namespace {
std::atomic<double> g_drift_ratio{0.0};

void record_drift_ratio(double r) {
  double seen = g_drift_ratio.load(std::memory_order_relaxed);
  while (r > seen && !g_drift_ratio.compare_exchange_weak(seen, r, std::memory_order_relaxed)) {
  }
}
}  // namespace

double observed_drift_ratio() { return g_drift_ratio.load(); }
void reset_observed_drift_ratio() { g_drift_ratio.store(0.0); }

int step_count(double t, double step) {
  if (t == 0.0) return 0;
  const double ratio = std::abs(t) / step;
  return std::max(1, static_cast<int>(std::ceil(ratio - 1e-9 * ratio)));
}

namespace {

Mat3 commutator(const Mat3& a, const Mat3& b) { return a * b - b * a; }

// Inverse of the right-trivialized differential of exp, truncated after the
// term that still affects fourth-order accuracy.
Mat3 dexpinv(const Mat3& theta, const Mat3& a) {
  const Mat3 c1 = commutator(theta, a);
  return a + 0.5 * c1 + (1.0 / 12.0) * commutator(theta, c1);
}

// Advances the factor N of g = g0 N. Steps only ever right-multiply N, so
// for flows inside the upper nilpotent subalgebra N stays exactly
// unitriangular in floating point.
class Stepper {
 public:
  Stepper(const FlowSpec& spec, const AugmentedRhs& rhs, const Mat3& g0, Eigen::Index dim)
      : spec_(spec), rhs_(rhs), g0_(g0) {
    for (auto& d : dy_) d.resize(dim);
    stage_.resize(dim);
  }

  void step(Mat3& n, StateVector& y, double h) {
    if (spec_.config().method == Method::kLieRK4) {
      lie_step(n, y, h);
    } else {
      classical_step(n, y, h);
    }
  }

 private:
  void eval_rhs(const Mat3& g, const StateVector& y, StateVector& dy) {
    if (rhs_) rhs_(g, y, dy);
  }

  void lie_step(Mat3& n, StateVector& y, double h) {
    const bool aug = y.size() > 0;
    const Mat3 g = g0_ * n;
    const Mat3 k1 = spec_.velocity(g);
    if (aug) eval_rhs(g, y, dy_[0]);

    Mat3 theta = 0.5 * h * k1;
    Mat3 gs = g0_ * (n * exp_matrix(theta));
    const Mat3 k2 = dexpinv(theta, spec_.velocity(gs));
    if (aug) {
      stage_ = y + 0.5 * h * dy_[0];
      eval_rhs(gs, stage_, dy_[1]);
    }

    theta = 0.5 * h * k2;
    gs = g0_ * (n * exp_matrix(theta));
    const Mat3 k3 = dexpinv(theta, spec_.velocity(gs));
    if (aug) {
      stage_ = y + 0.5 * h * dy_[1];
      eval_rhs(gs, stage_, dy_[2]);
    }

    theta = h * k3;
    gs = g0_ * (n * exp_matrix(theta));
    const Mat3 k4 = dexpinv(theta, spec_.velocity(gs));
    if (aug) {
      stage_ = y + h * dy_[2];
      eval_rhs(gs, stage_, dy_[3]);
    }

    n = n * exp_matrix((h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    if (aug) y += (h / 6.0) * (dy_[0] + 2.0 * dy_[1] + 2.0 * dy_[2] + dy_[3]);
  }

  // RK4 on the entries of N: N' = N A(g0 N).
  void classical_step(Mat3& n, StateVector& y, double h) {
    const bool aug = y.size() > 0;
    Mat3 g = g0_ * n;
    const Mat3 k1 = n * spec_.velocity(g);
    if (aug) eval_rhs(g, y, dy_[0]);

    Mat3 ns = n + 0.5 * h * k1;
    g = g0_ * ns;
    const Mat3 k2 = ns * spec_.velocity(g);
    if (aug) {
      stage_ = y + 0.5 * h * dy_[0];
      eval_rhs(g, stage_, dy_[1]);
    }

    ns = n + 0.5 * h * k2;
    g = g0_ * ns;
    const Mat3 k3 = ns * spec_.velocity(g);
    if (aug) {
      stage_ = y + 0.5 * h * dy_[1];
      eval_rhs(g, stage_, dy_[2]);
    }

    ns = n + h * k3;
    g = g0_ * ns;
    const Mat3 k4 = ns * spec_.velocity(g);
    if (aug) {
      stage_ = y + h * dy_[2];
      eval_rhs(g, stage_, dy_[3]);
    }

    n += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (aug) y += (h / 6.0) * (dy_[0] + 2.0 * dy_[1] + 2.0 * dy_[2] + dy_[3]);
  }

  const FlowSpec& spec_;
  const AugmentedRhs& rhs_;
  Mat3 g0_;
  std::array<StateVector, 4> dy_;
  StateVector stage_;
};

}  // namespace

IntegrationResult integrate(const FlowSpec& spec, double t, const GroupElement& g0,
                            const StateVector& y0, const AugmentedRhs& rhs,
                            const StepObserver& observer) {
  if (y0.size() > 0 && !rhs) throw DomainError("augmented state given without a right-hand side");
  const IntegratorConfig& cfg = spec.config();
  const int n = step_count(t, cfg.step);
  const double h = n == 0 ? 0.0 : t / n;

  IntegrationResult result;
  const Mat3& g = g0.matrix();
  Mat3 factor = Mat3::Identity();
  StateVector y = y0;
  if (observer) observer(0.0, g, y);

  Stepper stepper(spec, rhs, g, y.size());
  for (int k = 1; k <= n; ++k) {
    stepper.step(factor, y, h);
    const double tau = k == n ? t : k * h;
    if (!factor.allFinite() || !y.allFinite()) {
      std::ostringstream msg;
      msg << "integration diverged at t = " << tau << " (method " << method_name(cfg.method)
          << ", step " << h << ")";
      throw NumericalError(msg.str());
    }
    const double drift = std::abs(factor.determinant() - 1.0);
    result.max_det_drift = std::max(result.max_det_drift, drift);
    const double allowed = cfg.tolerance * std::max(1.0, std::abs(tau) / 10.0);
    record_drift_ratio(drift / allowed);
    if (!(drift <= allowed)) {
      std::ostringstream msg;
      msg << "determinant drift " << drift << " exceeds " << allowed << " at t = " << tau
          << " (method " << method_name(cfg.method) << ", step " << h << ")";
      throw NumericalError(msg.str());
    }
    if (observer) observer(tau, g * factor, y);
  }
  result.point = GroupElement(g * factor);
  result.state = std::move(y);
  result.steps = n;
  return result;
}

Trajectory trajectory(const FlowSpec& spec, double t, const GroupElement& g0, int stride) {
  if (stride < 1) throw DomainError("trajectory stride must be >= 1");
  Trajectory traj;
  const int n = step_count(t, spec.config().step);
  int k = 0;
  integrate(spec, t, g0, {}, {}, [&](double tau, const Mat3& g, const StateVector&) {
    if (k % stride == 0 || k == n) {
      traj.times.push_back(tau);
      traj.points.emplace_back(g);
    }
    ++k;
  });
  return traj;
}

GroupElement flow_constant(const AlgebraElement& v, double t, const GroupElement& g) {
  return g * exp_map(v, t);
}

GroupElement flow_perturbed(const FlowSpec& spec, double t, const GroupElement& g) {
  if (spec.kind() != FlowKind::kPerturbed) throw DomainError("flow_perturbed needs a perturbed spec");
  return integrate(spec, t, g).point;
}

GroupElement flow(const FlowSpec& spec, double t, const GroupElement& g) {
  if (spec.kind() == FlowKind::kConstant) return flow_constant(spec.base(), t, g);
  if (spec.kind() == FlowKind::kTimeChange) {
    return flow_timechange(spec.phi(), spec.direction(), t, g, spec.config()).point;
  }
  return integrate(spec, t, g).point;
}

namespace {

// Classical RK4 for rho' = f(g exp(rho Z)) over [0, t] from rho0.
class ScalarTimeChange {
 public:
  ScalarTimeChange(const ScalarField& f, const AlgebraElement& z, const GroupElement& g)
      : f_(f), z_(z.matrix()), g_(g.matrix()) {
    const double f0 = f_(g_);
    if (!(f0 != 0.0) || !std::isfinite(f0)) {
      throw NumericalError("time-change function vanishes at the base point");
    }
    sign_ = f0 > 0.0 ? 1.0 : -1.0;
  }

  double advance(double rho, double t, double step) const {
    const int n = step_count(t, step);
    const double h = n == 0 ? 0.0 : t / n;
    for (int k = 0; k < n; ++k) {
      const double k1 = eval(rho);
      const double k2 = eval(rho + 0.5 * h * k1);
      const double k3 = eval(rho + 0.5 * h * k2);
      const double k4 = eval(rho + h * k3);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
  }

  Mat3 point(double rho) const { return g_ * exp_matrix(rho * z_); }

 private:
  double eval(double rho) const {
    const double v = f_(point(rho));
    if (!(v * sign_ > 0.0)) {
      std::ostringstream msg;
      msg << "time-change function changes sign along the orbit (value " << v << " at rho = "
          << rho << ")";
      throw NumericalError(msg.str());
    }
    return v;
  }

  const ScalarField& f_;
  Mat3 z_;
  Mat3 g_;
  double sign_ = 1.0;
};

}  // namespace

TimeChangeResult flow_timechange(const ScalarField& f, const AlgebraElement& z, double t,
                                 const GroupElement& g, const IntegratorConfig& config) {
  config.validate();
  const ScalarTimeChange solver(f, z, g);
  TimeChangeResult r;
  r.rho = solver.advance(0.0, t, config.step);
  r.point = GroupElement(solver.point(r.rho));
  return r;
}

std::vector<double> timechange_parameter_series(const ScalarField& f, const AlgebraElement& z,
                                                const std::vector<double>& times,
                                                const GroupElement& g,
                                                const IntegratorConfig& config) {
  config.validate();
  const ScalarTimeChange solver(f, z, g);
  std::vector<double> out;
  out.reserve(times.size());
  double rho = 0.0;
  double prev = 0.0;
  for (double t : times) {
    if (t < prev) throw DomainError("time samples must be non-decreasing from 0");
    rho = solver.advance(rho, t - prev, config.step);
    out.push_back(rho);
    prev = t;
  }
  return out;
}

OrbitIntegral orbit_integral(const ScalarField& q, const FlowSpec& spec, double t,
                             const GroupElement& g) {
  StateVector y0 = StateVector::Zero(1);
  const AugmentedRhs rhs = [&q](const Mat3& p, const StateVector&, StateVector& dy) {
    dy[0] = q(p);
  };
  IntegrationResult r = integrate(spec, t, g, y0, rhs);
  return {r.state[0], r.point};
}

double orbit_average(const ScalarField& q, const FlowSpec& spec, double t, const GroupElement& g,
                     Direction direction) {
  if (t == 0.0) throw DomainError("orbit average needs t != 0");
  if (direction == Direction::kForward) return orbit_integral(q, spec, t, g).integral / t;
  return -orbit_integral(q, spec, -t, g).integral / t;
}

}  // namespace unipert
