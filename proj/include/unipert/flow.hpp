#pragma once

// Trajectories of right-invariant-frame vector fields A(g) = V + phi(g) Y on
// SL(3,R), i.e. dg/dt = g A(g). The three kinds used throughout are
//
//   constant      A = V
//   perturbed     A = U + beta(g) Z
//   time-change   A = f(g) Z
//
// Integration uses a fixed step that is shrunk so an integer number of
// steps lands exactly on the requested time. An optional vector state y
// with y' = F(g, y) is advanced with the same Runge-Kutta stages, which is
// how quadratures and variational equations stay synchronized with the
// base trajectory.

#include "unipert/field.hpp"
#include "unipert/lie.hpp"
#include "unipert/perturbation.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace unipert {

enum class Method {
  kLieRK4,        // Runge-Kutta-Munthe-Kaas, order 4; det = 1 structurally
  kClassicalRK4,  // RK4 on matrix entries with a determinant monitor
};

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

struct IntegratorConfig {
  Method method = Method::kLieRK4;
  double step = 1e-3;
  /// Allowed |det - 1| per 10 time units.
  double tolerance = 1e-9;

  void validate() const;
};

enum class FlowKind { kConstant, kPerturbed, kTimeChange, kGeneral };

class FlowSpec {
 public:
  static FlowSpec constant(const AlgebraElement& v, IntegratorConfig config = {});
  /// Runs condition_check on a default sample domain and throws DomainError
  /// when it fails.
  static FlowSpec perturbed(PerturbationData p, IntegratorConfig config = {});
  static FlowSpec perturbed_unchecked(PerturbationData p, IntegratorConfig config = {});
  /// A = f(g) Z.
  static FlowSpec time_change(ScalarField f, const AlgebraElement& z, IntegratorConfig config = {});
  /// A = base + phi(g) direction, no structural assumptions.
  static FlowSpec general(const AlgebraElement& base, ScalarField phi,
                          const AlgebraElement& direction, IntegratorConfig config = {});

  FlowKind kind() const { return kind_; }
  const IntegratorConfig& config() const { return config_; }
  FlowSpec with_config(IntegratorConfig config) const;

  const AlgebraElement& base() const { return base_; }
  const ScalarField& phi() const { return phi_; }
  const AlgebraElement& direction() const { return direction_; }
  /// Present for the perturbed kind.
  const PerturbationData& perturbation() const;

  /// A(g) as a 3x3 matrix.
  Mat3 velocity(const Mat3& g) const;
  AlgebraElement velocity(const GroupElement& g) const;

 private:
  FlowKind kind_ = FlowKind::kConstant;
  AlgebraElement base_;
  ScalarField phi_;
  AlgebraElement direction_;
  std::optional<PerturbationData> perturbation_;
  IntegratorConfig config_;
};

using StateVector = Eigen::VectorXd;
/// y' = F(g, y); writes F into `dy` (already sized like y).
using AugmentedRhs = std::function<void(const Mat3& g, const StateVector& y, StateVector& dy)>;
using StepObserver = std::function<void(double t, const Mat3& g, const StateVector& y)>;

struct IntegrationResult {
  GroupElement point;
  StateVector state;
  double max_det_drift = 0.0;
  int steps = 0;
};

/// Integrates from time 0 to t (t may be negative). The observer is called at
/// t = 0 and after every step. The state is kept as g = g0 N and the drift
/// is |det N - 1|; NumericalError when it exceeds the configured tolerance.
IntegrationResult integrate(const FlowSpec& spec, double t, const GroupElement& g0,
                            const StateVector& y0 = {}, const AugmentedRhs& rhs = {},
                            const StepObserver& observer = {});

/// Largest drift / allowance ratio seen by integrate() in this process
/// (0 when nothing was integrated). Thread-safe.
double observed_drift_ratio();
void reset_observed_drift_ratio();

/// Number of steps used for an interval of length |t|.
int step_count(double t, double step);

struct Trajectory {
  std::vector<double> times;
  std::vector<GroupElement> points;
};

/// Samples every `stride`-th step (the endpoint is always included).
Trajectory trajectory(const FlowSpec& spec, double t, const GroupElement& g0, int stride = 1);

/// g exp(tV), exact.
GroupElement flow_constant(const AlgebraElement& v, double t, const GroupElement& g);

/// Endpoint of the perturbed flow.
GroupElement flow_perturbed(const FlowSpec& spec, double t, const GroupElement& g);

/// Endpoint of the flow along the general spec (any kind).
GroupElement flow(const FlowSpec& spec, double t, const GroupElement& g);

/// Time change f Z solved as the scalar ODE rho' = f(g exp(rho Z)); the
/// point is g exp(rho(t) Z). Throws NumericalError when f changes sign.
struct TimeChangeResult {
  GroupElement point;
  double rho = 0.0;
};

TimeChangeResult flow_timechange(const ScalarField& f, const AlgebraElement& z, double t,
                                 const GroupElement& g, const IntegratorConfig& config = {});

/// rho at each requested time (times must be non-decreasing from 0).
std::vector<double> timechange_parameter_series(const ScalarField& f, const AlgebraElement& z,
                                                const std::vector<double>& times,
                                                const GroupElement& g,
                                                const IntegratorConfig& config = {});

enum class Direction { kForward, kBackward };

/// forward:  (1/t) int_0^t  q(h_tau g) dtau
/// backward: (1/t) int_{-t}^0 q(h_tau g) dtau
double orbit_average(const ScalarField& q, const FlowSpec& spec, double t, const GroupElement& g,
                     Direction direction);

/// int_0^t q(h_tau g) dtau (t may be negative) together with the endpoint.
struct OrbitIntegral {
  double integral = 0.0;
  GroupElement endpoint;
};

OrbitIntegral orbit_integral(const ScalarField& q, const FlowSpec& spec, double t,
                             const GroupElement& g);

}  // namespace unipert
