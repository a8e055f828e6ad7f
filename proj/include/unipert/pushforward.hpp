#pragma once

// Push-forwards of left-invariant fields by a flow with velocity
// A(g) = V + phi(g) Y, tracked in the moving frame. For a tangent vector
// with frame coordinates xi at the current point q,
//
//   xi' = -[A(q), xi] + (xi phi)(q) Y,
//
// so the differential matrix D solves D' = (-ad A(q) + Y (grad phi)^T) D
// with D(0) = I.

#include "unipert/flow.hpp"

#include <array>
#include <vector>

namespace unipert {

/// a_V(t) of the push-forward of one initial field, sampled on t_grid.
struct FrameCoefficients {
  GroupElement base_point;
  std::vector<double> t_grid;
  std::vector<Vec8> coeffs;
  std::vector<GroupElement> points;  // orbit point at each grid time
};

/// Sample times {0, ..., T}; `samples` equally spaced intervals.
std::vector<double> uniform_grid(double T, int samples);

/// Integrates the coefficient system for the initial field x0 along the
/// orbit of g. The grid must start at 0 and be monotone (either sign);
/// integration restarts at each grid time so every sample is hit exactly.
FrameCoefficients integrate_pushforward(const FlowSpec& spec, const AlgebraElement& x0,
                                        const std::vector<double>& t_grid, const GroupElement& g);
FrameCoefficients integrate_pushforward(const FlowSpec& spec, const AlgebraElement& x0, double T,
                                        const GroupElement& g);

/// Z-coefficient of the push-forward of W at h_t(g):
/// (1/lambda(h_t g)) int_0^t lambda (c + W beta)(h_tau g) dtau.
double closed_form_W(const PerturbationData& p, double t, const GroupElement& g,
                     const IntegratorConfig& config = {});

/// Z-coefficient of the push-forward of Z at h_t(g): lambda(g) / lambda(h_t g).
double closed_form_Z(const PerturbationData& p, double t, const GroupElement& g,
                     const IntegratorConfig& config = {});

struct ClosedFormSeries {
  std::vector<double> t_grid;
  std::vector<double> w;  // closed_form_W at each grid time
  std::vector<double> z;  // closed_form_Z at each grid time
};

/// Both closed forms along a monotone grid starting at 0, in one pass over the orbit.
ClosedFormSeries closed_form_series(const PerturbationData& p, const std::vector<double>& t_grid,
                                    const GroupElement& g, const IntegratorConfig& config = {});

struct DifferentialSeries {
  GroupElement base_point;
  std::vector<double> times;
  std::vector<GroupElement> points;
  std::vector<Mat8> matrices;
  std::vector<double> norms;  // operator 2-norm of each matrix
};

DifferentialSeries differential_matrix(const FlowSpec& spec, const std::vector<double>& t_grid,
                                       const GroupElement& g);
Mat8 differential_matrix(const FlowSpec& spec, double T, const GroupElement& g);

/// Coupling matrix -ad A(q) + Y (grad phi(q))^T of the coefficient system.
Mat8 coupling_matrix(const FlowSpec& spec, const GroupElement& q);

/// Strictly lower triangular apart from the Z row. Holds for the perturbed
/// and time-change kinds; checked by the integrators at setup.
bool has_triangular_structure(const Mat8& coupling, double tol = 0.0);

/// Largest singular value.
double operator_norm(const Mat8& m);
double operator_norm_row(const Mat8& m, int row);

/// Least-squares slope of log y against log x.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Dyadic times 1, 2, 4, ..., t_max.
std::vector<double> dyadic_times(double t_max);

struct ParabolicityReport {
  std::vector<double> times;
  std::vector<double> sup_norms;                  // sup over base points
  std::array<std::vector<double>, kDim> row_sup;  // per-row sup norms
  double slope = 0.0;
  std::array<double, kDim> row_slopes{};
  int z_row = frame::Z;
};

ParabolicityReport parabolicity(const FlowSpec& spec, const std::vector<double>& times,
                                const std::vector<GroupElement>& base_points);

/// Differential of the time change by f along Z, i.e. the flow of f Z.
struct TimeChangeDifferential {
  std::vector<double> times;
  std::vector<Mat8> matrices;
  std::vector<double> big_lambda;  // Lambda_t from the scalar equation
  /// max over samples of the entries that must match
  /// adjoint_matrix(Z, -Lambda_t) outside the Z row.
  double structure_residual = 0.0;
};

TimeChangeDifferential timechange_differential(const ScalarField& f, const AlgebraElement& z,
                                               const std::vector<double>& t_grid,
                                               const GroupElement& g,
                                               const IntegratorConfig& config = {});

/// Coefficient of (E11 - E22) and (E22 - E33) instead of the normalized
/// H1, H2 frame elements: the H coordinates are halved.
Vec8 unnormalized_diagonal(const Vec8& frame_coords);

}  // namespace unipert
