#pragma once

// Shearing of short W-segments by the perturbed flow:
//
//   phi^(t)_s(p) = h_t( h_{-t}(p) exp((s/t) W) ),   s in [0, sigma],
//
// whose tangent at s = 0 is (1/t) W + (l_t(p) / lambda(p)) Z with the
// backward average l_t = (1/t) int_{-t}^0 lambda (c + W beta) o h_tau.
//
// The group is not compact, so every sup norm below is sampled: along the
// backward orbit segment of the base point and on a small cloud around it.

#include "unipert/flow.hpp"
#include "unipert/perturbation.hpp"

#include <vector>

namespace unipert {

struct ShearCurve {
  double t = 0.0;
  double sigma = 0.0;
  GroupElement base_point;
  std::vector<double> s;
  std::vector<GroupElement> samples;
};

/// n_samples points on [0, sigma] (both ends included). Requires t >= 1,
/// sigma > 0, n_samples >= 2.
ShearCurve shear_curve(const PerturbationData& p, double t, double sigma, const GroupElement& base,
                       int n_samples, const IntegratorConfig& config = {});

/// phi^(t)_s(base) for a single s (s may be negative).
GroupElement shear_point(const PerturbationData& p, double t, double s, const GroupElement& base,
                         const IntegratorConfig& config = {});

/// l_t(p).
double ell_t(const PerturbationData& p, double t, const GroupElement& base,
             const IntegratorConfig& config = {});

/// Frame norm of (central-difference tangent at s = 0) minus the predicted
/// (1/t) W + (l_t(p)/lambda(p)) Z.
double tangent_residual(const PerturbationData& p, double t, const GroupElement& base,
                        double fd_step = 1e-3, const IntegratorConfig& config = {});

/// Sampled sup norms entering the shearing estimates.
struct SupNorms {
  double min_lambda = 0.0;
  double max_lambda = 0.0;
  double sup_w_beta = 0.0;  // ||W beta||
  double c1 = 0.0;          // ||lambda (c + W beta)||
  double c2 = 0.0;          // ||Z(lambda (c + W beta))||
  double sup_w_q = 0.0;     // ||W(lambda (c + W beta))||
};

/// Sup over the backward orbit segment h_tau(base), tau in [-t, 0] (every
/// `stride`-th step), and over `cloud` extra points.
SupNorms sampled_sup_norms(const PerturbationData& p, double t, const GroupElement& base,
                           const std::vector<GroupElement>& cloud, int stride = 10,
                           const IntegratorConfig& config = {});

struct EllBounds {
  double z_ell = 0.0;  // Z l_t(base) by central differences
  double w_ell = 0.0;  // W l_t(base)
  double z_bound = 0.0;  // (max lambda / min lambda) C2
  double w_bound = 0.0;  // C_W t, C_W = ||W q|| + C1 C2 / (2 min lambda)
  SupNorms norms;
};

EllBounds ell_bounds(const PerturbationData& p, double t, const GroupElement& base,
                     const std::vector<GroupElement>& cloud, double fd_step = 1e-4,
                     const IntegratorConfig& config = {});

/// Scalar factor of the push-forward of (1/lambda) Z by the flow of (1/t) W
/// for time s, read at the endpoint x = g exp((s/t) W). Three routes.
struct ZTildeFactor {
  double quadrature = 1.0;   // exp((1/t) int (W lambda / lambda) along the segment)
  double variational = 1.0;  // integrated coefficient system
  double closed_form = 1.0;  // lambda(x) / lambda(g)
};

ZTildeFactor w_pushforward_of_ztilde(const PerturbationData& p, double t, double s,
                                     const GroupElement& g, const IntegratorConfig& config = {});

/// Per-t max over the s-grid of dist(phi^(t)_s(p), flow of (l_hat/lambda) Z
/// for time s from p), with l_hat = l_t(p). Diagnostic only.
struct LimitComparison {
  std::vector<double> t;
  std::vector<double> ell_hat;
  std::vector<double> max_distance;
};

LimitComparison limit_comparison(const PerturbationData& p, const std::vector<double>& t_list,
                                 double sigma, const GroupElement& base, int n_samples = 64,
                                 const IntegratorConfig& config = {});

/// Bundle for one (t, sigma, p): l_t, the tangent residual at each curve
/// sample, the derivative bounds and the distance to the limit flow.
struct ShearDiagnostics {
  double ell_t = 0.0;
  ShearCurve curve;
  std::vector<double> tangent_residuals;
  EllBounds bounds;
  std::vector<double> limit_distance;
};

ShearDiagnostics shear_diagnostics(const PerturbationData& p, double t, double sigma,
                                   const GroupElement& base, const std::vector<GroupElement>& cloud,
                                   int n_samples = 64, const IntegratorConfig& config = {});

/// Largest frame speed between consecutive curve samples.
double max_curve_speed(const ShearCurve& curve);

/// 1 + (max lambda / min lambda)(|c| + ||W beta||).
double lipschitz_bound(const PerturbationData& p, const SupNorms& norms);

}  // namespace unipert
