#include "unipert/pushforward.hpp"

#include "unipert/errors.hpp"
#include "unipert/parallel.hpp"

#include <cmath>

namespace unipert {

namespace {

AlgebraElement element_of(const Mat3& m) {
  return AlgebraElement::from_coords(AlgebraElement::project(m));
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty() || grid.front() != 0.0) throw DomainError("time grid must start at 0");
  bool up = true, down = true;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    up = up && grid[i] >= grid[i - 1];
    down = down && grid[i] <= grid[i - 1];
  }
  if (!up && !down) throw DomainError("time grid must be monotone");
}

void check_structure(const FlowSpec& spec, const GroupElement& g) {
  if (spec.kind() != FlowKind::kPerturbed && spec.kind() != FlowKind::kTimeChange) return;
  if (!has_triangular_structure(coupling_matrix(spec, g), 1e-12)) {
    throw NumericalError("coefficient system is not triangular in the frame order");
  }
}

// Runs `integrate` over consecutive grid intervals, calling `sample` at
// every grid time with the current point and state.
template <class Sample>
void integrate_on_grid(const FlowSpec& spec, const std::vector<double>& grid,
                       const GroupElement& g, StateVector y, const AugmentedRhs& rhs,
                       Sample&& sample) {
  check_grid(grid);
  GroupElement point = g;
  sample(0, point, y);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    IntegrationResult r = integrate(spec, grid[k] - grid[k - 1], point, y, rhs);
    point = r.point;
    y = std::move(r.state);
    sample(k, point, y);
  }
}

}  // namespace

std::vector<double> uniform_grid(double T, int samples) {
  if (samples < 1) throw DomainError("grid needs at least one interval");
  std::vector<double> grid(static_cast<std::size_t>(samples) + 1);
  for (int k = 0; k <= samples; ++k) grid[static_cast<std::size_t>(k)] = T * k / samples;
  grid.back() = T;
  return grid;
}

Mat8 coupling_matrix(const FlowSpec& spec, const GroupElement& q) {
  Mat8 m = -ad_matrix(element_of(spec.velocity(q.matrix())));
  if (!spec.phi().is_zero() && !spec.direction().is_zero()) {
    m += spec.direction().coords() * spec.phi().gradient(q.matrix()).transpose();
  }
  return m;
}

bool has_triangular_structure(const Mat8& coupling, double tol) {
  for (int i = 0; i < kDim; ++i) {
    if (i == frame::Z) continue;
    for (int j = i; j < kDim; ++j) {
      if (std::abs(coupling(i, j)) > tol) return false;
    }
  }
  return true;
}

FrameCoefficients integrate_pushforward(const FlowSpec& spec, const AlgebraElement& x0,
                                        const std::vector<double>& t_grid, const GroupElement& g) {
  check_structure(spec, g);
  const bool varying = !spec.phi().is_zero() && !spec.direction().is_zero();
  const Vec8 y_dir = spec.direction().coords();
  const AugmentedRhs rhs = [&](const Mat3& q, const StateVector& y, StateVector& dy) {
    const Vec8 xi = y;
    const Mat3 xi_m = AlgebraElement::from_coords(xi).matrix();
    const Mat3 a = spec.velocity(q);
    Vec8 d = -AlgebraElement::project(a * xi_m - xi_m * a);
    if (varying) d += spec.phi().derivative(xi_m, q) * y_dir;
    dy = d;
  };
  FrameCoefficients out;
  out.base_point = g;
  out.t_grid = t_grid;
  integrate_on_grid(spec, t_grid, g, StateVector(x0.coords()), rhs,
                    [&](std::size_t, const GroupElement& q, const StateVector& y) {
                      out.coeffs.emplace_back(y);
                      out.points.push_back(q);
                    });
  return out;
}

FrameCoefficients integrate_pushforward(const FlowSpec& spec, const AlgebraElement& x0, double T,
                                        const GroupElement& g) {
  return integrate_pushforward(spec, x0, std::vector<double>{0.0, T}, g);
}

double closed_form_W(const PerturbationData& p, double t, const GroupElement& g,
                     const IntegratorConfig& config) {
  if (t == 0.0) return 0.0;
  const FlowSpec spec = FlowSpec::perturbed_unchecked(p, config);
  const OrbitIntegral r = orbit_integral(p.shear_density(), spec, t, g);
  return r.integral / p.lambda(r.endpoint);
}

double closed_form_Z(const PerturbationData& p, double t, const GroupElement& g,
                     const IntegratorConfig& config) {
  if (t == 0.0) return 1.0;
  const FlowSpec spec = FlowSpec::perturbed_unchecked(p, config);
  return p.lambda(g) / p.lambda(flow_perturbed(spec, t, g));
}

ClosedFormSeries closed_form_series(const PerturbationData& p, const std::vector<double>& t_grid,
                                    const GroupElement& g, const IntegratorConfig& config) {
  check_grid(t_grid);
  const FlowSpec spec = FlowSpec::perturbed_unchecked(p, config);
  const ScalarField density = p.shear_density();
  const double lambda0 = p.lambda(g);
  ClosedFormSeries out;
  out.t_grid = t_grid;
  GroupElement point = g;
  double integral = 0.0;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (k > 0 && t_grid[k] != t_grid[k - 1]) {
      const OrbitIntegral piece = orbit_integral(density, spec, t_grid[k] - t_grid[k - 1], point);
      integral += piece.integral;
      point = piece.endpoint;
    }
    if (t_grid[k] == 0.0) {
      out.w.push_back(0.0);
      out.z.push_back(1.0);
      continue;
    }
    const double lambda_t = p.lambda(point);
    out.w.push_back(integral / lambda_t);
    out.z.push_back(lambda0 / lambda_t);
  }
  return out;
}

DifferentialSeries differential_matrix(const FlowSpec& spec, const std::vector<double>& t_grid,
                                       const GroupElement& g) {
  check_structure(spec, g);
  const AugmentedRhs rhs = [&](const Mat3& q, const StateVector& y, StateVector& dy) {
    const Mat8 m = coupling_matrix(spec, GroupElement(q));
    Eigen::Map<const Mat8> d(y.data());
    Eigen::Map<Mat8> out(dy.data());
    out.noalias() = m * d;
  };
  DifferentialSeries series;
  series.base_point = g;
  series.times = t_grid;
  const Mat8 id = Mat8::Identity();
  integrate_on_grid(spec, t_grid, g, StateVector(Eigen::Map<const StateVector>(id.data(), 64)), rhs,
                    [&](std::size_t, const GroupElement& q, const StateVector& y) {
                      const Mat8 d = Eigen::Map<const Mat8>(y.data());
                      series.points.push_back(q);
                      series.matrices.push_back(d);
                      series.norms.push_back(operator_norm(d));
                    });
  return series;
}

Mat8 differential_matrix(const FlowSpec& spec, double T, const GroupElement& g) {
  return differential_matrix(spec, std::vector<double>{0.0, T}, g).matrices.back();
}

double operator_norm(const Mat8& m) {
  Eigen::JacobiSVD<Mat8> svd(m);
  return svd.singularValues()[0];
}

double operator_norm_row(const Mat8& m, int row) { return m.row(row).norm(); }

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("slope fit needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DomainError("slope fit needs distinct abscissae");
  return (n * sxy - sx * sy) / denom;
}

std::vector<double> dyadic_times(double t_max) {
  std::vector<double> out;
  for (double t = 1.0; t <= t_max * (1 + 1e-12); t *= 2.0) out.push_back(t);
  return out;
}

ParabolicityReport parabolicity(const FlowSpec& spec, const std::vector<double>& times,
                                const std::vector<GroupElement>& base_points) {
  if (base_points.empty()) throw DomainError("parabolicity needs base points");
  std::vector<double> grid{0.0};
  grid.insert(grid.end(), times.begin(), times.end());
  std::vector<DifferentialSeries> all(base_points.size());
  parallel_for(base_points.size(),
               [&](std::size_t i) { all[i] = differential_matrix(spec, grid, base_points[i]); });

  ParabolicityReport r;
  r.times = times;
  r.sup_norms.assign(times.size(), 0.0);
  for (auto& row : r.row_sup) row.assign(times.size(), 0.0);
  for (const auto& s : all) {
    for (std::size_t k = 0; k < times.size(); ++k) {
      const Mat8& m = s.matrices[k + 1];
      r.sup_norms[k] = std::max(r.sup_norms[k], s.norms[k + 1]);
      for (int row = 0; row < kDim; ++row) {
        r.row_sup[static_cast<std::size_t>(row)][k] =
            std::max(r.row_sup[static_cast<std::size_t>(row)][k], operator_norm_row(m, row));
      }
    }
  }
  r.slope = fit_loglog_slope(times, r.sup_norms);
  for (int row = 0; row < kDim; ++row) {
    r.row_slopes[static_cast<std::size_t>(row)] =
        fit_loglog_slope(times, r.row_sup[static_cast<std::size_t>(row)]);
  }
  return r;
}

TimeChangeDifferential timechange_differential(const ScalarField& f, const AlgebraElement& z,
                                               const std::vector<double>& t_grid,
                                               const GroupElement& g,
                                               const IntegratorConfig& config) {
  check_grid(t_grid);
  const FlowSpec spec = FlowSpec::time_change(f, z, config);
  const DifferentialSeries series = differential_matrix(spec, t_grid, g);
  TimeChangeDifferential out;
  out.times = t_grid;
  out.matrices = series.matrices;
  if (t_grid.back() >= 0.0) {
    out.big_lambda = timechange_parameter_series(f, z, t_grid, g, config);
  } else {
    std::vector<double> flipped(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) flipped[k] = -t_grid[k];
    const ScalarField neg = -f;
    out.big_lambda = timechange_parameter_series(neg, z, flipped, g, config);
  }
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const Mat8 expected = adjoint_matrix(z, -out.big_lambda[k]);
    const Mat8 diff = out.matrices[k] - expected;
    for (int i = 0; i < kDim; ++i) {
      if (i == frame::Z) continue;
      out.structure_residual = std::max(out.structure_residual, diff.row(i).cwiseAbs().maxCoeff());
    }
  }
  return out;
}

Vec8 unnormalized_diagonal(const Vec8& frame_coords) {
  Vec8 out = frame_coords;
  out[frame::H1] *= 0.5;
  out[frame::H2] *= 0.5;
  return out;
}

}  // namespace unipert
