#include "doctest.h"

#include "fixtures.hpp"
#include "unipert/errors.hpp"
#include "unipert/flow.hpp"

#include <cmath>

using namespace unipert;

TEST_CASE("sampling is reproducible and lands in SL(3,R)") {
  const auto a = fixtures::base_points(50, 3);
  const auto b = fixtures::base_points(50, 3);
  const auto c = fixtures::base_points(50, 4);
  REQUIRE(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].matrix() == b[i].matrix());
    CHECK(a[i].det_drift() <= 1e-13);
  }
  CHECK(a[0].matrix() != c[0].matrix());
}

TEST_CASE("transfer perturbations preserve the density and give cocycles") {
  const auto points = fixtures::base_points(1000, 5);
  for (const auto& tc : fixtures::transfer_cases()) {
    const auto p = fixtures::transfer_perturbation(tc.u, tc.w);
    const auto pair = cocycle_from_perturbation(p, 0.0);
    double worst_inv = 0.0, worst_cocycle = 0.0;
    for (const auto& g : points) {
      worst_inv = std::max(worst_inv, std::abs(invariance_residual(p, g)));
      worst_cocycle = std::max(worst_cocycle, std::abs(cocycle_residual(pair, g)));
    }
    INFO(tc.name);
    CHECK(worst_inv <= 1e-9);
    CHECK(worst_cocycle <= 1e-9);
    CHECK(condition_check(p, points).passed);
  }
}

TEST_CASE("a perturbation that is not a transfer image violates the density equation") {
  const auto u = unipotent(1.0, 0.0, 0.0);
  // Z(beta) = 0.1 m11 does not vanish while lambda = 1
  const auto p = make_perturbation(u, ScalarField::parse("0.1*m13"), ScalarField::constant(1.0));
  const GroupElement g = exp_map(AlgebraElement::basis(frame::E21), 0.3);
  CHECK(std::abs(invariance_residual(p, g)) > 1e-3);
}

TEST_CASE("transfer construction validates its inputs") {
  const auto triple = heisenberg_partner(unipotent(1.0, 0.0, 0.0));
  const auto samples = fixtures::base_points(100, 1);
  CHECK_THROWS_AS(from_transfer(ScalarField::parse("-2*m13"), triple, samples), DomainError);
  const auto zero = from_transfer(ScalarField(), triple, samples);
  CHECK(zero.beta.is_zero());
  CHECK(zero.lambda.constant_value() == 1.0);
}

TEST_CASE("condition check flags large amplitudes") {
  const auto u = unipotent(1.0, 0.0, 0.0);
  const auto samples = fixtures::base_points(300, 2, 1.0);
  // W beta = 3 m12 with W = E23
  const auto big = make_perturbation(u, ScalarField::parse("3*m13"), ScalarField::constant(1.0));
  const auto report = condition_check(big, samples);
  CHECK_FALSE(report.passed);
  CHECK(report.max_abs_w_beta >= report.abs_c);
  CHECK_THROWS_AS(FlowSpec::perturbed(big), DomainError);
  const auto small = fixtures::transfer_perturbation(u, "0.05*sin(m12 + m13)");
  CHECK(condition_check(small, samples).passed);
}

TEST_CASE("constant flow is the exact exponential") {
  const auto z = AlgebraElement::basis(frame::Z);
  const GroupElement id;
  Mat3 expected = Mat3::Identity();
  expected(0, 2) = 2.5;
  CHECK(flow_constant(z, 2.5, id).matrix() == expected);
  const auto g = fixtures::base_points(1, 9)[0];
  const auto v = unipotent(1.0, -2.0, 0.5);
  CHECK(flow_constant(v, 0.0, g).matrix() == g.matrix());
  CHECK(distance(flow_constant(v, 0.4, flow_constant(v, 0.7, g)), flow_constant(v, 1.1, g)) <=
        1e-13);
}

TEST_CASE("unperturbed flow reduces to the exponential formula") {
  const auto u = unipotent(1.0, 1.0, 0.0);
  for (Method m : {Method::kLieRK4, Method::kClassicalRK4}) {
    IntegratorConfig cfg;
    cfg.method = m;
    const auto spec = FlowSpec::perturbed(unperturbed(u), cfg);
    for (const auto& g : fixtures::base_points(3, 4)) {
      for (double t : {-3.0, 0.0, 1.7, 10.0}) {
        CHECK(distance(flow_perturbed(spec, t, g), flow_constant(u, t, g)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("perturbed flow is reversible and has the flow property") {
  for (const auto& tc : fixtures::transfer_cases()) {
    const auto spec = FlowSpec::perturbed(fixtures::transfer_perturbation(tc.u, tc.w));
    for (const auto& g : fixtures::base_points(3, 8)) {
      for (double t : {1.0, 5.0, 10.0}) {
        const auto fwd = flow_perturbed(spec, t, g);
        INFO(tc.name, " t=", t);
        CHECK(distance(flow_perturbed(spec, -t, fwd), g) <= 1e-8);
        const auto two = flow_perturbed(spec, 0.5 * t, flow_perturbed(spec, 0.5 * t, g));
        CHECK(distance(two, fwd) <= 1e-8);
      }
    }
  }
}

TEST_CASE("Lie-group method conserves the determinant") {
  const auto tc = fixtures::transfer_cases()[2];
  const auto spec = FlowSpec::perturbed(fixtures::transfer_perturbation(tc.u, tc.w));
  const auto r = integrate(spec, 50.0, fixtures::base_points(1, 3)[0]);
  CHECK(r.max_det_drift <= 1e-9 * 5.0);
  CHECK(r.steps == 50000);
}

TEST_CASE("drift monitor aborts with diagnostics") {
  IntegratorConfig cfg;
  cfg.method = Method::kClassicalRK4;
  cfg.step = 0.5;
  cfg.tolerance = 1e-14;
  Vec8 a = Vec8::Zero();
  a[frame::H1] = 1.0;
  a[frame::E21] = 0.7;
  const auto spec = FlowSpec::general(AlgebraElement::from_coords(a), ScalarField::parse("sin(m12)"),
                                      AlgebraElement::basis(frame::E12), cfg);
  try {
    integrate(spec, 5.0, GroupElement());
    FAIL("expected drift failure");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("determinant drift") != std::string::npos);
  }
}

TEST_CASE("step halving shows fourth-order convergence") {
  Vec8 a = Vec8::Zero();
  a[frame::H1] = 0.4;
  a[frame::E21] = 0.7;
  a[frame::E12] = 0.5;
  const GroupElement g0 = exp_map(AlgebraElement::basis(frame::E23), 0.2);
  for (Method m : {Method::kLieRK4, Method::kClassicalRK4}) {
    auto endpoint = [&](double step) {
      IntegratorConfig cfg;
      cfg.method = m;
      cfg.step = step;
      cfg.tolerance = 1.0;
      const auto spec = FlowSpec::general(AlgebraElement::from_coords(a),
                                          ScalarField::parse("sin(m12 + m21) + m11"),
                                          AlgebraElement::basis(frame::E32), cfg);
      return integrate(spec, 2.0, g0).point;
    };
    const auto ref = endpoint(0.2 / 64);
    const double e1 = distance(endpoint(0.2), ref);
    const double e2 = distance(endpoint(0.1), ref);
    const double e3 = distance(endpoint(0.05), ref);
    const double order12 = std::log2(e1 / e2);
    const double order23 = std::log2(e2 / e3);
    INFO("method ", method_name(m), " orders ", order12, " ", order23);
    CHECK(order12 >= 3.7);
    CHECK(order23 >= 3.7);
  }
}

TEST_CASE("augmented state follows the same stages") {
  // y' = m12 along the constant flow E12 from the identity: m12 = t, y = t^2/2
  const auto spec = FlowSpec::constant(AlgebraElement::basis(frame::E12));
  StateVector y0 = StateVector::Zero(1);
  const auto r = integrate(spec, 3.0, GroupElement(), y0,
                           [](const Mat3& g, const StateVector&, StateVector& dy) { dy[0] = g(0, 1); });
  CHECK(r.state[0] == doctest::Approx(4.5).epsilon(1e-13));
  CHECK_THROWS_AS(integrate(spec, 1.0, GroupElement(), y0), DomainError);
}

TEST_CASE("time change as a scalar equation") {
  const auto z = AlgebraElement::basis(frame::Z);
  const auto g = fixtures::base_points(1, 12)[0];
  CHECK(distance(flow_timechange(ScalarField::constant(1.0), z, 3.0, g).point,
                 flow_constant(z, 3.0, g)) <= 1e-12);
  CHECK(distance(flow_timechange(ScalarField::constant(2.0), z, 3.0, g).point,
                 flow_constant(z, 6.0, g)) <= 1e-12);
  // f = 1 + m13^2 along Z from the identity: rho' = 1 + rho^2, rho = tan t
  const auto r = flow_timechange(ScalarField::parse("1 + m13^2"), z, 1.0, GroupElement());
  CHECK(r.rho == doctest::Approx(std::tan(1.0)).epsilon(1e-10));
  // the exact solution never crosses a zero of f; a coarse stage can
  IntegratorConfig coarse;
  coarse.step = 0.5;
  CHECK_THROWS_AS(flow_timechange(ScalarField::parse("5 - 10*m13"), z, 2.0, GroupElement(), coarse),
                  NumericalError);
  CHECK_THROWS_AS(flow_timechange(ScalarField(), z, 1.0, GroupElement()), NumericalError);
  const auto series = timechange_parameter_series(ScalarField::constant(1.5), z, {0.0, 1.0, 4.0},
                                                  GroupElement());
  REQUIRE(series.size() == 3);
  CHECK(series[0] == 0.0);
  CHECK(series[1] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(series[2] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("time change by 1/lambda commutes with the perturbed flow") {
  for (const auto& tc : fixtures::transfer_cases()) {
    const auto p = fixtures::transfer_perturbation(tc.u, tc.w);
    const auto spec = FlowSpec::perturbed(p);
    const ScalarField inv_lambda = ScalarField::constant(1.0) / p.lambda;
    for (const auto& g : fixtures::base_points(3, 21)) {
      for (double t : {2.0, 5.0}) {
        const double r = 1.5;
        const auto a = flow_perturbed(spec, t, flow_timechange(inv_lambda, p.z(), r, g).point);
        const auto b = flow_timechange(inv_lambda, p.z(), r, flow_perturbed(spec, t, g)).point;
        INFO(tc.name);
        CHECK(distance(a, b) <= 1e-7);
      }
    }
  }
}

TEST_CASE("orbit averages") {
  const auto u = unipotent(1.0, 0.0, 0.0);
  const auto flat = unperturbed(u);
  const auto flat_spec = FlowSpec::perturbed(flat);
  const auto g = fixtures::base_points(1, 2)[0];
  CHECK(orbit_average(ScalarField::constant(1.0), flat_spec, 3.0, g, Direction::kForward) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(orbit_average(flat.shear_density(), flat_spec, 4.0, g, Direction::kBackward) ==
        doctest::Approx(flat.c()).epsilon(1e-12));
  CHECK_THROWS_AS(orbit_average(ScalarField::constant(1.0), flat_spec, 0.0, g, Direction::kForward),
                  DomainError);

  // backward average at g equals the forward average from h_{-t}(g)
  const auto tc = fixtures::transfer_cases()[0];
  const auto p = fixtures::transfer_perturbation(tc.u, tc.w);
  const auto spec = FlowSpec::perturbed(p);
  const ScalarField q = p.shear_density();
  for (double t : {1.0, 3.0, 8.0}) {
    const double back = orbit_average(q, spec, t, g, Direction::kBackward);
    const double fwd = orbit_average(q, spec, t, flow_perturbed(spec, -t, g), Direction::kForward);
    CHECK(back == doctest::Approx(fwd).epsilon(1e-9));
  }
  // integral of m12 along the E12 flow from g: m12 + tau m11
  const double t = 2.0;
  const double expected = g(0, 1) * t + 0.5 * t * t * g(0, 0);
  CHECK(orbit_integral(ScalarField::entry(0, 1), flat_spec, t, g).integral ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("trajectory sampling") {
  IntegratorConfig cfg;
  cfg.step = 0.1;
  const auto spec = FlowSpec::perturbed(unperturbed(unipotent(0.0, 1.0, 0.0)), cfg);
  const auto traj = trajectory(spec, 1.05, GroupElement(), 3);
  // 11 steps of 1.05/11: samples at 0, 3, 6, 9 and the endpoint 11
  REQUIRE(traj.times.size() == 5);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == 1.05);
  CHECK(traj.points.back()(1, 2) == doctest::Approx(1.05));
  CHECK(step_count(10.0, 1e-3) == 10000);
  CHECK(step_count(-0.25, 0.1) == 3);
  CHECK(step_count(0.0, 0.1) == 0);
  CHECK(parse_method("rk4") == Method::kClassicalRK4);
  CHECK_THROWS_AS(parse_method("euler"), DomainError);
  IntegratorConfig bad;
  bad.step = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}
