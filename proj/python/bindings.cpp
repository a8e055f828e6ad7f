#include "unipert/conjugacy.hpp"
#include "unipert/errors.hpp"
#include "unipert/flow.hpp"
#include "unipert/lie.hpp"
#include "unipert/perturbation.hpp"
#include "unipert/pushforward.hpp"
#include "unipert/shear.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace unipert;

namespace {

std::vector<GroupElement> default_samples(int count, std::uint64_t seed, double half_width) {
  SampleDomain d;
  d.count = count;
  d.seed = seed;
  d.half_width = half_width;
  return sample_points(d);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Perturbed unipotent flows on SL(3,R)";

  auto base_error = py::register_exception<Error>(m, "Error");
  py::register_exception<DomainError>(m, "DomainError", base_error.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base_error.ptr());
  py::register_exception<ParseError>(m, "ParseError", base_error.ptr());

  auto frame = m.def_submodule("frame", "Indices of the frame elements");
  for (int i = 0; i < kDim; ++i) frame.attr(std::string(frame::kNames[i]).c_str()) = i;
  frame.attr("Z") = frame::Z;
  frame.attr("names") = std::vector<std::string>(frame::kNames.begin(), frame::kNames.end());

  py::class_<AlgebraElement>(m, "AlgebraElement")
      .def(py::init<>())
      .def_static("from_coords", &AlgebraElement::from_coords, py::arg("coords"))
      .def_static("from_matrix", &AlgebraElement::from_matrix, py::arg("m"), py::arg("trace_tol") = 1e-12)
      .def_static("basis", &AlgebraElement::basis, py::arg("index"))
      .def_property_readonly("coords", &AlgebraElement::coords)
      .def_property_readonly("matrix", &AlgebraElement::matrix)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(-py::self)
      .def(double() * py::self)
      .def("__mul__", [](const AlgebraElement& x, double s) { return s * x; })
      .def(py::self == py::self)
      .def("__repr__", [](const AlgebraElement& x) { return "AlgebraElement(" + x.to_string() + ")"; })
      .def("__str__", &AlgebraElement::to_string);

  py::class_<GroupElement>(m, "GroupElement")
      .def(py::init<>())
      .def(py::init<const Mat3&>(), py::arg("m"))
      .def_property_readonly("matrix", &GroupElement::matrix)
      .def("inverse", &GroupElement::inverse)
      .def("det_drift", &GroupElement::det_drift)
      .def(py::self * py::self);

  m.def("bracket", &bracket);
  m.def("exp_map", &exp_map, py::arg("x"), py::arg("t") = 1.0);
  m.def("ad_matrix", &ad_matrix);
  m.def("adjoint_matrix", &adjoint_matrix, py::arg("v"), py::arg("t"));
  m.def("jordan_blocks", &jordan_blocks, py::arg("m"), py::arg("rank_tol") = 1e-9);
  m.def("unipotent", &unipotent, py::arg("c12"), py::arg("c23"), py::arg("c13") = 0.0);
  m.def("distance", &distance);
  m.def("frame_coords_at", &frame_coords_at);

  py::class_<HeisenbergTriple>(m, "HeisenbergTriple")
      .def_readonly("u", &HeisenbergTriple::u)
      .def_readonly("w", &HeisenbergTriple::w)
      .def_readonly("z", &HeisenbergTriple::z)
      .def_readonly("c", &HeisenbergTriple::c);
  m.def("heisenberg_partner", &heisenberg_partner);

  py::class_<ScalarField>(m, "ScalarField")
      .def_static("parse", &ScalarField::parse)
      .def_static("constant", &ScalarField::constant)
      .def("__call__", py::overload_cast<const GroupElement&>(&ScalarField::operator(), py::const_))
      .def("derivative",
           py::overload_cast<const AlgebraElement&, const GroupElement&>(&ScalarField::derivative, py::const_))
      .def("along", &ScalarField::along)
      .def("__str__", &ScalarField::to_string)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self / py::self);

  m.def("sample_points", &default_samples, py::arg("count") = 1000, py::arg("seed") = 42,
        py::arg("half_width") = 0.5);

  py::class_<PerturbationData>(m, "PerturbationData")
      .def_readonly("beta", &PerturbationData::beta)
      .def_readonly("lambda_", &PerturbationData::lambda)
      .def_readonly("w", &PerturbationData::w)
      .def_readonly("triple", &PerturbationData::triple)
      .def_property_readonly("c", &PerturbationData::c)
      .def("shear_density", &PerturbationData::shear_density);
  m.def("make_perturbation", &make_perturbation);
  m.def("unperturbed", &unperturbed);
  m.def(
      "from_transfer",
      [](const std::string& w, const AlgebraElement& u, int samples, std::uint64_t seed) {
        return from_transfer(ScalarField::parse(w), heisenberg_partner(u),
                             default_samples(samples, seed, 0.5));
      },
      py::arg("w"), py::arg("u"), py::arg("samples") = 200, py::arg("seed") = 42);
  m.def("invariance_residual", &invariance_residual);

  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("max_abs_w_beta", &ConditionReport::max_abs_w_beta)
      .def_readonly("abs_c", &ConditionReport::abs_c)
      .def_readonly("min_lambda", &ConditionReport::min_lambda)
      .def_readonly("max_lambda", &ConditionReport::max_lambda)
      .def_readonly("passed", &ConditionReport::passed);
  m.def("condition_check", &condition_check);

  py::enum_<Method>(m, "Method").value("LIE_RK4", Method::kLieRK4).value("RK4", Method::kClassicalRK4);
  py::class_<IntegratorConfig>(m, "IntegratorConfig")
      .def(py::init([](Method method, double step, double tolerance) {
             IntegratorConfig c{method, step, tolerance};
             c.validate();
             return c;
           }),
           py::arg("method") = Method::kLieRK4, py::arg("step") = 1e-3, py::arg("tolerance") = 1e-9)
      .def_readwrite("method", &IntegratorConfig::method)
      .def_readwrite("step", &IntegratorConfig::step)
      .def_readwrite("tolerance", &IntegratorConfig::tolerance);

  py::class_<FlowSpec>(m, "FlowSpec")
      .def_static("constant", &FlowSpec::constant, py::arg("v"), py::arg("config") = IntegratorConfig{})
      .def_static("perturbed", &FlowSpec::perturbed, py::arg("p"), py::arg("config") = IntegratorConfig{})
      .def_static("time_change", &FlowSpec::time_change, py::arg("f"), py::arg("z"),
                  py::arg("config") = IntegratorConfig{});
  m.def("flow", &flow, py::arg("spec"), py::arg("t"), py::arg("g"));

  py::class_<FrameCoefficients>(m, "FrameCoefficients")
      .def_readonly("t_grid", &FrameCoefficients::t_grid)
      .def_readonly("coeffs", &FrameCoefficients::coeffs)
      .def_readonly("points", &FrameCoefficients::points);
  m.def("uniform_grid", &uniform_grid);
  m.def("integrate_pushforward",
        py::overload_cast<const FlowSpec&, const AlgebraElement&, const std::vector<double>&,
                          const GroupElement&>(&integrate_pushforward));
  m.def("closed_form_W", &closed_form_W, py::arg("p"), py::arg("t"), py::arg("g"),
        py::arg("config") = IntegratorConfig{});
  m.def("closed_form_Z", &closed_form_Z, py::arg("p"), py::arg("t"), py::arg("g"),
        py::arg("config") = IntegratorConfig{});
  py::class_<ClosedFormSeries>(m, "ClosedFormSeries")
      .def_readonly("t_grid", &ClosedFormSeries::t_grid)
      .def_readonly("w", &ClosedFormSeries::w)
      .def_readonly("z", &ClosedFormSeries::z);
  m.def("closed_form_series", &closed_form_series, py::arg("p"), py::arg("t_grid"), py::arg("g"),
        py::arg("config") = IntegratorConfig{});
  m.def("differential_matrix",
        py::overload_cast<const FlowSpec&, double, const GroupElement&>(&differential_matrix));
  m.def("operator_norm", &operator_norm);
  m.def("dyadic_times", &dyadic_times);
  m.def("fit_loglog_slope", &fit_loglog_slope);

  py::class_<ParabolicityReport>(m, "ParabolicityReport")
      .def_readonly("times", &ParabolicityReport::times)
      .def_readonly("sup_norms", &ParabolicityReport::sup_norms)
      .def_readonly("slope", &ParabolicityReport::slope)
      .def_readonly("row_slopes", &ParabolicityReport::row_slopes);
  m.def("parabolicity", &parabolicity);

  m.def("ell_t", &ell_t, py::arg("p"), py::arg("t"), py::arg("base"), py::arg("config") = IntegratorConfig{});
  m.def("tangent_residual", &tangent_residual, py::arg("p"), py::arg("t"), py::arg("base"),
        py::arg("fd_step") = 1e-3, py::arg("config") = IntegratorConfig{});
  py::class_<ShearCurve>(m, "ShearCurve")
      .def_readonly("t", &ShearCurve::t)
      .def_readonly("sigma", &ShearCurve::sigma)
      .def_readonly("s", &ShearCurve::s)
      .def_readonly("samples", &ShearCurve::samples);
  m.def("shear_curve", &shear_curve, py::arg("p"), py::arg("t"), py::arg("sigma"), py::arg("base"),
        py::arg("n_samples") = 64, py::arg("config") = IntegratorConfig{});

  py::class_<ConjugacyMap>(m, "ConjugacyMap")
      .def(py::init<ScalarField>(), py::arg("w"))
      .def("__call__", &ConjugacyMap::operator())
      .def("inverse", &ConjugacyMap::inverse, py::arg("y"), py::arg("tol") = 1e-14, py::arg("max_iter") = 50);
  m.def("conjugacy_residual", &conjugacy_residual, py::arg("w"), py::arg("p"), py::arg("t"), py::arg("g"),
        py::arg("config") = IntegratorConfig{});

  py::class_<BracketExpansion>(m, "BracketExpansion")
      .def_readonly("bracket", &BracketExpansion::bracket)
      .def_readonly("display", &BracketExpansion::display)
      .def_readonly("residual", &BracketExpansion::residual);
  m.def("bracket_expansion_check", &bracket_expansion_check);

  py::class_<KakutaniResult>(m, "KakutaniResult")
      .def_readonly("value", &KakutaniResult::value)
      .def_readonly("blocks", &KakutaniResult::blocks)
      .def_readonly("verified", &KakutaniResult::verified)
      .def_readonly("flag", &KakutaniResult::flag);
  m.def("kakutani_invariant", [](const AlgebraElement& v) { return kakutani_invariant(v); });
  m.def("telescoping_residual", &telescoping_residual, py::arg("w"), py::arg("T"), py::arg("g"),
        py::arg("samples") = 100, py::arg("config") = IntegratorConfig{});
}
