// Python module macroreal._core. Structured results cross as JSON text and are
// decoded by the package wrapper; matrices go through pybind11's Eigen caster.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "macroreal/conditions.hpp"
#include "macroreal/mach_zehnder.hpp"
#include "macroreal/overlap.hpp"

namespace py = pybind11;
using namespace macroreal;

namespace {

MzParams mz_params(double r1, double r2, double phi, double q, std::optional<Complex> c) {
  MzParams p = c ? MzParams::sup(r1, r2, phi, q, *c) : MzParams::mix(r1, r2, phi, q);
  p.validate();
  return p;
}

KrausFamily projective(const std::vector<Matrix>& projectors, std::vector<double> values) {
  if (values.empty())
    for (std::size_t i = 0; i < projectors.size(); ++i) values.push_back(static_cast<double>(i));
  return projective_family("P", projectors, values);
}

KrausFamily kraus(const std::vector<Matrix>& ops) {
  std::vector<Outcome> outcomes;
  for (std::size_t i = 0; i < ops.size(); ++i) outcomes.emplace_back(static_cast<double>(i));
  return KrausFamily::dense("K", std::move(outcomes), std::vector<double>(ops.size(), 1.0), ops);
}

std::string conditions_json(const Scenario& s, double tol) {
  Json out = Json::array();
  const std::size_t n = s.slot_count();
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      out.push_back(nsit_two_time(s, i, j, tol).to_json());
      out.push_back(aot_check(s, i, j, tol).to_json());
    }
  if (n == 3) {
    out.push_back(nsit_sandwich(s, tol).to_json());
    out.push_back(nsit_leading(s, tol).to_json());
    out.push_back(lgi_012(s, tol).to_json());
    out.push_back(nic_012(s, tol).to_json());
  }
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sequential-measurement conditions and invasiveness overlaps";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<InstrumentError>(m, "InstrumentError", PyExc_ValueError);
  py::register_exception<OverlapError>(m, "OverlapError", PyExc_RuntimeError);

  m.attr("EXACT_THRESHOLD") = kExactThreshold;

  // Interferometer.
  m.def("mz_scenario_json", [](double r1, double r2, double phi, double q, std::optional<Complex> c) {
    return scenario_to_json(mz_scenario(mz_params(r1, r2, phi, q, c))).dump();
  }, py::arg("r1"), py::arg("r2"), py::arg("phi"), py::arg("q"), py::arg("c") = py::none());
  m.def("mz_lgi_value", [](double r1, double r2, double phi, double q, std::optional<Complex> c) {
    return mz_lgi_value(mz_params(r1, r2, phi, q, c));
  }, py::arg("r1"), py::arg("r2"), py::arg("phi"), py::arg("q"), py::arg("c") = py::none());
  m.def("verify_table1_json", [](bool mix, bool sup, double tol) {
    auto lat = Table1Lattice::standard();
    if (!mix) lat.q_mix.clear();
    if (!sup) lat.c_sup.clear();
    py::gil_scoped_release release;
    return verify_table1(lat.points(), tol).summary().dump();
  }, py::arg("mix") = true, py::arg("sup") = true, py::arg("tol") = kExactThreshold);
  m.def("lgi_max_search", [](bool pure_only) {
    py::gil_scoped_release release;
    return lgi_max_search(pure_only).value;
  }, py::arg("pure_only") = false);

  // Scenario files and conditions.
  m.def("conditions_json", [](const std::string& scenario, double tol) {
    return conditions_json(scenario_from_json(Json::parse(scenario)), tol);
  }, py::arg("scenario"), py::arg("tol") = kExactThreshold);
  m.def("mr012_json", [](const std::string& scenario, double tol) {
    return mr012_check(scenario_from_json(Json::parse(scenario)), tol).to_json().dump();
  }, py::arg("scenario"), py::arg("tol") = kExactThreshold);
  m.def("sweep_json", [](std::size_t count, std::uint64_t seed) {
    SweepOptions o;
    o.count = count;
    o.seed = seed;
    py::gil_scoped_release release;
    return random_scenario_sweep(o).to_json().dump();
  }, py::arg("count") = 10000, py::arg("seed") = 1);

  // Operator-level tests on instruments given as matrices.
  m.def("nsit_operator_residual", [](const std::vector<Matrix>& a, const std::vector<Matrix>& b, const Matrix& u,
                                     bool projective_a, bool projective_b) {
    const auto fa = projective_a ? projective(a, {}) : kraus(a);
    const auto fb = projective_b ? projective(b, {}) : kraus(b);
    return nsit_operator_residual(fa, fb, Operator(u));
  }, py::arg("a"), py::arg("b"), py::arg("u"), py::arg("projective_a") = true, py::arg("projective_b") = true);
  m.def("commutators", [](const std::vector<Matrix>& a, const std::vector<Matrix>& b, const Matrix& u,
                          bool projective_a, bool projective_b) {
    const auto fa = projective_a ? projective(a, {}) : kraus(a);
    const auto fb = projective_b ? projective(b, {}) : kraus(b);
    const auto c = commutator_tests(fa, fb, Operator(u));
    return std::pair{c.pairwise, c.sandwich};
  }, py::arg("a"), py::arg("b"), py::arg("u"), py::arg("projective_a") = true, py::arg("projective_b") = true);

  // Overlaps. Each returns (V, error_estimate).
  auto pair = [](const OverlapResult& r) { return std::pair{r.value, r.error_estimate}; };
  m.def("coherent_delta_overlap", [pair](Complex gamma) {
    py::gil_scoped_release release;
    return pair(coherent_delta_overlap(gamma));
  }, py::arg("gamma"));
  m.def("coherent_x_overlap", [pair](double delta_sq, Complex gamma) {
    py::gil_scoped_release release;
    return pair(coherent_x_overlap(delta_sq, gamma));
  }, py::arg("delta_sq"), py::arg("gamma") = Complex(2.0));
  m.def("ring_overlap", [pair](double d, Complex gamma) {
    py::gil_scoped_release release;
    return pair(ring_overlap(d, gamma));
  }, py::arg("d"), py::arg("gamma"));
  m.def("fock_overlap", [pair](const std::string& g, Complex gamma) {
    const auto border = BorderFunction::parse(g);
    py::gil_scoped_release release;
    return pair(fock_overlap(border, gamma));
  }, py::arg("g"), py::arg("gamma"));
  m.def("quadrature_overlap", [pair](const std::string& kase, double t, double delta, double kappa, double sigma,
                                     double mass, bool numeric) -> std::pair<double, double> {
    const QuadratureParams p{quadrature_case_from_string(kase), delta, kappa, sigma, t, mass};
    p.validate();
    if (!numeric) return {quadrature_overlap_analytic(p), 0.0};
    py::gil_scoped_release release;
    return pair(quadrature_overlap_numeric(p));
  }, py::arg("case"), py::arg("t"), py::arg("delta") = 1.0, py::arg("kappa") = 1.0, py::arg("sigma") = 1.0,
        py::arg("m") = 1.0, py::arg("numeric") = false);
}
