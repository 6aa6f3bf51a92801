#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dtil/dtil.hpp"

namespace py = pybind11;
using namespace dtil;

namespace {

py::array_t<double> to_numpy(const std::vector<double>& v, int n) {
  std::vector<py::ssize_t> shape(kDim, n);
  py::array_t<double> out(shape);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

// (n, ..., n, components, 2, 2) complex view copy of a matrix field
py::array_t<std::complex<double>> matrices(const MatrixField& f) {
  std::vector<py::ssize_t> shape(kDim, f.spec().n_per_axis);
  shape.push_back(f.components());
  shape.push_back(2);
  shape.push_back(2);
  py::array_t<std::complex<double>> out(shape);
  auto* p = out.mutable_data();
  for (const Mat2& m : f.values())
    for (const auto& z : m.m) *p++ = z;
  return out;
}

void load_matrices(MatrixField& f, py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> a) {
  if (static_cast<std::size_t>(a.size()) != f.values().size() * 4)
    throw std::invalid_argument("array has " + std::to_string(a.size()) + " entries, expected " +
                                std::to_string(f.values().size() * 4));
  const auto* p = a.data();
  for (Mat2& m : f.values())
    for (auto& z : m.m) z = *p++;
}

py::dict trace_dict(const FlowTrace& t) {
  std::vector<long> step;
  std::vector<double> L, g, r1, r2, dt;
  for (const auto& r : t.records) {
    step.push_back(r.step);
    L.push_back(r.energy.total);
    g.push_back(r.grad_norm);
    r1.push_back(r.r1_norm);
    r2.push_back(r.r2_norm);
    dt.push_back(r.step_size);
  }
  py::dict d;
  d["step"] = py::array(py::cast(step));
  d["L"] = py::array(py::cast(L));
  d["grad_norm"] = py::array(py::cast(g));
  d["r1_norm"] = py::array(py::cast(r1));
  d["r2_norm"] = py::array(py::cast(r2));
  d["step_size"] = py::array(py::cast(dt));
  d["status"] = to_string(t.status);
  d["evaluations"] = t.evaluations;
  return d;
}

SiteIndex site_from(const std::vector<int>& c) {
  if (c.size() != kDim) throw std::invalid_argument("a site needs 6 coordinates");
  SiteIndex s;
  std::copy(c.begin(), c.end(), s.coords.begin());
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "lattice Donaldson-Thomas instanton toolkit on the flat 6-torus";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SnapshotError>(m, "SnapshotError", PyExc_IOError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<LatticeSpec>(m, "LatticeSpec")
      .def(py::init<int, double>(), py::arg("n"), py::arg("spacing") = 1.0)
      .def_readonly("n", &LatticeSpec::n_per_axis)
      .def_readonly("spacing", &LatticeSpec::spacing)
      .def_property_readonly("sites", &LatticeSpec::sites)
      .def_property_readonly("period", &LatticeSpec::period)
      .def_property_readonly("volume", &LatticeSpec::volume)
      .def("__eq__", [](const LatticeSpec& a, const LatticeSpec& b) { return a == b; })
      .def("__repr__", [](const LatticeSpec& s) {
        return "LatticeSpec(n=" + std::to_string(s.n_per_axis) + ", spacing=" + format_double(s.spacing) + ")";
      });

  py::class_<EnergyBreakdown>(m, "EnergyBreakdown")
      .def_readonly("total", &EnergyBreakdown::total)
      .def_readonly("curvature_term", &EnergyBreakdown::curvature_term)
      .def_readonly("dstar_term", &EnergyBreakdown::dstar_term)
      .def_readonly("bracket_term", &EnergyBreakdown::bracket_term)
      .def_readonly("det_u_l2", &EnergyBreakdown::det_u_l2);

  py::class_<FieldState>(m, "FieldState")
      .def(py::init<const LatticeSpec&>())
      .def_property_readonly("spec", &FieldState::spec)
      .def_property(
          "connection", [](const FieldState& s) { return matrices(s.connection); },
          [](FieldState& s, py::array_t<std::complex<double>> a) {
            load_matrices(s.connection, a);
            s.connection.project();
          })
      .def_property(
          "higgs", [](const FieldState& s) { return matrices(s.higgs); },
          [](FieldState& s, py::array_t<std::complex<double>> a) {
            load_matrices(s.higgs, a);
            s.higgs.project();
          })
      .def("is_valid", &FieldState::is_valid, py::arg("tol") = 1e-12)
      .def("energy", [](const FieldState& s) { return energy(s); })
      .def("density", [](const FieldState& s) { return to_numpy(density(s).values, s.spec().n_per_axis); })
      .def("residuals", [](const FieldState& s, double kappa) {
        const ResidualPair r = dt_residuals(s, kappa);
        return py::make_tuple(r.r1_norm, r.r2_norm);
      }, py::arg("kappa") = 1.0)
      .def("__eq__", [](const FieldState& a, const FieldState& b) { return a == b; });

  m.def("random_smooth_state", [](const LatticeSpec& spec, double amplitude, int modes, std::uint64_t seed) {
    RandomFieldOptions o;
    o.amplitude = amplitude;
    o.modes = modes;
    o.seed = seed;
    return random_smooth_state(spec, o);
  }, py::arg("spec"), py::arg("amplitude") = 1e-2, py::arg("modes") = 6, py::arg("seed") = 1);
  m.def("random_rough_state", &random_rough_state, py::arg("spec"), py::arg("amplitude"), py::arg("seed"));
  m.def("field_bump", &field_bump, py::arg("spec"), py::arg("center"), py::arg("width"), py::arg("amplitude"));

  m.def("minimize", [](const FieldState& s, const py::dict& options) {
    FlowConfig c;
    for (auto [k, v] : options) {
      const std::string key = py::str(k);
      if (key == "step_size") c.step_size = v.cast<double>();
      else if (key == "max_steps") c.max_steps = v.cast<long>();
      else if (key == "grad_tol") c.grad_tol = v.cast<double>();
      else if (key == "energy_rtol") c.energy_rtol = v.cast<double>();
      else if (key == "backtracking") c.backtracking = v.cast<double>();
      else if (key == "step_growth") c.step_growth = v.cast<double>();
      else if (key == "armijo") c.armijo = v.cast<double>();
      else if (key == "kappa") c.kappa = v.cast<double>();
      else if (key == "higgs_metric") c.higgs_metric = v.cast<double>();
      else throw std::invalid_argument("unknown flow option '" + key + "'");
    }
    FlowResult r;
    {
      py::gil_scoped_release release;
      r = minimize(s, c);
    }
    return py::make_tuple(std::move(r.state), trace_dict(r.trace));
  }, py::arg("state"), py::arg("options") = py::dict());

  m.def("coulomb_fix", [](const FieldState& s, double tol, int max_iters) {
    CoulombResult r = coulomb_fix(s, tol, max_iters);
    return py::make_tuple(std::move(r.state), r.initial_norm, r.final_norm, r.converged);
  }, py::arg("state"), py::arg("tol") = 1e-8, py::arg("max_iters") = 50);

  m.def("identity_sweep", [](long samples, unsigned long long seed) {
    const IdentitySweepResult r = identity_sweep(samples, seed);
    py::dict d;
    d["samples"] = r.samples;
    d["identity_failures"] = r.identity_failures;
    d["inequality_failures"] = r.inequality_failures;
    d["max_identity_rel_error"] = r.max_identity_rel_error;
    d["min_inequality_slack"] = r.min_inequality_slack;
    return d;
  }, py::arg("samples"), py::arg("seed") = 1);

  m.def("monotonicity", [](const FieldState& s, const std::vector<int>& center, const std::vector<double>& radii,
                           double c_tol) {
    const MonotonicityReport r = monotonicity_scan(s, site_from(center), radii, c_tol);
    py::dict d;
    d["radii"] = r.radii;
    d["values"] = r.values;
    d["violations"] = r.violations.size();
    d["strict_decreases"] = r.strict_decreases;
    return d;
  }, py::arg("state"), py::arg("center"), py::arg("radii"), py::arg("c_tol") = 5.0);

  m.def("implied_constants", [](const FieldState& s, const std::vector<std::vector<int>>& centers,
                                const std::vector<double>& radii) {
    std::vector<SiteIndex> c;
    for (const auto& x : centers) c.push_back(site_from(x));
    const EpsRegularityReport r = eps_regularity_scan(s, c, radii);
    return py::make_tuple(r.max_implied_c1, r.max_implied_c2);
  }, py::arg("state"), py::arg("centers"), py::arg("radii"));

  m.def("write_snapshot", [](const std::string& path, const FieldState& s) { write_snapshot(path, s); });
  m.def("read_state", &read_state, py::arg("path"));
  m.def("snapshot_bytes", [](const FieldState& s) {
    std::ostringstream os(std::ios::binary);
    write_snapshot(os, s);
    return py::bytes(os.str());
  });
}
