#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "qclab/oracle.hpp"
#include "qclab/scenario.hpp"

namespace py = pybind11;
using namespace qclab;

namespace {

SpacetimePoint point_from(const std::vector<double>& r, double t) {
  if (r.size() != 3) throw std::invalid_argument("point needs 3 coordinates");
  return SpacetimePoint{Vec3(r[0], r[1], r[2]), t};
}

SlotPattern pattern_from(const std::string& text) {
  if (text.size() % 2 != 0) throw std::invalid_argument("bad pattern string");
  SlotPattern p;
  for (std::size_t i = 0; i < text.size(); i += 2) {
    Slot s;
    switch (text[i]) {
      case 'E': s.field = FieldKind::E; break;
      case 'B': s.field = FieldKind::B; break;
      case 'A': s.field = FieldKind::A; break;
      default: throw std::invalid_argument("bad field letter in pattern");
    }
    switch (text[i + 1]) {
      case '+': s.sign = FreqSign::Plus; break;
      case '-': s.sign = FreqSign::Minus; break;
      default: throw std::invalid_argument("bad sign in pattern");
    }
    p.slots.push_back(s);
  }
  return p;
}

StateSpec state_from_json(const std::string& text, int mode_count) {
  // reuse the scenario parser by wrapping the state in a one-state scenario
  nlohmann::ordered_json state = nlohmann::ordered_json::parse(text);
  nlohmann::ordered_json j;
  j["name"] = "inline";
  nlohmann::ordered_json modes = nlohmann::ordered_json::array();
  for (int i = 0; i < mode_count; ++i) {
    nlohmann::ordered_json m;
    m["n"] = {0, 0, i + 1};
    m["pol"] = 1;
    modes.push_back(m);
  }
  j["mode_set"] = {{"modes", modes}};
  nlohmann::ordered_json cutoffs = nlohmann::ordered_json::array();
  for (int i = 0; i < mode_count; ++i) cutoffs.push_back(2);
  j["cutoffs"] = cutoffs;
  j["states"] = nlohmann::ordered_json::array({state});
  j["fixed_points"] = {{{"r", {0.0, 0.0, 0.0}}, {"t", 0.0}},
                       {{"r", {0.0, 0.0, 0.0}}, {"t", 0.0}},
                       {{"r", {0.0, 0.0, 0.0}}, {"t", 0.0}}};
  return parse_scenario(j.dump()).states.at(0).spec;
}

py::array_t<Complex> tensor_to_array(const Tensor& t) {
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(t.rank()), 3);
  py::array_t<Complex> out(shape);
  auto* data = out.mutable_data();
  for (std::size_t i = 0; i < t.size(); ++i) data[i] = t[i];
  return out;
}

Convention convention_from(const std::string& name) {
  if (name == "printed_22") return Convention::Printed22;
  if (name == "derivation_13") return Convention::Derivation13;
  throw std::invalid_argument("unknown convention: " + name);
}

/// Thin handle over (ModeSet, FockSpace) for the python surface.
class Lab {
 public:
  Lab(double box_length, const std::vector<std::pair<std::vector<int>, int>>& modes,
      const std::vector<int>& cutoffs, double c, double hbar, const std::string& convention) {
    std::vector<ModeEntry> entries;
    for (const auto& [n, pol] : modes) {
      if (n.size() != 3) throw std::invalid_argument("mode n needs 3 integers");
      entries.push_back(ModeEntry{Vec3i(n[0], n[1], n[2]), pol});
    }
    AmplitudeConvention conv;
    if (convention == "unit")
      conv = AmplitudeConvention::Unit;
    else if (convention == "physical")
      conv = AmplitudeConvention::Physical;
    else
      throw std::invalid_argument("convention must be unit or physical");
    ms_ = build_mode_set(box_length, entries, c, hbar, conv);
    space_ = build_fock_space(static_cast<int>(cutoffs.size()), cutoffs);
  }

  DensityOperator state(const std::string& spec_json) const {
    return make_state(space_, state_from_json(spec_json, ms_.size()));
  }

  py::array_t<Complex> correlator_dense(const std::string& state_json,
                                        const std::string& pattern,
                                        const std::vector<std::pair<std::vector<double>, double>>& points) const {
    std::vector<SpacetimePoint> pts;
    for (const auto& [r, t] : points) pts.push_back(point_from(r, t));
    return tensor_to_array(
        dense_correlator(state(state_json), space_, ms_, pattern_from(pattern), pts));
  }

  py::array_t<Complex> correlator_eval(const std::string& state_json,
                                       const std::string& pattern,
                                       const std::vector<std::pair<std::vector<double>, double>>& points) const {
    std::vector<SpacetimePoint> pts;
    for (const auto& [r, t] : points) pts.push_back(point_from(r, t));
    const SlotPattern pat = pattern_from(pattern);
    const std::vector<SpacetimePoint> fixed(pts.begin() + 1, pts.end());
    const CorrelatorField cf =
        correlator_field(state(state_json), space_, ms_, pat, fixed);
    return tensor_to_array(cf.evaluate(pts.at(0)));
  }

  py::dict densities(const std::string& state_json, const std::string& convention,
                     const std::vector<std::pair<std::vector<double>, double>>& fixed,
                     const std::pair<std::vector<double>, double>& p1,
                     const std::vector<double>& r0) const {
    std::vector<SpacetimePoint> fpts;
    for (const auto& [r, t] : fixed) fpts.push_back(point_from(r, t));
    const DensityBundle b =
        density_bundle(convention_from(convention), state(state_json), space_, ms_, fpts,
                       point_from(p1.first, p1.second), Vec3(r0.at(0), r0.at(1), r0.at(2)));
    py::dict out;
    out["W"] = b.W;
    out["T"] = std::vector<double>{b.T(0), b.T(1), b.T(2)};
    out["Tm"] = std::vector<double>{b.Tm(0), b.Tm(1), b.Tm(2)};
    out["Lp"] = std::vector<double>{b.Lp(0), b.Lp(1), b.Lp(2)};
    std::vector<std::vector<double>> w(3, std::vector<double>(3));
    for (int p = 0; p < 3; ++p)
      for (int i = 0; i < 3; ++i) w[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)] = b.Wstress(p, i);
    out["Wstress"] = w;
    return out;
  }

  py::dict angular(const std::string& state_json, const std::string& convention,
                   const std::vector<std::pair<std::vector<double>, double>>& fixed,
                   const std::vector<double>& r0, double t1) const {
    std::vector<SpacetimePoint> fpts;
    for (const auto& [r, t] : fixed) fpts.push_back(point_from(r, t));
    const AngularSplit a =
        angular_split(convention_from(convention), state(state_json), space_, ms_, fpts,
                      Vec3(r0.at(0), r0.at(1), r0.at(2)), t1);
    py::dict out;
    auto vec = [](const Vec3& v) { return std::vector<double>{v(0), v(1), v(2)}; };
    out["total"] = vec(a.total);
    out["orbital"] = vec(a.orbital);
    out["spin"] = vec(a.spin);
    out["boundary"] = vec(a.boundary);
    out["scale"] = a.scale;
    return out;
  }

 private:
  ModeSet ms_;
  FockSpace space_;
};

std::string run_scenario_json(const std::string& text, const std::string& format) {
  const SuiteReport report = run_suite(parse_scenario(text));
  return render_report(report,
                       format == "csv" ? ReportFormat::Csv : ReportFormat::Json);
}

std::string run_scenario_file(const std::string& path, const std::string& format) {
  const SuiteReport report = run_suite(load_scenario(path));
  return render_report(report,
                       format == "csv" ? ReportFormat::Csv : ReportFormat::Json);
}

}  // namespace

PYBIND11_MODULE(qclab_py, m) {
  m.doc() = "Verification lab for conservation laws of second-order field "
            "correlation tensors";

  py::class_<Lab>(m, "Lab")
      .def(py::init<double, const std::vector<std::pair<std::vector<int>, int>>&,
                    const std::vector<int>&, double, double, const std::string&>(),
           py::arg("box_length"), py::arg("modes"), py::arg("cutoffs"),
           py::arg("c") = 1.0, py::arg("hbar") = 1.0, py::arg("convention") = "unit")
      .def("correlator_dense", &Lab::correlator_dense, py::arg("state"), py::arg("pattern"),
           py::arg("points"))
      .def("correlator_eval", &Lab::correlator_eval, py::arg("state"), py::arg("pattern"),
           py::arg("points"))
      .def("densities", &Lab::densities, py::arg("state"), py::arg("convention"),
           py::arg("fixed_points"), py::arg("p1"), py::arg("r0"))
      .def("angular", &Lab::angular, py::arg("state"), py::arg("convention"),
           py::arg("fixed_points"), py::arg("r0"), py::arg("t1") = 0.0);

  m.def("run_scenario_json", &run_scenario_json, py::arg("text"),
        py::arg("format") = "json", "Run a scenario given as JSON text.");
  m.def("run_scenario_file", &run_scenario_file, py::arg("path"),
        py::arg("format") = "json", "Run a scenario file.");
  m.def("bundled_scenarios", [] {
    py::dict out;
    for (const auto& [name, text] : bundled_scenarios()) out[name.c_str()] = text;
    return out;
  });
  m.def("list_identities", [] {
    std::vector<std::pair<std::string, std::string>> out = identity_catalog();
    return out;
  });
  m.attr("__version__") = kVersion;
}
