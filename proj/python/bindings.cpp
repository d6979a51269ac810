#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "atombs/amplitude.hpp"
#include "atombs/cli_io.hpp"
#include "atombs/linear_reference.hpp"
#include "atombs/moments.hpp"
#include "atombs/oracles.hpp"

namespace py = pybind11;
using namespace atombs;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<double> to_matrix(const JointDistribution2D& d) {
    py::array_t<double> out({d.grid.x.points(), d.grid.y.points()});
    std::copy(d.values.begin(), d.values.end(), out.mutable_data());
    return out;
}

py::dict distribution_dict(const JointDistribution2D& d) {
    py::dict out;
    out["x"] = to_array(d.grid.x.nodes());
    out["y"] = to_array(d.grid.y.nodes());
    out["values"] = to_matrix(d);
    out["domain"] = d.domain == Domain::Time ? "time" : "frequency";
    out["normalization"] = d.normalization;
    out["warnings"] = d.warnings;
    return out;
}

amplitude::Model parse_model(const std::string& s) {
    if (s == "atomic") return amplitude::Model::Atomic;
    if (s == "linear") return amplitude::Model::Linear;
    throw std::invalid_argument("model must be 'atomic' or 'linear'");
}

}  // namespace

PYBIND11_MODULE(_atombs, m) {
    m.doc() = "Two photons scattering on a two-level atom in a waveguide";
    m.attr("__version__") = std::string(io::kVersion);

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::enum_<PulseKind>(m, "PulseKind")
        .value("Square", PulseKind::Square)
        .value("Gaussian", PulseKind::Gaussian)
        .value("ExpRising", PulseKind::ExpRising)
        .value("Sampled", PulseKind::Sampled);

    py::class_<ScatterParams>(m, "ScatterParams")
        .def(py::init([](double gamma, double detuning, double bandwidth, double delay, PulseKind kind) {
                 ScatterParams p{gamma, detuning, bandwidth, delay, kind};
                 p.validate();
                 return p;
             }),
             py::arg("gamma") = 1.0, py::arg("detuning") = 0.0, py::arg("bandwidth") = 1.0, py::arg("delay") = 0.0,
             py::arg("pulse_kind") = PulseKind::Square)
        .def_readwrite("gamma", &ScatterParams::gamma)
        .def_readwrite("detuning", &ScatterParams::detuning)
        .def_readwrite("bandwidth", &ScatterParams::bandwidth)
        .def_readwrite("delay", &ScatterParams::delay)
        .def_readwrite("pulse_kind", &ScatterParams::pulse_kind);

    py::class_<Pulse>(m, "Pulse")
        .def_static("square", &Pulse::square, py::arg("bandwidth"), py::arg("start") = 0.0)
        .def_static("gaussian", &Pulse::gaussian, py::arg("bandwidth"))
        .def_static("exp_rising", &Pulse::exp_rising, py::arg("bandwidth"))
        .def_static("sampled", &Pulse::sampled, py::arg("tau0"), py::arg("step"), py::arg("samples"),
                    py::arg("bandwidth") = 0.0)
        .def_static("from_params", &Pulse::from_params)
        .def_static("from_csv", [](const std::string& path) { return load_sampled_pulse_csv(path); })
        .def_property_readonly("kind", &Pulse::kind)
        .def_property_readonly("bandwidth", &Pulse::bandwidth)
        .def_property_readonly("start_time", &Pulse::start_time)
        .def_property_readonly("end_time", &Pulse::end_time)
        .def_property_readonly("duration", &Pulse::duration)
        .def("time_profile", py::vectorize(&Pulse::time_profile))
        .def("spectral_amplitude", py::vectorize(&Pulse::spectral_amplitude))
        .def("shifted", &Pulse::shifted);

    auto mo = m.def_submodule("moments", "Expectation-value hierarchy");
    mo.def(
        "integrate",
        [](const ScatterParams& p, const Pulse& pulse, std::optional<double> t_end, std::optional<double> dt) {
            auto o = moments::default_options(p, pulse);
            if (t_end) o.t_end = *t_end;
            if (dt) o.dt = *dt;
            o.store_every = 0;
            moments::MomentTrace tr;
            {
                py::gil_scoped_release release;
                tr = moments::integrate_moments(p, pulse, o);
            }
            py::dict out;
            out["times"] = to_array(tr.times);
            out["excitation"] = to_array(tr.excitation);
            out["coincidence"] = to_array(tr.coincidence);
            out["pair_a"] = to_array(tr.pair_a);
            out["pair_b"] = to_array(tr.pair_b);
            out["number_a"] = to_array(tr.number_a);
            out["number_b"] = to_array(tr.number_b);
            out["converged"] = tr.converged;
            out["independent_coincidence"] = moments::independent_photon_coincidence(tr);
            return out;
        },
        py::arg("params"), py::arg("pulse"), py::arg("t_end") = py::none(), py::arg("dt") = py::none());
    mo.def("asymptotic_coincidence", &moments::asymptotic_coincidence, py::arg("params"), py::arg("pulse"),
           py::call_guard<py::gil_scoped_release>());
    mo.def(
        "delay_scan",
        [](const ScatterParams& p, const Pulse& pulse, const std::vector<double>& delays, unsigned workers) {
            const auto scan = moments::delay_scan(p, pulse, delays, workers);
            std::vector<double> c;
            for (const auto& pt : scan) c.push_back(pt.coincidence);
            return to_array(c);
        },
        py::arg("params"), py::arg("pulse"), py::arg("delays"), py::arg("workers") = 0);

    auto li = m.def_submodule("linear", "Linear beamsplitter with the atom's single-photon response");
    li.def("reflection_coefficient", &linear::single_photon_reflection_coefficient, py::arg("pulse"),
           py::arg("detuning"), py::arg("gamma") = 1.0);
    li.def("coincidence", &linear::linear_coincidence, py::arg("pulse"), py::arg("detuning"), py::arg("gamma") = 1.0);
    li.def(
        "response",
        [](double x) {
            const auto r = linear::single_photon_response(x);
            return py::make_tuple(r.reflection, r.transmission);
        },
        py::arg("x"));

    auto orc = m.def_submodule("oracles", "Closed-form results");
    orc.def("reflection_monochromatic", &oracles::reflection_monochromatic);
    orc.def("coincidence_monochromatic", &oracles::coincidence_monochromatic);
    orc.def("reflection_square_resonant", &oracles::reflection_square_resonant);
    orc.def("coincidence_square_resonant", &oracles::coincidence_square_resonant);
    orc.def("excitation_square", &oracles::excitation_square, py::arg("sigma"), py::arg("delta"), py::arg("t_prime"));

    auto am = m.def_submodule("amplitude", "Coincidence-sector two-photon amplitude on resonance");
    am.def("default_time_axis", [](const Pulse& p, double gamma, std::size_t n) {
        return to_array(amplitude::default_time_axis(p, gamma, n).nodes());
    }, py::arg("pulse"), py::arg("gamma") = 1.0, py::arg("points") = 512);
    am.def(
        "joint_time_distribution",
        [](const Pulse& pulse, double t, double lower, double upper, std::size_t points, const std::string& model,
           double gamma) {
            const Grid1D axis(lower, upper, points);
            return distribution_dict(
                amplitude::joint_time_distribution(pulse, t, Grid2D{axis, axis}, parse_model(model), gamma));
        },
        py::arg("pulse"), py::arg("t"), py::arg("lower"), py::arg("upper"), py::arg("points"),
        py::arg("model") = "atomic", py::arg("gamma") = 1.0);
    am.def(
        "joint_spectrum",
        [](const Pulse& pulse, double lower, double upper, std::size_t points, const std::string& model,
           double gamma) {
            const Grid1D axis(lower, upper, points);
            return distribution_dict(amplitude::joint_spectrum(pulse, Grid2D{axis, axis}, parse_model(model), gamma));
        },
        py::arg("pulse"), py::arg("lower"), py::arg("upper"), py::arg("points"), py::arg("model") = "atomic",
        py::arg("gamma") = 1.0);
    am.def(
        "joint_spectrum_amplitude",
        [](const Pulse& pulse, double w1, double w2, const std::string& model, double gamma) {
            return amplitude::joint_spectrum_amplitude(pulse, w1, w2, parse_model(model), gamma);
        },
        py::arg("pulse"), py::arg("omega1"), py::arg("omega2"), py::arg("model") = "atomic", py::arg("gamma") = 1.0);
    am.def(
        "path_decomposition",
        [](const Pulse& pulse, double tau1, double tau2, double t, const std::string& model, double gamma) {
            const auto p = amplitude::path_decomposition(pulse, tau1, tau2, t, parse_model(model), gamma);
            py::dict out;
            out["a"] = p.a;
            out["b1"] = p.b1;
            out["b2"] = p.b2;
            out["c1"] = p.c1;
            out["c2"] = p.c2;
            return out;
        },
        py::arg("pulse"), py::arg("tau1"), py::arg("tau2"), py::arg("t") = amplitude::kAfterScattering,
        py::arg("model") = "atomic", py::arg("gamma") = 1.0);
    am.attr("AFTER_SCATTERING") = amplitude::kAfterScattering;

    m.def(
        "run_config",
        [](const std::string& text) {
            io::RunConfig c;
            io::apply_text(c, text);
            const auto r = io::run(c);
            py::dict out;
            out["columns"] = r.table.columns;
            out["csv"] = io::to_csv(r.table);
            out["normalization"] = r.normalization;
            out["warnings"] = r.warnings;
            return out;
        },
        py::arg("text"), "Runs a key = value configuration and returns the CSV table.");
}
