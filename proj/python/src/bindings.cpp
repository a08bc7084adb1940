#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hyperswitch/certifier.hpp"
#include "hyperswitch/errors.hpp"
#include "hyperswitch/io.hpp"
#include "hyperswitch/signals.hpp"
#include "hyperswitch/simulator.hpp"

namespace py = pybind11;
using namespace hyperswitch;

namespace {

SearchOptions options_from(const std::string& json) {
    return json.empty() ? SearchOptions{} : search_options_from_json(Json::parse(json));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Lyapunov certificates and simulation for switched linear hyperbolic systems";

    py::register_exception<Error>(m, "Error");

    py::class_<SwitchedSystem>(m, "SwitchedSystem")
        .def_static("from_json", [](const std::string& s) { return system_from_json(Json::parse(s)); })
        .def("to_json", [](const SwitchedSystem& s) { return system_to_json(s).dump(); })
        .def_property_readonly("n", &SwitchedSystem::n)
        .def_property_readonly("size", &SwitchedSystem::size)
        .def("G", [](const SwitchedSystem& s, int i) { return s.mode(i).G(); })
        .def("F", [](const SwitchedSystem& s, int i) { return s.mode(i).F(); })
        .def("speeds", [](const SwitchedSystem& s, int i) { return s.mode(i).lambda(); });

    py::class_<Certificate>(m, "Certificate")
        .def(py::init<>())
        .def_static("from_json", [](const std::string& s) { return certificate_from_json(Json::parse(s)); })
        .def("to_json", [](const Certificate& c) { return certificate_to_json(c).dump(); })
        .def_property(
            "variant", [](const Certificate& c) { return to_string(c.variant); },
            [](Certificate& c, const std::string& v) { c.variant = variant_from_string(v); })
        .def_readwrite("Q", &Certificate::Q)
        .def_readwrite("mu", &Certificate::mu)
        .def_readwrite("nu", &Certificate::nu)
        .def_readwrite("gamma", &Certificate::gamma)
        .def_readwrite("tau_D", &Certificate::tau_D);

    m.def(
        "certify",
        [](const SwitchedSystem& sys, const std::string& variant, const std::string& options) -> py::object {
            CertifyResult r;
            {
                py::gil_scoped_release release;
                r = certify(sys, variant_from_string(variant), options_from(options));
            }
            if (!r.feasible) return py::none();
            return py::cast(*r.certificate);
        },
        py::arg("system"), py::arg("variant"), py::arg("options") = "",
        "Returns a Certificate, or None when no certificate was found. options is a JSON string.");

    m.def(
        "check_certificate",
        [](const SwitchedSystem& sys, const Certificate& c) {
            const AuditReport a = check_certificate(sys, c);
            py::dict out;
            out["passed"] = a.passed;
            out["failures"] = a.failures;
            py::list entries;
            for (const Margin& e : a.entries) entries.append(py::make_tuple(e.label, e.value));
            out["entries"] = entries;
            return out;
        },
        py::arg("system"), py::arg("certificate"));

    m.def("make_certificate",
          [](const SwitchedSystem& sys, const std::string& variant, std::vector<Vector> q, std::vector<double> mu,
             double nu) { return make_certificate(sys, variant_from_string(variant), std::move(q), std::move(mu), nu); },
          py::arg("system"), py::arg("variant"), py::arg("Q"), py::arg("mu"), py::arg("nu"));

    m.def("dwell_time_bound",
          [](const std::string& variant, double gamma, double nu, const std::vector<double>& mu) {
              return dwell_time_bound(variant_from_string(variant), gamma, nu, mu);
          },
          py::arg("variant"), py::arg("gamma"), py::arg("nu"), py::arg("mu"));

    m.def(
        "validate_dwell",
        [](const std::string& signal, double tau_d, double n0) {
            return validate_dwell(signal_from_json(Json::parse(signal)), tau_d, n0).ok;
        },
        py::arg("signal"), py::arg("tau_D"), py::arg("N0"), "signal is a JSON string.");

    m.def(
        "simulate",
        [](const SwitchedSystem& sys, const std::string& signal, int n_x, double cfl,
           const Certificate* cert) {
            GridSpec grid;
            grid.n_x = n_x;
            grid.cfl = cfl;
            grid.keep_states = cert != nullptr;
            Trace tr;
            {
                py::gil_scoped_release release;
                const SwitchingSignal sig = signal_from_json(Json::parse(signal), sys.size());
                tr = simulate(sys, sig, default_initial_profile(sys.n(), n_x), grid);
                if (cert) tr = lyapunov_trace(std::move(tr), sys, *cert);
            }
            py::dict out;
            out["t"] = tr.times;
            out["l2"] = tr.l2;
            out["mode"] = tr.mode;
            if (cert) out["V"] = tr.lyap;
            out["rate"] = tr.fit ? py::cast(tr.fit->rate) : py::none();
            return out;
        },
        py::arg("system"), py::arg("signal"), py::arg("n_x") = 201, py::arg("cfl") = 0.9,
        py::arg("certificate") = nullptr);
}
