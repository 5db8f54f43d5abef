#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "snt/analytic.hpp"
#include "snt/commands.hpp"
#include "snt/fixtures.hpp"
#include "snt/io.hpp"

namespace py = pybind11;
using snt::io::json;

namespace {

// Commands exchange JSON text with Python; the package wrapper decodes it.
py::dict to_py(const snt::commands::Output& out) {
  py::dict d;
  d["report"] = out.report.to_json().dump();
  d["text"] = out.text;
  d["ok"] = out.report.all_ok();
  return d;
}

json parse(const std::string& s, const char* what) {
  try {
    return json::parse(s);
  } catch (const json::exception& e) {
    throw snt::InvalidInput(std::string(what) + ": " + e.what());
  }
}

}  // namespace

PYBIND11_MODULE(_snt, m) {
  m.doc() = "Symplectic nilpotent t-modules, orthogonal orbits and a colinear theta identity";

  static py::exception<snt::Error> error(m, "Error", PyExc_ValueError);
  static py::exception<snt::InvalidInput> invalid(m, "InvalidInput", error.ptr());
  static py::exception<snt::GuardExceeded> guard(m, "GuardExceeded", error.ptr());
  static py::exception<snt::TruncationError> truncation(m, "TruncationError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const snt::TruncationError& e) {
      py::object exc = py::handle(truncation.ptr())(e.what());
      exc.attr("achieved") = e.achieved();
      PyErr_SetObject(truncation.ptr(), exc.ptr());
    } catch (const snt::GuardExceeded& e) {
      py::set_error(guard, e.what());
    } catch (const snt::InvalidInput& e) {
      py::set_error(invalid, e.what());
    } catch (const snt::Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("decompose", [](const std::string& module) { return to_py(snt::commands::decompose(parse(module, "module"))); },
        py::arg("module"));

  m.def(
      "orbit",
      [](const std::string& x, std::optional<std::string> y) {
        std::optional<json> jy;
        if (y) jy = parse(*y, "y");
        return to_py(snt::commands::orbit(parse(x, "x"), jy));
      },
      py::arg("x"), py::arg("y") = py::none());

  m.def(
      "census",
      [](std::uint32_t q, std::size_t k, std::vector<std::size_t> partition, std::vector<long long> v_diag,
         std::size_t v_hyperbolic, std::size_t dim_v, std::uint64_t limit, std::size_t transport_samples,
         std::uint64_t seed) {
        snt::commands::CensusOptions o;
        o.q = q;
        o.k = k;
        o.partition = std::move(partition);
        o.v_diag = std::move(v_diag);
        o.v_hyperbolic = v_hyperbolic;
        o.dim_v = dim_v;
        o.limit = limit;
        o.transport_samples = transport_samples;
        o.seed = seed;
        snt::commands::Output out;
        {
          py::gil_scoped_release release;
          out = snt::commands::census(o);
        }
        return to_py(out);
      },
      py::arg("q"), py::arg("k") = 0, py::arg("partition") = std::vector<std::size_t>{},
      py::arg("v_diag") = std::vector<long long>{}, py::arg("v_hyperbolic") = 0, py::arg("dim_v") = 0,
      py::arg("limit") = 0, py::arg("transport_samples") = 0, py::arg("seed") = snt::fixtures::kDefaultSeed);

  m.def(
      "verify_sw",
      [](const std::vector<std::string>& lattices, std::string tau11, std::string tau12, std::string tau22,
         unsigned rank, double tol, bool direct, std::string mass) {
        snt::commands::IdentityOptions o;
        for (const auto& l : lattices) o.lattices.push_back(parse(l, "lattice"));
        o.tau11 = std::move(tau11);
        o.tau12 = std::move(tau12);
        o.tau22 = std::move(tau22);
        o.rank = rank;
        o.tol = tol;
        o.direct = direct;
        o.mass = std::move(mass);
        snt::commands::Output out;
        {
          py::gil_scoped_release release;
          out = snt::commands::verify_sw(o);
        }
        return to_py(out);
      },
      py::arg("lattices") = std::vector<std::string>{}, py::arg("tau11") = "2i", py::arg("tau12") = "0.5i",
      py::arg("tau22") = "2i", py::arg("rank") = 8, py::arg("tol") = 1e-8, py::arg("direct") = false,
      py::arg("mass") = "");

  m.def("fixtures", [](std::uint64_t seed) {
    py::dict d;
    for (const auto& f : snt::fixtures::generate(seed)) d[py::str(f.path)] = f.content.dump();
    return d;
  }, py::arg("seed") = snt::fixtures::kDefaultSeed);

  m.def("e8_gram", [] { return snt::analytic::e8().gram; });
  m.def("weyl_group_order_e8", [] { return snt::analytic::weyl_group_order_e8().get_str(); });
  m.def("precision_floor", &snt::analytic::precision_floor);

  m.def(
      "theta_q_coefficients",
      [](std::vector<std::vector<long long>> gram, std::size_t n_max) {
        auto l = snt::analytic::make_lattice("L", std::move(gram));
        return snt::analytic::theta_q_coefficients(l, n_max);
      },
      py::arg("gram"), py::arg("n_max"));

  m.def(
      "eisenstein_q_coefficients",
      [](unsigned w, std::size_t n) {
        std::vector<std::string> out;
        for (const auto& a : snt::analytic::eisenstein_q_coefficients(w, n)) out.push_back(a.get_str());
        return out;
      },
      py::arg("w"), py::arg("n"));
}
