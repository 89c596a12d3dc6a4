#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qhyper/babyfock.hpp"
#include "qhyper/cli/commands.hpp"
#include "qhyper/cli/config.hpp"
#include "qhyper/clt.hpp"
#include "qhyper/hyperc.hpp"
#include "qhyper/linalg.hpp"
#include "qhyper/polynomial.hpp"
#include "qhyper/qfock.hpp"
#include "qhyper/semigroup.hpp"
#include "qhyper/state.hpp"

namespace py = pybind11;
using namespace qhyper;

namespace {

// Keeps the model alive next to its density so Python code can hold either.
struct Model {
  std::shared_ptr<const BabyFock> fock;
  std::shared_ptr<const DensityFactorization> density;
};

Model make_model(const std::vector<double>& mu, const SignTable* signs) {
  const int n = static_cast<int>(mu.size());
  auto fock = std::make_shared<const BabyFock>(ModelParams(mu, signs ? *signs : SignTable(n)));
  auto density = std::make_shared<const DensityFactorization>(density_closed_form(*fock));
  return {fock, density};
}

py::dict relations_dict(const RelationsReport& r) {
  py::dict d;
  d["commutation"] = r.commutation;
  d["star_commutation"] = r.star_commutation;
  d["nilpotency"] = r.nilpotency;
  d["anticommutator"] = r.anticommutator;
  d["gamma_norm"] = r.gamma_norm;
  d["pass"] = r.pass();
  return d;
}

}  // namespace

PYBIND11_MODULE(_qhyper, m) {
  m.doc() = "Twisted baby Fock models, Haagerup Lp norms, hypercontractivity checks and q-Gaussian moments.";
  m.attr("__version__") = cli::version_string().substr(std::string("qhyper ").size());

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_RuntimeError);

  py::class_<SignTable>(m, "SignTable")
      .def(py::init<int>(), py::arg("n"))
      .def(py::init<int, const std::vector<std::tuple<int, int, int>>&>(), py::arg("n"), py::arg("pairs"))
      .def_static("random", &SignTable::random, py::arg("n"), py::arg("seed"), py::arg("probability_minus") = 0.5)
      .def_static("constant", &SignTable::constant, py::arg("n"), py::arg("sign"))
      .def_static("from_json", &SignTable::from_json)
      .def_property_readonly("n", &SignTable::n)
      .def("__call__", &SignTable::operator(), py::arg("i"), py::arg("j"))
      .def("pairs", &SignTable::pairs)
      .def("to_json", &SignTable::to_json);

  py::class_<Model>(m, "BabyFock")
      .def(py::init([](const std::vector<double>& mu, const SignTable* signs) { return make_model(mu, signs); }),
           py::arg("mu"), py::arg("signs") = nullptr)
      .def_property_readonly("n", [](const Model& s) { return s.fock->n(); })
      .def_property_readonly("dim", [](const Model& s) { return s.fock->dim(); })
      .def_property_readonly("mu", [](const Model& s) { return s.fock->params().mu; })
      .def("gamma", [](const Model& s, int i) { return Matrix(s.fock->gamma(i)); }, py::arg("index"))
      .def("gamma_star", [](const Model& s, int i) { return Matrix(s.fock->gamma_star(i)); }, py::arg("index"))
      .def("identity", [](const Model& s) { return s.fock->identity(); })
      .def("vacuum_state", [](const Model& s, const Matrix& x) { return s.fock->vacuum_state(x); })
      .def("density", [](const Model& s) { return s.density->dense(); })
      .def("density_power", [](const Model& s, double a) { return s.density->dense_power(a); }, py::arg("alpha"))
      .def("verify_relations", [](const Model& s) { return relations_dict(s.fock->verify_relations()); })
      .def("haagerup_norm", [](const Model& s, const Matrix& x, double p) { return haagerup_norm(*s.density, x, p); },
           py::arg("x"), py::arg("p"))
      .def("modular_residual",
           [](const Model& s, double p) { return modular_check(*s.fock, *s.density, p).max_residual(); }, py::arg("p"))
      .def("apply_ou", [](const Model& s, const Matrix& x, double t) { return apply_OU(*s.fock, x, t); },
           py::arg("x"), py::arg("t"))
      .def("contraction_ratio",
           [](const Model& s, const Matrix& x, double t, double p) {
             return contraction_ratio(*s.fock, *s.density, x, t, p);
           },
           py::arg("x"), py::arg("t"), py::arg("p"))
      .def("dual_contraction_ratio",
           [](const Model& s, const Matrix& x, double t, double p_dual) {
             return dual_contraction_ratio(*s.fock, *s.density, x, t, p_dual);
           },
           py::arg("x"), py::arg("t"), py::arg("p_dual"))
      .def("violation_search",
           [](const Model& s, double t, double p, const std::string& direction, int restarts, std::uint64_t seed) {
             SearchOptions opts;
             opts.restarts = restarts;
             opts.seed = seed;
             const ViolationWitness w =
                 violation_search(*s.fock, *s.density, t, p, direction_from_string(direction), opts);
             py::dict d;
             d["ratio"] = w.ratio;
             d["restart"] = w.restart;
             d["element"] = s.fock->assemble(w.element);
             return d;
           },
           py::arg("t"), py::arg("p"), py::arg("direction") = "forward", py::arg("restarts") = 64,
           py::arg("seed") = 0);

  m.def("schatten_norm", &schatten_norm, py::arg("a"), py::arg("p"));
  m.def("choi_matrix", &choi_matrix, py::arg("t"), py::arg("mu"));
  m.def("choi_min_eigenvalue", &choi_min_eigenvalue, py::arg("t"), py::arg("mu"));
  m.def("is_cp", &is_cp, py::arg("t"), py::arg("mu"), py::arg("tolerance") = 1e-12);
  m.def("bcl_check", &bcl_check, py::arg("a"), py::arg("b"), py::arg("p"));
  m.def("asym_convexity_check", &asym_convexity_check, py::arg("a"), py::arg("b"), py::arg("p"), py::arg("mu"));
  m.def("dual_convexity_check", &dual_convexity_check, py::arg("x"), py::arg("y"), py::arg("q"), py::arg("mu"));
  m.def("C_of_mu", &C_of_mu, py::arg("p"), py::arg("mu"));
  m.def("sufficient_time", py::overload_cast<double, double>(&sufficient_time), py::arg("p"), py::arg("mu"),
        "e^-2t threshold for a single index.");
  m.def("time_for_threshold", &time_for_threshold, py::arg("threshold"));
  m.def(
      "necessary_time",
      [](int n_half, double mu) {
        const NecessaryTime nt = necessary_time_exact(n_half, mu);
        return py::make_tuple(nt.exact, nt.displayed);
      },
      py::arg("n_half"), py::arg("mu"), "(exact, displayed) e^-2t thresholds for p' = 2 n_half.");

  m.def(
      "fock_moment",
      [](const std::string& word, double q, const std::vector<double>& mu, int max_level) {
        return moment_oracle(parse_polynomial(word), QParams{q, mu, max_level});
      },
      py::arg("word"), py::arg("q"), py::arg("mu") = std::vector<double>{1.0}, py::arg("max_level") = 8);
  m.def(
      "pair_partition_moment",
      [](const std::string& word, double q, const std::vector<double>& mu) {
        return pair_partition_moment(parse_polynomial(word), QParams{q, mu, 8});
      },
      py::arg("word"), py::arg("q"), py::arg("mu") = std::vector<double>{1.0});
  m.def("gram_entry", &gram_entry, py::arg("u"), py::arg("v"), py::arg("q"));
  m.def(
      "clt_estimate",
      [](const std::string& word, double q, const std::vector<double>& mu, int m_count, int samples,
         std::uint64_t seed) {
        const CltEstimate e = clt_estimate(parse_polynomial(word), q, mu, m_count, samples, seed);
        return py::make_tuple(e.mean, e.standard_error);
      },
      py::arg("word"), py::arg("q"), py::arg("mu") = std::vector<double>{1.0}, py::arg("m") = 10,
      py::arg("samples") = 50, py::arg("seed") = 0);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "qhyper");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a CLI command in-process; returns (exit_code, stdout, stderr).");
}
