#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "entbench/classical_tests.hpp"
#include "entbench/group_actions.hpp"
#include "entbench/multisource.hpp"
#include "entbench/protocol_sim.hpp"
#include "entbench/quantum_tests.hpp"
#include "entbench/qubit_pair.hpp"

namespace py = pybind11;
using namespace entbench;

namespace {

// A square matrix on A(x)B with equal local dimensions.
DensityMatrix pair_state(const CMatrix& m) {
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m.rows()))));
  require(d >= 2 && d * d == m.rows(), ErrorKind::dimension_mismatch, "state must be (d*d) x (d*d)");
  return DensityMatrix(m, pair_factors(d));
}

py::dict result_dict(const ExperimentResult& r) {
  py::dict out;
  out["rate"] = r.rate;
  out["ci"] = r.ci;
  out["exact"] = r.exact;
  out["trials"] = r.trials;
  out["accepted"] = r.accepted;
  out["within_3ci"] = r.within(3.0);
  if (r.pair_rate) {
    out["pair_rate"] = *r.pair_rate;
    out["pair_ci"] = *r.pair_ci;
    out["pair_exact"] = *r.pair_exact;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_entbench, m) {
  m.doc() = "Entanglement verification test bench";
  py::register_exception<Error>(m, "EntbenchError", PyExc_ValueError);

  // states
  m.def("max_entangled_ket", [](int d) { return max_entangled_ket(d).amplitudes(); }, py::arg("d"));
  m.def("isotropic_state", [](int d, double p) { return isotropic_state(d, p).matrix(); }, py::arg("d"),
        py::arg("p"));
  m.def("fidelity_defect", [](const CMatrix& s) { return fidelity_defect(pair_state(s)); }, py::arg("state"));
  m.def(
      "random_state",
      [](int d, std::uint64_t seed) {
        Rng rng = stream_rng(seed, 0);
        return random_density(pair_factors(d), rng).matrix();
      },
      py::arg("d"), py::arg("seed"));

  // classical tests
  m.def(
      "binomial_ump_test",
      [](int n, double eps, double alpha) {
        auto t = binomial_ump_test(n, eps, alpha);
        return py::make_tuple(t.l, t.gamma);
      },
      py::arg("n"), py::arg("eps"), py::arg("alpha"));
  m.def("beta_binomial", &beta_binomial, py::arg("n"), py::arg("eps"), py::arg("alpha"), py::arg("q"));
  m.def("beta_binomial_ge", &beta_binomial_ge, py::arg("n"), py::arg("eps"), py::arg("alpha"), py::arg("q"));
  m.def("beta_poisson", &beta_poisson, py::arg("delta"), py::arg("alpha"), py::arg("t_prime"));
  m.def("relative_entropy", &relative_entropy, py::arg("eps"), py::arg("p"));

  // test operators
  m.def("t1_inv", [](int d) { return t1_inv(d).matrix(); }, py::arg("d"));
  m.def("t2_inv", [](int d) { return t2_inv(d).matrix(); }, py::arg("d"));
  m.def("bell_test", [](int d) { return bell_test(d).matrix(); }, py::arg("d"));
  m.def("t3_inv", [](int d) { return t3_inv(d).matrix(); }, py::arg("d"));
  m.def("pooled_t1", [](int d, int n) { return pooled_t1(d, n).matrix(); }, py::arg("d"), py::arg("n"));

  // closed forms
  m.def("beta_t1", &beta_t1_formula, py::arg("d"), py::arg("eps"), py::arg("alpha"), py::arg("p"));
  m.def("beta_t2", &beta_t2_formula, py::arg("d"), py::arg("p"));
  m.def("mapped_boundary", &mapped_boundary, py::arg("d"), py::arg("eps"));
  m.def(
      "beta_2n_bound",
      [](int d, int n, double eps, double alpha, double p) {
        auto v = beta_2n_bound(d, n, eps, alpha, p);
        return py::make_tuple(v.value, v.in_range);
      },
      py::arg("d"), py::arg("n"), py::arg("eps"), py::arg("alpha"), py::arg("p"));
  m.def("pooled_t1_formula", &pooled_t1_formula, py::arg("d"), py::arg("n"), py::arg("p"));
  m.def("beta_1to2", [](const CMatrix& s) { return beta_1to2(pair_state(s)); }, py::arg("state"));
  m.def(
      "beta_opt_2sample",
      [](const CMatrix& s) {
        auto v = beta_opt_2sample(pair_state(s));
        return py::make_tuple(v.value, v.condition);
      },
      py::arg("state"));
  m.def(
      "beta_two_source",
      [](int d, double p1, double p2) {
        auto v = beta_two_source(d, p1, p2);
        return py::make_tuple(v.value, v.condition);
      },
      py::arg("d"), py::arg("p1"), py::arg("p2"));
  m.def("beta_two_source_local", &beta_two_source_local, py::arg("d"), py::arg("p1"), py::arg("p2"));
  m.def(
      "beta_three_source",
      [](int d, double p1, double p2, double p3) {
        auto v = beta_three_source(d, p1, p2, p3);
        return py::make_tuple(v.value, v.condition);
      },
      py::arg("d"), py::arg("p1"), py::arg("p2"), py::arg("p3"));
  m.def("t3_coefficients", &t3_coefficients, py::arg("d"));
  m.def("app_t_coeffs", &app_t_coeffs, py::arg("beta1"), py::arg("beta2"), py::arg("beta3"), py::arg("gamma"),
        py::arg("d"));

  // Monte-Carlo
  m.def(
      "twirl_t1",
      [](int d, std::size_t samples, std::uint64_t seed) {
        Ket v(basis_ket(d * d, 0).amplitudes(), pair_factors(d));
        auto e = mc_twirl(v, d, GroupAction{GroupKind::sud, d, 1, false}, samples, seed);
        return py::make_tuple(e.mean.matrix(), e.std_err);
      },
      py::arg("d"), py::arg("samples"), py::arg("seed"));
  m.def(
      "simulate",
      [](const std::string& protocol, int d, int n, double p, double epsilon, double alpha, std::size_t trials,
         std::uint64_t seed) {
        ExperimentConfig c;
        c.d = d;
        c.state = {"isotropic", p, 0};
        c.protocol = protocol_from_string(protocol);
        c.n = n;
        c.epsilon = epsilon;
        c.alpha = alpha;
        c.trials = trials;
        c.seed = seed;
        return result_dict(run(c));
      },
      py::arg("protocol"), py::arg("d") = 2, py::arg("n") = 10, py::arg("p") = 0.1, py::arg("epsilon") = 0.05,
      py::arg("alpha") = 0.05, py::arg("trials") = 100000, py::arg("seed") = 1);
  m.def(
      "sweep",
      [](double delta, double t_prime, double alpha, const std::vector<int>& n_list, const std::string& protocol,
         int d, std::size_t trials, std::uint64_t seed) {
        py::list rows;
        for (const SweepRow& r :
             asymptotic_sweep(delta, t_prime, alpha, n_list, protocol_from_string(protocol), d, trials, seed)) {
          py::dict row;
          row["n"] = r.n;
          row["exact"] = r.exact;
          row["empirical"] = r.empirical ? py::cast(*r.empirical) : py::none();
          row["ci"] = r.ci ? py::cast(*r.ci) : py::none();
          row["limit"] = r.limit;
          rows.append(row);
        }
        return rows;
      },
      py::arg("delta"), py::arg("t_prime"), py::arg("alpha"), py::arg("n_list"),
      py::arg("protocol") = "global_projective", py::arg("d") = 2, py::arg("trials") = 0, py::arg("seed") = 1);
}
