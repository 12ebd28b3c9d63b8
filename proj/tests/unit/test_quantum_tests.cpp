#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "entbench/group_actions.hpp"
#include "entbench/quantum_tests.hpp"
#include "entbench/qubit_pair.hpp"
#include "oracles.hpp"

using namespace entbench;
using doctest::Approx;

namespace {

CMatrix phi0_proj(int d) {
  CVector phi = max_entangled_ket(d).amplitudes();
  return phi * phi.adjoint();
}

// Random rank-one POVM with m outcomes: w_i = S^{-1/2} v_i.
RankOnePOVM random_povm(int d, int m, Rng& rng) {
  CMatrix v = ginibre(d, m, rng);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(v * v.adjoint());
  CMatrix w = es.operatorInverseSqrt() * v;
  std::vector<RankOnePOVM::Element> el;
  for (int i = 0; i < m; ++i) {
    const double n = w.col(i).norm();
    el.push_back({n * n, Ket(CVector(w.col(i) / n), {{"A", d}})});
  }
  return RankOnePOVM(el);
}

CMatrix oracle_kron(const CMatrix& a, const CMatrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

bool valid_test(const CMatrix& m, double tol = 1e-10) {
  return min_eigenvalue(m) >= -tol && max_eigenvalue(m) <= 1 + tol;
}

}  // namespace

TEST_CASE("test kinds round-trip") {
  for (TestKind k : {TestKind::global_n, TestKind::t1_inv, TestKind::t2_inv, TestKind::bell, TestKind::pooled_n,
                     TestKind::cov_1to2, TestKind::t3_inv})
    CHECK(test_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(test_kind_from_string("nope"), Error);
}

TEST_CASE("test_from_povm normalization") {
  Rng rng = stream_rng(1, 0);
  for (int d : {2, 3}) {
    std::vector<RankOnePOVM::Element> comp;
    for (int i = 0; i < d; ++i) comp.push_back({1.0, Ket(CVector::Unit(d, i), {{"A", d}})});
    TestOperator t = test_from_povm(RankOnePOVM(comp));
    CMatrix expect = CMatrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i) expect(i * d + i, i * d + i) = 1;
    CHECK(max_abs_diff(t.matrix(), expect) < 1e-14);
    CHECK(t.factors()[1].label == "B");
    for (int s = 0; s < 50; ++s) {
      TestOperator r = test_from_povm(random_povm(d, d + 1 + s % 4, rng));
      CVector phi = max_entangled_ket(d).amplitudes();
      CHECK(std::abs(phi.dot(r.matrix() * phi) - cplx(1)) < 1e-10);
      CHECK(std::abs(r.op().trace() - cplx(d)) < 1e-10);
      CHECK(valid_test(r.matrix()));
    }
  }
}

TEST_CASE("level_adjust_1") {
  TestOperator t = t1_inv(2);
  CHECK(max_abs_diff(level_adjust_1(t, 0, 0.1).matrix(), 0.9 * t.matrix()) < 1e-15);
  const double a = 0.2;
  CMatrix lo = level_adjust_1(t, a, a).matrix();
  CMatrix hi = level_adjust_1(t, a * (1 + 1e-15), a).matrix();
  CHECK(max_abs_diff(lo, hi) < 1e-14);
  // acceptance 1 - alpha on a state accepted with probability 1 - eps
  for (double e : {0.05, 0.3}) {
    const double p = e * 3 / 2;  // Tr(t1_inv sigma) = 1 - 2p/3
    DensityMatrix s = isotropic_state(2, p);
    CHECK(level_adjust_1(t, e, 0.1).accept(s) == Approx(0.9).epsilon(1e-12));
  }
}

TEST_CASE("binomial operator test") {
  TestOperator p(Operator(phi0_proj(2), pair_factors(2)));
  DensityMatrix s = isotropic_state(2, 0.3);
  TestOperator t3 = binomial_operator_test(p, 0.1, 0.05, 3);
  CHECK(t3.accept(tensor(tensor(s, s), s)) == Approx(beta_binomial(3, 0.1, 0.05, 0.3)).epsilon(1e-10));
  CHECK(binomial_operator_trace(p, 0.1, 0.05, 3, s) == Approx(beta_binomial(3, 0.1, 0.05, 0.3)).epsilon(1e-12));
  Operator q = Operator::identity(pair_factors(2)) - p.op();
  CMatrix sum = CMatrix::Zero(64, 64);
  for (int k = 0; k <= 3; ++k) {
    CMatrix a = binomial_sector_sum(p.op(), q, 3, k).matrix();
    CHECK(max_abs_diff(a * a, a) < 1e-12);
    sum += a;
  }
  CHECK(max_abs_diff(sum, CMatrix::Identity(64, 64)) < 1e-12);
  // n = 1 is the threshold form on {T, I - T}
  ClassicalRandomizedTest c = binomial_ump_test(1, 0.1, 0.05);
  CMatrix one = binomial_operator_test(p, 0.1, 0.05, 1).matrix();
  CMatrix expect = (c.l > 0 ? 1.0 : c.gamma) * p.matrix() + (c.l == 1 ? c.gamma : 0.0) * q.matrix();
  CHECK(max_abs_diff(one, expect) < 1e-14);
  CHECK_THROWS_AS(binomial_sector_sum(p.op(), q, 6, 2), Error);
}

TEST_CASE("t1_inv and t2_inv") {
  Rng rng = stream_rng(4, 0);
  for (int d : {2, 3, 4}) {
    TestOperator t = t1_inv(d);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(t.matrix());
    CHECK(es.eigenvalues().maxCoeff() == Approx(1.0));
    CHECK(es.eigenvalues().minCoeff() == Approx(1.0 / (d + 1)));
    CHECK(std::abs(t.op().trace() - cplx(d)) < 1e-12);
    for (double p : {0.0, 0.25, 0.9}) CHECK(t.accept(isotropic_state(d, p)) == Approx(1 - d * p / (d + 1.0)));
  }
  CHECK(t2_inv(2).accept(tensor(isotropic_state(2, 0.4), isotropic_state(2, 0.4))) ==
        Approx(0.36 + 0.16 / 3).epsilon(1e-12));
  for (int d : {2, 3})
    for (int s = 0; s < 20; ++s) {
      DensityMatrix sg = random_density(pair_factors(d), rng);
      const double p = fidelity_defect(sg);
      CHECK(std::abs(t2_inv(d).accept(tensor(sg, sg)) - beta_t2_formula(d, p)) < 1e-10);
    }
}

TEST_CASE("Bell test block form and sandwich") {
  Rng rng = stream_rng(5, 0);
  for (int d : {2, 3}) {
    TestOperator t = bell_test(d);
    CHECK(valid_test(t.matrix()));
    CVector pp = tensor(max_entangled_ket(d), max_entangled_ket(d)).amplitudes();
    CHECK(std::abs(pp.dot(t.matrix() * pp) - cplx(1)) < 1e-12);
    const int D = d * d;
    CMatrix P = phi0_proj(d), Q = CMatrix::Identity(D, D) - P;
    CMatrix pq = oracle_kron(P, Q);
    CMatrix qp = oracle_kron(Q, P);
    CHECK(max_abs(t.matrix() * pq) < 1e-10);
    CHECK(max_abs(t.matrix() * qp) < 1e-10);
    CMatrix rest = CMatrix::Identity(D * D, D * D) - pp * pp.adjoint();
    CHECK(max_abs(pp * pp.adjoint() * t.matrix() * rest) < 1e-10);
    for (int s = 0; s < 100; ++s) {
      DensityMatrix sg = random_density(pair_factors(d), rng);
      const double p = fidelity_defect(sg);
      const double v = t.accept(tensor(sg, sg));
      CHECK(v >= (1 - p) * (1 - p) - 1e-12);
      CHECK(v <= (1 - p) * (1 - p) + p * p + 1e-12);
    }
    // Bell basis vectors used as POVM seeds are maximally entangled
    const RankOnePOVM povm = bell_povm(d);
    for (const auto& e : povm.elements()) CHECK(is_max_entangled(e.vec).entangled);
  }
}

TEST_CASE("pooled t1") {
  CHECK(max_abs_diff(pooled_t1(2, 1).matrix(), t1_inv(2).matrix()) < 1e-14);
  CHECK(pooled_t1_formula(2, 2, 0.25) == Approx(0.65).epsilon(1e-14));
  Rng rng = stream_rng(6, 0);
  for (auto [d, n] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}}) {
    TestOperator t = pooled_t1(d, n);
    CHECK(valid_test(t.matrix()));
    for (int s = 0; s < 5; ++s) {
      DensityMatrix sg = random_density(pair_factors(d), rng);
      DensityMatrix sn = sg;
      for (int i = 1; i < n; ++i) sn = tensor(sn, sg);
      CHECK(std::abs(t.accept(sn) - pooled_t1_formula(d, n, fidelity_defect(sg))) < 1e-10);
    }
  }
  CHECK_THROWS_AS(pooled_t1(2, 6), Error);
  // log slope approaches -log(1 - p) when 1 - p >= 1/d
  const double p = 0.3;
  CHECK(std::abs(-std::log(pooled_t1_formula(2, 12, p)) / 12 + std::log(1 - p)) <= 0.05 * -std::log(1 - p));
}

TEST_CASE("simplex completion") {
  Rng rng = stream_rng(7, 0);
  for (int d : {2, 3, 5}) {
    Ket phi = d == 2 ? Ket(CVector::Unit(2, 0), {{"A", 2}}) : random_ket(d, rng);
    auto u = simplex_completion(phi);
    REQUIRE(u.size() == static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      CHECK(std::abs(phi.amplitudes().dot(u[i].amplitudes()) - cplx(1 / std::sqrt(double(d)))) < 1e-12);
      for (int j = 0; j < d; ++j)
        CHECK(std::abs(u[i].amplitudes().dot(u[j].amplitudes()) - cplx(i == j ? 1.0 : 0.0)) < 1e-12);
    }
    auto o = simplex_offsets(phi);
    for (int i = 0; i < d; ++i) {
      CHECK(std::abs(phi.amplitudes().dot(o[i].amplitudes())) < 1e-12);
      for (int j = 0; j < d; ++j)
        CHECK(std::abs(o[i].amplitudes().dot(o[j].amplitudes()) - cplx(i == j ? (d - 1.0) / d : -1.0 / d)) < 1e-12);
    }
  }
}

TEST_CASE("cov_1to2 Monte-Carlo trace") {
  auto [u1, u2] = cov_1to2_vectors(3);
  CHECK(std::norm(u1.amplitudes().dot(u2.amplitudes())) == Approx(1.0 / 3));
  McEstimate e = cov_1to2_trace(isotropic_state(2, 0.0), 2000, 3);
  CHECK(e.mean == Approx(1.0).epsilon(1e-10));
  for (double p : {0.2, 0.45}) {
    DensityMatrix s = isotropic_state(2, p);
    McEstimate m = cov_1to2_trace(s, 40000, 11);
    CHECK(std::abs(m.mean - beta_1to2(s)) <= 5 * m.std_err + 1e-12);
  }
  // every sample keeps phi0 (x) phi0 accepted with certainty
  TwirlEstimate op = cov_1to2_operator(2, 2000, 5);
  CVector pp = tensor(max_entangled_ket(2), max_entangled_ket(2)).amplitudes();
  CHECK(std::abs(pp.dot(op.mean.matrix() * pp) - cplx(1)) < 1e-10);
  DensityMatrix s = isotropic_state(2, 0.3);
  TwirlEstimate big = cov_1to2_operator(2, 40000, 6);
  CHECK(std::abs(trace_product(big.mean.matrix(), tensor(s, s).matrix()) - beta_1to2(s)) < 0.01);
  // U(1)-invariance of the averaged operator
  CHECK(big.consistent_with(u1_twirl_exact(big.mean, 2, 2).matrix(), 5.0));
  CHECK_THROWS_AS(build_test(QuantumTestSpec{TestKind::cov_1to2, 2, 1, {}}), Error);
}

TEST_CASE("separable trace bound") {
  for (int d : {2, 3, 5}) {
    SeparableDecomposition dec = t1_inv_decomposition(d);
    CHECK(max_abs_diff(assemble(dec).matrix(), t1_inv(d).matrix()) < 1e-12);
    CHECK(std::abs(separable_trace_gap(dec)) < 1e-10);
    CHECK(separable_trace_bound(dec));
  }
  CHECK_THROWS_AS(mub_povm(4), Error);
  Rng rng = stream_rng(8, 0);
  for (int d : {2, 3})
    for (int s = 0; s < 500; ++s) {
      SeparableDecomposition r = random_separable_test(d, 1 + s % 7, rng);
      CHECK(valid_test(assemble(r).matrix()));
      CHECK(separable_trace_bound(r));
    }
  // the entangled projector violates it
  for (int d : {2, 3}) CHECK(phi0_proj(d).trace().real() < d * 1.0);
}

TEST_CASE("maximal entanglement check vs SVD") {
  Rng rng = stream_rng(9, 0);
  for (int d : {2, 3}) {
    CHECK(is_max_entangled(Ket(max_entangled_ket(d).amplitudes(), {{"A1", d}, {"A2", d}})).entangled);
    CHECK_FALSE(is_max_entangled(Ket(CVector::Unit(d * d, 0), {{"A1", d}, {"A2", d}})).entangled);
    PauliPair pz = generalized_pauli(d);
    std::uniform_int_distribution<int> pick(0, d - 1);
    for (int s = 0; s < 100; ++s) {
      CMatrix x = CMatrix::Identity(d, d);
      for (int i = pick(rng); i > 0; --i) x = pz.x.matrix() * x;
      for (int i = pick(rng); i > 0; --i) x = x * pz.z.matrix();
      CMatrix g = haar_unitary(d, rng);
      CVector v = oracle_kron(g * x, CMatrix::Identity(d, d)) * max_entangled_ket(d).amplitudes();
      CHECK(is_max_entangled(Ket(v, {{"A1", d}, {"A2", d}})).entangled);
      CHECK(oracle::max_entangled_by_svd(v, d));
      CVector r = random_ket(d * d, rng).amplitudes();
      CHECK(is_max_entangled(Ket(r, {{"A1", d}, {"A2", d}})).entangled == oracle::max_entangled_by_svd(r, d, 1e-9));
    }
  }
}

TEST_CASE("Eq. 21 vs operator trace") {
  Rng rng = stream_rng(10, 0);
  for (int d : {2, 3})
    for (double e : {0.0, 0.05, 0.3})
      for (double a : {0.05, 0.2})
        for (double p : {0.1, 0.5, 0.9}) {
          DensityMatrix s = oracle::state_with_defect(d, p, rng);
          TestOperator t = level_adjust_1(t1_inv(d), d * e / (d + 1.0), a);
          CHECK(std::abs(t.accept(s) - beta_t1_formula(d, e, a, p)) < 1e-10);
        }
  CHECK(beta_t1_formula(2, 0, 0.05, 0.3) == Approx(0.95 * 0.8));
  const double e = 0.1 * 3 / 2;
  CHECK(beta_t1_formula(2, e, 0.1, 0.5) == Approx(beta_t1_formula(2, e * (1 + 1e-13), 0.1, 0.5)).epsilon(1e-10));
}

TEST_CASE("Eq. 27 vs operator trace") {
  Rng rng = stream_rng(11, 0);
  const int d = 2;
  for (int n : {1, 2})
    for (double p : {0.1, 0.3}) {
      DensityMatrix s = oracle::state_with_defect(d, p, rng);
      DensityMatrix pair = tensor(s, s);
      DensityMatrix all = pair;
      for (int i = 1; i < n; ++i) all = tensor(all, pair);
      const double e = 0.05;
      TestOperator t = binomial_operator_test(t2_inv(d), mapped_boundary(d, e), 0.1, n);
      CHECK(std::abs(t.accept(all) - beta_2n_bound(d, n, e, 0.1, p).value) < 1e-9);
    }
  // n = 3 through the factorized trace
  DensityMatrix s = oracle::state_with_defect(d, 0.3, rng);
  CHECK(std::abs(binomial_operator_trace(t2_inv(d), mapped_boundary(d, 0.0), 0.1, 3, tensor(s, s)) -
                 beta_2n_bound(d, 3, 0.0, 0.1, 0.3).value) < 1e-12);
  double prev = -1;
  for (int i = 0; i <= 100; ++i) {
    double m = mapped_boundary(d, 0.75 * i / 100);
    CHECK(m >= prev);
    prev = m;
  }
  CHECK_FALSE(beta_2n_bound(d, 2, 0.8, 0.1, 0.9).in_range);
}

TEST_CASE("covariance of the constructed tests") {
  CHECK(check_invariance(t1_inv(2), GroupAction{GroupKind::ud2_minus_1, 2, 1, false}, 50, 1e-10, 1).invariant);
  CHECK(check_invariance(t1_inv(3), GroupAction{GroupKind::sud_x_u1, 3, 1, false}, 50, 1e-10, 1).invariant);
  CHECK(check_invariance(t2_inv(2), GroupAction{GroupKind::sud, 2, 2, true}, 50, 1e-10, 2).invariant);
  CHECK(check_invariance(t2_inv(3), GroupAction{GroupKind::ud2_minus_1, 3, 2, true}, 10, 1e-10, 2).invariant);
  CHECK(check_invariance(pooled_t1(2, 2), GroupAction{GroupKind::sud, 2, 2, true}, 50, 1e-10, 3).invariant);
  CHECK(check_invariance(bell_test(2), GroupAction{GroupKind::u1, 2, 2, true}, 50, 1e-10, 4).invariant);
}

TEST_CASE("sampled separable invariant tests never beat Eq. 21") {
  Rng rng = stream_rng(12, 0);
  std::uniform_real_distribution<double> u(0, 1);
  const int d = 2;
  int checked = 0;
  for (int s = 0; s < 10000; ++s) {
    const double t0 = u(rng);
    const double t1 = t0 / (d + 1) + (1 - t0 / (d + 1)) * u(rng);
    for (double e : {0.0, 0.1, 0.3})
      for (double a : {0.05, 0.2}) {
        // acceptance t0 (1 - p) + t1 p is monotone in p; level fixed at p = eps and p = 0
        if (t0 * (1 - e) + t1 * e < 1 - a || t0 < 1 - a) continue;
        for (double p : {0.35, 0.6, 0.9}) {
          ++checked;
          CHECK(t0 * (1 - p) + t1 * p >= beta_t1_formula(d, e, a, p) - 1e-12);
        }
      }
  }
  CHECK(checked > 1000);
}

TEST_CASE("build_test dispatch") {
  QuantumTestSpec spec{TestKind::t1_inv, 2, 1, {Direction::le, 0.0, 0.1}};
  CHECK(max_abs_diff(build_test(spec).matrix(), 0.9 * t1_inv(2).matrix()) < 1e-14);
  spec.kind = TestKind::t3_inv;
  spec.d = 4;
  CHECK_THROWS_AS(build_test(spec), Error);
  spec = {TestKind::bell, 2, 2, {Direction::le, 0.05, 0.1}};
  CHECK(valid_test(build_test(spec).matrix()));
  spec = {TestKind::global_n, 2, 2, {Direction::ge, 0.05, 0.1}};
  CHECK_THROWS_AS(build_test(spec), Error);
}
