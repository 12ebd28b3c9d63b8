#include "entbench/multisource.hpp"

#include <cmath>
#include <cstdio>

#include <unsupported/Eigen/KroneckerProduct>

#include "entbench/classical_tests.hpp"

namespace entbench {

namespace {

void require_defect(double p, const char* what) {
  require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorKind::invalid_argument, what);
}

void require_triple_dim(int d) {
  require(d >= 2 && d <= 3, ErrorKind::invalid_dimension, "three-pair operators need d in {2, 3}");
}

}  // namespace

void MultiSourceDefects::validate() const {
  require(d >= 2, ErrorKind::invalid_dimension, "d must be >= 2");
  require(p.size() == 2 || p.size() == 3, ErrorKind::invalid_argument, "need 2 or 3 defects");
  for (double x : p) require_defect(x, "defect must lie in [0, 1]");
  require(t.empty() || t.size() == p.size(), ErrorKind::invalid_argument, "rates must match defects");
  for (double x : t) require(std::isfinite(x) && x >= 0.0, ErrorKind::invalid_argument, "rate must be >= 0");
}

FlaggedValue beta_two_source(int d, double p1, double p2) {
  require(d >= 2, ErrorKind::invalid_dimension, "d must be >= 2");
  require_defect(p1, "p1 must lie in [0, 1]");
  require_defect(p2, "p2 must lie in [0, 1]");
  const double cross = p1 * p2 / (d * d - 1.0);
  return {(1 - p1) * (1 - p2) + cross, cross <= (1 - p1) * p2 && cross <= p1 * (1 - p2)};
}

double beta_two_source_local(int d, double p1, double p2) {
  require(d >= 2, ErrorKind::invalid_dimension, "d must be >= 2");
  require_defect(p1, "p1 must lie in [0, 1]");
  require_defect(p2, "p2 must lie in [0, 1]");
  return (1 - d * p1 / (d + 1.0)) * (1 - d * p2 / (d + 1.0));
}

ProductCoefficients t3_coefficients(int d) {
  require(d >= 2, ErrorKind::invalid_dimension, "d must be >= 2");
  const double dp = d + 1.0, dm = d - 1.0;
  const double one_p = 1.0 / (dp * dp * dm);
  const double none_p = (d + 2.0) / (dp * dp * dp * dm);
  // bit set = complement on that pair
  return {1.0, 0.0, 0.0, one_p, 0.0, one_p, one_p, none_p};
}

ProductCoefficients app_t_coeffs(double b1, double b2, double b3, double gamma, int d) {
  require(d >= 2, ErrorKind::invalid_dimension, "d must be >= 2");
  const double d3 = std::pow(d, 3), id3 = 1.0 / d3, q = d * d - 1.0;
  ProductCoefficients a{};
  a[0] = 1.0;
  a[1] = d3 / q * (b3 / d - id3);
  a[2] = d3 / q * (b2 / d - id3);
  a[4] = d3 / q * (b1 / d - id3);
  a[3] = d3 / (q * q) * (b1 - (b2 + b3) / d + id3);
  a[5] = d3 / (q * q) * (b2 - (b1 + b3) / d + id3);
  a[6] = d3 / (q * q) * (b3 - (b1 + b2) / d + id3);
  a[7] = d3 / (q * q * q) * (gamma - (d - 1.0) / d * (b1 + b2 + b3) - id3);
  return a;
}

Operator product_combination(int d, const ProductCoefficients& c) {
  require_triple_dim(d);
  const int n = d * d;
  CVector phi = max_entangled_ket(d).amplitudes();
  std::array<CMatrix, 2> parts{phi * phi.adjoint(), CMatrix::Identity(n, n) - phi * phi.adjoint()};
  CMatrix out = CMatrix::Zero(n * n * n, n * n * n);
  for (int mask = 0; mask < 8; ++mask) {
    if (c[mask] == 0.0) continue;
    CMatrix ab = Eigen::kroneckerProduct(parts[(mask >> 2) & 1], parts[(mask >> 1) & 1]);
    out += c[mask] * CMatrix(Eigen::kroneckerProduct(ab, parts[mask & 1]));
  }
  return Operator(out, pair_major_factors(d, 3));
}

TestOperator t3_inv(int d) { return TestOperator(product_combination(d, t3_coefficients(d))); }

Ket ghz_seed(int d) {
  require_triple_dim(d);
  CVector g = CVector::Zero(d * d * d);
  for (int i = 0; i < d; ++i) g(i * d * d + i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  Ket a(g, {{"A1", d}, {"A2", d}, {"A3", d}});
  Ket b(g.conjugate(), {{"B1", d}, {"B2", d}, {"B3", d}});
  return permute_systems(tensor(a, b), group_to_pair_major(3));
}

FlaggedValue beta_three_source(int d, double p1, double p2, double p3) {
  require(d >= 2, ErrorKind::invalid_dimension, "d must be >= 2");
  require_defect(p1, "p1 must lie in [0, 1]");
  require_defect(p2, "p2 must lie in [0, 1]");
  require_defect(p3, "p3 must lie in [0, 1]");
  // Tr(P sigma_i) = 1 - p_i and Tr(P^c sigma_i) = p_i, so the trace factorizes per term.
  const ProductCoefficients c = t3_coefficients(d);
  const std::array<double, 3> p{p1, p2, p3};
  double v = 0.0;
  for (int mask = 0; mask < 8; ++mask) {
    double term = c[mask];
    for (int i = 0; i < 3; ++i) term *= ((mask >> (2 - i)) & 1) ? p[i] : 1 - p[i];
    v += term;
  }
  const double bound = (d - 1.0) / d;
  return {v, p1 <= bound && p2 <= bound && p3 <= bound};
}

double beta_three_source_printed(int d, double p1, double p2, double p3) {
  require(d >= 2, ErrorKind::invalid_dimension, "d must be >= 2");
  const double dp = d + 1.0, dm = d - 1.0;
  return (1 - p1) * (1 - p2) * (1 - p3) + (d + 2.0) * p1 * p2 * p3 / (dp * dp * dm) +
         (p1 * p2 * (1 - p3) + p1 * (1 - p2) * p3 + (1 - p1) * p2 * p3) / (dp * dp * dm);
}

std::string three_source_discrepancy_note(int d) {
  const double dp = d + 1.0, dm = d - 1.0;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "three-source beta: the p1 p2 p3 term uses (d+2)/((d+1)^3 (d-1)) = %.12g from the operator trace; "
                "the printed closed form divides by (d+1)^2 (d-1), giving %.12g (d = %d)",
                (d + 2.0) / (dp * dp * dp * dm), (d + 2.0) / (dp * dp * dm), d);
  return buf;
}

double poisson_two_source(double delta, double alpha, double t1p, double t2p) {
  require(std::isfinite(t1p) && t1p >= 0.0 && std::isfinite(t2p) && t2p >= 0.0, ErrorKind::invalid_argument,
          "rates must be >= 0");
  return beta_poisson(delta, alpha, t1p + t2p);
}

}  // namespace entbench
