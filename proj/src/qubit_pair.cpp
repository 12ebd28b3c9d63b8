#include "entbench/qubit_pair.hpp"

#include <cmath>

namespace entbench {

namespace {

const double kS2 = 1.0 / std::sqrt(2.0);
const double kS3 = 1.0 / std::sqrt(3.0);

void require_qubit_pair(const DensityMatrix& sigma) {
  require(sigma.dim() == 4, ErrorKind::dimension_mismatch, "qubit-pair analysis needs a 4x4 state");
}

// Bell basis as columns.
CMatrix bell_columns() {
  const cplx I(0, 1);
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = kS2;
  m(3, 0) = kS2;
  m(1, 1) = kS2;
  m(2, 1) = kS2;
  m(1, 2) = -I * kS2;
  m(2, 2) = I * kS2;
  m(0, 3) = kS2;
  m(3, 3) = -kS2;
  return m;
}

}  // namespace

std::array<Ket, 4> qubit_bell_basis() {
  CMatrix m = bell_columns();
  return {Ket(CVector(m.col(0)), pair_factors(2)), Ket(CVector(m.col(1)), pair_factors(2)),
          Ket(CVector(m.col(2)), pair_factors(2)), Ket(CVector(m.col(3)), pair_factors(2))};
}

BlockDecomposition bell_block(const DensityMatrix& sigma) {
  require_qubit_pair(sigma);
  CMatrix w = bell_columns();
  CMatrix x = w.adjoint() * sigma.matrix() * w;
  BlockDecomposition r;
  r.a = x(0, 0).real();
  r.b = x.block(1, 0, 3, 1);
  r.c = x.block(1, 1, 3, 3);
  r.v = r.c.real();
  return r;
}

const char* to_string(Irrep k) {
  switch (k) {
    case Irrep::sigma0_5: return "Sigma0_5";
    case Irrep::sigma1_3: return "Sigma1_3";
    case Irrep::sigma2_1: return "Sigma2_1";
    case Irrep::sigma0_1: return "Sigma0_1";
    case Irrep::lambda0_3: return "Lambda0_3";
    case Irrep::lambda1_3: return "Lambda1_3";
  }
  return "?";
}

IrrepProjectors irrep_projectors() {
  CMatrix w = bell_columns();
  // |i,j> in the computational pair-major basis
  auto ij = [&](int i, int j) -> CVector {
    CVector v(16);
    for (int r = 0; r < 4; ++r) v.segment(4 * r, 4) = w(r, i) * w.col(j);
    return v;
  };
  const cplx om = std::polar(1.0, 2 * kPi / 3);
  std::array<std::vector<CVector>, 6> basis;
  auto& s05 = basis[0];
  s05 = {kS2 * (ij(1, 2) + ij(2, 1)), kS2 * (ij(2, 3) + ij(3, 2)), kS2 * (ij(3, 1) + ij(1, 3)),
         kS3 * (ij(1, 1) + om * ij(2, 2) + om * om * ij(3, 3)), kS3 * (ij(1, 1) + om * om * ij(2, 2) + om * ij(3, 3))};
  for (int i = 1; i <= 3; ++i) basis[1].push_back(kS2 * (ij(0, i) + ij(i, 0)));
  basis[2] = {ij(0, 0)};
  basis[3] = {kS3 * (ij(1, 1) + ij(2, 2) + ij(3, 3))};
  basis[4] = {kS2 * (ij(1, 2) - ij(2, 1)), kS2 * (ij(2, 3) - ij(3, 2)), kS2 * (ij(3, 1) - ij(1, 3))};
  for (int i = 1; i <= 3; ++i) basis[5].push_back(kS2 * (ij(0, i) - ij(i, 0)));
  IrrepProjectors p;
  for (int k = 0; k < 6; ++k) {
    p.proj[k] = CMatrix::Zero(16, 16);
    for (const auto& v : basis[k]) p.proj[k] += v * v.adjoint();
  }
  return p;
}

BlockValues block_traces(const BlockDecomposition& x) {
  const Eigen::Matrix3cd& c = x.c;
  const double trc = c.trace().real();
  const double trc2 = (c * c).trace().real();
  const double trccb = (c * c.conjugate()).trace().real();
  const double b2 = x.b.squaredNorm();
  return {0.5 * (trc2 + trc * trc) - trccb / 3.0,
          x.a * trc + b2,
          x.a * x.a,
          trccb / 3.0,
          0.5 * (trc * trc - trc2),
          x.a * trc - b2};
}

BlockValues block_traces(const DensityMatrix& sigma) { return block_traces(bell_block(sigma)); }

BlockValues projector_traces(const CMatrix& rho, const IrrepProjectors& p) {
  require(rho.rows() == 16 && rho.cols() == 16, ErrorKind::dimension_mismatch, "two-pair operator must be 16x16");
  BlockValues out{};
  for (int k = 0; k < 6; ++k) out[k] = trace_product(rho, p.proj[k]);
  return out;
}

Ket u_op() {
  CVector v = CVector::Zero(4);
  const double h = std::sqrt(3.0) / 2;
  v(1) = 0.5;
  v(2) = -0.5;
  v(0) = h;
  v(3) = h;
  return Ket(v / v.norm(), {{"A1", 2}, {"A2", 2}});
}

BlockValues seed_weights_pair_major(const Ket& v) {
  require(v.dim() == 16, ErrorKind::dimension_mismatch, "seed must live on the 16-dim two-pair space");
  CMatrix rho = v.amplitudes() * v.amplitudes().adjoint();
  return projector_traces(rho, irrep_projectors());
}

BlockValues seed_weights(const Ket& u) {
  require(u.dim() == 4, ErrorKind::dimension_mismatch, "u must live on A1(x)A2 with d = 2");
  Ket ua(u.amplitudes(), {{"A1", 2}, {"A2", 2}});
  Ket ub(u.amplitudes().conjugate(), {{"B1", 2}, {"B2", 2}});
  return seed_weights_pair_major(permute_systems(tensor(ua, ub), group_to_pair_major(2)));
}

Operator effective_operator(const BlockValues& w) {
  IrrepProjectors p = irrep_projectors();
  CMatrix t = CMatrix::Zero(16, 16);
  for (int k = 0; k < 6; ++k) t += (4.0 * w[k] / kIrrepDims[k]) * p.proj[k];
  return Operator(t, pair_major_factors(2, 2));
}

double effective_trace(const BlockValues& w, const DensityMatrix& sigma) {
  BlockValues b = block_traces(sigma);
  double s = 0.0;
  for (int k = 0; k < 6; ++k) s += 4.0 * w[k] / kIrrepDims[k] * b[k];
  return s;
}

double variance_term(const BlockDecomposition& x) {
  const double tv = x.v.trace();
  return (x.v * x.v).trace() / 3.0 - (tv / 3.0) * (tv / 3.0);
}

FlaggedValue beta_opt_2sample(const DensityMatrix& sigma) {
  BlockDecomposition x = bell_block(sigma);
  const double p = fidelity_defect(sigma);
  double v = (1 - p) * (1 - p) + p * p / 3.0 - 0.6 * variance_term(x);
  return {v, p <= 0.5};
}

double beta_1to2(const DensityMatrix& sigma) {
  BlockDecomposition x = bell_block(sigma);
  const double p = fidelity_defect(sigma);
  const double s = 1 - 2 * p / 3;
  return s * s - variance_term(x) / 5.0;
}

double beta_1to2_expansion(const DensityMatrix& sigma) {
  BlockDecomposition x = bell_block(sigma);
  const double trc = x.c.trace().real();
  return (1 - trc) * (1 - trc) + 2 * trc / 3 - 8 * trc * trc / 15 - (x.v * x.v).trace() / 15;
}

InequalitiesO check_inequalities_O(const DensityMatrix& sigma) {
  BlockValues t = block_traces(sigma);
  InequalitiesO r;
  r.o3 = t[5] - t[4];
  r.o4 = 5 * t[1] - 3 * t[0];
  r.o5 = 10 * t[3] + t[0] - 5 * t[4];
  return r;
}

}  // namespace entbench
