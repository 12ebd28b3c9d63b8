#pragma once

#include <array>

#include "entbench/qstate.hpp"

// Exact two-copy analysis for qubit pairs (d = 2).
//
// Bell basis used throughout:
//   phi0 = (|00> + |11>)/sqrt2     phi1 = (|01> + |10>)/sqrt2
//   phi2 = (-i|01> + i|10>)/sqrt2  phi3 = (|00> - |11>)/sqrt2
// The two-copy basis |i,j> is phi^i on A1B1 times phi^j on A2B2 (pair-major).

namespace entbench {

std::array<Ket, 4> qubit_bell_basis();

struct BlockDecomposition {
  double a = 0.0;        // <phi0|sigma|phi0>
  Eigen::Vector3cd b;    // <phi^i|sigma|phi0>, i = 1..3
  Eigen::Matrix3cd c;    // <phi^i|sigma|phi^j>, i, j = 1..3
  Eigen::Matrix3d v;     // Re c
};

BlockDecomposition bell_block(const DensityMatrix& sigma);

enum class Irrep { sigma0_5 = 0, sigma1_3, sigma2_1, sigma0_1, lambda0_3, lambda1_3 };
inline constexpr std::array<int, 6> kIrrepDims{5, 3, 1, 1, 3, 3};
const char* to_string(Irrep k);

struct IrrepProjectors {
  std::array<CMatrix, 6> proj;
  const CMatrix& operator[](Irrep k) const { return proj[static_cast<int>(k)]; }
};

IrrepProjectors irrep_projectors();

using BlockValues = std::array<double, 6>;

// Tr(sigma (x) sigma Pi_k) from the block decomposition.
BlockValues block_traces(const DensityMatrix& sigma);
BlockValues block_traces(const BlockDecomposition& x);
// Tr(rho Pi_k) for any operator rho on the 16-dim two-pair space.
BlockValues projector_traces(const CMatrix& rho, const IrrepProjectors& p);

// u_op on A1 A2, normalized.
Ket u_op();
// <v|Pi_k|v> with v = u (x) conj(u) permuted to pair-major.
BlockValues seed_weights(const Ket& u_a1a2);
BlockValues seed_weights_pair_major(const Ket& v);
// 4 sum_k (w_k / dim_k) Pi_k
Operator effective_operator(const BlockValues& weights);
double effective_trace(const BlockValues& weights, const DensityMatrix& sigma);

inline constexpr BlockValues kUopWeights{3.0 / 8, 0.0, 1.0 / 4, 0.0, 3.0 / 8, 0.0};
inline constexpr BlockValues kCov1to2Weights{1.0 / 8, 1.0 / 4, 1.0 / 4, 0.0, 1.0 / 8, 1.0 / 4};

// Tr V^2 / 3 - (Tr V / 3)^2
double variance_term(const BlockDecomposition& x);
// Flag: fidelity defect p <= 1/2.
FlaggedValue beta_opt_2sample(const DensityMatrix& sigma);
double beta_1to2(const DensityMatrix& sigma);
double beta_1to2_expansion(const DensityMatrix& sigma);

struct InequalitiesO {
  double o3 = 0.0;  // Lambda13 - Lambda03
  double o4 = 0.0;  // 5 Sigma13 - 3 Sigma05
  double o5 = 0.0;  // 10 Sigma01 + Sigma05 - 5 Lambda03
  bool holds(double tol = 1e-12) const { return o3 >= -tol && o4 >= -tol && o5 >= -tol; }
};
InequalitiesO check_inequalities_O(const DensityMatrix& sigma);

}  // namespace entbench
