#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entbench/qstate.hpp"

namespace entbench {

// U1:        U_theta = e^{i theta}|phi0><phi0| + (I - |phi0><phi0|)
// SUd:       U(g) = g (x) conj(g), g in SU(d)
// SUdxU1:    U(g) U_theta
// Ud2minus1: V(g) = g on the orthocomplement of phi0, identity on phi0
enum class GroupKind { u1, sud, sud_x_u1, ud2_minus_1 };

const char* to_string(GroupKind kind);
GroupKind group_kind_from_string(const std::string& name);

struct GroupAction {
  GroupKind kind = GroupKind::sud;
  int d = 2;
  // Number of A(x)B pairs the action is applied to (pair-major order).
  int copies = 1;
  // false: the n-fold tensor power f(g)^{(x)n}. true: f(g_1) (x) ... (x) f(g_n)
  // with independent group elements.
  bool independent = false;

  int pair_dim() const { return d * d; }
  int dim() const;
};

CMatrix haar_unitary(int d, Rng& rng);
CMatrix haar_special_unitary(int d, Rng& rng);

Operator u_theta(double theta, int d);
Operator act_sud(const CMatrix& g);
Operator act_v(const CMatrix& g);
// Columns: orthonormal basis of the orthocomplement of phi0 (Gram-Schmidt of
// the computational basis against phi0, skipping dependent vectors).
CMatrix orthocomplement_basis(int d);

// One draw of the per-pair unitaries (copies entries; equal when !independent).
std::vector<CMatrix> sample_pair_unitaries(const GroupAction& action, Rng& rng);
// Full unitary on the pair-major space for a given draw.
CMatrix assemble_unitary(const std::vector<CMatrix>& locals);
// Applies (x)_k locals[k] to a pair-major vector.
CVector apply_local(const std::vector<CMatrix>& locals, const CVector& v);
// f(g) op f(g)^dagger.
CMatrix conjugate_local(const std::vector<CMatrix>& locals, const CMatrix& op);

struct TwirlEstimate {
  Operator mean;
  // Entrywise standard error of the mean.
  RMatrix std_err;
  std::size_t samples = 0;

  double max_stderr() const;
  // max |mean - target| over entries.
  double max_deviation(const CMatrix& target) const;
  // Every entry within k standard errors (stderr floored at `floor`).
  bool consistent_with(const CMatrix& target, double k = 5.0, double floor = 1e-12) const;
  // Largest |mean - target| / max(stderr, floor).
  double max_z(const CMatrix& target, double floor = 1e-12) const;
};

TwirlEstimate mc_twirl(const Operator& op, const GroupAction& action, std::size_t samples, std::uint64_t seed);
// Rank-one input weight |v><v|; applies the group to v only.
TwirlEstimate mc_twirl(const Ket& v, double weight, const GroupAction& action, std::size_t samples,
                       std::uint64_t seed);

// Sector projectors of U_theta^{(x)n}: C_k projects onto pair-major basis
// products with exactly k factors equal to phi0.
std::vector<CMatrix> u1_charge_projectors(int d, int copies);
Operator u1_twirl_exact(const Operator& op, int d, int copies);

struct InvarianceReport {
  bool invariant = false;
  double max_deviation = 0.0;
};

InvarianceReport check_invariance(const TestOperator& t, const GroupAction& action, std::size_t samples, double tol,
                                  std::uint64_t seed);

}  // namespace entbench
