#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "entbench/error.hpp"
#include "entbench/rng.hpp"

// Dense states and operators on labeled tensor-product spaces.
//
// Index convention: basis index of |i_1 ... i_k> is row-major with the left
// factor most significant, i.e. i_1 * (d_2 ... d_k) + ... + i_k. Multi-copy
// pair systems are stored pair-major, (A1 B1)(A2 B2)...

namespace entbench {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

// A value together with whether its validity condition holds.
struct FlaggedValue {
  double value = 0.0;
  bool condition = true;
};

struct Factor {
  std::string label;
  int dim = 0;
  bool operator==(const Factor&) const = default;
};

using Factors = std::vector<Factor>;

int total_dim(const Factors& factors);
std::vector<int> factor_dims(const Factors& factors);
// [A:d, B:d]
Factors pair_factors(int d);
// [A1:d, B1:d, ..., An:d, Bn:d]
Factors pair_major_factors(int d, int n);

class Ket {
 public:
  Ket() = default;
  Ket(CVector amplitudes, Factors factors);
  // Single unlabeled factor of size amplitudes.size().
  explicit Ket(CVector amplitudes);

  const CVector& amplitudes() const { return amp_; }
  const Factors& factors() const { return factors_; }
  int dim() const { return static_cast<int>(amp_.size()); }
  double norm() const { return amp_.norm(); }
  bool is_normalized(double tol = 1e-12) const { return std::abs(norm() - 1.0) <= tol; }
  Ket conjugate() const { return Ket(amp_.conjugate(), factors_); }
  Ket normalized() const;
  cplx operator[](int i) const { return amp_(i); }

 private:
  CVector amp_;
  Factors factors_;
};

class Operator {
 public:
  Operator() = default;
  Operator(CMatrix entries, Factors factors);
  explicit Operator(CMatrix entries);

  static Operator identity(const Factors& factors);
  static Operator projector(const Ket& v);

  const CMatrix& matrix() const { return m_; }
  const Factors& factors() const { return factors_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  cplx trace() const { return m_.trace(); }
  Operator adjoint() const { return Operator(m_.adjoint(), factors_); }
  Operator with_factors(Factors factors) const { return Operator(m_, std::move(factors)); }

  Operator operator*(const Operator& o) const;
  Operator operator+(const Operator& o) const;
  Operator operator-(const Operator& o) const;
  Operator operator*(cplx s) const { return Operator(m_ * s, factors_); }

 private:
  CMatrix m_;
  Factors factors_;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Operator op, double tol = 1e-10);
  DensityMatrix(CMatrix m, Factors factors, double tol = 1e-10)
      : DensityMatrix(Operator(std::move(m), std::move(factors)), tol) {}

  const Operator& op() const { return op_; }
  const CMatrix& matrix() const { return op_.matrix(); }
  const Factors& factors() const { return op_.factors(); }
  int dim() const { return op_.dim(); }

 private:
  Operator op_;
};

class TestOperator {
 public:
  TestOperator() = default;
  explicit TestOperator(Operator op, double tol = 1e-10);
  TestOperator(CMatrix m, Factors factors, double tol = 1e-10)
      : TestOperator(Operator(std::move(m), std::move(factors)), tol) {}

  const Operator& op() const { return op_; }
  const CMatrix& matrix() const { return op_.matrix(); }
  const Factors& factors() const { return op_.factors(); }
  int dim() const { return op_.dim(); }
  // Tr(T sigma): acceptance probability of the null on sigma.
  double accept(const DensityMatrix& sigma) const;

 private:
  Operator op_;
};

class RankOnePOVM {
 public:
  struct Element {
    double weight;
    Ket vec;
  };
  RankOnePOVM() = default;
  explicit RankOnePOVM(std::vector<Element> elements, double tol = 1e-9);

  const std::vector<Element>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  int dim() const { return elements_.empty() ? 0 : elements_.front().vec.dim(); }

 private:
  std::vector<Element> elements_;
};

// Validation helpers, returning the worst violation.
double hermiticity_defect(const CMatrix& m);
double min_eigenvalue(const CMatrix& m);
double max_eigenvalue(const CMatrix& m);
double max_abs(const CMatrix& m);
double max_abs_diff(const CMatrix& a, const CMatrix& b);
CMatrix hermitian_part(const CMatrix& m);
// Re Tr(a b)
double trace_product(const CMatrix& a, const CMatrix& b);

Ket max_entangled_ket(int d);
Ket basis_ket(int dim, int index);
double fidelity_defect(const DensityMatrix& sigma);
DensityMatrix isotropic_state(int d, double p);
DensityMatrix pure_state(const Ket& v);

Ket tensor(const Ket& a, const Ket& b);
Operator tensor(const Operator& a, const Operator& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
Ket tensor_power(const Ket& a, int n);
Operator tensor_power(const Operator& a, int n);

// perm[i] is the old position of the factor that ends up at position i.
Operator permute_systems(const Operator& a, const std::vector<int>& perm);
Ket permute_systems(const Ket& a, const std::vector<int>& perm);
// Index map for permute_systems: new basis index -> old basis index.
std::vector<int> permutation_index_map(const std::vector<int>& dims, const std::vector<int>& perm);
// Factor order taking pair-major (A1 B1 ... An Bn) to group-major (A1..An B1..Bn).
std::vector<int> pair_to_group_major(int n);
std::vector<int> group_to_pair_major(int n);
std::vector<int> inverse_permutation(const std::vector<int>& perm);

Operator partial_trace(const Operator& a, const std::vector<int>& keep);

struct PauliPair {
  Operator x;
  Operator z;
};
PauliPair generalized_pauli(int d);
// phi^{n,m} at position n*d + m.
std::vector<Ket> bell_basis(int d);

DensityMatrix random_density(int dim, Rng& rng);
DensityMatrix random_density(const Factors& factors, Rng& rng);
TestOperator random_test(int dim, Rng& rng);
TestOperator random_test(const Factors& factors, Rng& rng);
CMatrix ginibre(int rows, int cols, Rng& rng);
Ket random_ket(int dim, Rng& rng);

}  // namespace entbench
