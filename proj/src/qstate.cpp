#include "entbench/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace entbench {

int total_dim(const Factors& factors) {
  int n = 1;
  for (const auto& f : factors) n *= f.dim;
  return n;
}

std::vector<int> factor_dims(const Factors& factors) {
  std::vector<int> dims;
  dims.reserve(factors.size());
  for (const auto& f : factors) dims.push_back(f.dim);
  return dims;
}

Factors pair_factors(int d) { return {{"A", d}, {"B", d}}; }

Factors pair_major_factors(int d, int n) {
  Factors f;
  for (int i = 1; i <= n; ++i) {
    f.push_back({"A" + std::to_string(i), d});
    f.push_back({"B" + std::to_string(i), d});
  }
  return f;
}

namespace {

void check_factors(const Factors& factors, Eigen::Index dim) {
  for (const auto& f : factors) require(f.dim >= 1, ErrorKind::invalid_dimension, "factor " + f.label);
  require(total_dim(factors) == dim, ErrorKind::dimension_mismatch,
          "factor dimensions do not multiply to " + std::to_string(dim));
}

void check_same_shape(const Operator& a, const Operator& b) {
  require(a.dim() == b.dim(), ErrorKind::dimension_mismatch, "operator sizes differ");
}

}  // namespace

Ket::Ket(CVector amplitudes, Factors factors) : amp_(std::move(amplitudes)), factors_(std::move(factors)) {
  require(amp_.size() > 0, ErrorKind::invalid_dimension, "empty ket");
  check_factors(factors_, amp_.size());
}

Ket::Ket(CVector amplitudes) : amp_(std::move(amplitudes)) {
  require(amp_.size() > 0, ErrorKind::invalid_dimension, "empty ket");
  factors_ = {{"S", static_cast<int>(amp_.size())}};
}

Ket Ket::normalized() const {
  double n = norm();
  require(n > 0, ErrorKind::invalid_argument, "zero vector cannot be normalized");
  return Ket(amp_ / n, factors_);
}

Operator::Operator(CMatrix entries, Factors factors) : m_(std::move(entries)), factors_(std::move(factors)) {
  require(m_.rows() == m_.cols(), ErrorKind::dimension_mismatch, "operator must be square");
  require(m_.rows() > 0, ErrorKind::invalid_dimension, "empty operator");
  check_factors(factors_, m_.rows());
}

Operator::Operator(CMatrix entries) : m_(std::move(entries)) {
  require(m_.rows() == m_.cols(), ErrorKind::dimension_mismatch, "operator must be square");
  require(m_.rows() > 0, ErrorKind::invalid_dimension, "empty operator");
  factors_ = {{"S", static_cast<int>(m_.rows())}};
}

Operator Operator::identity(const Factors& factors) {
  int n = total_dim(factors);
  return Operator(CMatrix::Identity(n, n), factors);
}

Operator Operator::projector(const Ket& v) {
  return Operator(v.amplitudes() * v.amplitudes().adjoint(), v.factors());
}

Operator Operator::operator*(const Operator& o) const {
  check_same_shape(*this, o);
  return Operator(m_ * o.m_, factors_);
}

Operator Operator::operator+(const Operator& o) const {
  check_same_shape(*this, o);
  return Operator(m_ + o.m_, factors_);
}

Operator Operator::operator-(const Operator& o) const {
  check_same_shape(*this, o);
  return Operator(m_ - o.m_, factors_);
}

double hermiticity_defect(const CMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

double min_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::dimension_mismatch, "matrix sizes differ");
  return max_abs(a - b);
}

double trace_product(const CMatrix& a, const CMatrix& b) {
  require(a.cols() == b.rows() && a.rows() == b.cols(), ErrorKind::dimension_mismatch, "trace_product");
  return (a.array() * b.transpose().array()).sum().real();
}

DensityMatrix::DensityMatrix(Operator op, double tol) : op_(std::move(op)) {
  const CMatrix& m = op_.matrix();
  require(hermiticity_defect(m) <= tol, ErrorKind::invalid_state, "density matrix not Hermitian");
  require(std::abs(m.trace() - cplx(1.0)) <= tol, ErrorKind::invalid_state, "density matrix trace is not 1");
  require(min_eigenvalue(m) >= -tol, ErrorKind::invalid_state, "density matrix not positive semidefinite");
}

TestOperator::TestOperator(Operator op, double tol) : op_(std::move(op)) {
  const CMatrix& m = op_.matrix();
  require(hermiticity_defect(m) <= tol, ErrorKind::invalid_argument, "test operator not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() >= -tol && es.eigenvalues().maxCoeff() <= 1.0 + tol,
          ErrorKind::invalid_argument, "test operator eigenvalues outside [0,1]");
}

double TestOperator::accept(const DensityMatrix& sigma) const {
  require(sigma.dim() == dim(), ErrorKind::dimension_mismatch, "test and state sizes differ");
  return trace_product(matrix(), sigma.matrix());
}

RankOnePOVM::RankOnePOVM(std::vector<Element> elements, double tol) : elements_(std::move(elements)) {
  require(!elements_.empty(), ErrorKind::invalid_povm, "empty POVM");
  const int n = elements_.front().vec.dim();
  CMatrix sum = CMatrix::Zero(n, n);
  for (const auto& e : elements_) {
    require(e.weight >= 0, ErrorKind::invalid_povm, "negative weight");
    require(e.vec.dim() == n, ErrorKind::dimension_mismatch, "POVM elements of different size");
    require(e.vec.is_normalized(1e-10), ErrorKind::invalid_povm, "POVM vector not normalized");
    sum += e.weight * e.vec.amplitudes() * e.vec.amplitudes().adjoint();
  }
  require(max_abs_diff(sum, CMatrix::Identity(n, n)) <= tol, ErrorKind::invalid_povm, "POVM does not sum to I");
}

Ket max_entangled_ket(int d) {
  require(d >= 2, ErrorKind::invalid_dimension, "d must be at least 2");
  CVector v = CVector::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return Ket(v, pair_factors(d));
}

Ket basis_ket(int dim, int index) {
  require(dim >= 1, ErrorKind::invalid_dimension, "basis_ket");
  require(index >= 0 && index < dim, ErrorKind::invalid_argument, "basis index out of range");
  CVector v = CVector::Zero(dim);
  v(index) = 1.0;
  return Ket(v);
}

double fidelity_defect(const DensityMatrix& sigma) {
  int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(sigma.dim()))));
  require(d >= 2 && d * d == sigma.dim(), ErrorKind::dimension_mismatch, "state is not on A(x)B with equal dims");
  const CVector phi = max_entangled_ket(d).amplitudes();
  double p = 1.0 - (phi.adjoint() * sigma.matrix() * phi)(0, 0).real();
  if (p < 0 && p > -1e-12) p = 0;
  if (p > 1 && p < 1 + 1e-12) p = 1;
  return std::clamp(p, 0.0, 1.0);
}

DensityMatrix isotropic_state(int d, double p) {
  require(p >= 0 && p <= 1, ErrorKind::invalid_argument, "p must lie in [0,1]");
  Ket phi = max_entangled_ket(d);
  CMatrix P = phi.amplitudes() * phi.amplitudes().adjoint();
  CMatrix I = CMatrix::Identity(d * d, d * d);
  CMatrix m = (1.0 - p) * P + (p / (d * d - 1.0)) * (I - P);
  return DensityMatrix(m, pair_factors(d));
}

DensityMatrix pure_state(const Ket& v) {
  Ket u = v.normalized();
  return DensityMatrix(Operator::projector(u));
}

namespace {

Factors concat(const Factors& a, const Factors& b) {
  Factors f = a;
  f.insert(f.end(), b.begin(), b.end());
  return f;
}

}  // namespace

Ket tensor(const Ket& a, const Ket& b) {
  CVector v(a.dim() * b.dim());
  for (int i = 0; i < a.dim(); ++i) v.segment(i * b.dim(), b.dim()) = a.amplitudes()(i) * b.amplitudes();
  return Ket(v, concat(a.factors(), b.factors()));
}

Operator tensor(const Operator& a, const Operator& b) {
  const int na = a.dim(), nb = b.dim();
  CMatrix m(na * nb, na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) m.block(i * nb, j * nb, nb, nb) = a.matrix()(i, j) * b.matrix();
  return Operator(std::move(m), concat(a.factors(), b.factors()));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(tensor(a.op(), b.op()));
}

Ket tensor_power(const Ket& a, int n) {
  require(n >= 1, ErrorKind::invalid_argument, "tensor power needs n >= 1");
  Ket r = a;
  for (int i = 1; i < n; ++i) r = tensor(r, a);
  return r;
}

Operator tensor_power(const Operator& a, int n) {
  require(n >= 1, ErrorKind::invalid_argument, "tensor power needs n >= 1");
  Operator r = a;
  for (int i = 1; i < n; ++i) r = tensor(r, a);
  return r;
}

std::vector<int> inverse_permutation(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  return inv;
}

namespace {

void check_perm(const std::vector<int>& perm, std::size_t n) {
  require(perm.size() == n, ErrorKind::invalid_permutation, "permutation length differs from factor count");
  std::vector<bool> seen(n, false);
  for (int p : perm) {
    require(p >= 0 && static_cast<std::size_t>(p) < n && !seen[p], ErrorKind::invalid_permutation,
            "not a bijection of factors");
    seen[p] = true;
  }
}

}  // namespace

std::vector<int> permutation_index_map(const std::vector<int>& dims, const std::vector<int>& perm) {
  check_perm(perm, dims.size());
  const std::size_t k = dims.size();
  std::vector<int> old_stride(k, 1);
  for (int i = static_cast<int>(k) - 2; i >= 0; --i) old_stride[i] = old_stride[i + 1] * dims[i + 1];
  std::vector<int> new_dims(k);
  for (std::size_t i = 0; i < k; ++i) new_dims[i] = dims[perm[i]];
  int total = std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
  std::vector<int> map(total);
  std::vector<int> digit(k, 0);
  for (int idx = 0; idx < total; ++idx) {
    int old = 0;
    for (std::size_t i = 0; i < k; ++i) old += digit[i] * old_stride[perm[i]];
    map[idx] = old;
    for (int i = static_cast<int>(k) - 1; i >= 0; --i) {
      if (++digit[i] < new_dims[i]) break;
      digit[i] = 0;
    }
  }
  return map;
}

Operator permute_systems(const Operator& a, const std::vector<int>& perm) {
  auto map = permutation_index_map(factor_dims(a.factors()), perm);
  const int n = a.dim();
  CMatrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = a.matrix()(map[i], map[j]);
  Factors f;
  for (int p : perm) f.push_back(a.factors()[p]);
  return Operator(std::move(m), std::move(f));
}

Ket permute_systems(const Ket& a, const std::vector<int>& perm) {
  auto map = permutation_index_map(factor_dims(a.factors()), perm);
  CVector v(a.dim());
  for (int i = 0; i < a.dim(); ++i) v(i) = a.amplitudes()(map[i]);
  Factors f;
  for (int p : perm) f.push_back(a.factors()[p]);
  return Ket(v, std::move(f));
}

std::vector<int> pair_to_group_major(int n) {
  std::vector<int> perm;
  for (int i = 0; i < n; ++i) perm.push_back(2 * i);
  for (int i = 0; i < n; ++i) perm.push_back(2 * i + 1);
  return perm;
}

std::vector<int> group_to_pair_major(int n) { return inverse_permutation(pair_to_group_major(n)); }

Operator partial_trace(const Operator& a, const std::vector<int>& keep) {
  require(!keep.empty(), ErrorKind::invalid_argument, "partial_trace needs a non-empty keep set");
  const std::size_t k = a.factors().size();
  std::vector<bool> kept(k, false);
  for (int i : keep) {
    require(i >= 0 && static_cast<std::size_t>(i) < k && !kept[i], ErrorKind::invalid_argument,
            "keep set has invalid or repeated factor");
    kept[i] = true;
  }
  // Move kept factors to the front (in keep order), traced ones to the back.
  std::vector<int> perm = keep;
  for (std::size_t i = 0; i < k; ++i)
    if (!kept[i]) perm.push_back(static_cast<int>(i));
  Operator p = permute_systems(a, perm);
  int dk = 1;
  Factors f;
  for (int i : keep) {
    dk *= a.factors()[i].dim;
    f.push_back(a.factors()[i]);
  }
  const int dt = a.dim() / dk;
  CMatrix m = CMatrix::Zero(dk, dk);
  for (int i = 0; i < dk; ++i)
    for (int j = 0; j < dk; ++j) m(i, j) = p.matrix().block(i * dt, j * dt, dt, dt).trace();
  return Operator(std::move(m), std::move(f));
}

PauliPair generalized_pauli(int d) {
  require(d >= 2, ErrorKind::invalid_dimension, "d must be at least 2");
  CMatrix x = CMatrix::Zero(d, d), z = CMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    x((j + 1) % d, j) = 1.0;
    z(j, j) = std::polar(1.0, 2.0 * kPi * j / d);
  }
  Factors f{{"A", d}};
  return {Operator(x, f), Operator(z, f)};
}

std::vector<Ket> bell_basis(int d) {
  auto [x, z] = generalized_pauli(d);
  const CVector phi = max_entangled_ket(d).amplitudes();
  std::vector<Ket> out;
  CMatrix xn = CMatrix::Identity(d, d);
  for (int n = 0; n < d; ++n) {
    CMatrix zm = CMatrix::Identity(d, d);
    for (int m = 0; m < d; ++m) {
      CMatrix local = xn * zm;
      CMatrix full(d * d, d * d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) full.block(i * d, j * d, d, d) = local(i, j) * CMatrix::Identity(d, d);
      out.emplace_back(full * phi, pair_factors(d));
      zm = zm * z.matrix();
    }
    xn = xn * x.matrix();
  }
  return out;
}

CMatrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      double re = normal(rng);
      double im = normal(rng);
      g(i, j) = cplx(re, im);
    }
  return g;
}

Ket random_ket(int dim, Rng& rng) {
  CVector v = ginibre(dim, 1, rng).col(0);
  return Ket(v / v.norm());
}

DensityMatrix random_density(int dim, Rng& rng) {
  require(dim >= 1, ErrorKind::invalid_dimension, "random_density");
  return random_density(Factors{{"S", dim}}, rng);
}

DensityMatrix random_density(const Factors& factors, Rng& rng) {
  const int n = total_dim(factors);
  CMatrix g = ginibre(n, n, rng);
  CMatrix r = g * g.adjoint();
  r /= r.trace().real();
  r = hermitian_part(r);
  return DensityMatrix(r, factors);
}

TestOperator random_test(int dim, Rng& rng) {
  require(dim >= 1, ErrorKind::invalid_dimension, "random_test");
  return random_test(Factors{{"S", dim}}, rng);
}

TestOperator random_test(const Factors& factors, Rng& rng) {
  const int n = total_dim(factors);
  CMatrix g = ginibre(n, n, rng);
  CMatrix h = hermitian_part(g) / std::sqrt(static_cast<double>(n)) + 0.5 * CMatrix::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
  CMatrix t = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return TestOperator(hermitian_part(t), factors);
}

}  // namespace entbench
