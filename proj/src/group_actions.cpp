#include "entbench/group_actions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace entbench {

const char* to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::u1: return "U1";
    case GroupKind::sud: return "SUd";
    case GroupKind::sud_x_u1: return "SUdxU1";
    case GroupKind::ud2_minus_1: return "Ud2minus1";
  }
  return "?";
}

GroupKind group_kind_from_string(const std::string& name) {
  for (GroupKind k : {GroupKind::u1, GroupKind::sud, GroupKind::sud_x_u1, GroupKind::ud2_minus_1})
    if (name == to_string(k)) return k;
  throw Error(ErrorKind::invalid_argument, "unknown group action '" + name + "'");
}

int GroupAction::dim() const {
  int n = 1;
  for (int i = 0; i < copies; ++i) n *= d * d;
  return n;
}

CMatrix haar_unitary(int d, Rng& rng) {
  require(d >= 1, ErrorKind::invalid_dimension, "haar_unitary");
  CMatrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    cplx rjj = r(j, j);
    double a = std::abs(rjj);
    q.col(j) *= (a > 0 ? rjj / a : cplx(1.0));
  }
  return q;
}

CMatrix haar_special_unitary(int d, Rng& rng) {
  CMatrix u = haar_unitary(d, rng);
  cplx det = u.determinant();
  return u * std::polar(1.0, -std::arg(det) / d);
}

Operator u_theta(double theta, int d) {
  Ket phi = max_entangled_ket(d);
  CMatrix P = phi.amplitudes() * phi.amplitudes().adjoint();
  CMatrix m = CMatrix::Identity(d * d, d * d) + (std::polar(1.0, theta) - 1.0) * P;
  return Operator(m, pair_factors(d));
}

Operator act_sud(const CMatrix& g) {
  require(g.rows() == g.cols() && g.rows() >= 2, ErrorKind::invalid_dimension, "act_sud needs a square d>=2 matrix");
  const int d = static_cast<int>(g.rows());
  CMatrix gb = g.conjugate();
  CMatrix m(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m.block(i * d, j * d, d, d) = g(i, j) * gb;
  return Operator(m, pair_factors(d));
}

CMatrix orthocomplement_basis(int d) {
  const int n = d * d;
  const CVector phi = max_entangled_ket(d).amplitudes();
  CMatrix w(n, n - 1);
  int found = 0;
  for (int i = 0; i < n && found < n - 1; ++i) {
    CVector v = CVector::Unit(n, i);
    v -= phi * phi.dot(v);
    for (int k = 0; k < found; ++k) v -= w.col(k) * w.col(k).dot(v);
    double nv = v.norm();
    if (nv < 1e-8) continue;
    w.col(found++) = v / nv;
  }
  require(found == n - 1, ErrorKind::invalid_dimension, "orthocomplement basis incomplete");
  return w;
}

Operator act_v(const CMatrix& g) {
  const int n1 = static_cast<int>(g.rows());
  require(g.rows() == g.cols(), ErrorKind::dimension_mismatch, "act_v needs a square matrix");
  int d = static_cast<int>(std::lround(std::sqrt(n1 + 1.0)));
  require(d >= 2 && d * d - 1 == n1, ErrorKind::invalid_dimension, "act_v needs a (d^2-1)x(d^2-1) matrix");
  CMatrix w = orthocomplement_basis(d);
  CVector phi = max_entangled_ket(d).amplitudes();
  CMatrix m = w * g * w.adjoint() + phi * phi.adjoint();
  return Operator(m, pair_factors(d));
}

namespace {

CMatrix sample_one(GroupKind kind, int d, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  switch (kind) {
    case GroupKind::u1: return u_theta(angle(rng), d).matrix();
    case GroupKind::sud: return act_sud(haar_special_unitary(d, rng)).matrix();
    case GroupKind::sud_x_u1: {
      CMatrix g = act_sud(haar_special_unitary(d, rng)).matrix();
      return g * u_theta(angle(rng), d).matrix();
    }
    case GroupKind::ud2_minus_1: return act_v(haar_unitary(d * d - 1, rng)).matrix();
  }
  throw Error(ErrorKind::invalid_argument, "unknown group kind");
}

// m <- (I (x) .. u at position k .. (x) I) m, with n factors of size dp.
void apply_rows(CMatrix& m, const CMatrix& u, int k, int n, int dp) {
  int right = 1;
  for (int i = k + 1; i < n; ++i) right *= dp;
  const int block = dp * right;
  const int lefts = static_cast<int>(m.rows()) / block;
  const CMatrix ut = u.transpose();
  CMatrix tmp(right, dp);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    cplx* col = m.col(c).data();
    for (int l = 0; l < lefts; ++l) {
      Eigen::Map<CMatrix> x(col + static_cast<std::ptrdiff_t>(l) * block, right, dp);
      tmp.noalias() = x * ut;
      x = tmp;
    }
  }
}

}  // namespace

std::vector<CMatrix> sample_pair_unitaries(const GroupAction& action, Rng& rng) {
  require(action.d >= 2, ErrorKind::invalid_dimension, "group action needs d >= 2");
  require(action.copies >= 1, ErrorKind::invalid_argument, "group action needs copies >= 1");
  std::vector<CMatrix> locals;
  locals.reserve(action.copies);
  if (!action.independent) {
    CMatrix u = sample_one(action.kind, action.d, rng);
    locals.assign(action.copies, u);
  } else {
    for (int k = 0; k < action.copies; ++k) locals.push_back(sample_one(action.kind, action.d, rng));
  }
  return locals;
}

CMatrix assemble_unitary(const std::vector<CMatrix>& locals) {
  require(!locals.empty(), ErrorKind::invalid_argument, "no local unitaries");
  Operator u{locals.front()};
  for (std::size_t k = 1; k < locals.size(); ++k) u = tensor(u, Operator{locals[k]});
  return u.matrix();
}

CVector apply_local(const std::vector<CMatrix>& locals, const CVector& v) {
  CMatrix m = v;
  const int n = static_cast<int>(locals.size());
  const int dp = static_cast<int>(locals.front().rows());
  for (int k = 0; k < n; ++k) apply_rows(m, locals[k], k, n, dp);
  return m.col(0);
}

CMatrix conjugate_local(const std::vector<CMatrix>& locals, const CMatrix& op) {
  const int n = static_cast<int>(locals.size());
  const int dp = static_cast<int>(locals.front().rows());
  CMatrix m = op;
  for (int k = 0; k < n; ++k) apply_rows(m, locals[k], k, n, dp);
  CMatrix mt = m.adjoint();
  for (int k = 0; k < n; ++k) apply_rows(mt, locals[k], k, n, dp);
  return mt.adjoint();
}

double TwirlEstimate::max_stderr() const { return std_err.size() == 0 ? 0.0 : std_err.maxCoeff(); }

double TwirlEstimate::max_deviation(const CMatrix& target) const { return max_abs_diff(mean.matrix(), target); }

double TwirlEstimate::max_z(const CMatrix& target, double floor) const {
  require(target.rows() == mean.dim() && target.cols() == mean.dim(), ErrorKind::dimension_mismatch,
          "twirl target size");
  RMatrix dev = (mean.matrix() - target).cwiseAbs();
  RMatrix se = std_err.cwiseMax(floor);
  return (dev.array() / se.array()).maxCoeff();
}

bool TwirlEstimate::consistent_with(const CMatrix& target, double k, double floor) const {
  return max_z(target, floor) <= k;
}

namespace {

struct Partial {
  CMatrix sum;
  RMatrix sq;
};

template <class SampleFn>
TwirlEstimate run_twirl(const GroupAction& action, const Factors& factors, std::size_t samples, std::uint64_t seed,
                        SampleFn sample) {
  require(samples >= 1, ErrorKind::invalid_argument, "mc_twirl needs at least one sample");
  const int n = total_dim(factors);
  std::vector<Partial> parts(chunk_count(samples));
  for_each_chunk(samples, [&](std::size_t c, std::size_t begin, std::size_t end) {
    Rng rng = stream_rng(seed, c);
    Partial p{CMatrix::Zero(n, n), RMatrix::Zero(n, n)};
    for (std::size_t s = begin; s < end; ++s) {
      auto locals = sample_pair_unitaries(action, rng);
      CMatrix x = sample(locals);
      p.sum += x;
      p.sq += x.cwiseAbs2();
    }
    parts[c] = std::move(p);
  });
  CMatrix sum = CMatrix::Zero(n, n);
  RMatrix sq = RMatrix::Zero(n, n);
  for (const auto& p : parts) {
    sum += p.sum;
    sq += p.sq;
  }
  const double N = static_cast<double>(samples);
  CMatrix mean = sum / N;
  RMatrix se = RMatrix::Zero(n, n);
  if (samples > 1) {
    RMatrix var = ((sq - N * mean.cwiseAbs2()) / (N - 1.0)).cwiseMax(0.0);
    se = (var / N).cwiseSqrt();
  }
  return TwirlEstimate{Operator(mean, factors), se, samples};
}

void check_action_dims(const GroupAction& action, int dim) {
  require(action.d >= 2, ErrorKind::invalid_dimension, "group action needs d >= 2");
  require(dim == action.dim(), ErrorKind::dimension_mismatch, "operator size does not match the group action");
}

}  // namespace

TwirlEstimate mc_twirl(const Operator& op, const GroupAction& action, std::size_t samples, std::uint64_t seed) {
  check_action_dims(action, op.dim());
  const CMatrix& m = op.matrix();
  return run_twirl(action, op.factors(), samples, seed,
                   [&](const std::vector<CMatrix>& locals) { return conjugate_local(locals, m); });
}

TwirlEstimate mc_twirl(const Ket& v, double weight, const GroupAction& action, std::size_t samples,
                       std::uint64_t seed) {
  check_action_dims(action, v.dim());
  const CVector& a = v.amplitudes();
  return run_twirl(action, v.factors(), samples, seed, [&](const std::vector<CMatrix>& locals) {
    CVector w = apply_local(locals, a);
    return CMatrix(weight * w * w.adjoint());
  });
}

std::vector<CMatrix> u1_charge_projectors(int d, int copies) {
  require(copies >= 1, ErrorKind::invalid_argument, "copies >= 1");
  CVector phi = max_entangled_ket(d).amplitudes();
  CMatrix P = phi * phi.adjoint();
  CMatrix Q = CMatrix::Identity(d * d, d * d) - P;
  int dim = 1;
  for (int i = 0; i < copies; ++i) dim *= d * d;
  std::vector<CMatrix> c(copies + 1, CMatrix::Zero(dim, dim));
  for (unsigned mask = 0; mask < (1u << copies); ++mask) {
    Operator t{(mask & 1u) ? P : Q};
    for (int i = 1; i < copies; ++i) t = tensor(t, Operator{(mask >> i) & 1u ? P : Q});
    c[std::popcount(mask)] += t.matrix();
  }
  return c;
}

Operator u1_twirl_exact(const Operator& op, int d, int copies) {
  int dim = 1;
  for (int i = 0; i < copies; ++i) dim *= d * d;
  require(op.dim() == dim, ErrorKind::dimension_mismatch, "operator size does not match (d^2)^copies");
  auto c = u1_charge_projectors(d, copies);
  CMatrix r = CMatrix::Zero(dim, dim);
  for (const auto& ck : c) r += ck * op.matrix() * ck;
  return Operator(r, op.factors());
}

InvarianceReport check_invariance(const TestOperator& t, const GroupAction& action, std::size_t samples, double tol,
                                  std::uint64_t seed) {
  check_action_dims(action, t.dim());
  require(samples >= 1, ErrorKind::invalid_argument, "check_invariance needs samples >= 1");
  Rng rng = stream_rng(seed, 0);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    auto locals = sample_pair_unitaries(action, rng);
    worst = std::max(worst, max_abs_diff(conjugate_local(locals, t.matrix()), t.matrix()));
  }
  return {worst <= tol, worst};
}

}  // namespace entbench
