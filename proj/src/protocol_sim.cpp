#include "entbench/protocol_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <unsupported/Eigen/KroneckerProduct>

#include "entbench/classical_tests.hpp"
#include "entbench/group_actions.hpp"
#include "entbench/quantum_tests.hpp"

namespace entbench {

namespace {

struct Counts {
  std::size_t accepted = 0;
  std::size_t pair_accepted = 0;
  std::size_t pairs = 0;
  std::vector<std::size_t> chunks;
};

// Runs trial(rng, counts) for every trial and reduces chunks in order.
template <class F>
Counts run_trials(std::size_t trials, std::uint64_t seed, F&& trial) {
  std::vector<Counts> parts(chunk_count(trials, kTrialChunk));
  for_each_chunk(
      trials,
      [&](std::size_t c, std::size_t begin, std::size_t end) {
        Rng rng = stream_rng(seed, c);
        Counts local;
        for (std::size_t i = begin; i < end; ++i) trial(rng, local);
        parts[c] = local;
      },
      kTrialChunk);
  Counts total;
  for (const Counts& p : parts) {
    total.chunks.push_back(p.accepted);
    total.accepted += p.accepted;
    total.pair_accepted += p.pair_accepted;
    total.pairs += p.pairs;
  }
  return total;
}

ExperimentResult finish(const Counts& c, std::size_t trials, double exact) {
  ExperimentResult r;
  r.trials = trials;
  r.accepted = c.accepted;
  r.rejected = trials - c.accepted;
  r.rate = static_cast<double>(c.accepted) / trials;
  r.ci = ci_half_width(r.rate, trials);
  r.exact = exact;
  r.chunk_accepted = c.chunks;
  return r;
}

// Discrete draw from probabilities summing to 1.
int draw(const std::vector<double>& probs, Rng& rng) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    if (u < probs[i]) return static_cast<int>(i);
    u -= probs[i];
  }
  return static_cast<int>(probs.size()) - 1;
}

bool bernoulli(double p, Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

// Number of failed two-outcome measurements among n draws.
int count_failures(int n, double fail, Rng& rng) {
  int k = 0;
  for (int i = 0; i < n; ++i) k += bernoulli(fail, rng);
  return k;
}

std::vector<CMatrix> two_outcome(const CMatrix& accept) {
  return {accept, CMatrix::Identity(accept.rows(), accept.cols()) - accept};
}

CMatrix phi0_projector(int d) {
  CVector phi = max_entangled_ket(d).amplitudes();
  return phi * phi.adjoint();
}

// One run of the one-way LOCC protocol; true when Bob accepts.
bool one_way_trial(const DensityMatrix& state, int d, Rng& rng) {
  CMatrix g = haar_unitary(d, rng);
  std::vector<CMatrix> alice;
  alice.reserve(d);
  const CMatrix id = CMatrix::Identity(d, d);
  for (int i = 0; i < d; ++i) {
    CMatrix e = g.col(i) * g.col(i).adjoint();
    alice.push_back(Eigen::kroneckerProduct(e, id).eval());
  }
  const int i = draw(born_probabilities(state, alice), rng);
  CMatrix post = alice[i] * state.matrix() * alice[i];
  const double w = post.trace().real();
  Operator bob = partial_trace(Operator(post / w, pair_factors(d)), {1});
  CVector v = g.col(i).conjugate();
  return bernoulli(std::clamp((v.adjoint() * bob.matrix() * v)(0, 0).real(), 0.0, 1.0), rng);
}

void require_defect(double p) {
  require(std::isfinite(p) && p >= 0 && p <= 1, ErrorKind::invalid_argument, "state defect must lie in [0, 1]");
}

}  // namespace

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::global_projective: return "global_projective";
    case Protocol::bell_pairs: return "bell_pairs";
    case Protocol::one_way_t1: return "one_way_t1";
    case Protocol::repeated_t1: return "repeated_t1";
  }
  return "?";
}

Protocol protocol_from_string(const std::string& name) {
  for (Protocol p : {Protocol::global_projective, Protocol::bell_pairs, Protocol::one_way_t1, Protocol::repeated_t1})
    if (name == to_string(p)) return p;
  throw Error(ErrorKind::invalid_argument, "unknown protocol '" + name + "'");
}

void StateSpec::validate() const {
  require(family == "isotropic" || family == "max_entangled" || family == "random", ErrorKind::invalid_argument,
          "unknown state family '" + family + "'");
  require_defect(p);
}

DensityMatrix make_state(int d, const StateSpec& spec) {
  spec.validate();
  require(d >= 2, ErrorKind::invalid_dimension, "d must be >= 2");
  if (spec.family == "max_entangled") return isotropic_state(d, 0.0);
  if (spec.family == "random") {
    Rng rng = stream_rng(spec.seed, 0);
    return random_density(pair_factors(d), rng);
  }
  return isotropic_state(d, spec.p);
}

void ExperimentConfig::validate() const {
  require(d >= 2, ErrorKind::invalid_dimension, "d must be >= 2");
  require(n >= 1, ErrorKind::invalid_argument, "n must be >= 1");
  require(trials >= 1, ErrorKind::invalid_argument, "trials must be >= 1");
  require(std::isfinite(epsilon) && epsilon >= 0 && epsilon <= 1, ErrorKind::invalid_argument,
          "epsilon must lie in [0, 1]");
  require(std::isfinite(alpha) && alpha > 0 && alpha < 1, ErrorKind::invalid_argument, "alpha must lie in (0, 1)");
  state.validate();
  if (second) second->validate();
  if (protocol == Protocol::bell_pairs) {
    require(n % 2 == 0, ErrorKind::invalid_argument, "bell_pairs needs an even number of copies");
    require(d <= 3, ErrorKind::invalid_dimension, "bell_pairs needs d <= 3");
  } else {
    require(!second, ErrorKind::invalid_argument, "a second source is only used by bell_pairs");
  }
}

bool ExperimentResult::within(double k) const {
  // Floor keeps degenerate rates (0 or 1) comparable.
  const double half = std::max(ci, 1.0 / static_cast<double>(std::max<std::size_t>(trials, 1)));
  return std::abs(rate - exact) <= k * half;
}

double ci_half_width(double rate, std::size_t trials) {
  require(trials >= 1, ErrorKind::invalid_argument, "trials must be >= 1");
  return 1.96 * std::sqrt(std::max(0.0, rate * (1 - rate)) / static_cast<double>(trials));
}

std::vector<double> born_probabilities(const DensityMatrix& state, const std::vector<CMatrix>& povm) {
  require(!povm.empty(), ErrorKind::invalid_povm, "empty POVM");
  const int n = state.dim();
  CMatrix sum = CMatrix::Zero(n, n);
  for (const CMatrix& e : povm) {
    require(e.rows() == n && e.cols() == n, ErrorKind::dimension_mismatch, "POVM element size differs from state");
    sum += e;
  }
  require(max_abs_diff(sum, CMatrix::Identity(n, n)) <= 1e-9, ErrorKind::invalid_povm, "POVM is not complete");
  std::vector<double> probs;
  probs.reserve(povm.size());
  double total = 0;
  for (const CMatrix& e : povm) {
    double p = trace_product(state.matrix(), e);
    require(p >= -1e-12, ErrorKind::invalid_povm, "negative outcome probability");
    probs.push_back(std::max(p, 0.0));
    total += probs.back();
  }
  for (double& p : probs) p /= total;
  return probs;
}

int sample_povm_outcome(const DensityMatrix& state, const std::vector<CMatrix>& povm, Rng& rng) {
  return draw(born_probabilities(state, povm), rng);
}

ExperimentResult run_global(const ExperimentConfig& config) {
  config.validate();
  const DensityMatrix sigma = make_state(config.d, config.state);
  const double fail = born_probabilities(sigma, two_outcome(phi0_projector(config.d)))[1];
  const ClassicalRandomizedTest test = binomial_ump_test(config.n, config.epsilon, config.alpha);
  Counts c = run_trials(config.trials, config.seed, [&](Rng& rng, Counts& out) {
    out.accepted += bernoulli(test.accept_probability(count_failures(config.n, fail, rng)), rng);
  });
  return finish(c, config.trials, acceptance_probability(test, fidelity_defect(sigma)));
}

ExperimentResult run_bell_pairs(const ExperimentConfig& config) {
  config.validate();
  const int d = config.d, pairs = config.n / 2;
  const DensityMatrix s1 = make_state(d, config.state);
  const DensityMatrix s2 = config.second ? make_state(d, *config.second) : s1;
  const DensityMatrix joint = tensor(s1, s2);
  const TestOperator bell = bell_test(d);
  const double pair_fail = born_probabilities(joint, two_outcome(bell.matrix()))[1];
  const double boundary = std::clamp(mapped_boundary(d, config.epsilon), 0.0, 1.0);
  const ClassicalRandomizedTest test = binomial_ump_test(pairs, boundary, config.alpha);
  Counts c = run_trials(config.trials, config.seed, [&](Rng& rng, Counts& out) {
    const int k = count_failures(pairs, pair_fail, rng);
    out.pairs += pairs;
    out.pair_accepted += pairs - k;
    out.accepted += bernoulli(test.accept_probability(k), rng);
  });
  const double pair_exact = bell.accept(joint);
  ExperimentResult r = finish(c, config.trials, acceptance_probability(test, std::clamp(1 - pair_exact, 0.0, 1.0)));
  r.pair_rate = static_cast<double>(c.pair_accepted) / c.pairs;
  r.pair_ci = ci_half_width(*r.pair_rate, c.pairs);
  r.pair_exact = pair_exact;
  return r;
}

ExperimentResult run_one_way_t1(const DensityMatrix& state, std::size_t trials, std::uint64_t seed) {
  require(state.factors().size() == 2 && state.factors()[0].dim == state.factors()[1].dim,
          ErrorKind::dimension_mismatch, "one-way protocol needs a state on A(x)B with equal dimensions");
  require(trials >= 1, ErrorKind::invalid_argument, "trials must be >= 1");
  const int d = state.factors()[0].dim;
  Counts c = run_trials(trials, seed, [&](Rng& rng, Counts& out) { out.accepted += one_way_trial(state, d, rng); });
  return finish(c, trials, 1 - d * fidelity_defect(state) / (d + 1.0));
}

ExperimentResult run_repeated_t1(const ExperimentConfig& config) {
  config.validate();
  const int d = config.d;
  const DensityMatrix sigma = make_state(d, config.state);
  const double r = d / (d + 1.0);
  const ClassicalRandomizedTest test = binomial_ump_test(config.n, r * config.epsilon, config.alpha);
  Counts c = run_trials(config.trials, config.seed, [&](Rng& rng, Counts& out) {
    int k = 0;
    for (int i = 0; i < config.n; ++i) k += !one_way_trial(sigma, d, rng);
    out.accepted += bernoulli(test.accept_probability(k), rng);
  });
  return finish(c, config.trials, acceptance_probability(test, r * fidelity_defect(sigma)));
}

ExperimentResult run(const ExperimentConfig& config) {
  switch (config.protocol) {
    case Protocol::global_projective: return run_global(config);
    case Protocol::bell_pairs: return run_bell_pairs(config);
    case Protocol::one_way_t1:
      config.validate();
      return run_one_way_t1(make_state(config.d, config.state), config.trials, config.seed);
    case Protocol::repeated_t1: return run_repeated_t1(config);
  }
  throw Error(ErrorKind::invalid_argument, "unknown protocol");
}

double sweep_limit(double delta, double t_prime, double alpha, Protocol protocol, int d) {
  switch (protocol) {
    case Protocol::global_projective:
    case Protocol::bell_pairs: return beta_poisson(delta, alpha, t_prime);
    case Protocol::repeated_t1: {
      const double r = d / (d + 1.0);
      return beta_poisson(r * delta, alpha, r * t_prime);
    }
    case Protocol::one_way_t1: break;
  }
  throw Error(ErrorKind::invalid_argument, "the one-way protocol uses a single copy and has no sweep");
}

std::vector<SweepRow> asymptotic_sweep(double delta, double t_prime, double alpha, const std::vector<int>& n_list,
                                       Protocol protocol, int d, std::size_t trials, std::uint64_t seed) {
  require(std::isfinite(delta) && delta >= 0 && std::isfinite(t_prime) && t_prime >= 0, ErrorKind::invalid_argument,
          "delta and t' must be >= 0");
  const double limit = sweep_limit(delta, t_prime, alpha, protocol, d);
  std::vector<SweepRow> rows;
  rows.reserve(n_list.size());
  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    const int n = n_list[idx];
    require(n >= 1, ErrorKind::invalid_argument, "sweep sizes must be >= 1");
    require(delta <= n && t_prime <= n, ErrorKind::invalid_argument, "delta/n and t'/n must lie in [0, 1]");
    ExperimentConfig cfg;
    cfg.d = d;
    cfg.state = {"isotropic", t_prime / n, 0};
    cfg.protocol = protocol;
    cfg.n = n;
    cfg.epsilon = delta / n;
    cfg.alpha = alpha;
    cfg.trials = std::max<std::size_t>(trials, 1);
    cfg.seed = seed + idx;
    SweepRow row;
    row.n = n;
    row.limit = limit;
    const double p = t_prime / n;
    switch (protocol) {
      case Protocol::global_projective:
        row.exact = acceptance_probability(binomial_ump_test(n, cfg.epsilon, alpha), p);
        break;
      case Protocol::bell_pairs: {
        require(n % 2 == 0, ErrorKind::invalid_argument, "bell_pairs sweep needs even n");
        // Per-pair failure for two isotropic copies at defect p.
        const DensityMatrix s = isotropic_state(d, p);
        const double fail = std::clamp(1 - bell_test(d).accept(tensor(s, s)), 0.0, 1.0);
        const double boundary = std::clamp(mapped_boundary(d, cfg.epsilon), 0.0, 1.0);
        row.exact = acceptance_probability(binomial_ump_test(n / 2, boundary, alpha), fail);
        break;
      }
      case Protocol::repeated_t1: {
        const double r = d / (d + 1.0);
        row.exact = acceptance_probability(binomial_ump_test(n, r * cfg.epsilon, alpha), r * p);
        break;
      }
      case Protocol::one_way_t1: break;
    }
    if (trials > 0 && n <= kMaxSampledCopies) {
      ExperimentResult res = run(cfg);
      row.empirical = res.rate;
      row.ci = res.ci;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string bell_null_limit_note(double delta, double alpha) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "Bell-pair scheme at t' = delta: acceptance tends to 1 - alpha = %.12g; the printed limit 1 - delta "
                "would give %.12g",
                1 - alpha, 1 - delta);
  return buf;
}

}  // namespace entbench
