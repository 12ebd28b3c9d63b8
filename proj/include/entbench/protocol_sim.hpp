#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entbench/qstate.hpp"

// Monte-Carlo runs of the measurement protocols. Sampling only uses the Born
// rule on explicit operators; closed forms are attached for reporting.

namespace entbench {

enum class Protocol { global_projective, bell_pairs, one_way_t1, repeated_t1 };
const char* to_string(Protocol p);
Protocol protocol_from_string(const std::string& name);

// Only the isotropic family is used for sweeps; "max_entangled" is isotropic
// with p = 0 and "random" draws a density matrix from `seed`.
struct StateSpec {
  std::string family = "isotropic";
  double p = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

DensityMatrix make_state(int d, const StateSpec& spec);

struct ExperimentConfig {
  int d = 2;
  StateSpec state;
  // Second source for bell_pairs; copies alternate between the two.
  std::optional<StateSpec> second;
  Protocol protocol = Protocol::global_projective;
  int n = 1;
  double epsilon = 0.0;
  double alpha = 0.05;
  std::size_t trials = 100000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct ExperimentResult {
  double rate = 0.0;
  double ci = 0.0;  // 1.96 sqrt(r (1 - r) / trials)
  double exact = 0.0;
  std::size_t trials = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  // bell_pairs only: per-pair acceptance of the coarse-grained Bell test.
  std::optional<double> pair_rate;
  std::optional<double> pair_ci;
  std::optional<double> pair_exact;
  // Accepted trials per RNG chunk, in chunk order.
  std::vector<std::size_t> chunk_accepted;

  bool within(double k = 3.0) const;
};

// Trials per RNG stream; results depend only on (seed, trials).
inline constexpr std::size_t kTrialChunk = 1024;

double ci_half_width(double rate, std::size_t trials);

// Born probabilities Tr(state E_i), clamped at -1e-12 and renormalized.
std::vector<double> born_probabilities(const DensityMatrix& state, const std::vector<CMatrix>& povm);
int sample_povm_outcome(const DensityMatrix& state, const std::vector<CMatrix>& povm, Rng& rng);

ExperimentResult run_global(const ExperimentConfig& config);
ExperimentResult run_bell_pairs(const ExperimentConfig& config);
ExperimentResult run_one_way_t1(const DensityMatrix& state, std::size_t trials, std::uint64_t seed);
ExperimentResult run_repeated_t1(const ExperimentConfig& config);
ExperimentResult run(const ExperimentConfig& config);

struct SweepRow {
  int n = 0;
  double exact = 0.0;
  std::optional<double> empirical;
  std::optional<double> ci;
  double limit = 0.0;
};

inline constexpr int kMaxSampledCopies = 1000;

// sigma_n = isotropic(d, t'/n), epsilon = delta/n. Sampling runs only for
// n <= kMaxSampledCopies and trials > 0.
std::vector<SweepRow> asymptotic_sweep(double delta, double t_prime, double alpha, const std::vector<int>& n_list,
                                       Protocol protocol, int d, std::size_t trials, std::uint64_t seed);
double sweep_limit(double delta, double t_prime, double alpha, Protocol protocol, int d);

// The Bell-pair scheme at the null boundary t' = delta tends to 1 - alpha; the
// printed limit reads 1 - delta.
std::string bell_null_limit_note(double delta, double alpha);

}  // namespace entbench
