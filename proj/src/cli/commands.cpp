#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "entbench/classical_tests.hpp"
#include "entbench/cli.hpp"
#include "entbench/group_actions.hpp"
#include "entbench/multisource.hpp"
#include "entbench/quantum_tests.hpp"
#include "entbench/qubit_pair.hpp"

namespace entbench::cli {

namespace {

// Largest entrywise stderr for which a twirl comparison is meaningful.
constexpr double kInconclusiveStderr = 0.02;

template <class T>
T get(const Json& c, const char* key) {
  require(c.contains(key), ErrorKind::invalid_argument, std::string("missing config key '") + key + "'");
  try {
    return c.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("bad value for '") + key + "': " + e.what());
  }
}

// Accepts a scalar or an array.
template <class T>
std::vector<T> get_list(const Json& c, const char* key) {
  require(c.contains(key), ErrorKind::invalid_argument, std::string("missing config key '") + key + "'");
  const Json& v = c.at(key);
  if (!v.is_array()) return {get<T>(c, key)};
  try {
    return v.get<std::vector<T>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("bad list for '") + key + "': " + e.what());
  }
}

std::string eq_id(const Json& c) {
  const Json& v = c.at("eq");
  if (v.is_number_integer()) return std::to_string(v.get<int>());
  require(v.is_string(), ErrorKind::invalid_argument, "eq must be a string or integer");
  return v.get<std::string>();
}

std::string params(std::initializer_list<std::pair<const char*, std::string>> kv) {
  std::string s;
  for (const auto& [k, v] : kv) {
    if (!s.empty()) s += ';';
    s += k;
    s += '=';
    s += v;
  }
  return s;
}

const char* flag(bool b) { return b ? "true" : "false"; }

// Rounded to the printed precision so JSON output carries 12 digits.
double rounded(double x) { return std::stod(fmt(x)); }

DensityMatrix config_state(const Json& c, int d) {
  StateSpec s;
  const Json& st = c.at("state");
  s.family = st.value("family", std::string("isotropic"));
  const Json p = st.value("params", Json::object());
  s.p = p.value("p", 0.0);
  s.seed = p.value("seed", std::uint64_t{0});
  return make_state(d, s);
}

}  // namespace

CommandOutput cmd_exact(const Json& c) {
  const std::string eq = eq_id(c);
  CsvWriter csv({"formula", "parameters", "value", "condition"});
  CommandOutput out;
  const int d = get<int>(c, "d");
  auto ps = [&](const char* k) { return get_list<double>(c, k); };
  if (eq == "5") {
    const int n = get<int>(c, "n");
    const double e = get<double>(c, "epsilon"), a = get<double>(c, "alpha");
    for (double p : ps("p"))
      csv.row({"eq5", params({{"n", std::to_string(n)}, {"epsilon", fmt(e)}, {"alpha", fmt(a)}, {"p", fmt(p)}}),
               fmt(beta_binomial(n, e, a, p)), flag(p > e)});
  } else if (eq == "21") {
    const double e = get<double>(c, "epsilon"), a = get<double>(c, "alpha");
    for (double p : ps("p"))
      csv.row({"eq21", params({{"d", std::to_string(d)}, {"epsilon", fmt(e)}, {"alpha", fmt(a)}, {"p", fmt(p)}}),
               fmt(beta_t1_formula(d, e, a, p)), flag(d * e / (d + 1.0) <= a)});
  } else if (eq == "23") {
    for (double p : ps("p"))
      csv.row({"eq23", params({{"d", std::to_string(d)}, {"p", fmt(p)}}), fmt(beta_t2_formula(d, p)), "true"});
  } else if (eq == "27") {
    const int n = get<int>(c, "n");
    const double e = get<double>(c, "epsilon"), a = get<double>(c, "alpha");
    for (double p : ps("p")) {
      BoundedValue v = beta_2n_bound(d, n, e, a, p);
      csv.row({"eq27",
               params({{"d", std::to_string(d)}, {"n", std::to_string(n)}, {"epsilon", fmt(e)}, {"alpha", fmt(a)},
                       {"p", fmt(p)}}),
               fmt(v.value), flag(v.in_range)});
    }
  } else if (eq == "28") {
    const int n = get<int>(c, "n");
    for (double p : ps("p"))
      csv.row({"eq28", params({{"d", std::to_string(d)}, {"n", std::to_string(n)}, {"p", fmt(p)}}),
               fmt(pooled_t1_formula(d, n, p)), "true"});
  } else if (eq == "38" || eq == "40") {
    require(d == 2, ErrorKind::invalid_dimension, "two-sample qubit formulas need d = 2");
    const DensityMatrix s = config_state(c, d);
    const std::string par = params({{"family", c["state"].value("family", std::string("isotropic"))},
                                    {"p", fmt(fidelity_defect(s))}});
    if (eq == "38") {
      FlaggedValue v = beta_opt_2sample(s);
      csv.row({"eq38", par, fmt(v.value), flag(v.condition)});
    } else {
      csv.row({"eq40", par, fmt(beta_1to2(s)), "true"});
    }
  } else if (eq == "41" || eq == "42") {
    for (double p1 : ps("p1"))
      for (double p2 : ps("p2")) {
        const std::string par = params({{"d", std::to_string(d)}, {"p1", fmt(p1)}, {"p2", fmt(p2)}});
        if (eq == "41") {
          FlaggedValue v = beta_two_source(d, p1, p2);
          csv.row({"eq41", par, fmt(v.value), flag(v.condition)});
        } else {
          csv.row({"eq42", par, fmt(beta_two_source_local(d, p1, p2)), "true"});
        }
      }
  } else if (eq == "45") {
    for (double p1 : ps("p1"))
      for (double p2 : ps("p2"))
        for (double p3 : ps("p3")) {
          FlaggedValue v = beta_three_source(d, p1, p2, p3);
          csv.row({"eq45", params({{"d", std::to_string(d)}, {"p1", fmt(p1)}, {"p2", fmt(p2)}, {"p3", fmt(p3)}}),
                   fmt(v.value), flag(v.condition)});
        }
    out.notes.push_back(three_source_discrepancy_note(d));
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown formula id '" + eq + "'");
  }
  out.text = csv.str();
  out.files.emplace_back("exact.csv", csv.str());
  return out;
}

CommandOutput cmd_simulate(const Json& c) {
  const ExperimentConfig e = experiment_config(c);
  const ExperimentResult r = run(e);
  Json cfg = c;
  cfg.erase("out_dir");
  Json res{{"protocol", to_string(e.protocol)},
           {"config", cfg},
           {"rate", rounded(r.rate)},
           {"ci", rounded(r.ci)},
           {"exact", rounded(r.exact)},
           {"trials", r.trials},
           {"accepted", r.accepted},
           {"rejected", r.rejected},
           {"within_3ci", r.within(3.0)}};
  if (r.pair_rate) {
    res["pair_rate"] = rounded(*r.pair_rate);
    res["pair_ci"] = rounded(*r.pair_ci);
    res["pair_exact"] = rounded(*r.pair_exact);
  }
  if (e.protocol == Protocol::bell_pairs) res["note"] = bell_null_limit_note(e.epsilon * e.n, e.alpha);
  CsvWriter trace({"chunk", "trials", "accepted", "cumulative_rate"});
  std::size_t done = 0, acc = 0;
  for (std::size_t i = 0; i < r.chunk_accepted.size(); ++i) {
    done = std::min(done + kTrialChunk, r.trials);
    acc += r.chunk_accepted[i];
    trace.row({std::to_string(i), std::to_string(done), std::to_string(acc),
               fmt(static_cast<double>(acc) / static_cast<double>(done))});
  }
  CommandOutput out;
  out.text = res.dump(2) + "\n";
  out.files.emplace_back("result.json", out.text);
  out.files.emplace_back("trace.csv", trace.str());
  return out;
}

CommandOutput cmd_twirl_verify(const Json& c) {
  const std::string target = get<std::string>(c, "target");
  const int d = get<int>(c, "d");
  const auto samples = get<long long>(c, "samples");
  require(samples >= 2, ErrorKind::invalid_argument, "samples must be >= 2");
  const auto seed = get<std::uint64_t>(c, "seed");
  const auto n = static_cast<std::size_t>(samples);
  TwirlEstimate est;
  CMatrix expected;
  if (target == "eq18") {
    Ket v(basis_ket(d * d, 0).amplitudes(), pair_factors(d));
    est = mc_twirl(v, d, GroupAction{GroupKind::sud, d, 1, false}, n, seed);
    expected = t1_inv(d).matrix();
  } else if (target == "eq22") {
    require(d <= 3, ErrorKind::invalid_dimension, "eq22 needs d <= 3");
    const CVector u = max_entangled_ket(d).amplitudes();
    Ket ua(u, {{"A1", d}, {"A2", d}}), ub(u.conjugate(), {{"B1", d}, {"B2", d}});
    Ket v = permute_systems(tensor(ua, ub), group_to_pair_major(2));
    est = mc_twirl(v, double(d) * d, GroupAction{GroupKind::sud, d, 2, true}, n, seed);
    expected = t2_inv(d).matrix();
  } else if (target == "eq44") {
    est = mc_twirl(ghz_seed(d), double(d) * d * d, GroupAction{GroupKind::sud, d, 3, true}, n, seed);
    expected = t3_inv(d).matrix();
  } else if (target == "app_o_weights") {
    require(d == 2, ErrorKind::invalid_dimension, "app_o_weights needs d = 2");
    const Ket u = u_op();
    Ket ua(u.amplitudes(), {{"A1", 2}, {"A2", 2}}), ub(u.amplitudes().conjugate(), {{"B1", 2}, {"B2", 2}});
    Ket v = permute_systems(tensor(ua, ub), group_to_pair_major(2));
    est = mc_twirl(v, 4.0, GroupAction{GroupKind::sud, 2, 2, false}, n, seed);
    expected = effective_operator(kUopWeights).matrix();
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown twirl target '" + target + "'");
  }
  const double se = est.max_stderr();
  const bool inconclusive = se > kInconclusiveStderr;
  const bool pass = !inconclusive && est.consistent_with(expected, 5.0);
  CsvWriter csv({"target", "d", "samples", "max_deviation", "max_stderr", "max_z", "status"});
  csv.row({target, std::to_string(d), std::to_string(n), fmt(est.max_deviation(expected)), fmt(se),
           fmt(est.max_z(expected)), inconclusive ? "inconclusive" : (pass ? "pass" : "fail")});
  CommandOutput out;
  out.code = pass ? kOk : kVerificationFailed;
  out.text = csv.str();
  out.files.emplace_back("twirl.csv", csv.str());
  return out;
}

CommandOutput cmd_sweep(const Json& c) {
  const Protocol protocol = protocol_from_string(get<std::string>(c, "protocol"));
  const auto trials = get<long long>(c, "trials");
  require(trials >= 0, ErrorKind::invalid_argument, "trials must be >= 0");
  const auto rows =
      asymptotic_sweep(get<double>(c, "delta"), get<double>(c, "t_prime"), get<double>(c, "alpha"),
                       get_list<int>(c, "n_list"), protocol, get<int>(c, "d"), static_cast<std::size_t>(trials),
                       get<std::uint64_t>(c, "seed"));
  CsvWriter csv({"n", "exact", "empirical", "ci", "limit"});
  for (const SweepRow& r : rows)
    csv.row({std::to_string(r.n), fmt(r.exact), r.empirical ? fmt(*r.empirical) : "", r.ci ? fmt(*r.ci) : "",
             fmt(r.limit)});
  CommandOutput out;
  out.text = csv.str();
  out.files.emplace_back("sweep.csv", csv.str());
  return out;
}

CommandOutput cmd_classical(const Json& c) {
  const int n = get<int>(c, "n");
  const double e = get<double>(c, "epsilon"), a = get<double>(c, "alpha");
  const std::string dir = c.value("direction", std::string("le"));
  require(dir == "le" || dir == "ge", ErrorKind::invalid_argument, "direction must be le or ge");
  const bool poisson = c.value("model", std::string("binomial")) == "poisson";
  CsvWriter csv({"model", "n", "boundary", "alpha", "direction", "l", "gamma", "q", "beta"});
  if (poisson) {
    require(dir == "le", ErrorKind::unsupported, "the Poisson test uses the <= null only");
    const double delta = get<double>(c, "delta");
    const ClassicalRandomizedTest t = poisson_ump_test(delta, a);
    for (double q : get_list<double>(c, "q"))
      csv.row({"poisson", "", fmt(delta), fmt(a), dir, std::to_string(t.l), fmt(t.gamma), fmt(q),
               fmt(poisson_acceptance_probability(t, q))});
  } else {
    const ClassicalRandomizedTest t = dir == "le" ? binomial_ump_test(n, e, a) : binomial_ump_test_ge(n, e, a);
    for (double q : get_list<double>(c, "q"))
      csv.row({"binomial", std::to_string(n), fmt(e), fmt(a), dir, std::to_string(t.l), fmt(t.gamma), fmt(q),
               fmt(acceptance_probability(t, q))});
  }
  CommandOutput out;
  out.text = csv.str();
  out.files.emplace_back("classical.csv", csv.str());
  return out;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement verification test bench", "entbench"};
  std::string command, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials, samples;
  app.add_option("command", command, "exact | simulate | twirl-verify | sweep | classical")->required();
  app.add_option("--config", config_path, "JSON config or manifest");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--trials", trials, "trial count");
  app.add_option("--samples", samples, "Monte-Carlo samples");
  app.allow_extras();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidInput;
  }

  const std::string started = utc_timestamp();
  CommandOutput result;
  Json config = default_config();
  try {
    if (!config_path.empty()) merge_config(config, load_config_file(config_path));
    for (const std::string& kv : app.remaining()) apply_override(config, kv);
    if (seed) config["seed"] = *seed;
    if (!out_dir.empty()) config["out_dir"] = out_dir;
    if (trials) config["trials"] = *trials;
    if (samples) config["samples"] = *samples;
    config["command"] = command;
    if (command == "exact")
      result = cmd_exact(config);
    else if (command == "simulate")
      result = cmd_simulate(config);
    else if (command == "twirl-verify")
      result = cmd_twirl_verify(config);
    else if (command == "sweep")
      result = cmd_sweep(config);
    else if (command == "classical")
      result = cmd_classical(config);
    else
      throw Error(ErrorKind::invalid_argument, "unknown command '" + command + "'");
  } catch (const Error& e) {
    err << "entbench: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    err << "entbench: bad config: " << e.what() << "\n";
    return kInvalidInput;
  }

  out << result.text;
  for (const std::string& note : result.notes) err << "note: " << note << "\n";

  namespace fs = std::filesystem;
  RunManifest manifest;
  manifest.command = command;
  manifest.config = config;
  manifest.seed = config.value("seed", std::uint64_t{0});
  manifest.started = started;
  try {
    const fs::path dir = config.value("out_dir", std::string("entbench_out"));
    fs::create_directories(dir);
    for (const auto& [name, content] : result.files) {
      std::ofstream f(dir / name, std::ios::binary);
      f << content;
      require(static_cast<bool>(f), ErrorKind::invalid_argument, "cannot write " + (dir / name).string());
      manifest.outputs.push_back((dir / name).string());
    }
    if (!result.notes.empty()) {
      std::ofstream f(dir / "notes.txt", std::ios::binary);
      for (const std::string& note : result.notes) f << note << "\n";
      manifest.outputs.push_back((dir / "notes.txt").string());
    }
    manifest.finished = utc_timestamp();
    std::ofstream m(dir / "manifest.json", std::ios::binary);
    m << manifest.to_json().dump(2) << "\n";
  } catch (const std::exception& e) {
    err << "entbench: " << e.what() << "\n";
    return kInvalidInput;
  }
  return result.code;
}

}  // namespace entbench::cli
