#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "entbench/cli.hpp"

using namespace entbench;
using namespace entbench::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "entbench");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("entbench_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(fmt(0.1) == "0.1");
  CHECK(fmt(1.0 / 3) == "0.333333333333");
  CHECK(fmt(1e-20) == "1e-20");
  CHECK(fmt(2.0) == "2");
}

TEST_CASE("config overrides") {
  Json c = default_config();
  apply_override(c, "d=3");
  apply_override(c, "state.family=random");
  apply_override(c, "p=[0.1,0.2]");
  CHECK(c["d"] == 3);
  CHECK(c["state"]["family"] == "random");
  CHECK(c["state"]["params"]["p"] == 0.1);
  CHECK(c["p"].size() == 2);
  CHECK_THROWS_AS(apply_override(c, "novalue"), Error);
  Json patch = {{"state", {{"params", {{"seed", 4}}}}}};
  merge_config(c, patch);
  CHECK(c["state"]["family"] == "random");
  CHECK(c["state"]["params"]["seed"] == 4);
  c["protocol"] = "bell_pairs";
  c["n"] = 4;
  ExperimentConfig e = experiment_config(c);
  CHECK(e.protocol == Protocol::bell_pairs);
  CHECK(e.state.family == "random");
  CHECK(e.state.seed == 4);
  c["protocol"] = "bogus";
  CHECK_THROWS_AS(experiment_config(c), Error);
}

TEST_CASE("manifest round trip") {
  RunManifest m;
  m.command = "exact";
  m.config = default_config();
  m.seed = 9;
  m.started = "2024-01-01T00:00:00Z";
  m.finished = "2024-01-01T00:00:01Z";
  m.outputs = {"a.csv"};
  RunManifest r = RunManifest::from_json(m.to_json());
  CHECK(r.to_json() == m.to_json());
  CHECK(utc_timestamp().back() == 'Z');
}

TEST_CASE("csv writer") {
  CsvWriter w({"a", "b"});
  CHECK(w.str() == "a,b\n");
  w.row({"1", "2"});
  CHECK(w.str() == "a,b\n1,2\n");
  CHECK_THROWS_AS(w.row({"1"}), Error);
}

TEST_CASE("exact command") {
  fs::path dir = scratch("exact");
  Run r = invoke({"exact", "eq=21", "p=[0.3]", "--out", dir.string()});
  CHECK(r.code == kOk);
  CHECK(r.out.find("eq21") != std::string::npos);
  CHECK(fs::exists(dir / "exact.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
  // empty grid writes only the header
  Run e = invoke({"exact", "eq=23", "p=[]", "--out", dir.string()});
  CHECK(e.code == kOk);
  CHECK(slurp(dir / "exact.csv") == "formula,parameters,value,condition\n");
  Run n = invoke({"exact", "eq=45", "p1=[0.3]", "p2=[0.3]", "p3=[0.3]", "--out", dir.string()});
  CHECK(n.code == kOk);
  CHECK(n.err.find("note:") != std::string::npos);
  CHECK(fs::exists(dir / "notes.txt"));
  fs::remove_all(dir);
}

TEST_CASE("simulate rerun from manifest is byte identical") {
  fs::path a = scratch("sim_a"), b = scratch("sim_b");
  Run r = invoke({"simulate", "state.params.p=0.2", "n=6", "--trials", "3000", "--seed", "5", "--out", a.string()});
  REQUIRE(r.code == kOk);
  Run s = invoke({"simulate", "--config", (a / "manifest.json").string(), "--out", b.string()});
  REQUIRE(s.code == kOk);
  for (const char* f : {"result.json", "trace.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  Json res = Json::parse(slurp(a / "result.json"));
  CHECK(res["within_3ci"] == true);
  CHECK(res["trials"] == 3000);
  Run t = invoke({"simulate", "state.params.p=0.2", "n=6", "--trials", "3000", "--seed", "6", "--out", b.string()});
  CHECK(slurp(a / "trace.csv") != slurp(b / "trace.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("exit codes") {
  fs::path dir = scratch("codes");
  CHECK(invoke({"simulate", "protocol=teleport", "--out", dir.string()}).code == kInvalidInput);
  CHECK(invoke({"simulate", "d=1", "--out", dir.string()}).code == kInvalidInput);
  CHECK(invoke({"frobnicate", "--out", dir.string()}).code == kInvalidInput);
  CHECK(invoke({"exact", "eq=99", "--out", dir.string()}).code == kInvalidInput);
  CHECK(invoke({"exact", "--config", (dir / "missing.json").string()}).code == kInvalidInput);
  CHECK(invoke({"twirl-verify", "target=eq18", "--samples", "10", "--out", dir.string()}).code == kVerificationFailed);
  CHECK(invoke({"twirl-verify", "target=eq18", "--samples", "20000", "--out", dir.string()}).code == kOk);
  Run c = invoke({"classical", "n=10", "epsilon=0.1", "q=[0.3]", "--out", dir.string()});
  CHECK(c.code == kOk);
  CHECK(c.out.rfind("model,n,boundary,alpha,direction,l,gamma,q,beta\n", 0) == 0);
  CHECK(invoke({"classical", "direction=sideways", "--out", dir.string()}).code == kInvalidInput);
  Run s = invoke({"sweep", "n_list=[100,2000]", "--trials", "500", "--out", dir.string()});
  CHECK(s.code == kOk);
  CHECK(slurp(dir / "sweep.csv").rfind("n,exact,empirical,ci,limit\n", 0) == 0);
  fs::remove_all(dir);
}
