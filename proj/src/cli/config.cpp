#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "entbench/cli.hpp"

namespace entbench::cli {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Json default_config() {
  return Json{{"command", ""},
              {"d", 2},
              {"n", 10},
              {"epsilon", 0.05},
              {"alpha", 0.05},
              {"state", {{"family", "isotropic"}, {"params", {{"p", 0.1}, {"seed", 0}}}}},
              {"second", nullptr},
              {"protocol", "global_projective"},
              {"trials", 100000},
              {"seed", 1},
              {"out_dir", "entbench_out"},
              {"eq", "21"},
              {"p", Json::array({0.3})},
              {"p1", Json::array({0.2})},
              {"p2", Json::array({0.3})},
              {"p3", Json::array({0.3})},
              {"q", Json::array({0.1, 0.3})},
              {"target", "eq18"},
              {"samples", 100000},
              {"delta", 1.0},
              {"t_prime", 3.0},
              {"n_list", Json::array({100, 1000, 10000})}};
}

void merge_config(Json& base, const Json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object())
      merge_config(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

namespace {

StateSpec state_spec(const Json& j) {
  require(j.is_object(), ErrorKind::invalid_argument, "state must be an object");
  StateSpec s;
  s.family = j.value("family", std::string("isotropic"));
  const Json params = j.value("params", Json::object());
  s.p = params.value("p", 0.0);
  s.seed = params.value("seed", std::uint64_t{0});
  s.validate();
  return s;
}

}  // namespace

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::invalid_argument, "cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_argument, "config '" + path + "' is not valid JSON: " + e.what());
  }
  require(j.is_object(), ErrorKind::invalid_argument, "config must be a JSON object");
  if (j.contains("version") && j.contains("config") && j["config"].is_object())
    return RunManifest::from_json(j).config;
  return j;
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos && eq > 0, ErrorKind::invalid_argument,
          "override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq), raw = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    value = raw;
  }
  Json* node = &config;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    require(!part.empty(), ErrorKind::invalid_argument, "override '" + assignment + "' has an empty key");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = Json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

ExperimentConfig experiment_config(const Json& c) {
  try {
    ExperimentConfig e;
    e.d = c.at("d").get<int>();
    e.state = state_spec(c.at("state"));
    if (c.contains("second") && !c["second"].is_null()) e.second = state_spec(c["second"]);
    e.protocol = protocol_from_string(c.at("protocol").get<std::string>());
    e.n = c.at("n").get<int>();
    e.epsilon = c.at("epsilon").get<double>();
    e.alpha = c.at("alpha").get<double>();
    const auto trials = c.at("trials").get<long long>();
    require(trials >= 1, ErrorKind::invalid_argument, "trials must be >= 1");
    e.trials = static_cast<std::size_t>(trials);
    e.seed = c.at("seed").get<std::uint64_t>();
    e.validate();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::invalid_argument, std::string("bad config value: ") + ex.what());
  }
}

Json RunManifest::to_json() const {
  return Json{{"command", command}, {"config", config},     {"seed", seed},      {"version", version},
              {"started", started}, {"finished", finished}, {"outputs", outputs}};
}

RunManifest RunManifest::from_json(const Json& j) {
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.version = j.at("version").get<std::string>();
    m.started = j.value("started", std::string());
    m.finished = j.value("finished", std::string());
    m.outputs = j.value("outputs", std::vector<std::string>{});
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::invalid_argument, std::string("bad manifest: ") + ex.what());
  }
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  require(cells.size() == columns_, ErrorKind::invalid_argument, "CSV row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

}  // namespace entbench::cli
