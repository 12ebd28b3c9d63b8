#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "entbench/protocol_sim.hpp"

namespace entbench::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kVerificationFailed = 1, kInvalidInput = 2 };

// 12 significant digits.
std::string fmt(double x);

// Config defaults merged with a file and then key=value overrides. Dotted keys
// address nested objects (state.family=random). Values parse as JSON when
// possible, else as strings. A manifest file is accepted in place of a config.
Json default_config();
Json load_config_file(const std::string& path);
void apply_override(Json& config, const std::string& assignment);
// Objects merge key by key; other values replace.
void merge_config(Json& base, const Json& patch);
ExperimentConfig experiment_config(const Json& config);

struct RunManifest {
  std::string command;
  Json config;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::string started;
  std::string finished;
  std::vector<std::string> outputs;

  Json to_json() const;
  static RunManifest from_json(const Json& j);
};

std::string utc_timestamp();

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

struct CommandOutput {
  int code = kOk;
  // Printed to stdout.
  std::string text;
  // name -> content, written under out_dir.
  std::vector<std::pair<std::string, std::string>> files;
  // Printed to stderr.
  std::vector<std::string> notes;
};

CommandOutput cmd_exact(const Json& config);
CommandOutput cmd_simulate(const Json& config);
CommandOutput cmd_twirl_verify(const Json& config);
CommandOutput cmd_sweep(const Json& config);
CommandOutput cmd_classical(const Json& config);

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace entbench::cli
