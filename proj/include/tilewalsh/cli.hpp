#pragma once

// Command implementations behind the tilewalsh executable. Each returns the
// rendered report instead of writing it, so the commands are testable in-process.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "tilewalsh/io.hpp"

namespace tilewalsh {

struct RunConfig {
  std::string command;
  std::optional<int> levels;
  int dim = 1;
  std::string kind = "vector";
  std::string norm = "euclidean";
  double q = 2.0;
  double p = 2.0;
  std::uint64_t seed = 1;
  std::string in;
  std::string set;
  std::string fset;
  std::string nfun;
  std::string g;
  std::string trees;
  std::string out;
  std::string csv;
  bool inverse = false;
  double mu_e = 0.5;
  double mu_f = 0.25;
  int trials = 1;
  int family_size = 3;
};

Json config_json(const RunConfig& config);

struct CommandOutput {
  /// Named files; the key "" is the main output (written to --out or stdout).
  std::map<std::string, std::string> files;
  std::string csv;
  int exit_code = 0;
};

CommandOutput cmd_transform(const RunConfig& config);
CommandOutput cmd_carleson(const RunConfig& config);
CommandOutput cmd_decompose(const RunConfig& config);
CommandOutput cmd_certify(const RunConfig& config);
CommandOutput cmd_tiletype(const RunConfig& config);
CommandOutput cmd_rwt(const RunConfig& config);
/// Files f.json, g.json, E.json, F.json, N.json, f_unit.json, g_unit.json.
CommandOutput cmd_gen(const RunConfig& config);

CommandOutput run_command(const RunConfig& config);

}  // namespace tilewalsh
