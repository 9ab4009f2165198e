// tilewalsh: discrete Walsh time-frequency analysis from the command line.

#include <filesystem>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "tilewalsh/cli.hpp"

namespace {

void add_common_options(CLI::App* sub, tilewalsh::RunConfig& c) {
  sub->add_option("--levels", c.levels, "grid resolution L (checked against input files)");
  sub->add_option("--dim", c.dim, "value dimension d");
  sub->add_option("--kind", c.kind, "vector or matrix");
  sub->add_option("--norm", c.norm, "euclidean, lp:<p> or schatten:<p>");
  sub->add_option("--q", c.q, "tile-type / size exponent q");
  sub->add_option("--p", c.p, "Lebesgue exponent p");
  sub->add_option("--seed", c.seed, "generator seed");
  sub->add_option("--in", c.in, "signal file");
  sub->add_option("--set", c.set, "level set E");
  sub->add_option("--fset", c.fset, "level set F");
  sub->add_option("--nfun", c.nfun, "frequency choice N");
  sub->add_option("--g", c.g, "dual test signal g");
  sub->add_option("--trees", c.trees, "tree family file");
  sub->add_option("--out", c.out, "output file (gen: output directory)");
  sub->add_option("--csv", c.csv, "ratio table path (default: --out with .csv)");
  sub->add_flag("--inverse", c.inverse, "transform: apply the inverse transform");
  sub->add_option("--mu-e", c.mu_e, "gen: measure of E");
  sub->add_option("--mu-f", c.mu_f, "gen: measure of F");
  sub->add_option("--trials", c.trials, "tiletype: number of seeded random families");
  sub->add_option("--family-size", c.family_size, "tiletype: trees per random family");
}

void emit(const tilewalsh::RunConfig& c, const tilewalsh::CommandOutput& out) {
  namespace fs = std::filesystem;
  if (c.command == "gen") {
    const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
    for (const auto& [name, text] : out.files) tilewalsh::write_text_file(dir / name, text);
    return;
  }
  const std::string& main = out.files.at("");
  if (c.out.empty()) {
    std::cout << main;
  } else {
    tilewalsh::write_text_file(c.out, main);
  }
  if (out.csv.empty()) return;
  fs::path csv = c.csv;
  if (csv.empty() && !c.out.empty()) csv = fs::path(c.out).replace_extension(".csv");
  if (!csv.empty()) tilewalsh::write_text_file(csv, out.csv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Walsh time-frequency analysis: transforms, Carleson operator, tree decompositions"};
  app.require_subcommand(1);
  tilewalsh::RunConfig config;
  const std::pair<const char*, const char*> commands[] = {
      {"transform", "Walsh coefficients of a signal (or the inverse)"},
      {"carleson", "Carleson operator by the direct and bitile formulas"},
      {"decompose", "leveled density/size tree decomposition with certificates"},
      {"certify", "bilinear-form certificate and tree-lemma ratios"},
      {"tiletype", "tile-type ratio for tree families"},
      {"rwt", "restricted weak-type experiment"},
      {"gen", "seeded random instance files"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common_options(sub, config);
    sub->callback([&config, n = std::string(name)] { config.command = n; });
  }
  CLI11_PARSE(app, argc, argv);
  try {
    const auto out = tilewalsh::run_command(config);
    emit(config, out);
    return out.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "tilewalsh " << config.command << ": error: " << e.what() << "\n";
    return 2;
  }
}
