#include "tilewalsh/cli.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tilewalsh/decompose.hpp"
#include "tilewalsh/operators.hpp"
#include "tilewalsh/random.hpp"
#include "tilewalsh/walsh.hpp"

namespace tilewalsh {

Json config_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["levels"] = c.levels ? Json(*c.levels) : Json(nullptr);
  j["dim"] = c.dim;
  j["kind"] = c.kind;
  j["norm"] = c.norm;
  j["q"] = real_json(c.q);
  j["p"] = real_json(c.p);
  j["seed"] = c.seed;
  j["in"] = c.in;
  j["set"] = c.set;
  j["fset"] = c.fset;
  j["nfun"] = c.nfun;
  j["g"] = c.g;
  j["trees"] = c.trees;
  j["inverse"] = c.inverse;
  j["mu_e"] = real_json(c.mu_e);
  j["mu_f"] = real_json(c.mu_f);
  j["trials"] = c.trials;
  j["family_size"] = c.family_size;
  return j;
}

namespace {

std::string require_path(const std::string& path, const char* flag) {
  if (path.empty()) throw std::invalid_argument(std::string("missing required option ") + flag);
  return path;
}

void check_levels(const RunConfig& c, int levels, const std::string& what) {
  if (c.levels && *c.levels != levels)
    throw std::invalid_argument("resolution mismatch: " + what + " has levels " + std::to_string(levels) +
                                ", --levels is " + std::to_string(*c.levels));
}

Signal load_signal(const RunConfig& c, const std::string& path, const char* flag) {
  Signal f = signal_from_json(read_json_file(require_path(path, flag)));
  check_levels(c, f.levels(), path);
  return f;
}

LevelSet load_set(const std::string& path, const char* flag, int levels) {
  LevelSet s = level_set_from_json(read_json_file(require_path(path, flag)));
  if (s.levels() != levels)
    throw std::invalid_argument("resolution mismatch: " + path + " has levels " + std::to_string(s.levels()) +
                                ", the signal has " + std::to_string(levels));
  return s;
}

FrequencyChoice load_nfun(const std::string& path, int levels) {
  FrequencyChoice n = frequency_choice_from_json(read_json_file(require_path(path, "--nfun")));
  if (n.levels() != levels)
    throw std::invalid_argument("resolution mismatch: " + path + " has levels " + std::to_string(n.levels()) +
                                ", the signal has " + std::to_string(levels));
  return n;
}

void check_q(double q) {
  if (!(q >= 1.0) || std::isinf(q)) throw std::invalid_argument("--q must be a finite exponent >= 1");
}

struct Report {
  Json body;
  Json certificates = Json::array();
  Json ratios = Json::object();
  std::vector<RatioRow> rows;
  bool pass = true;
};

Report new_report(const RunConfig& c) {
  Report r;
  r.body["command"] = c.command;
  r.body["params"] = config_json(c);
  r.body["seed"] = c.seed;
  r.body["levels"] = Json::array();
  return r;
}

void add_certificates(Report& r, const std::vector<Certificate>& certs) {
  for (const auto& c : certs) r.certificates.push_back(certificate_json(c));
  if (!all_theorem_backed_pass(certs)) r.pass = false;
}

void add_ratio(Report& r, const RunConfig& c, int levels, const std::string& name, double value) {
  r.ratios[name] = real_json(value);
  r.rows.push_back({levels, c.q, c.norm, name, value});
}

CommandOutput finish(Report r) {
  r.body["certificates"] = std::move(r.certificates);
  r.body["ratios"] = std::move(r.ratios);
  r.body["theorem_backed_pass"] = r.pass;
  CommandOutput out;
  out.files[""] = dump_json(r.body);
  out.csv = ratio_csv(r.rows);
  out.exit_code = r.pass ? 0 : 1;
  return out;
}

Json level_json(const ForestLevel& level, bool with_members) {
  Json j;
  j["n"] = level.n;
  j["tree_count"] = level.trees.size();
  j["density_tree_count"] = level.density_tree_count;
  j["top_mass"] = rational_json(level.top_mass);
  j["mass_constant"] = real_json(level.mass_constant);
  Json trees = Json::array();
  for (const auto& T : level.trees) {
    if (with_members) {
      trees.push_back(tree_json(T));
    } else {
      Json t;
      t["top"] = bitile_json(T.top);
      t["member_count"] = T.members.size();
      trees.push_back(std::move(t));
    }
  }
  j["trees"] = std::move(trees);
  return j;
}

}  // namespace

CommandOutput cmd_transform(const RunConfig& c) {
  const Signal f = load_signal(c, c.in, "--in");
  CommandOutput out;
  out.files[""] = dump_json(signal_to_json(c.inverse ? inverse_fwht(f) : fwht(f)));
  return out;
}

CommandOutput cmd_carleson(const RunConfig& c) {
  const Signal f = load_signal(c, c.in, "--in");
  const FrequencyChoice nfun = load_nfun(c.nfun, f.levels());
  const Signal direct = carleson_direct(f, nfun);
  const Signal bitile = carleson_bitile(f, nfun, BitileUniverse(f.levels()));
  const bool identical = direct == bitile;
  Json j;
  j["command"] = c.command;
  j["params"] = config_json(c);
  j["seed"] = c.seed;
  j["direct"] = signal_to_json(direct);
  j["bitile"] = signal_to_json(bitile);
  j["identical"] = identical;
  CommandOutput out;
  out.files[""] = dump_json(j);
  out.exit_code = identical ? 0 : 1;
  return out;
}

CommandOutput cmd_decompose(const RunConfig& c) {
  check_q(c.q);
  const Signal f = load_signal(c, c.in, "--in");
  const LevelSet E = load_set(c.set, "--set", f.levels());
  const FrequencyChoice nfun = load_nfun(c.nfun, f.levels());
  const NormPlugin plugin = NormPlugin::parse(c.norm);
  const int L = f.levels();
  const BitileUniverse universe(L);
  const DensityField field(E, nfun);
  Report r = new_report(c);
  if (E.empty()) {
    auto dd = density_decompose(universe.items(), field, c.q);
    r.body["sparse"] = bitiles_json(dd.sparse);
    r.body["residual"] = Json::array();
    add_certificates(r, dd.certificates);
    return finish(std::move(r));
  }
  if (f.is_zero()) throw std::invalid_argument("decompose requires a nonzero f (levels undefined)");
  const PacketTable table(f);
  const LqValue f_norm = lq_norm(f, c.q, plugin);
  const auto forest = full_decompose(universe.items(), table, f_norm, field, c.q, plugin);
  double max_c = 0;
  for (const auto& level : forest.levels) {
    r.body["levels"].push_back(level_json(level, true));
    add_certificates(r, level.certificates);
    max_c = std::max(max_c, level.mass_constant);
    r.rows.push_back({L, c.q, c.norm, "mass_constant_n" + std::to_string(level.n), level.mass_constant});
  }
  r.body["n_start"] = forest.n_start;
  r.body["residual"] = bitiles_json(forest.residual);
  add_certificates(r, forest.certificates);
  add_ratio(r, c, L, "max_level_mass_constant", max_c);
  return finish(std::move(r));
}

CommandOutput cmd_certify(const RunConfig& c) {
  check_q(c.q);
  const Signal f = load_signal(c, c.in, "--in");
  const Signal g = load_signal(c, c.g, "--g");
  const LevelSet E = load_set(c.set, "--set", f.levels());
  const FrequencyChoice nfun = load_nfun(c.nfun, f.levels());
  const NormPlugin plugin = NormPlugin::parse(c.norm);
  const int L = f.levels();
  const auto rep = carleson_form_certificate(f, g, E, nfun, c.q, plugin);
  Report r = new_report(c);
  double max_c = 0;
  for (std::size_t i = 0; i < rep.forest.levels.size(); ++i) {
    Json lj = level_json(rep.forest.levels[i], false);
    lj["form_sum"] = rational_json(rep.level_sums[i]);
    r.body["levels"].push_back(std::move(lj));
    max_c = std::max(max_c, rep.forest.levels[i].mass_constant);
  }
  r.body["n_start"] = rep.forest.n_start;
  r.body["form_total"] = rational_json(rep.form_total);
  r.body["pairing"] = rational_json(rep.pairing);
  r.body["bound"] = real_json(rep.bound);
  Json tr = Json::array();
  for (double x : rep.tree_ratios) tr.push_back(real_json(x));
  r.body["tree_ratios"] = std::move(tr);
  add_certificates(r, rep.certificates);
  add_ratio(r, c, L, "form_ratio", rep.ratio);
  add_ratio(r, c, L, "max_tree_ratio", rep.max_tree_ratio);
  add_ratio(r, c, L, "max_level_mass_constant", max_c);
  return finish(std::move(r));
}

CommandOutput cmd_tiletype(const RunConfig& c) {
  check_q(c.q);
  const Signal f = load_signal(c, c.in, "--in");
  const NormPlugin plugin = NormPlugin::parse(c.norm);
  const int L = f.levels();
  Report r = new_report(c);
  std::vector<TreeFamily> families;
  if (!c.trees.empty()) {
    families.push_back(tree_family_from_json(read_json_file(c.trees), L));
  } else {
    if (c.trials < 1 || c.family_size < 1) throw std::invalid_argument("--trials and --family-size must be positive");
    for (int i = 0; i < c.trials; ++i) {
      SplitMix64 rng(c.seed + static_cast<std::uint64_t>(i));
      families.push_back(random_up_tree_family(rng, L, c.family_size));
    }
  }
  double best = 0;
  Json trials = Json::array();
  for (std::size_t i = 0; i < families.size(); ++i) {
    const auto res = tile_type_constant(families[i], f, c.q, plugin);
    auto certs = res.certificates;
    for (auto& cert : certs) cert.context.push_back({"trial", std::to_string(i)});
    add_certificates(r, certs);
    Json t;
    t["trial"] = i;
    t["ratio"] = real_json(res.ratio);
    t["family_norm"] = lq_json(res.family_norm);
    t["f_norm"] = lq_json(res.f_norm);
    Json fam = Json::array();
    for (const auto& T : families[i]) fam.push_back(tree_json(T));
    t["trees"] = std::move(fam);
    trials.push_back(std::move(t));
    best = std::max(best, res.ratio);
  }
  r.body["trials"] = std::move(trials);
  add_ratio(r, c, L, "ratio", best);
  return finish(std::move(r));
}

CommandOutput cmd_rwt(const RunConfig& c) {
  const Signal f = load_signal(c, c.in, "--in");
  const Signal g = load_signal(c, c.g, "--g");
  const LevelSet E = load_set(c.set, "--set", f.levels());
  const LevelSet F = load_set(c.fset, "--fset", f.levels());
  const FrequencyChoice nfun = load_nfun(c.nfun, f.levels());
  const NormPlugin plugin = NormPlugin::parse(c.norm);
  const int L = f.levels();
  const auto rep = restricted_weak_type(F, E, f, g, nfun, c.p, plugin);
  Report r = new_report(c);
  r.body["e_measure"] = rational_json(rep.e_measure);
  r.body["f_measure"] = rational_json(rep.f_measure);
  r.body["e_larger"] = rep.e_larger;
  r.body["e_tilde"] = level_set_to_json(rep.e_tilde);
  r.body["e_tilde_measure"] = rational_json(rep.e_tilde_measure);
  r.body["pairing"] = rational_json(rep.pairing);
  r.body["form_sum"] = rational_json(rep.form_sum);
  r.body["log_bound"] = real_json(rep.log_bound);
  r.body["lorentz_bound"] = real_json(rep.lorentz_bound);
  add_certificates(r, rep.certificates);
  add_ratio(r, c, L, "rwt_ratio", rep.ratio);
  add_ratio(r, c, L, "rwt_form_ratio", rep.form_ratio);
  add_ratio(r, c, L, "rwt_lorentz_ratio", rep.lorentz_ratio);
  return finish(std::move(r));
}

CommandOutput cmd_gen(const RunConfig& c) {
  if (!c.levels) throw std::invalid_argument("gen requires --levels");
  const int L = *c.levels;
  if (L < 1 || L > kMaxLevels) throw std::invalid_argument("--levels must lie in [1, 20]");
  if (c.dim < 1) throw std::invalid_argument("--dim must be positive");
  const ValueKind kind = parse_value_kind(c.kind);
  const NormPlugin plugin = NormPlugin::parse(c.norm);
  SplitMix64 rng(c.seed);
  const Signal f = random_signal(rng, L, c.dim, kind);
  const Signal g = random_unit_signal(rng, L, c.dim, kind, plugin.dual());
  const LevelSet E = random_level_set(rng, L, c.mu_e);
  const LevelSet F = random_level_set(rng, L, c.mu_f);
  const FrequencyChoice N = random_frequency_choice(rng, L);
  const Signal f_unit = random_unit_signal(rng, L, c.dim, kind, plugin, &F);
  const Signal g_unit = random_unit_signal(rng, L, c.dim, kind, plugin.dual(), &E);
  CommandOutput out;
  out.files["f.json"] = dump_json(signal_to_json(f));
  out.files["g.json"] = dump_json(signal_to_json(g));
  out.files["E.json"] = dump_json(level_set_to_json(E));
  out.files["F.json"] = dump_json(level_set_to_json(F));
  out.files["N.json"] = dump_json(frequency_choice_to_json(N));
  out.files["f_unit.json"] = dump_json(signal_to_json(f_unit));
  out.files["g_unit.json"] = dump_json(signal_to_json(g_unit));
  return out;
}

CommandOutput run_command(const RunConfig& c) {
  if (c.command == "transform") return cmd_transform(c);
  if (c.command == "carleson") return cmd_carleson(c);
  if (c.command == "decompose") return cmd_decompose(c);
  if (c.command == "certify") return cmd_certify(c);
  if (c.command == "tiletype") return cmd_tiletype(c);
  if (c.command == "rwt") return cmd_rwt(c);
  if (c.command == "gen") return cmd_gen(c);
  throw std::invalid_argument("unknown command: " + c.command);
}

}  // namespace tilewalsh
