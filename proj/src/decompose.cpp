#include "tilewalsh/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "tilewalsh/operators.hpp"

namespace tilewalsh {

namespace {

using Context = std::vector<std::pair<std::string, std::string>>;

// x·2^{e}, exact when e is an integer.
Quantity scale_pow2(const Rational& x, double e) {
  if (std::floor(e) == e && std::abs(e) <= 4096) return Rational(x * pow2(static_cast<int>(e)));
  return x.get_d() * std::pow(2.0, e);
}

Rational cells_measure(std::uint64_t count, int L) { return Rational(Integer(count)) * pow2(-L); }

LqValue scale_lq(const LqValue& v, int n) {
  LqValue out = v;
  out.value = std::ldexp(v.value, n);
  if (v.power) out.power = *v.power * pow2(n * static_cast<int>(v.q));
  return out;
}

std::string bitile_text(const Bitile& b) {
  return std::to_string(b.time.k) + ":" + std::to_string(b.time.pos) + ":" + std::to_string(b.m);
}

std::string q_text(double q) { return format_real(q); }

}  // namespace

// ---------------------------------------------------------------------------
// Density lemma

DensityDecomposition density_decompose(std::span<const Bitile> coll, const DensityField& field, double q) {
  DensityDecomposition out;
  const int L = field.levels();
  std::uint64_t dmass = 0;
  for (const auto& P : coll) dmass = std::max(dmass, field.sup_mass(P));
  out.density = cells_measure(dmass, L);

  std::vector<Bitile> dense;
  std::vector<Bitile> witnesses;
  for (const auto& P : coll) {
    auto w = dmass == 0 ? std::nullopt : field.witness_above(P, dmass, q);
    if (!w) {
      out.sparse.push_back(P);
    } else {
      dense.push_back(P);
      witnesses.push_back(*w);
    }
  }
  std::sort(witnesses.begin(), witnesses.end());
  witnesses.erase(std::unique(witnesses.begin(), witnesses.end()), witnesses.end());
  std::vector<Bitile> tops;
  for (const auto& W : witnesses) {
    const bool maximal = std::none_of(witnesses.begin(), witnesses.end(),
                                      [&](const Bitile& V) { return V != W && bitile_le(W, V); });
    if (maximal) tops.push_back(W);
  }
  std::vector<std::vector<Bitile>> groups(tops.size());
  for (const auto& P : dense) {
    auto it = std::find_if(tops.begin(), tops.end(), [&](const Bitile& T) { return bitile_le(P, T); });
    if (it == tops.end()) throw std::logic_error("density decomposition: bitile below no maximal witness");
    groups[static_cast<std::size_t>(it - tops.begin())].push_back(P);
  }
  for (std::size_t j = 0; j < tops.size(); ++j) {
    if (groups[j].empty()) continue;
    std::sort(groups[j].begin(), groups[j].end());
    out.trees.push_back({tops[j], std::move(groups[j])});
  }

  const Context ctx{{"q", q_text(q)}};
  const Rational sparse_density = density(out.sparse, field);
  out.certificates.push_back(
      make_certificate("density_sparse", sparse_density, scale_pow2(out.density, -q), true, ctx));

  Rational top_mass = 0;
  for (const auto& T : out.trees) top_mass += T.top.time.length();
  const Rational e_measure = field.set().measure();
  if (out.trees.empty()) {
    out.certificates.push_back(make_certificate("density_mass", top_mass, Rational(0), true, ctx));
  } else {
    out.certificates.push_back(
        make_certificate("density_mass", top_mass, scale_pow2(e_measure / out.density, q), true, ctx));
  }

  // the sets I_{T_j} ∩ E_{T_j} of the maximal witnesses are pairwise disjoint
  std::vector<std::uint8_t> covered(pow2u(L), 0);
  std::uint64_t total = 0;
  std::uint64_t uni = 0;
  for (const auto& T : tops) {
    const std::uint64_t first = T.time.first_cell(L);
    for (std::uint64_t x = first; x < first + T.time.cell_count(L); ++x)
      if (field.set().contains(x) && (field.nfun()[x] >> (T.time.k + 1)) == T.m) {
        ++total;
        if (!covered[x]) {
          covered[x] = 1;
          ++uni;
        }
      }
  }
  out.certificates.push_back(
      make_certificate("density_top_disjoint", cells_measure(total, L), cells_measure(uni, L), true, ctx));
  return out;
}

// ---------------------------------------------------------------------------
// Size lemma

SizeDecomposition size_decompose(std::span<const Bitile> coll, const PacketTable& table, const LqValue& f_norm,
                                 double q, const NormPlugin& plugin, std::optional<LqValue> sigma) {
  SizeDecomposition out;
  const bool hilbert = q == 2.0 && plugin.is_hilbert(table.components());
  std::vector<Bitile> nonzero;
  for (const auto& P : coll) {
    if (table.is_zero(P.down()))
      out.small.push_back(P);
    else
      nonzero.push_back(P);
  }
  SizeEngine engine(table, nonzero, q, plugin);
  out.sigma = sigma ? *sigma : engine.size().value;
  const auto tops = engine.tops();

  const std::size_t guard = nonzero.size() + 1;
  for (std::size_t round = 0; round < guard; ++round) {
    engine.refresh();
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < tops.size(); ++i) {
      const LqValue& d = engine.cached_delta(tops[i]);
      const bool positive = d.power ? *d.power > 0 : d.value > 0;
      if (positive && !lq_le_scaled(d, out.sigma, -1)) candidates.push_back(i);
    }
    if (candidates.empty()) break;
    std::optional<std::size_t> chosen;
    for (auto i : candidates) {
      const Bitile& T = tops[i];
      const bool maximal = std::none_of(candidates.begin(), candidates.end(),
                                        [&](std::size_t j) { return j != i && bitile_le(T, tops[j]); });
      if (!maximal) continue;
      if (!chosen || T.center() < tops[*chosen].center()) chosen = i;
    }
    const Bitile& T = tops[*chosen];
    Tree tree{T, engine.full_tree(T)};
    out.up_parts.push_back(engine.up_tree(T));
    out.deltas.push_back(engine.cached_delta(T));
    engine.remove(tree.members);
    out.trees.push_back(std::move(tree));
  }
  engine.refresh();
  if (engine.alive_count() > 0) {
    for (const auto& P : nonzero)
      if (engine.alive(P)) out.small.push_back(P);
  }
  std::sort(out.small.begin(), out.small.end());
  out.small_size = engine.size().value;

  const Context ctx{{"q", q_text(q)}, {"norm", plugin.name()}};
  const bool exact = engine.exact() && out.sigma.power.has_value() && is_small_integer(q);
  if (exact)
    out.certificates.push_back(make_certificate("size_small_half", *out.small_size.power,
                                                Rational(*out.sigma.power * pow2(-static_cast<int>(q))), true, ctx));
  else
    out.certificates.push_back(
        make_certificate("size_small_half", out.small_size.value, out.sigma.value / 2.0, true, ctx));

  // (disjForTreeType): down-tiles of distinct selected up-trees never meet
  std::uint64_t violations = 0;
  for (std::size_t i = 0; i < out.up_parts.size(); ++i)
    for (std::size_t j = i + 1; j < out.up_parts.size(); ++j)
      for (const auto& P : out.up_parts[i])
        for (const auto& P2 : out.up_parts[j])
          if (tiles_intersect(P.down(), P2.down())) ++violations;
  out.certificates.push_back(
      make_certificate("size_down_tile_disjoint", Rational(Integer(violations)), Rational(0), hilbert, ctx));

  out.top_mass = 0;
  for (const auto& T : out.trees) out.top_mass += T.top.time.length();
  if (!out.trees.empty()) {
    // Σ|I_T| <= 2^q σ^{-q} Σ_j ∫‖Σ_{T_{j,u}} ...‖^q, with ∫‖...‖^q = |I_T| Δ^q
    if (exact) {
      Rational integrals = 0;
      for (std::size_t j = 0; j < out.trees.size(); ++j)
        integrals += out.trees[j].top.time.length() * *out.deltas[j].power;
      const Rational rhs = pow2(static_cast<int>(q)) * integrals / *out.sigma.power;
      out.certificates.push_back(make_certificate("size_mass_estimate", out.top_mass, rhs, true, ctx));
      if (hilbert && f_norm.power)
        out.certificates.push_back(make_certificate("size_tile_type_hilbert", integrals, *f_norm.power, true, ctx));
    } else {
      double integrals = 0;
      for (std::size_t j = 0; j < out.trees.size(); ++j)
        integrals += out.trees[j].top.time.length().get_d() * std::pow(out.deltas[j].value, q);
      const double rhs = std::pow(2.0, q) * integrals / std::pow(out.sigma.value, q);
      out.certificates.push_back(make_certificate("size_mass_estimate", out.top_mass.get_d(), rhs, true, ctx));
      if (hilbert)
        out.certificates.push_back(
            make_certificate("size_tile_type_hilbert", integrals, std::pow(f_norm.value, q), true, ctx));
    }
  }
  const double fq = std::pow(f_norm.value, q);
  out.mass_constant = fq > 0 ? out.top_mass.get_d() * std::pow(out.sigma.value, q) / fq : 0.0;
  return out;
}

SizeDecomposition size_decompose(std::span<const Bitile> coll, const Signal& f, double q, const NormPlugin& plugin) {
  const PacketTable table(f);
  return size_decompose(coll, table, lq_norm(f, q, plugin), q, plugin);
}

// ---------------------------------------------------------------------------
// Leveled forest

namespace {

// density <= min(1, 2^{nq}|E|)
Certificate density_tag(const Rational& d, const Rational& e_measure, int n, double q) {
  Quantity bound = scale_pow2(e_measure, n * q);
  if (const auto* r = std::get_if<Rational>(&bound)) {
    if (*r > 1) bound = Rational(1);
  } else if (std::get<double>(bound) > 1.0) {
    bound = 1.0;
  }
  return make_certificate("level_density_tag", d, bound, true, {{"n", std::to_string(n)}});
}

Certificate size_tag(const LqValue& s, const LqValue& f_norm, int n) {
  if (s.power && f_norm.power && is_small_integer(s.q))
    return make_certificate("level_size_tag", *s.power, Rational(*f_norm.power * pow2(n * static_cast<int>(s.q))),
                            true, {{"n", std::to_string(n)}, {"compared", "q-th powers"}});
  return make_certificate("level_size_tag", s.value, std::ldexp(f_norm.value, n), true, {{"n", std::to_string(n)}});
}

bool tags_hold(const Rational& d, const LqValue& s, const Rational& e_measure, const LqValue& f_norm, int n,
               double q) {
  return density_tag(d, e_measure, n, q).pass && lq_le_scaled(s, f_norm, n);
}

}  // namespace

LeveledForest full_decompose(std::span<const Bitile> coll, const PacketTable& table, const LqValue& f_norm,
                             const DensityField& field, double q, const NormPlugin& plugin) {
  const Rational e_measure = field.set().measure();
  if (e_measure == 0) throw std::invalid_argument("full_decompose requires a nonempty set E");
  if (f_norm.value == 0 && (!f_norm.power || *f_norm.power == 0))
    throw std::invalid_argument("full_decompose requires a nonzero f");
  LeveledForest forest;
  if (coll.empty()) return forest;

  auto alive = [&](const Bitile& P) { return !table.is_zero(P.down()); };
  std::vector<Bitile> current(coll.begin(), coll.end());
  std::sort(current.begin(), current.end());

  const Rational d0 = density(current, field);
  LqValue s_current = size(current, table, q, plugin).value;
  // smallest n with both level tags
  int n = 0;
  {
    double est = -std::numeric_limits<double>::infinity();
    if (d0 > 0) est = std::max(est, std::ceil(std::log2(d0.get_d() / e_measure.get_d()) / q));
    if (s_current.value > 0) est = std::max(est, std::ceil(std::log2(s_current.value / f_norm.value)));
    n = std::isinf(est) ? 0 : static_cast<int>(est) - 2;
    while (!tags_hold(d0, s_current, e_measure, f_norm, n, q)) ++n;
    while (tags_hold(d0, s_current, e_measure, f_norm, n - 1, q) && n > -4096) --n;
  }
  forest.n_start = n;

  // each level either extracts a tree or lowers the size threshold; coefficients are bounded below
  for (int step = 0; step < 8192; ++step, --n) {
    if (std::none_of(current.begin(), current.end(), alive)) break;
    ForestLevel level;
    level.n = n;
    level.certificates.push_back(density_tag(density(current, field), e_measure, n, q));
    level.certificates.push_back(size_tag(s_current, f_norm, n));

    auto dd = density_decompose(current, field, q);
    auto sd = size_decompose(dd.sparse, table, f_norm, q, plugin, scale_lq(f_norm, n));
    level.density_tree_count = dd.trees.size();
    for (auto& T : dd.trees) level.trees.push_back(std::move(T));
    for (auto& T : sd.trees) level.trees.push_back(std::move(T));
    for (auto& c : dd.certificates) level.certificates.push_back(std::move(c));
    for (auto& c : sd.certificates) level.certificates.push_back(std::move(c));
    level.top_mass = 0;
    for (const auto& T : level.trees) level.top_mass += T.top.time.length();
    level.mass_constant = level.top_mass.get_d() * std::pow(2.0, n * q);
    for (auto& c : level.certificates) c.context.push_back({"level", std::to_string(n)});
    current = std::move(sd.small);
    s_current = sd.small_size;
    if (!level.trees.empty()) forest.levels.push_back(std::move(level));
  }
  forest.residual = current;

  std::uint64_t live_residual = 0;
  for (const auto& P : forest.residual)
    if (alive(P)) ++live_residual;
  forest.certificates.push_back(
      make_certificate("residual_zero_contribution", Rational(Integer(live_residual)), Rational(0), true));

  std::vector<Bitile> all(forest.residual);
  for (const auto& lvl : forest.levels)
    for (const auto& T : lvl.trees) all.insert(all.end(), T.members.begin(), T.members.end());
  std::sort(all.begin(), all.end());
  std::vector<Bitile> input(coll.begin(), coll.end());
  std::sort(input.begin(), input.end());
  const Rational mismatch = all == input ? 0 : 1;
  forest.certificates.push_back(make_certificate("forest_partition", mismatch, Rational(0), true));
  return forest;
}

// ---------------------------------------------------------------------------
// Bilinear form

namespace {

// ∫ ⟨a(x), b(x)⟩ over cells in `set` (all cells when null).
Rational integrate_pairing(const Signal& a, const Signal& b, const LevelSet* set) {
  const auto comp = static_cast<std::size_t>(a.components());
  Integer acc = 0;
  for (std::size_t x = 0; x < a.cells(); ++x) {
    if (set && !set->contains(x)) continue;
    const auto u = a.numerators_at(x);
    const auto v = b.numerators_at(x);
    for (std::size_t c = 0; c < comp; ++c) acc += u[c] * v[c];
  }
  Rational r(acc, a.denominator() * b.denominator());
  r.canonicalize();
  return r * pow2(-a.levels());
}

void check_dual_bound(const Signal& g, const NormPlugin& plugin, const char* what, std::vector<Certificate>& certs) {
  const NormPlugin dual = plugin.dual();
  double worst = 0;
  for (std::size_t x = 0; x < g.cells(); ++x)
    worst = std::max(worst, value_norm(g.numerators_at(x), g.denominator(), g.dim(), g.kind(), dual));
  certs.push_back(make_certificate(what, worst, 1.0, false));
}

// One representative per certificate name: the instance with the largest lhs - rhs.
std::vector<Certificate> worst_per_name(const std::vector<Certificate>& certs) {
  std::map<std::string, std::pair<Certificate, std::size_t>> worst;
  for (const auto& c : certs) {
    auto it = worst.find(c.name);
    if (it == worst.end()) {
      worst.emplace(c.name, std::pair{c, std::size_t{1}});
      continue;
    }
    ++it->second.second;
    const double gap = quantity_to_double(c.lhs) - quantity_to_double(c.rhs);
    const auto& cur = it->second.first;
    const double cur_gap = quantity_to_double(cur.lhs) - quantity_to_double(cur.rhs);
    if ((cur.pass && !c.pass) || (cur.pass == c.pass && gap > cur_gap)) it->second.first = c;
  }
  std::vector<Certificate> out;
  for (auto& [name, entry] : worst) {
    Certificate c = entry.first;
    c.name = "tree_lemma/" + name;
    bool all_pass = true;
    for (const auto& d : certs)
      if (d.name == name && !d.pass && d.theorem_backed) all_pass = false;
    c.pass = c.pass && all_pass;
    c.context.push_back({"instances", std::to_string(entry.second)});
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

CarlesonFormReport carleson_form_certificate(const Signal& f, const Signal& g, const LevelSet& E,
                                             const FrequencyChoice& nfun, double q, const NormPlugin& plugin) {
  if (!f.same_shape(g)) throw std::invalid_argument("f and g must have the same resolution and value shape");
  if (E.levels() != f.levels()) throw std::invalid_argument("set E resolution differs from the signal");
  if (E.empty()) throw std::invalid_argument("carleson form requires a nonempty set E");
  if (f.is_zero()) throw std::invalid_argument("carleson form requires a nonzero f");
  CarlesonFormReport out;
  const int L = f.levels();
  const BitileUniverse universe(L);
  const PacketTable table(f);
  const DensityField field(E, nfun);
  const LqValue f_norm = lq_norm(f, q, plugin);
  check_dual_bound(g, plugin, "g_dual_norm_at_most_one", out.certificates);

  out.forest = full_decompose(universe.items(), table, f_norm, field, q, plugin);

  std::map<Bitile, Rational> terms;
  out.form_total = 0;
  for (const auto& P : universe.items()) {
    Rational t = bitile_form_term(P, table, g, field);
    out.form_total += t;
    terms.emplace(P, std::move(t));
  }
  const Signal cf = carleson_bitile(table, nfun, universe);
  out.pairing = integrate_pairing(cf, g, &E);
  out.certificates.push_back(make_certificate("pairing_below_form", Rational(abs(out.pairing)), out.form_total, true));

  Rational residual = 0;
  for (const auto& P : out.forest.residual) residual += terms.at(P);
  out.certificates.push_back(make_certificate("residual_form_zero", residual, Rational(0), true));

  std::vector<Certificate> tree_certs;
  for (const auto& level : out.forest.levels) {
    Rational sum = 0;
    for (const auto& T : level.trees) {
      for (const auto& P : T.members) sum += terms.at(P);
      auto tf = tree_form_sum(T, table, g, field, q, plugin);
      out.tree_ratios.push_back(tf.ratio);
      out.max_tree_ratio = std::max(out.max_tree_ratio, tf.ratio);
      for (auto& c : tf.certificates) tree_certs.push_back(std::move(c));
    }
    out.level_sums.push_back(sum);
    for (const auto& c : level.certificates) out.certificates.push_back(c);
  }
  for (auto& c : worst_per_name(tree_certs)) out.certificates.push_back(std::move(c));
  for (const auto& c : out.forest.certificates) out.certificates.push_back(c);

  const double q_conj = q / (q - 1.0);
  out.bound = std::pow(E.measure().get_d(), 1.0 / q_conj) * f_norm.value;
  out.ratio = out.bound > 0 ? out.form_total.get_d() / out.bound : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Tile type

TileTypeResult tile_type_constant(const TreeFamily& family, const Signal& f, double q, const NormPlugin& plugin) {
  const int L = f.levels();
  for (const auto& T : family) {
    if (T.top.time.k > L || T.top.time.pos >= pow2u(T.top.time.k))
      throw std::invalid_argument("tree top " + bitile_text(T.top) + " does not fit the grid");
    for (const auto& P : T.members)
      if (!bitile_le_u(P, T.top))
        throw std::invalid_argument("member " + bitile_text(P) + " is not below top " + bitile_text(T.top) +
                                    " in the up order");
  }
  // distinct pairs (P, T) need disjoint down-tiles
  std::vector<std::pair<std::size_t, Bitile>> pairs;
  for (std::size_t t = 0; t < family.size(); ++t)
    for (const auto& P : family[t].members) pairs.push_back({t, P});
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = i + 1; j < pairs.size(); ++j)
      if (tiles_intersect(pairs[i].second.down(), pairs[j].second.down()))
        throw std::invalid_argument("down-tile disjointness violated by " + bitile_text(pairs[i].second) + " and " +
                                    bitile_text(pairs[j].second));

  TileTypeResult out;
  const PacketTable table(f);
  const bool exact = exact_power_mode(plugin, f.components(), q);
  const bool hilbert = q == 2.0 && plugin.is_hilbert(f.components());
  out.f_norm = lq_norm(f, q, plugin);
  const auto comp = static_cast<std::size_t>(f.components());
  const int R = L + 1;
  // W and W' on the 2^R grid, numerators over den(f)·2^R
  Integer den_r = f.denominator();
  mpz_mul_2exp(den_r.get_mpz_t(), den_r.get_mpz_t(), static_cast<mp_bitcnt_t>(R));

  Rational total_exact = 0;
  double total_float = 0;
  std::uint64_t pointwise_failures = 0;
  for (std::size_t t = 0; t < family.size(); ++t) {
    const Tree& T = family[t];
    const auto w = packet_sum(T.members, table);  // over den·2^L
    const WavePacket tu = wave_packet(T.top.up(), R, PacketNorm::Linf);
    std::vector<Integer> wr(pow2u(R) * comp), wp(pow2u(R) * comp, Integer(0));
    for (std::uint64_t x = 0; x < pow2u(R); ++x)
      for (std::size_t c = 0; c < comp; ++c) mpz_mul_2exp(wr[x * comp + c].get_mpz_t(), w[(x >> 1) * comp + c].get_mpz_t(), 1);
    // Σ_P ⟨f·w^∞_{T_u}, h_{I_P}⟩ h_{I_P}
    std::vector<Integer> coeff(comp);
    for (const auto& P : T.members) {
      if (P.time.k >= R) continue;
      const WavePacket h = haar_packet(P.time, R, PacketNorm::Linf);
      std::fill(coeff.begin(), coeff.end(), Integer(0));
      const std::uint64_t first = P.time.first_cell(R);
      const std::uint64_t len = P.time.cell_count(R);
      for (std::uint64_t x = first; x < first + len; ++x) {
        const auto v = f.numerators_at(x >> 1);
        const int s = tu.pattern[x] * h.pattern[x];
        for (std::size_t c = 0; c < comp; ++c) {
          if (s > 0)
            coeff[c] += v[c];
          else
            coeff[c] -= v[c];
        }
      }
      // 2^{k}·(2^{-R} Σ)·h^∞ has numerator 2^k·Σ over den·2^R
      for (auto& c : coeff) mpz_mul_2exp(c.get_mpz_t(), c.get_mpz_t(), static_cast<mp_bitcnt_t>(P.time.k));
      for (std::uint64_t x = first; x < first + len; ++x)
        for (std::size_t c = 0; c < comp; ++c) {
          if (h.pattern[x] > 0)
            wp[x * comp + c] += coeff[c];
          else
            wp[x * comp + c] -= coeff[c];
        }
    }
    // W_T f = w^∞_{T_u} · W'_T f pointwise
    for (std::uint64_t x = 0; x < pow2u(R); ++x)
      for (std::size_t c = 0; c < comp; ++c) {
        const Integer expect = tu.pattern[x] > 0 ? wp[x * comp + c] : Integer(-wp[x * comp + c]);
        if (wr[x * comp + c] != expect) {
          ++pointwise_failures;
          break;
        }
      }
    const Context ctx{{"tree", std::to_string(t)}};
    if (exact) {
      Integer a = 0, b = 0;
      for (std::uint64_t x = 0; x < pow2u(R); ++x) {
        a += *exact_norm_power(std::span<const Integer>(wr.data() + x * comp, comp), f.dim(), f.kind(), plugin, q);
        b += *exact_norm_power(std::span<const Integer>(wp.data() + x * comp, comp), f.dim(), f.kind(), plugin, q);
      }
      Integer denq;
      mpz_pow_ui(denq.get_mpz_t(), den_r.get_mpz_t(), static_cast<unsigned long>(q));
      Rational na(a, denq), nb(b, denq);
      na.canonicalize();
      nb.canonicalize();
      na *= pow2(-R);
      nb *= pow2(-R);
      out.certificates.push_back(make_certificate("haar_form_norm_equality", Rational(abs(na - nb)), Rational(0), true, ctx));
      out.tree_norms.push_back(na);
      total_exact += na;
    } else {
      double a = 0, b = 0;
      for (std::uint64_t x = 0; x < pow2u(R); ++x) {
        a += std::pow(value_norm(std::span<const Integer>(wr.data() + x * comp, comp), den_r, f.dim(), f.kind(), plugin), q);
        b += std::pow(value_norm(std::span<const Integer>(wp.data() + x * comp, comp), den_r, f.dim(), f.kind(), plugin), q);
      }
      a = std::ldexp(a, -R);
      b = std::ldexp(b, -R);
      out.certificates.push_back(make_certificate("haar_form_norm_equality", std::abs(a - b), 0.0, true, ctx));
      out.tree_norms.push_back(a);
      total_float += a;
    }
  }
  out.certificates.push_back(
      make_certificate("tree_identity_pointwise", Rational(Integer(pointwise_failures)), Rational(0), true));
  out.family_norm = exact ? LqValue::from_power(total_exact, q) : LqValue::from_value(std::pow(total_float, 1.0 / q), q);
  out.ratio = out.f_norm.value > 0 ? out.family_norm.value / out.f_norm.value : 0.0;
  if (hilbert) {
    if (exact && out.f_norm.power)
      out.certificates.push_back(make_certificate("hilbert_tile_type", total_exact, *out.f_norm.power, true));
    else
      out.certificates.push_back(
          make_certificate("hilbert_tile_type", out.family_norm.value, out.f_norm.value, true));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Restricted weak type

namespace {

LevelSet exceptional_set(const LevelSet& E, const LevelSet& F) {
  const auto ind = F.indicator();
  const auto mf = dyadic_maximal<Rational>(ind, F.levels());
  const Rational threshold = Rational(2) * F.measure() / E.measure();
  LevelSet G(F.levels());
  for (std::size_t x = 0; x < mf.size(); ++x)
    if (mf[x] > threshold) G.insert(x);
  return G;
}

void check_support(const Signal& s, const LevelSet& set, const NormPlugin& plugin, const char* what) {
  for (std::size_t x = 0; x < s.cells(); ++x) {
    const auto v = s.numerators_at(x);
    const bool zero = std::all_of(v.begin(), v.end(), [](const Integer& n) { return n == 0; });
    if (!set.contains(x) && !zero) throw std::invalid_argument(std::string(what) + " is not supported on its set");
    if (value_norm(v, s.denominator(), s.dim(), s.kind(), plugin) > 1.0 + 1e-12)
      throw std::invalid_argument(std::string(what) + " exceeds pointwise norm 1");
  }
}

}  // namespace

LevelSet major_subset(const LevelSet& E, const LevelSet& F) {
  if (E.levels() != F.levels()) throw std::invalid_argument("E and F resolutions differ");
  if (E.empty()) throw std::invalid_argument("major subset of an empty set");
  if (E.measure() <= F.measure()) return E;
  return E.minus(exceptional_set(E, F));
}

RestrictedWeakTypeReport restricted_weak_type(const LevelSet& F, const LevelSet& E, const Signal& f, const Signal& g,
                                              const FrequencyChoice& nfun, double p, const NormPlugin& plugin) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("exponent p must lie in (1, inf)");
  if (E.empty() || F.empty()) throw std::invalid_argument("restricted weak type needs nonempty E and F");
  if (!f.same_shape(g)) throw std::invalid_argument("f and g must have the same resolution and value shape");
  if (E.levels() != f.levels() || F.levels() != f.levels() || nfun.levels() != f.levels())
    throw std::invalid_argument("E, F, N and the signals must share one resolution");
  check_support(f, F, plugin, "f");
  check_support(g, E, plugin.dual(), "g");

  RestrictedWeakTypeReport out;
  const int L = f.levels();
  out.e_measure = E.measure();
  out.f_measure = F.measure();
  out.e_larger = out.e_measure > out.f_measure;
  LevelSet G(L);
  if (out.e_larger) {
    G = exceptional_set(E, F);
    out.e_tilde = E.minus(G);
  } else {
    out.e_tilde = E;
  }
  out.e_tilde_measure = out.e_tilde.measure();
  if (out.e_larger)
    out.certificates.push_back(make_certificate("major_subset", Rational(out.e_measure / 2), out.e_tilde_measure, true));

  std::vector<std::int8_t> mask(f.cells());
  for (std::size_t x = 0; x < f.cells(); ++x) mask[x] = out.e_tilde.contains(x) ? 1 : 0;
  const Signal g_tilde = g.times_pattern(mask);

  const BitileUniverse universe(L);
  const PacketTable table(f);
  const DensityField field(out.e_tilde, nfun);
  const Signal cf = carleson_bitile(table, nfun, universe);
  out.pairing = integrate_pairing(cf, g_tilde, nullptr);
  out.form_sum = 0;
  Rational inside_g = 0;
  for (const auto& P : universe.items()) {
    const Rational t = bitile_form_term(P, table, g_tilde, field);
    out.form_sum += t;
    bool inside = true;
    for (std::uint64_t x = P.time.first_cell(L); x < P.time.first_cell(L) + P.time.cell_count(L) && inside; ++x)
      inside = G.contains(x);
    if (inside) inside_g += t;
  }
  if (out.e_larger)
    out.certificates.push_back(make_certificate("exceptional_tiles_vanish", inside_g, Rational(0), true));
  out.certificates.push_back(make_certificate("pairing_below_form", Rational(abs(out.pairing)), out.form_sum, true));

  const double e = out.e_measure.get_d();
  const double fm = out.f_measure.get_d();
  out.log_bound = out.e_larger ? fm * (1.0 + std::log(e / fm)) : e * (1.0 + std::log(fm / e));
  out.lorentz_bound = std::pow(fm, 1.0 / p) * std::pow(e, 1.0 - 1.0 / p);
  const double pr = std::abs(out.pairing.get_d());
  out.ratio = pr / out.log_bound;
  out.form_ratio = out.form_sum.get_d() / out.log_bound;
  out.lorentz_ratio = pr / out.lorentz_bound;
  return out;
}

}  // namespace tilewalsh
