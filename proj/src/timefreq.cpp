#include "tilewalsh/timefreq.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "tilewalsh/parallel.hpp"

namespace tilewalsh {

bool Tree::valid() const {
  return std::all_of(members.begin(), members.end(), [&](const Bitile& P) { return bitile_le(P, top); });
}

std::vector<Bitile> Tree::up_part() const {
  std::vector<Bitile> out;
  for (const auto& P : members)
    if (bitile_le_u(P, top)) out.push_back(P);
  return out;
}

std::vector<Bitile> Tree::lemma_down() const {
  std::vector<Bitile> out;
  for (const auto& P : members)
    if (bitile_le_d(P, top)) out.push_back(P);
  return out;
}

std::vector<Bitile> Tree::lemma_up() const {
  std::vector<Bitile> out;
  for (const auto& P : members)
    if (!bitile_le_d(P, top)) out.push_back(P);
  return out;
}

std::vector<Bitile> up_ancestors(const Bitile& P) {
  std::vector<Bitile> out;
  const std::uint64_t nP = 2 * P.m + 1;
  for (int d = 0; d <= P.time.k; ++d) {
    const DyadicInterval I = P.time.ancestor(P.time.k - d);
    if (d == 0) {
      out.push_back(P);
      continue;
    }
    const std::uint64_t lo = nP << d;
    const std::uint64_t hi = (nP + 1) << d;
    for (std::uint64_t n = lo + 1; n < hi; n += 2) out.push_back({I, (n - 1) / 2});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Bitile> tree_slots(const Bitile& top, int L) {
  std::vector<Bitile> out;
  for (int k = top.time.k; k <= L; ++k) {
    const int d = k - top.time.k;
    const std::uint64_t first = top.time.pos << d;
    for (std::uint64_t pos = first; pos < first + pow2u(d); ++pos) out.push_back({{k, pos}, top.m >> d});
  }
  return out;
}

int epsilon_digit_product(int k_P, const Bitile& T, int R, std::uint64_t cell) {
  const int k = k_P - T.time.k;
  if (k < 0 || R < k_P) throw std::invalid_argument("epsilon: scales out of order");
  const int r = R - T.time.k;
  const std::uint64_t a = cell - (T.time.pos << r);
  const std::uint64_t nT = 2 * T.m + 1;
  int parity = 0;
  for (int i = 0; i < k; ++i)
    if (((nT >> i) & 1) && ((a >> (r - 1 - i)) & 1)) parity ^= 1;
  return parity ? -1 : 1;
}

int epsilon_pt(const Bitile& P, const Bitile& T) {
  if (!bitile_le_u(P, T)) throw std::invalid_argument("epsilon_pt requires P <=_u T");
  return epsilon_digit_product(P.time.k, T, P.time.k, P.time.pos);
}

bool verify_tree_identity(const Bitile& P, const Bitile& T, int L) {
  if (!bitile_le_u(P, T)) throw std::invalid_argument("tree identity requires P <=_u T");
  if (P.time.k > L) throw std::invalid_argument("bitile finer than the grid");
  const int R = L + 1;
  const WavePacket pd = wave_packet(P.down(), R, PacketNorm::L2);
  const WavePacket tu = wave_packet(T.up(), R, PacketNorm::Linf);
  const WavePacket h = haar_packet(P.time, R, PacketNorm::L2);
  const int eps = epsilon_pt(P, T);
  if (pd.half_exp() != h.half_exp()) return false;
  for (std::uint64_t x = 0; x < pow2u(R); ++x)
    if (pd.pattern[x] != eps * tu.pattern[x] * h.pattern[x]) return false;
  const std::uint64_t first = P.time.first_cell(R);
  for (std::uint64_t x = first; x < first + P.time.cell_count(R); ++x)
    if (epsilon_digit_product(P.time.k, T, R, x) != eps) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Density

DensityField::DensityField(const LevelSet& E, const FrequencyChoice& nfun) : levels_(E.levels()), E_(E), N_(nfun) {
  if (nfun.levels() != E.levels())
    throw std::invalid_argument("level set and frequency choice resolutions differ");
  const auto members = E.members();
  scales_.resize(static_cast<std::size_t>(levels_) + 1);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> keys;
  for (int k = 0; k <= levels_; ++k) {
    keys.clear();
    for (auto x : members) keys.push_back({x >> (levels_ - k), N_[x] >> (k + 1)});
    std::sort(keys.begin(), keys.end());
    auto& out = scales_[static_cast<std::size_t>(k)];
    for (const auto& key : keys) {
      if (!out.empty() && out.back().pos == key.first && out.back().m == key.second)
        ++out.back().count;
      else
        out.push_back({key.first, key.second, 1});
    }
  }
}

std::uint64_t DensityField::count(const Bitile& P) const {
  if (P.time.k < 0 || P.time.k > levels_) throw std::invalid_argument("bitile finer than the density grid");
  const auto& v = scales_[static_cast<std::size_t>(P.time.k)];
  auto it = std::lower_bound(v.begin(), v.end(), P, [](const Entry& e, const Bitile& b) {
    return e.pos < b.time.pos || (e.pos == b.time.pos && e.m < b.m);
  });
  if (it != v.end() && it->pos == P.time.pos && it->m == P.m) return it->count;
  return 0;
}

Rational DensityField::fraction(const Bitile& P) const { return Rational(Integer(mass(P))) * pow2(-levels_); }

std::uint64_t DensityField::sup_mass(const Bitile& P) const {
  std::uint64_t best = 0;
  for (int k = 0; k <= P.time.k; ++k) {
    const int d = P.time.k - k;
    const std::uint64_t pos = P.time.pos >> d;
    const std::uint64_t lo = P.m << d;
    const std::uint64_t hi = (P.m + 1) << d;
    const auto& v = scales_[static_cast<std::size_t>(k)];
    auto it = std::lower_bound(v.begin(), v.end(), std::pair{pos, lo}, [](const Entry& e, const auto& key) {
      return e.pos < key.first || (e.pos == key.first && e.m < key.second);
    });
    for (; it != v.end() && it->pos == pos && it->m < hi; ++it) best = std::max(best, it->count << k);
  }
  return best;
}

bool mass_exceeds(std::uint64_t mass, std::uint64_t dmass, double q) {
  if (is_small_integer(q)) {
    const auto shift = static_cast<int>(q);
    if (shift >= 100) return mass > 0;
    return (static_cast<unsigned __int128>(mass) << shift) > static_cast<unsigned __int128>(dmass);
  }
  return static_cast<double>(mass) > static_cast<double>(dmass) * std::pow(2.0, -q);
}

std::optional<Bitile> DensityField::witness_above(const Bitile& P, std::uint64_t dmass, double q) const {
  for (int k = 0; k <= P.time.k; ++k) {
    const int d = P.time.k - k;
    const std::uint64_t pos = P.time.pos >> d;
    const std::uint64_t lo = P.m << d;
    const std::uint64_t hi = (P.m + 1) << d;
    const auto& v = scales_[static_cast<std::size_t>(k)];
    auto it = std::lower_bound(v.begin(), v.end(), std::pair{pos, lo}, [](const Entry& e, const auto& key) {
      return e.pos < key.first || (e.pos == key.first && e.m < key.second);
    });
    for (; it != v.end() && it->pos == pos && it->m < hi; ++it)
      if (mass_exceeds(it->count << k, dmass, q)) return Bitile{{k, pos}, it->m};
  }
  return std::nullopt;
}

bool DensityField::in_tile_set(std::uint64_t cell, const Tile& tile) const {
  return E_.contains(cell) && (N_[cell] >> tile.time.k) == tile.n;
}

std::uint64_t DensityField::up_count(const Bitile& P) const {
  const Tile up = P.up();
  std::uint64_t c = 0;
  const std::uint64_t first = P.time.first_cell(levels_);
  for (std::uint64_t x = first; x < first + P.time.cell_count(levels_); ++x)
    if (in_tile_set(x, up)) ++c;
  return c;
}

Rational density(std::span<const Bitile> coll, const DensityField& field) {
  std::uint64_t best = 0;
  for (const auto& P : coll) best = std::max(best, field.sup_mass(P));
  return Rational(Integer(best)) * pow2(-field.levels());
}

Rational density(std::span<const Bitile> coll, const LevelSet& E, const FrequencyChoice& nfun) {
  return density(coll, DensityField(E, nfun));
}

// ---------------------------------------------------------------------------
// Size

namespace {

void add_packet(std::vector<Integer>& acc, const Bitile& P, const PacketTable& table, int eps = 1) {
  const int L = table.levels();
  const auto coeff = table.linf(P.down());
  if (std::all_of(coeff.begin(), coeff.end(), [](const Integer& x) { return x == 0; })) return;
  const auto comp = static_cast<std::size_t>(table.components());
  const int r = L - P.time.k;
  const std::uint64_t first = P.time.first_cell(L);
  std::vector<Integer> scaled(comp);
  for (std::size_t c = 0; c < comp; ++c)
    mpz_mul_2exp(scaled[c].get_mpz_t(), coeff[c].get_mpz_t(), static_cast<mp_bitcnt_t>(P.time.k));
  for (std::uint64_t a = 0; a < pow2u(r); ++a) {
    const bool plus = (walsh_sign(2 * P.m, a, r) > 0) == (eps > 0);
    for (std::size_t c = 0; c < comp; ++c) {
      auto& out = acc[(first + a) * comp + c];
      if (plus)
        out += scaled[c];
      else
        out -= scaled[c];
    }
  }
}

bool coefficient_zero(const Bitile& P, const PacketTable& table) { return table.is_zero(P.down()); }

// Δ from the packet sum over the top interval.
LqValue delta_from_sum(const std::vector<Integer>& sum, const DyadicInterval& I, const PacketTable& table, double q,
                       const NormPlugin& plugin, bool exact) {
  const int L = table.levels();
  const auto comp = static_cast<std::size_t>(table.components());
  const std::uint64_t first = I.first_cell(L);
  const std::uint64_t len = I.cell_count(L);
  if (exact) {
    Integer total = 0;
    for (std::uint64_t x = first; x < first + len; ++x)
      total += *exact_norm_power(std::span<const Integer>(sum.data() + x * comp, comp), table.dim(), table.kind(),
                                 plugin, q);
    Integer denq;
    mpz_pow_ui(denq.get_mpz_t(), table.denominator().get_mpz_t(), static_cast<unsigned long>(q));
    Rational power(total, denq);
    power.canonicalize();
    power *= pow2(I.k - L);
    return LqValue::from_power(power, q);
  }
  std::vector<double> norms(len);
  double scale = 0;
  for (std::uint64_t x = 0; x < len; ++x) {
    norms[x] = value_norm(std::span<const Integer>(sum.data() + (first + x) * comp, comp), table.denominator(),
                          table.dim(), table.kind(), plugin);
    scale = std::max(scale, norms[x]);
  }
  if (scale == 0) return LqValue::from_value(0.0, q);
  double s = 0;
  for (double n : norms) s += std::pow(n / scale, q);
  return LqValue::from_value(scale * std::pow(std::ldexp(s, I.k - L), 1.0 / q), q);
}

}  // namespace

std::vector<Integer> packet_sum(std::span<const Bitile> members, const PacketTable& table) {
  std::vector<Integer> acc(pow2u(table.levels()) * static_cast<std::size_t>(table.components()), Integer(0));
  for (const auto& P : members) add_packet(acc, P, table);
  return acc;
}

LqValue tree_delta(const Tree& tree, const PacketTable& table, double q, const NormPlugin& plugin) {
  const auto up = tree.up_part();
  const auto sum = packet_sum(up, table);
  const bool exact = exact_power_mode(plugin, table.components(), q);
  if (tree.top.time.k > table.levels()) return exact ? LqValue::from_power(0, q) : LqValue::from_value(0, q);
  return delta_from_sum(sum, tree.top.time, table, q, plugin, exact);
}

SizeEngine::SizeEngine(const PacketTable& table, std::span<const Bitile> coll, double q, const NormPlugin& plugin)
    : table_(table), q_(q), plugin_(plugin), exact_(exact_power_mode(plugin, table.components(), q)) {
  if (!(q >= 1.0) || std::isinf(q)) throw std::invalid_argument("size exponent q must be finite and >= 1");
  for (const auto& P : coll) {
    if (P.time.k > table.levels()) throw std::invalid_argument("bitile finer than the signal grid");
    alive_.insert(P);
  }
  std::vector<Bitile> tops;
  for (const auto& P : alive_) {
    if (coefficient_zero(P, table_)) continue;
    auto anc = up_ancestors(P);
    tops.insert(tops.end(), anc.begin(), anc.end());
  }
  std::sort(tops.begin(), tops.end());
  tops.erase(std::unique(tops.begin(), tops.end()), tops.end());
  tops_ = std::move(tops);
  cache_.assign(tops_.size(), LqValue{});
  dirty_.assign(tops_.size(), true);
}

std::vector<Bitile> SizeEngine::up_tree(const Bitile& top) const {
  std::vector<Bitile> out;
  const int L = table_.levels();
  for (int k = top.time.k; k <= L; ++k) {
    const int d = k - top.time.k;
    if (d > 0 && ((top.m >> (d - 1)) & 1) == 0) continue;
    const std::uint64_t m = top.m >> d;
    const std::uint64_t first = top.time.pos << d;
    for (std::uint64_t pos = first; pos < first + pow2u(d); ++pos) {
      const Bitile P{{k, pos}, m};
      if (alive_.count(P)) out.push_back(P);
    }
  }
  return out;
}

std::vector<Bitile> SizeEngine::full_tree(const Bitile& top) const {
  std::vector<Bitile> out;
  for (const auto& P : tree_slots(top, table_.levels()))
    if (alive_.count(P)) out.push_back(P);
  return out;
}

LqValue SizeEngine::delta(const Bitile& top) const {
  const auto up = up_tree(top);
  std::vector<Integer> sum(pow2u(table_.levels()) * static_cast<std::size_t>(table_.components()), Integer(0));
  for (const auto& P : up) add_packet(sum, P, table_);
  return delta_from_sum(sum, top.time, table_, q_, plugin_, exact_);
}

std::vector<Bitile> SizeEngine::tops() const { return tops_; }

void SizeEngine::refresh() {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < tops_.size(); ++i)
    if (dirty_[i]) todo.push_back(i);
  parallel_for(todo.size(), [&](std::size_t t) { cache_[todo[t]] = delta(tops_[todo[t]]); });
  for (auto i : todo) dirty_[i] = false;
}

const LqValue& SizeEngine::cached_delta(const Bitile& top) {
  auto it = std::lower_bound(tops_.begin(), tops_.end(), top);
  if (it == tops_.end() || *it != top) throw std::invalid_argument("not a candidate top");
  const auto i = static_cast<std::size_t>(it - tops_.begin());
  if (dirty_[i]) {
    cache_[i] = delta(top);
    dirty_[i] = false;
  }
  return cache_[i];
}

SizeEngine::SizeResult SizeEngine::size() {
  refresh();
  SizeResult out{exact_ ? LqValue::from_power(0, q_) : LqValue::from_value(0, q_), std::nullopt};
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < tops_.size(); ++i) {
    if (!best ? (cache_[i].value > 0 || (cache_[i].power && *cache_[i].power > 0)) : lq_less(cache_[*best], cache_[i]))
      best = i;
  }
  if (best) {
    out.value = cache_[*best];
    out.witness = Tree{tops_[*best], up_tree(tops_[*best])};
  }
  return out;
}

void SizeEngine::remove(std::span<const Bitile> bitiles) {
  for (const auto& P : bitiles) {
    if (!alive_.erase(P)) continue;
    if (coefficient_zero(P, table_)) continue;
    for (const auto& T : up_ancestors(P)) {
      auto it = std::lower_bound(tops_.begin(), tops_.end(), T);
      if (it != tops_.end() && *it == T) dirty_[static_cast<std::size_t>(it - tops_.begin())] = true;
    }
  }
}

SizeEngine::SizeResult size(std::span<const Bitile> coll, const PacketTable& table, double q, const NormPlugin& plugin,
                            std::optional<std::span<const Bitile>> tops) {
  SizeEngine engine(table, coll, q, plugin);
  if (!tops) return engine.size();
  const bool exact = engine.exact();
  SizeEngine::SizeResult out{exact ? LqValue::from_power(0, q) : LqValue::from_value(0, q), std::nullopt};
  std::vector<LqValue> values(tops->size());
  parallel_for(tops->size(), [&](std::size_t i) { values[i] = engine.delta((*tops)[i]); });
  for (std::size_t i = 0; i < values.size(); ++i)
    if (lq_less(out.value, values[i])) {
      out.value = values[i];
      out.witness = Tree{(*tops)[i], engine.up_tree((*tops)[i])};
    }
  return out;
}

// ---------------------------------------------------------------------------
// Tree lemma

std::vector<DyadicInterval> stopping_intervals(std::span<const Bitile> members) {
  std::set<DyadicInterval> intervals;
  for (const auto& P : members) intervals.insert(P.time);
  std::set<DyadicInterval> above;  // intervals containing some I_P
  for (const auto& I : intervals)
    for (int k = 0; k <= I.k; ++k) above.insert(I.ancestor(k));
  std::vector<DyadicInterval> roots;
  for (const auto& I : intervals) {
    bool maximal = true;
    for (int k = 0; k < I.k && maximal; ++k)
      if (intervals.count(I.ancestor(k))) maximal = false;
    if (maximal) roots.push_back(I);
  }
  std::vector<DyadicInterval> out;
  std::vector<DyadicInterval> stack(roots.rbegin(), roots.rend());
  while (!stack.empty()) {
    const DyadicInterval K = stack.back();
    stack.pop_back();
    if (above.count(K)) {
      stack.push_back(K.child(1));
      stack.push_back(K.child(0));
    } else {
      out.push_back(K);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Members whose interval strictly contains J.
std::vector<Bitile> strictly_above(std::span<const Bitile> members, const DyadicInterval& J) {
  std::vector<Bitile> out;
  for (const auto& P : members)
    if (P.time.k < J.k && interval_contains(P.time, J)) out.push_back(P);
  return out;
}

// Grid cells meeting J and the measure of J inside each.
std::pair<std::vector<std::uint64_t>, Rational> cells_of(const DyadicInterval& J, int L) {
  std::vector<std::uint64_t> cells;
  if (J.k <= L) {
    for (std::uint64_t x = J.first_cell(L); x < J.first_cell(L) + J.cell_count(L); ++x) cells.push_back(x);
    return {cells, pow2(-L)};
  }
  cells.push_back(J.pos >> (J.k - L));
  return {cells, pow2(-J.k)};
}

}  // namespace

std::vector<std::pair<DyadicInterval, Rational>> g_sets(const Tree& tree, const DensityField& field) {
  std::vector<std::pair<DyadicInterval, Rational>> out;
  const int L = field.levels();
  for (const auto& J : stopping_intervals(tree.members)) {
    const auto above = strictly_above(tree.members, J);
    const auto [cells, weight] = cells_of(J, L);
    std::uint64_t hits = 0;
    for (auto x : cells)
      if (std::any_of(above.begin(), above.end(), [&](const Bitile& P) { return field.in_tile_set(x, P.up()); })) ++hits;
    out.push_back({J, Rational(Integer(hits)) * weight});
  }
  return out;
}

std::vector<Certificate> gj_certificate(const Tree& tree, const DensityField& field) {
  std::vector<Certificate> out;
  const Rational dens = density(tree.members, field);
  for (const auto& [J, g] : g_sets(tree, field)) {
    const Rational bound = Rational(2) * dens * J.length();
    out.push_back(make_certificate("g_j_density_bound", g, bound, true,
                                   {{"J", std::to_string(J.k) + ":" + std::to_string(J.pos)}}));
  }
  return out;
}

namespace {

// Σ_x 2^{-L} g(x)·w_{2m}(x) over I_P ∩ E_{P_u}, as numerators over g.denominator()·2^L.
std::vector<Integer> dual_pairing_numerators(const Bitile& P, const Signal& g, const DensityField& field) {
  const int L = g.levels();
  const auto comp = static_cast<std::size_t>(g.components());
  std::vector<Integer> acc(comp, Integer(0));
  const int r = L - P.time.k;
  if (2 * P.m >= pow2u(r)) return acc;
  const Tile up = P.up();
  const std::uint64_t first = P.time.first_cell(L);
  for (std::uint64_t a = 0; a < pow2u(r); ++a) {
    if (!field.in_tile_set(first + a, up)) continue;
    const auto v = g.numerators_at(first + a);
    const bool plus = walsh_sign(2 * P.m, a, r) > 0;
    for (std::size_t c = 0; c < comp; ++c) {
      if (plus)
        acc[c] += v[c];
      else
        acc[c] -= v[c];
    }
  }
  return acc;
}

// Signed scalar ⟨f,w_{P_d}⟩⟨w_{P_d}, g 1_{E_{P_u}}⟩.
Rational signed_form_term(const Bitile& P, const PacketTable& f_table, const Signal& g, const DensityField& field) {
  const auto a = f_table.linf(P.down());
  const auto b = dual_pairing_numerators(P, g, field);
  Integer dot = 0;
  for (std::size_t c = 0; c < b.size(); ++c) dot += a[c] * b[c];
  if (dot == 0) return Rational(0);
  Integer den = f_table.denominator() * g.denominator();
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(g.levels()));
  Rational r(dot, den);
  r.canonicalize();
  return r * pow2(P.time.k);
}

void check_form_shapes(const PacketTable& f_table, const Signal& g, const DensityField& field) {
  if (g.levels() != f_table.levels() || field.levels() != f_table.levels())
    throw std::invalid_argument("f, g and E/N resolutions differ");
  if (g.dim() != f_table.dim() || g.kind() != f_table.kind())
    throw std::invalid_argument("f and g value shapes differ");
}

}  // namespace

Rational bitile_form_term(const Bitile& P, const PacketTable& f_table, const Signal& g, const DensityField& field) {
  check_form_shapes(f_table, g, field);
  return abs(signed_form_term(P, f_table, g, field));
}

TreeFormResult tree_form_sum(const Tree& tree, const PacketTable& f_table, const Signal& g, const DensityField& field,
                             double q, const NormPlugin& plugin) {
  check_form_shapes(f_table, g, field);
  const int L = f_table.levels();
  const auto comp = static_cast<std::size_t>(f_table.components());
  TreeFormResult out;
  out.lhs = 0;
  out.lhs_down = 0;
  out.lhs_up = 0;

  const NormPlugin dual = plugin.dual();
  for (std::size_t x = 0; x < g.cells(); ++x)
    if (value_norm(g.numerators_at(x), g.denominator(), g.dim(), g.kind(), dual) > 1.0 + 1e-12) out.dual_bound_ok = false;

  std::map<Bitile, int> eps;
  const auto down = tree.lemma_down();
  const BitileSet down_set(down.begin(), down.end());
  for (const auto& P : tree.members) {
    const Rational t = signed_form_term(P, f_table, g, field);
    eps[P] = t < 0 ? -1 : 1;
    out.lhs += abs(t);
    if (down_set.count(P))
      out.lhs_down += abs(t);
    else
      out.lhs_up += abs(t);
  }
  out.size = size(tree.members, f_table, q, plugin).value;
  out.density = density(tree.members, field);
  out.top_measure = tree.top.time.length();
  const double denom = out.size.value * out.density.get_d() * out.top_measure.get_d();
  out.ratio = out.lhs == 0 ? 0.0 : (denom > 0 ? out.lhs.get_d() / denom : std::numeric_limits<double>::infinity());

  // f̃ = Σ_{P∈T_u} ε_P ⟨f,w_{P_d}⟩ w_{P_d} and its maximal function
  const auto up = tree.lemma_up();
  std::vector<Integer> ftilde(pow2u(L) * comp, Integer(0));
  for (const auto& P : up) add_packet(ftilde, P, f_table, eps[P]);
  std::vector<double> ftilde_norm(pow2u(L));
  for (std::size_t x = 0; x < ftilde_norm.size(); ++x)
    ftilde_norm[x] = value_norm(std::span<const Integer>(ftilde.data() + x * comp, comp), f_table.denominator(),
                                f_table.dim(), f_table.kind(), plugin);
  const auto mft = dyadic_maximal<double>(ftilde_norm, L);

  const bool hilbert = q == 2.0 && plugin.is_hilbert(f_table.components());
  const auto gsets = g_sets(tree, field);
  double chain = 0;
  std::vector<Integer> fd(comp), fu(comp), term(comp);
  for (const auto& [J, gmeasure] : gsets) {
    IntervalDiagnostics diag;
    diag.J = J;
    diag.measure = J.length();
    diag.g_measure = gmeasure;
    const auto above = strictly_above(tree.members, J);
    const auto [cells, weight] = cells_of(J, L);
    double inf_m = std::numeric_limits<double>::infinity();
    for (auto x : cells) {
      std::fill(fd.begin(), fd.end(), Integer(0));
      std::fill(fu.begin(), fu.end(), Integer(0));
      for (const auto& P : above) {
        if (!field.in_tile_set(x, P.up())) continue;
        const auto coeff = f_table.linf(P.down());
        const int r = L - P.time.k;
        if (2 * P.m >= pow2u(r)) continue;
        const bool plus = (walsh_sign(2 * P.m, x - P.time.first_cell(L), r) > 0) == (eps[P] > 0);
        auto& target = down_set.count(P) ? fd : fu;
        for (std::size_t c = 0; c < comp; ++c) {
          mpz_mul_2exp(term[c].get_mpz_t(), coeff[c].get_mpz_t(), static_cast<mp_bitcnt_t>(P.time.k));
          if (plus)
            target[c] += term[c];
          else
            target[c] -= term[c];
        }
      }
      const double w = weight.get_d();
      diag.f_down_l1 += w * value_norm(fd, f_table.denominator(), f_table.dim(), f_table.kind(), plugin);
      diag.f_up_l1 += w * value_norm(fu, f_table.denominator(), f_table.dim(), f_table.kind(), plugin);
      inf_m = std::min(inf_m, mft[x]);
    }
    diag.down_bound = out.size.value * gmeasure.get_d();
    diag.up_bound = 2.0 * gmeasure.get_d() * inf_m;
    chain += diag.f_down_l1 + diag.f_up_l1;
    const std::vector<std::pair<std::string, std::string>> ctx{
        {"J", std::to_string(J.k) + ":" + std::to_string(J.pos)}};
    out.certificates.push_back(make_certificate("f_down_bound", diag.f_down_l1, diag.down_bound, hilbert, ctx));
    out.certificates.push_back(make_certificate("f_up_bound", diag.f_up_l1, diag.up_bound, true, ctx));
    out.intervals.push_back(std::move(diag));
  }
  out.certificates.push_back(make_certificate("tree_form_split", out.lhs.get_d(), chain, out.dual_bound_ok));
  for (auto& c : gj_certificate(tree, field)) out.certificates.push_back(std::move(c));
  return out;
}

}  // namespace tilewalsh
