#include "tilewalsh/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tilewalsh/dyadic.hpp"

namespace tilewalsh {

std::string_view to_string(ValueKind kind) { return kind == ValueKind::Matrix ? "matrix" : "vector"; }

ValueKind parse_value_kind(std::string_view text) {
  if (text == "vector") return ValueKind::Vector;
  if (text == "matrix") return ValueKind::Matrix;
  throw std::invalid_argument("kind must be 'vector' or 'matrix', got '" + std::string(text) + "'");
}

namespace {

void check_shape_args(int levels, int dim) {
  if (levels < 0 || levels > kMaxLevels)
    throw std::invalid_argument("signal resolution L=" + std::to_string(levels) + " outside [0, " +
                                std::to_string(kMaxLevels) + "]");
  if (dim < 1) throw std::invalid_argument("signal dimension must be positive");
}

// num/den as a double without overflowing on large operands.
double ratio_to_double(const Integer& num, const Integer& den) {
  if (num == 0) return 0.0;
  long en = 0;
  long ed = 0;
  const double mn = mpz_get_d_2exp(&en, num.get_mpz_t());
  const double md = mpz_get_d_2exp(&ed, den.get_mpz_t());
  return std::ldexp(mn / md, static_cast<int>(en - ed));
}

}  // namespace

Signal::Signal(int levels, int dim, ValueKind kind) : levels_(levels), dim_(dim), kind_(kind) {
  check_shape_args(levels, dim);
  num_.assign(cells() * static_cast<std::size_t>(components()), Integer(0));
}

Signal Signal::from_values(int levels, int dim, ValueKind kind, std::span<const Rational> values) {
  Signal s(levels, dim, kind);
  if (values.size() != s.num_.size())
    throw std::invalid_argument("signal needs " + std::to_string(s.num_.size()) + " scalars, got " +
                                std::to_string(values.size()));
  Integer den = 1;
  for (const auto& v : values) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.get_den_mpz_t());
  for (std::size_t i = 0; i < values.size(); ++i) s.num_[i] = values[i].get_num() * (den / values[i].get_den());
  s.den_ = den;
  return s;
}

Signal Signal::from_numerators(int levels, int dim, ValueKind kind, std::vector<Integer> numerators,
                               Integer denominator) {
  Signal s(levels, dim, kind);
  if (numerators.size() != s.num_.size()) throw std::invalid_argument("numerator count does not match shape");
  if (denominator <= 0) throw std::invalid_argument("denominator must be positive");
  s.num_ = std::move(numerators);
  s.den_ = std::move(denominator);
  return s;
}

Signal Signal::scalar(int levels, std::span<const Rational> values) {
  return from_values(levels, 1, ValueKind::Vector, values);
}

Rational Signal::at(std::size_t cell, int component) const {
  Rational r(num_.at(cell * static_cast<std::size_t>(components()) + static_cast<std::size_t>(component)), den_);
  r.canonicalize();
  return r;
}

std::vector<Rational> Signal::value(std::size_t cell) const {
  std::vector<Rational> out;
  out.reserve(static_cast<std::size_t>(components()));
  for (int c = 0; c < components(); ++c) out.push_back(at(cell, c));
  return out;
}

std::vector<Rational> Signal::values() const {
  std::vector<Rational> out;
  out.reserve(num_.size());
  for (const auto& n : num_) {
    Rational r(n, den_);
    r.canonicalize();
    out.push_back(std::move(r));
  }
  return out;
}

bool Signal::same_shape(const Signal& other) const {
  return levels_ == other.levels_ && dim_ == other.dim_ && kind_ == other.kind_;
}

bool Signal::is_zero() const {
  return std::all_of(num_.begin(), num_.end(), [](const Integer& n) { return n == 0; });
}

Signal& Signal::reduce() {
  Integer g = den_;
  for (const auto& n : num_) {
    if (g == 1) break;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
  }
  if (g != 1) {
    for (auto& n : num_) mpz_divexact(n.get_mpz_t(), n.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
  }
  return *this;
}

namespace {

Signal combine(const Signal& a, const Signal& b, int sign) {
  if (!a.same_shape(b)) throw std::invalid_argument("signal shapes differ");
  Integer den;
  mpz_lcm(den.get_mpz_t(), a.denominator().get_mpz_t(), b.denominator().get_mpz_t());
  const Integer fa = den / a.denominator();
  const Integer fb = den / b.denominator();
  std::vector<Integer> num(a.numerators().size());
  for (std::size_t i = 0; i < num.size(); ++i) {
    num[i] = a.numerators()[i] * fa;
    if (sign > 0)
      num[i] += b.numerators()[i] * fb;
    else
      num[i] -= b.numerators()[i] * fb;
  }
  return Signal::from_numerators(a.levels(), a.dim(), a.kind(), std::move(num), std::move(den)).reduce();
}

}  // namespace

Signal Signal::operator+(const Signal& other) const { return combine(*this, other, +1); }
Signal Signal::operator-(const Signal& other) const { return combine(*this, other, -1); }

Signal Signal::operator*(const Rational& s) const {
  std::vector<Integer> num(num_.size());
  for (std::size_t i = 0; i < num.size(); ++i) num[i] = num_[i] * s.get_num();
  Integer den = den_ * s.get_den();
  if (den < 0) {
    den = -den;
    for (auto& n : num) n = -n;
  }
  return from_numerators(levels_, dim_, kind_, std::move(num), std::move(den)).reduce();
}

Signal Signal::times_pattern(std::span<const std::int8_t> pattern) const {
  if (pattern.size() != cells()) throw std::invalid_argument("pattern length does not match signal");
  Signal out = *this;
  const auto comp = static_cast<std::size_t>(components());
  for (std::size_t j = 0; j < cells(); ++j)
    for (std::size_t c = 0; c < comp; ++c) {
      auto& n = out.num_[j * comp + c];
      if (pattern[j] == 0)
        n = 0;
      else if (pattern[j] < 0)
        n = -n;
    }
  return out;
}

bool Signal::operator==(const Signal& other) const {
  if (!same_shape(other)) return false;
  for (std::size_t i = 0; i < num_.size(); ++i)
    if (num_[i] * other.den_ != other.num_[i] * den_) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Norms

NormPlugin NormPlugin::lp(double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("lp exponent must be in [1, inf)");
  return {Family::Lp, p, 2.0};
}

NormPlugin NormPlugin::schatten(double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("schatten exponent must be in [1, inf)");
  return {Family::Schatten, p, 2.0};
}

NormPlugin NormPlugin::parse(std::string_view desc) {
  if (desc == "euclidean") return euclidean();
  auto exponent = [&](std::size_t prefix) {
    const std::string text(desc.substr(prefix));
    std::size_t used = 0;
    double p = 0;
    try {
      p = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.empty())
      throw std::invalid_argument("bad norm exponent in '" + std::string(desc) + "'");
    return p;
  };
  if (desc.starts_with("lp:")) return lp(exponent(3));
  if (desc.starts_with("schatten:")) return schatten(exponent(9));
  throw std::invalid_argument("norm must be euclidean, lp:<p> or schatten:<p>, got '" + std::string(desc) + "'");
}

std::string NormPlugin::name() const {
  switch (family) {
    case Family::Euclidean:
      return "euclidean";
    case Family::Lp:
      return "lp:" + format_real(p);
    case Family::Schatten:
      return "schatten:" + format_real(p);
  }
  return "?";
}

NormPlugin NormPlugin::dual() const {
  if (family == Family::Euclidean) return *this;
  NormPlugin d = *this;
  d.p = p == 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0);
  return d;
}

bool NormPlugin::is_hilbert(int components) const {
  return components == 1 || family == Family::Euclidean || p == 2.0;
}

std::vector<double> singular_values(std::span<const double> matrix, int dim) {
  const auto d = static_cast<std::size_t>(dim);
  if (matrix.size() != d * d) throw std::invalid_argument("singular_values: matrix size mismatch");
  std::vector<double> a(matrix.begin(), matrix.end());
  auto col = [&](std::size_t r, std::size_t c) -> double& { return a[r * d + c]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) {
        double alpha = 0, beta = 0, gamma = 0;
        for (std::size_t r = 0; r < d; ++r) {
          alpha += col(r, i) * col(r, i);
          beta += col(r, j) * col(r, j);
          gamma += col(r, i) * col(r, j);
        }
        if (gamma == 0.0 || std::abs(gamma) <= 1e-12 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < d; ++r) {
          const double x = col(r, i);
          const double y = col(r, j);
          col(r, i) = c * x - s * y;
          col(r, j) = s * x + c * y;
        }
      }
    if (!rotated) break;
  }
  std::vector<double> sv(d);
  for (std::size_t c = 0; c < d; ++c) {
    double s = 0;
    for (std::size_t r = 0; r < d; ++r) s += col(r, c) * col(r, c);
    sv[c] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

namespace {

double lp_sum(std::span<const double> v, double p) {
  if (std::isinf(p)) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double scale = 0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0) return 0;
  double s = 0;
  for (double x : v) s += std::pow(std::abs(x) / scale, p);
  return scale * std::pow(s, 1.0 / p);
}

}  // namespace

double NormPlugin::evaluate(std::span<const double> value, int dim, ValueKind kind) const {
  const std::size_t expected =
      kind == ValueKind::Matrix ? static_cast<std::size_t>(dim * dim) : static_cast<std::size_t>(dim);
  if (value.size() != expected) throw std::invalid_argument("value shape does not match dimension");
  switch (family) {
    case Family::Euclidean:
      return lp_sum(value, 2.0);
    case Family::Lp:
      return lp_sum(value, p);
    case Family::Schatten:
      if (kind != ValueKind::Matrix && dim != 1)
        throw std::invalid_argument("schatten norm needs matrix values");
      if (dim == 1) return std::abs(value[0]);
      return lp_sum(singular_values(value, dim), p);
  }
  return 0;
}

double value_norm(std::span<const Rational> value, int dim, ValueKind kind, const NormPlugin& plugin) {
  std::vector<double> v(value.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = value[i].get_d();
  return plugin.evaluate(v, dim, kind);
}

double value_norm(std::span<const Integer> numerators, const Integer& denominator, int dim, ValueKind kind,
                  const NormPlugin& plugin) {
  std::vector<double> v(numerators.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = ratio_to_double(numerators[i], denominator);
  return plugin.evaluate(v, dim, kind);
}

bool exact_power_mode(const NormPlugin& plugin, int components, double q) {
  if (!is_small_integer(q)) return false;
  if (components == 1) return true;
  return plugin.family == NormPlugin::Family::Euclidean && static_cast<long>(q) % 2 == 0;
}

std::optional<Integer> exact_norm_power(std::span<const Integer> numerators, int dim, ValueKind kind,
                                        const NormPlugin& plugin, double q) {
  const int comps = kind == ValueKind::Matrix ? dim * dim : dim;
  if (static_cast<int>(numerators.size()) != comps) throw std::invalid_argument("value shape does not match dimension");
  if (!exact_power_mode(plugin, comps, q)) return std::nullopt;
  const auto qi = static_cast<unsigned long>(q);
  Integer out;
  if (comps == 1) {
    Integer a = abs(numerators[0]);
    mpz_pow_ui(out.get_mpz_t(), a.get_mpz_t(), qi);
    return out;
  }
  Integer sq = 0;
  for (const auto& n : numerators) sq += n * n;
  mpz_pow_ui(out.get_mpz_t(), sq.get_mpz_t(), qi / 2);
  return out;
}

LqValue LqValue::from_power(const Rational& power, double q) {
  LqValue v;
  v.q = q;
  v.power = power;
  v.value = power == 0 ? 0.0 : std::pow(power.get_d(), 1.0 / q);
  return v;
}

Quantity LqValue::as_quantity() const {
  if (power) return *power;
  return value;
}

bool lq_le_scaled(const LqValue& a, const LqValue& b, int shift) {
  if (a.power && b.power && a.q == b.q && is_small_integer(a.q))
    return *a.power <= *b.power * pow2(shift * static_cast<int>(a.q));
  return a.value <= std::ldexp(b.value, shift);
}

bool lq_less(const LqValue& a, const LqValue& b) {
  if (a.power && b.power && a.q == b.q) return *a.power < *b.power;
  return a.value < b.value;
}

std::vector<double> pointwise_norms(const Signal& f, const NormPlugin& plugin) {
  std::vector<double> out(f.cells());
  for (std::size_t j = 0; j < f.cells(); ++j)
    out[j] = value_norm(f.numerators_at(j), f.denominator(), f.dim(), f.kind(), plugin);
  return out;
}

LqValue lq_norm(const Signal& f, double q, const NormPlugin& plugin) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq_norm needs q >= 1");
  if (std::isinf(q)) {
    const auto norms = pointwise_norms(f, plugin);
    return LqValue::from_value(*std::max_element(norms.begin(), norms.end()), q);
  }
  if (exact_power_mode(plugin, f.components(), q)) {
    Integer sum = 0;
    for (std::size_t j = 0; j < f.cells(); ++j)
      sum += *exact_norm_power(f.numerators_at(j), f.dim(), f.kind(), plugin, q);
    Integer denq;
    mpz_pow_ui(denq.get_mpz_t(), f.denominator().get_mpz_t(), static_cast<unsigned long>(q));
    Rational power(sum, denq);
    power.canonicalize();
    power *= pow2(-f.levels());
    return LqValue::from_power(power, q);
  }
  const auto norms = pointwise_norms(f, plugin);
  const double scale = *std::max_element(norms.begin(), norms.end());
  if (scale == 0) return LqValue::from_value(0.0, q);
  double s = 0;
  for (double n : norms) s += std::pow(n / scale, q);
  return LqValue::from_value(scale * std::pow(std::ldexp(s, -f.levels()), 1.0 / q), q);
}

template <typename T>
std::vector<T> dyadic_maximal(std::span<const T> values, int levels) {
  const std::size_t n = std::size_t{1} << levels;
  if (values.size() != n) throw std::invalid_argument("dyadic_maximal: length is not 2^L");
  // sums[k][pos] over the interval (k, pos)
  std::vector<std::vector<T>> sums(static_cast<std::size_t>(levels) + 1);
  sums[static_cast<std::size_t>(levels)].assign(values.begin(), values.end());
  for (int k = levels - 1; k >= 0; --k) {
    auto& cur = sums[static_cast<std::size_t>(k)];
    const auto& fine = sums[static_cast<std::size_t>(k) + 1];
    cur.resize(std::size_t{1} << k);
    for (std::size_t p = 0; p < cur.size(); ++p) cur[p] = fine[2 * p] + fine[2 * p + 1];
  }
  // running max of averages from the root down
  std::vector<T> best{sums[0][0] / T(static_cast<double>(n))};
  for (int k = 1; k <= levels; ++k) {
    const T len(static_cast<double>(std::size_t{1} << (levels - k)));
    std::vector<T> next(std::size_t{1} << k);
    for (std::size_t p = 0; p < next.size(); ++p) {
      T avg = sums[static_cast<std::size_t>(k)][p] / len;
      next[p] = avg > best[p >> 1] ? avg : best[p >> 1];
    }
    best = std::move(next);
  }
  return best;
}

template std::vector<double> dyadic_maximal<double>(std::span<const double>, int);
template std::vector<Rational> dyadic_maximal<Rational>(std::span<const Rational>, int);

std::vector<double> maximal_function(const Signal& f, const NormPlugin& plugin) {
  const auto norms = pointwise_norms(f, plugin);
  return dyadic_maximal<double>(norms, f.levels());
}

double bmo_norm(const Signal& f, const NormPlugin& plugin) {
  const int L = f.levels();
  const auto comp = static_cast<std::size_t>(f.components());
  double best = 0;
  std::vector<Integer> sum(comp), diff(comp);
  for (int k = 0; k < L; ++k) {
    const std::size_t len = std::size_t{1} << (L - k);
    const Integer den = f.denominator() * Integer(static_cast<unsigned long>(len));
    for (std::size_t pos = 0; pos < (std::size_t{1} << k); ++pos) {
      const std::size_t first = pos * len;
      for (std::size_t c = 0; c < comp; ++c) sum[c] = 0;
      for (std::size_t j = first; j < first + len; ++j)
        for (std::size_t c = 0; c < comp; ++c) sum[c] += f.numerators_at(j)[c];
      double osc = 0;
      for (std::size_t j = first; j < first + len; ++j) {
        for (std::size_t c = 0; c < comp; ++c) diff[c] = f.numerators_at(j)[c] * static_cast<unsigned long>(len) - sum[c];
        osc += value_norm(diff, den, f.dim(), f.kind(), plugin);
      }
      best = std::max(best, osc / static_cast<double>(len));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Level sets and frequency choices

LevelSet::LevelSet(int levels) : levels_(levels) {
  if (levels < 0 || levels > kMaxLevels) throw std::invalid_argument("level set resolution out of range");
  bits_.assign(std::size_t{1} << levels, 0);
}

LevelSet::LevelSet(int levels, std::span<const std::uint64_t> cells) : LevelSet(levels) {
  for (auto c : cells) {
    if (c >= bits_.size())
      throw std::invalid_argument("level set cell " + std::to_string(c) + " outside the 2^L grid");
    bits_[c] = 1;
  }
}

std::size_t LevelSet::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Rational LevelSet::measure() const { return Rational(Integer(static_cast<unsigned long>(count()))) * pow2(-levels_); }

std::vector<std::uint64_t> LevelSet::members() const {
  std::vector<std::uint64_t> out;
  for (std::size_t j = 0; j < bits_.size(); ++j)
    if (bits_[j]) out.push_back(j);
  return out;
}

std::vector<Rational> LevelSet::indicator() const {
  std::vector<Rational> out(bits_.size());
  for (std::size_t j = 0; j < bits_.size(); ++j) out[j] = bits_[j] ? 1 : 0;
  return out;
}

LevelSet LevelSet::minus(const LevelSet& other) const {
  if (other.levels_ != levels_) throw std::invalid_argument("level set resolutions differ");
  LevelSet out = *this;
  for (std::size_t j = 0; j < bits_.size(); ++j)
    if (other.bits_[j]) out.bits_[j] = 0;
  return out;
}

FrequencyChoice::FrequencyChoice(int levels, std::vector<std::uint64_t> values)
    : levels_(levels), values_(std::move(values)) {
  if (levels < 0 || levels > kMaxLevels) throw std::invalid_argument("frequency choice resolution out of range");
  if (values_.size() != (std::size_t{1} << levels))
    throw std::invalid_argument("frequency choice needs 2^L values");
  for (auto v : values_)
    if (v > pow2u(levels))
      throw std::invalid_argument("frequency choice value " + std::to_string(v) + " outside [0, 2^L]");
}

FrequencyChoice FrequencyChoice::constant(int levels, std::uint64_t value) {
  return FrequencyChoice(levels, std::vector<std::uint64_t>(std::size_t{1} << levels, value));
}

}  // namespace tilewalsh
