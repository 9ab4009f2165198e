#include "tilewalsh/walsh.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tilewalsh {

namespace {

std::uint64_t bit_reverse(std::uint64_t x, int r) {
  std::uint64_t out = 0;
  for (int i = 0; i < r; ++i) {
    out = (out << 1) | (x & 1);
    x >>= 1;
  }
  return out;
}

int log2_exact(std::size_t n) {
  if (n == 0 || !std::has_single_bit(n)) throw std::invalid_argument("length " + std::to_string(n) + " is not a power of two");
  return std::countr_zero(n);
}

template <typename T>
void bit_reverse_permute(std::vector<T>& data, std::size_t components, int r) {
  const std::size_t n = std::size_t{1} << r;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = bit_reverse(i, r);
    if (j > i)
      for (std::size_t c = 0; c < components; ++c) std::swap(data[i * components + c], data[j * components + c]);
  }
}

bool fits_int64(const std::vector<Integer>& v, int growth_bits) {
  for (const auto& x : v)
    if (static_cast<int>(mpz_sizeinbase(x.get_mpz_t(), 2)) + growth_bits > 62) return false;
  return true;
}

// Butterfly over integer numerators, using machine words when the growth bound allows.
void butterfly(std::vector<Integer>& num, std::size_t components, int r) {
  if (fits_int64(num, r)) {
    std::vector<std::int64_t> fast(num.size());
    for (std::size_t i = 0; i < num.size(); ++i) fast[i] = num[i].get_si();
    hadamard_inplace<std::int64_t>(fast, components);
    for (std::size_t i = 0; i < num.size(); ++i) num[i] = static_cast<long>(fast[i]);
  } else {
    hadamard_inplace<Integer>(num, components);
  }
}

}  // namespace

int rademacher(int i, std::uint64_t cell, int L) {
  if (i < 0 || i >= L)
    throw std::invalid_argument("r_" + std::to_string(i) + " is not constant on cells at L=" + std::to_string(L));
  if (cell >= pow2u(L)) throw std::invalid_argument("cell outside the grid");
  return ((cell >> (L - 1 - i)) & 1) ? -1 : 1;
}

int walsh_sign(std::uint64_t n, std::uint64_t a, int r) {
  return (std::popcount(n & bit_reverse(a, r)) & 1) ? -1 : 1;
}

SignPattern walsh(std::uint64_t n, int L) {
  if (L < 0 || L > kMaxLevels) throw std::invalid_argument("resolution out of range");
  if (n >= pow2u(L)) throw std::invalid_argument("w_" + std::to_string(n) + " is not constant on cells at L=" + std::to_string(L));
  SignPattern out(pow2u(L));
  for (std::uint64_t j = 0; j < out.size(); ++j) out[j] = static_cast<std::int8_t>(walsh_sign(n, j, L));
  return out;
}

WavePacket wave_packet(const Tile& tile, int L, PacketNorm norm) {
  const int k = tile.time.k;
  if (L < 0 || L > kMaxLevels || k < 0 || k > L || tile.time.pos >= pow2u(k))
    throw std::invalid_argument("tile time interval does not fit the 2^" + std::to_string(L) + " grid");
  const int r = L - k;
  if (tile.n >= pow2u(r))
    throw std::invalid_argument("tile frequency index " + std::to_string(tile.n) + " exceeds the grid resolution");
  WavePacket p{tile, L, norm, SignPattern(pow2u(L), 0)};
  const std::uint64_t first = tile.time.first_cell(L);
  for (std::uint64_t a = 0; a < pow2u(r); ++a) p.pattern[first + a] = static_cast<std::int8_t>(walsh_sign(tile.n, a, r));
  return p;
}

WavePacket haar_packet(const DyadicInterval& interval, int L, PacketNorm norm) {
  return wave_packet(Tile{interval, 1}, L, norm);
}

template <typename T>
void hadamard_inplace(std::span<T> data, std::size_t components) {
  if (components == 0 || data.size() % components != 0) throw std::invalid_argument("bad component count");
  const std::size_t n = data.size() / components;
  log2_exact(n);
  for (std::size_t h = 1; h < n; h <<= 1)
    for (std::size_t i = 0; i < n; i += 2 * h)
      for (std::size_t j = i; j < i + h; ++j)
        for (std::size_t c = 0; c < components; ++c) {
          T& x = data[j * components + c];
          T& y = data[(j + h) * components + c];
          T s = x + y;
          y = x - y;
          x = s;
        }
}

template void hadamard_inplace<std::int64_t>(std::span<std::int64_t>, std::size_t);
template void hadamard_inplace<Integer>(std::span<Integer>, std::size_t);
template void hadamard_inplace<Rational>(std::span<Rational>, std::size_t);
template void hadamard_inplace<double>(std::span<double>, std::size_t);

Signal fwht(const Signal& f) {
  const int L = f.levels();
  const auto comp = static_cast<std::size_t>(f.components());
  std::vector<Integer> num = f.numerators();
  butterfly(num, comp, L);
  bit_reverse_permute(num, comp, L);
  Integer den = f.denominator();
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(L));
  return Signal::from_numerators(L, f.dim(), f.kind(), std::move(num), std::move(den)).reduce();
}

Signal inverse_fwht(const Signal& coefficients) {
  const int L = coefficients.levels();
  const auto comp = static_cast<std::size_t>(coefficients.components());
  std::vector<Integer> num = coefficients.numerators();
  bit_reverse_permute(num, comp, L);
  butterfly(num, comp, L);
  return Signal::from_numerators(L, coefficients.dim(), coefficients.kind(), std::move(num),
                                 coefficients.denominator())
      .reduce();
}

std::vector<Rational> fwht(std::span<const Rational> samples) {
  const int L = log2_exact(samples.size());
  return fwht(Signal::scalar(L, samples)).values();
}

std::vector<Rational> inverse_fwht(std::span<const Rational> coefficients) {
  const int L = log2_exact(coefficients.size());
  return inverse_fwht(Signal::scalar(L, coefficients)).values();
}

PacketPairing pairing(const Signal& f, const Tile& tile, PacketNorm norm) {
  const WavePacket p = wave_packet(tile, f.levels(), norm);
  const auto comp = static_cast<std::size_t>(f.components());
  std::vector<Integer> acc(comp, Integer(0));
  const std::uint64_t first = tile.time.first_cell(f.levels());
  for (std::uint64_t j = first; j < first + tile.time.cell_count(f.levels()); ++j) {
    const auto v = f.numerators_at(j);
    for (std::size_t c = 0; c < comp; ++c) {
      if (p.pattern[j] > 0)
        acc[c] += v[c];
      else
        acc[c] -= v[c];
    }
  }
  const Rational scale = Rational(Integer(1), f.denominator()) * pow2(-f.levels());
  PacketPairing out{std::vector<Rational>(comp), p.half_exp()};
  for (std::size_t c = 0; c < comp; ++c) out.value[c] = Rational(acc[c]) * scale;
  return out;
}

PacketTable::PacketTable(const Signal& f)
    : levels_(f.levels()), dim_(f.dim()), kind_(f.kind()), components_(f.components()) {
  const int L = levels_;
  const std::size_t comp = static_cast<std::size_t>(components_);
  const std::size_t cells = pow2u(L);
  den_ = f.denominator();
  mpz_mul_2exp(den_.get_mpz_t(), den_.get_mpz_t(), static_cast<mp_bitcnt_t>(L));
  zeros_.assign(comp, Integer(0));
  data_.resize(static_cast<std::size_t>(L + 1) * cells * comp);
  // finest scale: one cell, n = 0
  for (std::size_t j = 0; j < cells; ++j)
    for (std::size_t c = 0; c < comp; ++c) data_[(static_cast<std::size_t>(L) * cells + j) * comp + c] = f.numerators_at(j)[c];
  // A_I[n] = A_{I0}[n>>1] + (-1)^{n&1} A_{I1}[n>>1]
  for (int k = L - 1; k >= 0; --k) {
    const std::size_t len = pow2u(L - k);
    const std::size_t half = len / 2;
    const std::size_t base = static_cast<std::size_t>(k) * cells;
    const std::size_t child_base = static_cast<std::size_t>(k + 1) * cells;
    for (std::size_t pos = 0; pos < pow2u(k); ++pos) {
      const std::size_t c0 = child_base + (2 * pos) * half;
      const std::size_t c1 = child_base + (2 * pos + 1) * half;
      for (std::size_t n = 0; n < len; ++n)
        for (std::size_t c = 0; c < comp; ++c) {
          const Integer& a = data_[(c0 + (n >> 1)) * comp + c];
          const Integer& b = data_[(c1 + (n >> 1)) * comp + c];
          Integer& out = data_[(base + pos * len + n) * comp + c];
          if (n & 1)
            mpz_sub(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
          else
            mpz_add(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        }
    }
  }
}

bool PacketTable::in_range(const Tile& tile) const {
  const int k = tile.time.k;
  return k >= 0 && k <= levels_ && tile.time.pos < pow2u(k) && tile.n < pow2u(levels_ - k);
}

std::span<const Integer> PacketTable::linf(int k, std::uint64_t pos, std::uint64_t n) const {
  if (k < 0 || k > levels_ || pos >= pow2u(k)) {
    if (k > levels_ && k < 63 && pos < pow2u(k)) return zeros_;
    throw std::invalid_argument("tile time interval outside [0,1)");
  }
  if (n >= pow2u(levels_ - k)) return zeros_;
  const std::size_t comp = static_cast<std::size_t>(components_);
  const std::size_t idx = (static_cast<std::size_t>(k) * pow2u(levels_) + pos * pow2u(levels_ - k) + n) * comp;
  return {data_.data() + idx, comp};
}

bool PacketTable::is_zero(const Tile& tile) const {
  for (const auto& x : linf(tile))
    if (x != 0) return false;
  return true;
}

std::vector<Rational> PacketTable::linf_value(const Tile& tile) const {
  std::vector<Rational> out;
  for (const auto& x : linf(tile)) {
    Rational r(x, den_);
    r.canonicalize();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tilewalsh
