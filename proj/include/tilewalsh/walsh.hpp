#pragma once

// Rademacher and Walsh functions in Walsh–Paley order, wave packets, the fast
// Walsh–Hadamard transform and the table of all local packet coefficients.

#include <cstdint>
#include <span>
#include <vector>

#include "tilewalsh/dyadic.hpp"
#include "tilewalsh/numeric.hpp"
#include "tilewalsh/signal.hpp"

namespace tilewalsh {

/// A ±1/0 sample vector over the 2^L grid cells.
using SignPattern = std::vector<std::int8_t>;

/// r_i on grid cell `cell` at resolution L. Requires 0 <= i < L.
int rademacher(int i, std::uint64_t cell, int L);

/// w_n at local cell a of a 2^r-cell grid (n < 2^r): (-1)^{popcount(n & bitrev_r(a))}.
int walsh_sign(std::uint64_t n, std::uint64_t a, int r);

/// w_n sampled on the 2^L grid. Requires n < 2^L.
SignPattern walsh(std::uint64_t n, int L);

enum class PacketNorm { L2, Linf };

/// w_P = 2^{half_exp/2}·pattern in L2 mode, w_P^∞ = pattern in Linf mode.
struct WavePacket {
  Tile tile;
  int levels = 0;
  PacketNorm norm = PacketNorm::L2;
  SignPattern pattern;

  /// Exponent e of the symbolic factor 2^{e/2} (e = k for L2, 0 for Linf).
  int half_exp() const { return norm == PacketNorm::L2 ? tile.time.k : 0; }
};

/// Throws std::invalid_argument when the tile does not fit the grid.
WavePacket wave_packet(const Tile& tile, int L, PacketNorm norm = PacketNorm::L2);
/// h_I, the packet of the tile I × |I|^{-1}[1,2).
WavePacket haar_packet(const DyadicInterval& interval, int L, PacketNorm norm = PacketNorm::L2);

/// Natural-order Hadamard butterfly on `count` interleaved components.
template <typename T>
void hadamard_inplace(std::span<T> data, std::size_t components);

/// ⟨f, w_n⟩ for every n < 2^L, stored as a signal whose cell n holds the n-th coefficient.
Signal fwht(const Signal& f);
/// Σ_n c_n w_n, the inverse of fwht.
Signal inverse_fwht(const Signal& coefficients);
/// Scalar convenience over a 2^L sample vector. Throws on non-power-of-two length.
std::vector<Rational> fwht(std::span<const Rational> samples);
std::vector<Rational> inverse_fwht(std::span<const Rational> coefficients);

/// An exact pairing value: value · 2^{half_exp/2}.
struct PacketPairing {
  std::vector<Rational> value;
  int half_exp = 0;
};

PacketPairing pairing(const Signal& f, const Tile& tile, PacketNorm norm);

/// Local Linf coefficients A_I[n] = ⟨f, w^∞_{I×|I|^{-1}[n,n+1)}⟩ for all dyadic I of
/// length >= 2^{-L} and all n < 2^L |I|, as integer numerators over denominator()
/// (= den(f)·2^L). Built bottom-up in O(L·2^L) per component.
class PacketTable {
 public:
  explicit PacketTable(const Signal& f);

  int levels() const { return levels_; }
  int dim() const { return dim_; }
  ValueKind kind() const { return kind_; }
  int components() const { return components_; }
  const Integer& denominator() const { return den_; }

  bool in_range(const Tile& tile) const;
  /// Numerators of ⟨f, w^∞_tile⟩; tiles beyond the grid resolution have zero coefficient.
  std::span<const Integer> linf(int k, std::uint64_t pos, std::uint64_t n) const;
  std::span<const Integer> linf(const Tile& tile) const { return linf(tile.time.k, tile.time.pos, tile.n); }
  bool is_zero(const Tile& tile) const;
  std::vector<Rational> linf_value(const Tile& tile) const;

 private:
  int levels_ = 0;
  int dim_ = 1;
  ValueKind kind_ = ValueKind::Vector;
  int components_ = 1;
  Integer den_;
  std::vector<Integer> data_;
  std::vector<Integer> zeros_;
};

}  // namespace tilewalsh
