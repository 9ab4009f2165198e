#pragma once

// Vector- and matrix-valued grid signals, norm plugins with their duals,
// level sets and frequency choices on the 2^L grid.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tilewalsh/numeric.hpp"

namespace tilewalsh {

enum class ValueKind { Vector, Matrix };

std::string_view to_string(ValueKind kind);
ValueKind parse_value_kind(std::string_view text);

/// A function on [0,1) that is constant on each of the 2^L grid cells and
/// takes values in R^d (Vector) or d×d matrices (Matrix, row-major).
///
/// Samples are exact rationals stored as integer numerators over one shared
/// positive denominator, so linear kernels run on integers only.
class Signal {
 public:
  Signal() = default;
  /// Zero signal.
  Signal(int levels, int dim, ValueKind kind = ValueKind::Vector);

  static Signal from_values(int levels, int dim, ValueKind kind, std::span<const Rational> values);
  static Signal from_numerators(int levels, int dim, ValueKind kind, std::vector<Integer> numerators,
                                Integer denominator);
  /// Scalar convenience: one rational per cell.
  static Signal scalar(int levels, std::span<const Rational> values);

  int levels() const { return levels_; }
  int dim() const { return dim_; }
  ValueKind kind() const { return kind_; }
  int components() const { return kind_ == ValueKind::Matrix ? dim_ * dim_ : dim_; }
  std::size_t cells() const { return std::size_t{1} << levels_; }

  Rational at(std::size_t cell, int component) const;
  std::vector<Rational> value(std::size_t cell) const;
  std::vector<Rational> values() const;

  const std::vector<Integer>& numerators() const { return num_; }
  const Integer& denominator() const { return den_; }
  std::span<const Integer> numerators_at(std::size_t cell) const {
    return {num_.data() + cell * static_cast<std::size_t>(components()), static_cast<std::size_t>(components())};
  }

  bool same_shape(const Signal& other) const;
  bool is_zero() const;

  /// Divides numerators and denominator by their common gcd.
  Signal& reduce();

  Signal operator+(const Signal& other) const;
  Signal operator-(const Signal& other) const;
  Signal operator*(const Rational& s) const;
  /// Pointwise product with a scalar ±1/0 pattern.
  Signal times_pattern(std::span<const std::int8_t> pattern) const;

  /// Exact value equality (independent of the stored denominator).
  bool operator==(const Signal& other) const;

 private:
  int levels_ = 0;
  int dim_ = 1;
  ValueKind kind_ = ValueKind::Vector;
  std::vector<Integer> num_;
  Integer den_ = 1;
};

/// A named norm on the value space with its dual pairing (dot product for
/// vectors, trace pairing tr(AᵀB) for matrices) and a declared tile-type exponent.
struct NormPlugin {
  enum class Family { Euclidean, Lp, Schatten };

  Family family = Family::Euclidean;
  double p = 2.0;
  double tile_type_q = 2.0;

  static NormPlugin euclidean() { return {}; }
  static NormPlugin lp(double p);
  static NormPlugin schatten(double p);
  /// "euclidean", "lp:<p>", "schatten:<p>".
  static NormPlugin parse(std::string_view desc);

  std::string name() const;
  NormPlugin dual() const;
  /// Hilbert-space norm on every value space it applies to at this dimension.
  bool is_hilbert(int components) const;

  /// Norm of one value given as doubles (size must match the shape).
  double evaluate(std::span<const double> value, int dim, ValueKind kind) const;
};

/// Throws std::invalid_argument on shape mismatch.
double value_norm(std::span<const Rational> value, int dim, ValueKind kind, const NormPlugin& plugin);
double value_norm(std::span<const Integer> numerators, const Integer& denominator, int dim, ValueKind kind,
                  const NormPlugin& plugin);

/// Exact ‖v‖^q for integer numerators when available: one component and
/// integer q, or Euclidean with even integer q. Returns the numerator power
/// only (caller divides by denominator^q).
std::optional<Integer> exact_norm_power(std::span<const Integer> numerators, int dim, ValueKind kind,
                                        const NormPlugin& plugin, double q);
bool exact_power_mode(const NormPlugin& plugin, int components, double q);

/// Singular values of a d×d matrix by one-sided Jacobi (tolerance 1e-12), descending.
std::vector<double> singular_values(std::span<const double> matrix, int dim);

/// A mixed-norm quantity (∫…)^{1/q}: value is always set; power carries the
/// exact q-th power when the arithmetic allows it.
struct LqValue {
  double q = 2.0;
  double value = 0.0;
  std::optional<Rational> power;

  bool exact() const { return power.has_value(); }
  static LqValue from_power(const Rational& power, double q);
  static LqValue from_value(double value, double q) { return {q, value, std::nullopt}; }
  Quantity as_quantity() const;
};

/// a ≤ b·2^{shift}, exactly when both sides are exact and q is an integer.
bool lq_le_scaled(const LqValue& a, const LqValue& b, int shift);
bool lq_less(const LqValue& a, const LqValue& b);

/// (2^{-L} Σ_j ‖f_j‖^q)^{1/q}; q = +inf gives the max.
LqValue lq_norm(const Signal& f, double q, const NormPlugin& plugin);

/// Per-cell norms as doubles.
std::vector<double> pointwise_norms(const Signal& f, const NormPlugin& plugin);

/// Dyadic maximal function of a non-negative grid function: the max over
/// dyadic I ⊇ cell of the average over I.
template <typename T>
std::vector<T> dyadic_maximal(std::span<const T> values, int levels);

/// M applied to the pointwise norm of f.
std::vector<double> maximal_function(const Signal& f, const NormPlugin& plugin);

/// Dyadic BMO with L¹ mean oscillation: max over dyadic K of avg_K ‖f − avg_K f‖.
double bmo_norm(const Signal& f, const NormPlugin& plugin);

/// A union of grid cells.
class LevelSet {
 public:
  LevelSet() = default;
  explicit LevelSet(int levels);
  LevelSet(int levels, std::span<const std::uint64_t> cells);

  int levels() const { return levels_; }
  std::size_t cells() const { return bits_.size(); }
  bool contains(std::size_t cell) const { return bits_[cell] != 0; }
  void insert(std::size_t cell) { bits_.at(cell) = 1; }
  void erase(std::size_t cell) { bits_.at(cell) = 0; }
  std::size_t count() const;
  Rational measure() const;
  bool empty() const { return count() == 0; }
  std::vector<std::uint64_t> members() const;
  std::vector<Rational> indicator() const;

  LevelSet minus(const LevelSet& other) const;
  bool operator==(const LevelSet&) const = default;

 private:
  int levels_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// A measurable linearization N(x), one integer in [0, 2^L] per cell.
class FrequencyChoice {
 public:
  FrequencyChoice() = default;
  FrequencyChoice(int levels, std::vector<std::uint64_t> values);
  static FrequencyChoice constant(int levels, std::uint64_t value);

  int levels() const { return levels_; }
  std::uint64_t operator[](std::size_t cell) const { return values_[cell]; }
  const std::vector<std::uint64_t>& values() const { return values_; }
  bool operator==(const FrequencyChoice&) const = default;

 private:
  int levels_ = 0;
  std::vector<std::uint64_t> values_;
};

}  // namespace tilewalsh
