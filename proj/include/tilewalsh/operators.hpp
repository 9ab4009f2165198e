#pragma once

// Partial sums, the linearized Carleson operator (direct and bitile forms),
// the maximal partial-sum operator and Haar martingale transforms.

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tilewalsh/dyadic.hpp"
#include "tilewalsh/signal.hpp"
#include "tilewalsh/walsh.hpp"

namespace tilewalsh {

/// S_N f. Requires 0 <= N <= 2^L.
Signal partial_sum(const Signal& f, std::uint64_t N);

/// x ↦ S_{N(x)} f(x) from the Walsh coefficients, O(4^L).
Signal carleson_direct(const Signal& f, const FrequencyChoice& nfun);

/// Σ_P ⟨f,w_{P_d}⟩ w_{P_d}(x) 1_{ω_{P_u}}(N(x)) over the universe, O(L·2^L) after the packet table.
Signal carleson_bitile(const Signal& f, const FrequencyChoice& nfun, const BitileUniverse& universe);
Signal carleson_bitile(const PacketTable& table, const FrequencyChoice& nfun, const BitileUniverse& universe);

/// sup_{0<=N<=2^L} ‖S_N f(x)‖ per cell.
std::vector<double> maximal_partial_sum(const Signal& f, const NormPlugin& plugin);

/// ±1 multipliers indexed by dyadic intervals (or any ordered key).
template <typename Key>
class SignChoice {
 public:
  SignChoice() = default;
  explicit SignChoice(int constant) : constant_(constant) {}
  void set(const Key& key, int sign) { signs_[key] = sign < 0 ? -1 : 1; }
  /// Throws std::invalid_argument for a missing sign.
  int at(const Key& key) const;
  bool contains(const Key& key) const { return constant_.has_value() || signs_.count(key) != 0; }

 private:
  std::optional<int> constant_;
  std::map<Key, int> signs_;
};

template <typename Key>
int SignChoice<Key>::at(const Key& key) const {
  if (auto it = signs_.find(key); it != signs_.end()) return it->second;
  if (constant_) return *constant_;
  throw std::invalid_argument("sign choice has no entry for a required index");
}

using IntervalSigns = SignChoice<DyadicInterval>;
using BitileSigns = SignChoice<Bitile>;

/// Σ_I ε_I ⟨f,h_I⟩ h_I over `family` (default: every I ⊆ [0,1) with |I| > 2^{-L}).
Signal martingale_transform(const Signal& f, const IntervalSigns& signs,
                            const std::optional<std::vector<DyadicInterval>>& family = std::nullopt);

struct StoppedHaarSum {
  Signal sum;
  std::vector<DyadicInterval> family;
  double lp_norm = 0;
  double bound = 0;  // λ |K|^{1/p}
  double ratio = 0;
};

/// Σ_{I∈𝓘, I⊆K} ⟨f,h_I⟩h_I with 𝓘 = {I : inf_I Mf <= λ}, and its L^p norm against λ|K|^{1/p}.
StoppedHaarSum stopped_haar_sum(const Signal& f, double lambda, const DyadicInterval& K, const NormPlugin& plugin,
                                double p);

}  // namespace tilewalsh
