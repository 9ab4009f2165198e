#include "tilewalsh/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tilewalsh/parallel.hpp"

namespace tilewalsh {

Signal partial_sum(const Signal& f, std::uint64_t N) {
  if (N > pow2u(f.levels()))
    throw std::invalid_argument("partial sum index N=" + std::to_string(N) + " exceeds 2^L");
  const Signal c = fwht(f);
  std::vector<Integer> num = c.numerators();
  const auto comp = static_cast<std::size_t>(c.components());
  for (std::size_t i = N * comp; i < num.size(); ++i) num[i] = 0;
  return inverse_fwht(Signal::from_numerators(c.levels(), c.dim(), c.kind(), std::move(num), c.denominator()));
}

namespace {

void check_nfun(const Signal& f, const FrequencyChoice& nfun) {
  if (nfun.levels() != f.levels())
    throw std::invalid_argument("frequency choice resolution L=" + std::to_string(nfun.levels()) +
                                " does not match signal resolution L=" + std::to_string(f.levels()));
}

}  // namespace

Signal carleson_direct(const Signal& f, const FrequencyChoice& nfun) {
  check_nfun(f, nfun);
  const int L = f.levels();
  const Signal c = fwht(f);
  const auto comp = static_cast<std::size_t>(c.components());
  std::vector<Integer> out(c.numerators().size(), Integer(0));
  parallel_for(f.cells(), [&](std::size_t j) {
    for (std::uint64_t n = 0; n < nfun[j]; ++n) {
      const auto cn = c.numerators_at(n);
      const bool plus = walsh_sign(n, j, L) > 0;
      for (std::size_t q = 0; q < comp; ++q) {
        if (plus)
          out[j * comp + q] += cn[q];
        else
          out[j * comp + q] -= cn[q];
      }
    }
  });
  return Signal::from_numerators(L, f.dim(), f.kind(), std::move(out), c.denominator()).reduce();
}

Signal carleson_bitile(const Signal& f, const FrequencyChoice& nfun, const BitileUniverse& universe) {
  check_nfun(f, nfun);
  return carleson_bitile(PacketTable(f), nfun, universe);
}

Signal carleson_bitile(const PacketTable& table, const FrequencyChoice& nfun, const BitileUniverse& universe) {
  const int L = table.levels();
  if (universe.levels() != L || nfun.levels() != L)
    throw std::invalid_argument("bitile universe, frequency choice and signal resolutions differ");
  const auto comp = static_cast<std::size_t>(table.components());
  std::vector<Integer> out(pow2u(L) * comp, Integer(0));
  parallel_for(pow2u(L), [&](std::size_t j) {
    const std::uint64_t N = nfun[j];
    Integer term;
    for (int k = 0; k <= L; ++k) {
      // the only bitile over this cell at scale k whose up-tile frequency holds N
      if (((N >> k) & 1) == 0) continue;
      const Bitile P{{k, j >> (L - k)}, N >> (k + 1)};
      if (!universe.contains(P)) continue;
      const auto coeff = table.linf(P.down());
      const std::uint64_t local = j - P.time.first_cell(L);
      const bool plus = walsh_sign(2 * P.m, local, L - k) > 0;
      for (std::size_t c = 0; c < comp; ++c) {
        mpz_mul_2exp(term.get_mpz_t(), coeff[c].get_mpz_t(), static_cast<mp_bitcnt_t>(k));
        if (plus)
          out[j * comp + c] += term;
        else
          out[j * comp + c] -= term;
      }
    }
  });
  return Signal::from_numerators(L, table.dim(), table.kind(), std::move(out), table.denominator()).reduce();
}

std::vector<double> maximal_partial_sum(const Signal& f, const NormPlugin& plugin) {
  const int L = f.levels();
  const Signal c = fwht(f);
  const auto comp = static_cast<std::size_t>(c.components());
  std::vector<double> out(f.cells(), 0.0);
  parallel_for(f.cells(), [&](std::size_t j) {
    std::vector<Integer> acc(comp, Integer(0));
    double best = 0;  // N = 0
    for (std::uint64_t n = 0; n < pow2u(L); ++n) {
      const auto cn = c.numerators_at(n);
      const bool plus = walsh_sign(n, j, L) > 0;
      for (std::size_t q = 0; q < comp; ++q) {
        if (plus)
          acc[q] += cn[q];
        else
          acc[q] -= cn[q];
      }
      best = std::max(best, value_norm(acc, c.denominator(), c.dim(), c.kind(), plugin));
    }
    out[j] = best;
  });
  return out;
}

Signal martingale_transform(const Signal& f, const IntervalSigns& signs,
                            const std::optional<std::vector<DyadicInterval>>& family) {
  const int L = f.levels();
  std::vector<DyadicInterval> intervals;
  if (family) {
    intervals = *family;
  } else {
    for (int k = 0; k < L; ++k)
      for (std::uint64_t pos = 0; pos < pow2u(k); ++pos) intervals.push_back({k, pos});
  }
  const PacketTable table(f);
  const auto comp = static_cast<std::size_t>(f.components());
  std::vector<Integer> out(f.cells() * comp, Integer(0));
  Integer term;
  for (const auto& I : intervals) {
    if (I.k < 0 || I.pos >= pow2u(I.k)) throw std::invalid_argument("interval outside [0,1)");
    const int eps = signs.at(I);
    if (I.k >= L) continue;  // Haar functions finer than the grid have zero coefficient
    const auto coeff = table.linf(I.k, I.pos, 1);
    const std::uint64_t first = I.first_cell(L);
    const std::uint64_t len = I.cell_count(L);
    for (std::uint64_t a = 0; a < len; ++a) {
      const bool plus = (a < len / 2) == (eps > 0);
      for (std::size_t c = 0; c < comp; ++c) {
        mpz_mul_2exp(term.get_mpz_t(), coeff[c].get_mpz_t(), static_cast<mp_bitcnt_t>(I.k));
        if (plus)
          out[(first + a) * comp + c] += term;
        else
          out[(first + a) * comp + c] -= term;
      }
    }
  }
  return Signal::from_numerators(L, f.dim(), f.kind(), std::move(out), table.denominator()).reduce();
}

StoppedHaarSum stopped_haar_sum(const Signal& f, double lambda, const DyadicInterval& K, const NormPlugin& plugin,
                                double p) {
  if (!(lambda > 0)) throw std::invalid_argument("stopping level lambda must be positive");
  if (!(p >= 1.0)) throw std::invalid_argument("exponent p must be >= 1");
  const int L = f.levels();
  if (K.k < 0 || K.k > L || K.pos >= pow2u(K.k)) throw std::invalid_argument("K must be a grid interval in [0,1)");
  const auto mf = maximal_function(f, plugin);
  StoppedHaarSum out;
  for (int k = K.k; k < L; ++k) {
    const std::uint64_t first = K.pos << (k - K.k);
    for (std::uint64_t pos = first; pos < first + pow2u(k - K.k); ++pos) {
      const DyadicInterval I{k, pos};
      double inf = mf[I.first_cell(L)];
      for (std::uint64_t j = I.first_cell(L); j < I.first_cell(L) + I.cell_count(L); ++j) inf = std::min(inf, mf[j]);
      if (inf <= lambda) out.family.push_back(I);
    }
  }
  out.sum = martingale_transform(f, IntervalSigns(1), out.family);
  out.lp_norm = lq_norm(out.sum, p, plugin).value;
  out.bound = lambda * std::pow(2.0, -K.k / p);
  out.ratio = out.lp_norm / out.bound;
  return out;
}

}  // namespace tilewalsh
