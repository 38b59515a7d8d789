#pragma once

// Closed-form constants and extremal constructions for the L_p-normalized
// Haar system. Everything here is a formula; nothing searches.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "haargc/bounds.hpp"
#include "haargc/dyadic.hpp"

namespace haargc {

namespace detail {

/// 2^x - 1 without cancellation for small x.
inline double exp2m1(double x) { return std::expm1(x * std::numbers::ln2); }

inline std::uint32_t ceil_log2(std::size_t m) {
  std::uint32_t level = 0;
  while ((std::size_t{1} << level) < m) ++level;
  return level;
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace detail

struct ExponentProfile {
  double p;
  double conjugate;  // p'
  double star;       // p* = max{p, p'}
  double sharp;      // p# = min{p, p'}

  static ExponentProfile of(Exponent e) { return {e.value(), e.conjugate(), e.star(), e.sharp()}; }
};

/// a_p = 1 / (1 - 2^{-1/p}) = sum_{n <= 0} 2^{n/p}.
inline double geometric_factor(double p) { return -1.0 / detail::exp2m1(-1.0 / p); }

/// d_p = (2^{1/p#} - 1) / (2^{1/p*} - 1), the lower bound for the disjoint
/// democracy constant.
inline double democracy_lower(Exponent p) {
  return detail::exp2m1(1.0 / p.sharp()) / detail::exp2m1(1.0 / p.star());
}

/// D_p = 8 / ((2^{1/p} - 1)(2^{1/p'} - 1)), the upper bound for the super
/// bi-democracy constant.
inline double bidemocracy_upper(Exponent p) {
  return 8.0 / (detail::exp2m1(1.0 / p.value()) * detail::exp2m1(1.0 / p.conjugate()));
}

struct HaarConstants {
  ExponentProfile profile;
  ConstantBound unconditional;        // K_u = p* - 1 (Burkholder)
  ConstantBound suppression_lower;    // K_u / 2 <= K_su
  ConstantBound suppression_upper;    // K_su <= K_u
  ConstantBound democracy_lower;      // d_p <= Delta_d
  ConstantBound bidemocracy_upper;    // Delta_sb <= D_p
  double geometric_factor;            // a_p
  double geometric_factor_dual;       // a_{p'}
};

inline HaarConstants constants(Exponent p) {
  const double ku = p.star() - 1.0;
  return HaarConstants{
      ExponentProfile::of(p),
      ConstantBound::make("K_u", ku, BoundKind::exact, "Burkholder: K_u = p* - 1"),
      ConstantBound::make("K_su", ku / 2.0, BoundKind::lower, "K_u <= 2 K_su (real scalars)"),
      ConstantBound::make("K_su", ku, BoundKind::upper, "K_su <= K_u"),
      ConstantBound::make("Delta_d", haargc::democracy_lower(p), BoundKind::lower,
                          "nested chain versus disjoint family, m -> infinity"),
      ConstantBound::make("Delta_sb", haargc::bidemocracy_upper(p), BoundKind::upper,
                          "phi^eps_m <= 2 a_p m^{1/p} at p and p'"),
      geometric_factor(p.value()),
      geometric_factor(p.conjugate()),
  };
}

// ---------------------------------------------------------------------------
// Extremal constructions
// ---------------------------------------------------------------------------

/// m pairwise disjoint intervals at level ceil(log2 m) + extra_levels, taken
/// right to left from the last offset. With extra_levels = 1 they all sit in
/// [1/2, 1).
inline std::vector<DyadicIndex> disjoint_family_indices(std::size_t m, std::uint32_t extra_levels = 0) {
  if (m == 0) throw std::invalid_argument("disjoint family needs m >= 1");
  const std::uint32_t level = detail::ceil_log2(m) + extra_levels;
  if (level > 62) throw std::invalid_argument("disjoint family too large");
  const std::uint64_t last = (std::uint64_t{1} << level) - 1;
  std::vector<DyadicIndex> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) out.push_back(DyadicIndex::interval(level, last - j));
  return out;
}

struct DisjointFamily {
  std::vector<DyadicIndex> indices;
  double norm;  // m^{1/p}
};

inline DisjointFamily disjoint_family(std::size_t m, Exponent p) {
  return {disjoint_family_indices(m), std::pow(static_cast<double>(m), 1.0 / p.value())};
}

/// I_1 = [0,1), I_{j+1} = left half of I_j: levels 0..m-1 at offset 0.
inline std::vector<DyadicIndex> nested_chain_indices(std::size_t m) {
  if (m == 0) throw std::invalid_argument("nested chain needs m >= 1");
  if (m > kMaxLevel + 1) throw std::invalid_argument("nested chain longer than the level cap");
  std::vector<DyadicIndex> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) out.push_back(DyadicIndex::interval(static_cast<std::uint32_t>(j), 0));
  return out;
}

struct ChainSandwich {
  double lo;
  double hi;
};

/// ((1 + m (2^{1/p'} - 1)^p)^{1/p} -/+ 1) / (2^{1/p} - 1).
inline ChainSandwich chain_sandwich(std::size_t m, Exponent p) {
  const double pv = p.value();
  const double step = detail::exp2m1(1.0 / p.conjugate());
  const double outer = std::pow(1.0 + static_cast<double>(m) * std::pow(step, pv), 1.0 / pv);
  const double denom = detail::exp2m1(1.0 / pv);
  return {(outer - 1.0) / denom, (outer + 1.0) / denom};
}

/// ||sum_{j<m} h_{I_j}||_p for every chain length 1..m_max.
///
/// The chain sum is constant on the right half of each I_j and on the left
/// half of the last interval, which gives, after dividing by (2^{1/p}-1)^p,
///   (1 - 2^{-m/p})^p + sum_{j<m} |2^{1/p'} - 1 - 2^{-(j+1)/p}|^p.
inline std::vector<double> nested_chain_norms(std::size_t m_max, Exponent p) {
  const double pv = p.value();
  const double step = detail::exp2m1(1.0 / p.conjugate());
  const double denom = detail::exp2m1(1.0 / pv);
  std::vector<double> out;
  out.reserve(m_max);
  detail::CompensatedSum layers;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const double j = static_cast<double>(m - 1);
    layers.add(std::pow(std::abs(step - pow2(-(j + 1.0) / pv)), pv));
    const double innermost = std::pow(-detail::exp2m1(-static_cast<double>(m) / pv), pv);
    out.push_back(std::pow(layers.value() + innermost, 1.0 / pv) / denom);
  }
  return out;
}

inline double nested_chain_norm(std::size_t m, Exponent p) {
  if (m == 0) throw std::invalid_argument("nested chain needs m >= 1");
  return nested_chain_norms(m, p).back();
}

struct NestedChain {
  std::vector<DyadicIndex> indices;
  double norm_exact;
  double sandwich_lo;
  double sandwich_hi;
};

inline NestedChain nested_chain(std::size_t m, Exponent p) {
  const ChainSandwich s = chain_sandwich(m, p);
  return {nested_chain_indices(m), nested_chain_norm(m, p), s.lo, s.hi};
}

/// max{a_p m^{1/p}, 1 + a_p (m-1)^{1/p}}: bounds every +/-1 sum of m atoms.
inline double super_fundamental_upper(std::size_t m, Exponent p) {
  if (m == 0) throw std::invalid_argument("super_fundamental_upper needs m >= 1");
  const double pv = p.value();
  const double a = geometric_factor(pv);
  const double md = static_cast<double>(m);
  return std::max(a * std::pow(md, 1.0 / pv), 1.0 + a * std::pow(md - 1.0, 1.0 / pv));
}

// ---------------------------------------------------------------------------
// Greedy constant brackets
// ---------------------------------------------------------------------------

struct GreedyConstantBounds {
  ConstantBound lower;
  ConstantBound upper;
  ConstantBound almost_greedy_lower;  // C_a, symmetry for largest coefficients
  ConstantBound almost_greedy_upper;
};

inline GreedyConstantBounds cg_bounds(Exponent p) {
  const HaarConstants c = constants(p);
  const double dp = c.democracy_lower.value;
  const double lower = std::max(c.suppression_lower.value, dp);
  const double upper = c.unconditional.value + c.bidemocracy_upper.value;
  return {
      ConstantBound::make("C_g", lower, BoundKind::lower, "C_g >= max{K_su, Delta} >= max{K_u/2, d_p}"),
      ConstantBound::make("C_g", upper, BoundKind::upper, "C_g <= K_su + Delta_sb <= (p* - 1) + D_p"),
      ConstantBound::make("C_a", dp, BoundKind::lower, "C_a >= Delta_sd >= Delta_d >= d_p"),
      ConstantBound::make("C_a", upper, BoundKind::upper, "C_a <= C_g"),
  };
}

}  // namespace haargc
