#pragma once

// Dyadic index arithmetic and exact evaluation of finite Haar expansions.
//
// Every finite Haar polynomial is a step function on a uniform dyadic grid,
// so norms and pairings reduce to finite sums over grid cells. Nothing here
// approximates an integral.

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace haargc {

/// Largest grid depth a UniformStepFunction may have (2^20 cells).
inline constexpr int kMaxGridDepth = 20;

/// Largest interval level accepted by DyadicIndex. 2^-level must stay a
/// normal double.
inline constexpr std::uint32_t kMaxLevel = 1000;

/// Raised when a grid is too coarse for the atoms it must represent.
class InsufficientResolution : public std::invalid_argument {
 public:
  InsufficientResolution(int depth, int required)
      : std::invalid_argument("insufficient resolution: depth " + std::to_string(depth) +
                              " < required " + std::to_string(required)),
        depth_(depth),
        required_(required) {}

  int depth() const noexcept { return depth_; }
  int required() const noexcept { return required_; }

 private:
  int depth_;
  int required_;
};

inline double pow2(double x) { return std::exp2(x); }

// ---------------------------------------------------------------------------
// DyadicIndex
// ---------------------------------------------------------------------------

/// Identifies one Haar atom: either the constant function on [0,1) or the
/// dyadic interval [k 2^-n, (k+1) 2^-n).
///
/// The defaulted ordering is (constant first, then level, then offset), which
/// is exactly the natural Schauder order, so std::map<DyadicIndex, T> iterates
/// in natural_rank order even for levels whose rank does not fit in 64 bits.
class DyadicIndex {
 public:
  constexpr DyadicIndex() noexcept = default;

  static constexpr DyadicIndex constant() noexcept { return DyadicIndex{}; }

  static DyadicIndex interval(std::uint32_t level, std::uint64_t offset) {
    if (level > kMaxLevel) {
      throw std::invalid_argument("dyadic level " + std::to_string(level) + " exceeds " +
                                  std::to_string(kMaxLevel));
    }
    if (level < 64 && offset >= (std::uint64_t{1} << level)) {
      throw std::invalid_argument("offset " + std::to_string(offset) + " out of range for level " +
                                  std::to_string(level));
    }
    DyadicIndex idx;
    idx.is_interval_ = true;
    idx.level_ = level;
    idx.offset_ = offset;
    return idx;
  }

  constexpr bool is_constant() const noexcept { return !is_interval_; }
  constexpr std::uint32_t level() const noexcept { return level_; }
  constexpr std::uint64_t offset() const noexcept { return offset_; }

  /// Lebesgue measure of the support (1 for the constant atom).
  double measure() const { return is_interval_ ? pow2(-static_cast<double>(level_)) : 1.0; }

  friend constexpr auto operator<=>(const DyadicIndex&, const DyadicIndex&) = default;

 private:
  bool is_interval_ = false;
  std::uint32_t level_ = 0;
  std::uint64_t offset_ = 0;
};

/// Rank in the natural order: constant -> 0, interval (n, k) -> 2^n + k.
inline std::uint64_t natural_rank(const DyadicIndex& idx) {
  if (idx.is_constant()) return 0;
  if (idx.level() > 63) {
    throw std::overflow_error("natural rank of level " + std::to_string(idx.level()) +
                              " does not fit in 64 bits");
  }
  return (std::uint64_t{1} << idx.level()) + idx.offset();
}

inline DyadicIndex from_natural_rank(std::uint64_t rank) {
  if (rank == 0) return DyadicIndex::constant();
  const auto level = static_cast<std::uint32_t>(63 - std::countl_zero(rank));
  return DyadicIndex::interval(level, rank - (std::uint64_t{1} << level));
}

/// True when the supports of two atoms intersect (the constant meets all).
inline bool supports_overlap(const DyadicIndex& a, const DyadicIndex& b) {
  if (a.is_constant() || b.is_constant()) return true;
  const auto& coarse = a.level() <= b.level() ? a : b;
  const auto& fine = a.level() <= b.level() ? b : a;
  const std::uint32_t shift = fine.level() - coarse.level();
  // Offsets are 64-bit, so for shifts of 64 or more the ancestor has offset 0.
  if (shift >= 64) return coarse.offset() == 0;
  return (fine.offset() >> shift) == coarse.offset();
}

inline std::string to_string(const DyadicIndex& idx) {
  if (idx.is_constant()) return "C";
  return std::to_string(idx.level()) + ":" + std::to_string(idx.offset());
}

// ---------------------------------------------------------------------------
// Exponent
// ---------------------------------------------------------------------------

/// An exponent p strictly inside (1, inf).
class Exponent {
 public:
  explicit Exponent(double p) : p_(p) {
    if (!std::isfinite(p) || !(p > 1.0)) {
      throw std::invalid_argument("exponent must satisfy 1 < p < inf, got " + std::to_string(p));
    }
  }

  double value() const noexcept { return p_; }
  /// p' = p / (p - 1).
  double conjugate() const noexcept { return p_ / (p_ - 1.0); }
  /// p* = max{p, p'}.
  double star() const noexcept { return std::max(p_, conjugate()); }
  /// p# = min{p, p'}.
  double sharp() const noexcept { return std::min(p_, conjugate()); }
  Exponent dual() const { return Exponent{conjugate()}; }

  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  double p_;
};

// ---------------------------------------------------------------------------
// UniformStepFunction
// ---------------------------------------------------------------------------

/// Values of a step function on the 2^depth cells of the uniform dyadic grid.
class UniformStepFunction {
 public:
  explicit UniformStepFunction(int depth) : depth_(checked_depth(depth)), values_(cell_count(depth), 0.0) {}

  UniformStepFunction(int depth, std::vector<double> values)
      : depth_(checked_depth(depth)), values_(std::move(values)) {
    if (values_.size() != cell_count(depth_)) {
      throw std::invalid_argument("step function of depth " + std::to_string(depth_) + " needs " +
                                  std::to_string(cell_count(depth_)) + " values, got " +
                                  std::to_string(values_.size()));
    }
  }

  int depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double cell_measure() const { return pow2(-depth_); }

  /// Same function on a finer grid.
  UniformStepFunction refined(int depth) const {
    if (depth < depth_) throw InsufficientResolution(depth, depth_);
    UniformStepFunction out(depth);
    const std::size_t repeat = std::size_t{1} << (depth - depth_);
    for (std::size_t k = 0; k < values_.size(); ++k) {
      std::fill_n(out.values_.begin() + static_cast<std::ptrdiff_t>(k * repeat), repeat, values_[k]);
    }
    return out;
  }

  static std::size_t cell_count(int depth) { return std::size_t{1} << checked_depth(depth); }

 private:
  static int checked_depth(int depth) {
    if (depth < 0 || depth > kMaxGridDepth) {
      throw std::invalid_argument("grid depth " + std::to_string(depth) + " outside [0, " +
                                  std::to_string(kMaxGridDepth) + "]");
    }
    return depth;
  }

  int depth_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// HaarExpansion
// ---------------------------------------------------------------------------

/// A finitely supported coefficient family with respect to the
/// L_p-normalized Haar system. Zero coefficients are never stored.
class HaarExpansion {
 public:
  using Coefficients = std::map<DyadicIndex, double>;

  explicit HaarExpansion(Exponent p) : p_(p) {}

  HaarExpansion(Exponent p, Coefficients coeffs) : p_(p), coeffs_(std::move(coeffs)) {
    std::erase_if(coeffs_, [](const auto& kv) { return kv.second == 0.0; });
  }

  Exponent exponent() const noexcept { return p_; }
  const Coefficients& coefficients() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  bool empty() const noexcept { return coeffs_.empty(); }

  double coefficient(const DyadicIndex& idx) const {
    const auto it = coeffs_.find(idx);
    return it == coeffs_.end() ? 0.0 : it->second;
  }

  void set(const DyadicIndex& idx, double value) {
    if (value == 0.0) {
      coeffs_.erase(idx);
    } else {
      coeffs_[idx] = value;
    }
  }

  void add(const DyadicIndex& idx, double value) { set(idx, coefficient(idx) + value); }

  std::vector<DyadicIndex> support() const {
    std::vector<DyadicIndex> out;
    out.reserve(coeffs_.size());
    for (const auto& [idx, c] : coeffs_) out.push_back(idx);
    return out;
  }

  /// Smallest grid depth on which every atom is constant on cells:
  /// 1 + max level, or 0 when only the constant atom (or nothing) is present.
  int required_depth() const {
    int depth = 0;
    for (const auto& [idx, c] : coeffs_) {
      if (!idx.is_constant()) depth = std::max(depth, static_cast<int>(idx.level()) + 1);
    }
    return depth;
  }

  friend bool operator==(const HaarExpansion&, const HaarExpansion&) = default;

 private:
  Exponent p_;
  Coefficients coeffs_;
};

inline HaarExpansion operator-(const HaarExpansion& f, const HaarExpansion& g) {
  if (!(f.exponent() == g.exponent())) throw std::invalid_argument("exponent mismatch");
  HaarExpansion out = f;
  for (const auto& [idx, c] : g.coefficients()) out.add(idx, -c);
  return out;
}

inline HaarExpansion operator+(const HaarExpansion& f, const HaarExpansion& g) {
  if (!(f.exponent() == g.exponent())) throw std::invalid_argument("exponent mismatch");
  HaarExpansion out = f;
  for (const auto& [idx, c] : g.coefficients()) out.add(idx, c);
  return out;
}

inline HaarExpansion operator*(double s, const HaarExpansion& f) {
  HaarExpansion out(f.exponent());
  for (const auto& [idx, c] : f.coefficients()) out.set(idx, s * c);
  return out;
}

// ---------------------------------------------------------------------------
// Synthesis, norms, pairings, analysis
// ---------------------------------------------------------------------------

/// Amplitude |I|^{-1/p} = 2^{n/p} of the L_p-normalized atom on a level-n interval.
inline double haar_amplitude(std::uint32_t level, double p) { return pow2(static_cast<double>(level) / p); }

/// Adds coeff * h_idx^{(p)} to a grid of the given depth. The interval atom is
/// negative on the left half of its support and positive on the right half.
inline void accumulate_atom(std::span<double> cells, int depth, const DyadicIndex& idx, double p, double coeff) {
  if (idx.is_constant()) {
    for (double& v : cells) v += coeff;
    return;
  }
  const int level = static_cast<int>(idx.level());
  if (level + 1 > depth) throw InsufficientResolution(depth, level + 1);
  const std::size_t half = std::size_t{1} << (depth - level - 1);
  const std::size_t first = static_cast<std::size_t>(idx.offset()) << (depth - level);
  const double amp = coeff * haar_amplitude(idx.level(), p);
  for (std::size_t k = 0; k < half; ++k) cells[first + k] -= amp;
  for (std::size_t k = half; k < 2 * half; ++k) cells[first + k] += amp;
}

inline UniformStepFunction synthesize(const HaarExpansion& f, int depth) {
  const int required = f.required_depth();
  if (depth < required) throw InsufficientResolution(depth, required);
  UniformStepFunction s(depth);
  const double p = f.exponent().value();
  for (const auto& [idx, c] : f.coefficients()) accumulate_atom(s.values(), depth, idx, p, c);
  return s;
}

/// Synthesis at the minimal valid depth.
inline UniformStepFunction synthesize(const HaarExpansion& f) { return synthesize(f, f.required_depth()); }

inline UniformStepFunction atom(const DyadicIndex& idx, Exponent p, int depth) {
  UniformStepFunction s(depth);
  accumulate_atom(s.values(), depth, idx, p.value(), 1.0);
  return s;
}

/// (sum_k 2^-N |v_k|^p)^{1/p}.
inline double lp_norm(const UniformStepFunction& s, double p) {
  if (std::isinf(p) && p > 0) {
    double m = 0.0;
    for (double v : s.values()) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm needs p >= 1");
  double acc = 0.0;
  for (double v : s.values()) acc += std::pow(std::abs(v), p);
  return std::pow(acc * s.cell_measure(), 1.0 / p);
}

inline double lp_norm(const UniformStepFunction& s, Exponent p) { return lp_norm(s, p.value()); }

/// max_k |v_k|, the L_inf norm of a step function.
inline double sup_norm(const UniformStepFunction& s) { return lp_norm(s, HUGE_VAL); }

/// ||f||_p of a Haar expansion, evaluated exactly on its minimal grid.
inline double norm(const HaarExpansion& f) { return lp_norm(synthesize(f), f.exponent()); }

/// Integral over [0,1) of the product, refining the coarser argument.
inline double pairing(const UniformStepFunction& f, const UniformStepFunction& g) {
  if (f.depth() != g.depth()) {
    const int depth = std::max(f.depth(), g.depth());
    return pairing(f.refined(depth), g.refined(depth));
  }
  double acc = 0.0;
  const auto u = f.values();
  const auto v = g.values();
  for (std::size_t k = 0; k < u.size(); ++k) acc += u[k] * v[k];
  return acc * f.cell_measure();
}

/// Coefficients c_I = <s, h_I^{(p')}> of a step function.
///
/// Uses the pyramid of interval integrals, so the cost is O(2^depth).
/// Coefficients with |c| <= zero_tolerance * max(1, ||s||_inf) are treated as
/// round-off and dropped.
inline HaarExpansion analyze(const UniformStepFunction& s, Exponent p, double zero_tolerance = 1e-13) {
  const double dual = p.conjugate();
  const double cutoff = zero_tolerance * std::max(1.0, sup_norm(s));
  HaarExpansion out(p);
  const double cell = s.cell_measure();

  // integrals[k] = integral over the k-th interval of the current level.
  std::vector<double> integrals(s.values().begin(), s.values().end());
  for (double& v : integrals) v *= cell;

  for (int level = s.depth() - 1; level >= 0; --level) {
    const std::size_t count = std::size_t{1} << level;
    const double amp = haar_amplitude(static_cast<std::uint32_t>(level), dual);
    std::vector<double> parent(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double left = integrals[2 * k];
      const double right = integrals[2 * k + 1];
      const double c = amp * (right - left);
      if (std::abs(c) > cutoff) out.set(DyadicIndex::interval(static_cast<std::uint32_t>(level), k), c);
      parent[k] = left + right;
    }
    integrals = std::move(parent);
  }
  const double mean = integrals.front();
  if (std::abs(mean) > cutoff) out.set(DyadicIndex::constant(), mean);
  return out;
}

}  // namespace haargc
