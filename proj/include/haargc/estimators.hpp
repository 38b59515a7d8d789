#pragma once

// Brute-force estimation of fundamental functions, democracy constants and
// B_m over a finite universe of Haar atoms, certified Lebesgue-constant
// witnesses, and seeded audits of the inequalities linking them.
//
// Search values are suprema over a truncated index set, hence lower bounds
// for the true constants; every report says so.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "haargc/bounds.hpp"
#include "haargc/closed_form.hpp"
#include "haargc/dyadic.hpp"
#include "haargc/greedy.hpp"

namespace haargc {

/// Maximum number of norm evaluations a single search may perform.
inline constexpr std::uint64_t kSearchBudget = 10'000'000;

/// Absolute slack allowed when checking inequalities.
inline constexpr double kInequalityTolerance = 1e-9;

class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(std::uint64_t count)
      : std::runtime_error("search budget exceeded: " + std::to_string(count) + " evaluations > " +
                           std::to_string(kSearchBudget)),
        count_(count) {}
  std::uint64_t count() const noexcept { return count_; }

 private:
  std::uint64_t count_;
};

/// Constant atom plus every interval of level <= depth, in natural order.
class IndexUniverse {
 public:
  /// One bit per index in a 64-bit mask.
  static constexpr int kMaxDepth = 5;

  explicit IndexUniverse(int depth) : depth_(depth) {
    if (depth < 0 || depth > kMaxDepth) {
      throw std::invalid_argument("universe depth " + std::to_string(depth) + " outside [0, " +
                                  std::to_string(kMaxDepth) + "]");
    }
    const std::uint64_t count = std::uint64_t{1} << (depth + 1);
    indices_.reserve(count);
    for (std::uint64_t r = 0; r < count; ++r) indices_.push_back(from_natural_rank(r));
  }

  int depth() const noexcept { return depth_; }
  /// Grid depth on which every atom of the universe is a step function.
  int grid_depth() const noexcept { return depth_ + 1; }
  std::size_t size() const noexcept { return indices_.size(); }
  std::span<const DyadicIndex> indices() const noexcept { return indices_; }
  const DyadicIndex& operator[](std::size_t i) const { return indices_[i]; }

  bool contains(const DyadicIndex& idx) const {
    return idx.is_constant() || static_cast<int>(idx.level()) <= depth_;
  }

 private:
  int depth_;
  std::vector<DyadicIndex> indices_;
};

enum class Quantity { phi, phi_eps, bm, delta, delta_s, delta_d, delta_sd };

inline std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::phi: return "phi";
    case Quantity::phi_eps: return "phieps";
    case Quantity::bm: return "bm";
    case Quantity::delta: return "delta";
    case Quantity::delta_s: return "deltas";
    case Quantity::delta_d: return "deltad";
    case Quantity::delta_sd: return "deltasd";
  }
  return "unknown";
}

/// Whether coefficients are all +1 or arbitrary signs.
enum class Signs { plus, any };
/// Whether the two sets compared by a democracy search may intersect.
enum class Overlap { any, disjoint };

/// The maximising configuration of a search. `first` is the set whose norm is
/// maximised (numerator); `second` is the denominator set for democracy
/// searches or the dual-exponent set for B_m. `r` is the cardinality at which
/// B_m attains its value.
struct SearchWitness {
  std::vector<DyadicIndex> first;
  std::vector<int> first_signs;
  std::vector<DyadicIndex> second;
  std::vector<int> second_signs;
  std::size_t r = 0;
};

struct SearchReport {
  Quantity quantity;
  double p;
  int depth;
  std::size_t m;
  ConstantBound estimate;
  SearchWitness witness;
  std::uint64_t enumerated_count = 0;
};

namespace detail {

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double acc = 1.0L;
  for (std::uint64_t i = 1; i <= k; ++i) acc = acc * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  if (acc > static_cast<long double>(std::numeric_limits<std::uint64_t>::max() / 4)) {
    return std::numeric_limits<std::uint64_t>::max() / 4;
  }
  return static_cast<std::uint64_t>(std::llround(acc));
}

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / 4 / a) return std::numeric_limits<std::uint64_t>::max() / 4;
  return a * b;
}

inline std::uint64_t signed_pattern_count(std::size_t m) { return std::uint64_t{1} << (m == 0 ? 0 : m - 1); }

inline void check_budget(std::uint64_t count) {
  if (count > kSearchBudget) throw BudgetExceeded(count);
}

/// |x|^p with exact fast paths for the small integer and half-integer
/// exponents that dominate the audits.
class PowerLaw {
 public:
  explicit PowerLaw(double p) : p_(p) {
    const double twice = 2.0 * p;
    if (twice == std::round(twice) && twice <= 16.0) half_steps_ = static_cast<int>(twice);
  }

  double operator()(double x) const {
    x = std::abs(x);
    if (half_steps_ == 0) return std::pow(x, p_);
    double out = (half_steps_ & 1) ? std::sqrt(x) : 1.0;
    for (int k = 0; k < half_steps_ / 2; ++k) out *= x;
    return out;
  }

 private:
  double p_;
  int half_steps_ = 0;
};

/// Grid representation of the atoms of a universe at one exponent, used to
/// evaluate norms of signed sums quickly.
class AtomGrid {
 public:
  AtomGrid(const IndexUniverse& universe, Exponent p)
      : p_(p.value()), power_(p.value()), scratch_(std::size_t{1} << universe.grid_depth(), 0.0) {
    const int depth = universe.grid_depth();
    cell_measure_ = pow2(-depth);
    for (const auto& idx : universe.indices()) {
      Atom a;
      if (idx.is_constant()) {
        a.first = 0;
        a.half = scratch_.size() / 2;
        a.amplitude = 1.0;
        a.constant = true;
      } else {
        a.half = std::size_t{1} << (depth - static_cast<int>(idx.level()) - 1);
        a.first = static_cast<std::size_t>(idx.offset()) * 2 * a.half;
        a.amplitude = haar_amplitude(idx.level(), p_);
      }
      atoms_.push_back(a);
    }
  }

  double p() const noexcept { return p_; }

  /// ||sum_j s_j h_{positions[j]}||_p with s_j = -1 where bit j of
  /// negative_bits is set.
  double signed_sum_norm(std::span<const int> positions, std::uint64_t negative_bits) {
    std::fill(scratch_.begin(), scratch_.end(), 0.0);
    for (std::size_t j = 0; j < positions.size(); ++j) {
      add(scratch_, positions[j], ((negative_bits >> j) & 1U) ? -1.0 : 1.0);
    }
    return norm_of(scratch_);
  }

  void add(std::span<double> cells, int position, double coeff) const {
    const Atom& a = atoms_[static_cast<std::size_t>(position)];
    const double amp = coeff * a.amplitude;
    if (a.constant) {
      for (double& v : cells) v += amp;
      return;
    }
    for (std::size_t k = 0; k < a.half; ++k) cells[a.first + k] -= amp;
    for (std::size_t k = a.half; k < 2 * a.half; ++k) cells[a.first + k] += amp;
  }

  double norm_of(std::span<const double> cells) const {
    double acc = 0.0;
    for (double v : cells) acc += power_(v);
    return std::pow(acc * cell_measure_, 1.0 / p_);
  }

  std::size_t cell_count() const noexcept { return scratch_.size(); }

 private:
  struct Atom {
    std::size_t first = 0;
    std::size_t half = 0;
    double amplitude = 1.0;
    bool constant = false;
  };

  double p_;
  PowerLaw power_;
  std::vector<double> scratch_;
  std::vector<Atom> atoms_;
  double cell_measure_ = 1.0;
};

/// Calls visit(positions) for every m-subset of {0..n-1} in lexicographic order.
template <typename Visit>
void for_each_combination(std::size_t n, std::size_t m, Visit&& visit) {
  if (m > n) return;
  std::vector<int> c(m);
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    visit(std::span<const int>(c));
    if (m == 0) return;
    std::size_t i = m;
    while (i > 0 && c[i - 1] == static_cast<int>(n - m + i - 1)) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t j = i; j < m; ++j) c[j] = c[j - 1] + 1;
  }
}

inline std::uint64_t mask_of(std::span<const int> positions) {
  std::uint64_t mask = 0;
  for (int pos : positions) mask |= std::uint64_t{1} << pos;
  return mask;
}

struct SetExtremes {
  std::vector<int> positions;
  double max_value = -1.0;
  std::uint64_t max_signs = 0;
  double min_value = std::numeric_limits<double>::infinity();
  std::uint64_t min_signs = 0;
};

/// Largest and smallest norm over sign patterns (first sign fixed to +1,
/// since the norm is invariant under eps -> -eps).
inline SetExtremes set_extremes(AtomGrid& grid, std::span<const int> positions, Signs signs) {
  SetExtremes out;
  out.positions.assign(positions.begin(), positions.end());
  const std::uint64_t patterns = signs == Signs::any ? signed_pattern_count(positions.size()) : 1;
  for (std::uint64_t t = 0; t < patterns; ++t) {
    const std::uint64_t negative = t << 1;  // bit 0 (first element) stays +1
    const double v = grid.signed_sum_norm(positions, negative);
    if (v > out.max_value) {
      out.max_value = v;
      out.max_signs = negative;
    }
    if (v < out.min_value) {
      out.min_value = v;
      out.min_signs = negative;
    }
  }
  return out;
}

inline std::vector<DyadicIndex> indices_at(const IndexUniverse& u, std::span<const int> positions) {
  std::vector<DyadicIndex> out;
  for (int pos : positions) out.push_back(u[static_cast<std::size_t>(pos)]);
  return out;
}

inline std::vector<int> sign_vector(std::size_t count, std::uint64_t negative_bits) {
  std::vector<int> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = ((negative_bits >> j) & 1U) ? -1 : 1;
  return out;
}

inline void check_m(const IndexUniverse& u, std::size_t m) {
  if (m == 0 || m > u.size()) {
    throw std::invalid_argument("m = " + std::to_string(m) + " outside [1, " + std::to_string(u.size()) + "]");
  }
}

/// Best signed (or plain) sum of exactly m atoms.
inline SetExtremes best_sum_of_size(const IndexUniverse& u, AtomGrid& grid, std::size_t m, Signs signs) {
  SetExtremes best;
  for_each_combination(u.size(), m, [&](std::span<const int> positions) {
    SetExtremes e = set_extremes(grid, positions, signs);
    if (e.max_value > best.max_value) best = std::move(e);
  });
  return best;
}

inline std::string universe_method(const IndexUniverse& u) {
  return "exhaustive search over the depth-" + std::to_string(u.depth()) + " universe (" +
         std::to_string(u.size()) + " atoms); lower bound for the full constant";
}

inline std::uint64_t fundamental_count(const IndexUniverse& u, std::size_t m, Signs signs) {
  if (signs == Signs::any) return saturating_mul(binomial(u.size(), m), signed_pattern_count(m));
  std::uint64_t total = 0;
  for (std::size_t r = 1; r <= m; ++r) total += binomial(u.size(), r);
  return total;
}

}  // namespace detail

/// Norm of sum_j s_j h_{indices[j]} at exponent p, synthesized on the grid.
inline double signed_sum_norm(std::span<const DyadicIndex> indices, std::span<const int> signs, Exponent p) {
  HaarExpansion f(p);
  for (std::size_t j = 0; j < indices.size(); ++j) f.add(indices[j], j < signs.size() ? signs[j] : 1);
  return norm(f);
}

/// phi_m (plain, sup over |A| <= m) or phi^eps_m (signed, |A| = m) restricted
/// to the universe.
inline SearchReport fundamental_search(const IndexUniverse& u, std::size_t m, Exponent p, Signs signs) {
  detail::check_m(u, m);
  const std::uint64_t count = detail::fundamental_count(u, m, signs);
  detail::check_budget(count);
  detail::AtomGrid grid(u, p);

  detail::SetExtremes best;
  if (signs == Signs::any) {
    best = detail::best_sum_of_size(u, grid, m, Signs::any);
  } else {
    for (std::size_t r = 1; r <= m; ++r) {
      detail::SetExtremes e = detail::best_sum_of_size(u, grid, r, Signs::plus);
      if (e.max_value > best.max_value) best = std::move(e);
    }
  }

  SearchReport report{signs == Signs::any ? Quantity::phi_eps : Quantity::phi,
                      p.value(),
                      u.depth(),
                      m,
                      {},
                      {},
                      count};
  report.witness.first = detail::indices_at(u, best.positions);
  report.witness.first_signs = detail::sign_vector(best.positions.size(), best.max_signs);
  report.witness.r = best.positions.size();
  const double value = signed_sum_norm(report.witness.first, report.witness.first_signs, p);
  report.estimate = ConstantBound::make(signs == Signs::any ? "phi^eps_m" : "phi_m", value, BoundKind::lower,
                                        detail::universe_method(u));
  return report;
}

/// B_m = max_{r <= m} phi^eps_r(p) phi^eps_r(p') / r on the universe.
inline SearchReport bm_search(const IndexUniverse& u, std::size_t m, Exponent p) {
  detail::check_m(u, m);
  const Exponent dual = p.dual();
  double best = -1.0;
  SearchReport report{Quantity::bm, p.value(), u.depth(), m, {}, {}, 0};
  for (std::size_t r = 1; r <= m; ++r) {
    const SearchReport primal = fundamental_search(u, r, p, Signs::any);
    const SearchReport dualr = fundamental_search(u, r, dual, Signs::any);
    report.enumerated_count += primal.enumerated_count + dualr.enumerated_count;
    const double v = primal.estimate.value * dualr.estimate.value / static_cast<double>(r);
    if (v > best) {
      best = v;
      report.witness.first = primal.witness.first;
      report.witness.first_signs = primal.witness.first_signs;
      report.witness.second = dualr.witness.first;
      report.witness.second_signs = dualr.witness.first_signs;
      report.witness.r = r;
    }
  }
  report.estimate = ConstantBound::make("B_m", best, BoundKind::lower, detail::universe_method(u));
  return report;
}

/// Largest ratio ||sum_A eps_j h_j|| / ||sum_B delta_j h_j|| over |A| = |B| = m,
/// optionally with signs and/or A and B disjoint. Lower bound for Delta,
/// Delta_s, Delta_d or Delta_sd.
inline SearchReport democracy_search(const IndexUniverse& u, std::size_t m, Exponent p, Signs signs, Overlap overlap) {
  detail::check_m(u, m);
  if (overlap == Overlap::disjoint && 2 * m > u.size()) {
    throw std::invalid_argument("no two disjoint " + std::to_string(m) + "-sets in a universe of " +
                                std::to_string(u.size()));
  }
  const std::uint64_t patterns = signs == Signs::any ? detail::signed_pattern_count(m) : 1;
  const std::uint64_t count = detail::saturating_mul(detail::binomial(u.size(), m), patterns);
  detail::check_budget(count);
  detail::AtomGrid grid(u, p);

  std::vector<detail::SetExtremes> sets;
  detail::for_each_combination(u.size(), m, [&](std::span<const int> positions) {
    sets.push_back(detail::set_extremes(grid, positions, signs));
  });

  const detail::SetExtremes* num = nullptr;
  const detail::SetExtremes* den = nullptr;
  double best = -1.0;
  if (overlap == Overlap::any) {
    for (const auto& s : sets) {
      if (num == nullptr || s.max_value > num->max_value) num = &s;
      if (den == nullptr || s.min_value < den->min_value) den = &s;
    }
    best = num->max_value / den->min_value;
  } else {
    std::vector<std::size_t> by_min(sets.size());
    std::iota(by_min.begin(), by_min.end(), 0);
    std::stable_sort(by_min.begin(), by_min.end(),
                     [&](std::size_t a, std::size_t b) { return sets[a].min_value < sets[b].min_value; });
    std::vector<std::size_t> by_max(sets.size());
    std::iota(by_max.begin(), by_max.end(), 0);
    std::stable_sort(by_max.begin(), by_max.end(),
                     [&](std::size_t a, std::size_t b) { return sets[a].max_value > sets[b].max_value; });
    const double smallest = sets[by_min.front()].min_value;
    std::vector<std::uint64_t> masks(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) masks[i] = detail::mask_of(sets[i].positions);
    for (std::size_t a : by_max) {
      if (sets[a].max_value / smallest <= best) break;
      for (std::size_t b : by_min) {
        if ((masks[a] & masks[b]) != 0) continue;
        const double ratio = sets[a].max_value / sets[b].min_value;
        if (ratio > best) {
          best = ratio;
          num = &sets[a];
          den = &sets[b];
        }
        break;
      }
    }
  }

  const Quantity q = signs == Signs::any ? (overlap == Overlap::any ? Quantity::delta_s : Quantity::delta_sd)
                                         : (overlap == Overlap::any ? Quantity::delta : Quantity::delta_d);
  SearchReport report{q, p.value(), u.depth(), m, {}, {}, count};
  report.witness.first = detail::indices_at(u, num->positions);
  report.witness.first_signs = detail::sign_vector(m, num->max_signs);
  report.witness.second = detail::indices_at(u, den->positions);
  report.witness.second_signs = detail::sign_vector(m, den->min_signs);
  report.witness.r = m;
  const double value = signed_sum_norm(report.witness.first, report.witness.first_signs, p) /
                       signed_sum_norm(report.witness.second, report.witness.second_signs, p);
  static constexpr const char* kNames[] = {"Delta", "Delta_s", "Delta_d", "Delta_sd"};
  const int name = (signs == Signs::any ? 1 : 0) + (overlap == Overlap::disjoint ? 2 : 0);
  report.estimate = ConstantBound::make(kNames[name], value, BoundKind::lower, detail::universe_method(u));
  return report;
}

/// Recomputes a report's value from its witness alone.
inline double evaluate_witness(const SearchReport& report) {
  const Exponent p{report.p};
  const auto& w = report.witness;
  switch (report.quantity) {
    case Quantity::phi:
    case Quantity::phi_eps:
      return signed_sum_norm(w.first, w.first_signs, p);
    case Quantity::bm:
      return signed_sum_norm(w.first, w.first_signs, p) * signed_sum_norm(w.second, w.second_signs, p.dual()) /
             static_cast<double>(w.r);
    default:
      return signed_sum_norm(w.first, w.first_signs, p) / signed_sum_norm(w.second, w.second_signs, p);
  }
}

// ---------------------------------------------------------------------------
// Lebesgue witness
// ---------------------------------------------------------------------------

enum class WitnessCheck {
  when_feasible,     // evaluate on the grid if it fits, else closed forms
  required,          // grid evaluation or error
  closed_form_only,  // never touch the grid
};

struct LebesgueWitness {
  double bound;      // certified lower bound for L_m and C_g
  double predicted;  // the same ratio from closed-form norms
  bool grid_verified;
  HaarExpansion f;
  std::vector<DyadicIndex> competitor;
  std::vector<double> competitor_coeffs;
};

/// f = sum_{light} h + (1 + delta) sum_{heavy} h with the nested chain and a
/// disjoint family placed in [1/2, 1). For p >= 2 the disjoint family is
/// heavy, for p < 2 the chain is. Greedy keeps the heavy set; the competitor
/// deletes the light set instead, so
///   bound = ||sum_light h|| / ((1 + delta) ||sum_heavy h||).
inline LebesgueWitness lebesgue_witness(std::size_t m, Exponent p, double delta,
                                        WitnessCheck check = WitnessCheck::when_feasible) {
  if (m == 0) throw std::invalid_argument("witness needs m >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("witness needs 0 < delta <= 1");

  const std::vector<DyadicIndex> chain = nested_chain_indices(m);
  const std::vector<DyadicIndex> disjoint = disjoint_family_indices(m, 1);
  const bool chain_is_light = p.value() >= 2.0;
  const auto& light = chain_is_light ? chain : disjoint;
  const auto& heavy = chain_is_light ? disjoint : chain;

  HaarExpansion f(p);
  for (const auto& idx : light) f.set(idx, 1.0);
  for (const auto& idx : heavy) f.set(idx, 1.0 + delta);

  const double chain_norm = nested_chain_norm(m, p);
  const double disjoint_norm = std::pow(static_cast<double>(m), 1.0 / p.value());
  const double light_norm = chain_is_light ? chain_norm : disjoint_norm;
  const double heavy_norm = chain_is_light ? disjoint_norm : chain_norm;

  LebesgueWitness out{light_norm / ((1.0 + delta) * heavy_norm), 0.0, false, f, light,
                      std::vector<double>(m, 1.0)};
  out.predicted = out.bound;

  const GreedyOrdering rho = greedy_ordering(f);
  if (!std::is_permutation(rho.order.begin(), rho.order.begin() + static_cast<std::ptrdiff_t>(m), heavy.begin(),
                           heavy.end())) {
    throw std::logic_error("greedy step did not select the heavy set");
  }

  const bool fits = f.required_depth() <= kMaxGridDepth;
  if (check == WitnessCheck::required && !fits) {
    throw InsufficientResolution(kMaxGridDepth, f.required_depth());
  }
  if (check != WitnessCheck::closed_form_only && fits) {
    out.bound = lebesgue_ratio(f, m, out.competitor, out.competitor_coeffs);
    out.grid_verified = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Inequality audit
// ---------------------------------------------------------------------------

/// Universe-restricted fundamental functions at p and p', indexed by m - 1.
struct AuditTables {
  int depth = 0;
  double p = 2.0;
  std::vector<double> phi;           // phi_m, sup over |A| <= m
  std::vector<double> phi_eps;       // phi^eps_m at p
  std::vector<double> phi_eps_dual;  // phi^eps_m at p'
  std::vector<double> bm;            // B_m
  std::uint64_t enumerated_count = 0;
};

inline AuditTables audit_tables(const IndexUniverse& u, Exponent p) {
  const std::size_t n = u.size();
  for (std::size_t m = 1; m <= n; ++m) {
    detail::check_budget(detail::fundamental_count(u, m, Signs::any));
  }
  AuditTables t;
  t.depth = u.depth();
  t.p = p.value();
  detail::AtomGrid primal(u, p);
  detail::AtomGrid dual(u, p.dual());
  double running_phi = 0.0;
  double running_bm = 0.0;
  for (std::size_t m = 1; m <= n; ++m) {
    running_phi = std::max(running_phi, detail::best_sum_of_size(u, primal, m, Signs::plus).max_value);
    t.phi.push_back(running_phi);
    t.phi_eps.push_back(detail::best_sum_of_size(u, primal, m, Signs::any).max_value);
    t.phi_eps_dual.push_back(detail::best_sum_of_size(u, dual, m, Signs::any).max_value);
    running_bm = std::max(running_bm, t.phi_eps.back() * t.phi_eps_dual.back() / static_cast<double>(m));
    t.bm.push_back(running_bm);
    t.enumerated_count += detail::binomial(n, m) + 2 * detail::fundamental_count(u, m, Signs::any);
  }
  return t;
}

/// Running tally for one inequality lhs <= rhs + tolerance.
struct ClauseSummary {
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();

  void record(double lhs, double rhs) {
    ++checks;
    const double slack = rhs - lhs;
    min_slack = std::min(min_slack, slack);
    if (slack < -kInequalityTolerance) ++violations;
  }
};

struct AuditReport {
  double p = 2.0;
  int depth = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  ClauseSummary lemma;              // a_m^*(f) phi^eps_m <= B_m ||f||
  ClauseSummary lebesgue;           // ratio <= khat_{2m} + B_m
  ClauseSummary lebesgue_instance;  // ratio <= ||g - S_{A u G} g|| / ||g|| + B_m
  ClauseSummary sandwich;           // phi_m <= phi^eps_m <= 2 phi_m
  std::vector<double> suppression;  // khat_{2m} per m (NaN when m was not sampled)
  std::vector<double> bm;

  std::uint64_t violations() const {
    return lemma.violations + lebesgue.violations + lebesgue_instance.violations + sandwich.violations;
  }
};

/// a_m^*(f) phi^eps_m(U) <= B_m(U) ||f||_p for every m <= |supp f|.
inline void audit_lemma(const HaarExpansion& f, const AuditTables& t, ClauseSummary& out) {
  const GreedyOrdering rho = greedy_ordering(f);
  const double f_norm = norm(f);
  for (std::size_t m = 1; m <= rho.size() && m <= t.phi_eps.size(); ++m) {
    out.record(rho.rearrangement(m) * t.phi_eps[m - 1], t.bm[m - 1] * f_norm);
  }
}

inline void audit_sandwich(const AuditTables& t, ClauseSummary& out) {
  for (std::size_t m = 0; m < t.phi.size(); ++m) {
    out.record(t.phi[m], t.phi_eps[m]);
    out.record(t.phi_eps[m], 2.0 * t.phi[m]);
  }
}

namespace detail {

/// max over E within supp g, |E| <= max_removed, of ||g - S_E g|| / ||g||.
inline double suppression_sup(const HaarExpansion& g, const IndexUniverse& u, AtomGrid& grid, std::size_t max_removed) {
  std::vector<int> positions;
  std::vector<double> coeffs;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double c = g.coefficient(u[i]);
    if (c != 0.0) {
      positions.push_back(static_cast<int>(i));
      coeffs.push_back(c);
    }
  }
  const std::size_t s = positions.size();
  std::uint64_t count = 0;
  for (std::size_t r = 0; r <= std::min(s, max_removed); ++r) count += binomial(s, r);
  check_budget(count);

  std::vector<double> full(grid.cell_count(), 0.0);
  for (std::size_t j = 0; j < s; ++j) grid.add(full, positions[j], coeffs[j]);
  const double g_norm = grid.norm_of(full);
  if (g_norm == 0.0) throw ExactCompetitor();

  // Gray-code walk over removal masks; rebuild periodically to bound drift.
  std::vector<double> residual = full;
  double best = 1.0;  // E = empty
  const std::uint64_t total = std::uint64_t{1} << s;
  std::uint64_t mask = 0;
  for (std::uint64_t step = 1; step < total; ++step) {
    const int bit = std::countr_zero(step);
    mask ^= std::uint64_t{1} << bit;
    if ((step & 1023U) == 0) {
      residual = full;
      for (std::size_t j = 0; j < s; ++j) {
        if ((mask >> j) & 1U) grid.add(residual, positions[j], -coeffs[j]);
      }
    } else {
      const double sign = ((mask >> bit) & 1U) ? -1.0 : 1.0;
      grid.add(residual, positions[static_cast<std::size_t>(bit)], sign * coeffs[static_cast<std::size_t>(bit)]);
    }
    if (static_cast<std::size_t>(std::popcount(mask)) <= max_removed) {
      best = std::max(best, grid.norm_of(residual) / g_norm);
    }
  }
  return best;
}

}  // namespace detail

/// Seeded audit of the finite-universe forms of
///   (a) a_m^*(f) phi^eps_m <= B_m ||f||,
///   (b) L_m <= k^c_{2m} + B_m on sampled competitors,
///   (c) phi_m <= phi^eps_m <= 2 phi_m.
/// Every trial draws its own generator from (seed, trial), so reports do
/// not depend on evaluation order.
inline AuditReport inequality_audit(const IndexUniverse& u, std::size_t trials, std::uint64_t seed, Exponent p,
                                    const AuditTables* precomputed = nullptr) {
  AuditTables computed;
  if (precomputed == nullptr) {
    computed = audit_tables(u, p);
    precomputed = &computed;
  }
  const AuditTables& t = *precomputed;
  if (t.depth != u.depth() || t.p != p.value()) throw std::invalid_argument("audit tables do not match");

  AuditReport report;
  report.p = p.value();
  report.depth = u.depth();
  report.trials = trials;
  report.seed = seed;
  report.bm = t.bm;
  const std::size_t n = u.size();
  report.suppression.assign(n, std::numeric_limits<double>::quiet_NaN());
  audit_sandwich(t, report.sandwich);

  detail::AtomGrid grid(u, p);
  struct Sample {
    std::size_t m;
    double ratio;
  };
  std::vector<Sample> samples;

  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);

    HaarExpansion f(p);
    for (const auto& idx : u.indices()) f.set(idx, coeff(rng));
    audit_lemma(f, t, report.lemma);

    // One sampled competitor per trial.
    const std::size_t support = f.size();
    if (support == 0) continue;
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, support)(rng);
    std::vector<DyadicIndex> pool = f.support();
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<DyadicIndex> competitor(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(competitor.begin(), competitor.end());
    const bool use_projection = std::bernoulli_distribution(0.5)(rng) && m < support;
    std::vector<double> a(m);
    for (std::size_t j = 0; j < m; ++j) a[j] = use_projection ? f.coefficient(competitor[j]) : coeff(rng);

    HaarExpansion approx(p);
    for (std::size_t j = 0; j < m; ++j) approx.set(competitor[j], a[j]);
    const HaarExpansion g = f - approx;
    if (g.empty()) continue;

    const double ratio = lebesgue_ratio(f, m, competitor, a);
    const GreedyOrdering rho = greedy_ordering(f);
    std::set<DyadicIndex> removed(competitor.begin(), competitor.end());
    removed.insert(rho.order.begin(), rho.order.begin() + static_cast<std::ptrdiff_t>(m));
    const double g_norm = norm(g);
    const double instance = norm(g - project(g, removed)) / g_norm;
    report.lebesgue_instance.record(ratio, instance + t.bm[m - 1]);

    const double khat = detail::suppression_sup(g, u, grid, 2 * m);
    double& slot = report.suppression[m - 1];
    slot = std::isnan(slot) ? khat : std::max(slot, khat);
    samples.push_back({m, ratio});
  }

  for (const auto& s : samples) report.lebesgue.record(s.ratio, report.suppression[s.m - 1] + t.bm[s.m - 1]);
  return report;
}

}  // namespace haargc
