#pragma once

// Thresholding greedy algorithm over finite Haar expansions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "haargc/dyadic.hpp"

namespace haargc {

/// Raised by lebesgue_ratio when the competitor reproduces f exactly.
class ExactCompetitor : public std::domain_error {
 public:
  ExactCompetitor() : std::domain_error("exact competitor: f - sum a_j h_j has zero norm") {}
};

/// Support of f listed by non-increasing |coefficient|, ties by natural order.
struct GreedyOrdering {
  std::vector<DyadicIndex> order;
  /// magnitudes[m-1] is the rearrangement a_m^*(f).
  std::vector<double> magnitudes;

  std::size_t size() const noexcept { return order.size(); }

  /// a_m^*(f) for 1 <= m; zero past the support.
  double rearrangement(std::size_t m) const {
    if (m == 0) throw std::invalid_argument("rearrangement index starts at 1");
    return m <= magnitudes.size() ? magnitudes[m - 1] : 0.0;
  }
};

inline GreedyOrdering greedy_ordering(const HaarExpansion& f) {
  // The map already iterates in natural order; a stable sort on magnitude
  // keeps that order among equal magnitudes.
  std::vector<std::pair<DyadicIndex, double>> entries(f.coefficients().begin(), f.coefficients().end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return std::abs(a.second) > std::abs(b.second); });
  GreedyOrdering out;
  out.order.reserve(entries.size());
  out.magnitudes.reserve(entries.size());
  for (const auto& [idx, c] : entries) {
    out.order.push_back(idx);
    out.magnitudes.push_back(std::abs(c));
  }
  return out;
}

/// G_m(f): keeps the first m terms of the greedy ordering.
inline HaarExpansion greedy_sum(const HaarExpansion& f, std::size_t m) {
  const GreedyOrdering rho = greedy_ordering(f);
  HaarExpansion out(f.exponent());
  for (std::size_t n = 0; n < std::min(m, rho.size()); ++n) out.set(rho.order[n], f.coefficient(rho.order[n]));
  return out;
}

/// Coordinate projection S_A.
inline HaarExpansion project(const HaarExpansion& f, std::span<const DyadicIndex> indices) {
  HaarExpansion out(f.exponent());
  for (const auto& idx : indices) out.set(idx, f.coefficient(idx));
  return out;
}

inline HaarExpansion project(const HaarExpansion& f, const std::set<DyadicIndex>& indices) {
  return project(f, std::vector<DyadicIndex>(indices.begin(), indices.end()));
}

/// A choice of sign +1 or -1 per index.
class SignPattern {
 public:
  SignPattern() = default;

  /// Same sign on every listed index.
  static SignPattern uniform(std::span<const DyadicIndex> indices, int sign) {
    SignPattern out;
    for (const auto& idx : indices) out.set(idx, sign);
    return out;
  }

  void set(const DyadicIndex& idx, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
    signs_[idx] = sign;
  }

  bool contains(const DyadicIndex& idx) const { return signs_.contains(idx); }
  int at(const DyadicIndex& idx) const {
    const auto it = signs_.find(idx);
    if (it == signs_.end()) throw std::out_of_range("no sign for index " + to_string(idx));
    return it->second;
  }

  const std::map<DyadicIndex, int>& signs() const noexcept { return signs_; }

 private:
  std::map<DyadicIndex, int> signs_;
};

/// M_eps f: flips coefficient signs. Every supported index needs a sign.
inline HaarExpansion sign_flip(const HaarExpansion& f, const SignPattern& eps) {
  HaarExpansion out(f.exponent());
  for (const auto& [idx, c] : f.coefficients()) {
    if (!eps.contains(idx)) throw std::invalid_argument("sign pattern missing index " + to_string(idx));
    out.set(idx, eps.at(idx) * c);
  }
  return out;
}

/// ||f - G_m f||_p / ||f - sum_{j in A} a_j h_j||_p, a lower bound for the
/// m-th Lebesgue greedy constant.
inline double lebesgue_ratio(const HaarExpansion& f, std::size_t m, std::span<const DyadicIndex> competitor,
                             std::span<const double> coeffs) {
  if (competitor.size() != m) {
    throw std::invalid_argument("competitor set has " + std::to_string(competitor.size()) +
                                " indices, expected m = " + std::to_string(m));
  }
  if (coeffs.size() != competitor.size()) throw std::invalid_argument("one coefficient per competitor index");
  if (std::set<DyadicIndex>(competitor.begin(), competitor.end()).size() != competitor.size()) {
    throw std::invalid_argument("competitor indices must be distinct");
  }
  HaarExpansion approx(f.exponent());
  for (std::size_t j = 0; j < competitor.size(); ++j) approx.set(competitor[j], coeffs[j]);
  const HaarExpansion residual = f - approx;
  const double denominator = residual.empty() ? 0.0 : norm(residual);
  if (denominator == 0.0) throw ExactCompetitor();
  return norm(f - greedy_sum(f, m)) / denominator;
}

}  // namespace haargc
