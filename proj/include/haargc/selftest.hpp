#pragma once

// Runs the invariant and audit suite in-process and reports one line per
// check. Used by `haargc selftest`.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "haargc/closed_form.hpp"
#include "haargc/dyadic.hpp"
#include "haargc/estimators.hpp"
#include "haargc/greedy.hpp"
#include "haargc/io.hpp"

namespace haargc {

inline constexpr std::uint64_t kDefaultSeed = 42;

struct SelftestOptions {
  std::uint64_t seed = kDefaultSeed;
  std::size_t trials = 1000;
  int depth = 3;
  std::vector<double> audit_exponents = {1.5, 3.0};
  std::vector<double> exponent_grid = {1.1, 1.5, 2.0, 3.0, 4.0, 8.0};
};

namespace detail {

class CheckLog {
 public:
  explicit CheckLog(std::ostream& out) : out_(out) {}

  void report(const std::string& name, std::uint64_t checks, std::uint64_t violations, const std::string& extra = {}) {
    out_ << (violations == 0 ? "PASS " : "FAIL ") << name << ": " << checks << " checks, " << violations
         << " violations";
    if (!extra.empty()) out_ << ", " << extra;
    out_ << "\n";
    total_ += violations;
  }

  std::uint64_t total() const noexcept { return total_; }

 private:
  std::ostream& out_;
  std::uint64_t total_ = 0;
};

inline HaarExpansion random_expansion(std::mt19937_64& rng, Exponent p, int max_grid_depth) {
  const int grid = std::uniform_int_distribution<int>(1, max_grid_depth)(rng);
  const IndexUniverse u(grid - 1);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::bernoulli_distribution keep(0.6);
  HaarExpansion f(p);
  for (const auto& idx : u.indices()) {
    if (keep(rng)) f.set(idx, coeff(rng));
  }
  if (f.empty()) f.set(DyadicIndex::interval(static_cast<std::uint32_t>(grid - 1), 0), coeff(rng));
  return f;
}

}  // namespace detail

/// Returns the number of violated checks (0 on a correct build).
inline std::uint64_t run_selftest(const SelftestOptions& opt, std::ostream& out) {
  detail::CheckLog log(out);
  std::mt19937_64 rng(opt.seed);

  {  // Normalization and biorthogonality on a depth-3 universe.
    std::uint64_t checks = 0;
    std::uint64_t bad = 0;
    const IndexUniverse u(3);
    for (double pv : opt.exponent_grid) {
      const Exponent p(pv);
      for (const auto& a : u.indices()) {
        const auto ha = atom(a, p, u.grid_depth());
        ++checks;
        if (std::abs(lp_norm(ha, p) - 1.0) > 1e-12) ++bad;
        for (const auto& b : u.indices()) {
          ++checks;
          const double expected = a == b ? 1.0 : 0.0;
          if (std::abs(pairing(ha, atom(b, p.dual(), u.grid_depth())) - expected) > 1e-12) ++bad;
        }
      }
    }
    log.report("normalization and biorthogonality", checks, bad);
  }

  {  // analyze(synthesize(f)) == f.
    std::uint64_t bad = 0;
    const std::size_t samples = 200;
    for (std::size_t s = 0; s < samples; ++s) {
      const Exponent p(opt.exponent_grid[s % opt.exponent_grid.size()]);
      const HaarExpansion f = detail::random_expansion(rng, p, 6);
      const HaarExpansion back = analyze(synthesize(f, f.required_depth() + 1), p);
      double err = 0.0;
      for (const auto& [idx, c] : f.coefficients()) err = std::max(err, std::abs(back.coefficient(idx) - c));
      for (const auto& [idx, c] : back.coefficients()) err = std::max(err, std::abs(f.coefficient(idx) - c));
      if (err > 1e-12) ++bad;
    }
    log.report("analysis inverts synthesis", samples, bad);
  }

  {  // Disjoint family and nested chain identities.
    std::uint64_t checks = 0;
    std::uint64_t bad = 0;
    for (double pv : opt.exponent_grid) {
      const Exponent p(pv);
      for (std::size_t m = 1; m <= 64; ++m) {
        const DisjointFamily fam = disjoint_family(m, p);
        HaarExpansion f(p);
        for (const auto& idx : fam.indices) f.set(idx, 1.0);
        ++checks;
        if (std::abs(norm(f) - fam.norm) > 1e-12) ++bad;
      }
      const std::vector<double> chain = nested_chain_norms(100000, p);
      for (std::size_t m = 1; m <= chain.size(); ++m) {
        const ChainSandwich s = chain_sandwich(m, p);
        ++checks;
        if (!(s.lo <= chain[m - 1] && chain[m - 1] <= s.hi)) ++bad;
        if (m <= 12) {
          HaarExpansion f(p);
          for (const auto& idx : nested_chain_indices(m)) f.set(idx, 1.0);
          ++checks;
          if (std::abs(lp_norm(synthesize(f, static_cast<int>(m) + 1), p) - chain[m - 1]) > 1e-10) ++bad;
        }
      }
    }
    log.report("disjoint family and nested chain norms", checks, bad);
  }

  {  // Sign flips never exceed Burkholder's constant.
    std::uint64_t checks = 0;
    std::uint64_t bad = 0;
    for (double pv : opt.exponent_grid) {
      const Exponent p(pv);
      for (int s = 0; s < 100; ++s) {
        const HaarExpansion f = detail::random_expansion(rng, p, 6);
        SignPattern eps;
        for (const auto& [idx, c] : f.coefficients()) eps.set(idx, std::bernoulli_distribution(0.5)(rng) ? 1 : -1);
        ++checks;
        if (norm(sign_flip(f, eps)) > (p.star() - 1.0) * norm(f) + kInequalityTolerance) ++bad;
      }
    }
    log.report("sign flips bounded by p* - 1", checks, bad);
  }

  {  // Search values never exceed the closed-form upper bounds.
    std::uint64_t checks = 0;
    std::uint64_t bad = 0;
    const IndexUniverse u(std::min(opt.depth, 3));
    for (double pv : opt.exponent_grid) {
      const Exponent p(pv);
      const double dp_upper = bidemocracy_upper(p);
      for (std::size_t m = 1; m <= 3; ++m) {
        checks += 7;
        if (fundamental_search(u, m, p, Signs::any).estimate.value > super_fundamental_upper(m, p) + kInequalityTolerance) ++bad;
        const double bm = bm_search(u, m, p).estimate.value;
        if (bm > dp_upper + kInequalityTolerance) ++bad;
        if (std::abs(bm - bm_search(u, m, p.dual()).estimate.value) > 1e-9) ++bad;
        for (Signs s : {Signs::plus, Signs::any}) {
          for (Overlap o : {Overlap::any, Overlap::disjoint}) {
            if (democracy_search(u, m, p, s, o).estimate.value > dp_upper + kInequalityTolerance) ++bad;
          }
        }
      }
    }
    log.report("search values below closed-form bounds", checks, bad);
  }

  const IndexUniverse u(opt.depth);
  for (double pv : opt.audit_exponents) {
    const Exponent p(pv);
    const AuditReport r = inequality_audit(u, opt.trials, opt.seed, p);
    const std::string tag = " (p=" + format_number(pv) + ", depth " + std::to_string(opt.depth) + ", " +
                            std::to_string(opt.trials) + " trials, seed " + std::to_string(opt.seed) + ")";
    log.report("lemma a_m* phi^eps_m <= B_m ||f||" + tag, r.lemma.checks, r.lemma.violations,
               "min slack " + format_number(r.lemma.min_slack));
    log.report("Lebesgue bound L_m <= k^c_2m + B_m" + tag, r.lebesgue.checks + r.lebesgue_instance.checks,
               r.lebesgue.violations + r.lebesgue_instance.violations,
               "min slack " + format_number(std::min(r.lebesgue.min_slack, r.lebesgue_instance.min_slack)));
    log.report("sandwich phi_m <= phi^eps_m <= 2 phi_m" + tag, r.sandwich.checks, r.sandwich.violations,
               "min slack " + format_number(r.sandwich.min_slack));
  }

  out << (log.total() == 0 ? "selftest passed" : "selftest FAILED") << "\n";
  return log.total();
}

}  // namespace haargc
