#pragma once

// Command-line front end. `run` is kept free of process state so tests can
// drive it in-process.
//
// Exit codes: 0 success, 1 audit violations, 2 argument or input errors.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "haargc/closed_form.hpp"
#include "haargc/dyadic.hpp"
#include "haargc/estimators.hpp"
#include "haargc/greedy.hpp"
#include "haargc/io.hpp"
#include "haargc/selftest.hpp"

namespace haargc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitUsage = 2;

/// Seed from HAARGC_SEED, falling back to the built-in default.
inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("HAARGC_SEED"); env != nullptr && *env != '\0') {
    return std::stoull(env);
  }
  return kDefaultSeed;
}

namespace detail {

inline HaarExpansion read_coefficients(const std::string& path, Exponent p) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open coefficient file '" + path + "'");
  return parse_coefficients(in, p);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << text;
}

inline Quantity parse_quantity(const std::string& what) {
  for (Quantity q : {Quantity::phi, Quantity::phi_eps, Quantity::bm, Quantity::delta, Quantity::delta_s,
                     Quantity::delta_d, Quantity::delta_sd}) {
    if (what == to_string(q)) return q;
  }
  throw std::invalid_argument("unknown quantity '" + what + "'");
}

inline SearchReport estimate(Quantity q, const IndexUniverse& u, std::size_t m, Exponent p) {
  switch (q) {
    case Quantity::phi: return fundamental_search(u, m, p, Signs::plus);
    case Quantity::phi_eps: return fundamental_search(u, m, p, Signs::any);
    case Quantity::bm: return bm_search(u, m, p);
    case Quantity::delta: return democracy_search(u, m, p, Signs::plus, Overlap::any);
    case Quantity::delta_s: return democracy_search(u, m, p, Signs::any, Overlap::any);
    case Quantity::delta_d: return democracy_search(u, m, p, Signs::plus, Overlap::disjoint);
    case Quantity::delta_sd: return democracy_search(u, m, p, Signs::any, Overlap::disjoint);
  }
  throw std::logic_error("unhandled quantity");
}

}  // namespace detail

inline int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thresholding greedy algorithm and Lebesgue-type constants for the L_p-normalized Haar system",
               "haargc"};
  app.require_subcommand(1);

  double p = 2.0;
  std::string coeff_path;
  int depth = -1;
  std::size_t m = 1;
  std::string format = "json";
  std::string what;
  double delta = 0.01;
  std::string grid = "1.1,1.25,1.5,2,3,4,8,16,32";
  std::string out_path;
  std::string svg_path;
  bool log_y = false;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 1000;
  int selftest_depth = 3;

  auto* norm_cmd = app.add_subcommand("norm", "L_p norm of a coefficient file");
  norm_cmd->add_option("--coeffs", coeff_path, "coefficient file")->required();
  norm_cmd->add_option("--p", p, "exponent, 1 < p < inf")->required();
  norm_cmd->add_option("--depth", depth, "grid depth (default: minimal)");

  auto* greedy_cmd = app.add_subcommand("greedy", "greedy ordering and m-term greedy approximation");
  greedy_cmd->add_option("--coeffs", coeff_path, "coefficient file")->required();
  greedy_cmd->add_option("--p", p, "exponent")->required();
  greedy_cmd->add_option("--m", m, "number of terms")->required();

  auto* constants_cmd = app.add_subcommand("constants", "closed-form constants and C_g bracket");
  constants_cmd->add_option("--p", p, "exponent")->required();
  constants_cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* chain_cmd = app.add_subcommand("chain", "nested chain norm, sandwich and grid check");
  chain_cmd->add_option("--m", m, "chain length")->required()->check(CLI::PositiveNumber);
  chain_cmd->add_option("--p", p, "exponent")->required();

  auto* estimate_cmd = app.add_subcommand("estimate", "exhaustive search on a finite universe");
  estimate_cmd->add_option("--what", what, "phi|phieps|bm|delta|deltas|deltad|deltasd")
      ->required()
      ->check(CLI::IsMember({"phi", "phieps", "bm", "delta", "deltas", "deltad", "deltasd"}));
  estimate_cmd->add_option("--depth", depth, "universe depth")->required();
  estimate_cmd->add_option("--m", m, "cardinality")->required();
  estimate_cmd->add_option("--p", p, "exponent")->required();

  auto* witness_cmd = app.add_subcommand("witness", "certified lower bound for the Lebesgue constant");
  witness_cmd->add_option("--m", m, "number of terms")->required()->check(CLI::PositiveNumber);
  witness_cmd->add_option("--p", p, "exponent")->required();
  witness_cmd->add_option("--delta", delta, "weight gap, 0 < delta <= 1");

  bool sweep_has_m = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "C_g bracket over a grid of exponents");
  sweep_cmd->add_option("--grid", grid, "comma-separated exponents");
  auto* sweep_m = sweep_cmd->add_option("--m", m, "add a witness_bound column with this m");
  sweep_cmd->add_option("--delta", delta, "witness weight gap");
  sweep_cmd->add_option("--out", out_path, "CSV output file (default: stdout)");
  sweep_cmd->add_option("--svg", svg_path, "SVG plot output file");
  sweep_cmd->add_flag("--logy", log_y, "log10 y axis in the SVG plot");

  auto* selftest_cmd = app.add_subcommand("selftest", "run the invariant and audit suite");
  selftest_cmd->add_option("--seed", seed, "random seed (default: $HAARGC_SEED or 42)");
  selftest_cmd->add_option("--trials", trials, "audit trials per exponent");
  selftest_cmd->add_option("--depth", selftest_depth, "audit universe depth");

  std::vector<const char*> argv{"haargc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  sweep_has_m = sweep_m->count() > 0;

  try {
    if (norm_cmd->parsed()) {
      const Exponent e(p);
      const HaarExpansion f = detail::read_coefficients(coeff_path, e);
      const int d = depth < 0 ? f.required_depth() : depth;
      out << format_number(lp_norm(synthesize(f, d), e)) << "\n";
    } else if (greedy_cmd->parsed()) {
      const Exponent e(p);
      const HaarExpansion f = detail::read_coefficients(coeff_path, e);
      const GreedyOrdering rho = greedy_ordering(f);
      const HaarExpansion gm = greedy_sum(f, m);
      Json mags = Json::array();
      for (double a : rho.magnitudes) mags.push_back(json_number(a));
      const Json j{
          {"p", json_number(p)},
          {"m", m},
          {"ordering", index_list(rho.order)},
          {"rearrangement", mags},
          {"greedy_sum", to_json(gm)},
          {"residual_norm", json_number(norm(f - gm))},
          {"norm", json_number(norm(f))},
      };
      out << j.dump(2) << "\n";
    } else if (constants_cmd->parsed()) {
      const Exponent e(p);
      if (format == "json") {
        out << constants_json(e).dump(2) << "\n";
      } else {
        const HaarConstants c = constants(e);
        const GreedyConstantBounds g = cg_bounds(e);
        out << "p,p_prime,p_star,p_sharp,K_u,K_su_lower,K_su_upper,d_p,D_p,a_p,a_p_prime,cg_lower,cg_upper,ca_lower,"
               "ca_upper\n";
        std::string row;
        for (double v : {c.profile.p, c.profile.conjugate, c.profile.star, c.profile.sharp, c.unconditional.value,
                         c.suppression_lower.value, c.suppression_upper.value, c.democracy_lower.value,
                         c.bidemocracy_upper.value, c.geometric_factor, c.geometric_factor_dual, g.lower.value,
                         g.upper.value, g.almost_greedy_lower.value, g.almost_greedy_upper.value}) {
          row += format_number(v) + ",";
        }
        row.pop_back();
        out << row << "\n";
      }
    } else if (chain_cmd->parsed()) {
      const Exponent e(p);
      const NestedChain c = nested_chain(m, e);
      Json j{
          {"m", m},
          {"p", json_number(p)},
          {"indices", index_list(c.indices)},
          {"norm_exact", json_number(c.norm_exact)},
          {"sandwich_lo", json_number(c.sandwich_lo)},
          {"sandwich_hi", json_number(c.sandwich_hi)},
          {"in_sandwich", c.sandwich_lo <= c.norm_exact && c.norm_exact <= c.sandwich_hi},
      };
      if (static_cast<int>(m) + 1 <= kMaxGridDepth) {
        HaarExpansion f(e);
        for (const auto& idx : c.indices) f.set(idx, 1.0);
        const double grid_norm = lp_norm(synthesize(f, static_cast<int>(m) + 1), e);
        j["grid_norm"] = json_number(grid_norm);
        j["oracle_check"] = std::abs(grid_norm - c.norm_exact) <= 1e-10;
      } else {
        j["grid_norm"] = nullptr;
        j["oracle_check"] = nullptr;
      }
      out << j.dump(2) << "\n";
    } else if (estimate_cmd->parsed()) {
      const IndexUniverse u(depth);
      const SearchReport r = detail::estimate(detail::parse_quantity(what), u, m, Exponent(p));
      out << to_json(r).dump(2) << "\n";
    } else if (witness_cmd->parsed()) {
      const Exponent e(p);
      const LebesgueWitness w = lebesgue_witness(m, e, delta);
      Json j{{"m", m}, {"p", json_number(p)}, {"delta", json_number(delta)}};
      j.update(to_json(w));
      j["cg_upper"] = json_number(cg_bounds(e).upper.value);
      out << j.dump(2) << "\n";
    } else if (sweep_cmd->parsed()) {
      std::vector<SweepRow> rows;
      for (const Exponent& e : parse_grid(grid)) {
        rows.push_back(make_sweep_row(e, sweep_has_m ? std::optional<WitnessRequest>({m, delta}) : std::nullopt));
      }
      std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.p < b.p; });
      const std::string csv = sweep_csv(rows);
      if (out_path.empty()) {
        out << csv;
      } else {
        detail::write_text(out_path, csv);
      }
      if (!svg_path.empty()) detail::write_text(svg_path, sweep_svg(rows, log_y));
    } else if (selftest_cmd->parsed()) {
      SelftestOptions opt;
      opt.seed = seed.value_or(default_seed());
      opt.trials = trials;
      opt.depth = selftest_depth;
      return run_selftest(opt, out) == 0 ? kExitOk : kExitViolations;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace haargc::cli
