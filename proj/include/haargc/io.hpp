#pragma once

// Text formats: coefficient files, JSON records, sweep CSV and SVG plots.
//
// Every floating-point number leaves this module with 9 significant digits.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "haargc/closed_form.hpp"
#include "haargc/dyadic.hpp"
#include "haargc/estimators.hpp"
#include "haargc/greedy.hpp"

namespace haargc {

using Json = nlohmann::ordered_json;

class ParseError : public std::invalid_argument {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::invalid_argument("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

/// x rounded to 9 significant digits, so JSON dumps match the text output.
inline double round_sig9(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

// ---------------------------------------------------------------------------
// Coefficient files: one coefficient per line, "LEVEL OFFSET VALUE" or
// "C VALUE" for the constant atom; '#' starts a comment.
// ---------------------------------------------------------------------------

namespace detail {

inline double parse_double(const std::string& token, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "not a number: '" + token + "'");
  }
  if (used != token.size() || !std::isfinite(v)) throw ParseError(line, "not a finite number: '" + token + "'");
  return v;
}

inline std::uint64_t parse_unsigned(const std::string& token, std::size_t line) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError(line, "not a nonnegative integer: '" + token + "'");
  }
  try {
    return std::stoull(token);
  } catch (const std::exception&) {
    throw ParseError(line, "integer out of range: '" + token + "'");
  }
}

}  // namespace detail

inline HaarExpansion parse_coefficients(std::istream& in, Exponent p) {
  HaarExpansion f(p);
  std::map<DyadicIndex, std::size_t> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream tokens(raw);
    std::vector<std::string> fields;
    for (std::string t; tokens >> t;) fields.push_back(t);
    if (fields.empty()) continue;

    DyadicIndex idx;
    double value = 0.0;
    if (fields.size() == 2 && (fields[0] == "C" || fields[0] == "c")) {
      value = detail::parse_double(fields[1], line);
    } else if (fields.size() == 3) {
      const auto level = detail::parse_unsigned(fields[0], line);
      const auto offset = detail::parse_unsigned(fields[1], line);
      if (level > kMaxLevel) throw ParseError(line, "level too large");
      try {
        idx = DyadicIndex::interval(static_cast<std::uint32_t>(level), offset);
      } catch (const std::invalid_argument& e) {
        throw ParseError(line, e.what());
      }
      value = detail::parse_double(fields[2], line);
    } else {
      throw ParseError(line, "expected 'LEVEL OFFSET VALUE' or 'C VALUE'");
    }
    if (const auto [it, fresh] = seen.emplace(idx, line); !fresh) {
      throw ParseError(line, "duplicate coefficient for " + to_string(idx) + " (first on line " +
                                 std::to_string(it->second) + ")");
    }
    f.set(idx, value);
  }
  return f;
}

inline std::string format_coefficients(const HaarExpansion& f) {
  std::string out;
  for (const auto& [idx, c] : f.coefficients()) {
    if (idx.is_constant()) {
      out += "C " + format_number(c) + "\n";
    } else {
      out += std::to_string(idx.level()) + " " + std::to_string(idx.offset()) + " " + format_number(c) + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON records
// ---------------------------------------------------------------------------

inline Json json_number(double x) { return round_sig9(x); }

inline Json to_json(const ConstantBound& b) {
  return Json{{"name", b.name}, {"value", json_number(b.value)}, {"kind", to_string(b.kind)}, {"source", b.source}};
}

inline Json index_list(std::span<const DyadicIndex> indices) {
  Json out = Json::array();
  for (const auto& idx : indices) out.push_back(to_string(idx));
  return out;
}

inline Json to_json(const HaarExpansion& f) {
  Json out = Json::object();
  for (const auto& [idx, c] : f.coefficients()) out[to_string(idx)] = json_number(c);
  return out;
}

inline Json constants_json(Exponent p) {
  const HaarConstants c = constants(p);
  const GreedyConstantBounds g = cg_bounds(p);
  return Json{
      {"p", json_number(c.profile.p)},
      {"p_prime", json_number(c.profile.conjugate)},
      {"p_star", json_number(c.profile.star)},
      {"p_sharp", json_number(c.profile.sharp)},
      {"K_u", json_number(c.unconditional.value)},
      {"K_su_lower", json_number(c.suppression_lower.value)},
      {"K_su_upper", json_number(c.suppression_upper.value)},
      {"d_p", json_number(c.democracy_lower.value)},
      {"D_p", json_number(c.bidemocracy_upper.value)},
      {"a_p", json_number(c.geometric_factor)},
      {"a_p_prime", json_number(c.geometric_factor_dual)},
      {"cg_lower", to_json(g.lower)},
      {"cg_upper", to_json(g.upper)},
      {"ca_lower", to_json(g.almost_greedy_lower)},
      {"ca_upper", to_json(g.almost_greedy_upper)},
  };
}

inline Json to_json(const SearchReport& r) {
  Json signs_first = Json::array();
  for (int s : r.witness.first_signs) signs_first.push_back(s);
  Json signs_second = Json::array();
  for (int s : r.witness.second_signs) signs_second.push_back(s);
  return Json{
      {"quantity", to_string(r.quantity)},
      {"p", json_number(r.p)},
      {"depth", r.depth},
      {"m", r.m},
      {"estimate", to_json(r.estimate)},
      {"witness",
       Json{{"first", index_list(r.witness.first)},
            {"first_signs", signs_first},
            {"second", index_list(r.witness.second)},
            {"second_signs", signs_second},
            {"r", r.witness.r}}},
      {"enumerated_count", r.enumerated_count},
  };
}

inline Json to_json(const LebesgueWitness& w) {
  Json coeffs = Json::array();
  for (double a : w.competitor_coeffs) coeffs.push_back(json_number(a));
  return Json{
      {"bound", json_number(w.bound)},
      {"predicted", json_number(w.predicted)},
      {"grid_verified", w.grid_verified},
      {"kind", "lower"},
      {"f", to_json(w.f)},
      {"competitor", index_list(w.competitor)},
      {"competitor_coeffs", coeffs},
  };
}

// ---------------------------------------------------------------------------
// Sweep rows
// ---------------------------------------------------------------------------

struct SweepRow {
  double p = 0.0;
  double p_star = 0.0;
  double K_u = 0.0;
  double d_p = 0.0;
  double D_p = 0.0;
  double cg_lower = 0.0;
  double cg_upper = 0.0;
  double cg_lower_over_pstar = 0.0;
  double cg_upper_over_pstar = 0.0;
  std::optional<double> witness_bound;
};

struct WitnessRequest {
  std::size_t m;
  double delta;
};

inline SweepRow make_sweep_row(Exponent p, std::optional<WitnessRequest> witness = std::nullopt) {
  const HaarConstants c = constants(p);
  const GreedyConstantBounds g = cg_bounds(p);
  SweepRow row;
  row.p = p.value();
  row.p_star = p.star();
  row.K_u = c.unconditional.value;
  row.d_p = c.democracy_lower.value;
  row.D_p = c.bidemocracy_upper.value;
  row.cg_lower = g.lower.value;
  row.cg_upper = g.upper.value;
  row.cg_lower_over_pstar = row.cg_lower / row.p_star;
  row.cg_upper_over_pstar = row.cg_upper / row.p_star;
  if (witness) row.witness_bound = lebesgue_witness(witness->m, p, witness->delta).bound;
  return row;
}

inline constexpr std::string_view kSweepHeader =
    "p,p_star,K_u,d_p,D_p,cg_lower,cg_upper,cg_lower_over_pstar,cg_upper_over_pstar";

inline std::string sweep_csv(std::span<const SweepRow> rows) {
  const bool with_witness = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.witness_bound; });
  std::string out(kSweepHeader);
  if (with_witness) out += ",witness_bound";
  out += "\n";
  for (const auto& r : rows) {
    for (double v : {r.p, r.p_star, r.K_u, r.d_p, r.D_p, r.cg_lower, r.cg_upper, r.cg_lower_over_pstar,
                     r.cg_upper_over_pstar}) {
      out += format_number(v);
      out += ",";
    }
    out.pop_back();
    if (with_witness) out += "," + (r.witness_bound ? format_number(*r.witness_bound) : std::string{});
    out += "\n";
  }
  return out;
}

inline std::vector<SweepRow> parse_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  const bool with_witness = line == std::string(kSweepHeader) + ",witness_bound";
  if (!with_witness && line != kSweepHeader) throw ParseError(1, "unexpected header");
  std::vector<SweepRow> rows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (with_witness && line.back() == ',') cells.emplace_back();
    if (cells.size() != (with_witness ? 10U : 9U)) throw ParseError(n, "wrong column count");
    std::vector<double> v;
    for (std::size_t i = 0; i < 9; ++i) v.push_back(detail::parse_double(cells[i], n));
    SweepRow r{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], std::nullopt};
    if (with_witness && !cells[9].empty()) r.witness_bound = detail::parse_double(cells[9], n);
    rows.push_back(r);
  }
  return rows;
}

/// Comma-separated list of exponents, e.g. "1.1,2,4".
inline std::vector<Exponent> parse_grid(std::string_view text) {
  std::vector<Exponent> out;
  std::stringstream ss{std::string(text)};
  for (std::string cell; std::getline(ss, cell, ',');) {
    cell.erase(0, cell.find_first_not_of(" \t"));
    cell.erase(cell.find_last_not_of(" \t") + 1);
    if (cell.empty()) throw std::invalid_argument("empty entry in grid");
    out.emplace_back(detail::parse_double(cell, 1));
  }
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

// ---------------------------------------------------------------------------
// SVG plot of the C_g bracket against p*
// ---------------------------------------------------------------------------

inline std::string sweep_svg(std::span<const SweepRow> rows, bool log_y) {
  constexpr double kWidth = 800.0;
  constexpr double kHeight = 600.0;
  constexpr double kLeft = 80.0;
  constexpr double kRight = 160.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 60.0;
  if (rows.empty()) throw std::invalid_argument("nothing to plot");

  std::vector<SweepRow> sorted(rows.begin(), rows.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.p_star < b.p_star; });

  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  double x_lo = std::log10(sorted.front().p_star);
  double x_hi = std::log10(sorted.back().p_star);
  double y_lo = HUGE_VAL;
  double y_hi = -HUGE_VAL;
  for (const auto& r : sorted) {
    for (double v : {r.cg_lower, r.cg_upper, r.p_star}) {
      y_lo = std::min(y_lo, ty(v));
      y_hi = std::max(y_hi, ty(v));
    }
  }
  if (!log_y) y_lo = std::min(y_lo, 0.0);
  if (x_hi - x_lo < 1e-9) {
    x_lo -= 0.1;
    x_hi += 0.1;
  }
  if (y_hi - y_lo < 1e-9) y_hi = y_lo + 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double p_star) { return kLeft + (std::log10(p_star) - x_lo) / (x_hi - x_lo) * plot_w; };
  auto sy = [&](double v) { return kTop + (1.0 - (ty(v) - y_lo) / (y_hi - y_lo)) * plot_h; };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop + plot_h) + "\" x2=\"" + fmt(kLeft + plot_w) + "\" y2=\"" +
         fmt(kTop + plot_h) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) + "\" y2=\"" +
         fmt(kTop + plot_h) + "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + fmt(kLeft + plot_w / 2) + "\" y=\"" + fmt(kHeight - 15) +
         "\" text-anchor=\"middle\" font-size=\"14\">p* (log scale)</text>\n";
  out += "<text x=\"20\" y=\"" + fmt(kTop + plot_h / 2) + "\" font-size=\"14\" transform=\"rotate(-90 20 " +
         fmt(kTop + plot_h / 2) + ")\" text-anchor=\"middle\">" +
         std::string(log_y ? "constant (log scale)" : "constant") + "</text>\n";

  for (const auto& r : sorted) {
    const double x = sx(r.p_star);
    out += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kTop + plot_h) + "\" x2=\"" + fmt(x) + "\" y2=\"" +
           fmt(kTop + plot_h + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kTop + plot_h + 20) + "\" text-anchor=\"middle\" font-size=\"10\">" +
           format_number(r.p_star) + "</text>\n";
  }
  for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double tv = y_lo + frac * (y_hi - y_lo);
    const double v = log_y ? std::pow(10.0, tv) : tv;
    const double y = kTop + (1.0 - frac) * plot_h;
    out += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(y + 4) + "\" text-anchor=\"end\" font-size=\"10\">" +
           format_number(round_sig9(v)) + "</text>\n";
  }

  struct Series {
    const char* name;
    const char* color;
    double SweepRow::*field;
  };
  const Series series[] = {
      {"cg_lower", "#1f77b4", &SweepRow::cg_lower},
      {"cg_upper", "#d62728", &SweepRow::cg_upper},
      {"p_star", "#2ca02c", &SweepRow::p_star},
  };
  double legend_y = kTop + 10;
  for (const auto& s : series) {
    out += "<polyline fill=\"none\" stroke=\"" + std::string(s.color) + "\" stroke-width=\"2\" points=\"";
    for (const auto& r : sorted) out += fmt(sx(r.p_star)) + "," + fmt(sy(r.*(s.field))) + " ";
    out.back() = '"';
    out += "/>\n";
    out += "<line x1=\"" + fmt(kWidth - kRight + 15) + "\" y1=\"" + fmt(legend_y) + "\" x2=\"" +
           fmt(kWidth - kRight + 45) + "\" y2=\"" + fmt(legend_y) + "\" stroke=\"" + s.color +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fmt(kWidth - kRight + 50) + "\" y=\"" + fmt(legend_y + 4) + "\" font-size=\"12\">" +
           s.name + "</text>\n";
    legend_y += 20;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace haargc
