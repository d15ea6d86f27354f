#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kstab/futaki.hpp"
#include "kstab/io.hpp"
#include "kstab/measure.hpp"
#include "kstab/parallel.hpp"
#include "kstab/probe.hpp"
#include "kstab/stability.hpp"
#include "kstab/weights.hpp"

namespace kstab::app {

using io::json;
using io::ojson;

enum ExitCode : int { kOk = 0, kInputError = 1, kRefuted = 2, kInconclusive = 3 };

inline int exit_for(Verdict v) {
  switch (v) {
    case Verdict::CertifiedSufficient: return kOk;
    case Verdict::ConditionFails: return kRefuted;
    case Verdict::Inconclusive: return kInconclusive;
  }
  return kInputError;
}

struct Options {
  std::string input;
  std::string inline_json;
  bool legacy = false;
  std::string x0;
  std::string tol = "1/100";
  unsigned resolution = 3;
  unsigned depth = 6;
  bool text = false;
  std::string out;
  std::string table;
  unsigned samples = 20;
  std::string var = "c";
  std::string lo;
  std::string hi;
  std::string csv;
  unsigned threads = 0;

  Convention convention() const { return legacy ? Convention::LegacyAppendix : Convention::Canonical; }
};

struct Outcome {
  int code = kOk;
  ojson report;
  std::string text;
};

inline std::string read_input(const Options& o) {
  if (!o.inline_json.empty()) return o.inline_json;
  if (o.input.empty() || o.input == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream f(o.input);
  if (!f) throw Error(ErrorCode::InvalidInput, "cannot open " + o.input);
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

inline bool is_fibration(const json& j) { return j.is_object() && j.contains("fiber"); }

/// Explicit weights { "polytope", "v", "w" } for the polytope-level commands.
struct ExplicitWeights {
  LabelledPolytope polytope;
  Polynomial v;
  Polynomial w;
};

inline ExplicitWeights explicit_weights(const json& j) {
  auto p = io::polytope_from_json(io::field(j, "polytope", ""), "polytope");
  auto v = io::polynomial_from_json(io::field(j, "v", ""), "v");
  auto w = io::polynomial_from_json(io::field(j, "w", ""), "w");
  require_same_dim(p.dim(), v.dim(), "v");
  require_same_dim(p.dim(), w.dim(), "w");
  return {std::move(p), std::move(v), std::move(w)};
}

inline std::optional<Point> x0_option(const Options& o, std::size_t dim) {
  if (o.x0.empty()) return std::nullopt;
  Point x = parse_point(o.x0);
  require_same_dim(dim, x.size(), "--x0");
  return x;
}

inline std::string verdict_line(Verdict v) {
  switch (v) {
    case Verdict::CertifiedSufficient: return "verdict: certified (sufficient condition holds)";
    case Verdict::ConditionFails: return "verdict: condition fails";
    case Verdict::Inconclusive: return "verdict: inconclusive (subdivision depth exhausted)";
  }
  return "";
}

inline std::string render_report(const StabilityReport& r) {
  std::ostringstream s;
  s << "convention: " << convention_name(r.convention) << "\n";
  s << "method: " << method_name(r.method) << "\n";
  s << "x0: " << to_string(r.x0) << "\n";
  if (r.l_ext) s << "l_ext: " << to_string(*r.l_ext) << "\n";
  for (const auto& v : r.vertex_values)
    s << "  vertex " << to_string(v.x) << ": " << to_string(v.value) << " (" << io::decimal(v.value) << ")\n";
  if (r.min_value) {
    s << "The minimum of the condition on vertices is " << to_string(*r.min_value) << " (" << io::decimal(*r.min_value)
      << ")\n";
  }
  if (r.witness) s << "witness: " << to_string(*r.witness) << " value " << to_string(*r.witness_value) << "\n";
  for (const auto& n : r.notes) s << "note: " << n << "\n";
  s << verdict_line(r.verdict) << "\n";
  return s.str();
}

/// CSV of condition values on a barycentric grid of every cone cell.
inline void write_table(const std::string& path, const LabelledPolytope& p, const Point& x0, const Polynomial& v,
                        const Polynomial& w, unsigned samples) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  for (std::size_t i = 0; i < p.dim(); ++i) f << "x" << i + 1 << ",";
  f << "facet,value\n";
  const auto cd = cone_decomposition(p, x0);
  const unsigned n = std::max(1u, samples);
  for (std::size_t j = 0; j < p.num_facets(); ++j) {
    const auto g = condition_poly_general(p, x0, j, v, w);
    for (const auto& cell : cd.cells[j]) {
      const std::size_t k = cell.vertices().size();
      std::vector<unsigned> idx(k, 0);
      const auto emit = [&](auto&& self, std::size_t i, unsigned left) -> void {
        if (i + 1 == k) {
          idx[i] = left;
          Point x(p.dim());
          for (std::size_t a = 0; a < k; ++a) x = x + Rational(idx[a], n) * cell.vertex(a);
          for (const auto& xi : x) f << io::decimal(xi) << ",";
          f << j << "," << io::decimal(g(x)) << "\n";
          return;
        }
        for (unsigned a = 0; a <= left; ++a) {
          idx[i] = a;
          self(self, i + 1, left - a);
        }
      };
      emit(emit, 0, n);
    }
  }
}

inline Outcome cmd_info(const json& doc, const Options& o) {
  Outcome out;
  std::ostringstream s;
  const bool fibr = is_fibration(doc);
  const auto parsed = fibr ? std::optional(io::fibration_from_json(doc)) : std::nullopt;
  const LabelledPolytope p = fibr ? parsed->fiber : io::polytope_from_json(doc);
  const Quadrature q(p);
  ojson& r = out.report;
  r["convention"] = convention_name(o.convention());
  r["dim"] = p.dim();
  ojson verts = ojson::array();
  for (const auto& v : p.vertices()) verts.push_back(io::to_json(v));
  r["vertices"] = verts;
  ojson facets = ojson::array();
  s << "convention: " << convention_name(o.convention()) << "\ndimension: " << p.dim() << "\nvertices:\n";
  for (const auto& v : p.vertices()) s << "  " << to_string(v) << "\n";
  s << "facets:\n";
  for (std::size_t j = 0; j < p.num_facets(); ++j) {
    const Rational mass = q.facet_integral(j, Polynomial::constant(p.dim(), 1));
    facets.push_back(ojson{{"label", io::to_json(p.label(j))}, {"vertices", p.facet(j)}, {"sigma_mass", to_string(mass)}});
    s << "  L" << j + 1 << " = " << to_string(p.label(j)) << "  sigma mass " << to_string(mass) << "\n";
  }
  r["facets"] = facets;
  const Rational vol = q.integrate(Polynomial::constant(p.dim(), 1));
  r["volume"] = to_string(vol);
  r["simple"] = p.is_simple();
  r["delzant"] = p.is_delzant();
  s << "volume: " << to_string(vol) << "\nsimple: " << (p.is_simple() ? "yes" : "no")
    << "\ndelzant: " << (p.is_delzant() ? "yes" : "no") << "\n";
  if (auto mp = monotone_point(p)) {
    r["monotone"] = ojson{{"x0", io::to_json(mp->x0)}, {"t", to_string(mp->t)}};
    s << "monotone: x0 = " << to_string(mp->x0) << ", t = " << to_string(mp->t) << "\n";
  } else {
    r["monotone"] = nullptr;
    s << "monotone: no\n";
  }
  if (fibr && !parsed->has_parameter()) {
    const auto fib = parsed->data();
    const auto wp = make_weights(fib);
    r["v"] = io::to_json(wp.v);
    r["w_base"] = io::to_json(wp.w_base);
    ojson diag = ojson::array();
    for (const auto& f : fib.factors) {
      Rational sum = 0;
      for (const auto& d : f.p.gradient()) sum += d;
      diag.push_back(f.c > sum);
    }
    r["normalized_inequality"] = diag;
    r["total_dim"] = fib.total_dim();
    s << "v: " << to_string(wp.v) << "\nw_base: " << to_string(wp.w_base) << "\n";
  }
  out.text = s.str();
  return out;
}

inline Outcome cmd_lext(const json& doc, const Options& o) {
  const auto fib = io::fibration_from_json(doc).data();
  const auto sol = extremal_affine(fib, o.convention());
  Outcome out;
  out.report = io::to_json(sol);
  out.report["total_dim"] = fib.total_dim();
  out.text = "convention: " + std::string(convention_name(sol.convention)) + "\nl_ext: " + to_string(sol.l_ext) +
             "\nconstant: " + (sol.is_constant() ? "yes" : "no") + "\n";
  return out;
}

inline Outcome cmd_futaki(const json& doc, const Options& o) {
  Outcome out;
  std::ostringstream s;
  if (is_fibration(doc)) {
    const auto fib = io::fibration_from_json(doc).data();
    const auto ch = futaki_character(fib, o.convention());
    ojson a = ojson::array();
    bool vanishes = true;
    for (const auto& c : ch) {
      a.push_back(to_string(c));
      vanishes = vanishes && c == 0;
    }
    out.report["convention"] = convention_name(o.convention());
    out.report["character"] = a;
    out.report["vanishes"] = vanishes;
    s << "convention: " << convention_name(o.convention()) << "\ncharacter:";
    for (const auto& c : ch) s << " " << to_string(c);
    s << "\nl_ext constant: " << (vanishes ? "yes" : "no") << "\n";
  } else {
    const auto ew = explicit_weights(doc);
    const Quadrature q(ew.polytope);
    const auto f = futaki_on_affine(q, ew.polytope.dim(), ew.v, ew.w);
    ojson a = ojson::array();
    for (const auto& c : f) a.push_back(to_string(c));
    out.report["convention"] = convention_name(Convention::Canonical);
    out.report["affine_basis"] = a;
    s << "F on (1, x_1, ..):";
    for (const auto& c : f) s << " " << to_string(c);
    s << "\n";
    if (doc.contains("f")) {
      const auto fp = io::polynomial_from_json(doc["f"], "f");
      const Rational val = df_invariant(q, ew.v, ew.w, fp);
      out.report["F"] = to_string(val);
      s << "F(f) = " << to_string(val) << "\n";
    }
  }
  out.text = s.str();
  return out;
}

inline Outcome cmd_check(const json& doc, const Options& o) {
  Outcome out;
  StabilityReport rep;
  if (is_fibration(doc)) {
    const auto fib = io::fibration_from_json(doc).data();
    rep = check_fibration_general(fib, o.convention(), x0_option(o, fib.dim()), o.depth);
    if (!o.table.empty()) {
      const auto wp = make_weights(fib);
      write_table(o.table, fib.fiber, rep.x0, wp.v, extremal_w(*rep.l_ext, wp.v, wp.w_base), o.samples);
    }
  } else {
    const auto ew = explicit_weights(doc);
    const Point x0 = x0_option(o, ew.polytope.dim()).value_or(default_apex(ew.polytope));
    CheckOptions opts;
    opts.depth = o.depth;
    rep = check_general(ew.polytope, x0, ew.v, ew.w, opts);
    if (!o.table.empty()) write_table(o.table, ew.polytope, x0, ew.v, ew.w, o.samples);
  }
  out.report = io::to_json(rep);
  out.text = render_report(rep);
  out.code = exit_for(rep.verdict);
  return out;
}

inline Outcome cmd_check_fano(const json& doc, const Options& o) {
  const auto fib = io::fibration_from_json(doc).data();
  const auto rep = check_fano_fiber(fib, o.convention(), o.depth);
  if (!o.table.empty()) {
    const auto wp = make_weights(fib);
    write_table(o.table, fib.fiber, fib.fano_fiber->x0, wp.v, extremal_w(*rep.l_ext, wp.v, wp.w_base), o.samples);
  }
  return Outcome{exit_for(rep.verdict), io::to_json(rep), render_report(rep)};
}

inline Outcome cmd_check_fano_total(const json& doc, const Options& o) {
  const auto fib = io::fibration_from_json(doc).data();
  const auto rep = check_fano_total(fib, o.convention());
  Outcome out{exit_for(rep.verdict), io::to_json(rep), render_report(rep)};
  out.report["bound"] = to_string(2 * (Rational(fib.total_dim()) + 1));
  return out;
}

inline Outcome cmd_threshold(const json& doc, const Options& o) {
  if (o.var != "c") throw Error(ErrorCode::InvalidInput, "only the class parameter c can be varied");
  if (o.lo.empty() || o.hi.empty()) throw Error(ErrorCode::InvalidInput, "threshold needs --lo and --hi");
  const auto parsed = io::fibration_from_json(doc);
  ThresholdOptions opts;
  opts.tol = parse_rational(o.tol);
  opts.convention = o.convention();
  const auto res = threshold_c(parsed.as_template(false), parse_rational(o.lo), parse_rational(o.hi), opts);
  std::ostringstream s;
  s << "convention: " << convention_name(res.convention) << "\n";
  s << "threshold in [" << to_string(res.lo) << ", " << to_string(res.hi) << "] (" << io::decimal(res.lo) << " .. "
    << io::decimal(res.hi) << ")\n";
  s << "condition holds at c_hi: " << (res.holds_at_hi ? "yes" : "no") << "\n";
  s << "positive for all c > c_hi: " << (res.certified_beyond_hi ? "yes" : "no") << "\n";
  for (const auto& v : res.per_vertex)
    s << "  vertex " << to_string(v.vertex) << ": [" << io::decimal(v.lo) << ", " << io::decimal(v.hi) << "]\n";
  s << verdict_line(res.verdict) << "\n";
  return Outcome{exit_for(res.verdict), io::to_json(res), s.str()};
}

inline Outcome cmd_probe(const json& doc, const Options& o) {
  LabelledPolytope p = is_fibration(doc) ? io::fibration_from_json(doc).fiber : io::polytope_from_json(io::field(doc, "polytope", ""), "polytope");
  Polynomial v, w;
  bool verify = true;
  if (is_fibration(doc)) {
    const auto fib = io::fibration_from_json(doc).data();
    const auto wp = make_weights(fib);
    const auto sol = extremal_affine(fib, o.convention());
    v = wp.v;
    w = extremal_w(sol.l_ext, wp.v, wp.w_base);
    verify = o.convention() == Convention::Canonical;
  } else {
    auto ew = explicit_weights(doc);
    v = ew.v;
    w = ew.w;
  }
  const Point x0 = x0_option(o, p.dim()).value_or(default_apex(p));
  const auto family = crease_family(p, x0, o.resolution);
  const auto rep = probe(p, v, w, family, verify);
  Outcome out;
  out.report = io::to_json(rep, o.convention(), o.resolution);
  std::ostringstream s;
  s << "convention: " << convention_name(o.convention()) << "\ncreases: " << family.size() << "\n";
  if (rep.min_ratio) s << "min F(f)/|f|_1: " << to_string(*rep.min_ratio) << " (" << io::decimal(*rep.min_ratio) << ")\n";
  if (rep.destabilizer) {
    s << "destabilizer: h = " << to_string(rep.values[*rep.destabilizer].crease.h) << "\n";
  } else {
    s << "no destabilizing crease found (evidence only, not a stability proof)\n";
  }
  out.text = s.str();
  out.code = rep.destabilizer ? kRefuted : kOk;
  return out;
}

inline Outcome dispatch(const std::string& cmd, const json& doc, const Options& o);

namespace detail {

inline void substitute(json& j, const std::map<std::string, Rational>& vals) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (!s.empty() && s[0] == '$') {
      auto it = vals.find(s.substr(1));
      if (it == vals.end()) io::schema_error("template", "unbound variable " + s);
      j = to_string(it->second);
    }
  } else if (j.is_array() || j.is_object()) {
    for (auto& x : j) substitute(x, vals);
  }
}

inline std::vector<Rational> grid_values(const json& g, const std::string& path) {
  std::vector<Rational> out;
  if (g.is_array()) {
    for (std::size_t i = 0; i < g.size(); ++i) out.push_back(io::rational_from_json(g[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }
  const Rational from = io::rational_from_json(io::field(g, "from", path), path + ".from");
  const Rational to = io::rational_from_json(io::field(g, "to", path), path + ".to");
  const Rational step = g.contains("step") ? io::rational_from_json(g["step"], path + ".step") : Rational(1);
  if (step <= 0) io::schema_error(path + ".step", "must be positive");
  for (Rational x = from; x <= to; x += step) out.push_back(x);
  return out;
}

inline bool constraint_holds(const std::string& c, const std::map<std::string, Rational>& vals) {
  static const char* ops[] = {"<=", ">=", "<", ">", "=="};
  for (const char* op : ops) {
    const auto pos = c.find(op);
    if (pos == std::string::npos) continue;
    auto side = [&](std::string s) {
      s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
      auto it = vals.find(s);
      return it != vals.end() ? it->second : parse_rational(s);
    };
    const Rational a = side(c.substr(0, pos));
    const Rational b = side(c.substr(pos + std::string(op).size()));
    const std::string o(op);
    if (o == "<=") return a <= b;
    if (o == ">=") return a >= b;
    if (o == "<") return a < b;
    if (o == ">") return a > b;
    return a == b;
  }
  io::schema_error("constraints", "cannot parse constraint \"" + c + "\"");
}

}  // namespace detail

/// { "command", "template", "grid": {var: [..] | {from, to, step}},
///   "derived": {var: {"const": q, other: coeff, ...}}, "constraints": ["a<=b"] }.
inline Outcome cmd_sweep(const json& job, const Options& o) {
  const std::string command = io::field(job, "command", "").get<std::string>();
  if (command == "sweep") io::schema_error("command", "sweeps cannot nest");
  const json& tmpl = io::field(job, "template", "");
  std::vector<std::string> names;
  std::vector<std::vector<Rational>> values;
  if (job.contains("grid")) {
    for (const auto& [name, g] : job["grid"].items()) {
      names.push_back(name);
      values.push_back(detail::grid_values(g, "grid." + name));
    }
  }
  std::vector<std::map<std::string, Rational>> points;
  const bool empty = std::any_of(values.begin(), values.end(), [](const auto& v) { return v.empty(); });
  if (!empty) {
    std::vector<std::size_t> idx(names.size(), 0);
    while (true) {
      std::map<std::string, Rational> pt;
      for (std::size_t i = 0; i < names.size(); ++i) pt[names[i]] = values[i][idx[i]];
      if (job.contains("derived")) {
        for (const auto& [name, expr] : job["derived"].items()) {
          Rational val = 0;
          for (const auto& [k, coef] : expr.items()) {
            const Rational cf = io::rational_from_json(coef, "derived." + name + "." + k);
            if (k == "const") {
              val += cf;
            } else {
              auto it = pt.find(k);
              if (it == pt.end()) io::schema_error("derived." + name, "unknown variable " + k);
              val += cf * it->second;
            }
          }
          pt[name] = val;
        }
      }
      bool keep = true;
      if (job.contains("constraints"))
        for (const auto& c : job["constraints"]) keep = keep && detail::constraint_holds(c.get<std::string>(), pt);
      if (keep) points.push_back(std::move(pt));
      std::size_t k = names.size();
      while (k > 0) {
        if (++idx[k - 1] < values[k - 1].size()) break;
        idx[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
    }
  }
  if (names.empty()) points.clear();

  struct Row {
    int code = kOk;
    ojson report;
    std::string error;
  };
  const auto rows = parallel_map(
      points.size(),
      [&](std::size_t i) {
        Row row;
        try {
          json doc = tmpl;
          detail::substitute(doc, points[i]);
          auto r = dispatch(command, doc, o);
          row.code = r.code;
          row.report = std::move(r.report);
        } catch (const std::exception& e) {
          row.code = kInputError;
          row.error = e.what();
        }
        return row;
      },
      o.threads);

  Outcome out;
  out.report["command"] = command;
  out.report["convention"] = convention_name(o.convention());
  ojson arr = ojson::array();
  std::ostringstream s;
  int worst = kOk;
  const auto severity = [](int c) { return c == kInputError ? 3 : c == kRefuted ? 2 : c == kInconclusive ? 1 : 0; };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ojson pt;
    for (const auto& [k, v] : points[i]) pt[k] = to_string(v);
    ojson row{{"point", pt}, {"exit", rows[i].code}};
    if (rows[i].error.empty()) {
      row["report"] = rows[i].report;
    } else {
      row["error"] = rows[i].error;
    }
    arr.push_back(row);
    if (severity(rows[i].code) > severity(worst)) worst = rows[i].code;
    for (const auto& [k, v] : points[i]) s << k << "=" << to_string(v) << " ";
    if (rows[i].error.empty()) {
      s << (rows[i].report.contains("verdict") ? rows[i].report["verdict"].get<std::string>() : std::string("done"));
      if (rows[i].report.contains("min_value")) s << " min " << rows[i].report["min_value_decimal"].get<std::string>();
    } else {
      s << "error: " << rows[i].error;
    }
    s << "\n";
  }
  out.report["rows"] = arr;
  out.code = worst;
  out.text = s.str() + std::to_string(rows.size()) + " rows\n";
  if (!o.csv.empty()) {
    std::ofstream f(o.csv);
    if (!f) throw Error(ErrorCode::InvalidInput, "cannot write " + o.csv);
    for (const auto& n : points.empty() ? names : [&] {
           std::vector<std::string> ks;
           for (const auto& [k, v] : points.front()) ks.push_back(k);
           return ks;
         }())
      f << n << ",";
    f << "exit,verdict,min_value,min_value_decimal\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (const auto& [k, v] : points[i]) f << to_string(v) << ",";
      const auto& r = rows[i].report;
      f << rows[i].code << "," << (r.contains("verdict") ? r["verdict"].get<std::string>() : "") << ","
        << (r.contains("min_value") ? r["min_value"].get<std::string>() : "") << ","
        << (r.contains("min_value") ? r["min_value_decimal"].get<std::string>() : "") << "\n";
    }
  }
  return out;
}

inline Outcome dispatch(const std::string& cmd, const json& doc, const Options& o) {
  if (cmd == "info") return cmd_info(doc, o);
  if (cmd == "lext") return cmd_lext(doc, o);
  if (cmd == "futaki") return cmd_futaki(doc, o);
  if (cmd == "check") return cmd_check(doc, o);
  if (cmd == "check-fano") return cmd_check_fano(doc, o);
  if (cmd == "check-fano-total") return cmd_check_fano_total(doc, o);
  if (cmd == "threshold") return cmd_threshold(doc, o);
  if (cmd == "probe") return cmd_probe(doc, o);
  if (cmd == "sweep") return cmd_sweep(doc, o);
  throw Error(ErrorCode::InvalidInput, "unknown command " + cmd);
}

/// Parses argv, runs the command, writes the report, returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Exact checks of sufficient conditions for weighted K-stability of labelled polytopes", "kstab"};
  cli.require_subcommand(1);
  Options o;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"info", "vertices, facets, dsigma masses, monotone point, weights"},
      {"lext", "extremal affine function"},
      {"futaki", "Futaki character / F on affine functions"},
      {"check", "general cone condition at x0"},
      {"check-fano", "vertex criterion for a monotone fiber"},
      {"check-fano-total", "sup l_ext bound for a Fano fibration"},
      {"threshold", "smallest class parameter c satisfying the vertex criterion"},
      {"probe", "search single-crease destabilizers"},
      {"sweep", "run a command over a rational parameter grid"},
  };
  for (const auto& [name, desc] : commands) {
    auto* sub = cli.add_subcommand(name, desc);
    sub->add_option("input", o.input, "JSON input file ('-' for stdin)");
    sub->add_option("--inline", o.inline_json, "JSON input given on the command line");
    sub->add_flag("--legacy-sign", o.legacy, "solve l_ext in the legacy normalization");
    sub->add_option("--x0", o.x0, "apex of the cone decomposition, e.g. \"1/2,0\"");
    sub->add_option("--tol", o.tol, "threshold bracket width (rational)");
    sub->add_option("--resolution", o.resolution, "crease family resolution")->check(CLI::PositiveNumber);
    sub->add_option("--depth", o.depth, "Bernstein subdivision depth");
    auto* json_flag = sub->add_flag("--json", "JSON report (default)");
    sub->add_flag("--text", o.text, "human-readable report")->excludes(json_flag);
    sub->add_option("--out", o.out, "write the report to a file");
    sub->add_option("--table", o.table, "CSV of condition values on the cone cells");
    sub->add_option("--samples", o.samples, "grid subdivisions per cell for --table");
    sub->add_option("--var", o.var, "parameter to vary (threshold)");
    sub->add_option("--lo", o.lo, "lower end of the parameter bracket");
    sub->add_option("--hi", o.hi, "upper end of the parameter bracket");
    sub->add_option("--csv", o.csv, "sweep table as CSV");
    sub->add_option("--threads", o.threads, "sweep worker threads (0 = all cores)");
  }
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  const std::string cmd = cli.get_subcommands().front()->get_name();
  try {
    const json doc = io::parse_document(read_input(o));
    Outcome res = dispatch(cmd, doc, o);
    const std::string body = o.text ? res.text : res.report.dump(2) + "\n";
    if (o.out.empty()) {
      out << body;
    } else {
      std::ofstream f(o.out);
      if (!f) throw Error(ErrorCode::InvalidInput, "cannot write " + o.out);
      f << body;
    }
    return res.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace kstab::app
