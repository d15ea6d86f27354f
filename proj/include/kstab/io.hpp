#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kstab/affine.hpp"
#include "kstab/error.hpp"
#include "kstab/polynomial.hpp"
#include "kstab/polytope.hpp"
#include "kstab/probe.hpp"
#include "kstab/rational.hpp"
#include "kstab/stability.hpp"
#include "kstab/weights.hpp"

namespace kstab::io {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] inline void schema_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::InvalidInput, (path.empty() ? std::string("input") : path) + ": " + msg);
}

/// Parses JSON text, turning syntax errors into line/column diagnostics.
inline json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::InvalidInput,
                "JSON syntax error at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
}

inline const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(path, std::string("missing field \"") + key + "\"");
  return *it;
}

inline Rational rational_from_json(const json& j, const std::string& path) {
  if (j.is_number_integer()) {
    return j.is_number_unsigned() ? Rational(Integer(j.get<unsigned long long>())) : Rational(Integer(j.get<long long>()));
  }
  if (j.is_number_float()) schema_error(path, "floating-point number is not exact; write it as a string \"a/b\"");
  if (!j.is_string()) schema_error(path, "expected a rational as \"a/b\" or an integer");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    schema_error(path, e.what());
  }
}

inline json to_json(const Rational& q) { return to_string(q); }

inline Point point_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of rationals");
  Point out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rational_from_json(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline ojson to_json(const Point& x) {
  ojson a = ojson::array();
  for (const auto& q : x) a.push_back(to_string(q));
  return a;
}

inline AffineFunc affine_from_json(const json& j, const std::string& path) {
  const Point g = point_from_json(field(j, "gradient", path), path + ".gradient");
  const Rational c = j.contains("constant") ? rational_from_json(j["constant"], path + ".constant") : Rational(0);
  if (g.empty()) schema_error(path + ".gradient", "must be nonempty");
  return AffineFunc(g, c);
}

inline ojson to_json(const AffineFunc& f) {
  ojson o;
  o["gradient"] = to_json(f.gradient());
  o["constant"] = to_string(f.constant());
  return o;
}

inline unsigned unsigned_from_json(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) schema_error(path, "expected a nonnegative integer");
  return j.get<unsigned>();
}

/// { "dim", "labels": [...] } or { "standard_simplex": { "l", "t" } } or
/// { "box": { "lo": [...], "hi": [...] } }.
inline LabelledPolytope polytope_from_json(const json& j, const std::string& path = "polytope") {
  if (!j.is_object()) schema_error(path, "expected an object");
  if (j.contains("standard_simplex")) {
    const auto& s = j["standard_simplex"];
    const std::string sp = path + ".standard_simplex";
    const unsigned l = unsigned_from_json(field(s, "l", sp), sp + ".l");
    const Rational t = s.contains("t") ? rational_from_json(s["t"], sp + ".t") : Rational(1);
    return standard_fiber_polytope(l, t);
  }
  if (j.contains("box")) {
    const auto& b = j["box"];
    return box_polytope(point_from_json(field(b, "lo", path + ".box"), path + ".box.lo"),
                        point_from_json(field(b, "hi", path + ".box"), path + ".box.hi"));
  }
  const auto& labels = field(j, "labels", path);
  if (!labels.is_array() || labels.empty()) schema_error(path + ".labels", "expected a nonempty array");
  std::vector<AffineFunc> ls;
  for (std::size_t i = 0; i < labels.size(); ++i) ls.push_back(affine_from_json(labels[i], path + ".labels[" + std::to_string(i) + "]"));
  if (j.contains("dim")) {
    const unsigned d = unsigned_from_json(j["dim"], path + ".dim");
    for (std::size_t i = 0; i < ls.size(); ++i)
      if (ls[i].dim() != d) schema_error(path + ".labels[" + std::to_string(i) + "]", "gradient length differs from dim");
  }
  return LabelledPolytope::from_halfspaces(std::move(ls));
}

inline ojson to_json(const LabelledPolytope& p) {
  ojson o;
  o["dim"] = p.dim();
  ojson labels = ojson::array();
  for (const auto& l : p.labels()) labels.push_back(to_json(l));
  o["labels"] = labels;
  return o;
}

/// { "dim": d, "terms": [ { "exp": [..], "coef": "a/b" } ] }.
inline Polynomial polynomial_from_json(const json& j, const std::string& path) {
  const unsigned d = unsigned_from_json(field(j, "dim", path), path + ".dim");
  Polynomial p(d);
  const auto& terms = field(j, "terms", path);
  if (!terms.is_array()) schema_error(path + ".terms", "expected an array");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string tp = path + ".terms[" + std::to_string(i) + "]";
    const auto& e = field(terms[i], "exp", tp);
    if (!e.is_array() || e.size() != d) schema_error(tp + ".exp", "expected " + std::to_string(d) + " exponents");
    Exponent ex;
    for (std::size_t k = 0; k < e.size(); ++k) ex.push_back(unsigned_from_json(e[k], tp + ".exp"));
    p.add_term(ex, rational_from_json(field(terms[i], "coef", tp), tp + ".coef"));
  }
  return p;
}

inline ojson to_json(const Polynomial& p) {
  ojson o;
  o["dim"] = p.dim();
  ojson terms = ojson::array();
  for (const auto& [e, c] : p.terms()) terms.push_back(ojson{{"exp", e}, {"coef", to_string(c)}});
  o["terms"] = terms;
  o["text"] = to_string(p);
  return o;
}

/// A fibration whose class parameters may be the symbol "c".
struct ParsedFibration {
  LabelledPolytope fiber;
  std::vector<BaseFactor> factors;
  std::vector<bool> c_is_parameter;

  bool has_parameter() const {
    for (bool b : c_is_parameter)
      if (b) return true;
    return false;
  }
  FibrationData data() const {
    if (has_parameter()) schema_error("factors", "class parameter \"c\" is symbolic; use the threshold command");
    return make_fibration(fiber, factors);
  }
  FibrationTemplate as_template(bool all_factors) const {
    auto flags = c_is_parameter;
    if (all_factors || !has_parameter()) flags.assign(factors.size(), true);
    return FibrationTemplate{fiber, factors, flags};
  }
};

/// { "fiber": <polytope>, "factors": [ { "n", "s", "c", "p" } ] }. A factor
/// may give "I" (Fano index) instead of s and c, meaning c = I, s = 2 n I.
inline ParsedFibration fibration_from_json(const json& j, const std::string& path = "fibration") {
  ParsedFibration out{polytope_from_json(field(j, "fiber", path), path + ".fiber"), {}, {}};
  const auto& fs = field(j, "factors", path);
  if (!fs.is_array()) schema_error(path + ".factors", "expected an array");
  for (std::size_t a = 0; a < fs.size(); ++a) {
    const std::string fp = path + ".factors[" + std::to_string(a) + "]";
    const auto& f = fs[a];
    BaseFactor bf;
    bf.n = unsigned_from_json(field(f, "n", fp), fp + ".n");
    if (bf.n < 1) schema_error(fp + ".n", "must be >= 1");
    bool param = false;
    if (f.contains("I")) {
      if (f.contains("s") || f.contains("c")) schema_error(fp, "give either I or (s, c), not both");
      const Rational idx = rational_from_json(f["I"], fp + ".I");
      bf.c = idx;
      bf.s = 2 * Rational(bf.n) * idx;
    } else {
      bf.s = rational_from_json(field(f, "s", fp), fp + ".s");
      const auto& c = field(f, "c", fp);
      if (c.is_string() && c.get<std::string>() == "c") {
        param = true;
        bf.c = 0;
      } else {
        bf.c = rational_from_json(c, fp + ".c");
      }
    }
    const Point p = f.contains("p") ? point_from_json(f["p"], fp + ".p") : Point(out.fiber.dim());
    if (p.size() != out.fiber.dim()) schema_error(fp + ".p", "length must equal the fiber dimension");
    bf.p = AffineFunc::linear(p);
    out.factors.push_back(std::move(bf));
    out.c_is_parameter.push_back(param);
  }
  return out;
}

inline ojson to_json(const FibrationData& fib) {
  ojson o;
  o["fiber"] = to_json(fib.fiber);
  ojson fs = ojson::array();
  for (const auto& f : fib.factors)
    fs.push_back(ojson{{"n", f.n}, {"s", to_string(f.s)}, {"c", to_string(f.c)}, {"p", to_json(f.p.gradient())}});
  o["factors"] = fs;
  return o;
}

inline std::string decimal(const Rational& q, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, to_double(q));
  return buf;
}

inline ojson to_json(const StabilityReport& r) {
  ojson o;
  o["verdict"] = verdict_name(r.verdict);
  o["method"] = method_name(r.method);
  if (r.method == Method::BernsteinSubdivision) o["depth"] = r.depth;
  o["convention"] = convention_name(r.convention);
  o["x0"] = to_json(r.x0);
  if (r.l_ext) o["l_ext"] = to_json(*r.l_ext);
  if (r.min_value) {
    o["min_value"] = to_string(*r.min_value);
    o["min_value_decimal"] = decimal(*r.min_value);
  }
  if (r.witness) o["witness"] = ojson{{"point", to_json(*r.witness)}, {"value", to_string(*r.witness_value)}};
  if (!r.vertex_values.empty()) {
    ojson vv = ojson::array();
    for (const auto& v : r.vertex_values)
      vv.push_back(ojson{{"vertex", to_json(v.x)}, {"value", to_string(v.value)}, {"decimal", decimal(v.value)}});
    o["vertex_values"] = vv;
  }
  if (!r.per_cone.empty()) {
    ojson cells = ojson::array();
    for (const auto& c : r.per_cone) {
      ojson cj{{"facet", c.facet},
               {"cell", c.cell},
               {"verdict", verdict_name(c.verdict)},
               {"method", method_name(c.method)},
               {"min_vertex_value", to_string(c.min_vertex_value)}};
      if (c.witness) cj["witness"] = ojson{{"point", to_json(*c.witness)}, {"value", to_string(*c.value)}};
      cells.push_back(cj);
    }
    o["per_cone"] = cells;
  }
  if (!r.notes.empty()) o["notes"] = r.notes;
  return o;
}

inline ojson to_json(const ThresholdResult& r) {
  ojson o;
  o["verdict"] = verdict_name(r.verdict);
  o["convention"] = convention_name(r.convention);
  o["threshold"] = ojson{{"lo", to_string(r.lo)}, {"hi", to_string(r.hi)},
                         {"lo_decimal", decimal(r.lo)}, {"hi_decimal", decimal(r.hi)}};
  o["bracket"] = ojson{{"c_lo", to_string(r.c_lo)}, {"c_hi", to_string(r.c_hi)}, {"tol", to_string(r.tol)}};
  o["holds_at_c_hi"] = r.holds_at_hi;
  o["certified_beyond_c_hi"] = r.certified_beyond_hi;
  o["samples"] = r.samples;
  ojson pv = ojson::array();
  for (const auto& v : r.per_vertex) {
    ojson roots = ojson::array();
    for (const auto& rt : v.roots) roots.push_back(ojson{{"lo", to_string(rt.lo)}, {"hi", to_string(rt.hi)}});
    pv.push_back(ojson{{"vertex", to_json(v.vertex)},
                       {"numerator", to_string(v.value.num)},
                       {"denominator", to_string(v.value.den)},
                       {"roots", roots},
                       {"threshold", ojson{{"lo", to_string(v.lo)}, {"hi", to_string(v.hi)}}},
                       {"positive_beyond_c_hi", v.positive_beyond_hi}});
  }
  o["per_vertex"] = pv;
  return o;
}

inline ojson to_json(const CreaseValue& c) {
  ojson o;
  o["h"] = to_json(c.crease.h);
  o["direction"] = c.crease.direction;
  o["offset"] = to_json(c.crease.offset);
  o["futaki"] = to_string(c.futaki);
  o["l1_norm"] = to_string(c.l1_norm);
  o["ratio"] = to_string(c.ratio);
  o["ratio_decimal"] = decimal(c.ratio);
  return o;
}

inline ojson to_json(const ProbeReport& r, Convention conv, unsigned resolution) {
  ojson o;
  o["convention"] = convention_name(conv);
  o["resolution"] = resolution;
  o["creases"] = r.values.size();
  if (r.argmin) {
    o["min_ratio"] = to_string(*r.min_ratio);
    o["min_ratio_decimal"] = decimal(*r.min_ratio);
    o["argmin"] = to_json(r.values[*r.argmin]);
  }
  o["destabilizer"] = r.destabilizer ? to_json(r.values[*r.destabilizer]) : ojson(nullptr);
  o["notes"] = ojson::array(
      {"ratio is F(f) / L1 norm of f over single-crease test functions; only a negative F certifies instability"});
  return o;
}

inline ojson to_json(const ExtremalSolution& s) {
  ojson o;
  o["l_ext"] = to_json(s.l_ext);
  o["constant"] = s.is_constant();
  o["convention"] = convention_name(s.convention);
  o["text"] = to_string(s.l_ext);
  return o;
}

}  // namespace kstab::io
