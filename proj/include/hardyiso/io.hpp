#pragma once

// JSON encodings ({"re","im"} complex numbers throughout) and the orbit CSV dump.

#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "blaschke.hpp"
#include "errors.hpp"
#include "hardy.hpp"
#include "isometry.hpp"
#include "moebius.hpp"

namespace hardyiso::io {

using Json = nlohmann::json;

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError(std::string("expected an object holding \"") + key + "\"");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  return *it;
}

inline double number(const Json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + " must be a number");
  return j.get<double>();
}

}  // namespace detail

inline Json to_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline Complex complex_from_json(const Json& j) {
  return {detail::number(detail::field(j, "re"), "re"), detail::number(detail::field(j, "im"), "im")};
}

inline Json to_json(const DiscAutomorphism& phi) { return {{"lambda", to_json(phi.lambda())}, {"a", to_json(phi.a())}}; }

inline DiscAutomorphism automorphism_from_json(const Json& j) {
  return {complex_from_json(detail::field(j, "lambda")), complex_from_json(detail::field(j, "a"))};
}

inline Json to_json(const Classification& c) {
  Json fp = Json::array();
  for (const Complex z : c.fixed_points) fp.push_back(to_json(z));
  Json out = {{"kind", to_string(c.kind)}, {"fixed_points", fp}, {"multiplier", to_json(c.multiplier)}};
  if (c.orientation == Orientation::Plus) {
    out["orientation"] = "plus";
  } else if (c.orientation == Orientation::Minus) {
    out["orientation"] = "minus";
  } else {
    out["orientation"] = nullptr;
  }
  return out;
}

inline Json to_json(const InfiniteConstruction& c) {
  Json out = {{"kind", to_string(c.kind)}, {"phi", to_json(c.phi)}};
  if (c.kind == ConstructionKind::ThinnedForwardProduct) {
    out["indices"] = c.indices;
    out["index_tails"] = c.index_tails;
    out["budget"] = c.budget;
    out["budget_upper"] = c.budget_upper;
    out["double_sum_bound"] = c.double_sum_bound;
  }
  return out;
}

inline InfiniteConstruction construction_from_json(const Json& j) {
  InfiniteConstruction c;
  const Json& kind = detail::field(j, "kind");
  if (kind == "BackwardOrbitProduct") {
    c.kind = ConstructionKind::BackwardOrbitProduct;
  } else if (kind == "ThinnedForwardProduct") {
    c.kind = ConstructionKind::ThinnedForwardProduct;
  } else {
    throw ParseError("unknown construction kind");
  }
  c.phi = automorphism_from_json(detail::field(j, "phi"));
  if (c.kind == ConstructionKind::ThinnedForwardProduct) {
    const Json& idx = detail::field(j, "indices");
    if (!idx.is_array() || idx.empty()) throw ParseError("indices must be a non-empty array");
    for (const auto& v : idx) {
      if (!v.is_number_unsigned()) throw ParseError("indices must be positive integers");
      c.indices.push_back(v.get<std::size_t>());
    }
    c.budget = detail::number(detail::field(j, "budget"), "budget");
    c.budget_upper = j.contains("budget_upper") ? detail::number(j["budget_upper"], "budget_upper") : c.budget;
    c.double_sum_bound = detail::number(detail::field(j, "double_sum_bound"), "double_sum_bound");
    if (j.contains("index_tails")) c.index_tails = j["index_tails"].get<std::vector<double>>();
  }
  return c;
}

inline Json to_json(const IsometrySpec& s) {
  Json zeros = Json::array();
  for (const auto& f : s.psi_factors) zeros.push_back(to_json(f));
  Json out = {{"p", s.p}, {"phase", to_json(s.phase)}, {"psi_zeros", zeros}, {"phi", to_json(s.phi)}};
  if (s.infinite) out["infinite"] = to_json(*s.infinite);
  return out;
}

inline IsometrySpec spec_from_json(const Json& j) {
  IsometrySpec s;
  s.p = detail::number(detail::field(j, "p"), "p");
  s.phase = j.contains("phase") ? complex_from_json(j["phase"]) : Complex{1.0, 0.0};
  if (j.contains("psi_zeros")) {
    if (!j["psi_zeros"].is_array()) throw ParseError("psi_zeros must be an array");
    for (const auto& f : j["psi_zeros"]) s.psi_factors.push_back(automorphism_from_json(f));
  }
  s.phi = automorphism_from_json(detail::field(j, "phi"));
  if (j.contains("infinite") && !j["infinite"].is_null()) s.infinite = construction_from_json(j["infinite"]);
  s.validate();
  return s;
}

inline Json to_json(const EquivWitness& w) {
  return {{"eta", to_json(w.eta)},
          {"rho", to_json(w.rho)},
          {"operator_phase", to_json(w.operator_phase)},
          {"residual", w.residual}};
}

inline Json to_json(const EquivalenceResult& r) {
  return {{"decision", to_string(r.decision)},
          {"witness", r.witness ? to_json(*r.witness) : Json(nullptr)},
          {"note", r.note}};
}

/// Infinity has no JSON literal; unbounded values are written as null.
inline Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json to_json(const ConvergenceVerdict& v) {
  return {{"verdict", to_string(v.verdict)},
          {"growth", to_string(v.fitted_growth)},
          {"fit_residual", finite_or_null(v.fit_residual)},
          {"terms", v.partial_sums.size()},
          {"partial_sum", v.partial_sums.empty() ? 0.0 : v.partial_sums.back()},
          {"tail_bound", finite_or_null(v.tail_bound)}};
}

inline Json to_json(const CompositionConstant& c) {
  return {{"rho_closed", to_json(c.rho_closed)}, {"rho_numeric", to_json(c.rho_numeric)}, {"spread", c.spread}};
}

/// Header row and one LF-terminated row per term; n counts from `first_index`.
inline void write_orbit_csv(std::ostream& os, const std::vector<ZeroTerm>& terms, const std::vector<double>& sums,
                            std::size_t first_index = 0) {
  os << "n,re_b,im_b,one_minus_abs,partial_sum\n";
  std::ostringstream row;
  row.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    row.str("");
    row << (first_index + k) << ',' << terms[k].value.real() << ',' << terms[k].value.imag() << ','
        << terms[k].one_minus_abs() << ',' << sums[k] << '\n';
    os << row.str();
  }
}

/// Inline JSON when the argument starts with '{' or '[', otherwise a file path.
inline Json load(const std::string& arg) {
  std::string text = arg;
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ParseError("empty JSON argument");
  if (arg[first] != '{' && arg[first] != '[') {
    std::ifstream in(arg);
    if (!in) throw ParseError("cannot open " + arg);
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what());
  }
}

}  // namespace hardyiso::io
