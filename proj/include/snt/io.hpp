#pragma once

// JSON reading and writing. Exact scalars travel as strings ("3/4", "2");
// plain JSON integers are accepted on input. A file names its field as "Q"
// or "GF(p)".

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "snt/analytic.hpp"
#include "snt/errors.hpp"
#include "snt/matrix.hpp"
#include "snt/orbits.hpp"
#include "snt/scalar.hpp"
#include "snt/snt_module.hpp"
#include "snt/tpoly.hpp"

namespace snt::io {

using json = nlohmann::json;

struct FieldSpec {
  std::uint32_t p = 0;  // 0 for Q

  bool rational() const { return p == 0; }
  std::string name() const { return p ? "GF(" + std::to_string(p) + ")" : "Q"; }
};

/// "Q", "GF(p)", "F_p", "Fp" or a bare prime p.
FieldSpec parse_field(const json& j);
FieldSpec parse_field(const std::string& s);

/// Calls fn(RationalField) or fn(PrimeField) according to the field.
template <class Fn>
decltype(auto) with_field(const FieldSpec& spec, Fn&& fn) {
  if (spec.rational()) return fn(RationalField{});
  return fn(PrimeField(spec.p));
}

json load_json(const std::string& path);
void save_json(const std::string& path, const json& j);

/// "2i", "0.3+0.5i", "-1.5", "i", "0".
std::complex<double> parse_complex(const std::string& s);
std::string complex_str(std::complex<double> z);

std::vector<std::size_t> parse_size_list(const std::string& s);  // "2,1"
std::vector<long long> parse_int_list(const std::string& s);

inline std::string scalar_str(const Rational& x) { return x.str(); }
inline std::string scalar_str(const ModP& x) { return std::to_string(x.value()); }

template <class K>
K parse_scalar(const FieldOf<K>& f, const json& v) {
  if (v.is_string()) return f.parse(v.get<std::string>());
  if (v.is_number_integer()) return f.from_int(v.get<long long>());
  throw InvalidInput("scalar must be a string or an integer, got " + v.dump());
}

template <class K>
Matrix<K> parse_matrix(const FieldOf<K>& f, const json& j, const std::string& what,
                       std::optional<std::size_t> cols = std::nullopt) {
  if (!j.is_array()) throw InvalidInput(what + ": expected an array of rows");
  std::size_t r = j.size();
  std::size_t c = r ? (j[0].is_array() ? j[0].size() : 0) : cols.value_or(0);
  Matrix<K> m(f, r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (!j[i].is_array() || j[i].size() != c) throw InvalidInput(what + ": ragged or malformed row " + std::to_string(i));
    for (std::size_t k = 0; k < c; ++k) m(i, k) = parse_scalar<K>(f, j[i][k]);
  }
  if (cols && r && c != *cols)
    throw InvalidInput(what + ": expected " + std::to_string(*cols) + " columns, got " + std::to_string(c));
  return m;
}

template <class K>
json matrix_json(const Matrix<K>& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(scalar_str(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

template <class K>
json poly_json(const TruncPoly<K>& p) {
  json c = json::array();
  for (const auto& x : p.coeffs()) c.push_back(scalar_str(x));
  return c;
}

/// List of coefficient matrices g_0, g_1, ...
template <class K>
json tpoly_matrix_json(const TPolyMatrix<K>& g) {
  json out = json::array();
  for (std::size_t s = 0; s < g.order(); ++s) out.push_back(matrix_json(g.coefficient(s)));
  return out;
}

template <class K>
std::string matrix_text(const Matrix<K>& m, const std::string& indent = "  ") {
  std::string s;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s += indent + "[";
    for (std::size_t k = 0; k < m.cols(); ++k) s += (k ? ", " : "") + scalar_str(m(i, k));
    s += "]\n";
  }
  return s;
}

template <class T>
std::string list_text(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + "]";
}

// --- module files: {field, dim, t_action, gram, metadata: {partition}} ---

template <class K>
SntModule<K> parse_module(const FieldOf<K>& f, const json& j) {
  if (!j.is_object()) throw InvalidInput("module file must be a JSON object");
  for (const char* key : {"t_action", "gram"})
    if (!j.contains(key)) throw InvalidInput(std::string("module file lacks '") + key + "'");
  auto gram = parse_matrix<K>(f, j["gram"], "gram");
  auto t = parse_matrix<K>(f, j["t_action"], "t_action");
  if (j.contains("dim")) {
    auto d = j["dim"].get<std::size_t>();
    if (gram.rows() != d || t.rows() != d) throw InvalidInput("dim does not match the matrix sizes");
  }
  return {t, gram};
}

template <class K>
json module_json(const FieldSpec& spec, const SntModule<K>& m, const std::vector<std::size_t>* partition = nullptr) {
  json j{{"field", spec.name()}, {"dim", m.dim()}, {"t_action", matrix_json(m.t_action)}, {"gram", matrix_json(m.gram)}};
  if (partition) j["metadata"] = {{"partition", *partition}};
  return j;
}

std::optional<std::vector<std::size_t>> metadata_partition(const json& j);

// --- tensor files: {field, v_gram, x, and partition | t_minus | module + flag} ---

template <class K>
TensorSetting<K> parse_setting(const FieldOf<K>& f, const json& j) {
  if (!j.contains("v_gram")) throw InvalidInput("tensor file lacks 'v_gram'");
  auto q = parse_matrix<K>(f, j["v_gram"], "v_gram");
  if (j.contains("partition")) return standard_setting<K>(f, j["partition"].get<std::vector<std::size_t>>(), q);
  if (j.contains("t_minus")) return make_setting(parse_matrix<K>(f, j["t_minus"], "t_minus"), q);
  if (j.contains("module") && j.contains("flag")) {
    auto m = parse_module<K>(f, j["module"]);
    require_valid(m);
    LagrangianFlag<K> fl{parse_matrix<K>(f, j["flag"].at("minus"), "flag.minus", m.dim()),
                         parse_matrix<K>(f, j["flag"].at("plus"), "flag.plus", m.dim())};
    return make_setting(m, fl, q);
  }
  throw InvalidInput("tensor file needs one of 'partition', 't_minus' or 'module' with 'flag'");
}

template <class K>
Matrix<K> parse_tensor(const FieldOf<K>& f, const TensorSetting<K>& s, const json& j) {
  if (!j.contains("x")) throw InvalidInput("tensor file lacks 'x'");
  auto x = parse_matrix<K>(f, j["x"], "x", s.n());
  if (x.rows() == 0) return Matrix<K>(f, s.m(), s.n());
  if (x.rows() != s.m() || x.cols() != s.n())
    throw InvalidInput("x must be " + std::to_string(s.m()) + "x" + std::to_string(s.n()) + ", got " +
                       std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  return x;
}

template <class K>
json invariant_json(const OrbitInvariant<K>& inv) {
  json coords = json::array();
  for (const auto& c : inv.coords) coords.push_back(poly_json(c));
  return {{"W", matrix_json(inv.w)}, {"W_type", inv.types}, {"i_coords", coords}};
}

// --- lattices: {name, gram: integer matrix, aut_order: "..."} ---

analytic::GenusMember parse_lattice(const json& j);
json lattice_json(const analytic::GenusMember& g);

// --- run reports ---

struct Check {
  std::string name;
  bool ok = false;
  json details = json::object();
};

struct RunReport {
  std::string command;
  json config = json::object();
  std::vector<Check> checks;
  json result = json::object();
  double wall_time = 0;

  void check(std::string name, bool ok, json details = json::object()) {
    checks.push_back({std::move(name), ok, std::move(details)});
  }
  bool all_ok() const;
  json to_json() const;
  /// One "check <name>: ok|FAILED" line per check.
  std::string checks_text() const;
};

}  // namespace snt::io
