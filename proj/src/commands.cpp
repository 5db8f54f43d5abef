#include "snt/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "snt/analytic.hpp"
#include "snt/orbits.hpp"
#include "snt/snt_module.hpp"

namespace snt::commands {

namespace {

using io::json;

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// --- decompose ---

template <class K>
void run_decompose(const FieldOf<K>& f, const json& j, io::RunReport& rep, std::string& text) {
  auto m = io::parse_module<K>(f, j);
  auto bad = validate(m);
  if (!bad.empty()) throw InvalidModule("invalid module: " + join(bad, "; "));
  auto d = decompose(m);
  auto std_mod = standard_module<K>(f, d.partition);
  const auto& p = d.from_standard;
  rep.check("iso_transports_gram", p * m.gram * p.transpose() == std_mod.gram);
  rep.check("iso_transports_t", p * m.t_action == std_mod.t_action * p);
  // each part appears twice in the Jordan type of t
  auto jt = jordan_type(m.t_action, Matrix<K>::identity(f, m.dim()));
  std::vector<std::size_t> half;
  bool doubled = jt.size() % 2 == 0;
  for (std::size_t i = 0; doubled && i < jt.size(); i += 2) {
    doubled = jt[i] == jt[i + 1];
    half.push_back(jt[i]);
  }
  rep.check("partition_is_half_jordan_type", doubled && half == d.partition, {{"jordan_type", jt}});
  if (auto meta = io::metadata_partition(j)) {
    auto expected = *meta;
    std::sort(expected.rbegin(), expected.rend());
    rep.check("partition_matches_metadata", expected == d.partition, {{"metadata", *meta}});
  }
  rep.result = {{"partition", d.partition},
                {"from_standard", io::matrix_json(p)},
                {"to_standard", io::matrix_json(d.to_standard)}};
  text += "dim: " + std::to_string(m.dim()) + "\n";
  text += "partition: " + io::list_text(d.partition) + "\n";
  text += "isomorphism (row i = image of standard basis vector i):\n" + io::matrix_text(p);
}

// --- orbit ---

template <class K>
std::string invariant_text(const OrbitInvariant<K>& inv) {
  std::string s;
  if (inv.w.rows() == 0) {
    s += "W = Im f_x = 0 (empty)\n";
    s += "i = 0\n";
    return s;
  }
  s += "W = Im f_x, type " + io::list_text(inv.types) + ", RREF basis:\n" + io::matrix_text(inv.w);
  s += "i = T_W(x) on the quasi-basis e_ab (a <= b):\n";
  std::size_t c = 0;
  for (std::size_t a = 0; a < inv.types.size(); ++a)
    for (std::size_t b = a; b < inv.types.size(); ++b)
      s += "  e_" + std::to_string(a + 1) + std::to_string(b + 1) + ": " + inv.coords[c++].str() + "\n";
  return s;
}

template <class K>
void run_orbit(const FieldOf<K>& f, const json& jx, const std::optional<json>& jy, io::RunReport& rep,
               std::string& text) {
  auto s = io::parse_setting<K>(f, jx);
  auto x = io::parse_tensor<K>(f, s, jx);
  auto wx = image_of(s, x);
  auto inv = t_sym(s, x, wx);
  auto sub = is_submersive(s, x, wx);
  rep.result["x"] = io::invariant_json(inv);
  rep.result["x"]["submersive"] = sub.rank_criterion;
  rep.result["setting"] = {{"m", s.m()}, {"n", s.n()}, {"precision", s.precision}};
  rep.check("submersive_criteria_agree", sub.rank_criterion == sub.image_criterion,
            {{"rank", sub.rank}, {"target_dim", sub.target_dim}});
  text += "M_- dim " + std::to_string(s.m()) + ", V dim " + std::to_string(s.n()) + ", precision K = " +
          std::to_string(s.precision) + "\n";
  text += invariant_text(inv);
  text += "submersive at x: " + std::string(sub.rank_criterion ? "yes" : "no") + " (rank " +
          std::to_string(sub.rank) + " of " + std::to_string(sub.target_dim) + ")\n";
  if (!jy) return;

  auto fy = io::parse_field(jy->at("field"));
  auto fx = io::parse_field(jx.at("field"));
  if (fx.p != fy.p) throw InvalidInput("x and y are over different fields");
  auto sy = io::parse_setting<K>(f, *jy);
  if (!(sy.t_minus.rows() == s.t_minus.rows() && sy.v_gram.rows() == s.v_gram.rows() && sy.t_minus == s.t_minus &&
        sy.v_gram == s.v_gram))
    throw InvalidInput("x and y live in different ambient spaces (M_- dims " + std::to_string(s.m()) + " vs " +
                       std::to_string(sy.m()) + ", V dims " + std::to_string(s.n()) + " vs " +
                       std::to_string(sy.n()) + ")");
  auto y = io::parse_tensor<K>(f, s, *jy);
  bool same = same_orbit(s, x, y);
  auto g = transport(s, x, y);
  rep.result["y"] = io::invariant_json(orbit_invariant(s, y));
  rep.result["same_orbit"] = same;
  rep.check("transport_exists_iff_same_invariant", same == g.has_value());
  text += "same_orbit: " + std::string(same ? "true" : "false") + "\n";
  if (g) {
    bool maps = act(s, x, *g) == y;
    bool orth = is_orthogonal(*g, s.v_gram);
    rep.result["transport"] = io::tpoly_matrix_json(*g);
    rep.check("transport_maps_x_to_y", maps);
    rep.check("transport_is_orthogonal", orth);
    text += "transport g = sum_j g_j t^j with x.g = y:\n";
    for (std::size_t j = 0; j < g->order(); ++j) text += " g_" + std::to_string(j) + ":\n" + io::matrix_text(g->coefficient(j), "   ");
  }
}

// --- census ---

Matrix<ModP> census_gram(const PrimeField& f, const CensusOptions& o) {
  std::vector<long long> diag = o.v_diag;
  if (o.dim_v && diag.empty() && !o.v_hyperbolic) diag.assign(o.dim_v, 1);
  std::size_t n = 2 * o.v_hyperbolic + diag.size();
  if (n == 0) throw InvalidInput("census needs --dimV, --v-diag or --v-hyperbolic");
  if (o.dim_v && o.dim_v != n) throw InvalidInput("--dimV does not match the given form");
  Matrix<ModP> q(f, n, n);
  for (std::size_t h = 0; h < o.v_hyperbolic; ++h) {
    q(2 * h, 2 * h + 1) = f.one();
    q(2 * h + 1, 2 * h) = f.one();
  }
  for (std::size_t i = 0; i < diag.size(); ++i) q(2 * o.v_hyperbolic + i, 2 * o.v_hyperbolic + i) = f.from_int(diag[i]);
  return q;
}

std::string census_text(const OrbitCensus& c) {
  std::string s;
  s += "elements: " + std::to_string(c.elements) + ", |O(V)(F_q[t]/t^K)| = " + std::to_string(c.group_order) + "\n";
  s += "orbits (invariant classification vs brute force):\n";
  s += "  W_type     size  bf_size  invariant\n";
  for (const auto& cl : c.classes) {
    std::string t = io::list_text(cl.w_type);
    t.resize(std::max<std::size_t>(t.size(), 9), ' ');
    char buf[64];
    std::snprintf(buf, sizeof buf, "%6zu %8zu", cl.size, cl.orbit_size);
    s += "  " + t + " " + buf + "  " + cl.invariant + "\n";
  }
  s += "brute-force orbits: " + std::to_string(c.brute_force_orbits) +
       ", invariant classes: " + std::to_string(c.invariant_classes) +
       ", partitions equal: " + (c.partitions_equal ? "yes" : "no") + "\n";
  return s;
}

void run_census(const CensusOptions& o, io::RunReport& rep, std::string& text) {
  PrimeField f = [&] {
    try {
      return PrimeField(o.q);
    } catch (const Error& e) {
      throw InvalidInput(std::string("--q: ") + e.what());
    }
  }();
  std::vector<std::size_t> part;
  if (!o.partition.empty()) part = o.partition;
  else if (o.k) part = {o.k};
  else throw InvalidInput("census needs --k or --partition");
  auto q = census_gram(f, o);
  auto s = standard_setting<ModP>(f, part, q);
  std::uint64_t limit = o.limit ? o.limit : enumeration_limit(1'000'000);
  rep.config["limit"] = limit;
  auto c = orbit_census(s, limit);
  json classes = json::array();
  for (const auto& cl : c.classes) {
    auto j = io::invariant_json(cl.data);
    j["orbit_size"] = cl.orbit_size;
    j["class_size"] = cl.size;
    classes.push_back(j);
  }
  rep.result = {{"elements", c.elements},
                {"group_order", c.group_order},
                {"brute_force_orbits", c.brute_force_orbits},
                {"invariant_classes", c.invariant_classes},
                {"partitions_equal", c.partitions_equal},
                {"classes", classes}};
  rep.check("partitions_equal", c.partitions_equal);
  std::size_t sized = 0;
  for (const auto& cl : c.classes) sized += cl.size == cl.orbit_size;
  rep.check("class_sizes_match_orbit_sizes", sized == c.classes.size());
  text += "field GF(" + std::to_string(o.q) + "), M = H" + io::list_text(part) + ", V gram:\n" + io::matrix_text(q);
  text += census_text(c);

  if (o.transport_samples) {
    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, c.elements - 1);
    std::size_t ok = 0, tried = 0;
    for (std::size_t t = 0; t < o.transport_samples; ++t) {
      auto x = decode_element(s, pick(rng));
      std::size_t factors = 1 + t % 3;
      auto g = random_orthogonal(q, s.precision, rng, factors);
      auto y = act(s, x, g);
      auto h = transport(s, x, y);
      ++tried;
      ok += h && act(s, x, *h) == y;
    }
    rep.check("sampled_transports", ok == tried, {{"tried", tried}, {"ok", ok}});
    text += "sampled transports: " + std::to_string(ok) + "/" + std::to_string(tried) + "\n";
  }
}

// --- verify-sw ---

void run_verify_sw(const IdentityOptions& o, io::RunReport& rep, std::string& text) {
  std::vector<analytic::GenusMember> genus;
  if (o.lattices.empty()) genus.push_back({analytic::e8(), analytic::weyl_group_order_e8()});
  for (const auto& l : o.lattices) genus.push_back(io::parse_lattice(l));
  analytic::SiegelPoint tau{io::parse_complex(o.tau11), io::parse_complex(o.tau12), io::parse_complex(o.tau22)};
  std::optional<mpq_class> mass;
  if (!o.mass.empty()) {
    mpq_class m;
    if (m.set_str(o.mass, 10) != 0 || m <= 0) throw InvalidInput("--mass must be a positive rational");
    m.canonicalize();
    mass = m;
  }
  auto r = analytic::verify_identity(genus, tau, o.rank, o.tol, o.direct, mass ? &*mass : nullptr);

  json lat = json::array();
  for (const auto& g : genus) lat.push_back({{"name", g.lattice.name}, {"aut_order", g.aut_order.get_str()}});
  rep.result = {{"genus", lat},
                {"tau", {io::complex_str(tau.t11), io::complex_str(tau.t12), io::complex_str(tau.t22)}},
                {"N", r.n},
                {"mass_constant", r.mass.get_str()},
                {"lhs", {r.lhs.real(), r.lhs.imag()}},
                {"lhs_tail", r.lhs_tail},
                {"rhs", {r.rhs.real(), r.rhs.imag()}},
                {"rhs_tail", r.rhs_tail},
                {"abs_diff", r.abs_diff},
                {"rel_diff", r.rel_diff},
                {"tolerance", r.tolerance},
                {"precision_floor", analytic::precision_floor()},
                {"diagonal_specialization", r.specialization},
                {"pass", r.pass}};
  if (r.specialization) rep.result["label"] = "diagonal specialization (t12 = 0)";
  rep.check("relative_difference_within_tolerance", r.pass, {{"rel_diff", r.rel_diff}, {"tolerance", r.tolerance}});

  text += "genus:";
  for (const auto& g : genus) text += " " + g.lattice.name + " (|Aut| = " + g.aut_order.get_str() + ")";
  text += "\nN = " + std::to_string(r.n) + ", mass constant C = " + r.mass.get_str() + "\n";
  text += "tau = (" + o.tau11 + ", " + o.tau12 + ", " + o.tau22 + ")";
  if (r.specialization) text += "  [diagonal specialization (t12 = 0)]";
  text += "\n";
  auto cstr = [](std::complex<double> z) {
    return fmt("%.16f", z.real()) + (std::abs(z.imag()) > 0 ? " " + fmt("%+.3e", z.imag()) + "i" : "");
  };
  text += "Eisenstein side      = " + cstr(r.lhs) + "  (tail <= " + fmt("%.2e", r.lhs_tail) + ")\n";
  text += "colinear theta side  = " + cstr(r.rhs) + "  (tail <= " + fmt("%.2e", r.rhs_tail) + ")\n";
  text += "|difference| = " + fmt("%.3e", r.abs_diff) + ", relative " + fmt("%.3e", r.rel_diff) + ", tolerance " +
          fmt("%.1e", r.tolerance) + "\n";
  if (r.has_direct) {
    rep.result["lhs_direct"] = {r.lhs_direct.real(), r.lhs_direct.imag()};
    rep.result["lhs_direct_tail"] = r.lhs_direct_tail;
    rep.result["direct_rel_diff"] = r.direct_rel_diff;
    double slack = std::abs(r.lhs_direct - r.lhs);
    bool bracket = slack <= r.lhs_direct_tail + r.lhs_tail + analytic::precision_floor() * std::abs(r.lhs);
    rep.check("direct_sum_brackets_accelerated", bracket, {{"difference", slack}});
    rep.check("direct_sum_agrees_loosely", r.direct_rel_diff < 1e-3, {{"direct_rel_diff", r.direct_rel_diff}});
    text += "direct Eisenstein sum = " + cstr(r.lhs_direct) + "  (tail <= " + fmt("%.2e", r.lhs_direct_tail) +
            "), relative difference " + fmt("%.3e", r.direct_rel_diff) + "\n";
  }
  text += std::string("result: ") + (r.pass ? "PASS" : "FAIL") + "\n";
}

}  // namespace

Output decompose(const json& j) {
  Output out;
  if (!j.is_object() || !j.contains("field")) throw InvalidInput("module file needs a 'field'");
  auto spec = io::parse_field(j["field"]);
  out.report.config["field"] = spec.name();
  out.text = "field: " + spec.name() + "\n";
  io::with_field(spec, [&](const auto& f) {
    using K = typename std::decay_t<decltype(f)>::value_type;
    run_decompose<K>(f, j, out.report, out.text);
  });
  return out;
}

Output orbit(const json& x, const std::optional<json>& y) {
  Output out;
  for (const auto* j : {&x, y ? &*y : nullptr})
    if (j && (!j->is_object() || !j->contains("field"))) throw InvalidInput("tensor file needs a 'field'");
  auto spec = io::parse_field(x["field"]);
  out.report.config["field"] = spec.name();
  out.text = "field: " + spec.name() + "\n";
  io::with_field(spec, [&](const auto& f) {
    using K = typename std::decay_t<decltype(f)>::value_type;
    run_orbit<K>(f, x, y, out.report, out.text);
  });
  return out;
}

Output census(const CensusOptions& o) {
  Output out;
  out.report.config = {{"q", o.q},          {"k", o.k},
                       {"partition", o.partition}, {"dimV", o.dim_v},
                       {"v_diag", o.v_diag}, {"v_hyperbolic", o.v_hyperbolic},
                       {"seed", o.seed},    {"transport_samples", o.transport_samples}};
  run_census(o, out.report, out.text);
  return out;
}

Output verify_sw(const IdentityOptions& o) {
  Output out;
  out.report.config = {{"lattices", o.lattices.empty() ? json("e8") : json(o.lattices)},
                       {"tau11", o.tau11}, {"tau12", o.tau12}, {"tau22", o.tau22},
                       {"N", o.rank},      {"tol", o.tol},     {"direct", o.direct}};
  run_verify_sw(o, out.report, out.text);
  return out;
}

}  // namespace snt::commands
