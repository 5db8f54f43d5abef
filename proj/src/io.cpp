#include "snt/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace snt::io {

namespace {

std::string strip(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

double parse_real(const std::string& s, const std::string& whole) {
  if (s.empty() || s == "+") return 1;
  if (s == "-") return -1;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidInput("malformed complex number '" + whole + "'");
  }
  if (used != s.size()) throw InvalidInput("malformed complex number '" + whole + "'");
  return v;
}

}  // namespace

FieldSpec parse_field(const std::string& text) {
  std::string s = strip(text);
  if (s == "Q" || s == "QQ") return {};
  std::string digits;
  if (s.rfind("GF(", 0) == 0 && s.back() == ')') digits = s.substr(3, s.size() - 4);
  else if (s.rfind("F_", 0) == 0) digits = s.substr(2);
  else if (s.rfind("F", 0) == 0) digits = s.substr(1);
  else digits = s;
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos || digits.size() > 9)
    throw InvalidInput("unknown field '" + text + "' (use Q or GF(p))");
  auto p = static_cast<std::uint32_t>(std::stoul(digits));
  try {
    PrimeField check(p);
  } catch (const Error& e) {
    throw InvalidInput("field '" + text + "': " + e.what());
  }
  return {p};
}

FieldSpec parse_field(const json& j) {
  if (j.is_string()) return parse_field(j.get<std::string>());
  if (j.is_number_unsigned()) return parse_field(std::to_string(j.get<std::uint64_t>()));
  throw InvalidInput("field must be \"Q\" or \"GF(p)\"");
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << j.dump(1) << '\n';
}

std::complex<double> parse_complex(const std::string& text) {
  std::string s = strip(text);
  if (s.empty()) throw InvalidInput("empty complex number");
  if (s.back() != 'i' && s.back() != 'j') return {parse_real(s, text), 0};
  std::string body = s.substr(0, s.size() - 1);
  // split at the last sign that is not the leading one and not part of an exponent
  std::size_t cut = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;)
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      cut = k;
      break;
    }
  if (cut == std::string::npos) return {0, parse_real(body, text)};
  return {parse_real(body.substr(0, cut), text), parse_real(body.substr(cut), text)};
}

std::string complex_str(std::complex<double> z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

std::vector<long long> parse_int_list(const std::string& text) {
  std::vector<long long> out;
  std::stringstream ss(strip(text));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw InvalidInput("malformed list '" + text + "'");
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw InvalidInput("malformed list '" + text + "'");
    }
    if (used != item.size()) throw InvalidInput("malformed list '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidInput("empty list");
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (auto v : parse_int_list(text)) {
    if (v <= 0) throw InvalidInput("list '" + text + "' must contain positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::optional<std::vector<std::size_t>> metadata_partition(const json& j) {
  if (!j.contains("metadata") || !j["metadata"].contains("partition")) return std::nullopt;
  try {
    return j["metadata"]["partition"].get<std::vector<std::size_t>>();
  } catch (const json::exception&) {
    throw InvalidInput("metadata.partition must be an array of positive integers");
  }
}

analytic::GenusMember parse_lattice(const json& j) {
  if (!j.is_object() || !j.contains("gram")) throw InvalidInput("lattice file needs 'gram'");
  std::vector<std::vector<long long>> gram;
  try {
    gram = j["gram"].get<std::vector<std::vector<long long>>>();
  } catch (const json::exception&) {
    throw InvalidInput("lattice gram must be an integer matrix");
  }
  std::string name = j.value("name", std::string("lattice"));
  if (!j.contains("aut_order")) throw InvalidInput("lattice file needs 'aut_order'");
  mpz_class aut;
  const auto& a = j["aut_order"];
  if (a.is_string()) {
    if (aut.set_str(a.get<std::string>(), 10) != 0) throw InvalidInput("malformed aut_order");
  } else if (a.is_number_unsigned()) {
    aut = mpz_class(std::to_string(a.get<std::uint64_t>()));
  } else {
    throw InvalidInput("aut_order must be a positive integer");
  }
  if (aut <= 0) throw InvalidInput("aut_order must be a positive integer");
  return {analytic::make_lattice(name, gram), aut};
}

json lattice_json(const analytic::GenusMember& g) {
  return {{"name", g.lattice.name}, {"gram", g.lattice.gram}, {"aut_order", g.aut_order.get_str()}};
}

bool RunReport::all_ok() const {
  for (const auto& c : checks)
    if (!c.ok) return false;
  return true;
}

json RunReport::to_json() const {
  json cs = json::array();
  std::size_t passed = 0;
  for (const auto& c : checks) {
    cs.push_back({{"name", c.name}, {"status", c.ok ? "ok" : "failed"}, {"details", c.details}});
    passed += c.ok;
  }
  return {{"command", command},
          {"config", config},
          {"checks", cs},
          {"totals", {{"checks", checks.size()}, {"passed", passed}, {"failed", checks.size() - passed}}},
          {"result", result},
          {"wall_time_s", wall_time}};
}

std::string RunReport::checks_text() const {
  std::string s;
  for (const auto& c : checks) s += "check " + c.name + ": " + (c.ok ? "ok" : "FAILED") + "\n";
  return s;
}

}  // namespace snt::io
