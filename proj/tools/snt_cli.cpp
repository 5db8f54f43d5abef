// snt: command-line front end.
//
// Exit codes: 0 ok, 1 a check failed, 2 bad input, 3 enumeration guard
// exceeded, 4 truncation could not reach the requested tolerance.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "snt/commands.hpp"
#include "snt/fixtures.hpp"
#include "snt/io.hpp"

namespace {

using namespace snt;
using io::json;

enum ExitCode { kOk = 0, kCheckFailed = 1, kInput = 2, kGuard = 3, kTruncation = 4 };

struct Options {
  bool json = false;
  std::uint64_t seed = fixtures::kDefaultSeed;
  // decompose
  std::string module_file;
  // orbit
  std::string x_file, y_file;
  // census
  std::uint32_t q = 3;
  std::size_t k = 0;
  std::string partition, v_diag;
  std::size_t v_hyperbolic = 0, dim_v = 0, transport_samples = 0;
  std::uint64_t limit = 0;
  // verify-sw
  std::string lattice = "e8";
  std::vector<std::string> lattice_files;
  std::string tau11 = "2i", tau12 = "0.5i", tau22 = "2i", mass;
  unsigned rank = 8;
  double tol = 1e-8;
  bool direct = false;
  // gen-fixtures
  std::string out_dir = "fixtures";
};

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

int emit(io::RunReport& rep, const std::string& text, const Options& o,
         std::chrono::steady_clock::time_point start) {
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.json) {
    std::cout << rep.to_json().dump(2) << '\n';
  } else {
    std::cout << text << rep.checks_text();
    if (!rep.all_ok()) {
      std::vector<std::string> failed;
      for (const auto& c : rep.checks)
        if (!c.ok) failed.push_back(c.name);
      std::cout << "FAILED: " << join(failed, ", ") << '\n';
    }
  }
  return rep.all_ok() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snt: symplectic nilpotent t-modules, orthogonal orbits and a theta identity check"};
  app.require_subcommand(1);
  Options o;

  auto* dec = app.add_subcommand("decompose", "Decompose an snt-module file into H_k blocks");
  dec->add_option("module", o.module_file, "Module JSON file")->required();
  dec->add_flag("--json", o.json, "Machine-readable report");

  auto* orb = app.add_subcommand("orbit", "Orbit invariant of x, and optionally compare with y");
  orb->add_option("x", o.x_file, "Tensor JSON file")->required();
  orb->add_option("y", o.y_file, "Second tensor JSON file");
  orb->add_flag("--json", o.json, "Machine-readable report");

  auto* cen = app.add_subcommand("census", "Compare invariant classes with brute-force orbits over F_q");
  cen->add_option("--q", o.q, "Odd prime")->required();
  cen->add_option("--k", o.k, "M = H_k");
  cen->add_option("--partition,--M", o.partition, "M = H_{k_1} + ... as k_1,k_2,...");
  cen->add_option("--dimV", o.dim_v, "dim V (identity form unless --v-diag or --v-hyperbolic is given)");
  cen->add_option("--v-diag", o.v_diag, "Diagonal entries of the form on V, e.g. 1,1,2");
  cen->add_option("--v-hyperbolic", o.v_hyperbolic, "Number of hyperbolic planes in V (placed first)");
  cen->add_option("--limit", o.limit, "Enumeration limit (default 1e6 or SNT_MAX_ENUM)");
  cen->add_option("--transport-samples", o.transport_samples, "Random x, x.g pairs to transport");
  cen->add_option("--seed", o.seed, "Seed for sampled transports");
  cen->add_flag("--json", o.json, "Machine-readable report");

  auto* sw = app.add_subcommand("verify-sw", "Check the colinear theta identity for an even unimodular genus");
  sw->add_option("--lattice", o.lattice, "Built-in lattice (e8)");
  sw->add_option("--lattice-file", o.lattice_files, "Lattice JSON file {name, gram, aut_order}; repeat for a genus");
  sw->add_option("--tau11", o.tau11, "e.g. 2i");
  sw->add_option("--tau12", o.tau12, "e.g. 0.5i or 0.3+0.5i");
  sw->add_option("--tau22", o.tau22, "e.g. 2i");
  sw->add_option("--N", o.rank, "Lattice rank");
  sw->add_option("--tol", o.tol, "Relative tolerance");
  sw->add_option("--mass", o.mass, "Override the mass constant C (rational)");
  sw->add_flag("--direct", o.direct, "Also evaluate the Eisenstein side by direct summation");
  sw->add_flag("--json", o.json, "Machine-readable report");

  auto* gen = app.add_subcommand("gen-fixtures", "Write the deterministic fixture set");
  gen->add_option("--out", o.out_dir, "Output directory");
  gen->add_option("--seed", o.seed, "Generator seed");
  gen->add_flag("--json", o.json, "Machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  auto start = std::chrono::steady_clock::now();
  io::RunReport rep;
  rep.command = join(std::vector<std::string>(argv, argv + argc), " ");
  auto fail = [&](int code, const std::string& kind, const std::string& msg, std::optional<double> achieved = {}) {
    std::cerr << "error (" << kind << "): " << msg << '\n';
    if (o.json) {
      json j{{"command", rep.command}, {"error", {{"kind", kind}, {"message", msg}}}, {"exit_code", code}};
      if (achieved) j["error"]["achieved"] = *achieved;
      std::cout << j.dump(2) << '\n';
    }
    return code;
  };
  try {
    commands::Output out;
    if (dec->parsed()) {
      out = commands::decompose(io::load_json(o.module_file));
      out.report.config["module"] = o.module_file;
    } else if (orb->parsed()) {
      std::optional<json> jy;
      if (!o.y_file.empty()) jy = io::load_json(o.y_file);
      out = commands::orbit(io::load_json(o.x_file), jy);
      out.report.config["x"] = o.x_file;
      out.report.config["y"] = o.y_file;
    } else if (cen->parsed()) {
      commands::CensusOptions c;
      c.q = o.q;
      c.k = o.k;
      if (!o.partition.empty()) c.partition = io::parse_size_list(o.partition);
      if (!o.v_diag.empty()) c.v_diag = io::parse_int_list(o.v_diag);
      c.v_hyperbolic = o.v_hyperbolic;
      c.dim_v = o.dim_v;
      c.limit = o.limit;
      c.transport_samples = o.transport_samples;
      c.seed = o.seed;
      out = commands::census(c);
    } else if (sw->parsed()) {
      commands::IdentityOptions c;
      if (o.lattice_files.empty()) {
        std::string name = o.lattice;
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (name != "e8") throw InvalidInput("unknown built-in lattice '" + o.lattice + "' (use e8 or --lattice-file)");
      }
      for (const auto& path : o.lattice_files) c.lattices.push_back(io::load_json(path));
      c.tau11 = o.tau11;
      c.tau12 = o.tau12;
      c.tau22 = o.tau22;
      c.rank = o.rank;
      c.tol = o.tol;
      c.direct = o.direct;
      c.mass = o.mass;
      out = commands::verify_sw(c);
      if (!o.lattice_files.empty()) out.report.config["lattices"] = o.lattice_files;
    } else if (gen->parsed()) {
      out.report.config = {{"out", o.out_dir}, {"seed", o.seed}};
      auto written = fixtures::write(o.out_dir, fixtures::generate(o.seed));
      out.report.result = {{"files", written}};
      out.text = "wrote " + std::to_string(written.size()) + " fixture files to " + o.out_dir + "\n";
      for (const auto& w : written) out.text += "  " + w + "\n";
    }
    out.report.command = rep.command;
    return emit(out.report, out.text, o, start);
  } catch (const GuardExceeded& e) {
    return fail(kGuard, "guard", e.what());
  } catch (const TruncationError& e) {
    return fail(kTruncation, "truncation", std::string(e.what()) + " (achieved " + fmt("%.3e", e.achieved()) + ")",
                e.achieved());
  } catch (const Error& e) {
    return fail(kInput, "input", e.what());
  } catch (const json::exception& e) {
    return fail(kInput, "input", e.what());
  } catch (const std::exception& e) {
    return fail(kCheckFailed, "internal", e.what());
  }
}
