// Command line front end: solve, check, oracle, gen, bench, profile.

#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "miblp/bench.hpp"
#include "miblp/bilevel.hpp"
#include "miblp/bruteforce.hpp"
#include "miblp/generate.hpp"
#include "miblp/io.hpp"
#include "miblp/search.hpp"

namespace {

using namespace miblp;

std::string pretty(double v) {
  if (v >= kInf / 2) return "inf";
  if (v <= -kInf / 2) return "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

std::string pretty_vec(const std::vector<double>& v) {
  std::string out;
  for (double e : v) {
    if (!out.empty()) out += ", ";
    out += pretty(e);
  }
  return out;
}

std::vector<double> parse_csv_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw IoError("'" + tok + "' is not a number");
    }
  }
  return out;
}

MiblpInstance load(const std::string& path, const std::string& aux, bool one_based) {
  std::vector<std::string> warnings;
  MiblpInstance inst = read_instance(path, aux, one_based, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  return inst;
}

int run_solve(const std::string& path, const std::string& aux, bool one_based,
              const ConfigSpec& spec, const std::string& json_out) {
  MiblpInstance inst = load(path, aux, one_based);
  SolverConfig cfg = build_config(inst, spec);
  SolveResult r = solve(inst, cfg);

  std::cout << "status: " << solve_status_name(r.status) << "\n";
  if (r.incumbent) {
    std::cout << "value:  " << pretty(r.incumbent_value) << "\n"
              << "x:      " << pretty_vec(r.incumbent->x) << "\n"
              << "y:      " << pretty_vec(r.incumbent->y) << "\n";
  } else if (r.status == SolveStatus::limit) {
    std::cout << "value:  none found before the limit\n";
  }
  std::cout << "bound:  " << pretty(r.lower_bound) << "\n"
            << "gap:    " << pretty(r.gap) << "\n"
            << "nodes:  " << r.stats.nodes << "\n";
  long cg = 0, added = 0;
  for (const auto& [family, cs] : r.stats.per_class) {
    (void)family;
    cg += cs.cg_calls;
    added += cs.cuts_added;
  }
  std::cout << "cuts:   " << added << " added in " << cg << " attempts\n"
            << "solves: " << r.stats.second_level_solves << " second-level, " << r.stats.ub_solves
            << " slice bound, " << r.stats.big_m_solves << " big-M\n"
            << "time:   " << pretty(r.stats.time_total) << "s\n";

  if (!json_out.empty()) {
    nlohmann::json j;
    j["status"] = solve_status_name(r.status);
    if (r.incumbent) {
      j["value"] = r.incumbent_value;
      j["x"] = r.incumbent->x;
      j["y"] = r.incumbent->y;
    } else {
      j["value"] = nullptr;
    }
    j["bound"] = r.lower_bound;
    j["gap"] = r.gap >= kInf / 2 ? nlohmann::json() : nlohmann::json(r.gap);
    j["nodes"] = r.stats.nodes;
    j["cuts_added"] = added;
    j["cg_calls"] = cg;
    j["second_level_solves"] = r.stats.second_level_solves;
    j["time_total"] = r.stats.time_total;
    std::ofstream out(json_out);
    if (!out) throw IoError("cannot write '" + json_out + "'");
    out << j.dump(2) << "\n";
  }
  return 0;
}

int run_check(const std::string& path, const std::string& aux, bool one_based,
              const std::string& point_csv) {
  MiblpInstance inst = load(path, aux, one_based);
  std::vector<double> vals = parse_csv_numbers(point_csv);
  if (static_cast<int>(vals.size()) != inst.n1 + inst.n2)
    throw IoError("--point needs " + std::to_string(inst.n1 + inst.n2) + " values (n1 + n2), got " +
                  std::to_string(vals.size()));
  Point p;
  p.x.assign(vals.begin(), vals.begin() + inst.n1);
  p.y.assign(vals.begin() + inst.n1, vals.end());

  FeasibilityVerdict v = check_feasibility(inst, p);
  auto flag = [](bool violated) { return violated ? "violated" : "ok"; };
  std::cout << "point:               x = (" << pretty_vec(p.x) << "), y = (" << pretty_vec(p.y)
            << ")\n"
            << "inside relaxation:   " << (v.in_p ? "yes" : "no") << "\n"
            << "x integrality:       " << flag(v.violates_c1) << "\n"
            << "first-level rows:    " << flag(v.violates_2a) << "\n"
            << "y integrality:       " << flag(v.violates_2b) << "\n";
  if (v.phi_value) {
    std::cout << "follower optimum:    " << pretty(*v.phi_value) << " (point achieves "
              << pretty(dot(inst.d2, p.y)) << ")\n";
  } else {
    std::cout << "follower optimum:    infeasible at this x\n";
  }
  std::cout << "follower optimality: " << flag(v.violates_2c) << "\n"
            << "bilevel feasible:    " << (v.bilevel_feasible() ? "yes" : "no") << "\n";
  return 0;
}

int run_oracle(const std::string& path, const std::string& aux, bool one_based, long cap) {
  MiblpInstance inst = load(path, aux, one_based);
  EnumerationResult res = enumerate(inst, cap);
  if (res.optimum) {
    std::cout << "optimum: " << pretty(res.optimum->second) << " at x = ("
              << pretty_vec(res.optimum->first.x) << "), y = (" << pretty_vec(res.optimum->first.y)
              << ")\n";
  } else {
    std::cout << "optimum: infeasible\n";
  }
  std::cout << "bilevel feasible points: " << res.feasible_set.size() << "\n";
  for (const auto& [pt, val] : res.feasible_set)
    std::cout << "  (" << pretty_vec(pt.x) << " | " << pretty_vec(pt.y) << ")  ->  " << pretty(val)
              << "\n";
  std::cout << "follower value by linking assignment:\n";
  for (const auto& [gamma, value] : res.phi_table) {
    std::cout << "  (";
    for (std::size_t k = 0; k < gamma.size(); ++k)
      std::cout << (k ? ", " : "") << gamma[k];
    std::cout << ")  ->  " << (value ? pretty(*value) : std::string("infeasible")) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branch-and-cut solver for mixed integer bilevel linear optimization"};
  app.require_subcommand(1);

  std::string inst_path, aux_path, cuts, ic_strategy, branch, json_out, point_csv;
  bool aux_one_based = false;
  double tailoff = 0.0, time_limit = 0.0;
  long max_nodes = 0, cap = 1000000;

  auto add_instance_opts = [&](CLI::App* sub) {
    sub->add_option("instance", inst_path, "instance file (.json, or .mps with --aux)")
        ->required();
    sub->add_option("--aux", aux_path, "auxiliary file naming the second level of an MPS model");
    sub->add_flag("--aux-one-based", aux_one_based,
                  "treat auxiliary row and column indices as one-based");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "run the branch-and-cut search");
  add_instance_opts(solve_cmd);
  solve_cmd->add_option("--cuts", cuts,
                        "comma list of cut families (isic1, isic2, idic, hypercube, nogood, "
                        "benders-bin, benders-int, gng), or 'none', or 'default'");
  solve_cmd->add_option("--ic-strategy", ic_strategy,
                        "intersection cut trigger: always, root, xyint, lint, yint, ylint");
  solve_cmd->add_option("--branch", branch, "branching rule: frac, link, or second");
  solve_cmd->add_option("--tailoff", tailoff, "relative bound gain that keeps cutting at a node");
  solve_cmd->add_option("--time-limit", time_limit, "wall clock limit in seconds");
  solve_cmd->add_option("--max-nodes", max_nodes, "node limit");
  solve_cmd->add_option("--json-out", json_out, "also write the result as JSON");

  CLI::App* check_cmd = app.add_subcommand("check", "classify one point of the instance");
  add_instance_opts(check_cmd);
  check_cmd->add_option("--point", point_csv, "comma separated x then y values")->required();

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "enumerate the bilevel feasible set exactly");
  add_instance_opts(oracle_cmd);
  oracle_cmd->add_option("--cap", cap, "largest lattice size the enumeration will attempt");

  std::string family_pos, family_opt, out_path = "";
  unsigned seed = 0;
  GenParams gp;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a random instance");
  gen_cmd->add_option("FAMILY", family_pos,
                      "instance family: den, den2, zhang, or knapsack");
  gen_cmd->add_option("--family", family_opt, "instance family (alternative to the positional)");
  gen_cmd->add_option("--seed", seed, "random seed");
  gen_cmd->add_option("--out", out_path, "output JSON path")->required();
  gen_cmd->add_option("--n1", gp.n1, "first-level variables");
  gen_cmd->add_option("--n2", gp.n2, "second-level variables");
  gen_cmd->add_option("--m2", gp.m2, "second-level rows");
  gen_cmd->add_option("--ub", gp.ub, "variable upper bound");

  std::string manifest_path, bench_out = "records.csv";
  int jobs = 1;
  CLI::App* bench_cmd = app.add_subcommand("bench", "run every instance under every config");
  bench_cmd->add_option("manifest", manifest_path, "JSON manifest of instances and configs")
      ->required();
  bench_cmd->add_option("--out", bench_out, "records CSV path");
  bench_cmd->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);

  std::string records_path, kind_name, baseline_name, profile_out;
  std::vector<std::string> measure_names;
  bool no_filter = false;
  CLI::App* profile_cmd = app.add_subcommand("profile", "turn bench records into CDF curves");
  profile_cmd->add_option("records", records_path, "records CSV from bench")->required();
  profile_cmd->add_option("--kind", kind_name, "performance, baseline, or cumulative")
      ->required();
  profile_cmd->add_option("--baseline", baseline_name, "config name ratios are taken against");
  profile_cmd->add_option("--out", profile_out, "profile CSV path")->required();
  profile_cmd->add_option("--measure", measure_names,
                          "measures to profile: time, nodes, gap, rootgap (repeatable)");
  profile_cmd->add_flag("--no-filter", no_filter,
                        "keep instances every config solves in under a second");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(solve_cmd)) {
      ConfigSpec spec;
      if (solve_cmd->count("--cuts")) spec.cuts = cuts;
      if (solve_cmd->count("--ic-strategy")) spec.ic_strategy = ic_strategy;
      if (solve_cmd->count("--branch")) spec.branch = branch;
      if (solve_cmd->count("--tailoff")) spec.tailoff = tailoff;
      if (solve_cmd->count("--time-limit")) spec.time_limit = time_limit;
      if (solve_cmd->count("--max-nodes")) spec.max_nodes = max_nodes;
      return run_solve(inst_path, aux_path, aux_one_based, spec, json_out);
    }
    if (app.got_subcommand(check_cmd))
      return run_check(inst_path, aux_path, aux_one_based, point_csv);
    if (app.got_subcommand(oracle_cmd)) return run_oracle(inst_path, aux_path, aux_one_based, cap);
    if (app.got_subcommand(gen_cmd)) {
      if (family_pos.empty() == family_opt.empty())
        throw IoError("gen needs exactly one family, positional or --family");
      const std::string& fname = family_pos.empty() ? family_opt : family_pos;
      auto family = family_from_name(fname);
      if (!family) throw IoError("unknown family '" + fname + "'");
      gp.seed = seed;
      MiblpInstance inst = generate(*family, gp);
      write_json(inst, out_path);
      std::cout << "wrote " << out_path << " (" << family_name(*family) << ", seed " << seed
                << ", n1=" << inst.n1 << ", n2=" << inst.n2 << ", m2=" << inst.m2() << ")\n";
      return 0;
    }
    if (app.got_subcommand(bench_cmd)) {
      Manifest manifest = parse_manifest(manifest_path);
      std::vector<BenchRecord> records = run_bench(manifest, jobs);
      write_records_csv(records, bench_out);
      long solved = 0, limited = 0, failed = 0;
      for (const BenchRecord& r : records) {
        if (r.status == "optimal" || r.status == "infeasible")
          ++solved;
        else if (r.status == "limit")
          ++limited;
        else
          ++failed;
      }
      std::cout << "wrote " << bench_out << ": " << records.size() << " runs, " << solved
                << " solved, " << limited << " hit a limit, " << failed << " errored\n";
      return 0;
    }
    if (app.got_subcommand(profile_cmd)) {
      auto kind = profile_kind_from_name(kind_name);
      if (!kind) throw BenchError("unknown profile kind '" + kind_name + "'");
      if (*kind == ProfileKind::baseline && baseline_name.empty())
        throw BenchError("baseline profiles need --baseline");
      std::vector<Measure> measures;
      for (const std::string& mn : measure_names) {
        auto m = measure_from_name(mn);
        if (!m) throw BenchError("unknown measure '" + mn + "'");
        measures.push_back(*m);
      }
      std::vector<BenchRecord> records = read_records_csv(records_path);
      std::vector<ProfilePoint> points =
          profiles(records, *kind, measures, baseline_name, !no_filter);
      write_profile_csv(points, profile_out);
      std::cout << "wrote " << profile_out << ": " << points.size() << " points\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
