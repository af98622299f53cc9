#include "miblp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "miblp/bruteforce.hpp"
#include "miblp/generate.hpp"
#include "miblp/io.hpp"

namespace miblp {

namespace {

constexpr const char* kCsvHeader =
    "instance,config,status,cpu_seconds,nodes,value,bound,gap,root_gap_before,root_gap_after,"
    "second_level_solves,ub_solves,big_m_solves,cg_calls,cuts_added,cut_failures";

std::string fmt(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

void check_name(const std::string& s) {
  if (s.empty() || s.find(',') != std::string::npos || s.find('\n') != std::string::npos)
    throw BenchError("record names must be nonempty and free of commas: '" + s + "'");
}

}  // namespace

BenchRecord record_from_result(const std::string& instance, const std::string& config,
                               const SolveResult& result, double cpu_seconds) {
  BenchRecord rec;
  rec.instance = instance;
  rec.config = config;
  rec.status = solve_status_name(result.status);
  rec.cpu_seconds = cpu_seconds;
  rec.nodes = result.stats.nodes;
  rec.value = result.incumbent ? result.incumbent_value : kInf;
  rec.bound = result.lower_bound;
  rec.gap = result.gap;
  rec.root_gap_before = result.stats.root_gap_before;
  rec.root_gap_after = result.stats.root_gap_after;
  rec.second_level_solves = result.stats.second_level_solves;
  rec.ub_solves = result.stats.ub_solves;
  rec.big_m_solves = result.stats.big_m_solves;
  for (const auto& [family, cs] : result.stats.per_class) {
    (void)family;
    rec.cg_calls += cs.cg_calls;
    rec.cuts_added += cs.cuts_added;
    rec.cut_failures += cs.failures();
  }
  return rec;
}

void write_records_csv(const std::vector<BenchRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BenchError("cannot write '" + path + "'");
  out << kCsvHeader << "\n";
  for (const BenchRecord& r : records) {
    check_name(r.instance);
    check_name(r.config);
    out << r.instance << ',' << r.config << ',' << r.status << ',' << fmt(r.cpu_seconds) << ','
        << r.nodes << ',' << fmt(r.value) << ',' << fmt(r.bound) << ',' << fmt(r.gap) << ','
        << fmt(r.root_gap_before) << ',' << fmt(r.root_gap_after) << ',' << r.second_level_solves
        << ',' << r.ub_solves << ',' << r.big_m_solves << ',' << r.cg_calls << ',' << r.cuts_added
        << ',' << r.cut_failures << "\n";
  }
}

std::vector<BenchRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BenchError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw BenchError(path + ": not a records file (unexpected header)");
  std::vector<BenchRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cell;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cell.push_back(tok);
    if (cell.size() != 16)
      throw BenchError(path + ":" + std::to_string(lineno) + ": expected 16 columns, got " +
                       std::to_string(cell.size()));
    auto num = [&](int k) {
      try {
        return std::stod(cell[k]);
      } catch (const std::exception&) {
        throw BenchError(path + ":" + std::to_string(lineno) + ": bad number '" + cell[k] + "'");
      }
    };
    auto count = [&](int k) { return static_cast<long>(num(k)); };
    BenchRecord r;
    r.instance = cell[0];
    r.config = cell[1];
    r.status = cell[2];
    r.cpu_seconds = num(3);
    r.nodes = count(4);
    r.value = num(5);
    r.bound = num(6);
    r.gap = num(7);
    r.root_gap_before = num(8);
    r.root_gap_after = num(9);
    r.second_level_solves = count(10);
    r.ub_solves = count(11);
    r.big_m_solves = count(12);
    r.cg_calls = count(13);
    r.cuts_added = count(14);
    r.cut_failures = count(15);
    out.push_back(std::move(r));
  }
  return out;
}

std::optional<CutOrigin> cut_family_from_name(const std::string& name) {
  if (name == "isic1" || name == "improving_solution_ic") return CutOrigin::improving_solution_ic;
  if (name == "isic2" || name == "improving_solution_ic_relaxed")
    return CutOrigin::improving_solution_ic_relaxed;
  if (name == "idic" || name == "improving_direction_ic") return CutOrigin::improving_direction_ic;
  if (name == "hypercube" || name == "hypercube_ic") return CutOrigin::hypercube_ic;
  if (name == "nogood" || name == "integer_no_good") return CutOrigin::integer_no_good;
  if (name == "benders-bin" || name == "benders_binary") return CutOrigin::benders_binary;
  if (name == "benders-int" || name == "benders_interdiction")
    return CutOrigin::benders_interdiction;
  if (name == "gng" || name == "generalized_no_good") return CutOrigin::generalized_no_good;
  return std::nullopt;
}

std::string cut_family_name(CutOrigin family) {
  switch (family) {
    case CutOrigin::improving_solution_ic: return "isic1";
    case CutOrigin::improving_solution_ic_relaxed: return "isic2";
    case CutOrigin::improving_direction_ic: return "idic";
    case CutOrigin::hypercube_ic: return "hypercube";
    case CutOrigin::integer_no_good: return "nogood";
    case CutOrigin::benders_binary: return "benders-bin";
    case CutOrigin::benders_interdiction: return "benders-int";
    case CutOrigin::generalized_no_good: return "gng";
    case CutOrigin::integrality: return "rounding";
  }
  return "";
}

std::optional<IcStrategy> strategy_from_name(const std::string& name) {
  if (name == "always") return IcStrategy::always;
  if (name == "root" || name == "always_root") return IcStrategy::always_root;
  if (name == "xyint" || name == "xy_int") return IcStrategy::xy_int;
  if (name == "lint" || name == "l_int") return IcStrategy::l_int;
  if (name == "yint" || name == "y_int") return IcStrategy::y_int;
  if (name == "ylint" || name == "yl_int") return IcStrategy::yl_int;
  return std::nullopt;
}

std::optional<BranchRule> branch_from_name(const std::string& name) {
  if (name == "frac" || name == "fractional") return BranchRule::fractional;
  if (name == "link" || name == "linking") return BranchRule::linking;
  if (name == "second" || name == "second_level") return BranchRule::second_level;
  return std::nullopt;
}

std::string solve_status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::limit: return "limit";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "";
}

SolverConfig build_config(const MiblpInstance& inst, const ConfigSpec& spec) {
  SolverConfig cfg = default_config(inst);
  if (spec.cuts) {
    std::set<CutOrigin> chosen;
    std::stringstream ss(*spec.cuts);
    std::string tok;
    bool any_token = false;
    while (std::getline(ss, tok, ',')) {
      tok.erase(0, tok.find_first_not_of(" \t"));
      tok.erase(tok.find_last_not_of(" \t") + 1);
      if (tok.empty()) continue;
      any_token = true;
      if (tok == "none") continue;
      if (tok == "default") {
        chosen.insert(cfg.cuts.begin(), cfg.cuts.end());
        continue;
      }
      auto family = cut_family_from_name(tok);
      if (!family) throw BenchError("unknown cut family '" + tok + "'");
      chosen.insert(*family);
    }
    if (!any_token && !spec.cuts->empty() && *spec.cuts != "none")
      throw BenchError("empty cut list '" + *spec.cuts + "'");
    SolverConfig plain;
    plain.cuts = std::move(chosen);
    cfg = std::move(plain);
  }
  if (spec.ic_strategy) {
    auto s = strategy_from_name(*spec.ic_strategy);
    if (!s) throw BenchError("unknown strategy '" + *spec.ic_strategy + "'");
    for (CutOrigin f : {CutOrigin::improving_solution_ic, CutOrigin::improving_solution_ic_relaxed,
                        CutOrigin::improving_direction_ic})
      cfg.ic_strategy[f] = *s;
  }
  if (spec.branch) {
    auto b = branch_from_name(*spec.branch);
    if (!b) throw BenchError("unknown branch rule '" + *spec.branch + "'");
    cfg.branching = *b;
  }
  if (spec.tailoff) cfg.tailoff_threshold = *spec.tailoff;
  if (spec.milp_cuts) cfg.milp_integrality_cuts = *spec.milp_cuts;
  if (spec.max_nodes) cfg.max_nodes = *spec.max_nodes;
  if (spec.time_limit) cfg.time_limit_seconds = *spec.time_limit;
  return cfg;
}

namespace {

using nlohmann::json;

std::string spec_string(const json& j, const std::string& ctx, const char* key) {
  if (!j.contains(key)) throw BenchError(ctx + ": missing '" + std::string(key) + "'");
  if (!j[key].is_string()) throw BenchError(ctx + ": '" + std::string(key) + "' must be a string");
  return j[key].get<std::string>();
}

}  // namespace

Manifest parse_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BenchError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw BenchError(path + ": " + e.what());
  }
  if (!j.is_object()) throw BenchError(path + ": manifest must be a JSON object");

  Manifest m;
  if (j.contains("time_limit")) {
    if (!j["time_limit"].is_number()) throw BenchError(path + ": 'time_limit' must be a number");
    m.time_limit = j["time_limit"].get<double>();
  }
  if (j.contains("max_nodes")) {
    if (!j["max_nodes"].is_number_integer())
      throw BenchError(path + ": 'max_nodes' must be an integer");
    m.max_nodes = j["max_nodes"].get<long>();
  }

  if (!j.contains("instances") || !j["instances"].is_array() || j["instances"].empty())
    throw BenchError(path + ": manifest needs a nonempty 'instances' array");
  std::filesystem::path base = std::filesystem::path(path).parent_path();
  std::set<std::string> seen_ids;
  for (std::size_t k = 0; k < j["instances"].size(); ++k) {
    const json& e = j["instances"][k];
    std::string ctx = path + ": instances[" + std::to_string(k) + "]";
    if (!e.is_object()) throw BenchError(ctx + " must be an object");
    std::string id = spec_string(e, ctx, "id");
    if (!seen_ids.insert(id).second) throw BenchError(ctx + ": duplicate id '" + id + "'");
    if (e.contains("path")) {
      std::string file = spec_string(e, ctx, "path");
      std::filesystem::path p(file);
      if (p.is_relative()) p = base / p;
      std::string aux;
      if (e.contains("aux")) {
        std::filesystem::path a(spec_string(e, ctx, "aux"));
        if (a.is_relative()) a = base / a;
        aux = a.string();
      }
      bool one_based = e.value("aux_one_based", false);
      m.instances.emplace_back(id, read_instance(p.string(), aux, one_based));
    } else if (e.contains("family")) {
      std::string fname = spec_string(e, ctx, "family");
      auto family = family_from_name(fname);
      if (!family) throw BenchError(ctx + ": unknown family '" + fname + "'");
      GenParams gp;
      gp.n1 = e.value("n1", gp.n1);
      gp.n2 = e.value("n2", gp.n2);
      gp.m2 = e.value("m2", gp.m2);
      gp.ub = e.value("ub", gp.ub);
      gp.seed = e.value("seed", 0u);
      m.instances.emplace_back(id, generate(*family, gp));
    } else {
      throw BenchError(ctx + " needs either 'path' or 'family'");
    }
  }

  if (!j.contains("configs") || !j["configs"].is_array() || j["configs"].empty())
    throw BenchError(path + ": manifest needs a nonempty 'configs' array");
  std::set<std::string> seen_names;
  for (std::size_t k = 0; k < j["configs"].size(); ++k) {
    const json& e = j["configs"][k];
    std::string ctx = path + ": configs[" + std::to_string(k) + "]";
    if (!e.is_object()) throw BenchError(ctx + " must be an object");
    ConfigSpec spec;
    spec.name = spec_string(e, ctx, "name");
    if (!seen_names.insert(spec.name).second)
      throw BenchError(ctx + ": duplicate config name '" + spec.name + "'");
    if (e.contains("cuts")) {
      if (e["cuts"].is_string()) {
        spec.cuts = e["cuts"].get<std::string>();
      } else if (e["cuts"].is_array()) {
        std::string list;
        for (const json& c : e["cuts"]) {
          if (!c.is_string()) throw BenchError(ctx + ": 'cuts' entries must be strings");
          if (!list.empty()) list += ",";
          list += c.get<std::string>();
        }
        spec.cuts = list.empty() ? "none" : list;
      } else {
        throw BenchError(ctx + ": 'cuts' must be a string or an array of strings");
      }
    }
    if (e.contains("ic_strategy")) spec.ic_strategy = spec_string(e, ctx, "ic_strategy");
    if (e.contains("branch")) spec.branch = spec_string(e, ctx, "branch");
    if (e.contains("tailoff")) {
      if (!e["tailoff"].is_number()) throw BenchError(ctx + ": 'tailoff' must be a number");
      spec.tailoff = e["tailoff"].get<double>();
    }
    if (e.contains("milp_cuts")) {
      if (!e["milp_cuts"].is_boolean()) throw BenchError(ctx + ": 'milp_cuts' must be a boolean");
      spec.milp_cuts = e["milp_cuts"].get<bool>();
    }
    if (e.contains("max_nodes")) {
      if (!e["max_nodes"].is_number_integer())
        throw BenchError(ctx + ": 'max_nodes' must be an integer");
      spec.max_nodes = e["max_nodes"].get<long>();
    }
    if (e.contains("time_limit")) {
      if (!e["time_limit"].is_number()) throw BenchError(ctx + ": 'time_limit' must be a number");
      spec.time_limit = e["time_limit"].get<double>();
    }
    m.configs.push_back(std::move(spec));
  }
  return m;
}

std::vector<BenchRecord> run_bench(const Manifest& manifest, int jobs) {
  std::size_t tasks = manifest.instances.size() * manifest.configs.size();
  std::vector<BenchRecord> out(tasks);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= tasks) return;
      const auto& [iname, inst] = manifest.instances[k / manifest.configs.size()];
      const ConfigSpec& spec = manifest.configs[k % manifest.configs.size()];
      double t0 = thread_cpu_seconds();
      BenchRecord rec;
      try {
        SolverConfig cfg = build_config(inst, spec);
        if (!spec.time_limit && manifest.time_limit > 0.0)
          cfg.time_limit_seconds = manifest.time_limit;
        if (!spec.max_nodes && manifest.max_nodes > 0) cfg.max_nodes = manifest.max_nodes;
        SolveResult result = solve(inst, cfg);
        rec = record_from_result(iname, spec.name, result, thread_cpu_seconds() - t0);
      } catch (const std::exception&) {
        rec.instance = iname;
        rec.config = spec.name;
        rec.status = "error";
        rec.cpu_seconds = thread_cpu_seconds() - t0;
      }
      out[k] = std::move(rec);
    }
  };

  int workers = std::clamp<int>(jobs, 1, static_cast<int>(std::max<std::size_t>(tasks, 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  return out;
}

std::optional<ProfileKind> profile_kind_from_name(const std::string& name) {
  if (name == "performance") return ProfileKind::performance;
  if (name == "baseline") return ProfileKind::baseline;
  if (name == "cumulative") return ProfileKind::cumulative;
  return std::nullopt;
}

std::optional<Measure> measure_from_name(const std::string& name) {
  if (name == "time") return Measure::time;
  if (name == "nodes") return Measure::nodes;
  if (name == "gap") return Measure::gap;
  if (name == "rootgap") return Measure::rootgap;
  return std::nullopt;
}

std::string measure_name(Measure m) {
  switch (m) {
    case Measure::time: return "time";
    case Measure::nodes: return "nodes";
    case Measure::gap: return "gap";
    case Measure::rootgap: return "rootgap";
  }
  return "";
}

std::vector<ProfilePoint> profiles(const std::vector<BenchRecord>& records, ProfileKind kind,
                                   std::vector<Measure> measures, const std::string& baseline,
                                   bool filter) {
  std::vector<std::string> configs, instances;
  std::map<std::pair<std::string, std::string>, const BenchRecord*> cell;
  for (const BenchRecord& r : records) {
    if (std::find(configs.begin(), configs.end(), r.config) == configs.end())
      configs.push_back(r.config);
    if (std::find(instances.begin(), instances.end(), r.instance) == instances.end())
      instances.push_back(r.instance);
    cell[{r.instance, r.config}] = &r;
  }
  if (kind == ProfileKind::baseline &&
      std::find(configs.begin(), configs.end(), baseline) == configs.end())
    throw BenchError("baseline configuration '" + baseline + "' does not appear in the records");
  if (measures.empty()) {
    measures = kind == ProfileKind::performance ? std::vector<Measure>{Measure::time}
               : kind == ProfileKind::baseline  ? std::vector<Measure>{Measure::nodes}
                                                : std::vector<Measure>{Measure::time, Measure::gap};
  }

  auto at = [&](const std::string& inst, const std::string& cfg) -> const BenchRecord* {
    auto it = cell.find({inst, cfg});
    return it == cell.end() ? nullptr : it->second;
  };
  auto solved = [](const BenchRecord* r) { return r && r->status == "optimal"; };

  std::vector<std::string> included;
  for (const std::string& inst : instances) {
    bool all_fast = true, any_solved = false;
    for (const std::string& cfg : configs) {
      const BenchRecord* r = at(inst, cfg);
      bool s = solved(r);
      any_solved = any_solved || s;
      all_fast = all_fast && s && r->cpu_seconds < 1.0;
    }
    if (filter && all_fast) continue;
    if (kind != ProfileKind::cumulative && !any_solved) continue;
    included.push_back(inst);
  }
  if (included.empty()) return {};
  double n = static_cast<double>(included.size());

  auto value_of = [&](const BenchRecord* r, Measure m) -> std::optional<double> {
    if (!r) return std::nullopt;
    switch (m) {
      case Measure::time:
        if (!solved(r)) return std::nullopt;
        return r->cpu_seconds;
      case Measure::nodes:
        if (!solved(r)) return std::nullopt;
        return static_cast<double>(r->nodes);
      case Measure::gap:
        if (r->gap >= kInf / 2) return std::nullopt;
        return r->gap;
      case Measure::rootgap:
        return r->root_gap_after;
    }
    return std::nullopt;
  };
  auto floor_of = [](Measure m) {
    return m == Measure::time ? 0.01 : m == Measure::nodes ? 1.0 : 1e-6;
  };

  std::vector<ProfilePoint> out;
  for (Measure m : measures) {
    std::map<std::string, double> denom;
    if (kind != ProfileKind::cumulative) {
      for (const std::string& inst : included) {
        if (kind == ProfileKind::performance) {
          double best = kInf;
          for (const std::string& cfg : configs)
            if (auto v = value_of(at(inst, cfg), m)) best = std::min(best, *v);
          if (best < kInf / 2) denom[inst] = std::max(best, floor_of(m));
        } else if (auto v = value_of(at(inst, baseline), m)) {
          denom[inst] = std::max(*v, floor_of(m));
        }
      }
    }
    for (const std::string& cfg : configs) {
      std::vector<double> xs;
      for (const std::string& inst : included) {
        auto v = value_of(at(inst, cfg), m);
        if (!v) continue;
        if (kind == ProfileKind::cumulative) {
          xs.push_back(*v);
        } else {
          auto d = denom.find(inst);
          if (d == denom.end()) continue;
          double ratio = *v / d->second;
          if (kind == ProfileKind::performance) ratio = std::max(ratio, 1.0);
          xs.push_back(ratio);
        }
      }
      std::sort(xs.begin(), xs.end());
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i + 1 < xs.size() && xs[i + 1] == xs[i]) continue;  // keep the last of a tie run
        out.push_back({cfg, measure_name(m), xs[i], static_cast<double>(i + 1) / n});
      }
    }
  }
  return out;
}

void write_profile_csv(const std::vector<ProfilePoint>& points, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BenchError("cannot write '" + path + "'");
  out << "config,measure,x,fraction\n";
  for (const ProfilePoint& p : points)
    out << p.config << ',' << p.measure << ',' << fmt(p.x) << ',' << fmt(p.fraction) << "\n";
}

RhsDiagnosis diagnose_rhs_strength(const MiblpInstance& inst, const Cut& cut, long cap) {
  if (static_cast<int>(cut.alpha_x.size()) != inst.n1 ||
      static_cast<int>(cut.alpha_y.size()) != inst.n2)
    throw BenchError("cut dimensions do not match the instance");

  EnumerationResult truth = enumerate(inst, cap);
  double best = kInf;
  for (const auto& [pt, val] : truth.feasible_set) {
    (void)val;
    if (cut.scope.kind == ScopeKind::linking_excluding) {
      bool in_slice = true;
      for (std::size_t k = 0; k < inst.linking.size(); ++k)
        in_slice = in_slice && std::abs(pt.x[inst.linking[k]] - cut.scope.gamma[k]) <= kEps;
      if (in_slice) continue;
    }
    best = std::min(best, cut.value_at(pt.x, pt.y));
  }

  RhsDiagnosis d;
  d.orig_rhs = cut.beta;
  d.best_rhs = best;
  auto root = solve_relaxation(inst);
  if (!root) {
    d.obj_before = d.obj_after_orig = d.obj_after_best = kInf;
    return d;
  }
  d.obj_before = root->result.objective;

  auto with_rhs = [&](double rhs) {
    LpProblem lp = root->lp;
    Mat rows(lp.rows.rows + 1, lp.rows.cols);
    std::copy(lp.rows.a.begin(), lp.rows.a.end(), rows.a.begin());
    std::vector<double> jr = joint_row(cut);
    for (int j = 0; j < rows.cols; ++j) rows(rows.rows - 1, j) = jr[j];
    lp.rows = std::move(rows);
    lp.rhs.push_back(rhs);
    LpResult res = solve_lp(lp);
    return res.status == LpStatus::optimal ? res.objective : kInf;
  };
  d.obj_after_orig = with_rhs(cut.beta);
  d.obj_after_best = best < kInf / 2 ? with_rhs(best) : kInf;
  return d;
}

}  // namespace miblp
