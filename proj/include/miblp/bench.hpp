#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "miblp/cuts.hpp"
#include "miblp/model.hpp"
#include "miblp/search.hpp"

namespace miblp {

struct BenchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One solve of one instance under one named configuration. The gap column
// repeats the solver's definition, (value - bound) / max(1, |value|), so a
// record can be sanity-checked without re-running anything.
struct BenchRecord {
  std::string instance;
  std::string config;
  std::string status;  // optimal | limit | infeasible | error
  double cpu_seconds = 0.0;
  long nodes = 0;
  double value = kInf;  // incumbent leader value, inf when none was found
  double bound = kInf;
  double gap = 0.0;
  double root_gap_before = 0.0;
  double root_gap_after = 0.0;
  long second_level_solves = 0;
  long ub_solves = 0;
  long big_m_solves = 0;
  long cg_calls = 0;
  long cuts_added = 0;
  long cut_failures = 0;

  bool operator==(const BenchRecord&) const = default;
};

BenchRecord record_from_result(const std::string& instance, const std::string& config,
                               const SolveResult& result, double cpu_seconds);

// Records travel as plain CSV with a fixed header; numbers are written in
// shortest round-trip form and infinities as inf. Names must not contain
// commas or line breaks.
void write_records_csv(const std::vector<BenchRecord>& records, const std::string& path);
std::vector<BenchRecord> read_records_csv(const std::string& path);

// Short command-line spellings for the cut families, strategies, branch
// rules, and measures. Lookups return nullopt for unknown names.
std::optional<CutOrigin> cut_family_from_name(const std::string& name);
std::string cut_family_name(CutOrigin family);
std::optional<IcStrategy> strategy_from_name(const std::string& name);
std::optional<BranchRule> branch_from_name(const std::string& name);
std::string solve_status_name(SolveStatus status);

// A configuration described in strings, the way the CLI and the bench
// manifest give one. Fields left empty keep whatever the default bundle for
// the instance chooses; cuts = "none" empties the set, "default" copies the
// bundle's set.
struct ConfigSpec {
  std::string name = "default";
  std::optional<std::string> cuts;         // comma-separated family names
  std::optional<std::string> ic_strategy;  // applied to all three IC classes
  std::optional<std::string> branch;
  std::optional<double> tailoff;
  std::optional<bool> milp_cuts;
  std::optional<long> max_nodes;
  std::optional<double> time_limit;
};

SolverConfig build_config(const MiblpInstance& inst, const ConfigSpec& spec);

// Benchmark manifest: a list of named instances (from files or generator
// specs) crossed with a list of named configurations, plus shared limits
// that per-config fields may override.
struct Manifest {
  std::vector<std::pair<std::string, MiblpInstance>> instances;
  std::vector<ConfigSpec> configs;
  double time_limit = 0.0;  // 0 = none
  long max_nodes = 0;       // 0 = keep the solver default
};

Manifest parse_manifest(const std::string& path);

// Runs every instance under every configuration. Solves are independent and
// spread across jobs worker threads; the record order is instance-major
// regardless of scheduling. A solve that throws becomes a record with
// status "error".
std::vector<BenchRecord> run_bench(const Manifest& manifest, int jobs = 1);

enum class ProfileKind { performance, baseline, cumulative };
enum class Measure { time, nodes, gap, rootgap };

std::optional<ProfileKind> profile_kind_from_name(const std::string& name);
std::optional<Measure> measure_from_name(const std::string& name);
std::string measure_name(Measure m);

// One CDF step point: the fraction of included instances on which config
// achieved measure <= x.
struct ProfilePoint {
  std::string config;
  std::string measure;
  double x = 0.0;
  double fraction = 0.0;

  bool operator==(const ProfilePoint&) const = default;
};

// Profile curves over a record set.
//
//   performance  x = measure / best measure over all configs, per instance
//   baseline     x = measure / the named config's measure, per instance
//   cumulative   x = the measure itself
//
// Instances every config finished under a second are dropped when filter is
// set; performance and baseline additionally drop instances no config
// solved, since every ratio there would be infinite. Unsolved runs
// contribute no point, so a curve tops out at the fraction its config
// solved. An empty measure list picks the kind's usual ones: time ratios
// for performance, node ratios for baseline, time and final gap for
// cumulative.
std::vector<ProfilePoint> profiles(const std::vector<BenchRecord>& records, ProfileKind kind,
                                   std::vector<Measure> measures = {},
                                   const std::string& baseline = "", bool filter = true);

void write_profile_csv(const std::vector<ProfilePoint>& points, const std::string& path);

// How much stronger a cut's right-hand side could have been: compares it
// against the best valid value, the minimum of the cut's left-hand side over
// the enumerated set the cut must not touch (the bilevel feasible set, minus
// the excluded slice for slice-excluding cuts). An empty set means the cut
// may prune outright and best_rhs is inf. The three objective values show
// the root relaxation bound without the cut, with it, and with the best
// right-hand side in its place.
struct RhsDiagnosis {
  double orig_rhs = 0.0;
  double best_rhs = 0.0;
  double obj_before = 0.0;
  double obj_after_orig = 0.0;
  double obj_after_best = 0.0;
};

RhsDiagnosis diagnose_rhs_strength(const MiblpInstance& inst, const Cut& cut,
                                   long cap = 1000000);

}  // namespace miblp
