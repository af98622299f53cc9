#include "miblp/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <utility>

namespace miblp {

namespace {

constexpr double kCutoffTol = 1e-9;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double snap(double v) {
  double r = std::round(v);
  return std::abs(v - r) <= kEps ? r : v;
}

bool fractional(double v) {
  return std::abs(v - std::round(v)) > kEps;
}

struct ScopedTimer {
  double& acc;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  explicit ScopedTimer(double& a) : acc(a) {}
  ~ScopedTimer() {
    acc += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace

IcStrategy SolverConfig::strategy_for(CutOrigin family) const {
  auto it = ic_strategy.find(family);
  return it == ic_strategy.end() ? IcStrategy::always : it->second;
}

SolverConfig default_config(const MiblpInstance& inst) {
  SolverConfig cfg;
  bool binary_first = inst.r1 == inst.n1;
  for (int j = 0; j < inst.n1 && binary_first; ++j)
    binary_first = std::abs(inst.lx[j]) <= 1e-9 && std::abs(inst.ux[j] - 1.0) <= 1e-9;
  if (inst.interdiction) {
    cfg.cuts = {CutOrigin::benders_binary, CutOrigin::benders_interdiction,
                CutOrigin::improving_solution_ic};
    cfg.ic_strategy[CutOrigin::improving_solution_ic] = IcStrategy::l_int;
    cfg.branching = BranchRule::linking;
    cfg.milp_integrality_cuts = false;
  } else if (binary_first) {
    cfg.cuts = {CutOrigin::benders_binary, CutOrigin::generalized_no_good,
                CutOrigin::improving_solution_ic, CutOrigin::improving_direction_ic};
    cfg.ic_strategy[CutOrigin::improving_solution_ic] = IcStrategy::xy_int;
    cfg.ic_strategy[CutOrigin::improving_direction_ic] = IcStrategy::always;
  } else {
    cfg.cuts = {CutOrigin::improving_direction_ic, CutOrigin::improving_solution_ic};
    cfg.ic_strategy[CutOrigin::improving_direction_ic] = IcStrategy::always;
    cfg.ic_strategy[CutOrigin::improving_solution_ic] = IcStrategy::l_int;
  }
  return cfg;
}

VertexStructure classify_vertex(const MiblpInstance& inst,
                                const std::vector<double>& lower,
                                const std::vector<double>& upper,
                                const std::vector<double>& z, int depth) {
  VertexStructure vs;
  vs.depth = depth;
  vs.x_integral = true;
  for (int j = 0; j < inst.r1; ++j)
    if (fractional(z[j])) vs.x_integral = false;
  vs.y_integral = true;
  for (int j = 0; j < inst.r2; ++j)
    if (fractional(z[inst.n1 + j])) vs.y_integral = false;
  vs.linking_integral = true;
  vs.linking_fixed = true;
  for (int i : inst.linking) {
    if (fractional(z[i])) vs.linking_integral = false;
    if (upper[i] - lower[i] > 1e-9) vs.linking_fixed = false;
  }
  vs.in_s = vs.x_integral && vs.y_integral;
  return vs;
}

bool should_generate(CutOrigin family, const VertexStructure& vs, IcStrategy strategy,
                     int depth) {
  switch (family) {
    case CutOrigin::integer_no_good:
      return vs.in_s;
    case CutOrigin::benders_binary:
    case CutOrigin::benders_interdiction:
    case CutOrigin::generalized_no_good:
    case CutOrigin::hypercube_ic:
      return vs.linking_integral;
    case CutOrigin::integrality:
      return !vs.in_s;
    case CutOrigin::improving_solution_ic:
    case CutOrigin::improving_solution_ic_relaxed:
    case CutOrigin::improving_direction_ic:
      break;
  }
  switch (strategy) {
    case IcStrategy::always:
      return true;
    case IcStrategy::always_root:
      return depth == 0;
    case IcStrategy::xy_int:
      return vs.in_s;
    case IcStrategy::l_int:
      return vs.linking_integral;
    case IcStrategy::y_int:
      return vs.y_integral;
    case IcStrategy::yl_int:
      return vs.linking_integral || vs.y_integral;
  }
  return false;
}

OraclePolicy oracle_policy(const VertexStructure& vs, const SolverConfig& config) {
  auto wants = [&](CutOrigin f) {
    return config.cuts.count(f) > 0 &&
           should_generate(f, vs, config.strategy_for(f), vs.depth);
  };
  OraclePolicy p;
  p.solve_second_level = vs.in_s || vs.linking_fixed ||
                         wants(CutOrigin::improving_solution_ic) ||
                         wants(CutOrigin::benders_binary) ||
                         wants(CutOrigin::benders_interdiction);
  p.solve_ub = vs.linking_fixed || wants(CutOrigin::hypercube_ic) ||
               wants(CutOrigin::generalized_no_good);
  return p;
}

void Pseudocosts::ensure(int n) {
  if (static_cast<int>(down_sum.size()) < n) {
    down_sum.resize(n, 0.0);
    up_sum.resize(n, 0.0);
    down_n.resize(n, 0);
    up_n.resize(n, 0);
  }
}

void Pseudocosts::record(int var, bool up, double gain_per_unit) {
  ensure(var + 1);
  double g = std::max(gain_per_unit, 0.0);
  if (up) {
    up_sum[var] += g;
    ++up_n[var];
  } else {
    down_sum[var] += g;
    ++down_n[var];
  }
}

double Pseudocosts::estimate(int var, bool up) const {
  if (var >= static_cast<int>(down_sum.size())) return 1.0;
  long n = up ? up_n[var] : down_n[var];
  if (n == 0) return 1.0;
  return (up ? up_sum[var] : down_sum[var]) / static_cast<double>(n);
}

double Pseudocosts::score(int var, double frac) const {
  double down = estimate(var, false) * frac;
  double up = estimate(var, true) * (1.0 - frac);
  return std::max(down, 1e-6) * std::max(up, 1e-6);
}

std::optional<BranchDecision> select_branching(const MiblpInstance& inst,
                                               const SearchNode& node, const LpResult& lp,
                                               BranchRule rule, const Pseudocosts& pc) {
  const std::vector<double>& z = lp.solution;
  std::vector<int> candidates;
  auto add_fractional = [&](int begin, int count) {
    for (int j = begin; j < begin + count; ++j)
      if (fractional(z[j])) candidates.push_back(j);
  };
  switch (rule) {
    case BranchRule::fractional:
      add_fractional(0, inst.r1);
      add_fractional(inst.n1, inst.r2);
      break;
    case BranchRule::linking:
      for (int i : inst.linking)
        if (node.upper[i] - node.lower[i] > 1e-9) candidates.push_back(i);
      break;
    case BranchRule::second_level:
      add_fractional(inst.n1, inst.r2);
      if (candidates.empty()) add_fractional(0, inst.r1);
      break;
  }
  if (candidates.empty()) return std::nullopt;

  int best = -1;
  double best_score = -1.0;
  for (int j : candidates) {
    double f = z[j] - std::floor(z[j]);
    if (!fractional(z[j])) f = 0.5;  // integral linking value, split is symmetric
    double s = pc.score(j, f);
    if (s > best_score + 1e-12) {
      best = j;
      best_score = s;
    }
  }
  BranchDecision dec;
  dec.var = best;
  dec.value = snap(z[best]);
  dec.integer_split = !fractional(z[best]);
  return dec;
}

bool tailoff_check(const std::vector<double>& bound_history, double threshold) {
  if (bound_history.size() < 2) return true;
  double prev = bound_history[bound_history.size() - 2];
  double gain = std::abs(bound_history.back() - prev);
  return gain / std::max(1.0, std::abs(prev)) >= threshold;
}

std::vector<Cut> simple_integrality_cuts(const MiblpInstance& inst, const NodeLp& node,
                                         const std::vector<bool>& appended_set_valid) {
  if (inst.r1 != inst.n1 || inst.r2 != inst.n2) return {};
  const double tol = 1e-9;
  if (!is_integral(inst.a1, tol) || !is_integral(inst.g1, tol) ||
      !is_integral(inst.b1, tol) || !is_integral(inst.a2, tol) ||
      !is_integral(inst.g2, tol) || !is_integral(inst.b2, tol) ||
      !is_integral(inst.lx, tol) || !is_integral(inst.ux, tol) ||
      !is_integral(inst.ly, tol) || !is_integral(inst.uy, tol))
    return {};
  if (node.result.status != LpStatus::optimal) return {};

  ConeRays cone;
  try {
    cone = extract_cone(node.lp, node.result);
  } catch (const SimplexError&) {
    return {};
  }

  // Every binding row has to be an exact integer statement about the
  // integer-feasible set: instance rows, untouched box bounds, or appended
  // rows whose flag says their derivation already had that property.
  int n = inst.n1 + inst.n2;
  int m = inst.m1() + inst.m2();
  for (int k = 0; k < n; ++k) {
    int idx = cone.binding_index[k];
    switch (cone.binding_kind[k]) {
      case BindingKind::constraint:
        if (idx >= m) {
          int e = idx - m;
          if (e >= static_cast<int>(appended_set_valid.size()) || !appended_set_valid[e])
            return {};
        }
        break;
      case BindingKind::lower_bound: {
        double orig = idx < inst.n1 ? inst.lx[idx] : inst.ly[idx - inst.n1];
        if (std::abs(node.lp.lower[idx] - orig) > tol) return {};
        break;
      }
      case BindingKind::upper_bound: {
        double orig = idx < inst.n1 ? inst.ux[idx] : inst.uy[idx - inst.n1];
        if (std::abs(node.lp.upper[idx] - orig) > tol) return {};
        break;
      }
    }
    if (!is_integral(cone.binding_rhs[k], tol)) return {};
    for (int c = 0; c < n; ++c)
      if (!is_integral(cone.binding_rows(k, c), tol)) return {};
  }

  // From the binding system H z >= h the vertex writes each variable as
  // z_j = v_j + sum_k w_k s_k over the integer surpluses s = H z - h, so
  // rounding the row gives sum_k frac(-w_k) s_k >= frac(v_j).
  std::vector<Cut> out;
  const std::vector<double>& z = node.result.solution;
  for (int j = 0; j < n; ++j) {
    double f0 = z[j] - std::floor(z[j]);
    if (f0 < kEps || f0 > 1.0 - kEps) continue;
    std::vector<std::vector<double>> ht(n, std::vector<double>(n));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) ht[r][c] = cone.binding_rows(c, r);
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    auto w = solve_dense_system(std::move(ht), std::move(e));
    if (!w) continue;
    std::vector<double> g(n);
    double gmax = 0.0;
    for (int k = 0; k < n; ++k) {
      double v = -(*w)[k];
      g[k] = v - std::floor(v);
      if (g[k] < 1e-9 || g[k] > 1.0 - 1e-9) g[k] = 0.0;
      gmax = std::max(gmax, g[k]);
    }
    if (gmax <= 0.0) continue;
    Cut cut;
    cut.alpha_x.assign(inst.n1, 0.0);
    cut.alpha_y.assign(inst.n2, 0.0);
    cut.beta = f0;
    for (int k = 0; k < n; ++k) {
      if (g[k] == 0.0) continue;
      cut.beta += g[k] * cone.binding_rhs[k];
      for (int c = 0; c < inst.n1; ++c) cut.alpha_x[c] += g[k] * cone.binding_rows(k, c);
      for (int c = 0; c < inst.n2; ++c)
        cut.alpha_y[c] += g[k] * cone.binding_rows(k, inst.n1 + c);
    }
    cut.scope = CutScope::global_scope();
    cut.origin = CutOrigin::integrality;
    normalize_cut(cut);
    std::vector<double> xhat(z.begin(), z.begin() + inst.n1);
    std::vector<double> yhat(z.begin() + inst.n1, z.end());
    if (cut.beta - cut.value_at(xhat, yhat) < kEps) continue;
    out.push_back(std::move(cut));
  }
  return out;
}

namespace {

struct PoolEntry {
  Cut cut;
  bool set_valid = false;  // derivation holds for the integer-feasible set itself
};

class Driver {
 public:
  Driver(const MiblpInstance& inst, const SolverConfig& cfg) : inst_(inst), cfg_(cfg) {}

  SolveResult run();

 private:
  NodeLp build_lp(const SearchNode& node) const;
  void solve_node_lp(NodeLp& nl, const std::optional<Basis>& warm);
  void process(SearchNode node);
  std::vector<Cut> generate_round(NodeLp& nl, const VertexStructure& vs,
                                  const std::vector<double>& xhat,
                                  const std::vector<double>& yhat,
                                  const std::optional<SecondLevelSolve>& follower,
                                  bool mandatory);
  void append_cut(NodeLp& nl, SearchNode& node, Cut cut);
  void spawn_children(const SearchNode& node, const NodeLp& nl, const BranchDecision& dec);
  void offer_incumbent(Point p);
  const std::optional<std::pair<Point, double>>& ub_lookup(const std::vector<double>& gamma);
  std::vector<double> vertex_gamma(const std::vector<double>& xhat) const;
  std::vector<double> fixed_gamma(const SearchNode& node) const;
  void record_bound_event();
  double open_bound() const;

  const MiblpInstance& inst_;
  SolverConfig cfg_;
  LpProblem base_;
  std::vector<PoolEntry> pool_;
  std::vector<SearchNode> open_;
  std::optional<Point> inc_;
  double inc_value_ = kInf;
  SolveStats stats_;
  Pseudocosts pc_;
  long next_id_ = 0;
  std::map<std::vector<double>, std::optional<std::pair<Point, double>>> ub_cache_;
  bool root_done_ = false;
  long root_idic_added_ = 0;
};

NodeLp Driver::build_lp(const SearchNode& node) const {
  NodeLp nl;
  nl.lp = base_;
  nl.lp.lower = node.lower;
  nl.lp.upper = node.upper;
  for (const PoolEntry& e : pool_) {
    std::vector<double> row = joint_row(e.cut);
    nl.lp.rows.a.insert(nl.lp.rows.a.end(), row.begin(), row.end());
    ++nl.lp.rows.rows;
    nl.lp.rhs.push_back(e.cut.beta);
    nl.extra_row_scope.push_back(e.cut.scope);
  }
  return nl;
}

void Driver::solve_node_lp(NodeLp& nl, const std::optional<Basis>& warm) {
  ScopedTimer t(stats_.time_lp);
  std::optional<Basis> w;
  if (warm &&
      static_cast<int>(warm->status.size()) == nl.lp.num_vars() + nl.lp.num_rows())
    w = warm;
  nl.result = solve_lp(nl.lp, w);
  if (nl.result.status == LpStatus::error)
    throw SearchError("node relaxation failed to solve");
}

void Driver::offer_incumbent(Point p) {
  // Accepted vertices carry simplex-level noise on their integer coordinates.
  // Snap those to the lattice when the snapped point still satisfies both row
  // blocks, so reported incumbents are exact; keep the raw point otherwise.
  Point snapped = p;
  bool moved = false;
  auto snap = [&](std::vector<double>& v, int count) {
    for (int j = 0; j < count; ++j) {
      double r = std::round(v[j]);
      if (v[j] != r && std::abs(v[j] - r) <= kEps) {
        v[j] = r;
        moved = true;
      }
    }
  };
  snap(snapped.x, inst_.r1);
  snap(snapped.y, inst_.r2);
  if (moved) {
    bool ok = within_bounds(snapped.x, inst_.lx, inst_.ux) &&
              within_bounds(snapped.y, inst_.ly, inst_.uy);
    for (double r : block_residuals(inst_.a1, inst_.g1, inst_.b1, snapped.x, snapped.y))
      ok = ok && r >= -kEps;
    for (double r : block_residuals(inst_.a2, inst_.g2, inst_.b2, snapped.x, snapped.y))
      ok = ok && r >= -kEps;
    if (ok) p = std::move(snapped);
  }
  double v = dot(inst_.c, p.x) + dot(inst_.d1, p.y);
  if (v < inc_value_ - 1e-12) {
    inc_ = std::move(p);
    inc_value_ = v;
  }
}

const std::optional<std::pair<Point, double>>& Driver::ub_lookup(
    const std::vector<double>& gamma) {
  auto it = ub_cache_.find(gamma);
  if (it == ub_cache_.end()) {
    std::optional<std::pair<Point, double>> r;
    {
      ScopedTimer t(stats_.time_oracle);
      r = best_ub(inst_, gamma);
    }
    ++stats_.ub_solves;
    it = ub_cache_.emplace(gamma, std::move(r)).first;
    if (it->second) offer_incumbent(it->second->first);
  }
  return it->second;
}

std::vector<double> Driver::vertex_gamma(const std::vector<double>& xhat) const {
  std::vector<double> gamma;
  gamma.reserve(inst_.linking.size());
  for (int i : inst_.linking) gamma.push_back(snap(xhat[i]));
  return gamma;
}

std::vector<double> Driver::fixed_gamma(const SearchNode& node) const {
  std::vector<double> gamma;
  gamma.reserve(inst_.linking.size());
  for (int i : inst_.linking) gamma.push_back(snap(node.lower[i]));
  return gamma;
}

double Driver::open_bound() const {
  double lb = kInf;
  for (const SearchNode& n : open_) lb = std::min(lb, n.bound);
  if (open_.empty()) lb = inc_ ? inc_value_ : kInf;
  return std::min(lb, inc_value_);
}

void Driver::record_bound_event() {
  double lb = open_bound();
  if (lb <= -kInf / 2 || lb >= kInf / 2) return;
  if (stats_.bound_events.empty() || lb > stats_.bound_events.back() + 1e-12)
    stats_.bound_events.push_back(lb);
}

std::vector<Cut> Driver::generate_round(NodeLp& nl, const VertexStructure& vs,
                                        const std::vector<double>& xhat,
                                        const std::vector<double>& yhat,
                                        const std::optional<SecondLevelSolve>& follower,
                                        bool mandatory) {
  std::vector<Cut> out;
  auto witness = [&](CutOrigin f, const Cut& cut, CutResult* geometry) {
    if (!cfg_.cut_observer) return;
    CutEvent ev;
    ev.origin = f;
    ev.cut = cut;
    ev.vertex = xhat;
    ev.vertex.insert(ev.vertex.end(), yhat.begin(), yhat.end());
    ev.incumbent_value = inc_value_;
    if (geometry) {
      ev.lambdas = std::move(geometry->lambdas);
      ev.boundary_points = std::move(geometry->boundary_points);
      ev.bfs = std::move(geometry->bfs);
    }
    cfg_.cut_observer(ev);
  };
  auto record = [&](CutOrigin f, CutResult r) {
    ClassStats& cs = stats_.per_class[f];
    ++cs.cg_calls;
    if (r.cut) {
      double viol = r.cut->beta - r.cut->value_at(xhat, yhat);
      if (viol >= cfg_.eps - 1e-12) {
        ++cs.cuts_added;
        witness(f, *r.cut, &r);
        out.push_back(std::move(*r.cut));
        return;
      }
      ++cs.fail_not_applicable;  // already satisfied here, usually a pool repeat
      return;
    }
    switch (r.failure) {
      case CutFailure::no_certificate:
        ++cs.fail_no_certificate;
        break;
      case CutFailure::cone_contained:
        ++cs.fail_cone_contained;
        break;
      default:
        ++cs.fail_not_applicable;
        break;
    }
  };
  auto not_applicable = [] {
    CutResult r;
    r.failure = CutFailure::not_applicable;
    return r;
  };
  auto no_certificate = [] {
    CutResult r;
    r.failure = CutFailure::no_certificate;
    return r;
  };
  auto enabled = [&](CutOrigin f) {
    if (cfg_.cuts.count(f) == 0) return false;
    if (f == CutOrigin::improving_direction_ic && cfg_.idic_early_shutoff && root_done_ &&
        root_idic_added_ == 0)
      return false;
    return true;
  };
  auto want = [&](CutOrigin f) {
    return enabled(f) &&
           (mandatory || should_generate(f, vs, cfg_.strategy_for(f), vs.depth));
  };
  bool have_cert = follower && follower->feasible && !follower->argmin.empty();

  if (want(CutOrigin::improving_solution_ic)) {
    if (have_cert) {
      ScopedTimer t(stats_.time_cuts);
      record(CutOrigin::improving_solution_ic,
             gen_isic_type1(inst_, nl, follower->argmin));
    } else {
      record(CutOrigin::improving_solution_ic, no_certificate());
    }
  }
  if (want(CutOrigin::improving_solution_ic_relaxed)) {
    ++stats_.improving_searches;
    ScopedTimer t(stats_.time_cuts);
    record(CutOrigin::improving_solution_ic_relaxed, gen_isic_type2(inst_, nl));
  }
  if (want(CutOrigin::improving_direction_ic)) {
    ++stats_.direction_searches;
    ScopedTimer t(stats_.time_cuts);
    record(CutOrigin::improving_direction_ic, gen_idic(inst_, nl));
  }
  if (want(CutOrigin::hypercube_ic)) {
    if (vs.linking_integral && !inst_.linking.empty()) {
      std::vector<double> gamma = vertex_gamma(xhat);
      ub_lookup(gamma);  // the slice bound must be on record before excluding it
      ScopedTimer t(stats_.time_cuts);
      record(CutOrigin::hypercube_ic, gen_hypercube_ic(inst_, nl, UbEvidence{gamma}));
    } else {
      record(CutOrigin::hypercube_ic, not_applicable());
    }
  }
  if (want(CutOrigin::benders_binary) || want(CutOrigin::benders_interdiction)) {
    if (have_cert) {
      double m;
      {
        ScopedTimer t(stats_.time_oracle);
        m = compute_big_m(inst_, follower->argmin);
      }
      ++stats_.big_m_solves;
      ScopedTimer t(stats_.time_cuts);
      if (want(CutOrigin::benders_binary))
        record(CutOrigin::benders_binary,
               gen_benders_binary(inst_, nl, follower->argmin, m));
      if (want(CutOrigin::benders_interdiction))
        record(CutOrigin::benders_interdiction,
               gen_benders_interdiction(inst_, nl, follower->argmin, m));
    } else {
      if (want(CutOrigin::benders_binary))
        record(CutOrigin::benders_binary, no_certificate());
      if (want(CutOrigin::benders_interdiction))
        record(CutOrigin::benders_interdiction, no_certificate());
    }
  }
  if (want(CutOrigin::generalized_no_good)) {
    if (vs.linking_integral && !inst_.linking.empty()) {
      std::vector<double> gamma = vertex_gamma(xhat);
      ub_lookup(gamma);
      ScopedTimer t(stats_.time_cuts);
      record(CutOrigin::generalized_no_good,
             gen_generalized_no_good(inst_, gamma, UbEvidence{gamma}));
    } else {
      record(CutOrigin::generalized_no_good, not_applicable());
    }
  }
  if (want(CutOrigin::integer_no_good)) {
    ScopedTimer t(stats_.time_cuts);
    record(CutOrigin::integer_no_good, gen_integer_no_good(inst_, nl));
  }
  if (cfg_.milp_integrality_cuts && !vs.in_s) {
    std::vector<bool> flags;
    flags.reserve(pool_.size());
    for (const PoolEntry& e : pool_) flags.push_back(e.set_valid);
    std::vector<Cut> cg;
    {
      ScopedTimer t(stats_.time_cuts);
      cg = simple_integrality_cuts(inst_, nl, flags);
    }
    ClassStats& cs = stats_.per_class[CutOrigin::integrality];
    if (cg.empty()) {
      ++cs.cg_calls;
      ++cs.fail_no_certificate;
    } else {
      for (Cut& c : cg) {
        ++cs.cg_calls;
        ++cs.cuts_added;
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

void Driver::append_cut(NodeLp& nl, SearchNode& node, Cut cut) {
  std::vector<double> row = joint_row(cut);
  nl.lp.rows.a.insert(nl.lp.rows.a.end(), row.begin(), row.end());
  ++nl.lp.rows.rows;
  nl.lp.rhs.push_back(cut.beta);
  nl.extra_row_scope.push_back(cut.scope);
  node.cuts.push_back(static_cast<int>(pool_.size()));
  bool set_valid = cut.origin == CutOrigin::integrality;
  pool_.push_back({std::move(cut), set_valid});
}

void Driver::spawn_children(const SearchNode& node, const NodeLp& nl,
                            const BranchDecision& dec) {
  double v = dec.value;
  double lo = node.lower[dec.var];
  double hi = node.upper[dec.var];
  double down_hi, up_lo, down_dist, up_dist;
  if (dec.integer_split) {
    double iv = std::round(v);
    if (iv >= hi - 1e-9) {
      down_hi = iv - 1.0;
      up_lo = iv;
    } else {
      down_hi = iv;
      up_lo = iv + 1.0;
    }
    down_dist = up_dist = 1.0;
  } else {
    down_hi = std::floor(v);
    up_lo = std::ceil(v);
    down_dist = v - down_hi;
    up_dist = up_lo - v;
  }
  auto make_child = [&](bool up) {
    SearchNode child;
    child.lower = node.lower;
    child.upper = node.upper;
    if (up)
      child.lower[dec.var] = std::max(lo, up_lo);
    else
      child.upper[dec.var] = std::min(hi, down_hi);
    child.depth = node.depth + 1;
    child.bound = node.bound;
    child.warm = nl.result.basis;
    child.branch_var = dec.var;
    child.branch_up = up;
    child.branch_dist = up ? up_dist : down_dist;
    child.parent_bound = node.bound;
    child.id = next_id_++;
    open_.push_back(std::move(child));
  };
  // The down child gets the larger id so the tie-break plunges into it first.
  if (up_lo <= hi + 1e-9) make_child(true);
  if (down_hi >= lo - 1e-9) make_child(false);
}

void Driver::process(SearchNode node) {
  if (node.bound >= inc_value_ - kCutoffTol) return;
  NodeLp nl = build_lp(node);
  solve_node_lp(nl, node.warm);
  ++stats_.nodes;
  if (nl.result.status != LpStatus::optimal) return;

  if (node.branch_var >= 0)
    pc_.record(node.branch_var, node.branch_up,
               (nl.result.objective - node.parent_bound) /
                   std::max(node.branch_dist, 1e-6));
  double bound = std::max(node.bound, nl.result.objective);
  node.bound = bound;
  bool at_root = node.depth == 0;
  if (at_root) {
    stats_.root_bound_before_cuts = bound;
    stats_.root_bound_after_cuts = bound;
  }

  // A node with every linking variable pinned is settled by the slice
  // optimum: the follower problem is constant there, so the best feasible
  // point over the slice closes the whole subtree.
  {
    VertexStructure vs0 =
        classify_vertex(inst_, node.lower, node.upper, nl.result.solution, node.depth);
    if (vs0.linking_fixed) {
      ub_lookup(fixed_gamma(node));
      return;
    }
  }

  std::vector<double> history{bound};
  int rounds = 0;
  const int mandatory_cap = 1000;  // each pass kills one lattice point, this is a backstop
  for (;;) {
    if (bound >= inc_value_ - kCutoffTol) return;
    VertexStructure vs =
        classify_vertex(inst_, node.lower, node.upper, nl.result.solution, node.depth);
    std::vector<double> xhat(nl.result.solution.begin(),
                             nl.result.solution.begin() + inst_.n1);
    std::vector<double> yhat(nl.result.solution.begin() + inst_.n1,
                             nl.result.solution.end());

    std::optional<SecondLevelSolve> follower;
    if (vs.in_s) {
      FeasibilityVerdict verdict;
      {
        ScopedTimer t(stats_.time_oracle);
        verdict = check_feasibility(inst_, Point{xhat, yhat});
      }
      ++stats_.second_level_solves;
      if (verdict.bilevel_feasible()) {
        offer_incumbent(Point{xhat, yhat});
        return;
      }
      if (verdict.phi_value) {
        SecondLevelSolve s;
        s.feasible = true;
        s.value = *verdict.phi_value;
        if (verdict.certificate) s.argmin = verdict.certificate->ystar;
        follower = s;
        // The follower's preferred response at this x is bilevel feasible
        // whenever it clears the first-level rows; grab it as an incumbent.
        std::optional<std::vector<double>> resp;
        {
          ScopedTimer t(stats_.time_oracle);
          resp = reaction(inst_, xhat);
        }
        ++stats_.second_level_solves;
        if (resp) offer_incumbent(Point{xhat, *resp});
        if (bound >= inc_value_ - kCutoffTol) return;
      }
    }

    // An integral vertex outside the feasible set must not survive: cuts are
    // attempted regardless of strategy gates or tailoff, and if nothing
    // separates it the node is branched on a linking variable instead.
    bool mandatory = vs.in_s;
    if (!mandatory) {
      if (rounds >= cfg_.max_cut_rounds) break;
      if (!tailoff_check(history, cfg_.tailoff_threshold)) break;
    } else if (rounds >= mandatory_cap) {
      break;
    }

    OraclePolicy pol = oracle_policy(vs, cfg_);
    if (!follower && pol.solve_second_level) {
      SecondLevelSolve s;
      {
        ScopedTimer t(stats_.time_oracle);
        s = solve_second_level(inst_, xhat);
      }
      ++stats_.second_level_solves;
      follower = std::move(s);
    }

    std::vector<Cut> emitted = generate_round(nl, vs, xhat, yhat, follower, mandatory);
    if (emitted.empty()) break;
    for (Cut& cut : emitted) append_cut(nl, node, std::move(cut));
    solve_node_lp(nl, std::nullopt);
    if (nl.result.status != LpStatus::optimal) return;  // the cuts emptied the node
    bound = std::max(bound, nl.result.objective);
    node.bound = bound;
    history.push_back(bound);
    if (at_root) stats_.root_bound_after_cuts = bound;
    ++rounds;
  }

  if (bound >= inc_value_ - kCutoffTol) return;
  auto dec = select_branching(inst_, node, nl.result, cfg_.branching, pc_);
  if (!dec && cfg_.branching != BranchRule::fractional)
    dec = select_branching(inst_, node, nl.result, BranchRule::fractional, pc_);
  if (!dec) {
    // Integral vertex nothing separated: force a linking split around it.
    for (int i : inst_.linking) {
      if (node.upper[i] - node.lower[i] <= 1e-9) continue;
      BranchDecision fb;
      fb.var = i;
      fb.value = snap(nl.result.solution[i]);
      fb.integer_split = true;
      dec = fb;
      break;
    }
  }
  if (!dec) {
    ub_lookup(fixed_gamma(node));  // every linking variable pinned after all
    return;
  }
  spawn_children(node, nl, *dec);
}

SolveResult Driver::run() {
  auto t_start = std::chrono::steady_clock::now();
  AssumptionReport rep = check_assumptions(inst_);
  if (!rep.all())
    throw SearchError("instance fails the solver assumptions");
  base_ = joint_relaxation(inst_);

  SearchNode root;
  root.lower = base_.lower;
  root.upper = base_.upper;
  root.id = next_id_++;
  open_.push_back(std::move(root));

  bool hit_limit = false;
  while (!open_.empty()) {
    if (stats_.nodes >= cfg_.max_nodes) {
      hit_limit = true;
      break;
    }
    if (cfg_.time_limit_seconds > 0.0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count() >
            cfg_.time_limit_seconds) {
      hit_limit = true;
      break;
    }
    // Best bound first; on ties the newest node, which plunges depth first.
    int pick = -1;
    for (int i = 0; i < static_cast<int>(open_.size()); ++i) {
      if (open_[i].bound >= inc_value_ - kCutoffTol) continue;
      if (pick < 0 || open_[i].bound < open_[pick].bound - 1e-12 ||
          (open_[i].bound < open_[pick].bound + 1e-12 && open_[i].id > open_[pick].id))
        pick = i;
    }
    if (pick < 0) {
      open_.clear();
      break;
    }
    SearchNode node = std::move(open_[pick]);
    open_.erase(open_.begin() + pick);
    bool was_root = node.depth == 0;
    process(std::move(node));
    if (was_root) {
      root_done_ = true;
      auto it = stats_.per_class.find(CutOrigin::improving_direction_ic);
      root_idic_added_ = it == stats_.per_class.end() ? 0 : it->second.cuts_added;
    }
    record_bound_event();
  }

  if (inc_) {
    FeasibilityVerdict verdict = check_feasibility(inst_, *inc_);
    ++stats_.second_level_solves;
    if (!verdict.bilevel_feasible())
      throw SearchError("incumbent failed re-verification");
    double scale = std::max(1.0, std::abs(inc_value_));
    stats_.root_gap_before =
        std::max(0.0, (inc_value_ - stats_.root_bound_before_cuts) / scale);
    stats_.root_gap_after =
        std::max(0.0, (inc_value_ - stats_.root_bound_after_cuts) / scale);
  }
  stats_.time_total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  SolveResult res;
  if (hit_limit) {
    res.status = SolveStatus::limit;
    res.lower_bound = open_bound();
    if (inc_) {
      res.incumbent = inc_;
      res.incumbent_value = inc_value_;
      res.gap = (inc_value_ - res.lower_bound) / std::max(1.0, std::abs(inc_value_));
    } else {
      res.gap = kInf;
    }
  } else if (inc_) {
    res.status = SolveStatus::optimal;
    res.incumbent = inc_;
    res.incumbent_value = inc_value_;
    res.lower_bound = inc_value_;
    res.gap = 0.0;
  } else {
    res.status = SolveStatus::infeasible;
    res.lower_bound = kInf;
    res.gap = 0.0;
  }
  res.stats = std::move(stats_);
  return res;
}

}  // namespace

SolveResult solve(const MiblpInstance& inst, const SolverConfig& config) {
  Driver d(inst, config);
  return d.run();
}

}  // namespace miblp
