#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "miblp/bench.hpp"
#include "miblp/bruteforce.hpp"
#include "miblp/generate.hpp"
#include "miblp/io.hpp"
#include "miblp/search.hpp"
#include "test_instances.hpp"

using namespace miblp;
namespace fs = std::filesystem;

namespace {

// Scratch directory for files a test writes; removed when the test ends.
struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("miblp_frontend_" + std::to_string(++counter) + "_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name, const std::string& content) {
    fs::path p = path / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
};

std::string fixture(const std::string& name) {
  return std::string(MIBLP_SOURCE_DIR) + "/instances/" + name;
}

std::vector<double> mat_row(const Mat& m, int i) {
  std::vector<double> r(m.cols);
  for (int j = 0; j < m.cols; ++j) r[j] = m(i, j);
  return r;
}

// A small model with two follower variables used by the parser tests:
//   min -x - y;  follower min y2 over one row.
const char* kSmallMps = R"(NAME SMALL
ROWS
 N obj
 G r0
 L r1
COLUMNS
    MARKER 'MARKER' 'INTORG'
    x obj -1.0 r0 1.0
    x r1 1.0
    y obj -1.0 r0 2.0
    y r1 1.0
    MARKER 'MARKER' 'INTEND'
RHS
    rhs r0 2.0 r1 8.0
BOUNDS
 UP bnd x 5.0
 UP bnd y 5.0
ENDATA
)";

const char* kSmallAux = "N 1\nM 1\nLC 1\nLR 1\nLO 1.0\nOS 1\n";

BenchRecord rec(const std::string& inst, const std::string& cfg, const std::string& status,
                double secs, long nodes, double gap) {
  BenchRecord r;
  r.instance = inst;
  r.config = cfg;
  r.status = status;
  r.cpu_seconds = secs;
  r.nodes = nodes;
  r.value = status == "optimal" ? -1.0 : kInf;
  r.bound = -1.0;
  r.gap = gap;
  return r;
}

// Three instances, two configs: config a solves everything (2s, 10s, 3s),
// config b solves the first and third twice as slowly and times out on the
// second with half the gap left.
std::vector<BenchRecord> profile_fixture() {
  return {rec("i1", "a", "optimal", 2.0, 20, 0.0),  rec("i1", "b", "optimal", 4.0, 40, 0.0),
          rec("i2", "a", "optimal", 10.0, 100, 0.0), rec("i2", "b", "limit", 11.0, 60, 0.5),
          rec("i3", "a", "optimal", 3.0, 30, 0.0),  rec("i3", "b", "optimal", 6.0, 90, 0.0)};
}

void check_points(const std::vector<ProfilePoint>& got,
                  const std::vector<ProfilePoint>& expected) {
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CAPTURE(i);
    CHECK(got[i].config == expected[i].config);
    CHECK(got[i].measure == expected[i].measure);
    CHECK(got[i].x == doctest::Approx(expected[i].x).epsilon(1e-12));
    CHECK(got[i].fraction == doctest::Approx(expected[i].fraction).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("the shipped instance files reproduce the two-variable example") {
  std::vector<std::string> warnings;
  MiblpInstance from_mps = parse_mps_aux(fixture("mb.mps"), fixture("mb.aux"), false, &warnings);
  CHECK(warnings.empty());
  CHECK(from_mps == testing::mb());

  MiblpInstance from_json = parse_json(fixture("mb.json"));
  CHECK(from_json == testing::mb());

  // The dispatcher picks the format from the arguments.
  CHECK(read_instance(fixture("mb.json")) == testing::mb());
  CHECK(read_instance(fixture("mb.mps"), fixture("mb.aux")) == testing::mb());
  CHECK_THROWS_AS(read_instance(fixture("mb.mps")), IoError);
}

TEST_CASE("mps parsing handles sections, markers, and malformed input") {
  TempDir tmp;
  std::string aux = tmp.file("s.aux", kSmallAux);

  SUBCASE("a well formed file lands in canonical shape") {
    MiblpInstance inst = parse_mps_aux(tmp.file("s.mps", kSmallMps), aux);
    CHECK(inst.n1 == 1);
    CHECK(inst.n2 == 1);
    CHECK(inst.r1 == 1);
    CHECK(inst.r2 == 1);
    CHECK(inst.m1() == 1);
    CHECK(inst.m2() == 1);
    CHECK(inst.c == std::vector<double>{-1.0});
    CHECK(inst.d1 == std::vector<double>{-1.0});
    CHECK(inst.d2 == std::vector<double>{1.0});
    // r0 was a G row, r1 an L row flipped to >= during canonicalization.
    CHECK(mat_row(inst.a1, 0) == std::vector<double>{1.0});
    CHECK(mat_row(inst.g1, 0) == std::vector<double>{2.0});
    CHECK(inst.b1 == std::vector<double>{2.0});
    CHECK(mat_row(inst.a2, 0) == std::vector<double>{-1.0});
    CHECK(mat_row(inst.g2, 0) == std::vector<double>{-1.0});
    CHECK(inst.b2 == std::vector<double>{-8.0});
  }

  SUBCASE("ranged rows become a bounded pair") {
    std::string mps(kSmallMps);
    mps.insert(mps.find("BOUNDS"), "RANGES\n    rng r0 3.0\n");
    MiblpInstance inst = parse_mps_aux(tmp.file("r.mps", mps), aux);
    // r0 with range 3 reads 2 <= x + 2y <= 5: the extra face lands in the
    // same block as the original row.
    CHECK(inst.m1() == 2);
    CHECK(inst.b1 == std::vector<double>{2.0, -5.0});
    CHECK(mat_row(inst.a1, 1) == std::vector<double>{-1.0});
    CHECK(mat_row(inst.g1, 1) == std::vector<double>{-2.0});
  }

  SUBCASE("equality rows with a range become a bounded pair too") {
    std::string mps(kSmallMps);
    mps.replace(mps.find(" G r0"), 5, " E r0");
    mps.insert(mps.find("BOUNDS"), "RANGES\n    rng r0 3.0\n");
    MiblpInstance inst = parse_mps_aux(tmp.file("e.mps", mps), aux);
    CHECK(inst.m1() == 2);
    CHECK(inst.b1 == std::vector<double>{2.0, -5.0});
  }

  SUBCASE("missing bounds are rejected") {
    std::string mps(kSmallMps);
    mps.replace(mps.find(" UP bnd x 5.0\n"), 14, "");
    CHECK_THROWS_WITH_AS(parse_mps_aux(tmp.file("m.mps", mps), aux),
                         doctest::Contains("no finite upper bound"), IoError);
  }

  SUBCASE("MI and FR bounds leave a side open and are rejected") {
    std::string mps(kSmallMps);
    mps.replace(mps.find(" UP bnd x 5.0"), 13, " FR bnd x");
    CHECK_THROWS_AS(parse_mps_aux(tmp.file("fr.mps", mps), aux), IoError);
    std::string mps2(kSmallMps);
    mps2.insert(mps2.find("ENDATA"), " MI bnd y\n");
    CHECK_THROWS_WITH_AS(parse_mps_aux(tmp.file("mi.mps", mps2), aux),
                         doctest::Contains("no finite lower bound"), IoError);
  }

  SUBCASE("FX and LI/UI bounds work") {
    std::string mps(kSmallMps);
    mps.replace(mps.find(" UP bnd x 5.0"), 13, " FX bnd x 2.0");
    mps.replace(mps.find(" UP bnd y 5.0"), 13, " UI bnd y 4.0");
    MiblpInstance inst = parse_mps_aux(tmp.file("fx.mps", mps), aux);
    CHECK(inst.lx == std::vector<double>{2.0});
    CHECK(inst.ux == std::vector<double>{2.0});
    CHECK(inst.uy == std::vector<double>{4.0});
  }

  SUBCASE("structural errors are reported with the offending line") {
    std::string no_end(kSmallMps);
    no_end.replace(no_end.find("ENDATA"), 6, "");
    CHECK_THROWS_WITH_AS(parse_mps_aux(tmp.file("a.mps", no_end), aux),
                         doctest::Contains("missing ENDATA"), IoError);

    std::string second_n(kSmallMps);
    second_n.insert(second_n.find(" G r0"), " N obj2\n");
    CHECK_THROWS_WITH_AS(parse_mps_aux(tmp.file("b.mps", second_n), aux),
                         doctest::Contains("only one objective row"), IoError);

    std::string obj_rhs(kSmallMps);
    obj_rhs.insert(obj_rhs.find("BOUNDS"), "    rhs obj 3.0\n");
    CHECK_THROWS_WITH_AS(parse_mps_aux(tmp.file("c.mps", obj_rhs), aux),
                         doctest::Contains("objective-row RHS"), IoError);

    std::string bad_num(kSmallMps);
    bad_num.replace(bad_num.find("2.0 r1 8.0"), 3, "2.x");
    CHECK_THROWS_WITH_AS(parse_mps_aux(tmp.file("d.mps", bad_num), aux),
                         doctest::Contains("expected a number"), IoError);

    std::string bad_row(kSmallMps);
    bad_row.replace(bad_row.find("rhs r0"), 6, "rhs rz");
    CHECK_THROWS_WITH_AS(parse_mps_aux(tmp.file("e2.mps", bad_row), aux),
                         doctest::Contains("unknown row 'rz'"), IoError);
  }

  SUBCASE("repeated coefficient entries accumulate") {
    std::string mps(kSmallMps);
    mps.insert(mps.find("RHS"), "    y r0 1.5\n");
    MiblpInstance inst = parse_mps_aux(tmp.file("acc.mps", mps), aux);
    CHECK(mat_row(inst.g1, 0) == std::vector<double>{3.5});
  }
}

TEST_CASE("aux files bind the second level and validate their indices") {
  TempDir tmp;
  std::string mps = tmp.file("s.mps", kSmallMps);

  SUBCASE("OS -1 flips the follower objective") {
    MiblpInstance inst =
        parse_mps_aux(mps, tmp.file("a.aux", "N 1\nM 1\nLC 1\nLR 1\nLO 1.0\nOS -1\n"));
    CHECK(inst.d2 == std::vector<double>{-1.0});
  }

  SUBCASE("a missing OS line warns and assumes minimization") {
    std::vector<std::string> warnings;
    MiblpInstance inst =
        parse_mps_aux(mps, tmp.file("a.aux", "N 1\nM 1\nLC 1\nLR 1\nLO 1.0\n"), false, &warnings);
    CHECK(inst.d2 == std::vector<double>{1.0});
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("no OS line") != std::string::npos);
  }

  SUBCASE("one-based indexing is a flag away") {
    MiblpInstance inst =
        parse_mps_aux(mps, tmp.file("a.aux", "N 1\nM 1\nLC 2\nLR 2\nLO 1.0\nOS 1\n"), true);
    CHECK(inst == parse_mps_aux(mps, tmp.file("b.aux", kSmallAux)));
  }

  SUBCASE("bad aux content is rejected") {
    CHECK_THROWS_WITH_AS(parse_mps_aux(mps, tmp.file("a.aux", "N 1\nM 1\nLC 7\nLR 1\nLO 1.0\n")),
                         doctest::Contains("LC index 7 out of range"), IoError);
    CHECK_THROWS_WITH_AS(
        parse_mps_aux(mps, tmp.file("b.aux", "N 2\nM 1\nLC 0\nLC 0\nLR 1\nLO 1.0\nLO 1.0\n")),
        doctest::Contains("duplicate LC index"), IoError);
    CHECK_THROWS_WITH_AS(parse_mps_aux(mps, tmp.file("c.aux", "N 2\nM 1\nLC 1\nLR 1\nLO 1.0\n")),
                         doctest::Contains("N says 2"), IoError);
    CHECK_THROWS_WITH_AS(parse_mps_aux(mps, tmp.file("d.aux", "N 1\nM 1\nLC 1\nLR 1\n")),
                         doctest::Contains("LO lines"), IoError);
    CHECK_THROWS_WITH_AS(parse_mps_aux(mps, tmp.file("e.aux", "M 1\nLC 1\nLR 1\nLO 1.0\n")),
                         doctest::Contains("missing N line"), IoError);
    CHECK_THROWS_WITH_AS(parse_mps_aux(mps, tmp.file("f.aux", "N 1\nM 1\nLC 1\nLR 1\nLO 1.0\nOS 2\n")),
                         doctest::Contains("OS must be 1 or -1"), IoError);
  }
}

TEST_CASE("json serialization round trips every instance field") {
  TempDir tmp;
  for (const MiblpInstance& inst :
       {testing::mb(), testing::knapsack_interdiction_toy(), testing::benders_toy(),
        testing::mb_with_free_leader_var()}) {
    std::string path = (tmp.path / "inst.json").string();
    write_json(inst, path);
    CHECK(parse_json(path) == inst);
  }
  // Interdiction data survives explicitly, not by reconstruction.
  std::string path = (tmp.path / "kn.json").string();
  write_json(testing::knapsack_interdiction_toy(), path);
  MiblpInstance back = parse_json(path);
  REQUIRE(back.interdiction.has_value());
  CHECK(back.interdiction->u == std::vector<double>{1.0, 1.0});
}

TEST_CASE("json schema violations name the offending field") {
  TempDir tmp;
  auto parse = [&](const std::string& body) { return parse_json(tmp.file("x.json", body)); };

  CHECK_THROWS_WITH_AS(parse("{"), doctest::Contains("x.json"), IoError);
  CHECK_THROWS_WITH_AS(parse("[1,2]"), doctest::Contains("must be an object"), IoError);
  CHECK_THROWS_WITH_AS(parse(R"({"n1": 1})"), doctest::Contains("missing field 'n2'"), IoError);

  // Start from a valid document and break one field at a time.
  std::string good_path = (tmp.path / "good.json").string();
  write_json(testing::mb(), good_path);
  std::ifstream in(good_path);
  std::string good((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::string bad = good;
  bad.replace(bad.find("\"n1\": 1"), 7, "\"n1\": true");
  CHECK_THROWS_WITH_AS(parse(bad), doctest::Contains("'n1' must be an integer"), IoError);

  bad = good;
  bad.replace(bad.find("\"r1\": 1"), 7, "\"r1\": 3");
  CHECK_THROWS_WITH_AS(parse(bad), doctest::Contains("integer counts out of range"), IoError);

  bad = good;
  bad.replace(bad.find("\"b2\": [\n    -6.0,"), 17, "\"b2\": [\n    true,");
  CHECK_THROWS_WITH_AS(parse(bad), doctest::Contains("b2[0]"), IoError);
}

TEST_CASE("generators are deterministic and always emit solvable instances") {
  for (GenFamily family : {GenFamily::den_like, GenFamily::den2_like, GenFamily::zhang_like,
                           GenFamily::knapsack_interdiction}) {
    CAPTURE(family_name(family));
    for (unsigned seed = 0; seed < 15; ++seed) {
      CAPTURE(seed);
      GenParams gp;
      gp.seed = seed;
      MiblpInstance a = generate(family, gp);
      MiblpInstance b = generate(family, gp);
      CHECK(a == b);
      CHECK(check_assumptions(a).all());
    }
    GenParams gp;
    gp.seed = 3;
    MiblpInstance a = generate(family, gp);
    gp.seed = 4;
    CHECK_FALSE(generate(family, gp) == a);
  }
}

TEST_CASE("each family has its advertised shape") {
  GenParams gp;
  gp.seed = 11;

  MiblpInstance den = generate(GenFamily::den_like, gp);
  CHECK(den.m1() == 0);
  CHECK(den.r1 == den.n1);
  CHECK(den.r2 == den.n2);
  for (int i = 0; i < den.m2(); ++i) {
    CHECK(den.b2[i] < 0);
    for (int j = 0; j < den.n1; ++j) CHECK(den.a2(i, j) < 0);
    for (int j = 0; j < den.n2; ++j) CHECK(den.g2(i, j) < 0);
  }

  MiblpInstance den2 = generate(GenFamily::den2_like, gp);
  CHECK(den2.m1() == 0);
  bool mixed = false;
  for (std::size_t k = 0; k < den2.a2.a.size(); ++k) mixed = mixed || den2.a2.a[k] > 0;
  CHECK(mixed);

  MiblpInstance zh = generate(GenFamily::zhang_like, gp);
  CHECK(zh.ux == std::vector<double>(zh.n1, 1.0));
  double dd = dot(zh.d1, zh.d2);
  double cosine = dd / std::sqrt(dot(zh.d1, zh.d1) * dot(zh.d2, zh.d2));
  CHECK(cosine > 0.6);
  CHECK(cosine < 0.8);

  gp.n1 = 4;
  MiblpInstance kn = generate(GenFamily::knapsack_interdiction, gp);
  CHECK(kn.n1 == 4);
  CHECK(kn.n2 == 4);
  CHECK(kn.m1() == 1);
  CHECK(kn.m2() == 5);
  REQUIRE(kn.interdiction.has_value());
  CHECK(kn.interdiction->u == std::vector<double>(4, 1.0));
  for (int j = 0; j < kn.n1; ++j) CHECK(kn.d1[j] == -kn.d2[j]);
  // The last n1 follower rows couple y_j <= 1 - x_j.
  for (int j = 0; j < kn.n1; ++j) {
    CHECK(kn.a2(1 + j, j) == -1.0);
    CHECK(kn.g2(1 + j, j) == -1.0);
    CHECK(kn.b2[1 + j] == -1.0);
  }

  gp = GenParams{};
  gp.n2 = 1;
  CHECK_THROWS_AS(generate(GenFamily::zhang_like, gp), ModelError);
}

TEST_CASE("one generated instance is frozen against drift") {
  GenParams gp;
  gp.seed = 7;
  MiblpInstance g = generate(GenFamily::den_like, gp);
  CHECK(g.c == std::vector<double>{2.0, 3.0, 3.0});
  CHECK(g.d1 == std::vector<double>{-2.0, -9.0, 8.0});
  CHECK(g.d2 == std::vector<double>{10.0, -2.0, 0.0});
  CHECK(mat_row(g.a2, 0) == std::vector<double>{-2.0, -9.0, -2.0});
  CHECK(mat_row(g.a2, 1) == std::vector<double>{-7.0, -3.0, -4.0});
  CHECK(mat_row(g.a2, 2) == std::vector<double>{-2.0, -9.0, -9.0});
  CHECK(mat_row(g.a2, 3) == std::vector<double>{-2.0, -1.0, -7.0});
  CHECK(mat_row(g.g2, 0) == std::vector<double>{-9.0, -8.0, -3.0});
  CHECK(mat_row(g.g2, 1) == std::vector<double>{-9.0, -7.0, -1.0});
  CHECK(mat_row(g.g2, 2) == std::vector<double>{-4.0, -8.0, -1.0});
  CHECK(mat_row(g.g2, 3) == std::vector<double>{-4.0, -6.0, -7.0});
  CHECK(g.b2 == std::vector<double>{-31.0, -96.0, -79.0, -17.0});
  CHECK(g.ux == std::vector<double>(3, 10.0));
}

TEST_CASE("bench records survive the csv round trip") {
  TempDir tmp;
  std::vector<BenchRecord> records = profile_fixture();
  records[0].value = -22.0;
  records[0].root_gap_before = 0.9090909090909091;
  records[1].cpu_seconds = 1e-4;
  std::string path = (tmp.path / "records.csv").string();
  write_records_csv(records, path);
  CHECK(read_records_csv(path) == records);

  CHECK_THROWS_AS(read_records_csv((tmp.path / "absent.csv").string()), BenchError);
  std::string junk = tmp.file("junk.csv", "instance,config\nmb,a\n");
  CHECK_THROWS_WITH_AS(read_records_csv(junk), doctest::Contains("unexpected header"), BenchError);

  BenchRecord bad = records[0];
  bad.instance = "has,comma";
  CHECK_THROWS_AS(write_records_csv({bad}, path), BenchError);
}

TEST_CASE("name tables round trip") {
  for (CutOrigin f : {CutOrigin::improving_solution_ic, CutOrigin::improving_solution_ic_relaxed,
                      CutOrigin::improving_direction_ic, CutOrigin::hypercube_ic,
                      CutOrigin::integer_no_good, CutOrigin::benders_binary,
                      CutOrigin::benders_interdiction, CutOrigin::generalized_no_good}) {
    auto back = cut_family_from_name(cut_family_name(f));
    REQUIRE(back.has_value());
    CHECK(*back == f);
  }
  CHECK(cut_family_from_name("improving_direction_ic") == CutOrigin::improving_direction_ic);
  CHECK_FALSE(cut_family_from_name("gomory").has_value());

  for (const char* n : {"always", "root", "xyint", "lint", "yint", "ylint"})
    CHECK(strategy_from_name(n).has_value());
  CHECK(strategy_from_name("xy_int") == IcStrategy::xy_int);
  CHECK_FALSE(strategy_from_name("sometimes").has_value());

  CHECK(branch_from_name("frac") == BranchRule::fractional);
  CHECK(branch_from_name("link") == BranchRule::linking);
  CHECK(branch_from_name("second") == BranchRule::second_level);
  CHECK_FALSE(branch_from_name("best").has_value());

  for (Measure m : {Measure::time, Measure::nodes, Measure::gap, Measure::rootgap})
    CHECK(measure_from_name(measure_name(m)) == m);
  CHECK(profile_kind_from_name("performance").has_value());
  CHECK_FALSE(profile_kind_from_name("speedup").has_value());
}

TEST_CASE("config specs override the defaults piecewise") {
  MiblpInstance inst = testing::mb();

  ConfigSpec plain;
  CHECK(build_config(inst, plain).cuts == default_config(inst).cuts);

  ConfigSpec none;
  none.cuts = "none";
  CHECK(build_config(inst, none).cuts.empty());

  ConfigSpec listed;
  listed.cuts = "idic, nogood";
  SolverConfig cfg = build_config(inst, listed);
  CHECK(cfg.cuts == std::set<CutOrigin>{CutOrigin::improving_direction_ic,
                                        CutOrigin::integer_no_good});

  ConfigSpec plus;
  plus.cuts = "default,hypercube";
  SolverConfig cfg2 = build_config(inst, plus);
  for (CutOrigin f : default_config(inst).cuts) CHECK(cfg2.cuts.count(f) == 1);
  CHECK(cfg2.cuts.count(CutOrigin::hypercube_ic) == 1);

  ConfigSpec strat;
  strat.cuts = "idic";
  strat.ic_strategy = "xyint";
  strat.branch = "link";
  strat.tailoff = 0.2;
  strat.max_nodes = 77;
  strat.time_limit = 9.0;
  SolverConfig cfg3 = build_config(inst, strat);
  CHECK(cfg3.ic_strategy.at(CutOrigin::improving_direction_ic) == IcStrategy::xy_int);
  CHECK(cfg3.branching == BranchRule::linking);
  CHECK(cfg3.tailoff_threshold == 0.2);
  CHECK(cfg3.max_nodes == 77);
  CHECK(cfg3.time_limit_seconds == 9.0);

  ConfigSpec bad;
  bad.cuts = "idic,gomory";
  CHECK_THROWS_WITH_AS(build_config(inst, bad), doctest::Contains("unknown cut family"),
                       BenchError);
  ConfigSpec bad2;
  bad2.ic_strategy = "sometimes";
  CHECK_THROWS_AS(build_config(inst, bad2), BenchError);
  ConfigSpec bad3;
  bad3.branch = "best";
  CHECK_THROWS_AS(build_config(inst, bad3), BenchError);
}

TEST_CASE("profile curves match the hand computed fixture") {
  std::vector<BenchRecord> records = profile_fixture();

  SUBCASE("performance ratios against the virtual best") {
    check_points(profiles(records, ProfileKind::performance),
                 {{"a", "time", 1.0, 1.0}, {"b", "time", 2.0, 2.0 / 3.0}});
  }

  SUBCASE("baseline ratios against a named config") {
    // Config b never solves i2, so i2 yields no ratio for anyone but still
    // counts toward the denominator.
    check_points(profiles(records, ProfileKind::baseline, {Measure::time}, "b"),
                 {{"a", "time", 0.5, 2.0 / 3.0}, {"b", "time", 1.0, 2.0 / 3.0}});
    check_points(profiles(records, ProfileKind::baseline, {Measure::time}, "a"),
                 {{"a", "time", 1.0, 1.0}, {"b", "time", 2.0, 2.0 / 3.0}});
    CHECK_THROWS_WITH_AS(profiles(records, ProfileKind::baseline, {}, "zzz"),
                         doctest::Contains("baseline configuration"), BenchError);
  }

  SUBCASE("cumulative curves plot raw values") {
    check_points(profiles(records, ProfileKind::cumulative, {Measure::time, Measure::gap}),
                 {{"a", "time", 2.0, 1.0 / 3.0},
                  {"a", "time", 3.0, 2.0 / 3.0},
                  {"a", "time", 10.0, 1.0},
                  {"b", "time", 4.0, 1.0 / 3.0},
                  {"b", "time", 6.0, 2.0 / 3.0},
                  {"a", "gap", 0.0, 1.0},
                  {"b", "gap", 0.0, 2.0 / 3.0},
                  {"b", "gap", 0.5, 1.0}});
  }

  SUBCASE("default measures depend on the profile kind") {
    CHECK(profiles(records, ProfileKind::performance)[0].measure == "time");
    CHECK(profiles(records, ProfileKind::baseline, {}, "a")[0].measure == "nodes");
    auto cum = profiles(records, ProfileKind::cumulative);
    CHECK(cum.front().measure == "time");
    CHECK(cum.back().measure == "gap");
  }

  SUBCASE("instances every config solves fast are filtered out") {
    for (BenchRecord& r : records) {
      r.status = "optimal";
      r.cpu_seconds *= 1e-3;
      r.gap = 0.0;
    }
    CHECK(profiles(records, ProfileKind::performance).empty());
    CHECK_FALSE(profiles(records, ProfileKind::performance, {}, "", false).empty());
  }

  SUBCASE("instances nobody solves drop from ratio profiles but not cumulative gap") {
    for (BenchRecord& r : records)
      if (r.instance == "i2") {
        r.status = "limit";
        r.gap = 0.25;
      }
    auto perf = profiles(records, ProfileKind::performance);
    // Only i1 and i3 remain: a wins both, b is twice as slow on both.
    check_points(perf, {{"a", "time", 1.0, 1.0}, {"b", "time", 2.0, 1.0}});
    auto cum = profiles(records, ProfileKind::cumulative, {Measure::gap});
    bool has_quarter = false;
    for (const ProfilePoint& p : cum) has_quarter = has_quarter || p.x == 0.25;
    CHECK(has_quarter);
  }

  SUBCASE("every curve is a valid cdf") {
    for (ProfileKind kind :
         {ProfileKind::performance, ProfileKind::baseline, ProfileKind::cumulative}) {
      auto pts = profiles(records, kind, {Measure::time, Measure::nodes, Measure::rootgap}, "a");
      std::map<std::pair<std::string, std::string>, std::pair<double, double>> last;
      for (const ProfilePoint& p : pts) {
        auto key = std::make_pair(p.config, p.measure);
        auto it = last.find(key);
        if (it != last.end()) {
          CHECK(p.x > it->second.first);
          CHECK(p.fraction > it->second.second);
        }
        CHECK(p.fraction <= 1.0 + 1e-12);
        last[key] = {p.x, p.fraction};
      }
    }
  }
}

TEST_CASE("right-hand side diagnosis compares a cut against the enumerated ideal") {
  Cut cut;
  cut.alpha_x = {2.0};
  cut.alpha_y = {-3.0};
  cut.beta = -7.0;
  cut.scope = CutScope::global_scope();
  cut.origin = CutOrigin::integer_no_good;

  RhsDiagnosis d = diagnose_rhs_strength(testing::mb(), cut);
  CHECK(d.orig_rhs == -7.0);
  // min 2x - 3y over the bilevel feasible set is attained at (1, 2).
  CHECK(d.best_rhs == doctest::Approx(-4.0));
  CHECK(d.obj_before == doctest::Approx(-42.0));
  CHECK(d.obj_after_orig == doctest::Approx(-286.0 / 7.0));
  CHECK(d.obj_after_best == doctest::Approx(-262.0 / 7.0));
  CHECK(d.obj_after_best >= d.obj_after_orig);

  SUBCASE("excluding a slice can move the ideal right-hand side") {
    Cut ex = cut;
    ex.scope = CutScope::excluding({1.0});
    ex.origin = CutOrigin::improving_solution_ic;
    RhsDiagnosis de = diagnose_rhs_strength(testing::mb(), ex);
    // Without (1, 2) the minimum moves to (2, 2).
    CHECK(de.best_rhs == doctest::Approx(-2.0));
  }

  SUBCASE("an empty scope set reports an unbounded ideal") {
    MiblpInstance inst = testing::mb();
    inst.a1 = Mat(1, 1);
    inst.a1(0, 0) = -1.0;
    inst.g1 = Mat(1, 1);
    inst.b1 = {1.0};
    RhsDiagnosis di = diagnose_rhs_strength(inst, cut);
    CHECK(di.best_rhs >= kInf / 2);
  }

  SUBCASE("dimension mismatches are rejected") {
    Cut wrong = cut;
    wrong.alpha_x = {2.0, 1.0};
    CHECK_THROWS_AS(diagnose_rhs_strength(testing::mb(), wrong), BenchError);
  }
}

TEST_CASE("a manifest runs every instance under every config") {
  TempDir tmp;
  std::string manifest = tmp.file("m.json", R"({
    "time_limit": 30,
    "instances": [
      {"id": "mb", "path": ")" + fixture("mb.json") + R"("},
      {"id": "mb-mps", "path": ")" + fixture("mb.mps") +
                                            R"(", "aux": ")" + fixture("mb.aux") + R"("},
      {"id": "gen-den", "family": "den", "n1": 2, "n2": 2, "m2": 3, "ub": 5, "seed": 2}
    ],
    "configs": [
      {"name": "default"},
      {"name": "plain", "cuts": "none"},
      {"name": "idic", "cuts": ["idic"], "ic_strategy": "always", "branch": "frac"}
    ]
  })");

  Manifest m = parse_manifest(manifest);
  CHECK(m.time_limit == 30.0);
  REQUIRE(m.instances.size() == 3);
  CHECK(m.instances[0].second == testing::mb());
  CHECK(m.instances[1].second == testing::mb());
  REQUIRE(m.configs.size() == 3);
  CHECK(m.configs[2].cuts == "idic");

  std::vector<BenchRecord> records = run_bench(m, 2);
  REQUIRE(records.size() == 9);
  EnumerationResult truth = enumerate(m.instances[2].second);
  for (std::size_t k = 0; k < records.size(); ++k) {
    CAPTURE(k);
    const BenchRecord& r = records[k];
    CHECK(r.instance == m.instances[k / 3].first);
    CHECK(r.config == m.configs[k % 3].name);
    CHECK(r.status == "optimal");
    double want = r.instance == "gen-den" ? truth.optimum->second : -22.0;
    CHECK(r.value == doctest::Approx(want));
    CHECK(r.cpu_seconds >= 0.0);
  }

  // Records written by a bench run read back bit for bit.
  std::string csv = (tmp.path / "r.csv").string();
  write_records_csv(records, csv);
  CHECK(read_records_csv(csv) == records);

  // A failing instance yields an error record instead of aborting the run.
  Manifest broken = m;
  broken.configs.resize(1);
  broken.configs[0].cuts = "idic,gomory";
  std::vector<BenchRecord> err = run_bench(broken, 1);
  REQUIRE(err.size() == 3);
  for (const BenchRecord& r : err) CHECK(r.status == "error");
}

TEST_CASE("manifest validation catches shape errors") {
  TempDir tmp;
  auto bad = [&](const std::string& body) { return tmp.file("m.json", body); };

  CHECK_THROWS_WITH_AS(parse_manifest(bad("{}")), doctest::Contains("instances"), BenchError);
  CHECK_THROWS_WITH_AS(
      parse_manifest(bad(R"({"instances": [{"id": "a", "family": "nope"}],
                            "configs": [{"name": "c"}]})")),
      doctest::Contains("unknown family"), BenchError);
  CHECK_THROWS_WITH_AS(
      parse_manifest(bad(R"({"instances": [{"id": "a"}], "configs": [{"name": "c"}]})")),
      doctest::Contains("either 'path' or 'family'"), BenchError);
  CHECK_THROWS_WITH_AS(
      parse_manifest(bad(R"({"instances": [{"id": "a", "family": "den"},
                                           {"id": "a", "family": "den"}],
                            "configs": [{"name": "c"}]})")),
      doctest::Contains("duplicate id"), BenchError);
  CHECK_THROWS_WITH_AS(
      parse_manifest(bad(R"({"instances": [{"id": "a", "family": "den"}],
                            "configs": [{"name": "c"}, {"name": "c"}]})")),
      doctest::Contains("duplicate config name"), BenchError);
  CHECK_THROWS_WITH_AS(
      parse_manifest(bad(R"({"instances": [{"id": "a", "family": "den"}], "configs": []})")),
      doctest::Contains("configs"), BenchError);

  // Relative instance paths resolve against the manifest location.
  std::ofstream((tmp.path / "local.json").native()) << std::ifstream(fixture("mb.json")).rdbuf();
  Manifest m = parse_manifest(tmp.file("rel.json", R"({
    "instances": [{"id": "mb", "path": "local.json"}],
    "configs": [{"name": "c"}]
  })"));
  CHECK(m.instances[0].second == testing::mb());
}

TEST_CASE("profile csv output is plain and loadable") {
  TempDir tmp;
  std::vector<ProfilePoint> pts = profiles(profile_fixture(), ProfileKind::performance);
  std::string path = (tmp.path / "prof.csv").string();
  write_profile_csv(pts, path);
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "config,measure,x,fraction");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == static_cast<int>(pts.size()));
}
