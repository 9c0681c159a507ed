#include <doctest.h>

#include <map>
#include <set>

#include "bezout_oracle.hpp"
#include "gen_systems.hpp"
#include "mregen/regen.hpp"

using namespace mregen;

namespace {

const char* kCubicVars = "hom_variable_group x_0, x_1, x_2, x_3;";
const char* kCubicEqs =
    "function f1, f2, f3;\n"
    "f1 = x_1^2 - x_0*x_2; f2 = x_2^2 - x_1*x_3; f3 = x_0*x_3 - x_1*x_2;";

PolySystem twisted_cubic() {
  return parse_equations(kCubicEqs, parse_variables(kCubicVars));
}

PolySystem p3p1_curve() {
  auto groups = parse_variables(
      "hom_variable_group x_0, x_1, x_2, x_3;\nhom_variable_group y_0, y_1;");
  return parse_equations(
      "function f1, f2, f3;\n"
      "f1 = x_0*y_0 + x_1*y_1;\nf2 = x_1*y_0 + x_2*y_1;\nf3 = x_2*y_0 + x_3*y_1;",
      groups);
}

// the first `count` polynomials as their own system
PolySystem prefix_system(const PolySystem& sys, int count) {
  PolySystem out;
  out.groups = sys.groups;
  out.names.assign(sys.names.begin(), sys.names.begin() + count);
  out.polys.assign(sys.polys.begin(), sys.polys.begin() + count);
  out.degrees.assign(sys.degrees.begin(), sys.degrees.begin() + count);
  return out;
}

bool tables_equal(const MultidegreeTable& a, const MultidegreeTable& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    if (a.rows[i].count != b.rows[i].count || a.rows[i].e != b.rows[i].e) return false;
  return true;
}

long points_at_prefix(const RunResult& res, int prefix) {
  long n = 0;
  for (const auto& node : res.nodes)
    if (node.prefix_count == prefix) n += static_cast<long>(node.points.size());
  return n;
}

}  // namespace

TEST_CASE("membership_filter splits the quartic curve against f3") {
  PolySystem cubic = twisted_cubic();
  RegenConfig cfg;
  cfg.master_seed = 101;
  cfg.track.final_tol = 1e-12;

  // witness the reducible quartic curve V(f1, f2) = twisted cubic + a line
  RunResult quartic = run(prefix_system(cubic, 2), cfg);
  auto leaves = quartic.leaves(2);
  REQUIRE(leaves.size() == 1);
  REQUIRE(leaves[0]->points.size() == 4);

  auto [inside, outside] = membership_filter(cubic.polys[2], *leaves[0], cfg.membership_tol);
  CHECK(inside.size() == 3);
  CHECK(outside.size() == 1);
  CHECK(inside.size() + outside.size() == leaves[0]->points.size());

  // the outside point is the line {x_1 = x_2 = 0}
  CHECK(outside[0].blocks[0].segment(1, 2).cwiseAbs().maxCoeff() < 1e-8);

  // an already-imposed equation keeps every (generic) point
  RunResult quadric = run(prefix_system(cubic, 1), cfg);
  auto qleaves = quadric.leaves(1);
  REQUIRE(qleaves.size() == 1);
  auto [in_f1, out_f1] = membership_filter(cubic.polys[0], *qleaves[0], cfg.membership_tol);
  CHECK(in_f1.size() == qleaves[0]->points.size());
  CHECK(out_f1.empty());

  // a generic polynomial keeps none
  Rng rng(55);
  auto generic = testgen::dense_multihomogeneous(cubic.groups, {2}, rng);
  auto [in_gen, out_gen] = membership_filter(generic, *leaves[0], cfg.membership_tol);
  CHECK(in_gen.empty());
  CHECK(out_gen.size() == 4);
}

TEST_CASE("dedup merges numerically identical points") {
  auto groups = parse_variables("hom_variable_group x_0, x_1;");
  auto mk = [&](Complex a, Complex b) {
    MultiprojectivePoint p;
    Vector v(2);
    v << a, b;
    p.blocks.push_back(v);
    return canonical_normalize(p, groups);
  };

  auto a = mk(1, 1);
  auto a_eps = mk(1, Complex{1, 1e-12});
  CHECK(dedup({a, a_eps}, 1e-8).size() == 1);

  // antipodal representatives of one projective point collapse after
  // canonical normalization
  auto pos = mk(1, 1);
  auto neg = mk(-1, -1);
  CHECK(dedup({pos, neg}, 1e-8).size() == 1);

  auto c = mk(1, Complex{0, 1});
  CHECK(dedup({a, c}, 1e-8).size() == 2);
}

TEST_CASE("torus_filter drops points with vanishing designated coordinates") {
  auto groups = parse_variables("hom_variable_group x_0, x_1;");
  MultiprojectivePoint boundary;
  Vector v(2);
  v << Complex{0, 0}, Complex{1, 0};
  boundary.blocks.push_back(v);

  CHECK(torus_filter({boundary}, {0}, 1e-8).empty());
  CHECK(torus_filter({boundary}, {}, 1e-8).size() == 1);
}

TEST_CASE("regenerate_step walks the twisted cubic tower") {
  PolySystem sys = twisted_cubic();
  RegenConfig cfg;
  cfg.track.final_tol = 1e-12;
  Rng rng(77);

  WitnessNode root = root_witness(sys.groups, rng, cfg.track);

  // quadratic surface: 2 witness points at e = (2)
  auto depth0 = regenerate_step(root, sys.polys[0], sys, cfg, rng);
  REQUIRE(depth0.size() == 1);
  CHECK(depth0[0].slice.type(sys.groups) == SliceType{2});
  CHECK(depth0[0].points.size() == 2);
  CHECK(depth0[0].prefix_count == 1);

  // reducible quartic curve: 4 witness points at e = (1)
  auto depth1 = regenerate_step(depth0[0], sys.polys[1], sys, cfg, rng);
  REQUIRE(depth1.size() == 1);
  CHECK(depth1[0].slice.type(sys.groups) == SliceType{1});
  CHECK(depth1[0].points.size() == 4);
}

TEST_CASE("regenerate_step branches per variable group on P3 x P1") {
  PolySystem sys = p3p1_curve();
  RegenConfig cfg;
  cfg.track.final_tol = 1e-12;
  Rng rng(78);

  WitnessNode root = root_witness(sys.groups, rng, cfg.track);
  auto children = regenerate_step(root, sys.polys[0], sys, cfg, rng);
  REQUIRE(children.size() == 2);
  CHECK(children[0].slice.type(sys.groups) == SliceType{2, 1});
  CHECK(children[0].points.size() == 1);
  CHECK(children[1].slice.type(sys.groups) == SliceType{3, 0});
  CHECK(children[1].points.size() == 1);
}

TEST_CASE("run reproduces the twisted cubic multidegree") {
  PolySystem sys = twisted_cubic();
  RegenConfig cfg;
  cfg.master_seed = 2024;
  cfg.torus_groups = {0};
  cfg.track.final_tol = 1e-12;

  RunResult res = run(sys, cfg);
  REQUIRE(res.table.rows.size() == 1);
  CHECK(res.table.rows[0].count == 3);
  CHECK(res.table.rows[0].e == SliceType{1});

  // witness cardinalities along the unique lineage
  CHECK(points_at_prefix(res, 0) == 1);
  CHECK(points_at_prefix(res, 1) == 2);
  CHECK(points_at_prefix(res, 2) == 4);
  CHECK(points_at_prefix(res, 3) == 3);

  // the last intersection is decided by evaluation, not continuation
  CHECK(res.stats[2].membership_inside == 3);
  CHECK(res.stats[2].membership_outside == 1);
  CHECK(res.stats[2].torus_dropped == 1);
  CHECK(res.stats[2].stage_a_paths == 0);
  CHECK(res.stats[2].stage_b_paths == 0);
  CHECK_FALSE(res.partial);

  // leaf witness points satisfy the whole system
  for (const auto* leaf : res.leaves(3)) {
    for (const auto& p : leaf->points) {
      Vector vals = evaluate(sys, p);
      CHECK(vals.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("run without the torus option tracks and discards the line branch") {
  PolySystem sys = twisted_cubic();
  RegenConfig cfg;
  cfg.master_seed = 2025;
  cfg.track.final_tol = 1e-12;

  RunResult res = run(sys, cfg);
  REQUIRE(res.table.rows.size() == 1);
  CHECK(res.table.rows[0].count == 3);
  // the line point spawns 2 stage-A and 2 stage-B paths whose endpoints are
  // singular (they sit on the cubic), so the run flags partial results
  CHECK(res.stats[2].stage_a_paths == 2);
  CHECK(res.stats[2].stage_b_paths == 2);
  CHECK(res.stats[2].singular_endpoints == 2);
  CHECK(res.partial);
}

TEST_CASE("run reproduces the P3 x P1 multidegree") {
  PolySystem sys = p3p1_curve();
  RegenConfig cfg;
  cfg.master_seed = 31337;
  cfg.track.final_tol = 1e-12;

  RunResult res = run(sys, cfg);
  REQUIRE(res.table.rows.size() == 2);
  CHECK(res.table.rows[0].count == 3);
  CHECK(res.table.rows[0].e == SliceType{1, 0});
  CHECK(res.table.rows[1].count == 1);
  CHECK(res.table.rows[1].e == SliceType{0, 1});
  CHECK_FALSE(res.partial);

  // node dims per depth match the published tree multiset
  using Shape = std::multiset<std::pair<SliceType, std::size_t>>;
  std::map<int, Shape> shape;
  for (const auto& node : res.nodes)
    if (node.prefix_count >= 1)
      shape[node.prefix_count].insert({node.slice.type(sys.groups), node.points.size()});
  CHECK(shape[1] == Shape{{{2, 1}, 1}, {{3, 0}, 1}});
  CHECK(shape[2] == Shape{{{1, 1}, 1}, {{2, 0}, 1}, {{2, 0}, 1}});
  CHECK(shape[3] == Shape{{{0, 1}, 1}, {{1, 0}, 1}, {{1, 0}, 1}, {{1, 0}, 1}});
}

TEST_CASE("tables are invariant under strategy and seed") {
  PolySystem sys = p3p1_curve();
  RegenConfig cfg;
  cfg.master_seed = 7;
  cfg.track.final_tol = 1e-12;
  RunResult dfs = run(sys, cfg);

  cfg.strategy = Strategy::BFS;
  RunResult bfs = run(sys, cfg);
  CHECK(tables_equal(dfs.table, bfs.table));

  cfg.strategy = Strategy::DFS;
  cfg.master_seed = 8;
  RunResult reseeded = run(sys, cfg);
  CHECK(tables_equal(dfs.table, reseeded.table));
}

TEST_CASE("worker count does not change the result") {
  PolySystem sys = p3p1_curve();
  RegenConfig cfg;
  cfg.master_seed = 99;
  cfg.track.final_tol = 1e-12;
  RunResult serial = run(sys, cfg);
  cfg.max_processes = 4;
  RunResult parallel = run(sys, cfg);
  CHECK(tables_equal(serial.table, parallel.table));
  REQUIRE(serial.nodes.size() == parallel.nodes.size());
  for (std::size_t i = 0; i < serial.nodes.size(); ++i) {
    REQUIRE(serial.nodes[i].points.size() == parallel.nodes[i].points.size());
    for (std::size_t p = 0; p < serial.nodes[i].points.size(); ++p)
      CHECK((flatten(serial.nodes[i].points[p]) - flatten(parallel.nodes[i].points[p]))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
  }
}

TEST_CASE("membership passes square the prefix by recombination") {
  // twisted cubic plus a generic quadric: the prefix (f1,f2,f3) cuts a
  // curve of codimension 2, so imposing g4 tracks with recombined rows
  auto groups = parse_variables(kCubicVars);
  PolySystem sys = twisted_cubic();
  Rng coeffs(404);
  sys.polys.push_back(testgen::dense_multihomogeneous(groups, {2}, coeffs));
  sys.names.push_back("g4");
  sys.degrees.push_back({2});

  RegenConfig cfg;
  cfg.master_seed = 11;
  cfg.torus_groups = {0};
  cfg.track.final_tol = 1e-12;

  RunResult res = run(sys, cfg);
  REQUIRE(res.table.rows.size() == 1);
  CHECK(res.table.rows[0].count == 6);  // deg(cubic) * deg(quadric)
  CHECK(res.table.rows[0].e == SliceType{0});
  for (const auto* leaf : res.leaves(4))
    for (const auto& p : leaf->points)
      CHECK(evaluate(sys, p).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generic complete intersections match the combinatorial oracle") {
  Rng rng(12345);
  auto groups = parse_variables("hom_variable_group x_0, x_1, x_2;\nhom_variable_group y_0, y_1;");
  std::vector<int> dims{2, 1};

  for (int trial = 0; trial < 3; ++trial) {
    std::vector<std::vector<int>> degrees;
    const int s = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < s; ++i) {
      std::vector<int> row{static_cast<int>(rng.below(3)), static_cast<int>(rng.below(2))};
      if (row[0] + row[1] == 0) row[0] = 1;
      degrees.push_back(row);
    }
    PolySystem sys = testgen::dense_system(groups, degrees, rng);
    RegenConfig cfg;
    cfg.master_seed = 1000 + trial;
    RunResult res = run(sys, cfg);
    CHECK(oracle::tables_match(res.table, oracle::expected_rows(degrees, dims)));

    // Bezout bound at node level
    for (const auto& node : res.nodes) {
      if (node.prefix_count >= s || node.meta.empty()) continue;
      long bound = 0;
      SliceType e = node.slice.type(groups);
      for (int j = 0; j < groups.group_count(); ++j)
        if (e[j] >= 1) bound += degrees[node.prefix_count][j];
      bound *= static_cast<long>(node.points.size());
      std::set<std::uint64_t> ids;
      for (const auto& pm : node.meta) ids.insert(pm.point_id);
      long children = 0;
      for (const auto& other : res.nodes)
        if (other.prefix_count == node.prefix_count + 1)
          for (const auto& pm : other.meta)
            if (ids.count(pm.parent_id)) ++children;
      CHECK(children <= bound);
    }
  }
}

TEST_CASE("run validates its inputs") {
  RegenConfig cfg;
  auto affine = parse_variables("variable_group x, y;");
  auto sys = parse_equations("function f1;\nf1 = x*y - 1;", affine);
  CHECK_THROWS_AS(run(sys, cfg), std::invalid_argument);

  PolySystem cubic = twisted_cubic();
  cfg.degrees = {{3}, {2}, {2}};
  CHECK_THROWS_AS(run(cubic, cfg), std::invalid_argument);

  cfg.degrees.clear();
  cfg.torus_groups = {5};
  CHECK_THROWS_AS(run(cubic, cfg), std::invalid_argument);
}
