#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "mvem/builtins.hpp"
#include "mvem/config.hpp"
#include "mvem/pipeline.hpp"

using namespace mvem;

namespace {

const char* kLinear = R"({
  "name": "linear",
  "mesh": {"type": "box", "min": [0, 0, 0], "max": [1, 1, 1], "cells": 2},
  "element": "RT1",
  "manufactured": {"pressure": [[1, 0, 0, 0], [2, 1, 0, 0], [-1, 0, 1, 0]]},
  "boundary": {"default": {"pressure": "exact"}},
  "exact_tolerance": 1e-10
})";

}  // namespace

TEST(Config, EmptyNetworkLinearSolutionIsExact) {
  LoadedConfig lc = parse_config(kLinear);
  EXPECT_EQ(lc.scenario.name, "linear");
  EXPECT_TRUE(lc.refinable);
  EXPECT_EQ(lc.base_cells, 2);
  RunResult r = run_scenario(lc.scenario, lc.run);
  EXPECT_TRUE(r.pass()) << (r.failures.empty() ? "" : r.failures[0]);
}

TEST(Config, UnknownKeysAndBadValuesAreRejected) {
  EXPECT_THROW(parse_config(R"({"mesh": {"type": "box"}, "bogus": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mesh": {"type": "sphere"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mesh": {"type": "box"}, "element": "BDM7"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mesh": {"type": "box"}, "elements": {"2": "BDM1"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mesh": {"type": "box"}, "boundary": {"default": {"pressure": "exact"}}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"mesh": {"type": "box"}, "fractures": [{"vertices": [[0,0,0]]}]})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mesh": {"type": "box"}, "matrix": {"eta": -1}})"), ConfigError);
  EXPECT_THROW(parse_config("{not json"), ConfigError);
}

TEST(Config, ElementsPerDimension) {
  LoadedConfig lc = parse_config(R"({"mesh": {"type": "box"}, "element": "BDM2", "elements": {"1D": "RT0"}})");
  EXPECT_EQ(lc.scenario.spaces[3].name(), "BDM2");
  EXPECT_EQ(lc.scenario.spaces[2].name(), "RT1");
  EXPECT_EQ(lc.scenario.spaces[1].name(), "RT0");
}

TEST(Config, FractureDataAndOverridesReachDomains) {
  LoadedConfig lc = parse_config(R"({
    "mesh": {"type": "grid", "x": [-1, 0, 1], "y": [-1, 0, 1], "z": [-1, 0, 1]},
    "fractures": [
      {"vertices": [[0,-1,-1],[0,1,-1],[0,1,1],[0,-1,1]], "transmissivity": 5, "eta": 2},
      {"vertices": [[-1,0,-1],[1,0,-1],[1,0,1],[-1,0,1]], "eta": "inf"}
    ],
    "traces": {"transmissivity": [[1,0,0],[0,1,0],[0,0,1]], "eta": 4},
    "domains": {"F2": {"inverse_eta": 0.25}},
    "boundary": {"dirichlet": [{"axis": 0, "value": -1, "pressure": 1}, {"axis": 0, "value": 1, "pressure": 0}]}
  })");
  MixedMesh m = build_scenario_mesh(lc.scenario);
  ASSERT_EQ(m.fracture_domain.size(), 2u);
  DomainData f1 = lc.scenario.domain_data(m, m.fracture_domain[0]);
  DomainData f2 = lc.scenario.domain_data(m, m.fracture_domain[1]);
  DomainData t1 = lc.scenario.domain_data(m, m.trace_domain[0]);
  EXPECT_DOUBLE_EQ(f1.inverse_eta, 0.5);
  EXPECT_DOUBLE_EQ(f1.transmissivity(Vec3::Zero())(1, 1), 5.0);
  EXPECT_DOUBLE_EQ(f2.inverse_eta, 0.25);
  EXPECT_DOUBLE_EQ(t1.inverse_eta, 0.25);
  RunResult r = run_scenario(lc.scenario, lc.run);
  EXPECT_TRUE(r.pass());
  EXPECT_GT(r.flux.total_inflow, 0.0);
}

TEST(Config, BuiltinDelegation) {
  LoadedConfig lc = parse_config(R"({"builtin": "problem2_finite_eta", "continuity": true})");
  EXPECT_EQ(lc.builtin, "problem2_finite_eta");
  EXPECT_EQ(lc.scenario.name, "problem2_continuity");
}

TEST(Config, FileMeshResolvesRelativeToConfig) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "mvem_config_test";
  fs::create_directories(dir);
  {
    std::ofstream m(dir / "cube.mesh");
    write_mesh(m, box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), {2, 2, 2}));
    std::ofstream c(dir / "run.json");
    c << R"({"mesh": {"type": "file", "path": "cube.mesh"}, "manufactured": {"pressure": 3},
             "boundary": {"default": {"pressure": "exact"}}})";
  }
  LoadedConfig lc = load_config((dir / "run.json").string());
  EXPECT_FALSE(lc.refinable);
  EXPECT_EQ(lc.scenario.background.cells.size(), 8u);
  fs::remove_all(dir);
}

TEST(Config, RefinementMultipliesCells) {
  Scenario sc = config_at_resolution(kLinear, ".", 4);
  EXPECT_EQ(sc.background.cells.size(), 64u);
}

TEST(Pipeline, ListBuiltinsIsStable) {
  auto a = list_builtins();
  auto b = list_builtins();
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[0], "problem1_quartic");
  EXPECT_EQ(a[1], "problem2_finite_eta");
  EXPECT_EQ(a[2], "convergence_sweep");
  EXPECT_EQ(a[3], "patch_tests");
}

TEST(Pipeline, EveryBuiltinRuns) {
  for (const auto& n : list_builtins()) {
    if (n == "patch_tests") {
      auto cases = patch_cases({ElementSpace::rt(3, 0)}, {0});
      for (auto& c : cases) EXPECT_TRUE(run_scenario(c.scenario).pass()) << c.label;
      continue;
    }
    BuiltinOptions o;
    if (n == "problem1_quartic") o.element = "RT1";  // keep the smoke test quick
    RunResult r = run_scenario(builtin_scenario(n, o));
    EXPECT_LT(r.flux.max_element_mismatch, 1e-9) << n;
  }
  EXPECT_THROW(builtin_scenario("nope"), ConfigError);
}

TEST(Pipeline, OutputsAreWrittenWithManifest) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "mvem_pipeline_out";
  fs::remove_all(dir);
  RunOptions opt;
  opt.output_dir = dir.string();
  opt.write_matrix = true;
  opt.dump_local = true;
  RunResult r = run_scenario(problem2_finite_eta(), opt);
  for (const char* f : {"flux.txt", "solution.vtu", "matrix.coo", "local_matrices.txt", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_EQ(r.outputs.size(), 5u);
  fs::remove_all(dir);
}

TEST(Pipeline, ConvergenceStudyNeedsThreeLevels) {
  auto make = [](int l) { return convergence_problem(ElementSpace::rt(3, 0), 1 << l); };
  auto h = [](int l) { return 1.0 / (1 << l); };
  EXPECT_THROW(convergence_study(make, h, 2), ConfigError);
}

TEST(Pipeline, PolynomialStudyIsFlaggedExact) {
  LoadedConfig lc = parse_config(kLinear);
  std::string text = kLinear;
  RateTable t = convergence_study([&](int l) { return config_at_resolution(text, ".", 1 << l); },
                                  [](int l) { return 1.0 / (1 << l); }, 3);
  EXPECT_TRUE(t.exact);
}

TEST(Pipeline, LeastSquaresSlope) {
  EXPECT_NEAR(least_squares_slope({0, 1, 2, 3}, {1, 3, 5, 7}), 2.0, 1e-14);
  EXPECT_NEAR(least_squares_slope({0, 1, 2}, {0, -1, -2}), -1.0, 1e-14);
}

TEST(Pipeline, ConformityViolationsFailTheRun) {
  // a fracture crossing the box boundary cannot be cut conformingly
  Scenario sc = problem1_quartic();
  sc.fractures.push_back(FracturePolygon{{Vec3(0.5, -2, -2), Vec3(0.5, 2, -2), Vec3(0.5, 2, 2), Vec3(0.5, -2, 2)}});
  bool failed = false;
  try {
    failed = !run_scenario(sc).pass();
  } catch (const Error&) {
    failed = true;
  }
  EXPECT_TRUE(failed);
}
