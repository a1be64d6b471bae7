#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "isoflow.hpp"

using namespace isoflow;
namespace fs = std::filesystem;

namespace {

const std::string root = ISOFLOW_SOURCE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string small_text() { return slurp(root + "/tests/data/small-run.cfg"); }

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

std::string csv_of(const Scenario& sc) {
  std::ostringstream o;
  const RunResult r = run(sc);
  for (const auto& m : r.members) write_csv(o, r, m);
  return o.str();
}

}  // namespace

TEST(Scenario, ParsesAndRoundTrips) {
  const Scenario sc = parse_scenario_text(small_text());
  EXPECT_EQ(sc.name, "small-run");
  EXPECT_EQ(sc.kernel.family, "uniform-ball");
  EXPECT_EQ(sc.medium.exponent, 2.0);
  EXPECT_EQ(sc.solver.snapshot_every, 5);
  EXPECT_TRUE(sc.outputs.weighted_mean);
  const Scenario again = parse_scenario_text(emit_scenario(sc));
  EXPECT_EQ(again, sc);
  EXPECT_EQ(config_hash(again), config_hash(sc));
  EXPECT_EQ(config_hash_hex(sc).size(), 16u);
}

TEST(Scenario, EveryShippedScenarioRoundTripsAndValidates) {
  for (const auto& e : fs::directory_iterator(root + "/scenarios")) {
    const Scenario sc = parse_scenario(e.path().string());
    EXPECT_EQ(parse_scenario_text(emit_scenario(sc)), sc) << e.path();
    EXPECT_NO_THROW(build_setup(sc)) << e.path();
  }
}

TEST(Scenario, RegistryMatchesShippedFiles) {
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(root + "/scenarios")) {
    ++files;
    const Scenario sc = parse_scenario(e.path().string());
    ASSERT_TRUE(find_registered(sc.name)) << sc.name;
    EXPECT_EQ(registered_scenario(sc.name), sc);
  }
  EXPECT_EQ(registry().size(), files);
}

TEST(Scenario, DuplicateKeyNamesLine) {
  try {
    parse_scenario(root + "/tests/data/duplicate-key.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 6);
    EXPECT_NE(std::string(e.what()).find("sigma"), std::string::npos);
  }
}

TEST(Scenario, RejectsUnknownKeysSectionsAndMissingSections) {
  EXPECT_THROW(parse_scenario_text(replace(small_text(), "radius = 1", "radius = 1\nradios = 2")), ConfigError);
  EXPECT_THROW(parse_scenario_text(replace(small_text(), "[outputs]", "[extras]")), ConfigError);
  EXPECT_THROW(parse_scenario_text(replace(small_text(), "[grid]\n", "")), ConfigError);
  EXPECT_THROW(parse_scenario_text(replace(small_text(), "dt = 0.1", "dt 0.1")), ConfigError);
  EXPECT_THROW(parse_scenario_text(replace(small_text(), "dt = 0.1", "dt = fast")), ConfigError);
}

TEST(Scenario, SemanticValidation) {
  auto setup_error = [](const std::string& text) {
    try {
      build_setup(parse_scenario_text(text));
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(setup_error(replace(small_text(), "exponent = 2", "exponent = 1")).find("E_ρ undefined"), std::string::npos);
  EXPECT_NE(setup_error(replace(small_text(), "points = 101", "points = 100")).find("grid"), std::string::npos);
  EXPECT_NE(setup_error(replace(small_text(), "scheme = exponential", "scheme = euler")).find("stability_dt"),
            std::string::npos);
  EXPECT_NE(setup_error(replace(small_text(), "scheme = exponential", "scheme = rk4")).find("solver"), std::string::npos);
  EXPECT_NE(setup_error(replace(small_text(), "radius = 1", "radius = 50")).find("kernel"), std::string::npos);
  const std::string custom = replace(replace(small_text(), "family = power-decay\namplitude = 1\nexponent = 2",
                                             "family = custom\nradii = 0 1\nvalues = 1 0.5\ntail = unknown"),
                                     "weighted_mean = true", "weighted_mean = false");
  EXPECT_NE(setup_error(custom).find("unknown"), std::string::npos);
}

TEST(Scenario, WithParameter) {
  const Scenario sc = parse_scenario_text(small_text());
  EXPECT_EQ(with_parameter(sc, "dt", "0.05").solver.dt, 0.05);
  EXPECT_EQ(with_parameter(sc, "grid.points", "201").grid.points, 201);
  EXPECT_THROW(with_parameter(sc, "grid.nope", "1"), ConfigError);
}

TEST(Run, DeterministicCsv) {
  const Scenario sc = parse_scenario_text(small_text());
  const std::string a = csv_of(sc), b = csv_of(sc);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find(csv_columns()), std::string::npos);
  EXPECT_NE(a.find("classification=integrable"), std::string::npos);
  EXPECT_NE(a.find("hash=" + config_hash_hex(sc)), std::string::npos);
}

TEST(Run, MassConstantAndConstantDataSteady) {
  Scenario sc = parse_scenario_text(small_text());
  const RunResult r = run(sc);
  const auto& d = r.members[0].trajectory.diagnostics;
  ASSERT_EQ(d.size(), 5u);
  for (const auto& rec : d) EXPECT_NEAR(rec.mass, d[0].mass, 1e-12 * d[0].mass);

  sc.initial.family = "constant";
  sc.initial.value = 2.0;
  const RunResult c = run(sc);
  for (const auto& rec : c.members[0].trajectory.diagnostics) {
    EXPECT_EQ(rec.mass, c.members[0].trajectory.diagnostics[0].mass);
    EXPECT_EQ(rec.lyapunov_F, 0.0);
    EXPECT_EQ(rec.sup_u, 2.0);
    EXPECT_EQ(rec.inf_u, 2.0);
    EXPECT_NEAR(rec.dist_L1rho, 0.0, 1e-12);
  }
}

TEST(Run, ApproximationMembers) {
  Scenario sc = parse_scenario_text(small_text());
  sc.initial.family = "quadratic";
  sc.outputs.weighted_mean = false;
  sc.solver.approx_n = {2, 4};
  const RunResult r = run(sc);
  ASSERT_EQ(r.members.size(), 2u);
  EXPECT_EQ(r.members[1].n, 4);
  EXPECT_EQ(r.members[1].alpha, 1.0 / 16.0);
  EXPECT_EQ(member_suffix(r, r.members[0]), "_n2");
  EXPECT_GE(r.members[1].trajectory.final_field().at_origin(), r.members[0].trajectory.final_field().at_origin());
}

TEST(Snapshot, RoundTrip) {
  const Grid g = Grid::make(2, 3.5, 7);
  const Snapshot s{1.25, Field::from_function(g, [](const Point& x) { return x[0] - 2 * x[1] + 0.1; })};
  const auto bytes = encode_snapshot(s);
  EXPECT_EQ(bytes.size(), 4 + 4 + 4 + 8 + 16 + 8 + 8 * 49u);
  const Snapshot t = decode_snapshot(bytes);
  EXPECT_EQ(t.t, 1.25);
  EXPECT_EQ(t.u.grid, g);
  EXPECT_EQ(t.u.values, s.u.values);

  const fs::path p = fs::temp_directory_path() / "isoflow_roundtrip.isof";
  write_snapshot(p.string(), s);
  EXPECT_EQ(read_snapshot(p.string()).u.values, s.u.values);
  fs::remove(p);

  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_snapshot(bad), ValidationError);
  bad = bytes;
  bad.pop_back();
  EXPECT_THROW(decode_snapshot(bad), ValidationError);
}
