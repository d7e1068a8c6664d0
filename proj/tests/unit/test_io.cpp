#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "releq/io.hpp"

using namespace releq;

TEST(CanonicalJson, SortedKeysAndSeventeenDigits) {
  json j;
  j["zeta"] = 0.1;
  j["alpha"] = {1, 2};
  j["m"] = {{"b", true}, {"a", "x"}};
  const std::string s = canonical_json(j);
  EXPECT_LT(s.find("\"alpha\""), s.find("\"m\""));
  EXPECT_LT(s.find("\"m\""), s.find("\"zeta\""));
  EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
  EXPECT_EQ(s.back(), '\n');
  EXPECT_EQ(canonical_json(parse_json_text(s, "test")), s);
}

TEST(CanonicalJson, RejectsNonFinite) {
  json j = {{"x", std::numeric_limits<double>::quiet_NaN()}};
  EXPECT_THROW(canonical_json(j), ValidationError);
  j = {{"x", std::numeric_limits<double>::infinity()}};
  EXPECT_THROW(canonical_json(j), ValidationError);
}

TEST(Omegas, LogGrammarAndLists) {
  const auto w = parse_omegas("1e-4:1e-2:8log");
  ASSERT_EQ(w.size(), 8u);
  EXPECT_EQ(w.front(), 1e-4);
  EXPECT_EQ(w.back(), 1e-2);
  for (std::size_t i = 1; i < w.size(); ++i)
    EXPECT_NEAR(std::log(w[i] / w[i - 1]), std::log(100.0) / 7, 1e-12);
  EXPECT_EQ(parse_omegas("3e-2,1e-3"), (std::vector<double>{1e-3, 3e-2}));
  EXPECT_THROW(parse_omegas("1e-4:1e-2:8"), ValidationError);
  EXPECT_THROW(parse_omegas("-1,2"), ValidationError);
  EXPECT_THROW(parse_omegas("1e-2:1e-4:3log"), ValidationError);
  EXPECT_THROW(parse_omegas("abc"), ValidationError);
}

TEST(RunConfigParsing, ExponentsAndUnits) {
  RunConfig c = run_config_from_json(json::parse(R"({"masses":[1,1],"q":2,"omegas":"1e-3:1e-2:2log"})"));
  EXPECT_DOUBLE_EQ(c.p, 2.5);
  EXPECT_EQ(c.mass_unit, MassUnit::cell);
  EXPECT_EQ(c.omegas.size(), 2u);
  c = run_config_from_json(json::parse(R"({"masses":[1,2],"p":2.5,"q":2,"mass_unit":"absolute"})"));
  EXPECT_EQ(c.mass_unit, MassUnit::absolute);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"masses":[1,1],"p":3,"q":2})")), ValidationError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"masses":[1,-1]})")), ValidationError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"masses":[1,1],"colour":1})")), ValidationError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"masses":[1,1],"zeta":[[0,1]]})")), ValidationError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"masses":[1,1],"mass_unit":"kg"})")), ValidationError);
}

TEST(RunConfigParsing, CellUnitsRescaleZeta) {
  CellProfile c;
  c.m_star = 8.0;
  const RunConfig rc = run_config_from_json(json::parse(R"({"masses":[1,3],"zeta":[[1,0],[-1,0]]})"));
  const AbsoluteInstance a = to_absolute(rc, c);
  EXPECT_DOUBLE_EQ(a.masses[1], 24.0);
  ASSERT_TRUE(a.zeta.has_value());
  EXPECT_DOUBLE_EQ(a.zeta->point(0).x(), 2.0);
}

TEST(Csv, TrajectoryRoundTrip) {
  PhaseState s;
  s.masses = MassVector({1, 2});
  s.positions = {Vec3(0.1, 0.2, 0.3), Vec3(-1.0 / 3, 2, 0)};
  s.velocities = {Vec3(1, 0, 0), Vec3(0, 1e-300, -4)};
  Trajectory t;
  t.snapshots = {s};
  s.time = 0.5;
  t.snapshots.push_back(s);
  const std::string csv = trajectory_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x0,y0,z0,vx0,vy0,vz0,x1,y1,z1,vx1,vy1,vz1");
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  const Trajectory back = trajectory_from_csv(csv, s.masses);
  ASSERT_EQ(back.snapshots.size(), 2u);
  EXPECT_EQ(back.snapshots[1].time, 0.5);
  EXPECT_EQ(back.snapshots[1].positions[1], s.positions[1]);
  EXPECT_EQ(back.snapshots[1].velocities[1], s.velocities[1]);
  EXPECT_THROW(trajectory_from_csv(csv, MassVector({1})), ValidationError);
}

TEST(Profiles, JsonRoundTripIsLossless) {
  const CellProfile c = solve_normalized(2.0, 1e-8);
  const CellProfile back = profile_from_json(parse_json_text(canonical_json(json_of(c)), "profile"));
  EXPECT_EQ(back.w0, c.w0);
  EXPECT_EQ(back.R, c.R);
  EXPECT_EQ(back.w_values, c.w_values);
  EXPECT_EQ(back.radial_grid, c.radial_grid);
  EXPECT_THROW(profile_from_json(json::parse(R"({"p":2})")), ValidationError);
}
