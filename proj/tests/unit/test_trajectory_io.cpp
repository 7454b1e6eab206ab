#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pricedyn/dynamics.hpp"
#include "pricedyn/trajectory_io.hpp"

using namespace pricedyn;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Trajectory small_flat_run() {
  LinearTwoPriceSpec spec;
  spec.alpha = 2;
  spec.delta = 0.5;
  return integrate_flat(FlatState{vec({0.1, 0}), vec({0, 0.02})}, spec,
                        DynamicsParams::uniform(2, 1.0, 0.5, 0.01, 0.5, 5));
}

}  // namespace

TEST(Format, RoundTripsExactly) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(std::stod(format_roundtrip(x)), x);
  }
  EXPECT_EQ(format_roundtrip(0.1), "0.1");
  EXPECT_EQ(format_roundtrip(-0.0), "0");
  EXPECT_EQ(format_roundtrip(2.0), "2");
}

TEST(Csv, HeaderAndRows) {
  const auto traj = small_flat_run();
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  std::istringstream in(out.str());
  const auto table = read_csv(in);
  const std::vector<std::string> header{"t", "p1", "p2", "v1", "v2", "energy", "kinetic",
                                        "potential", "dissipation_rate", "injection_rate", "L"};
  EXPECT_EQ(table.header, header);
  ASSERT_EQ(table.rows.size(), traj.samples.size());
  EXPECT_EQ(check_trajectory_table(table), "");
  // Prices, not deviations, in the p columns.
  EXPECT_EQ(table.rows[0][1], 1.1);
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    EXPECT_EQ(table.rows[i][0], traj.samples[i].t);
    EXPECT_EQ(table.rows[i][5], traj.samples[i].energy.total);
    EXPECT_EQ(table.rows[i][10], *traj.samples[i].angular_momentum);
  }
}

TEST(Csv, NoAngularMomentumColumnInThreeDimensions) {
  const auto model = DemandModel::linear(-Matrix::Identity(3, 3), vec({1, 1, 1}));
  const auto traj = integrate_flat(FlatState{vec({0.1, 0, 0}), vec({0, 0, 0})}, model,
                                   DynamicsParams::uniform(3, 1.0, 0.5, 0.1, 0.3));
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "t,p1,p2,p3,v1,v2,v3,energy,kinetic,potential,dissipation_rate,injection_rate");
}

TEST(Csv, DiscreteRunLayout) {
  const auto model = DemandModel::linear(-Matrix::Identity(2, 2), vec({1, 1}));
  DiscreteAgentSpec spec;
  spec.f_a = 0.5;
  spec.mu = 0.3;
  spec.nu = 0.4;
  DiscreteState s;
  s.p_bar = vec({1.2, 0.9});
  s.dp_prev = vec({0, 0});
  DiscreteRunOptions opt;
  opt.steps = 4;
  const auto run = run_discrete(s, spec, model, opt);
  std::ostringstream out;
  write_discrete_csv(out, run, model);
  std::istringstream in(out.str());
  const auto table = read_csv(in);
  ASSERT_EQ(table.rows.size(), 5u);
  EXPECT_EQ(check_trajectory_table(table), "");
  EXPECT_EQ(table.rows[3][0], 3.0);
  EXPECT_NE(out.str().find("\n3,"), std::string::npos);
  EXPECT_EQ(table.rows[2][8], 0.0);  // no dissipation term in the maps
}

TEST(Csv, InvariantViolationsReported) {
  CsvTable t;
  t.header = {"t", "p1"};
  t.rows = {{0.0, 1.0}};
  EXPECT_NE(check_trajectory_table(t), "");
  t.rows = {{0.0, 1.0}, {0.0, 1.0}};
  EXPECT_NE(check_trajectory_table(t), "");
  t.rows = {{0.0, 1.0}, {1.0, std::numeric_limits<double>::infinity()}};
  EXPECT_NE(check_trajectory_table(t), "");
  t.rows = {{0.0, 1.0}, {1.0, 1.0}};
  EXPECT_EQ(check_trajectory_table(t), "");
}

TEST(Csv, MalformedInput) {
  std::istringstream ragged("t,p1\n0,1\n1\n");
  EXPECT_THROW(read_csv(ragged), UsageError);
  std::istringstream bad("t,p1\n0,abc\n");
  EXPECT_THROW(read_csv(bad), UsageError);
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), UsageError);
}
