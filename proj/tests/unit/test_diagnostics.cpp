#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pricedyn/diagnostics.hpp"
#include "pricedyn/dynamics.hpp"

using namespace pricedyn;
using std::numbers::pi;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

LinearTwoPriceSpec spec_of(double alpha, double beta, double delta) {
  LinearTwoPriceSpec s;
  s.alpha = alpha;
  s.beta = beta;
  s.delta = delta;
  s.p_hat = Eigen::Vector2d(1, 1);
  return s;
}

Trajectory flat_run(const LinearTwoPriceSpec& spec, double gamma, double dt, double t_end,
                    const Vector& q0, const Vector& qd0, int every = 1) {
  return integrate_flat(FlatState{q0, qd0}, spec,
                        DynamicsParams::uniform(2, 1.0, gamma, dt, t_end, every));
}

// Hand-built flat trajectory on the circle of radius r, one turn in n steps.
Trajectory circle(double r, int n, double gamma) {
  Trajectory traj;
  traj.mode = Mode::flat;
  traj.equilibrium = Vector::Zero(2);
  traj.params = DynamicsParams::uniform(2, 1.0, gamma, 2 * pi / n, 2 * pi);
  for (int k = 0; k <= n; ++k) {
    const double th = 2 * pi * k / n;
    Sample s;
    s.t = th;
    s.x = vec({r * std::cos(th), r * std::sin(th)});
    s.v = vec({-r * std::sin(th), r * std::cos(th)});
    traj.samples.push_back(s);
  }
  return traj;
}

DemandModel rotation_model(double delta) {
  Matrix k(2, 2);
  k << 0, delta, -delta, 0;
  return DemandModel::composite(Matrix::Zero(2, 2), k, Vector::Zero(2));
}

}  // namespace

TEST(Energy, RestAtReference) {
  const auto model = DemandModel::two_price(spec_of(2, 1, 0.5));
  const auto params = DynamicsParams::uniform(2, 1.0, 0.5, 1e-3, 1.0);
  const auto e = energy(vec({1, 1}), vec({0, 0}), model, params);
  EXPECT_EQ(e.total, 0.0);
  EXPECT_EQ(e.dissipation_rate, 0.0);
}

TEST(Energy, DefinitionArithmetic) {
  DemandModel::Fields f;
  f.potential = [](const Vector&) { return 0.05; };
  f.potential_gradient = [](const Vector& p) { return Vector::Zero(p.size()).eval(); };
  f.solenoidal = [](const Vector&) { return vec({1.0, 0.0}); };
  const DemandModel model(2, f);
  auto params = DynamicsParams::uniform(2, 1.0, 0.5, 1e-3, 1.0);
  params.gamma[1] = 2.0;
  const auto e = energy(vec({1, 1}), vec({0.12, 0.16}), model, params);
  EXPECT_NEAR(e.kinetic, 0.02, 1e-17);
  EXPECT_EQ(e.potential, 0.05);
  EXPECT_NEAR(e.total, 0.07, 1e-16);
  EXPECT_NEAR(e.dissipation_rate, 0.5 * 0.0144 + 2.0 * 0.0256, 1e-17);
  EXPECT_NEAR(e.injection_rate, 0.12, 1e-17);
}

TEST(SampledDerivative, ExactOnQuadratics) {
  std::vector<double> f;
  const double h = 0.1;
  for (int i = 0; i < 6; ++i) f.push_back(3.0 * (i * h) * (i * h) - (i * h) + 2.0);
  const auto d = sampled_derivative(f, h);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(d[i], 6.0 * i * h - 1.0, 1e-12);
  EXPECT_THROW(sampled_derivative({1.0, 2.0}, h), UsageError);
}

TEST(EnergyBalance, ConservativeUndampedRunConservesEnergy) {
  const auto traj = flat_run(spec_of(2, 1, 0), 0.0, 1e-3, 5.0, vec({0.1, -0.02}), vec({0, 0.05}));
  const double e0 = traj.samples.front().energy.total;
  for (const auto& s : traj.samples) EXPECT_NEAR(s.energy.total, e0, 1e-13);
  EXPECT_LT(energy_balance_residual(traj).max_abs, 1e-8);
}

TEST(EnergyBalance, RotationalRunResidualSmallWhileEnergyOscillates) {
  const auto traj = flat_run(spec_of(2, 0, 0.5), 0.3, 1e-3, 10.0, vec({0.1, 0}), vec({0, 0}));
  const auto r = energy_balance_residual(traj);
  EXPECT_LT(r.max_abs, 5e-6);
  // Injection changes sign along the orbit, so total energy is not monotone.
  bool rises = false;
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    rises = rises || traj.samples[i].energy.total > traj.samples[i - 1].energy.total;
  }
  EXPECT_TRUE(rises);
}

TEST(EnergyBalance, ResidualIsSecondOrderInSpacing) {
  const auto q0 = vec({0.1, 0.05});
  const auto qd0 = vec({0, 0});
  const auto coarse = flat_run(spec_of(2, 1, 0), 1.0, 2e-3, 4.0, q0, qd0);
  const auto fine = flat_run(spec_of(2, 1, 0), 1.0, 1e-3, 4.0, q0, qd0);
  const double ratio =
      energy_balance_residual(coarse).max_abs / energy_balance_residual(fine).max_abs;
  EXPECT_NEAR(ratio, 4.0, 1.0);
}

TEST(AngularMomentum, Examples) {
  EXPECT_EQ(angular_momentum(vec({1, 0}), vec({0, 1})), -1.0);
  EXPECT_EQ(angular_momentum(vec({0.3, 0.4}), vec({0.6, 0.8})), 0.0);
  EXPECT_NEAR(angular_momentum(vec({0.1, 0}), vec({0, -0.05})), 0.005, 1e-18);
  EXPECT_THROW(angular_momentum(vec({1, 0, 0}), vec({0, 1, 0})), UsageError);
}

TEST(AngularMomentum, LawHoldsOnRotationalRun) {
  const auto spec = spec_of(2, 0, 0.5);
  const auto traj = flat_run(spec, 1.0, 1e-3, 10.0, vec({0.1, 0}), vec({0, 0}));
  const auto report = angular_momentum_residual(traj, spec);
  EXPECT_LT(report.residual.max_abs, 5e-6);
  EXPECT_GT(report.terminal_ratio, 0.0);
}

TEST(AngularMomentum, DecaysWithoutRotation) {
  // Isotropic restoring force: dL/dt = -gamma L exactly.
  const auto spec = spec_of(2, 0, 0);
  const auto traj = flat_run(spec, 1.0, 1e-3, 10.0, vec({0.1, 0}), vec({0, 0.1}));
  const auto report = angular_momentum_residual(traj, spec);
  EXPECT_LT(report.residual.max_abs, 5e-6);
  const double l0 = *traj.samples.front().angular_momentum;
  const double l1 = *traj.samples.back().angular_momentum;
  EXPECT_NEAR(l1, l0 * std::exp(-10.0), 1e-9);
}

TEST(AngularMomentum, StationaryStateHasZeroResidual) {
  const auto spec = spec_of(2, 0, 0.5);
  const auto traj = flat_run(spec, 1.0, 1e-2, 1.0, vec({0, 0}), vec({0, 0}));
  const auto report = angular_momentum_residual(traj, spec);
  EXPECT_EQ(report.residual.max_abs, 0.0);
  EXPECT_TRUE(std::isnan(report.terminal_ratio));
}

TEST(Recurrence, UndampedIsotropicOrbitPeriod) {
  const auto spec = spec_of(2, 0, 0);
  const auto traj = flat_run(spec, 0.0, 1e-3, 12.0, vec({0.1, 0}), vec({0, 0.1}), 10);
  const auto loops = detect_recurrence(traj, DemandModel::two_price(spec), 1e-3, 1.0);
  ASSERT_GE(loops.size(), 1u);
  EXPECT_NEAR(loops[0].refined_period, 2 * pi / std::sqrt(2.0), 1e-4);
  EXPECT_LE(loops[0].closure_gap, 1e-3);
  for (std::size_t i = 1; i < loops.size(); ++i) {
    EXPECT_GE(loops[i].t_start, loops[i - 1].t_end);
  }
}

TEST(Recurrence, StronglyDampedRunHasNoLoops) {
  const auto spec = spec_of(2, 1, 0);
  const auto traj = flat_run(spec, 4.0, 1e-3, 10.0, vec({0.1, 0.05}), vec({0, 0}), 10);
  EXPECT_TRUE(detect_recurrence(traj, DemandModel::two_price(spec), 1e-4, 1.0).empty());
}

TEST(Recurrence, ConstantStateIsNotALoop) {
  const auto spec = spec_of(2, 1, 0);
  const auto traj = flat_run(spec, 1.0, 1e-2, 5.0, vec({0, 0}), vec({0, 0}));
  EXPECT_TRUE(detect_recurrence(traj, DemandModel::two_price(spec), 1e-3, 0.5).empty());
  EXPECT_THROW(detect_recurrence(traj, DemandModel::two_price(spec), 1e-3, 0.01), UsageError);
}

TEST(Circulation, CircleLineIntegral) {
  const double r = 0.3;
  const double delta = 0.7;
  const auto traj = circle(r, 2000, 0.0);
  const auto [circ_a, circ_damp] = circulation_integrals(traj, 0, 2000, rotation_model(delta), 1e-9);
  // Trapezoidal sums of a linear field are exact on the inscribed polygon,
  // whose enclosed area is n/2 r^2 sin(2 pi / n).
  EXPECT_NEAR(circ_a, -delta * 2000 * r * r * std::sin(2 * pi / 2000), 1e-13);
  EXPECT_NEAR(circ_a, -2 * pi * delta * r * r, 1e-6);
  EXPECT_EQ(circ_damp, 0.0);
}

TEST(Circulation, DampingIntegralOnCircle) {
  // v is tangent with |v| = r, so the closed integral of dp . gamma v is 2 pi gamma r^2.
  const auto traj = circle(0.5, 4000, 0.2);
  const auto [circ_a, circ_damp] = circulation_integrals(traj, 0, 4000, rotation_model(0), 1e-9);
  EXPECT_EQ(circ_a, 0.0);
  EXPECT_NEAR(circ_damp, 2 * pi * 0.2 * 0.25, 1e-6);
}

TEST(Circulation, OpenSegmentRejected) {
  const auto traj = circle(0.3, 100, 0.0);
  EXPECT_THROW(circulation_integrals(traj, 0, 50, rotation_model(1), 1e-6), UsageError);
}

TEST(Circulation, PhaseDistanceScalesVelocity) {
  auto traj = circle(1.0, 4, 2.0);
  // Samples 0 and 2 are antipodal: |dx| = 2, |dv| = 2, tau = 1/2.
  EXPECT_NEAR(phase_distance(traj, 0, 2), std::sqrt(4.0 + 0.25 * 4.0), 1e-15);
  traj.params.gamma.setZero();
  EXPECT_NEAR(phase_distance(traj, 0, 2), std::sqrt(8.0), 1e-15);
}
