#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pricedyn/demand.hpp"
#include "pricedyn/trajectory.hpp"

namespace pricedyn {

/// Energy, dissipation and injection at price p with velocity v. The
/// potential is taken as returned by the model (phi(p_hat) = 0 for the
/// built-in models).
EnergyRecord energy(const Vector& p, const Vector& v, const DemandModel& model,
                    const DynamicsParams& params);

struct ResidualSeries {
  std::vector<double> t;
  std::vector<double> values;
  double max_abs = 0.0;
  double rms = 0.0;
};

/// Derivative of a uniformly sampled series: centred differences inside,
/// three-point one-sided stencils at both ends (second order everywhere).
/// Throws UsageError for fewer than three samples.
std::vector<double> sampled_derivative(const std::vector<double>& values, double h);

/// r(t) = d(total)/dt - injection_rate + dissipation_rate over the stored
/// samples. Zero up to O(h^2) for any exact solution of the dynamics.
ResidualSeries energy_balance_residual(const Trajectory& traj);

/// L = q2 q1' - q1 q2'. Throws UsageError unless both vectors have two entries.
double angular_momentum(const Vector& q, const Vector& qdot);

struct AngularMomentumReport {
  ResidualSeries residual;          ///< dL/dt - kappa delta |q|^2 + gamma L
  std::vector<double> ratio;        ///< L / |q|^2 (NaN where q = 0)
  double terminal_ratio = 0.0;      ///< last finite entry of `ratio`
};

/// Checks dL/dt = kappa delta |q|^2 - gamma L along a two-commodity
/// trajectory; kappa and gamma come from the trajectory's parameters, which
/// must have a common damping coefficient.
AngularMomentumReport angular_momentum_residual(const Trajectory& traj,
                                                const LinearTwoPriceSpec& spec);

struct LoopRecord {
  std::size_t start_index = 0;
  std::size_t end_index = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  /// Return time refined by a parabolic fit of the squared phase distance
  /// around end_index.
  double refined_period = 0.0;
  double closure_gap = 0.0;
  double circulation_A = 0.0;        ///< kappa * closed integral of dp . A(p)
  double circulation_damping = 0.0;  ///< closed integral of dp . gamma . v
};

/// Phase-space distance with velocities scaled by tau = 1/max(gamma)
/// (tau = 1 when there is no damping).
double phase_distance(const Trajectory& traj, std::size_t i, std::size_t j);

/// Scans for near-returns (distance < eps, local minimum in time, separation
/// at least min_duration). Loops are non-overlapping and in time order; each
/// carries its circulation integrals.
std::vector<LoopRecord> detect_recurrence(const Trajectory& traj, const DemandModel& model,
                                          double eps, double min_duration);

/// Trapezoidal kappa * sum dp . A and sum dp . gamma . v over samples
/// [first, last]. Throws UsageError if the segment is not closed to within eps.
std::pair<double, double> circulation_integrals(const Trajectory& traj, std::size_t first,
                                                std::size_t last, const DemandModel& model,
                                                double eps);

}  // namespace pricedyn
