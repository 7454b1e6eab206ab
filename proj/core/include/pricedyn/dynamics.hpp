#pragma once

#include "pricedyn/demand.hpp"
#include "pricedyn/trajectory.hpp"

namespace pricedyn {

/// Phase point on the unit price hypersphere.
struct SphereState {
  Vector p;  ///< |p| = 1
  Vector v;  ///< dp/dt, tangent: p . v = 0
  double t = 0.0;

  static constexpr double kSphereTol = 1e-9;
  static constexpr double kTangencyTol = 1e-9;

  /// | |p|^2 - 1 | <= sphere_tol and |p . v| <= tangency_tol.
  bool valid(double sphere_tol = kSphereTol, double tangency_tol = kTangencyTol) const;
};

/// Phase point in deviation coordinates q = p - p_hat.
struct FlatState {
  Vector q;
  Vector qdot;
  double t = 0.0;
};

/// Second-order dynamics on the sphere:
///
///   a = kappa P(p) xi(p) - gamma v - p |v|^2,
///
/// with P(p) the tangent projector. The last term keeps |p| = 1; for tangent
/// v it gives p . a = -|v|^2. Throws UsageError if the state is off the
/// sphere or v is not tangent, NumericError on a non-finite result.
Vector acceleration_sphere(const SphereState& state, const DemandModel& model,
                           const DynamicsParams& params);

/// p <- p/|p|, v <- v - (p . v) p. Throws NumericError when |p| = 0.
SphereState renormalize(const SphereState& state);

/// One classical fourth-order Runge-Kutta step of the sphere dynamics
/// followed by renormalize.
SphereState step_sphere(const SphereState& state, const DemandModel& model,
                        const DynamicsParams& params);

/// Linearized two-price dynamics,
///
///   q1'' = -k alpha q1 + k (beta + delta) q2 - gamma q1'
///   q2'' = -k alpha q2 + k (beta - delta) q1 - gamma q2'.
///
/// Requires equal damping on both commodities.
Vector acceleration_flat(const FlatState& state, const LinearTwoPriceSpec& spec,
                         const DynamicsParams& params);

/// Flat dynamics for an arbitrary model: q'' = kappa xi(p_hat + q) - gamma q'.
Vector acceleration_flat(const FlatState& state, const DemandModel& model,
                         const DynamicsParams& params);

/// Fixed-step integrations to params.t_end, storing every sample_every-th
/// step. Identical inputs give bit-identical trajectories.
///
/// A non-finite state stops the run: the returned trajectory keeps the
/// samples produced so far and carries an error message. Invalid inputs
/// throw UsageError.
Trajectory integrate_sphere(const SphereState& initial, const DemandModel& model,
                            const DynamicsParams& params);
Trajectory integrate_flat(const FlatState& initial, const DemandModel& model,
                          const DynamicsParams& params);
/// Two-price convenience path; rejects unequal damping entries.
Trajectory integrate_flat(const FlatState& initial, const LinearTwoPriceSpec& spec,
                          const DynamicsParams& params);
/// dp/dt = kappa P(p) xi(p) on the sphere; the stored velocity is dp/dt.
Trajectory integrate_first_order(const Vector& p0, const DemandModel& model,
                                 const DynamicsParams& params, double t0 = 0.0);

}  // namespace pricedyn
