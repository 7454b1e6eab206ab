#include "pricedyn/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "pricedyn/diagnostics.hpp"

namespace pricedyn {

namespace {

void require_dim(const Vector& x, int n, const char* what) {
  if (x.size() != n) {
    std::ostringstream os;
    os << what << ": expected dimension " << n << ", got " << x.size();
    throw UsageError(os.str());
  }
}

void require_finite_result(const Vector& x, const char* what) {
  if (const auto bad = first_non_finite(x); bad >= 0) {
    std::ostringstream os;
    os << what << ": non-finite component at index " << bad;
    throw NumericError(os.str());
  }
}

// Tangent projection about the direction of p; used inside Runge-Kutta stages
// where p is off the sphere by the local truncation error.
Vector tangent_part(const Vector& p, const Vector& xi) {
  const Vector u = p / p.norm();
  return xi - u.dot(xi) * u;
}

Vector sphere_rhs(const Vector& p, const Vector& v, const DemandModel& model,
                  const DynamicsParams& params) {
  return params.kappa * tangent_part(p, eval_excess_demand(model, p)) -
         params.gamma.cwiseProduct(v) - p * v.squaredNorm();
}

Vector first_order_rhs(const Vector& p, const DemandModel& model, const DynamicsParams& params) {
  return params.kappa * tangent_part(p, eval_excess_demand(model, p));
}

// Classical RK4 for x'' = accel(x, x').
template <typename Accel>
void rk4_second_order(Vector& x, Vector& v, double h, const Accel& accel) {
  const Vector a1 = accel(x, v);
  const Vector x2 = x + 0.5 * h * v;
  const Vector v2 = v + 0.5 * h * a1;
  const Vector a2 = accel(x2, v2);
  const Vector x3 = x + 0.5 * h * v2;
  const Vector v3 = v + 0.5 * h * a2;
  const Vector a3 = accel(x3, v3);
  const Vector x4 = x + h * v3;
  const Vector v4 = v + h * a3;
  const Vector a4 = accel(x4, v4);
  x += (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4);
  v += (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
}

template <typename Rhs>
void rk4_first_order(Vector& x, double h, const Rhs& rhs) {
  const Vector k1 = rhs(x);
  const Vector k2 = rhs(Vector(x + 0.5 * h * k1));
  const Vector k3 = rhs(Vector(x + 0.5 * h * k2));
  const Vector k4 = rhs(Vector(x + h * k3));
  x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Sample make_sample(const Trajectory& traj, double t, const Vector& x, const Vector& v,
                   const Vector& price, const DemandModel& model, const DynamicsParams& params) {
  Sample s;
  s.t = t;
  s.x = x;
  s.v = v;
  s.energy = energy(price, v, model, params);
  if (x.size() == 2 && traj.equilibrium) {
    s.angular_momentum =
        angular_momentum(traj.mode == Mode::flat ? x : Vector(price - *traj.equilibrium), v);
  }
  return s;
}

std::string step_failure(long step, double t, const std::string& what) {
  std::ostringstream os;
  os << "integration stopped at step " << step << " (t = " << t << "): " << what;
  return os.str();
}

// Shared driver: `advance(x, v)` performs one step in place, `price(x)` maps
// the integration variable to a price vector.
template <typename Advance, typename PriceOf>
void run_fixed_step(Trajectory& traj, Vector x, Vector v, double t0, const DemandModel& model,
                    const DynamicsParams& params, const Advance& advance,
                    const PriceOf& price_of) {
  const long steps = params.steps();
  if (steps < params.sample_every) {
    throw UsageError("integrate: t_end / dt must cover at least one sample interval");
  }
  traj.samples.reserve(static_cast<std::size_t>(steps / params.sample_every + 1));

  auto record = [&](double t, const Vector& xs, const Vector& vs) {
    const Vector p = price_of(xs);
    traj.samples.push_back(make_sample(traj, t, xs, vs, p, model, params));
    if ((p.array() <= 0.0).any()) ++traj.positivity_violations;
  };

  record(t0, x, v);
  for (long k = 1; k <= steps; ++k) {
    const double t = t0 + static_cast<double>(k) * params.dt;
    try {
      advance(x, v);
      require_finite_result(x, "state");
      require_finite_result(v, "velocity");
      if (k % params.sample_every == 0) record(t, x, v);
    } catch (const NumericError& e) {
      traj.error = step_failure(k, t, e.what());
      return;
    }
  }
}

Trajectory make_trajectory(Mode mode, const DemandModel& model, const DynamicsParams& params) {
  Trajectory traj;
  traj.mode = mode;
  traj.params = params;
  traj.model_label = model.label();
  traj.equilibrium = model.equilibrium();
  return traj;
}

}  // namespace

bool SphereState::valid(double sphere_tol, double tangency_tol) const {
  return p.size() == v.size() && std::abs(p.squaredNorm() - 1.0) <= sphere_tol &&
         std::abs(p.dot(v)) <= tangency_tol;
}

Vector acceleration_sphere(const SphereState& state, const DemandModel& model,
                           const DynamicsParams& params) {
  require_dim(state.p, model.dim(), "acceleration_sphere");
  require_dim(state.v, model.dim(), "acceleration_sphere velocity");
  params.validate(model.dim());
  if (!state.valid()) {
    throw UsageError("acceleration_sphere: state is off the sphere or velocity is not tangent");
  }
  Vector a = sphere_rhs(state.p, state.v, model, params);
  require_finite_result(a, "acceleration_sphere");
  return a;
}

SphereState renormalize(const SphereState& state) {
  const double norm = state.p.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw NumericError("renormalize: price vector has zero or non-finite length");
  }
  SphereState out = state;
  out.p = state.p / norm;
  out.v = state.v - out.p.dot(state.v) * out.p;
  return out;
}

SphereState step_sphere(const SphereState& state, const DemandModel& model,
                        const DynamicsParams& params) {
  require_dim(state.p, model.dim(), "step_sphere");
  require_dim(state.v, model.dim(), "step_sphere velocity");
  params.validate(model.dim());
  if (!state.valid()) {
    throw UsageError("step_sphere: state is off the sphere or velocity is not tangent");
  }
  SphereState next = state;
  rk4_second_order(next.p, next.v, params.dt, [&](const Vector& p, const Vector& v) {
    return sphere_rhs(p, v, model, params);
  });
  require_finite_result(next.p, "step_sphere");
  require_finite_result(next.v, "step_sphere velocity");
  next.t = state.t + params.dt;
  return renormalize(next);
}

Vector acceleration_flat(const FlatState& state, const LinearTwoPriceSpec& spec,
                         const DynamicsParams& params) {
  require_dim(state.q, 2, "acceleration_flat");
  require_dim(state.qdot, 2, "acceleration_flat velocity");
  params.validate(2);
  const double gamma = params.scalar_gamma();
  const double k = params.kappa;
  const auto& q = state.q;
  const auto& qd = state.qdot;
  Vector a(2);
  a[0] = -k * spec.alpha * q[0] + k * (spec.beta + spec.delta) * q[1] - gamma * qd[0];
  a[1] = -k * spec.alpha * q[1] + k * (spec.beta - spec.delta) * q[0] - gamma * qd[1];
  require_finite_result(a, "acceleration_flat");
  return a;
}

Vector acceleration_flat(const FlatState& state, const DemandModel& model,
                         const DynamicsParams& params) {
  require_dim(state.q, model.dim(), "acceleration_flat");
  require_dim(state.qdot, model.dim(), "acceleration_flat velocity");
  params.validate(model.dim());
  const Vector p_hat = model.equilibrium().value_or(Vector::Zero(model.dim()));
  Vector a = params.kappa * eval_excess_demand(model, p_hat + state.q) -
             params.gamma.cwiseProduct(state.qdot);
  require_finite_result(a, "acceleration_flat");
  return a;
}

Trajectory integrate_sphere(const SphereState& initial, const DemandModel& model,
                            const DynamicsParams& params) {
  require_dim(initial.p, model.dim(), "integrate_sphere");
  require_dim(initial.v, model.dim(), "integrate_sphere velocity");
  params.validate(model.dim());
  if (first_non_finite(initial.p) >= 0 || first_non_finite(initial.v) >= 0) {
    throw UsageError("integrate_sphere: initial state must be finite");
  }

  Trajectory traj = make_trajectory(Mode::sphere, model, params);
  SphereState start = initial;
  if (!initial.valid()) {
    start = renormalize(initial);
    traj.warnings.emplace_back(
        "initial state was off the sphere or had a radial velocity component; projected once at t0");
  }

  const auto accel = [&](const Vector& p, const Vector& v) {
    return sphere_rhs(p, v, model, params);
  };
  run_fixed_step(
      traj, start.p, start.v, start.t, model, params,
      [&](Vector& p, Vector& v) {
        rk4_second_order(p, v, params.dt, accel);
        require_finite_result(p, "state");
        const double norm = p.norm();
        p /= norm;
        v -= p.dot(v) * p;
      },
      [](const Vector& p) { return p; });
  return traj;
}

Trajectory integrate_flat(const FlatState& initial, const DemandModel& model,
                          const DynamicsParams& params) {
  require_dim(initial.q, model.dim(), "integrate_flat");
  require_dim(initial.qdot, model.dim(), "integrate_flat velocity");
  params.validate(model.dim());
  if (first_non_finite(initial.q) >= 0 || first_non_finite(initial.qdot) >= 0) {
    throw UsageError("integrate_flat: initial state must be finite");
  }

  Trajectory traj = make_trajectory(Mode::flat, model, params);
  const Vector p_hat = model.equilibrium().value_or(Vector::Zero(model.dim()));
  traj.equilibrium = p_hat;
  const auto accel = [&](const Vector& q, const Vector& qd) -> Vector {
    return params.kappa * eval_excess_demand(model, p_hat + q) - params.gamma.cwiseProduct(qd);
  };
  run_fixed_step(
      traj, initial.q, initial.qdot, initial.t, model, params,
      [&](Vector& q, Vector& qd) { rk4_second_order(q, qd, params.dt, accel); },
      [&](const Vector& q) -> Vector { return p_hat + q; });
  return traj;
}

Trajectory integrate_flat(const FlatState& initial, const LinearTwoPriceSpec& spec,
                          const DynamicsParams& params) {
  spec.validate();
  params.validate(2);
  params.scalar_gamma();
  return integrate_flat(initial, DemandModel::two_price(spec), params);
}

Trajectory integrate_first_order(const Vector& p0, const DemandModel& model,
                                 const DynamicsParams& params, double t0) {
  require_dim(p0, model.dim(), "integrate_first_order");
  params.validate(model.dim());
  if (first_non_finite(p0) >= 0) throw UsageError("integrate_first_order: initial state must be finite");

  Trajectory traj = make_trajectory(Mode::first_order, model, params);
  Vector p = p0;
  if (std::abs(p.squaredNorm() - 1.0) > SphereState::kSphereTol) {
    if (!(p.norm() > 0.0)) throw UsageError("integrate_first_order: zero price vector");
    p /= p.norm();
    traj.warnings.emplace_back("initial price was not unit length; normalized at t0");
  }
  const auto rhs = [&](const Vector& x) { return first_order_rhs(x, model, params); };
  // The velocity slot carries dp/dt evaluated at the stored price.
  Vector v = rhs(p);
  run_fixed_step(
      traj, p, v, t0, model, params,
      [&](Vector& x, Vector& vel) {
        rk4_first_order(x, params.dt, rhs);
        require_finite_result(x, "state");
        x /= x.norm();
        vel = rhs(x);
      },
      [](const Vector& x) { return x; });
  return traj;
}

}  // namespace pricedyn
