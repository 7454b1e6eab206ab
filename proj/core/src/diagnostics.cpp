#include "pricedyn/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <tuple>

namespace pricedyn {

namespace {

ResidualSeries summarize(std::vector<double> t, std::vector<double> values) {
  ResidualSeries out;
  double sum_sq = 0.0;
  for (double r : values) {
    out.max_abs = std::max(out.max_abs, std::abs(r));
    sum_sq += r * r;
  }
  out.rms = values.empty() ? 0.0 : std::sqrt(sum_sq / static_cast<double>(values.size()));
  out.t = std::move(t);
  out.values = std::move(values);
  return out;
}

std::vector<double> sample_times(const Trajectory& traj) {
  std::vector<double> t;
  t.reserve(traj.samples.size());
  for (const auto& s : traj.samples) t.push_back(s.t);
  return t;
}

double velocity_scale(const DynamicsParams& params) {
  const double g = params.gamma.size() > 0 ? params.gamma.maxCoeff() : 0.0;
  return g > 0.0 ? 1.0 / g : 1.0;
}

}  // namespace

EnergyRecord energy(const Vector& p, const Vector& v, const DemandModel& model,
                    const DynamicsParams& params) {
  if (v.size() != model.dim() || params.gamma.size() != model.dim()) {
    throw UsageError("energy: dimension mismatch");
  }
  EnergyRecord e;
  e.kinetic = 0.5 * v.squaredNorm();
  e.potential = params.kappa * model.potential(p);
  e.total = e.kinetic + e.potential;
  e.dissipation_rate = v.dot(params.gamma.cwiseProduct(v));
  e.injection_rate = params.kappa * v.dot(model.solenoidal(p));
  return e;
}

std::vector<double> sampled_derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 3) throw UsageError("derivative: need at least three samples");
  if (!(h > 0.0)) throw UsageError("derivative: spacing must be positive");
  std::vector<double> d(n);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

ResidualSeries energy_balance_residual(const Trajectory& traj) {
  if (traj.samples.size() < 3) throw UsageError("energy balance: need at least three samples");
  std::vector<double> total;
  total.reserve(traj.samples.size());
  for (const auto& s : traj.samples) total.push_back(s.energy.total);
  const auto de = sampled_derivative(total, traj.spacing());
  std::vector<double> r(de.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto& e = traj.samples[i].energy;
    r[i] = de[i] - e.injection_rate + e.dissipation_rate;
  }
  return summarize(sample_times(traj), std::move(r));
}

double angular_momentum(const Vector& q, const Vector& qdot) {
  if (q.size() != 2 || qdot.size() != 2) {
    throw UsageError("angular momentum is defined for two commodities only");
  }
  return q[1] * qdot[0] - q[0] * qdot[1];
}

AngularMomentumReport angular_momentum_residual(const Trajectory& traj,
                                                const LinearTwoPriceSpec& spec) {
  if (traj.dim() != 2) throw UsageError("angular momentum residual: trajectory must be 2-D");
  if (traj.samples.size() < 3) {
    throw UsageError("angular momentum residual: need at least three samples");
  }
  const double gamma = traj.params.scalar_gamma();
  const double kappa = traj.params.kappa;
  const std::size_t n = traj.samples.size();

  std::vector<double> l(n), q2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector q = traj.deviation(i);
    l[i] = angular_momentum(q, traj.samples[i].v);
    q2[i] = q.squaredNorm();
  }
  const auto dl = sampled_derivative(l, traj.spacing());

  AngularMomentumReport report;
  std::vector<double> r(n);
  report.ratio.resize(n);
  report.terminal_ratio = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = dl[i] - kappa * spec.delta * q2[i] + gamma * l[i];
    report.ratio[i] = q2[i] > 0.0 ? l[i] / q2[i] : std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(report.ratio[i])) report.terminal_ratio = report.ratio[i];
  }
  report.residual = summarize(sample_times(traj), std::move(r));
  return report;
}

double phase_distance(const Trajectory& traj, std::size_t i, std::size_t j) {
  const auto& a = traj.samples.at(i);
  const auto& b = traj.samples.at(j);
  const double tau = velocity_scale(traj.params);
  return std::sqrt((a.x - b.x).squaredNorm() + tau * tau * (a.v - b.v).squaredNorm());
}

std::pair<double, double> circulation_integrals(const Trajectory& traj, std::size_t first,
                                                std::size_t last, const DemandModel& model,
                                                double eps) {
  if (first >= last || last >= traj.samples.size()) {
    throw UsageError("circulation: segment indices out of range");
  }
  if (const double gap = phase_distance(traj, first, last); !(gap <= eps)) {
    throw UsageError("circulation: segment is not closed (gap " + std::to_string(gap) +
                     " > eps " + std::to_string(eps) + ")");
  }
  const auto& gamma = traj.params.gamma;
  double circ_a = 0.0;
  double circ_damp = 0.0;
  Vector a_prev = model.solenoidal(traj.price(first));
  for (std::size_t k = first; k < last; ++k) {
    const auto& s0 = traj.samples[k];
    const auto& s1 = traj.samples[k + 1];
    const Vector dx = s1.x - s0.x;
    const Vector a_next = model.solenoidal(traj.price(k + 1));
    circ_a += 0.5 * dx.dot(a_prev + a_next);
    circ_damp += 0.5 * dx.dot(gamma.cwiseProduct(s0.v + s1.v));
    a_prev = a_next;
  }
  return {traj.params.kappa * circ_a, circ_damp};
}

std::vector<LoopRecord> detect_recurrence(const Trajectory& traj, const DemandModel& model,
                                          double eps, double min_duration) {
  if (!(eps > 0.0)) throw UsageError("recurrence: eps must be positive");
  std::vector<LoopRecord> loops;
  const std::size_t n = traj.samples.size();
  if (n < 3) return loops;
  const double h = traj.spacing();
  if (!(min_duration > 2.0 * h)) {
    throw UsageError("recurrence: min_duration must exceed two sample intervals");
  }
  const auto min_sep = static_cast<std::size_t>(std::ceil(min_duration / h - 1e-9));

  std::size_t i = 0;
  while (i + min_sep + 1 < n) {
    // A return only counts once the orbit has left the eps-ball around sample i,
    // so a resting state never produces a loop.
    bool left = false;
    std::size_t hit = 0;
    double prev = 0.0;
    for (std::size_t j = i + 1; j + 1 < n; ++j) {
      const double d = phase_distance(traj, i, j);
      if (d >= eps) left = true;
      if (left && j >= i + min_sep && d < eps && d <= prev) {
        const double next = phase_distance(traj, i, j + 1);
        if (d <= next) {
          hit = j;
          break;
        }
      }
      prev = d;
    }
    if (hit == 0) {
      ++i;
      continue;
    }

    LoopRecord loop;
    loop.start_index = i;
    loop.end_index = hit;
    loop.t_start = traj.samples[i].t;
    loop.t_end = traj.samples[hit].t;
    loop.closure_gap = phase_distance(traj, i, hit);
    const double dm = std::pow(phase_distance(traj, i, hit - 1), 2);
    const double d0 = loop.closure_gap * loop.closure_gap;
    const double dp = std::pow(phase_distance(traj, i, hit + 1), 2);
    const double curvature = dm - 2.0 * d0 + dp;
    const double shift = curvature > 0.0 ? 0.5 * h * (dm - dp) / curvature : 0.0;
    loop.refined_period = loop.t_end + shift - loop.t_start;
    std::tie(loop.circulation_A, loop.circulation_damping) =
        circulation_integrals(traj, i, hit, model, eps);
    loops.push_back(loop);
    i = hit;
  }
  return loops;
}

}  // namespace pricedyn
