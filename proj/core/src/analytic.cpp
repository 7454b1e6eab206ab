#include "pricedyn/analytic.hpp"

#include <algorithm>
#include <cmath>

namespace pricedyn {

namespace {

void check_common(const LinearTwoPriceSpec& spec, double kappa, double gamma) {
  spec.validate();
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw UsageError("modes: kappa must be > 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw UsageError("modes: gamma must be >= 0");
}

// (exp(x) - 1) / x, accurate near x = 0.
Complex phi1(Complex x) {
  if (std::abs(x) < 1e-3) {
    return 1.0 + x * (1.0 / 2.0 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0)));
  }
  return (std::exp(x) - 1.0) / x;
}

void fill_dominance(ModeSet& set) {
  if (set.modes.empty()) return;
  std::size_t best = 0;
  for (std::size_t i = 1; i < set.modes.size(); ++i) {
    if (set.modes[i].rate.real() > set.modes[best].rate.real()) best = i;
  }
  const double top = set.modes[best].rate.real();
  const double tol = 1e-12 * (1.0 + std::abs(top));
  for (std::size_t i = 0; i < set.modes.size(); ++i) {
    if (i != best && std::abs(set.modes[i].rate.real() - top) <= tol) return;
  }
  set.dominant = best;
}

}  // namespace

std::pair<Complex, Complex> quadratic_roots(Complex b, Complex c) {
  if (b.imag() == 0.0 && c.imag() == 0.0) {
    // Real coefficients: keep complex pairs exactly conjugate.
    const double br = b.real();
    const double disc = br * br - 4.0 * c.real();
    if (disc < 0.0) {
      const double im = 0.5 * std::sqrt(-disc);
      return {Complex(-0.5 * br, im), Complex(-0.5 * br, -im)};
    }
    const double big = -0.5 * (br + std::copysign(std::sqrt(disc), br));
    double r1 = big;
    double r2 = big == 0.0 ? 0.0 : c.real() / big;
    if (r2 > r1) std::swap(r1, r2);
    return {Complex(r1, 0.0), Complex(r2, 0.0)};
  }
  const Complex s = std::sqrt(b * b - 4.0 * c);
  // Pick the sign that avoids cancellation in b +- s.
  const Complex big = std::real(std::conj(b) * s) >= 0.0 ? -0.5 * (b + s) : -0.5 * (b - s);
  Complex r1 = big;
  Complex r2 = big == Complex(0.0) ? Complex(0.0) : c / big;
  if (r2.real() > r1.real()) std::swap(r1, r2);
  return {r1, r2};
}

bool ModeSet::decays() const {
  return std::all_of(modes.begin(), modes.end(),
                     [](const ModeRate& m) { return m.rate.real() < 0.0; });
}

bool ModeSet::grows() const {
  return std::any_of(modes.begin(), modes.end(),
                     [](const ModeRate& m) { return m.rate.real() > 0.0; });
}

bool ModeSet::spirals() const {
  return std::any_of(modes.begin(), modes.end(),
                     [](const ModeRate& m) { return m.rate.imag() != 0.0; });
}

ModeSet conservative_modes(const LinearTwoPriceSpec& spec, double kappa, double gamma) {
  check_common(spec, kappa, gamma);
  if (spec.delta != 0.0) throw UsageError("conservative modes require delta = 0");
  ModeSet set;
  set.family = "conservative";
  set.basis_labels = {"y1 = q1 - q2", "y2 = q1 + q2"};
  const auto [a1, a2] = quadratic_roots(gamma, kappa * (spec.alpha + spec.beta));
  const auto [b1, b2] = quadratic_roots(gamma, kappa * (spec.alpha - spec.beta));
  set.modes = {{a1, "y1+"}, {a2, "y1-"}, {b1, "y2+"}, {b2, "y2-"}};
  fill_dominance(set);
  return set;
}

ModeSet rotational_modes(const LinearTwoPriceSpec& spec, double kappa, double gamma) {
  check_common(spec, kappa, gamma);
  if (spec.beta != 0.0) throw UsageError("rotational modes require beta = 0");
  ModeSet set;
  set.family = "rotational";
  set.basis_labels = {"z = q1 + i q2"};
  const auto [w1, w2] = quadratic_roots(gamma, kappa * Complex(spec.alpha, spec.delta));
  set.modes = {{w1, "z+"}, {w2, "z-"}};
  fill_dominance(set);
  if (set.dominant) set.asymptotic_ratio = -set.modes[*set.dominant].rate.imag();
  return set;
}

std::pair<Complex, Complex> solve_damped_oscillator(Complex stiffness, double gamma, Complex z0,
                                                    Complex zdot0, double t) {
  const auto [w1, w2] = quadratic_roots(gamma, stiffness);
  const Complex e1 = std::exp(w1 * t);
  // (exp(w2 t) - exp(w1 t)) / (w2 - w1), which tends to t exp(w t) for a double root.
  const Complex divided = e1 * t * phi1((w2 - w1) * t);
  const Complex c = zdot0 - w1 * z0;
  return {z0 * e1 + c * divided, w1 * z0 * e1 + c * (e1 + w2 * divided)};
}

FlatState flat_solution(const LinearTwoPriceSpec& spec, double kappa, double gamma,
                        const FlatState& initial, double t) {
  check_common(spec, kappa, gamma);
  if (initial.q.size() != 2 || initial.qdot.size() != 2) {
    throw UsageError("flat_solution: state must be two-dimensional");
  }
  const double tau = t - initial.t;
  const auto& q = initial.q;
  const auto& qd = initial.qdot;
  FlatState out;
  out.t = t;
  out.q.resize(2);
  out.qdot.resize(2);

  if (spec.delta == 0.0) {
    const auto [y1, y1d] = solve_damped_oscillator(kappa * (spec.alpha + spec.beta), gamma,
                                                   q[0] - q[1], qd[0] - qd[1], tau);
    const auto [y2, y2d] = solve_damped_oscillator(kappa * (spec.alpha - spec.beta), gamma,
                                                   q[0] + q[1], qd[0] + qd[1], tau);
    out.q << 0.5 * (y2.real() + y1.real()), 0.5 * (y2.real() - y1.real());
    out.qdot << 0.5 * (y2d.real() + y1d.real()), 0.5 * (y2d.real() - y1d.real());
    return out;
  }
  if (spec.beta == 0.0) {
    const auto [z, zd] = solve_damped_oscillator(kappa * Complex(spec.alpha, spec.delta), gamma,
                                                 Complex(q[0], q[1]), Complex(qd[0], qd[1]), tau);
    out.q << z.real(), z.imag();
    out.qdot << zd.real(), zd.imag();
    return out;
  }
  throw UsageError("flat_solution: closed form available only for delta = 0 or beta = 0");
}

}  // namespace pricedyn
