#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "pricedyn/demand.hpp"
#include "pricedyn/dynamics.hpp"

namespace pricedyn {

using Complex = std::complex<double>;

/// Roots of w^2 + b w + c = 0, computed without cancellation. The root with
/// the larger real part comes first (ties keep the formula order).
std::pair<Complex, Complex> quadratic_roots(Complex b, Complex c);

struct ModeRate {
  Complex rate;       ///< y ~ exp(rate t)
  std::string label;  ///< e.g. "y1+", "z-"
};

/// Exponential rates of the two-price linear system.
///
/// For delta = 0 the combinations y1 = q1 - q2 and y2 = q1 + q2 decouple with
/// w^2 + gamma w + kappa (alpha +- beta) = 0: the symmetric cross term stiffens
/// the difference and softens the sum, so y2 is the one that can grow. For beta = 0 the complex
/// coordinate z = q1 + i q2 obeys z'' + gamma z' + kappa (alpha + i delta) z = 0.
/// Roots always come from the full characteristic quadratic.
struct ModeSet {
  std::string family;  ///< "conservative" or "rotational"
  std::vector<ModeRate> modes;
  std::vector<std::string> basis_labels;
  /// Index of the mode with the strictly largest real part; empty on ties.
  std::optional<std::size_t> dominant;
  /// -Im(dominant rate) = asymptotic L / |q|^2 (rotational family only).
  std::optional<double> asymptotic_ratio;

  /// Every rate has a negative real part.
  bool decays() const;
  /// Some rate has a positive real part.
  bool grows() const;
  /// Some rate has a nonzero imaginary part.
  bool spirals() const;
};

/// delta must be 0; gamma is the common damping coefficient.
ModeSet conservative_modes(const LinearTwoPriceSpec& spec, double kappa, double gamma);

/// beta must be 0; gamma is the common damping coefficient.
ModeSet rotational_modes(const LinearTwoPriceSpec& spec, double kappa, double gamma);

/// Solution at time t of z'' + gamma z' + c z = 0 from (z0, z0'), written
/// through the divided difference of the two exponentials so the
/// repeated-root case (c1 + c2 t) exp(w t) is covered continuously.
std::pair<Complex, Complex> solve_damped_oscillator(Complex stiffness, double gamma, Complex z0,
                                                    Complex zdot0, double t);

/// Exact state of the linearized two-price system at time t, starting from
/// `initial` (taken at initial.t). Requires delta = 0 or beta = 0.
FlatState flat_solution(const LinearTwoPriceSpec& spec, double kappa, double gamma,
                        const FlatState& initial, double t);

}  // namespace pricedyn
