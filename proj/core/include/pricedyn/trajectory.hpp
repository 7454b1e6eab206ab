#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pricedyn/types.hpp"

namespace pricedyn {

enum class Mode { sphere, flat, first_order };

std::string_view to_string(Mode mode);
/// Throws UsageError for unknown names.
Mode mode_from_string(std::string_view name);

struct DynamicsParams {
  double kappa = 1.0;  ///< demand-response gain
  Vector gamma;        ///< diagonal of the damping matrix, one entry per commodity
  double dt = 1e-3;
  double t_end = 10.0;
  int sample_every = 1;

  /// Throws UsageError unless kappa > 0, gamma has n finite non-negative
  /// entries, dt > 0, t_end > 0 and sample_every >= 1.
  void validate(int n) const;

  /// Integration steps to reach t_end (rounded to the nearest whole step).
  long steps() const;

  /// Common damping coefficient; throws UsageError when the entries differ.
  double scalar_gamma() const;

  static DynamicsParams uniform(int n, double kappa, double gamma, double dt, double t_end,
                                int sample_every = 1);
};

/// Energy bookkeeping at one phase point.
struct EnergyRecord {
  double kinetic = 0.0;           ///< 1/2 |v|^2
  double potential = 0.0;         ///< kappa phi(p)
  double total = 0.0;             ///< kinetic + potential
  double dissipation_rate = 0.0;  ///< v . gamma . v
  double injection_rate = 0.0;    ///< kappa v . A(p)
};

/// One stored phase point. `x` is the price p in sphere and first-order mode
/// and the deviation q = p - p_hat in flat mode.
struct Sample {
  double t = 0.0;
  Vector x;
  Vector v;
  EnergyRecord energy;
  std::optional<double> angular_momentum;  ///< two-commodity runs with a known p_hat
};

struct Trajectory {
  Mode mode = Mode::sphere;
  std::vector<Sample> samples;
  DynamicsParams params;
  std::string model_label;
  std::optional<Vector> equilibrium;

  /// Set when integration stopped on a non-finite state; samples then hold the
  /// partial trajectory up to the last finite sample.
  std::optional<std::string> error;
  std::vector<std::string> warnings;
  /// Number of samples with a non-positive price component.
  long positivity_violations = 0;

  bool ok() const { return !error.has_value(); }
  int dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().x.size()); }

  /// Price vector of sample i (p_hat + q in flat mode).
  Vector price(std::size_t i) const;
  /// Deviation from equilibrium of sample i; throws UsageError without p_hat.
  Vector deviation(std::size_t i) const;

  /// Uniform sample spacing; throws UsageError when fewer than two samples.
  double spacing() const;
};

}  // namespace pricedyn
