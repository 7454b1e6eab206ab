#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pricedyn/demand.hpp"

namespace pricedyn {

enum class AgentKind { laggard, bullbear, delayed };

std::string_view to_string(AgentKind kind);
AgentKind agent_kind_from_string(std::string_view name);

/// Population mix for the discrete-time price maps. Group a has fraction f_a,
/// group b the remainder.
///
///   laggard:  a moves by mu xi, b repeats nu times the last mean change
///   bullbear: bulls (a) move by lambda xi + nu dp, bears (b) by mu xi - bear_coeff dp
///   delayed:  a responds to xi one period back, b two periods back
struct DiscreteAgentSpec {
  AgentKind kind = AgentKind::laggard;
  double f_a = 1.0;
  double mu = 0.0;
  double nu = 0.0;
  double lambda = 0.0;
  double bear_coeff = 0.0;

  double f_b() const { return 1.0 - f_a; }

  /// Throws UsageError unless 0 <= f_a <= 1 and coefficients are finite.
  void validate() const;

  /// f_b nu < 1: the second-difference form carries a damping term.
  bool laggard_damped() const { return f_b() * nu < 1.0; }
};

struct DiscreteState {
  Vector p_bar;    ///< mean price at step t
  Vector dp_prev;  ///< p_bar(t) - p_bar(t-1)
  /// p_bar(t-1); the two-period lag for the delayed map.
  std::optional<Vector> p_prev2;
  long t = 0;
};

enum class DelayedForm { exact, taylor };

/// dp_t = f_a mu xi(p_{t-1}) + f_b nu dp_{t-1}.
DiscreteState step_laggard(const DiscreteState& state, const DiscreteAgentSpec& spec,
                           const DemandModel& model);

/// Same map advanced through its second-difference form
///   d2p_t = f_a mu xi(p_{t-1}) - (1 - f_b nu) dp_{t-1},  dp_t = dp_{t-1} + d2p_t,
/// which is the rearranged relation f_b nu d2p_t = f_a mu xi - (1 - f_b nu) dp_t
/// solved for the new difference. Throws UsageError when f_b nu = 0.
DiscreteState step_laggard_secondorder(const DiscreteState& state, const DiscreteAgentSpec& spec,
                                       const DemandModel& model);

/// dp_t = (f_a lambda + f_b mu) xi(p_{t-1}) + (f_a nu - f_b bear_coeff) dp_{t-1}.
DiscreteState step_bullbear(const DiscreteState& state, const DiscreteAgentSpec& spec,
                            const DemandModel& model);

/// exact:  dp_t = f_a xi(p_{t-1}) + f_b xi(p_{t-2})
/// taylor: dp_t = xi(p_{t-1}) - f_b J(p_{t-1}) dp_{t-1},  J_ij = d xi_i / d p_j
/// Both read the lag from p_prev2; a missing warm-up state is a UsageError.
DiscreteState step_delayed(const DiscreteState& state, const DiscreteAgentSpec& spec,
                           const DemandModel& model, DelayedForm form);

enum class StabilityFlag { converging, diverging, oscillating, undetermined };
std::string_view to_string(StabilityFlag flag);

struct DiscreteRunOptions {
  long steps = 100;
  DelayedForm delayed_form = DelayedForm::exact;
  /// Use the second-difference form for the laggard map.
  bool laggard_second_order = false;
  /// Project p_bar back to the unit sphere after each step.
  bool renormalize = false;
};

struct DiscreteRun {
  std::vector<DiscreteState> states;  ///< initial state first
  std::optional<std::string> error;   ///< non-finite state, with step index
  StabilityFlag stability = StabilityFlag::undetermined;
};

/// Iterates the map selected by spec.kind. The stability flag compares the
/// distance to the model equilibrium over the first and last quarters of the
/// run; it is a report, not a proof.
DiscreteRun run_discrete(const DiscreteState& initial, const DiscreteAgentSpec& spec,
                         const DemandModel& model, const DiscreteRunOptions& options);

}  // namespace pricedyn
