#include "pricedyn/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pricedyn {

namespace {

void check_state(const DiscreteState& state, const DemandModel& model) {
  if (state.p_bar.size() != model.dim() || state.dp_prev.size() != model.dim()) {
    throw UsageError("discrete step: state dimension does not match the model");
  }
  if (state.p_prev2 && state.p_prev2->size() != model.dim()) {
    throw UsageError("discrete step: lagged price dimension does not match the model");
  }
}

DiscreteState advance(const DiscreteState& state, const Vector& dp) {
  DiscreteState next;
  next.t = state.t + 1;
  next.p_bar = state.p_bar + dp;
  next.dp_prev = dp;
  next.p_prev2 = state.p_bar;
  if (const auto bad = first_non_finite(next.p_bar); bad >= 0) {
    std::ostringstream os;
    os << "discrete map: non-finite price at step " << next.t << ", component " << bad;
    throw NumericError(os.str());
  }
  return next;
}

}  // namespace

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::laggard:
      return "laggard";
    case AgentKind::bullbear:
      return "bullbear";
    case AgentKind::delayed:
      return "delayed";
  }
  return "unknown";
}

AgentKind agent_kind_from_string(std::string_view name) {
  if (name == "laggard") return AgentKind::laggard;
  if (name == "bullbear") return AgentKind::bullbear;
  if (name == "delayed") return AgentKind::delayed;
  throw UsageError("unknown discrete agent kind '" + std::string(name) + "'");
}

std::string_view to_string(StabilityFlag flag) {
  switch (flag) {
    case StabilityFlag::converging:
      return "converging";
    case StabilityFlag::diverging:
      return "diverging";
    case StabilityFlag::oscillating:
      return "oscillating";
    case StabilityFlag::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

void DiscreteAgentSpec::validate() const {
  if (!(f_a >= 0.0 && f_a <= 1.0)) throw UsageError("discrete spec: f_a must lie in [0, 1]");
  for (double c : {mu, nu, lambda, bear_coeff}) {
    if (!std::isfinite(c)) throw UsageError("discrete spec: coefficients must be finite");
  }
}

DiscreteState step_laggard(const DiscreteState& state, const DiscreteAgentSpec& spec,
                           const DemandModel& model) {
  check_state(state, model);
  const Vector xi = eval_excess_demand(model, state.p_bar);
  return advance(state, spec.f_a * spec.mu * xi + spec.f_b() * spec.nu * state.dp_prev);
}

DiscreteState step_laggard_secondorder(const DiscreteState& state, const DiscreteAgentSpec& spec,
                                       const DemandModel& model) {
  check_state(state, model);
  const double lag = spec.f_b() * spec.nu;
  if (lag == 0.0) {
    throw UsageError("second-order laggard form is undefined when f_b * nu = 0");
  }
  const Vector xi = eval_excess_demand(model, state.p_bar);
  const Vector second_difference = spec.f_a * spec.mu * xi - (1.0 - lag) * state.dp_prev;
  return advance(state, state.dp_prev + second_difference);
}

DiscreteState step_bullbear(const DiscreteState& state, const DiscreteAgentSpec& spec,
                            const DemandModel& model) {
  check_state(state, model);
  const double f_b = spec.f_b();
  const double demand_gain = spec.f_a * spec.lambda + f_b * spec.mu;
  const double trend_gain = spec.f_a * spec.nu - f_b * spec.bear_coeff;
  const Vector xi = eval_excess_demand(model, state.p_bar);
  return advance(state, demand_gain * xi + trend_gain * state.dp_prev);
}

DiscreteState step_delayed(const DiscreteState& state, const DiscreteAgentSpec& spec,
                           const DemandModel& model, DelayedForm form) {
  check_state(state, model);
  if (!state.p_prev2) {
    throw UsageError("delayed map needs the lagged price p_prev2 (two warm-up states)");
  }
  const Vector xi = eval_excess_demand(model, state.p_bar);
  if (form == DelayedForm::exact) {
    const Vector xi_lag = eval_excess_demand(model, *state.p_prev2);
    return advance(state, spec.f_a * xi + spec.f_b() * xi_lag);
  }
  const Vector lag_step = state.p_bar - *state.p_prev2;
  return advance(state, xi - spec.f_b() * (model.jacobian(state.p_bar) * lag_step));
}

DiscreteRun run_discrete(const DiscreteState& initial, const DiscreteAgentSpec& spec,
                         const DemandModel& model, const DiscreteRunOptions& options) {
  spec.validate();
  check_state(initial, model);
  if (options.steps < 1) throw UsageError("discrete run: steps must be >= 1");
  if (spec.kind == AgentKind::delayed && !initial.p_prev2) {
    throw UsageError("delayed map needs the lagged price p_prev2 (two warm-up states)");
  }

  DiscreteRun run;
  run.states.reserve(static_cast<std::size_t>(options.steps) + 1);
  run.states.push_back(initial);
  try {
    for (long k = 0; k < options.steps; ++k) {
      const auto& cur = run.states.back();
      DiscreteState next;
      switch (spec.kind) {
        case AgentKind::laggard:
          next = options.laggard_second_order ? step_laggard_secondorder(cur, spec, model)
                                              : step_laggard(cur, spec, model);
          break;
        case AgentKind::bullbear:
          next = step_bullbear(cur, spec, model);
          break;
        case AgentKind::delayed:
          next = step_delayed(cur, spec, model, options.delayed_form);
          break;
      }
      if (options.renormalize) {
        const double norm = next.p_bar.norm();
        if (!(norm > 0.0)) throw NumericError("discrete map: zero price vector");
        next.p_bar /= norm;
        next.dp_prev = next.p_bar - cur.p_bar;
      }
      run.states.push_back(std::move(next));
    }
  } catch (const NumericError& e) {
    run.error = e.what();
    run.stability = StabilityFlag::diverging;
    return run;
  }

  const Vector ref = model.equilibrium().value_or(Vector::Zero(model.dim()));
  const std::size_t n = run.states.size();
  const std::size_t quarter = std::max<std::size_t>(1, n / 4);
  double early = 0.0;
  double late = 0.0;
  for (std::size_t i = 0; i < quarter; ++i) {
    early = std::max(early, (run.states[i].p_bar - ref).norm());
    late = std::max(late, (run.states[n - 1 - i].p_bar - ref).norm());
  }
  if (late <= 0.5 * early || late == 0.0) {
    run.stability = StabilityFlag::converging;
  } else if (late >= 2.0 * early) {
    run.stability = StabilityFlag::diverging;
  } else {
    run.stability = StabilityFlag::oscillating;
  }
  return run;
}

}  // namespace pricedyn
