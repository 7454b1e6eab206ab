#include "pricedyn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pricedyn/analytic.hpp"
#include "pricedyn/diagnostics.hpp"
#include "pricedyn/dynamics.hpp"
#include "pricedyn/trajectory_io.hpp"

namespace pricedyn {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw ValidationError(what); }

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) invalid(where + ": missing '" + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) invalid(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid(where + ": expected a finite number");
  return x;
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number(obj.at(key), where + "." + key);
}

bool flag_or(const json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) invalid(where + "." + key + ": expected true or false");
  return obj.at(key).get<bool>();
}

Vector vector_of(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) invalid(where + ": expected a non-empty array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = number(v[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

Matrix matrix_of(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) invalid(where + ": expected an array of rows");
  const auto rows = v.size();
  const auto cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) invalid(where + ": rows must be non-empty arrays");
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!v[r].is_array() || v[r].size() != cols) invalid(where + ": ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number(v[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return out;
}

json to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

ModelDecl parse_model(const json& m) {
  const std::string where = "model";
  if (!m.is_object()) invalid("model: expected an object");
  const auto& type = require(m, "type", where);
  if (!type.is_string()) invalid("model.type: expected a string");
  ModelDecl decl;
  decl.p_hat = vector_of(require(m, "p_hat", where), "model.p_hat");
  const auto t = type.get<std::string>();
  if (t == "linear_two_price") {
    decl.kind = ModelDecl::Kind::linear_two_price;
    if (decl.p_hat.size() != 2) invalid("model.p_hat: two-price model needs two entries");
    decl.two_price.alpha = number(require(m, "alpha", where), "model.alpha");
    decl.two_price.beta = number(require(m, "beta", where), "model.beta");
    decl.two_price.delta = number(require(m, "delta", where), "model.delta");
    decl.two_price.p_hat = decl.p_hat;
  } else if (t == "matrix") {
    decl.kind = ModelDecl::Kind::matrix;
    decl.m = matrix_of(require(m, "M", where), "model.M");
  } else if (t == "composite") {
    decl.kind = ModelDecl::Kind::composite;
    decl.potential_quadratic =
        matrix_of(require(m, "potential_quadratic", where), "model.potential_quadratic");
    decl.skew = matrix_of(require(m, "skew", where), "model.skew");
  } else {
    invalid("model.type: expected linear_two_price, matrix or composite, got '" + t + "'");
  }
  return decl;
}

DemandModel build_from(const ModelDecl& decl, const Vector& p_hat) {
  try {
    switch (decl.kind) {
      case ModelDecl::Kind::linear_two_price: {
        auto spec = decl.two_price;
        spec.p_hat = p_hat;
        return DemandModel::two_price(spec);
      }
      case ModelDecl::Kind::matrix:
        return DemandModel::linear(decl.m, p_hat);
      case ModelDecl::Kind::composite:
        return DemandModel::composite(decl.potential_quadratic, decl.skew, p_hat);
    }
  } catch (const UsageError& e) {
    invalid(std::string("model: ") + e.what());
  } catch (const NumericError& e) {
    invalid(std::string("model: ") + e.what());
  }
  invalid("model: unsupported declaration");
}

void parse_continuous(Scenario& s, const json& d, int n) {
  const std::string where = "dynamics";
  s.params.kappa = number_or(d, "kappa", 1.0, where);
  if (d.contains("gamma") && d.at("gamma").is_array()) {
    s.params.gamma = vector_of(d.at("gamma"), "dynamics.gamma");
  } else {
    s.params.gamma = Vector::Constant(n, number_or(d, "gamma", 0.0, where));
  }
  s.params.dt = number_or(d, "dt", 1e-3, where);
  s.params.t_end = number(require(d, "t_end", where), "dynamics.t_end");
  const double every = number_or(d, "sample_every", 1.0, where);
  if (every != std::floor(every) || every < 1 || every > 1e9) {
    invalid("dynamics.sample_every: expected a positive integer");
  }
  s.params.sample_every = static_cast<int>(every);
  try {
    s.params.validate(n);
  } catch (const UsageError& e) {
    invalid(e.what());
  }
  if (s.params.steps() < s.params.sample_every) {
    invalid("dynamics: t_end / dt must cover at least one sample interval");
  }
}

void parse_discrete(Scenario& s, const json& d, const std::string& kind) {
  const std::string where = "dynamics";
  try {
    s.agents.kind = agent_kind_from_string(kind);
  } catch (const UsageError& e) {
    invalid(std::string("dynamics.mode: ") + e.what());
  }
  s.agents.f_a = number_or(d, "f_a", 1.0, where);
  s.agents.mu = number_or(d, "mu", 0.0, where);
  s.agents.nu = number_or(d, "nu", 0.0, where);
  s.agents.lambda = number_or(d, "lambda", 0.0, where);
  s.agents.bear_coeff = number_or(d, "bear_coeff", 0.0, where);
  try {
    s.agents.validate();
  } catch (const UsageError& e) {
    invalid(e.what());
  }
  const double steps = number(require(d, "steps", where), "dynamics.steps");
  if (steps != std::floor(steps) || steps < 1 || steps > 1e8) {
    invalid("dynamics.steps: expected a positive integer");
  }
  s.discrete_options.steps = static_cast<long>(steps);
  if (d.contains("form")) {
    const auto& f = d.at("form");
    if (f == "exact") {
      s.discrete_options.delayed_form = DelayedForm::exact;
    } else if (f == "taylor") {
      s.discrete_options.delayed_form = DelayedForm::taylor;
    } else {
      invalid("dynamics.form: expected exact or taylor");
    }
  }
  s.discrete_options.laggard_second_order = flag_or(d, "second_order", false, where);
  s.discrete_options.renormalize = flag_or(d, "renormalize", false, where);
  if (s.discrete_options.laggard_second_order && s.agents.kind == AgentKind::laggard &&
      s.agents.f_b() * s.agents.nu == 0.0) {
    invalid("dynamics.second_order: undefined when f_b * nu = 0");
  }
}

void parse_initial(Scenario& s, const json& init, int n) {
  const std::string where = "initial";
  if (!init.is_object()) invalid("initial: expected an object");
  auto sized = [n](Vector v, const std::string& name) {
    if (v.size() != n) invalid(name + ": expected " + std::to_string(n) + " entries");
    return v;
  };
  const Vector& p_hat = s.model.p_hat;
  if (s.discrete) {
    s.x0 = sized(vector_of(require(init, "p", where), "initial.p"), "initial.p");
    s.v0 = init.contains("dp_prev") ? sized(vector_of(init.at("dp_prev"), "initial.dp_prev"),
                                            "initial.dp_prev")
                                    : Vector::Zero(n);
    if (init.contains("p_prev2")) {
      s.p_prev2 = sized(vector_of(init.at("p_prev2"), "initial.p_prev2"), "initial.p_prev2");
    }
    if (s.agents.kind == AgentKind::delayed && !s.p_prev2) {
      invalid("initial.p_prev2: the delayed map needs a lagged price");
    }
    return;
  }
  if (s.mode == Mode::flat) {
    if (init.contains("q")) {
      s.x0 = sized(vector_of(init.at("q"), "initial.q"), "initial.q");
    } else if (init.contains("p")) {
      s.x0 = sized(vector_of(init.at("p"), "initial.p"), "initial.p") - p_hat;
    } else {
      invalid("initial: flat mode needs 'q' or 'p'");
    }
    const char* vkey = init.contains("qdot") ? "qdot" : "v";
    s.v0 = init.contains(vkey) ? sized(vector_of(init.at(vkey), std::string("initial.") + vkey),
                                       std::string("initial.") + vkey)
                               : Vector::Zero(n);
    return;
  }
  s.x0 = sized(vector_of(require(init, "p", where), "initial.p"), "initial.p");
  if (!(s.x0.norm() > 0.0)) invalid("initial.p: price vector must be nonzero");
  s.v0 = init.contains("v") ? sized(vector_of(init.at("v"), "initial.v"), "initial.v")
                            : Vector::Zero(n);
}

json params_json(const Scenario& s) {
  json p = json::object();
  if (s.discrete) {
    p["kind"] = std::string(to_string(s.agents.kind));
    p["f_a"] = s.agents.f_a;
    p["f_b"] = s.agents.f_b();
    p["mu"] = s.agents.mu;
    p["nu"] = s.agents.nu;
    p["lambda"] = s.agents.lambda;
    p["bear_coeff"] = s.agents.bear_coeff;
    p["steps"] = s.discrete_options.steps;
    p["form"] = s.discrete_options.delayed_form == DelayedForm::exact ? "exact" : "taylor";
    p["second_order"] = s.discrete_options.laggard_second_order;
    p["renormalize"] = s.discrete_options.renormalize;
    return p;
  }
  p["kappa"] = s.params.kappa;
  p["gamma"] = to_json(s.params.gamma);
  p["dt"] = s.params.dt;
  p["t_end"] = s.params.t_end;
  p["sample_every"] = s.params.sample_every;
  return p;
}

std::string mode_name(const Scenario& s) {
  if (s.discrete) return "discrete:" + std::string(to_string(s.agents.kind));
  return std::string(to_string(s.mode));
}

// Antisymmetric cross-price coefficient of a 2-D linear model.
std::optional<double> linear_delta(const DemandModel& model) {
  if (model.dim() != 2 || !model.linear_parts()) return std::nullopt;
  return model.linear_parts()->skew_matrix(0, 1);
}

json loop_json(const LoopRecord& l) {
  return json{{"t_start", l.t_start},
              {"t_end", l.t_end},
              {"refined_period", l.refined_period},
              {"closure_gap", l.closure_gap},
              {"circulation_A", l.circulation_A},
              {"circulation_damping", l.circulation_damping}};
}

RunOutput execute_continuous(const Scenario& s, const DemandModel& model) {
  Trajectory traj;
  try {
    switch (s.mode) {
      case Mode::sphere:
        traj = integrate_sphere(SphereState{s.x0, s.v0, 0.0}, model, s.params);
        break;
      case Mode::flat:
        traj = integrate_flat(FlatState{s.x0, s.v0, 0.0}, model, s.params);
        break;
      case Mode::first_order:
        traj = integrate_first_order(s.x0, model, s.params);
        break;
    }
  } catch (const UsageError& e) {
    invalid(e.what());
  }

  RunOutput out;
  out.numeric_failure = !traj.ok();
  out.warnings = traj.warnings;
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  out.trajectory_csv = csv.str();

  json summary;
  summary["name"] = s.name;
  summary["mode"] = mode_name(s);
  summary["model"] = traj.model_label;
  summary["params"] = params_json(s);
  summary["status"] = traj.ok() ? "ok" : "numeric_error";
  summary["error"] = traj.error ? json(*traj.error) : json(nullptr);
  summary["samples"] = traj.samples.size();
  summary["positivity_violations"] = traj.positivity_violations;

  if (!traj.samples.empty()) {
    const auto last = traj.samples.size() - 1;
    const auto& end = traj.samples.back();
    summary["terminal_state"] = json{{"t", end.t},
                                     {"x", to_json(end.x)},
                                     {"p", to_json(traj.price(last))},
                                     {"v", to_json(end.v)}};
  } else {
    summary["terminal_state"] = nullptr;
  }

  const bool enough = traj.samples.size() >= 3;
  if (s.energy && !traj.samples.empty()) {
    json e;
    e["initial"] = traj.samples.front().energy.total;
    e["final"] = traj.samples.back().energy.total;
    if (enough && s.mode != Mode::first_order) {
      const auto r = energy_balance_residual(traj);
      e["max_residual"] = r.max_abs;
      e["rms_residual"] = r.rms;
    } else {
      e["max_residual"] = nullptr;
      e["rms_residual"] = nullptr;
    }
    summary["energy"] = e;
  } else {
    summary["energy"] = nullptr;
  }

  summary["angular_momentum"] = nullptr;
  if (s.angular_momentum) {
    const auto delta = linear_delta(model);
    if (!delta) invalid("diagnostics.angular_momentum: needs a two-commodity linear model");
    if (s.mode == Mode::first_order) {
      invalid("diagnostics.angular_momentum: not defined for first-order runs");
    }
    const Matrix& sym = model.linear_parts()->symmetric_matrix;
    if (sym(0, 1) != 0.0 || sym(0, 0) != sym(1, 1)) {
      out.warnings.push_back(
          "angular-momentum law assumes no symmetric cross-price term (beta = 0)");
    }
    if (enough) {
      LinearTwoPriceSpec spec;
      spec.delta = *delta;
      try {
        const auto report = angular_momentum_residual(traj, spec);
        summary["angular_momentum"] = json{{"max_residual", report.residual.max_abs},
                                           {"rms_residual", report.residual.rms},
                                           {"terminal_ratio", report.terminal_ratio}};
      } catch (const UsageError& e) {
        invalid(std::string("diagnostics.angular_momentum: ") + e.what());
      }
    }
  }

  summary["loops"] = json::array();
  if (s.recurrence && enough) {
    try {
      for (const auto& l :
           detect_recurrence(traj, model, s.recurrence->eps, s.recurrence->min_duration)) {
        summary["loops"].push_back(loop_json(l));
      }
    } catch (const UsageError& e) {
      invalid(std::string("diagnostics.recurrence: ") + e.what());
    }
  }

  summary["warnings"] = out.warnings;
  out.summary_json = summary.dump(2) + "\n";
  return out;
}

RunOutput execute_discrete(const Scenario& s, const DemandModel& model) {
  DiscreteState init;
  init.p_bar = s.x0;
  init.dp_prev = s.v0;
  init.p_prev2 = s.p_prev2;
  DiscreteRun run;
  try {
    run = run_discrete(init, s.agents, model, s.discrete_options);
  } catch (const UsageError& e) {
    invalid(e.what());
  }

  RunOutput out;
  out.numeric_failure = run.error.has_value();
  std::ostringstream csv;
  write_discrete_csv(csv, run, model);
  out.trajectory_csv = csv.str();

  const auto& end = run.states.back();
  json summary;
  summary["name"] = s.name;
  summary["mode"] = mode_name(s);
  summary["model"] = model.label();
  summary["params"] = params_json(s);
  summary["status"] = run.error ? "numeric_error" : "ok";
  summary["error"] = run.error ? json(*run.error) : json(nullptr);
  summary["warnings"] = json::array();
  summary["samples"] = run.states.size();
  long violations = 0;
  for (const auto& st : run.states) violations += (st.p_bar.array() <= 0.0).any() ? 1 : 0;
  summary["positivity_violations"] = violations;
  summary["terminal_state"] =
      json{{"t", end.t}, {"x", to_json(end.p_bar)}, {"p", to_json(end.p_bar)},
           {"v", to_json(end.dp_prev)}};
  summary["stability"] = std::string(to_string(run.stability));
  summary["laggard_damped"] = s.agents.laggard_damped();
  if (s.energy) {
    auto total = [&](const DiscreteState& st) {
      return 0.5 * st.dp_prev.squaredNorm() + model.potential(st.p_bar);
    };
    summary["energy"] = json{{"initial", total(run.states.front())},
                             {"final", total(end)},
                             {"max_residual", nullptr},
                             {"rms_residual", nullptr}};
  } else {
    summary["energy"] = nullptr;
  }
  summary["angular_momentum"] = nullptr;
  summary["loops"] = json::array();
  out.summary_json = summary.dump(2) + "\n";
  return out;
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
}

Scenario parse_scenario_json(const json& doc, std::string_view text) {
  if (!doc.is_object()) invalid("scenario: top level must be an object");
  Scenario s;
  s.source = std::string(text);
  s.name = doc.contains("name") && doc.at("name").is_string() ? doc.at("name").get<std::string>()
                                                               : std::string("scenario");
  s.model = parse_model(require(doc, "model", "scenario"));
  const int n = static_cast<int>(s.model.p_hat.size());

  const auto& d = require(doc, "dynamics", "scenario");
  if (!d.is_object()) invalid("dynamics: expected an object");
  const auto& mode = require(d, "mode", "dynamics");
  if (!mode.is_string()) invalid("dynamics.mode: expected a string");
  const auto mode_str = mode.get<std::string>();
  if (mode_str.rfind("discrete:", 0) == 0) {
    s.discrete = true;
    parse_discrete(s, d, mode_str.substr(9));
  } else {
    try {
      s.mode = mode_from_string(mode_str);
    } catch (const UsageError& e) {
      invalid(std::string("dynamics.mode: ") + e.what());
    }
    parse_continuous(s, d, n);
    if (s.model.kind == ModelDecl::Kind::linear_two_price && s.mode == Mode::flat &&
        (s.params.gamma.array() != s.params.gamma[0]).any()) {
      invalid("dynamics.gamma: the two-price flat model assumes equal damping");
    }
  }

  parse_initial(s, require(doc, "initial", "scenario"), n);

  if (doc.contains("diagnostics")) {
    const auto& g = doc.at("diagnostics");
    if (!g.is_object()) invalid("diagnostics: expected an object");
    s.energy = flag_or(g, "energy", true, "diagnostics");
    s.angular_momentum = flag_or(g, "angular_momentum", false, "diagnostics");
    if (g.contains("recurrence") && !g.at("recurrence").is_null()) {
      const auto& r = g.at("recurrence");
      if (!r.is_object()) invalid("diagnostics.recurrence: expected an object");
      RecurrenceDecl rec;
      rec.eps = number(require(r, "eps", "diagnostics.recurrence"), "diagnostics.recurrence.eps");
      rec.min_duration = number(require(r, "min_duration", "diagnostics.recurrence"),
                                "diagnostics.recurrence.min_duration");
      if (!(rec.eps > 0.0)) invalid("diagnostics.recurrence.eps: must be positive");
      s.recurrence = rec;
    }
  }
  if (s.discrete && (s.angular_momentum || s.recurrence)) {
    invalid("diagnostics: angular momentum and recurrence apply to continuous runs only");
  }

  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    if (!o.is_object()) invalid("output: expected an object");
    auto path = [&](const char* key) -> std::string {
      if (!o.contains(key) || o.at(key).is_null()) return {};
      if (!o.at(key).is_string() || o.at(key).get<std::string>().empty()) {
        invalid(std::string("output.") + key + ": expected a non-empty path");
      }
      return o.at(key).get<std::string>();
    };
    s.trajectory_csv = path("trajectory_csv");
    s.summary_json = path("summary_json");
    if (!s.trajectory_csv.empty() && s.trajectory_csv == s.summary_json) {
      invalid("output: trajectory_csv and summary_json must be different files");
    }
  }

  // Surface model errors (asymmetric potential, bad coefficients) at validation time.
  (void)s.build_model();
  return s;
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_integer() || v.is_number_unsigned()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_roundtrip(v.get<double>());
  if (v.is_string()) {
    auto text = v.get<std::string>();
    std::replace(text.begin(), text.end(), ',', ';');
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
  }
  return v.dump();
}

std::string sweep_row(std::size_t index, double value, std::string_view path,
                      const json& base) {
  json doc = base;
  std::string status = "ok";
  std::string error;
  json summary;
  try {
    doc.at(json::json_pointer(std::string(path))) = value;
    const auto scenario = parse_scenario_json(doc, doc.dump());
    const auto out = execute(scenario);
    summary = json::parse(out.summary_json);
    status = summary.at("status").get<std::string>();
    if (!summary.at("error").is_null()) error = summary.at("error").get<std::string>();
  } catch (const ValidationError& e) {
    status = "invalid";
    error = e.what();
  } catch (const std::exception& e) {
    status = "failed";
    error = e.what();
  }

  auto field = [&](const char* group, const char* key) -> json {
    if (!summary.is_object() || !summary.contains(group) || summary.at(group).is_null()) {
      return nullptr;
    }
    return summary.at(group).value(key, json(nullptr));
  };
  std::ostringstream row;
  row << index << ',' << format_roundtrip(value) << ',' << status << ','
      << csv_cell(field("energy", "initial")) << ',' << csv_cell(field("energy", "final")) << ','
      << csv_cell(field("energy", "max_residual")) << ','
      << csv_cell(field("angular_momentum", "terminal_ratio")) << ','
      << csv_cell(field("angular_momentum", "max_residual")) << ','
      << (summary.is_object() ? std::to_string(summary.at("loops").size()) : std::string()) << ','
      << csv_cell(json(error)) << '\n';
  return row.str();
}

}  // namespace

DemandModel Scenario::build_model() const {
  Vector p_hat = model.p_hat;
  if (!discrete && (mode == Mode::sphere || mode == Mode::first_order)) {
    const double norm = p_hat.norm();
    if (!(norm > 0.0)) invalid("model.p_hat: sphere runs need a nonzero equilibrium");
    p_hat /= norm;
  }
  return build_from(model, p_hat);
}

Scenario parse_scenario(std::string_view text) {
  const json doc = parse_document(text);
  return parse_scenario_json(doc, text);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

RunOutput execute(const Scenario& scenario) {
  const DemandModel model = scenario.build_model();
  return scenario.discrete ? execute_discrete(scenario, model)
                           : execute_continuous(scenario, model);
}

std::string analyze(const Scenario& scenario) {
  if (scenario.model.kind != ModelDecl::Kind::linear_two_price) {
    invalid("analyze: needs a linear_two_price model");
  }
  if (scenario.discrete) invalid("analyze: needs a continuous-time scenario");
  const auto& spec = scenario.model.two_price;
  double gamma = 0.0;
  try {
    gamma = scenario.params.scalar_gamma();
  } catch (const UsageError& e) {
    invalid(std::string("analyze: ") + e.what());
  }
  ModeSet set;
  try {
    if (spec.delta == 0.0) {
      set = conservative_modes(spec, scenario.params.kappa, gamma);
    } else if (spec.beta == 0.0) {
      set = rotational_modes(spec, scenario.params.kappa, gamma);
    } else {
      invalid("analyze: closed-form modes need delta = 0 or beta = 0");
    }
  } catch (const UsageError& e) {
    invalid(std::string("analyze: ") + e.what());
  }

  json report;
  report["name"] = scenario.name;
  report["family"] = set.family;
  report["basis"] = set.basis_labels;
  report["kappa"] = scenario.params.kappa;
  report["gamma"] = gamma;
  report["alpha"] = spec.alpha;
  report["beta"] = spec.beta;
  report["delta"] = spec.delta;
  json modes = json::array();
  for (const auto& m : set.modes) {
    modes.push_back(json{{"label", m.label}, {"re", m.rate.real()}, {"im", m.rate.imag()}});
  }
  report["modes"] = modes;
  report["stable"] = set.decays();
  report["verdict"] = set.decays() ? "decays" : (set.grows() ? "unstable" : "marginal");
  report["spiral"] = set.spirals();
  report["dominant"] = set.dominant ? json(set.modes[*set.dominant].label) : json(nullptr);
  report["asymptotic_ratio"] = set.asymptotic_ratio ? json(*set.asymptotic_ratio) : json(nullptr);
  return report.dump(2) + "\n";
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> grid;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) invalid("grid: empty entry");
    item = item.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      invalid("grid: bad number '" + item + "'");
    }
    if (used != item.size() || !std::isfinite(v)) invalid("grid: bad number '" + item + "'");
    grid.push_back(v);
  }
  if (grid.empty()) invalid("grid: no values");
  return grid;
}

std::string sweep(std::string_view scenario_text, std::string_view param_path,
                  std::span<const double> grid, unsigned threads) {
  const json base = parse_document(scenario_text);
  (void)parse_scenario_json(base, scenario_text);
  if (grid.empty()) invalid("sweep: grid is empty");
  if (param_path.empty()) invalid("sweep: empty parameter path");

  std::string pointer;
  std::istringstream parts{std::string(param_path)};
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (part.empty()) invalid("sweep: malformed parameter path '" + std::string(param_path) + "'");
    pointer += "/" + part;
  }
  try {
    const auto& target = base.at(json::json_pointer(pointer));
    if (!target.is_number()) {
      invalid("sweep: '" + std::string(param_path) + "' is not a scalar numeric field");
    }
  } catch (const json::exception&) {
    invalid("sweep: unknown parameter '" + std::string(param_path) + "'");
  }

  std::vector<std::string> rows(grid.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < threads; ++w) {
    workers.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < grid.size(); i += threads) {
        rows[i] = sweep_row(i, grid[i], pointer, base);
      }
    }));
  }
  for (auto& f : workers) f.get();

  std::ostringstream out;
  out << "index,value,status,energy_initial,energy_final,energy_max_residual,"
         "terminal_ratio,angular_momentum_max_residual,loops,error\n";
  for (const auto& r : rows) out << r;
  return out.str();
}

}  // namespace pricedyn
