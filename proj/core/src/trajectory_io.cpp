#include "pricedyn/trajectory_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace pricedyn {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::sphere:
      return "sphere";
    case Mode::flat:
      return "flat";
    case Mode::first_order:
      return "first_order";
  }
  return "unknown";
}

Mode mode_from_string(std::string_view name) {
  if (name == "sphere") return Mode::sphere;
  if (name == "flat") return Mode::flat;
  if (name == "first_order") return Mode::first_order;
  throw UsageError("unknown integration mode '" + std::string(name) + "'");
}

void DynamicsParams::validate(int n) const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw UsageError("dynamics: kappa must be > 0");
  if (gamma.size() != n) {
    std::ostringstream os;
    os << "dynamics: gamma needs " << n << " entries, got " << gamma.size();
    throw UsageError(os.str());
  }
  if (!gamma.allFinite() || (gamma.array() < 0.0).any()) {
    throw UsageError("dynamics: gamma entries must be finite and non-negative");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw UsageError("dynamics: dt must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw UsageError("dynamics: t_end must be > 0");
  if (sample_every < 1) throw UsageError("dynamics: sample_every must be >= 1");
}

long DynamicsParams::steps() const { return std::lround(t_end / dt); }

double DynamicsParams::scalar_gamma() const {
  if (gamma.size() == 0) throw UsageError("dynamics: gamma is empty");
  if ((gamma.array() != gamma[0]).any()) {
    throw UsageError("dynamics: this path assumes equal damping on every commodity");
  }
  return gamma[0];
}

DynamicsParams DynamicsParams::uniform(int n, double kappa, double gamma, double dt,
                                       double t_end, int sample_every) {
  DynamicsParams p;
  p.kappa = kappa;
  p.gamma = Vector::Constant(n, gamma);
  p.dt = dt;
  p.t_end = t_end;
  p.sample_every = sample_every;
  return p;
}

Vector Trajectory::price(std::size_t i) const {
  const auto& x = samples.at(i).x;
  if (mode == Mode::flat && equilibrium) return *equilibrium + x;
  return x;
}

Vector Trajectory::deviation(std::size_t i) const {
  const auto& x = samples.at(i).x;
  if (mode == Mode::flat) return x;
  if (!equilibrium) throw UsageError("trajectory: deviation needs an equilibrium price");
  return x - *equilibrium;
}

double Trajectory::spacing() const {
  if (samples.size() < 2) throw UsageError("trajectory: need at least two samples");
  return params.dt * params.sample_every;
}

std::string format_roundtrip(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int n = traj.dim();
  bool with_l = !traj.samples.empty();
  for (const auto& s : traj.samples) with_l = with_l && s.angular_momentum.has_value();

  out << 't';
  for (int i = 1; i <= n; ++i) out << ",p" << i;
  for (int i = 1; i <= n; ++i) out << ",v" << i;
  out << ",energy,kinetic,potential,dissipation_rate,injection_rate";
  if (with_l) out << ",L";
  out << '\n';

  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& s = traj.samples[k];
    const Vector p = traj.price(k);
    out << format_roundtrip(s.t);
    for (int i = 0; i < n; ++i) out << ',' << format_roundtrip(p[i]);
    for (int i = 0; i < n; ++i) out << ',' << format_roundtrip(s.v[i]);
    out << ',' << format_roundtrip(s.energy.total) << ',' << format_roundtrip(s.energy.kinetic)
        << ',' << format_roundtrip(s.energy.potential) << ','
        << format_roundtrip(s.energy.dissipation_rate) << ','
        << format_roundtrip(s.energy.injection_rate);
    if (with_l) out << ',' << format_roundtrip(*s.angular_momentum);
    out << '\n';
  }
}

void write_discrete_csv(std::ostream& out, const DiscreteRun& run, const DemandModel& model) {
  const int n = model.dim();
  const auto& eq = model.equilibrium();
  const bool with_l = n == 2 && eq.has_value();

  out << 't';
  for (int i = 1; i <= n; ++i) out << ",p" << i;
  for (int i = 1; i <= n; ++i) out << ",v" << i;
  out << ",energy,kinetic,potential,dissipation_rate,injection_rate";
  if (with_l) out << ",L";
  out << '\n';

  for (const auto& s : run.states) {
    const double kinetic = 0.5 * s.dp_prev.squaredNorm();
    const double potential = model.potential(s.p_bar);
    const double injection = s.dp_prev.dot(model.solenoidal(s.p_bar));
    out << s.t;
    for (int i = 0; i < n; ++i) out << ',' << format_roundtrip(s.p_bar[i]);
    for (int i = 0; i < n; ++i) out << ',' << format_roundtrip(s.dp_prev[i]);
    out << ',' << format_roundtrip(kinetic + potential) << ',' << format_roundtrip(kinetic) << ','
        << format_roundtrip(potential) << ",0," << format_roundtrip(injection);
    if (with_l) {
      const Vector q = s.p_bar - *eq;
      out << ',' << format_roundtrip(q[1] * s.dp_prev[0] - q[0] * s.dp_prev[1]);
    }
    out << '\n';
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(in, line)) throw UsageError("csv: empty input");
  table.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != table.header.size()) {
      throw UsageError("csv: line " + std::to_string(lineno) + " has the wrong number of cells");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc{} || res.ptr != c.data() + c.size()) {
        throw UsageError("csv: line " + std::to_string(lineno) + ": bad number '" + c + "'");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string check_trajectory_table(const CsvTable& table) {
  if (table.header.empty() || table.header.front() != "t") return "first column must be t";
  if (table.rows.size() < 2) return "fewer than two samples";
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (!(table.rows[i][0] > table.rows[i - 1][0])) {
      return "sample times not strictly increasing at row " + std::to_string(i + 1);
    }
  }
  for (const auto& row : table.rows) {
    for (double v : row) {
      if (!std::isfinite(v)) return "non-finite value";
    }
  }
  return {};
}

}  // namespace pricedyn
