#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pricedyn/discrete.hpp"
#include "pricedyn/trajectory.hpp"

namespace pricedyn {

/// Shortest decimal string that parses back to exactly `value`. Both zeros
/// print as "0".
std::string format_roundtrip(double value);

/// Writes `t,p1..pn,v1..vn,energy,kinetic,potential,dissipation_rate,injection_rate[,L]`,
/// one row per sample. The L column is present when every sample carries an
/// angular momentum.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Discrete-map runs in the same layout with an integer t column. The
/// velocity columns hold the last price change; energies use kappa = 1 and no
/// damping, so dissipation_rate is 0.
void write_discrete_csv(std::ostream& out, const DiscreteRun& run, const DemandModel& model);

/// Parsed form of a trajectory CSV.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Throws UsageError on malformed input (ragged rows, non-numeric cells).
CsvTable read_csv(std::istream& in);

/// Checks the Trajectory invariants on a parsed CSV: at least two rows and
/// strictly increasing first column. Returns an empty string when valid,
/// otherwise a description of the first violation.
std::string check_trajectory_table(const CsvTable& table);

}  // namespace pricedyn
