#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pricedyn/demand.hpp"
#include "pricedyn/discrete.hpp"
#include "pricedyn/trajectory.hpp"

namespace pricedyn {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitParse = 2,
  kExitValidation = 3,
  kExitNumeric = 4,
};

/// The scenario document is not valid JSON.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The scenario parses but is incomplete or inconsistent.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelDecl {
  enum class Kind { linear_two_price, matrix, composite };
  Kind kind = Kind::linear_two_price;
  LinearTwoPriceSpec two_price;  ///< linear_two_price
  Matrix m;                      ///< matrix
  Matrix potential_quadratic;    ///< composite: phi(q) = 1/2 q^T H q
  Matrix skew;                   ///< composite: A(q) = K q
  Vector p_hat;
};

struct RecurrenceDecl {
  double eps = 1e-3;
  double min_duration = 1.0;
};

/// A parsed run configuration. See README.md for the document layout.
struct Scenario {
  std::string name;
  ModelDecl model;

  bool discrete = false;
  Mode mode = Mode::flat;  ///< continuous runs
  DynamicsParams params;   ///< continuous runs
  DiscreteAgentSpec agents;          ///< discrete runs
  DiscreteRunOptions discrete_options;

  Vector x0;  ///< p (sphere, first_order, discrete) or q (flat)
  Vector v0;  ///< v, qdot or dp_prev
  std::optional<Vector> p_prev2;

  bool energy = true;
  bool angular_momentum = false;
  std::optional<RecurrenceDecl> recurrence;

  std::string trajectory_csv;  ///< empty: not written
  std::string summary_json;    ///< empty: not written

  std::string source;  ///< original document text

  /// Builds the demand model. In sphere and first-order mode p_hat is scaled
  /// to unit length first.
  DemandModel build_model() const;
};

/// Throws ParseError for malformed JSON and ValidationError for schema or
/// consistency problems.
Scenario parse_scenario(std::string_view text);
/// Reads and parses a file; an unreadable file is a ParseError.
Scenario load_scenario(const std::filesystem::path& path);

struct RunOutput {
  std::string summary_json;    ///< pretty-printed, sorted keys, trailing newline
  std::string trajectory_csv;
  bool numeric_failure = false;
  std::vector<std::string> warnings;
};

/// Runs the simulation and diagnostics. Never touches the filesystem. A
/// numeric blow-up yields numeric_failure with the partial trajectory.
/// Throws ValidationError for inconsistent settings discovered while running.
RunOutput execute(const Scenario& scenario);

/// Mode report for a linear two-price model with delta = 0 or beta = 0, as
/// pretty-printed JSON. Throws ValidationError for other models.
std::string analyze(const Scenario& scenario);

/// Runs the scenario once per grid value with `param_path` (dot separated,
/// e.g. "dynamics.gamma") overridden, and returns a CSV table with one row
/// per grid point in grid order. Throws ValidationError when the path does
/// not address a numeric field or the grid is empty.
std::string sweep(std::string_view scenario_text, std::string_view param_path,
                  std::span<const double> grid, unsigned threads = 0);

/// "1,2.5,-3" -> {1, 2.5, -3}. Throws ValidationError on bad entries.
std::vector<double> parse_grid(std::string_view text);

}  // namespace pricedyn
