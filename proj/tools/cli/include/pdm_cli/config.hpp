#pragma once

#include "pdm/expr.hpp"
#include "pdm/family_spec.hpp"
#include "pdm/grid.hpp"
#include "pdm/riccati.hpp"
#include "pdm/verify.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdm::cli {

/// Bad flags, bad grid, unparsable expressions, violated family preconditions.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { Solve, Verify, Invert, Sweep, Catalog };

/// Raw option values by flag name (without dashes), as given on the command
/// line or read from a JSON config file. Numeric flags may hold comma-separated
/// lists; only `sweep` accepts more than one value.
using RawOptions = std::map<std::string, std::string>;

/// Every value-taking flag shared by the verbs.
const std::vector<std::string>& value_flags();

struct GridSpec {
    double x_min = -4.0;
    double x_max = 4.0;
    std::size_t n = 4001;
};

/// "min:max:n", surrounding whitespace allowed. Throws ConfigError.
GridSpec parse_grid(const std::string& text);

/// Fully resolved configuration for a single run.
struct RunConfig {
    Command command = Command::Solve;
    std::string family;
    std::optional<std::string> mass;
    std::optional<std::string> potential;
    std::optional<std::string> f;
    GridSpec grid;
    PhysicalSetup setup;
    Params params;
    std::map<std::string, double> constants;
    std::optional<std::string> branch;
    double psi0 = 1.0;
    std::optional<double> tol_r, tol_s, tol_o;
    std::optional<std::string> out;
    bool json = false;
};

/// Resolves the raw options of one instance (all numeric values scalar).
RunConfig resolve(Command command, const RawOptions& raw, bool json);

/// Expands comma-separated lists into the cartesian product of scalar option sets.
std::vector<RawOptions> expand_lists(const RawOptions& raw);

/// The family spec, mass and tolerances described by a config. Checks the
/// family preconditions that need no grid (Delta >= 0, a0 != 0, ...).
struct Instance {
    FamilySpec spec;
    Expr mass;
    std::optional<Tolerances> tolerances;
};
Instance make_instance(const RunConfig& cfg);

Grid make_grid(const GridSpec& g);

/// Parses an expression and binds --param values; "@name" selects a catalog
/// entry. Throws ConfigError on syntax errors or unbound parameters.
Expr parse_bound(const std::string& text, const Params& params);

}  // namespace pdm::cli
