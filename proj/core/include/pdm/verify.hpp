#pragma once

// End-to-end checks of an assembled solution: both residuals, an independent
// RK4 integration seeded only with the initial data, the verbatim evaluation of
// printed wavefunction formulas, and the energy-dependent norm.

#include "pdm/expr.hpp"
#include "pdm/family_spec.hpp"
#include "pdm/grid.hpp"
#include "pdm/riccati.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdm {

struct Tolerances {
    double riccati = 1e-6;
    double schrodinger = 1e-5;
    double oracle = 1e-5;
};

/// (1e-6, 1e-5, 1e-5); Case 3 tightens to (1e-10, 1e-9, 1e-5).
[[nodiscard]] Tolerances default_tolerances(const FamilySpec& spec);

/// Runs are invalid once this fraction of u is masked.
inline constexpr double kMaxMaskedFraction = 0.05;

struct VerificationReport {
    std::string family;
    double riccati_residual = 0.0;
    double schrodinger_residual = 0.0;
    double oracle_max_rel_dev = 0.0;
    double masked_fraction = 0.0;
    /// Residual of the printed wavefunction (Theorems 5 to 7 only).
    std::optional<double> printed_formula_residual;
    bool oracle_diverged = false;
    bool pass = false;
    Tolerances tolerances;
    std::vector<std::string> notes;
    /// Set when the bundle could not be built (sweep rows only).
    std::optional<std::string> error;
};

/// Residuals plus the oracle comparison. The oracle starts from (psi, psi') at
/// x_min as delivered by the bundle and shares nothing else with it.
[[nodiscard]] VerificationReport verify_bundle(const SolutionBundle& bundle, const Tolerances& tol);

/// Evaluates the printed wavefunction of Theorem 5, 6 or 7 verbatim (integrals
/// anchored at x_min) against the printed condition and returns its
/// Schrodinger residual. A large value is data, not an error.
/// Throws std::invalid_argument for other families.
[[nodiscard]] double printed_formula_crosscheck(const FamilySpec& spec, const Expr& m, const PhysicalSetup& setup,
                                                const Grid& grid, double psi0 = 1.0);

[[nodiscard]] bool has_printed_formula(const FamilySpec& spec) noexcept;

/// build + verify_bundle, adding the printed-formula residual where one exists.
[[nodiscard]] VerificationReport verify(const FamilySpec& spec, const Expr& m, double psi0, const PhysicalSetup& setup,
                                        const Grid& grid, const std::optional<Tolerances>& tol = std::nullopt);

struct EnergyNorm {
    /// N = int psi^2 (1 - dV/dE) dx.
    double value = 0.0;
    /// int psi^2 dx, the scale N is compared against.
    double psi_squared = 0.0;
};

/// dV/dE by a central difference over rebuilt potentials at E +- deltaE;
/// deltaE <= 0 selects 1e-4 max(1, |E|).
[[nodiscard]] EnergyNorm energy_dependent_norm(const FamilySpec& spec, const Expr& m, const PhysicalSetup& setup,
                                               const Grid& grid, double deltaE = 0.0, double psi0 = 1.0);

/// One row of a sweep.
struct SweepCase {
    FamilySpec spec;
    Expr mass;
    PhysicalSetup setup;
    double psi0 = 1.0;
    /// Free-form label carried into the report notes.
    std::string label;
};

/// Verifies every case, concurrently on up to `threads` workers (0 picks the
/// hardware concurrency). Results keep the input order; a case that fails to
/// build yields a failing report with `error` set instead of aborting.
[[nodiscard]] std::vector<VerificationReport> sweep(const std::vector<SweepCase>& cases, const Grid& grid,
                                                    const std::optional<Tolerances>& tol = std::nullopt,
                                                    unsigned threads = 0);

}  // namespace pdm
