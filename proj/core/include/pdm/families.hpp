#pragma once

// The seven solution families of the PDM Schrodinger-Riccati equation.
//
// Every quadrature family is assembled by one engine: pick a particular Riccati
// solution u_p, force the potential from the consistency condition
// a = u_p' - b u_p + u_p^2, and obtain the general solution from the Bernoulli
// equation for v = u - u_p,
//
//     v' = (b - 2 u_p) v - v^2,   v = w / (C + W),   w = exp(int r),   W = int w,
//
// with r = b - 2 u_p. Every indefinite integral starts at x_min, so
//
//     psi = psi0 exp(int u_p) (C + W)
//
// and psi(x_min) = psi0 C. Case 2 is assembled directly and Case 3 is closed form.

#include "pdm/expr.hpp"
#include "pdm/family_spec.hpp"
#include "pdm/grid.hpp"
#include "pdm/riccati.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace pdm {

/// a forced by requiring u_p to solve the Riccati equation: a = u_p' - b u_p + u_p^2.
/// u_p' is `du_p` when given, otherwise a finite difference of u_p.
[[nodiscard]] Samples consistency_from_particular(const Samples& u_p, const Samples& b,
                                                  const std::optional<Samples>& du_p = std::nullopt);

/// The general solution produced by the Bernoulli reduction.
struct BernoulliSolution {
    Samples u;
    Samples psi;
    Samples dpsi;
    /// C + W; its zeros are the zeros of psi and the poles of u.
    Samples kernel;
    /// Grid x positions where the kernel changes sign.
    std::vector<double> poles;
};

/// u is masked where |v| h >= this value (within ~64 cells of a pole); half of it
/// at the two end points on each side.
inline constexpr double kPoleCellFraction = 1.0 / 64.0;

/// Bernoulli engine. Throws ConstructionError when exp(int r) or exp(int u_p)
/// overflows.
[[nodiscard]] BernoulliSolution solve_bernoulli(const Samples& u_p, const Samples& b, double C, double psi0 = 1.0);

/// The general Riccati solution u = u_p + w/(C + W), masked around poles.
[[nodiscard]] Samples bernoulli_general(const Samples& u_p, const Samples& b, double C);

// --- Case 1 ---------------------------------------------------------------

/// V = E + (beta hbar^2 / 2m)(beta - (ln m)').
[[nodiscard]] Samples case1_potential_from_mass(const Expr& m, double beta_c, const PhysicalSetup& setup,
                                                const Grid& grid);

/// m = e^{beta x} / (m2 + (2 / beta hbar^2) int_{x_min}^x e^{beta t}(V - E) dt).
/// Throws ConstructionError for beta = 0 or when the denominator crosses zero.
[[nodiscard]] Samples case1_mass_from_potential(const Samples& V, double beta_c, double m2,
                                                const PhysicalSetup& setup);
[[nodiscard]] Samples case1_mass_from_potential(const Expr& V, double beta_c, double m2,
                                                const PhysicalSetup& setup, const Grid& grid);

/// psi = psi0 e^{beta x} (C1 + int_{x_min}^x m e^{-2 beta t} dt).
[[nodiscard]] Samples case1_wavefunction(const Samples& m, double beta_c, double C1, double psi0);

// --- Case 2 ---------------------------------------------------------------

struct Case2Result {
    Samples V;
    Samples psi;
};

/// V = E + a0^2 hbar^2 m / 2 and psi = psi0 cosh(a0 int_{x_min}^x m + f0).
[[nodiscard]] Case2Result case2_wavefunction(const Expr& m, double a0, double f0, double psi0,
                                             const PhysicalSetup& setup, const Grid& grid);

// --- Case 3 ---------------------------------------------------------------

/// V = E + (hbar^2 / 8m)(Delta + 2 (ln m)'' - ((ln m)')^2).
[[nodiscard]] Samples case3_potential_from_mass(const Expr& m, double Delta, const PhysicalSetup& setup,
                                                const Grid& grid);

/// psi = psi0 e^{+-sqrt(Delta) x / 2} sqrt(m). Throws ConstructionError for Delta < 0.
[[nodiscard]] Samples case3_wavefunction(const Expr& m, double Delta, Branch branch, double psi0, const Grid& grid);

/// Relative residuals of the second-order mass equation
///   (2/m) m'' - 3((ln m)')^2 - (8m/hbar^2)(V - E) + Delta = 0
/// and of its M = m^{-1/2} form
///   M'' - (Delta/4) M + (2/hbar^2)(V - E)/M = 0.
struct MassOdeResidual {
    double r_m = 0.0;
    double r_M = 0.0;
};
[[nodiscard]] MassOdeResidual case3_mass_ode_residual(const Expr& m, const Samples& V, double Delta,
                                                      const PhysicalSetup& setup);

// --- Generating-function families -----------------------------------------

/// Condition (4m/hbar^2)(V - E) = (ln m)'' - ((ln m)')^2 / 2 + f/2 +- (sqrt f)'.
/// `sqrt_f` overrides the root of f (used for Case 4b, where the root is b itself).
[[nodiscard]] SolutionBundle theorem4_solve(const Expr& m, const Expr& f, Branch branch, double v0, double psi0,
                                            const PhysicalSetup& setup, const Grid& grid,
                                            const std::optional<Expr>& sqrt_f = std::nullopt);

/// Condition (2m/hbar^2)(V - E) = (1/2) d/dx[(ln m)' -+ g] + f/4, g = sqrt(f + ((ln m)')^2).
[[nodiscard]] SolutionBundle theorem5_solve(const Expr& m, const Expr& f, Branch branch, double C, double psi0,
                                            const PhysicalSetup& setup, const Grid& grid);

/// Condition (2m/hbar^2)(V - E) = f(2 (ln m)' + f)/4 - f'/2, particular solution -f/2.
[[nodiscard]] SolutionBundle theorem6_solve(const Expr& m, const Expr& f, double C, double psi0,
                                            const PhysicalSetup& setup, const Grid& grid);

/// Mass m = f e^{-F/2} / D with F = int f and D = C5 - (4/hbar^2) int (V - E) e^{-F/2},
/// so that -f/2 solves the Riccati equation for the pinned potential V.
/// Throws ConstructionError if f or D vanishes or m is not positive on the grid.
[[nodiscard]] SolutionBundle theorem7_solve(const Expr& f, const Expr& V, double C5, double C6, double psi0,
                                            const PhysicalSetup& setup, const Grid& grid);

/// Builds any family. `mass` is ignored for Theorem7, which constructs its own.
[[nodiscard]] SolutionBundle build(const FamilySpec& spec, const Expr& mass, double psi0, const PhysicalSetup& setup,
                                   const Grid& grid);

}  // namespace pdm
