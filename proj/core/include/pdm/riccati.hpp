#pragma once

// The position-dependent-mass Schrodinger equation
//
//     psi'' - (ln m)' psi' + (2m / hbar^2)(E - V) psi = 0
//
// and its Riccati form for the log-derivative u = psi'/psi,
//
//     u' = a + b u - u^2,   a = 2m(V - E)/hbar^2,   b = (ln m)',
//
// together with the von Roos ordering potential and the residual functionals
// every construction is judged by.

#include "pdm/expr.hpp"
#include "pdm/family_spec.hpp"
#include "pdm/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdm {

struct PhysicalSetup {
    double hbar = 1.0;
    double energy = 0.0;
};

/// von Roos ambiguity parameters; the middle exponent is fixed by alpha + beta + gamma = -1.
struct OrderingParams {
    double alpha = 0.0;
    double gamma = 0.0;

    [[nodiscard]] double beta_vr() const noexcept { return -1.0 - alpha - gamma; }
};

/// Coefficients of u' = a + b u + c u^2 on a grid. c is always -1.
struct RiccatiCoefficients {
    Samples a;
    Samples b;
    static constexpr double c = -1.0;
};

/// m, (ln m)' and (ln m)'' sampled from symbolic derivatives.
struct MassSamples {
    Samples m;
    Samples b;
    Samples db;
};

/// Samples a mass profile and its log-derivatives. Throws ConstructionError if m
/// is not strictly positive and finite at every grid point.
[[nodiscard]] MassSamples sample_mass(const Expr& m, const Grid& grid);

/// An assembled solution: mass, potential and wavefunction on one grid.
///
/// `u` is masked in the neighbourhood of zeros of psi. `dpsi` is the derivative
/// delivered by the construction itself (used to seed the initial-value oracle).
/// `du` and `d2psi` are present only for closed-form families, whose residuals
/// are then taken with exact derivatives instead of finite differences.
struct SolutionBundle {
    FamilySpec family;
    Samples m;
    Samples V;
    Samples b;
    Samples u;
    Samples psi;
    Samples dpsi;
    std::optional<Samples> du;
    std::optional<Samples> d2psi;
    PhysicalSetup setup;
    /// Human-readable conventions (anchors, constant normalisation).
    std::vector<std::string> notes;
};

/// U_k = (hbar^2 / 4 m^3) [ (1 - alpha - gamma)(m/2) m'' + (alpha gamma + alpha + gamma - 1)(m')^2 ].
[[nodiscard]] Samples effective_potential_Uk(const Expr& m, const OrderingParams& ord, double hbar,
                                             const Grid& grid);

/// True iff both bracket coefficients of U_k vanish (|.| <= 1e-12).
[[nodiscard]] bool ordering_vanishes(const OrderingParams& ord) noexcept;

/// a = 2m(V - E)/hbar^2 and b = (ln m)' (symbolic) on the grid of V.
[[nodiscard]] RiccatiCoefficients riccati_coefficients(const Expr& m, const Samples& V, const PhysicalSetup& setup);

/// psi = psi0 exp(int_{x_min}^x u). Throws DivergenceError when the exponent overflows.
[[nodiscard]] Samples wavefunction_from_logderivative(const Samples& u, double psi0);

/// |psi| below this fraction of max|psi| is treated as a zero of psi.
inline constexpr double kPoleThreshold = 1e-8;

/// u = psi'/psi with psi' from `derivative_fd`; near-zeros of psi are masked.
/// Throws NumericsError if fewer than half of the points stay valid.
[[nodiscard]] Samples logderivative(const Samples& psi);

/// max |u' - a - b u + u^2| / max(1, max|a|, max|u|^2) over valid points.
/// u' is `du` when given, otherwise the finite-difference derivative of u, and
/// then points within two cells of a masked point are left out.
/// Throws NumericsError if no point is valid.
[[nodiscard]] double riccati_residual(const Samples& u, const RiccatiCoefficients& rc,
                                      const std::optional<Samples>& du = std::nullopt);

/// Derivatives of psi to feed `schrodinger_residual`.
struct WaveDerivatives {
    Samples dpsi;
    Samples d2psi;
};

/// max |psi'' - b psi' + k psi| / (max|k psi| + max|psi''| + max|psi| / L^2) over
/// valid points, with k = 2m(E - V)/hbar^2 and L the grid length. The last
/// denominator term keeps the ratio meaningful when both others vanish (V = E,
/// linear psi). Derivatives are finite differences unless `exact` is given.
[[nodiscard]] double schrodinger_residual(const Samples& m, const Samples& b, const Samples& V, const Samples& psi,
                                          const PhysicalSetup& setup,
                                          const std::optional<WaveDerivatives>& exact = std::nullopt);

/// Residual of the bundle's psi; uses the bundle's exact derivatives when present.
[[nodiscard]] double schrodinger_residual(const SolutionBundle& bundle);

/// Riccati residual of the bundle's u against its own (m, V).
[[nodiscard]] double riccati_residual(const SolutionBundle& bundle);

}  // namespace pdm
