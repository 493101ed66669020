#pragma once

// Uniform grids and sampled fields, plus the quadrature, differencing and
// initial-value integration used by every construction in the library.

#include "pdm/expr.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pdm {

/// Uniform grid of `n` points on [x_min, x_max]; n odd and >= 9.
class Grid {
public:
    /// Throws NumericsError when the invariants do not hold.
    Grid(double x_min, double x_max, std::size_t n);

    [[nodiscard]] double x_min() const noexcept { return x_min_; }
    [[nodiscard]] double x_max() const noexcept { return x_max_; }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double spacing() const noexcept { return h_; }
    [[nodiscard]] double x(std::size_t i) const noexcept {
        // pin the last point exactly to x_max
        return i + 1 == n_ ? x_max_ : x_min_ + static_cast<double>(i) * h_;
    }
    [[nodiscard]] double length() const noexcept { return x_max_ - x_min_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double h_;
};

/// A real field on a grid with a per-point validity mask.
class Samples {
public:
    /// All points valid.
    Samples(Grid grid, std::vector<double> values);
    Samples(Grid grid, std::vector<double> values, std::vector<std::uint8_t> mask);

    /// Constant field.
    static Samples filled(const Grid& grid, double value);
    /// f(x_i) at every grid point.
    template <typename F>
    static Samples generate(const Grid& grid, F&& f) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.x(i));
        return Samples(grid, std::move(v));
    }

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] bool valid(std::size_t i) const noexcept { return mask_[i] != 0; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<const std::uint8_t> mask() const noexcept { return mask_; }
    [[nodiscard]] std::size_t invalid_count() const noexcept;
    [[nodiscard]] bool all_valid() const noexcept { return invalid_count() == 0; }

    /// Max |value| over valid points (0 if none).
    [[nodiscard]] double max_abs() const noexcept;

    /// Same values with extra points marked invalid (mask = this AND other).
    [[nodiscard]] Samples with_mask(std::span<const std::uint8_t> extra) const;

private:
    Grid grid_;
    std::vector<double> values_;
    std::vector<std::uint8_t> mask_;
};

/// Pointwise combination; grids must match (NumericsError otherwise), masks are AND-ed.
template <typename F>
Samples zip(const Samples& a, const Samples& b, F&& f);

/// Pointwise map; mask preserved.
template <typename F>
Samples map(const Samples& a, F&& f) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(a[i]);
    return Samples(a.grid(), std::move(v), std::vector<std::uint8_t>(a.mask().begin(), a.mask().end()));
}

Samples operator+(const Samples& a, const Samples& b);
Samples operator-(const Samples& a, const Samples& b);
Samples operator*(const Samples& a, const Samples& b);
Samples operator/(const Samples& a, const Samples& b);
Samples operator*(double s, const Samples& a);
Samples operator+(double s, const Samples& a);

void require_same_grid(const Grid& a, const Grid& b);

template <typename F>
Samples zip(const Samples& a, const Samples& b, F&& f) {
    require_same_grid(a.grid(), b.grid());
    std::vector<double> v(a.size());
    std::vector<std::uint8_t> m(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = f(a[i], b[i]);
        m[i] = static_cast<std::uint8_t>(a.valid(i) && b.valid(i));
    }
    return Samples(a.grid(), std::move(v), std::move(m));
}

/// Pointwise evaluation of `e`. Points where evaluation leaves the domain are
/// masked invalid; more than 10% invalid points throws NumericsError.
[[nodiscard]] Samples sample(const Expr& e, const Grid& grid, const Params& params = {});

/// F(x_i) = integral of s from x_base to x_i, with F(x_base) = 0 exactly.
///
/// Each cell [x_i, x_i+1] is integrated with the cubic through the four nearest
/// samples (centred in the interior, one-sided in the two end cells), so the rule
/// is exact for cubics and fourth order overall. Throws NumericsError if `s`
/// has invalid points or `base_index` is out of range.
[[nodiscard]] Samples cumulative_integral(const Samples& s, std::size_t base_index = 0);

/// Integral of `s` over the whole grid.
[[nodiscard]] double integrate(const Samples& s);

/// Fourth-order finite-difference derivative (order 1 or 2). Central five-point
/// stencils in the interior, one-sided fourth-order stencils at the edges or next
/// to masked points. Points with no valid stencil are masked.
[[nodiscard]] Samples derivative_fd(const Samples& s, int order);

/// Result of `ode_oracle`.
struct OdeSolution {
    Samples psi;
    Samples dpsi;
    bool diverged = false;
    /// Last grid index with a finite solution.
    std::size_t last_valid = 0;
};

/// Integrates psi'' - (ln m)' psi' + (2m/hbar^2)(E - V) psi = 0 from x_min with
/// psi(x_min) = psi0, psi'(x_min) = dpsi0. Classical RK4 with ten sub-steps per
/// grid cell; the coefficients between grid points come from cubic Lagrange
/// interpolation and (ln m)' from `derivative_fd`. |psi| > 1e300 stops the
/// integration and sets `diverged`; later points are masked.
[[nodiscard]] OdeSolution ode_oracle(const Samples& m, const Samples& V, double energy, double hbar,
                                     double psi0, double dpsi0);

}  // namespace pdm
