#include "pdm/grid.hpp"

#include "pdm/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace pdm {

Grid::Grid(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n), h_(0.0) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
        throw NumericsError("grid requires finite x_min < x_max");
    }
    if (n < 9) throw NumericsError("grid n must be at least 9");
    if (n % 2 == 0) throw NumericsError("grid n must be odd");
    h_ = (x_max - x_min) / static_cast<double>(n - 1);
}

Samples::Samples(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)), mask_(values_.size(), 1) {
    if (values_.size() != grid_.size()) throw NumericsError("sample count does not match grid size");
}

Samples::Samples(Grid grid, std::vector<double> values, std::vector<std::uint8_t> mask)
    : grid_(grid), values_(std::move(values)), mask_(std::move(mask)) {
    if (values_.size() != grid_.size() || mask_.size() != grid_.size()) {
        throw NumericsError("sample or mask count does not match grid size");
    }
}

Samples Samples::filled(const Grid& grid, double value) {
    return Samples(grid, std::vector<double>(grid.size(), value));
}

std::size_t Samples::invalid_count() const noexcept {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{0}));
}

double Samples::max_abs() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (mask_[i]) m = std::max(m, std::fabs(values_[i]));
    }
    return m;
}

Samples Samples::with_mask(std::span<const std::uint8_t> extra) const {
    std::vector<std::uint8_t> m(mask_);
    for (std::size_t i = 0; i < m.size() && i < extra.size(); ++i) m[i] = static_cast<std::uint8_t>(m[i] && extra[i]);
    return Samples(grid_, values_, std::move(m));
}

void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw NumericsError("samples live on different grids");
}

Samples operator+(const Samples& a, const Samples& b) { return zip(a, b, [](double p, double q) { return p + q; }); }
Samples operator-(const Samples& a, const Samples& b) { return zip(a, b, [](double p, double q) { return p - q; }); }
Samples operator*(const Samples& a, const Samples& b) { return zip(a, b, [](double p, double q) { return p * q; }); }
Samples operator/(const Samples& a, const Samples& b) { return zip(a, b, [](double p, double q) { return p / q; }); }
Samples operator*(double s, const Samples& a) { return map(a, [s](double p) { return s * p; }); }
Samples operator+(double s, const Samples& a) { return map(a, [s](double p) { return s + p; }); }

Samples sample(const Expr& e, const Grid& grid, const Params& params) {
    const Expr bound = bind(e, params);
    std::vector<double> v(grid.size(), 0.0);
    std::vector<std::uint8_t> m(grid.size(), 1);
    std::size_t invalid = 0;
    EvalFailure failure;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (auto r = try_eval(bound, grid.x(i), params, &failure)) {
            v[i] = *r;
        } else {
            m[i] = 0;
            ++invalid;
        }
    }
    if (10 * invalid > grid.size()) {
        throw NumericsError("expression '" + to_string(e) + "' is undefined at " + std::to_string(invalid) +
                            " of " + std::to_string(grid.size()) + " grid points (" + failure.message + " in '" +
                            failure.node + "')");
    }
    return Samples(grid, std::move(v), std::move(m));
}

namespace {

void require_all_valid(const Samples& s, const char* what) {
    if (!s.all_valid()) {
        throw NumericsError(std::string(what) + ": input has " + std::to_string(s.invalid_count()) +
                            " invalid points");
    }
}

// Integral over cell [x_i, x_i+1] from the cubic through four neighbouring samples.
double cell_integral(std::span<const double> f, std::size_t i, double h) {
    const std::size_t n = f.size();
    if (i == 0) return h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    if (i + 2 == n) return h / 24.0 * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
    return h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
}

}  // namespace

Samples cumulative_integral(const Samples& s, std::size_t base_index) {
    require_all_valid(s, "cumulative_integral");
    const std::size_t n = s.size();
    if (base_index >= n) throw NumericsError("cumulative_integral: base index out of range");
    const double h = s.grid().spacing();
    const auto f = s.values();

    // Neumaier-compensated running sums: the prefixes feed second differences
    // downstream, which amplify accumulated rounding by 1/h^2.
    std::vector<double> out(n, 0.0);
    auto run = [&](std::size_t from, std::size_t to, auto&& cell) {
        double sum = 0.0, comp = 0.0;
        for (std::size_t i = from; i != to;) {
            const std::size_t next = to > from ? i + 1 : i - 1;
            const double c = cell(i, next);
            const double t = sum + c;
            comp += std::fabs(sum) >= std::fabs(c) ? (sum - t) + c : (c - t) + sum;
            sum = t;
            out[next] = sum + comp;
            i = next;
        }
    };
    run(base_index, n - 1, [&](std::size_t i, std::size_t) { return cell_integral(f, i, h); });
    run(base_index, 0, [&](std::size_t, std::size_t next) { return -cell_integral(f, next, h); });
    return Samples(s.grid(), std::move(out));
}

double integrate(const Samples& s) {
    const Samples F = cumulative_integral(s, 0);
    return F[F.size() - 1];
}

namespace {

// Stencil weights (times 12 h^order) for a derivative evaluated at offset `at`
// within a window of consecutive points, most centred first.
struct Stencil {
    int width;
    int at;
    std::array<double, 6> w;
};

constexpr std::array<Stencil, 5> kFirst{{
    {5, 2, {1, -8, 0, 8, -1, 0}},
    {5, 1, {-3, -10, 18, -6, 1, 0}},
    {5, 3, {-1, 6, -18, 10, 3, 0}},
    {5, 0, {-25, 48, -36, 16, -3, 0}},
    {5, 4, {3, -16, 36, -48, 25, 0}},
}};

constexpr std::array<Stencil, 5> kSecond{{
    {5, 2, {-1, 16, -30, 16, -1, 0}},
    {6, 1, {10, -15, -4, 14, -6, 1}},
    {6, 4, {1, -6, 14, -4, -15, 10}},
    {6, 0, {45, -154, 214, -156, 61, -10}},
    {6, 5, {-10, 61, -156, 214, -154, 45}},
}};

}  // namespace

Samples derivative_fd(const Samples& s, int order) {
    if (order != 1 && order != 2) throw NumericsError("derivative_fd supports order 1 or 2");
    const std::size_t n = s.size();
    if (n < 9) throw NumericsError("derivative_fd: grid too small for the stencil");
    const auto& stencils = order == 1 ? kFirst : kSecond;
    const double h = s.grid().spacing();
    const double scale = 1.0 / (12.0 * (order == 1 ? h : h * h));

    std::vector<double> out(n, 0.0);
    std::vector<std::uint8_t> mask(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!s.valid(i)) continue;
        for (const Stencil& st : stencils) {
            if (static_cast<std::ptrdiff_t>(i) - st.at < 0) continue;
            const std::size_t start = i - static_cast<std::size_t>(st.at);
            if (start + static_cast<std::size_t>(st.width) > n) continue;
            bool ok = true;
            for (int k = 0; k < st.width; ++k) ok = ok && s.valid(start + static_cast<std::size_t>(k));
            if (!ok) continue;
            // weights sum to zero; differencing against s[i] keeps constants exact
            double acc = 0.0;
            for (int k = 0; k < st.width; ++k)
                acc += st.w[static_cast<std::size_t>(k)] * (s[start + static_cast<std::size_t>(k)] - s[i]);
            out[i] = acc * scale;
            mask[i] = 1;
            break;
        }
    }
    return Samples(s.grid(), std::move(out), std::move(mask));
}

namespace {

// Cubic Lagrange weights for nodes at integer offsets o0..o0+3 evaluated at t.
std::array<double, 4> lagrange_weights(int o0, double t) {
    std::array<double, 4> w{};
    for (int j = 0; j < 4; ++j) {
        double num = 1.0;
        double den = 1.0;
        for (int k = 0; k < 4; ++k) {
            if (k == j) continue;
            num *= t - static_cast<double>(o0 + k);
            den *= static_cast<double>(j - k);
        }
        w[static_cast<std::size_t>(j)] = num / den;
    }
    return w;
}

}  // namespace

OdeSolution ode_oracle(const Samples& m, const Samples& V, double energy, double hbar, double psi0,
                       double dpsi0) {
    require_same_grid(m.grid(), V.grid());
    require_all_valid(m, "ode_oracle (mass)");
    require_all_valid(V, "ode_oracle (potential)");
    if (!(hbar > 0.0)) throw NumericsError("ode_oracle: hbar must be positive");
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!(m[i] > 0.0)) throw NumericsError("ode_oracle: mass must be positive");
    }

    const Grid& grid = m.grid();
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    const Samples b = derivative_fd(map(m, [](double v) { return std::log(v); }), 1);
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = 2.0 * m[i] * (energy - V[i]) / (hbar * hbar);

    constexpr int kSub = 10;
    const double hs = h / kSub;
    // weights at fractional cell positions t = j / (2 kSub), j = 0..2 kSub,
    // for the three stencil placements (first cell, interior, last cell)
    constexpr int kPos = 2 * kSub + 1;
    std::array<std::array<std::array<double, 4>, kPos>, 3> weights{};
    const std::array<int, 3> origin{0, -1, -2};
    for (std::size_t p = 0; p < 3; ++p) {
        for (int j = 0; j < kPos; ++j) {
            weights[p][static_cast<std::size_t>(j)] = lagrange_weights(origin[p], static_cast<double>(j) / (2.0 * kSub));
        }
    }

    std::vector<double> psi(n, 0.0);
    std::vector<double> dpsi(n, 0.0);
    std::vector<std::uint8_t> mask(n, 0);
    psi[0] = psi0;
    dpsi[0] = dpsi0;
    mask[0] = 1;

    OdeSolution result{Samples(grid, psi), Samples(grid, dpsi), false, 0};
    double y = psi0;
    double p = dpsi0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t placement = i == 0 ? 0 : (i + 2 == n ? 2 : 1);
        const std::size_t start = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + origin[placement]);
        auto coeff = [&](int j) {
            const auto& w = weights[placement][static_cast<std::size_t>(j)];
            double bb = 0.0;
            double kk = 0.0;
            for (std::size_t q = 0; q < 4; ++q) {
                bb += w[q] * b[start + q];
                kk += w[q] * k[start + q];
            }
            return std::pair{bb, kk};
        };
        for (int s = 0; s < kSub; ++s) {
            const auto [b0, k0] = coeff(2 * s);
            const auto [bm, km] = coeff(2 * s + 1);
            const auto [b1, k1] = coeff(2 * s + 2);
            const double y1 = p;
            const double p1 = b0 * p - k0 * y;
            const double y2 = p + 0.5 * hs * p1;
            const double p2 = bm * (p + 0.5 * hs * p1) - km * (y + 0.5 * hs * y1);
            const double y3 = p + 0.5 * hs * p2;
            const double p3 = bm * (p + 0.5 * hs * p2) - km * (y + 0.5 * hs * y2);
            const double y4 = p + hs * p3;
            const double p4 = b1 * (p + hs * p3) - k1 * (y + hs * y3);
            y += hs / 6.0 * (y1 + 2.0 * y2 + 2.0 * y3 + y4);
            p += hs / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
        }
        if (!std::isfinite(y) || !std::isfinite(p) || std::fabs(y) > 1e300) {
            result.diverged = true;
            result.last_valid = i;
            break;
        }
        psi[i + 1] = y;
        dpsi[i + 1] = p;
        mask[i + 1] = 1;
        result.last_valid = i + 1;
    }
    result.psi = Samples(grid, psi, mask);
    result.dpsi = Samples(grid, std::move(dpsi), std::move(mask));
    return result;
}

}  // namespace pdm
