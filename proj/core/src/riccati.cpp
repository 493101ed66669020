#include "pdm/riccati.hpp"

#include "pdm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pdm {

namespace {

std::string describe_point(double x, double v) {
    std::ostringstream os;
    os.precision(10);
    os << "m(" << x << ") = " << v;
    return os.str();
}

}  // namespace

MassSamples sample_mass(const Expr& m, const Grid& grid) {
    const Expr log_m = ln(m);
    const Expr b = differentiate(log_m, 1);
    const Expr db = differentiate(b, 1);

    std::vector<double> mv(grid.size());
    std::vector<double> bv(grid.size());
    std::vector<double> dbv(grid.size());
    EvalFailure failure;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        auto v = try_eval(m, x, {}, &failure);
        if (!v || !(*v > 0.0)) {
            throw ConstructionError("mass must be strictly positive on the grid; " +
                                    (v ? describe_point(x, *v) : "m(x) undefined (" + failure.message + ")") +
                                    " for m = " + to_string(m));
        }
        mv[i] = *v;
        auto bi = try_eval(b, x, {}, &failure);
        auto dbi = try_eval(db, x, {}, &failure);
        if (!bi || !dbi) {
            throw ConstructionError("derivative of ln m undefined at x = " + std::to_string(x) + " (" +
                                    failure.message + " in '" + failure.node + "')");
        }
        bv[i] = *bi;
        dbv[i] = *dbi;
    }
    return {Samples(grid, std::move(mv)), Samples(grid, std::move(bv)), Samples(grid, std::move(dbv))};
}

Samples effective_potential_Uk(const Expr& m, const OrderingParams& ord, double hbar, const Grid& grid) {
    const MassSamples ms = sample_mass(m, grid);
    const Expr dm = differentiate(m, 1);
    const Expr d2m = differentiate(m, 2);
    const double c1 = 1.0 - ord.alpha - ord.gamma;
    const double c2 = ord.alpha * ord.gamma + ord.alpha + ord.gamma - 1.0;
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        const double mi = ms.m[i];
        const double m1 = eval(dm, x);
        const double m2 = eval(d2m, x);
        out[i] = hbar * hbar / (4.0 * mi * mi * mi) * (c1 * 0.5 * mi * m2 + c2 * m1 * m1);
    }
    return Samples(grid, std::move(out));
}

bool ordering_vanishes(const OrderingParams& ord) noexcept {
    constexpr double tol = 1e-12;
    const double c1 = 1.0 - ord.alpha - ord.gamma;
    const double c2 = ord.alpha * ord.gamma + ord.alpha + ord.gamma - 1.0;
    return std::fabs(c1) <= tol && std::fabs(c2) <= tol;
}

RiccatiCoefficients riccati_coefficients(const Expr& m, const Samples& V, const PhysicalSetup& setup) {
    const MassSamples ms = sample_mass(m, V.grid());
    const double s = 2.0 / (setup.hbar * setup.hbar);
    Samples a = zip(ms.m, V, [&](double mi, double vi) { return s * mi * (vi - setup.energy); });
    return {std::move(a), ms.b};
}

Samples wavefunction_from_logderivative(const Samples& u, double psi0) {
    if (psi0 == 0.0) throw NumericsError("wavefunction_from_logderivative: psi0 must be nonzero");
    const Samples U = cumulative_integral(u, 0);
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double e = std::exp(U[i]);
        if (!std::isfinite(e) || !std::isfinite(psi0 * e)) {
            throw DivergenceError("wavefunction_from_logderivative: exponent overflow at x = " +
                                      std::to_string(u.grid().x(i)),
                                  i == 0 ? 0 : i - 1);
        }
        out[i] = psi0 * e;
    }
    return Samples(u.grid(), std::move(out));
}

Samples logderivative(const Samples& psi) {
    const double cutoff = kPoleThreshold * psi.max_abs();
    const Samples dpsi = derivative_fd(psi, 1);
    std::vector<double> out(psi.size(), 0.0);
    std::vector<std::uint8_t> mask(psi.size(), 0);
    std::size_t valid = 0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (!dpsi.valid(i) || !(std::fabs(psi[i]) > cutoff)) continue;
        out[i] = dpsi[i] / psi[i];
        mask[i] = 1;
        ++valid;
    }
    if (2 * valid < psi.size()) throw NumericsError("logderivative: fewer than half of the points are valid");
    return Samples(psi.grid(), std::move(out), std::move(mask));
}

double riccati_residual(const Samples& u, const RiccatiCoefficients& rc, const std::optional<Samples>& du) {
    require_same_grid(u.grid(), rc.a.grid());
    require_same_grid(u.grid(), rc.b.grid());
    const Samples d = du ? *du : derivative_fd(u, 1);
    require_same_grid(u.grid(), d.grid());

    double worst = 0.0;
    double a_max = 0.0;
    double u_max = 0.0;
    // With a difference derivative, skip points whose centred stencil touches a
    // masked point: one-sided stencils beside a pole mask carry a ~6x larger
    // error constant exactly where u is steepest. Grid ends keep one-sided stencils.
    auto near_mask = [&](std::size_t i) {
        if (du) return false;
        const std::size_t lo = i >= 2 ? i - 2 : 0;
        const std::size_t hi = std::min(u.size() - 1, i + 2);
        for (std::size_t k = lo; k <= hi; ++k) {
            if (!u.valid(k)) return true;
        }
        return false;
    };

    std::size_t valid = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!u.valid(i) || !d.valid(i) || !rc.a.valid(i) || !rc.b.valid(i) || near_mask(i)) continue;
        ++valid;
        const double r = d[i] - rc.a[i] - rc.b[i] * u[i] - RiccatiCoefficients::c * u[i] * u[i];
        worst = std::max(worst, std::fabs(r));
        a_max = std::max(a_max, std::fabs(rc.a[i]));
        u_max = std::max(u_max, std::fabs(u[i]));
    }
    if (valid == 0) throw NumericsError("riccati_residual: no valid points");
    return worst / std::max({1.0, a_max, u_max * u_max});
}

double schrodinger_residual(const Samples& m, const Samples& b, const Samples& V, const Samples& psi,
                            const PhysicalSetup& setup, const std::optional<WaveDerivatives>& exact) {
    require_same_grid(psi.grid(), m.grid());
    require_same_grid(psi.grid(), V.grid());
    require_same_grid(psi.grid(), b.grid());
    const Samples d1 = exact ? exact->dpsi : derivative_fd(psi, 1);
    const Samples d2 = exact ? exact->d2psi : derivative_fd(psi, 2);
    const double s = 2.0 / (setup.hbar * setup.hbar);

    double worst = 0.0;
    double kpsi_max = 0.0;
    double d2_max = 0.0;
    double psi_max = 0.0;
    std::size_t valid = 0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (!psi.valid(i) || !d1.valid(i) || !d2.valid(i) || !m.valid(i) || !V.valid(i) || !b.valid(i)) continue;
        ++valid;
        const double kpsi = s * m[i] * (setup.energy - V[i]) * psi[i];
        const double r = d2[i] - b[i] * d1[i] + kpsi;
        worst = std::max(worst, std::fabs(r));
        kpsi_max = std::max(kpsi_max, std::fabs(kpsi));
        d2_max = std::max(d2_max, std::fabs(d2[i]));
        psi_max = std::max(psi_max, std::fabs(psi[i]));
    }
    if (valid == 0) throw NumericsError("schrodinger_residual: no valid points");
    const double L = psi.grid().length();
    const double scale = kpsi_max + d2_max + psi_max / (L * L);
    if (scale == 0.0) return 0.0;
    return worst / scale;
}

double schrodinger_residual(const SolutionBundle& bundle) {
    std::optional<WaveDerivatives> exact;
    if (bundle.d2psi) exact = WaveDerivatives{bundle.dpsi, *bundle.d2psi};
    return schrodinger_residual(bundle.m, bundle.b, bundle.V, bundle.psi, bundle.setup, exact);
}

double riccati_residual(const SolutionBundle& bundle) {
    const double s = 2.0 / (bundle.setup.hbar * bundle.setup.hbar);
    const double E = bundle.setup.energy;
    RiccatiCoefficients rc{zip(bundle.m, bundle.V, [&](double mi, double vi) { return s * mi * (vi - E); }), bundle.b};
    return riccati_residual(bundle.u, rc, bundle.du);
}

}  // namespace pdm
