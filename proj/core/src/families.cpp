#include "pdm/families.hpp"

#include "pdm/errors.hpp"

#include <cmath>
#include <sstream>
#include <type_traits>

namespace pdm {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// Every point must evaluate; constructions do not tolerate holes.
Samples sample_strict(const Expr& e, const Grid& grid, const char* what) {
    std::vector<double> out(grid.size());
    EvalFailure failure;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto v = try_eval(e, grid.x(i), {}, &failure);
        if (!v) {
            throw ConstructionError(std::string(what) + " undefined at x = " + fmt(grid.x(i)) + " (" +
                                    failure.message + " in '" + failure.node + "')");
        }
        out[i] = *v;
    }
    return Samples(grid, std::move(out));
}

// Symbolic derivative samples, or nullopt if they hit a domain error anywhere
// (e.g. the kink of sqrt(b^2) where b = 0); callers then fall back to differences.
std::optional<Samples> try_sample(const Expr& e, const Grid& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto v = try_eval(e, grid.x(i), {});
        if (!v) return std::nullopt;
        out[i] = *v;
    }
    return Samples(grid, std::move(out));
}

Samples exp_checked(const Samples& s, const char* what) {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = std::exp(s[i]);
        if (!std::isfinite(out[i]) || out[i] == 0.0) {
            throw ConstructionError(std::string(what) + " leaves double range at x = " + fmt(s.grid().x(i)));
        }
    }
    return Samples(s.grid(), std::move(out));
}

Samples potential_from_a(const Samples& a, const Samples& m, const PhysicalSetup& setup) {
    const double s = 0.5 * setup.hbar * setup.hbar;
    return zip(a, m, [&](double ai, double mi) { return setup.energy + s * ai / mi; });
}

void check_setup(const PhysicalSetup& setup) {
    if (!(setup.hbar > 0.0)) throw ConstructionError("hbar must be positive");
}

Expr log_derivative_expr(const Expr& m) { return differentiate(ln(m), 1); }

double mass_at_min(const Expr& m, const Grid& grid) {
    auto v = try_eval(m, grid.x_min(), {});
    if (!v || !(*v > 0.0)) throw ConstructionError("mass must be strictly positive at x_min = " + fmt(grid.x_min()));
    return *v;
}

// Shared tail of every engine family: V from the consistency condition, the
// Bernoulli general solution, and the bundle.
struct EngineInput {
    FamilySpec family;
    MassSamples mass;
    Samples u_p;
    std::optional<Samples> du_p;
    double C = 0.0;
    double psi0 = 1.0;
};

SolutionBundle run_engine(EngineInput in, const PhysicalSetup& setup, std::vector<std::string> notes) {
    const Samples a = consistency_from_particular(in.u_p, in.mass.b, in.du_p);
    Samples V = potential_from_a(a, in.mass.m, setup);
    BernoulliSolution sol = solve_bernoulli(in.u_p, in.mass.b, in.C, in.psi0);
    for (double xp : sol.poles) notes.push_back("psi changes sign near x = " + fmt(xp) + "; u masked there");
    return SolutionBundle{std::move(in.family), std::move(in.mass.m), std::move(V), std::move(in.mass.b),
                          std::move(sol.u), std::move(sol.psi), std::move(sol.dpsi), std::nullopt,
                          std::nullopt, setup, std::move(notes)};
}

double check_psi0(double psi0) {
    if (psi0 == 0.0 || !std::isfinite(psi0)) throw ConstructionError("psi0 must be finite and nonzero");
    return psi0;
}

// Theorem 4 with an explicit root r of f. The engine constants are chosen so
// that psi = psi0 sqrt(m) e^{+-int r/2}{v0 + int e^{-+int r}} holds with
// all integrals anchored at x_min.
SolutionBundle theorem4_core(FamilySpec tag, const Expr& m, const Expr& f, const Expr& r, Branch branch,
                             double C_engine, double psi0_engine, const PhysicalSetup& setup, const Grid& grid,
                             std::vector<std::string> notes) {
    MassSamples ms = sample_mass(m, grid);
    const Samples fs = sample_strict(f, grid, "theorem4: f");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (fs[i] < 0.0) {
            throw ConstructionError("theorem4 requires f >= 0 on the grid; f(" + fmt(grid.x(i)) + ") = " + fmt(fs[i]));
        }
    }
    const double sg = sign(branch);
    const Expr b_e = log_derivative_expr(m);
    const Expr up_e = simplify(b_e / Expr(2.0) + Expr(sg / 2.0) * r);
    Samples u_p = sample_strict(up_e, grid, "theorem4: particular solution");
    std::optional<Samples> du_p = try_sample(differentiate(up_e, 1), grid);
    if (!du_p) notes.emplace_back("u_p' taken by finite differences (symbolic derivative undefined on the grid)");
    return run_engine({std::move(tag), std::move(ms), std::move(u_p), std::move(du_p), C_engine, psi0_engine}, setup,
                      std::move(notes));
}

}  // namespace

Samples consistency_from_particular(const Samples& u_p, const Samples& b, const std::optional<Samples>& du_p) {
    require_same_grid(u_p.grid(), b.grid());
    const Samples d = du_p ? *du_p : derivative_fd(u_p, 1);
    require_same_grid(u_p.grid(), d.grid());
    std::vector<double> out(u_p.size());
    std::vector<std::uint8_t> mask(u_p.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = d[i] - b[i] * u_p[i] + u_p[i] * u_p[i];
        mask[i] = static_cast<std::uint8_t>(d.valid(i) && b.valid(i) && u_p.valid(i));
    }
    return Samples(u_p.grid(), std::move(out), std::move(mask));
}

BernoulliSolution solve_bernoulli(const Samples& u_p, const Samples& b, double C, double psi0) {
    require_same_grid(u_p.grid(), b.grid());
    const Grid& grid = u_p.grid();
    const double h = grid.spacing();

    const Samples rate = zip(b, u_p, [](double bi, double ui) { return bi - 2.0 * ui; });
    const Samples w = exp_checked(cumulative_integral(rate, 0), "exp(int (b - 2 u_p))");
    const Samples W = cumulative_integral(w, 0);
    const Samples P = exp_checked(cumulative_integral(u_p, 0), "exp(int u_p)");

    const std::size_t n = grid.size();
    std::vector<double> K(n), u(n), psi(n), dpsi(n);
    std::vector<std::uint8_t> mask(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        K[i] = C + W[i];
        psi[i] = psi0 * P[i] * K[i];
        dpsi[i] = psi0 * P[i] * (u_p[i] * K[i] + w[i]);
        if (!std::isfinite(psi[i]) || !std::isfinite(dpsi[i])) {
            throw ConstructionError("wavefunction overflows at x = " + fmt(grid.x(i)));
        }
        if (K[i] == 0.0) {
            u[i] = 0.0;
            mask[i] = 0;
            continue;
        }
        const double v = w[i] / K[i];
        u[i] = u_p[i] + v;
        // The two end points only have one-sided stencils; give them twice the margin.
        const double limit = (i < 2 || i + 2 >= n) ? 0.5 * kPoleCellFraction : kPoleCellFraction;
        if (std::fabs(v) * h >= limit) mask[i] = 0;
    }

    std::vector<double> poles;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (K[i] == 0.0) {
            poles.push_back(grid.x(i));
        } else if ((K[i] < 0.0) != (K[i + 1] < 0.0) && K[i + 1] != 0.0) {
            poles.push_back(grid.x(i) - K[i] * h / (K[i + 1] - K[i]));
        }
    }
    if (K[n - 1] == 0.0) poles.push_back(grid.x(n - 1));

    return {Samples(grid, std::move(u), std::move(mask)), Samples(grid, std::move(psi)),
            Samples(grid, std::move(dpsi)), Samples(grid, std::move(K)), std::move(poles)};
}

Samples bernoulli_general(const Samples& u_p, const Samples& b, double C) {
    return solve_bernoulli(u_p, b, C, 1.0).u;
}

// --- Case 1 ---------------------------------------------------------------

Samples case1_potential_from_mass(const Expr& m, double beta_c, const PhysicalSetup& setup, const Grid& grid) {
    check_setup(setup);
    const MassSamples ms = sample_mass(m, grid);
    const double k = beta_c * setup.hbar * setup.hbar / 2.0;
    return zip(ms.m, ms.b, [&](double mi, double bi) { return setup.energy + k / mi * (beta_c - bi); });
}

Samples case1_mass_from_potential(const Samples& V, double beta_c, double m2, const PhysicalSetup& setup) {
    check_setup(setup);
    if (beta_c == 0.0) throw ConstructionError("case1 mass from potential requires beta_c != 0");
    const Grid& grid = V.grid();
    const Samples ebx = Samples::generate(grid, [&](double x) { return std::exp(beta_c * x); });
    const Samples src = zip(ebx, V, [&](double e, double v) { return e * (v - setup.energy); });
    const Samples I = cumulative_integral(src, 0);
    const double k = 2.0 / (beta_c * setup.hbar * setup.hbar);

    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = m2 + k * I[i];
        if (!(d > 0.0)) {
            std::string where = "x = " + fmt(grid.x(i));
            if (i > 0) where = "[" + fmt(grid.x(i - 1)) + ", " + fmt(grid.x(i)) + "]";
            throw ConstructionError("case1 mass denominator m2 + (2/beta hbar^2) int e^{beta x}(V - E) "
                                    "reaches zero in " + where + " (value " + fmt(d) + ")");
        }
        out[i] = ebx[i] / d;
        if (!std::isfinite(out[i])) throw ConstructionError("case1 mass overflows at x = " + fmt(grid.x(i)));
    }
    return Samples(grid, std::move(out));
}

Samples case1_mass_from_potential(const Expr& V, double beta_c, double m2, const PhysicalSetup& setup,
                                  const Grid& grid) {
    return case1_mass_from_potential(sample_strict(V, grid, "case1: V"), beta_c, m2, setup);
}

Samples case1_wavefunction(const Samples& m, double beta_c, double C1, double psi0) {
    const Grid& grid = m.grid();
    const Samples integrand = zip(m, Samples::generate(grid, [&](double x) { return std::exp(-2.0 * beta_c * x); }),
                                  [](double mi, double e) { return mi * e; });
    const Samples I = cumulative_integral(integrand, 0);
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = psi0 * std::exp(beta_c * grid.x(i)) * (C1 + I[i]);
        if (!std::isfinite(out[i])) {
            throw DivergenceError("case1 wavefunction overflows at x = " + fmt(grid.x(i)), i == 0 ? 0 : i - 1);
        }
    }
    return Samples(grid, std::move(out));
}

// --- Case 2 ---------------------------------------------------------------

Case2Result case2_wavefunction(const Expr& m, double a0, double f0, double psi0, const PhysicalSetup& setup,
                               const Grid& grid) {
    check_setup(setup);
    if (a0 == 0.0) throw ConstructionError("case2 requires a0 != 0");
    const MassSamples ms = sample_mass(m, grid);
    const double k = a0 * a0 * setup.hbar * setup.hbar / 2.0;
    Samples V = map(ms.m, [&](double mi) { return setup.energy + k * mi; });
    const Samples M = cumulative_integral(ms.m, 0);
    Samples psi = map(M, [&](double Mi) { return psi0 * std::cosh(a0 * Mi + f0); });
    return {std::move(V), std::move(psi)};
}

// --- Case 3 ---------------------------------------------------------------

Samples case3_potential_from_mass(const Expr& m, double Delta, const PhysicalSetup& setup, const Grid& grid) {
    check_setup(setup);
    const MassSamples ms = sample_mass(m, grid);
    const double k = setup.hbar * setup.hbar / 8.0;
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = setup.energy + k / ms.m[i] * (Delta + 2.0 * ms.db[i] - ms.b[i] * ms.b[i]);
    }
    return Samples(grid, std::move(out));
}

namespace {

Expr case3_psi_expr(const Expr& m, double Delta, Branch branch, double psi0) {
    if (!(Delta >= 0.0)) throw ConstructionError("case3 requires Delta >= 0 (got " + fmt(Delta) + ")");
    const double s = sign(branch) * std::sqrt(Delta);
    return simplify(Expr(psi0) * exp(Expr(s / 2.0) * Expr::variable()) * sqrt(m));
}

}  // namespace

Samples case3_wavefunction(const Expr& m, double Delta, Branch branch, double psi0, const Grid& grid) {
    const Expr e = case3_psi_expr(m, Delta, branch, psi0);
    (void)sample_mass(m, grid);
    return sample_strict(e, grid, "case3: psi");
}

MassOdeResidual case3_mass_ode_residual(const Expr& m, const Samples& V, double Delta, const PhysicalSetup& setup) {
    check_setup(setup);
    const Grid& grid = V.grid();
    const MassSamples ms = sample_mass(m, grid);
    const Samples d2m = sample_strict(differentiate(m, 2), grid, "m''");
    const Expr M = pow(m, Expr(-0.5));
    const Samples Ms = sample_strict(M, grid, "m^(-1/2)");
    const Samples d2M = sample_strict(differentiate(M, 2), grid, "M''");
    const double hb2 = setup.hbar * setup.hbar;

    double rm = 0.0, sm = 0.0, rM = 0.0, sM = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!V.valid(i)) continue;
        const double dv = V[i] - setup.energy;
        const double t1 = 2.0 * d2m[i] / ms.m[i];
        const double t2 = 3.0 * ms.b[i] * ms.b[i];
        const double t3 = 8.0 * ms.m[i] / hb2 * dv;
        rm = std::max(rm, std::fabs(t1 - t2 - t3 + Delta));
        sm = std::max({sm, std::fabs(t1), std::fabs(t2), std::fabs(t3), std::fabs(Delta)});

        const double q1 = d2M[i];
        const double q2 = Delta / 4.0 * Ms[i];
        const double q3 = 2.0 / hb2 * dv / Ms[i];
        rM = std::max(rM, std::fabs(q1 - q2 + q3));
        sM = std::max({sM, std::fabs(q1), std::fabs(q2), std::fabs(q3)});
    }
    return {sm > 0.0 ? rm / sm : 0.0, sM > 0.0 ? rM / sM : 0.0};
}

// --- Generating-function families -----------------------------------------

SolutionBundle theorem4_solve(const Expr& m, const Expr& f, Branch branch, double v0, double psi0,
                              const PhysicalSetup& setup, const Grid& grid, const std::optional<Expr>& sqrt_f) {
    check_setup(setup);
    check_psi0(psi0);
    const Expr r = sqrt_f ? simplify(*sqrt_f) : simplify(sqrt(f));
    const double m_min = mass_at_min(m, grid);
    std::vector<std::string> notes{
        "integrals anchored at x_min = " + fmt(grid.x_min()),
        "psi = psi0 sqrt(m) exp(" + std::string(branch == Branch::Plus ? "+" : "-") +
            "int r/2) (v0 + int exp(" + std::string(branch == Branch::Plus ? "-" : "+") + "int r)), r = " +
            to_string(r)};
    return theorem4_core(family::Theorem4{f, branch, v0, sqrt_f}, m, f, r, branch, v0, psi0 * std::sqrt(m_min),
                         setup, grid, std::move(notes));
}

SolutionBundle theorem5_solve(const Expr& m, const Expr& f, Branch branch, double C, double psi0,
                              const PhysicalSetup& setup, const Grid& grid) {
    check_setup(setup);
    check_psi0(psi0);
    MassSamples ms = sample_mass(m, grid);
    const Expr b_e = log_derivative_expr(m);
    const Expr radicand = simplify(f + b_e * b_e);
    const Samples rad = sample_strict(radicand, grid, "theorem5: f + b^2");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (rad[i] < 0.0) {
            throw ConstructionError("theorem5 requires f + ((ln m)')^2 >= 0 on the grid; value " + fmt(rad[i]) +
                                    " at x = " + fmt(grid.x(i)));
        }
    }
    const Expr g = simplify(sqrt(radicand));
    // Minus: u_p = (b - g)/2, Bernoulli rate +g. Plus: u_p = (b + g)/2, rate -g.
    const Expr up_e = simplify((b_e + Expr(sign(branch)) * g) / Expr(2.0));
    Samples u_p = sample_strict(up_e, grid, "theorem5: particular solution");
    std::optional<Samples> du_p = try_sample(differentiate(up_e, 1), grid);

    const double m_min = ms.m[0];
    const char* s_out = branch == Branch::Minus ? "-" : "+";
    const char* s_in = branch == Branch::Minus ? "+" : "-";
    std::vector<std::string> notes{
        "integrals anchored at x_min = " + fmt(grid.x_min()),
        std::string("psi = psi0 sqrt(m) exp(") + s_out + "int g/2) (C + int exp(" + s_in +
            "int g)), g = sqrt(f + ((ln m)')^2)"};
    if (!du_p) notes.emplace_back("u_p' taken by finite differences (symbolic derivative undefined on the grid)");
    return run_engine({family::Theorem5{f, branch, C}, std::move(ms), std::move(u_p), std::move(du_p), C,
                       psi0 * std::sqrt(m_min)},
                      setup, std::move(notes));
}

SolutionBundle theorem6_solve(const Expr& m, const Expr& f, double C, double psi0, const PhysicalSetup& setup,
                              const Grid& grid) {
    check_setup(setup);
    check_psi0(psi0);
    MassSamples ms = sample_mass(m, grid);
    const Expr up_e = simplify(-f / Expr(2.0));
    Samples u_p = sample_strict(up_e, grid, "theorem6: f");
    std::optional<Samples> du_p = try_sample(differentiate(up_e, 1), grid);
    const double m_min = ms.m[0];
    std::vector<std::string> notes{"integrals anchored at x_min = " + fmt(grid.x_min()),
                                   "psi = psi0 exp(-int f/2) (C + int m exp(int f))"};
    if (!du_p) notes.emplace_back("u_p' taken by finite differences (symbolic derivative undefined on the grid)");
    return run_engine({family::Theorem6{f, C}, std::move(ms), std::move(u_p), std::move(du_p), C / m_min,
                       psi0 * m_min},
                      setup, std::move(notes));
}

SolutionBundle theorem7_solve(const Expr& f, const Expr& V, double C5, double C6, double psi0,
                              const PhysicalSetup& setup, const Grid& grid) {
    check_setup(setup);
    check_psi0(psi0);
    const Samples fs = sample_strict(f, grid, "theorem7: f");
    const Samples dfs = sample_strict(differentiate(f, 1), grid, "theorem7: f'");
    Samples Vs = sample_strict(V, grid, "theorem7: V");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (fs[i] == 0.0 || (i > 0 && (fs[i] < 0.0) != (fs[i - 1] < 0.0))) {
            throw ConstructionError("theorem7 requires f != 0 on the grid; f vanishes near x = " + fmt(grid.x(i)));
        }
    }

    const Samples F = cumulative_integral(fs, 0);
    const Samples eF = exp_checked(-0.5 * F, "exp(-int f/2)");
    const double k = 4.0 / (setup.hbar * setup.hbar);
    const Samples src = zip(Vs, eF, [&](double v, double e) { return (v - setup.energy) * e; });
    const Samples I = cumulative_integral(src, 0);

    const std::size_t n = grid.size();
    std::vector<double> D(n), m(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        D[i] = C5 - k * I[i];
        if (D[i] == 0.0 || (i > 0 && (D[i] < 0.0) != (D[i - 1] < 0.0))) {
            const std::string where =
                i == 0 ? "at x = " + fmt(grid.x(0)) : "in [" + fmt(grid.x(i - 1)) + ", " + fmt(grid.x(i)) + "]";
            throw ConstructionError("theorem7 denominator D = C5 - (4/hbar^2) int (V - E) e^{-F/2} crosses zero " +
                                    where);
        }
        m[i] = fs[i] * eF[i] / D[i];
        if (!(m[i] > 0.0) || !std::isfinite(m[i])) {
            throw ConstructionError("theorem7 constructed mass is not positive at x = " + fmt(grid.x(i)) +
                                    " (m = " + fmt(m[i]) + "); f and D must share a sign");
        }
        b[i] = dfs[i] / fs[i] - 0.5 * fs[i] + k * (Vs[i] - setup.energy) * eF[i] / D[i];
    }

    Samples ms(grid, std::move(m));
    Samples bs(grid, std::move(b));
    const Samples u_p = -0.5 * fs;
    BernoulliSolution sol = solve_bernoulli(u_p, bs, C6, psi0);

    std::vector<std::string> notes{
        "integrals anchored at x_min = " + fmt(grid.x_min()),
        "m = f exp(-F/2) / D, F = int f, D = C5 - (4/hbar^2) int (V - E) exp(-F/2)",
        "psi = psi0 exp(-F/2) (C6 + int exp(int (b + f)))"};
    for (double xp : sol.poles) notes.push_back("psi changes sign near x = " + fmt(xp) + "; u masked there");
    return SolutionBundle{family::Theorem7{f, V, C5, C6},
                          std::move(ms),
                          std::move(Vs),
                          std::move(bs),
                          std::move(sol.u),
                          std::move(sol.psi),
                          std::move(sol.dpsi),
                          std::nullopt,
                          std::nullopt,
                          setup,
                          std::move(notes)};
}

// --- Dispatcher -------------------------------------------------------------

namespace {

SolutionBundle build_case1(const family::Case1& c, const Expr& m, double psi0, const PhysicalSetup& setup,
                           const Grid& grid) {
    MassSamples ms = sample_mass(m, grid);
    const double m_min = ms.m[0];
    const double xm = grid.x_min();
    const double C = c.C1 * std::exp(2.0 * c.beta_c * xm) / m_min;
    const double p0 = psi0 * m_min * std::exp(-c.beta_c * xm);
    if (!std::isfinite(C) || !std::isfinite(p0) || p0 == 0.0) {
        throw ConstructionError("case1 constants leave double range for beta_c = " + fmt(c.beta_c));
    }
    Samples u_p = Samples::filled(grid, c.beta_c);
    std::vector<std::string> notes{"integrals anchored at x_min = " + fmt(xm),
                                   "psi = psi0 exp(beta_c x) (C1 + int m exp(-2 beta_c t) dt)"};
    return run_engine({c, std::move(ms), std::move(u_p), Samples::filled(grid, 0.0), C, p0}, setup,
                      std::move(notes));
}

SolutionBundle build_case2(const family::Case2& c, const Expr& m, double psi0, const PhysicalSetup& setup,
                           const Grid& grid) {
    Case2Result r = case2_wavefunction(m, c.a0, c.f0, psi0, setup, grid);
    MassSamples ms = sample_mass(m, grid);
    const Samples M = cumulative_integral(ms.m, 0);
    Samples u = zip(ms.m, M, [&](double mi, double Mi) { return c.a0 * mi * std::tanh(c.a0 * Mi + c.f0); });
    Samples dpsi = zip(ms.m, M, [&](double mi, double Mi) { return psi0 * c.a0 * mi * std::sinh(c.a0 * Mi + c.f0); });
    std::vector<std::string> notes{"integrals anchored at x_min = " + fmt(grid.x_min()),
                                   "psi = psi0 cosh(a0 int m + f0)"};
    return SolutionBundle{c,           std::move(ms.m), std::move(r.V),  std::move(ms.b), std::move(u),
                          std::move(r.psi), std::move(dpsi), std::nullopt, std::nullopt, setup,
                          std::move(notes)};
}

SolutionBundle build_case3(const family::Case3& c, const Expr& m, double psi0, const PhysicalSetup& setup,
                           const Grid& grid) {
    const Expr psi_e = case3_psi_expr(m, c.Delta, c.branch, psi0);
    MassSamples ms = sample_mass(m, grid);
    Samples V = case3_potential_from_mass(m, c.Delta, setup, grid);
    Samples psi = sample_strict(psi_e, grid, "case3: psi");
    Samples dpsi = sample_strict(differentiate(psi_e, 1), grid, "case3: psi'");
    Samples d2psi = sample_strict(differentiate(psi_e, 2), grid, "case3: psi''");
    const double s = sign(c.branch) * std::sqrt(c.Delta);
    Samples u = map(ms.b, [&](double bi) { return 0.5 * bi + 0.5 * s; });
    Samples du = 0.5 * ms.db;
    std::vector<std::string> notes{"closed form psi = psi0 exp(" + std::string(c.branch == Branch::Plus ? "+" : "-") +
                                   "sqrt(Delta) x/2) sqrt(m); exact derivatives"};
    if (c.Delta == 0.0) notes.emplace_back("Delta = 0: both branches reduce to psi = psi0 sqrt(m) (degenerate pair)");
    return SolutionBundle{c,          std::move(ms.m), std::move(V),     std::move(ms.b),  std::move(u),
                          std::move(psi), std::move(dpsi), std::move(du), std::move(d2psi), setup,
                          std::move(notes)};
}

}  // namespace

SolutionBundle build(const FamilySpec& spec, const Expr& mass, double psi0, const PhysicalSetup& setup,
                     const Grid& grid) {
    check_setup(setup);
    check_psi0(psi0);
    return std::visit(
        [&](const auto& s) -> SolutionBundle {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, family::Case1>) {
                return build_case1(s, mass, psi0, setup, grid);
            } else if constexpr (std::is_same_v<T, family::Case2>) {
                return build_case2(s, mass, psi0, setup, grid);
            } else if constexpr (std::is_same_v<T, family::Case3>) {
                return build_case3(s, mass, psi0, setup, grid);
            } else if constexpr (std::is_same_v<T, family::Theorem4>) {
                return theorem4_solve(mass, s.f, s.branch, s.v0, psi0, setup, grid, s.sqrt_f);
            } else if constexpr (std::is_same_v<T, family::Case4a>) {
                SolutionBundle out = theorem4_solve(mass, Expr(0.0), Branch::Plus, s.v0, psi0, setup, grid);
                out.family = s;
                out.notes.emplace_back("psi = psi0 sqrt(m) (v0 + x - x_min)");
                return out;
            } else if constexpr (std::is_same_v<T, family::Case4b>) {
                // Root of f = b^2 taken as b itself; constants chosen so psi = psi0 m (v0 + int 1/m).
                const Expr b_e = log_derivative_expr(mass);
                const double m_min = mass_at_min(mass, grid);
                std::vector<std::string> notes{"integrals anchored at x_min = " + fmt(grid.x_min()),
                                               "psi = psi0 m (v0 + int 1/m)"};
                return theorem4_core(s, mass, simplify(b_e * b_e), b_e, Branch::Plus, s.v0 * m_min, psi0, setup,
                                     grid, std::move(notes));
            } else if constexpr (std::is_same_v<T, family::Theorem5>) {
                return theorem5_solve(mass, s.f, s.branch, s.C, psi0, setup, grid);
            } else if constexpr (std::is_same_v<T, family::Theorem6>) {
                return theorem6_solve(mass, s.f, s.C, psi0, setup, grid);
            } else {
                return theorem7_solve(s.f, s.V, s.C5, s.C6, psi0, setup, grid);
            }
        },
        spec);
}

std::string family_name(const FamilySpec& spec) {
    static constexpr const char* names[] = {"case1",    "case2",    "case3",    "theorem4", "case4a",
                                            "case4b",   "theorem5", "theorem6", "theorem7"};
    return names[spec.index()];
}

}  // namespace pdm
