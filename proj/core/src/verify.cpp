#include "pdm/verify.hpp"

#include "pdm/errors.hpp"
#include "pdm/families.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <type_traits>

namespace pdm {

namespace {

Samples sample_or_throw(const Expr& e, const Grid& grid, const char* what) {
    std::vector<double> out(grid.size());
    EvalFailure failure;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto v = try_eval(e, grid.x(i), {}, &failure);
        if (!v) throw ConstructionError(std::string(what) + ": " + failure.message + " in '" + failure.node + "'");
        out[i] = *v;
    }
    return Samples(grid, std::move(out));
}

Samples exp_of(const Samples& s) {
    return map(s, [](double v) { return std::exp(v); });
}

Samples potential_from_a(const Samples& a, const Samples& m, const PhysicalSetup& setup) {
    const double k = 0.5 * setup.hbar * setup.hbar;
    return zip(a, m, [&](double ai, double mi) { return setup.energy + k * ai / mi; });
}

// psi0 sqrt(m) [C + int e^{-int g}] e^{-+ int g}; the inner sign does not follow the branch.
double printed_theorem5(const family::Theorem5& t, const Expr& m, const PhysicalSetup& setup, const Grid& grid,
                        double psi0) {
    const MassSamples ms = sample_mass(m, grid);
    const Expr b_e = differentiate(ln(m), 1);
    const Expr g_e = simplify(sqrt(t.f + b_e * b_e));
    const Samples g = sample_or_throw(g_e, grid, "theorem5: g");
    // Same condition as the engine: (2m/hbar^2)(V - E) = (1/2)(b -+ g)' + f/4.
    const Expr a_e = simplify(differentiate((b_e + Expr(sign(t.branch)) * g_e) / Expr(2.0), 1) + t.f / Expr(4.0));
    std::optional<Samples> a;
    try {
        a = sample_or_throw(a_e, grid, "theorem5: condition");
    } catch (const ConstructionError&) {
        const Samples up = 0.5 * (ms.b + sign(t.branch) * g);
        a = derivative_fd(up, 1) + 0.25 * sample_or_throw(t.f, grid, "theorem5: f");
    }
    const Samples V = potential_from_a(*a, ms.m, setup);

    const Samples G = cumulative_integral(g, 0);
    const Samples inner = cumulative_integral(exp_of(-1.0 * G), 0);
    const double outer = t.branch == Branch::Minus ? -1.0 : 1.0;
    std::vector<double> psi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        psi[i] = psi0 * std::sqrt(ms.m[i]) * (t.C + inner[i]) * std::exp(outer * G[i]);
    }
    return schrodinger_residual(ms.m, ms.b, V, Samples(grid, std::move(psi)), setup);
}

// Printed condition (1/4){f(2b + f) - f'}; psi0 sqrt(m){C + int e^{int h}} e^{-int h/2}
// with h = sqrt(b^2 + f(2b + f)).
double printed_theorem6(const family::Theorem6& t, const Expr& m, const PhysicalSetup& setup, const Grid& grid,
                        double psi0) {
    const MassSamples ms = sample_mass(m, grid);
    const Samples f = sample_or_throw(t.f, grid, "theorem6: f");
    const Samples df = sample_or_throw(differentiate(t.f, 1), grid, "theorem6: f'");
    std::vector<double> a(grid.size()), h(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double bi = ms.b[i];
        a[i] = 0.25 * (f[i] * (2.0 * bi + f[i]) - df[i]);
        h[i] = std::sqrt(std::max(0.0, bi * bi + f[i] * (2.0 * bi + f[i])));
    }
    const Samples V = potential_from_a(Samples(grid, std::move(a)), ms.m, setup);
    const Samples H = cumulative_integral(Samples(grid, std::move(h)), 0);
    const Samples inner = cumulative_integral(exp_of(H), 0);
    std::vector<double> psi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        psi[i] = psi0 * std::sqrt(ms.m[i]) * (t.C + inner[i]) * std::exp(-0.5 * H[i]);
    }
    return schrodinger_residual(ms.m, ms.b, V, Samples(grid, std::move(psi)), setup);
}

// Printed mass (f inside the denominator integral), printed b, and
// psi = psi0 e^{-F/2}(C6 + int e^{int (b_printed + f)}), judged against the
// true (ln m)' of the printed mass.
double printed_theorem7(const family::Theorem7& t, const PhysicalSetup& setup, const Grid& grid, double psi0) {
    const Samples f = sample_or_throw(t.f, grid, "theorem7: f");
    const Samples df = sample_or_throw(differentiate(t.f, 1), grid, "theorem7: f'");
    const Samples V = sample_or_throw(t.V, grid, "theorem7: V");
    const Samples F = cumulative_integral(f, 0);
    const Samples eF = exp_of(-0.5 * F);
    const double k = 4.0 / (setup.hbar * setup.hbar);
    const Samples src = zip(zip(f, V, [&](double fi, double vi) { return fi * (vi - setup.energy); }), eF,
                            [](double p, double e) { return p * e; });
    const Samples I = cumulative_integral(src, 0);

    const std::size_t n = grid.size();
    std::vector<double> m(n), b_printed(n), b_true(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double D = t.C5 - k * I[i];
        m[i] = f[i] * eF[i] / D;
        if (!(m[i] > 0.0) || !std::isfinite(m[i])) {
            throw ConstructionError("theorem7 printed mass is not positive on the grid");
        }
        const double common = df[i] / f[i] - 0.5 * f[i];
        b_printed[i] = common + k * (V[i] - setup.energy) * eF[i] / D;
        b_true[i] = common + k * f[i] * (V[i] - setup.energy) * eF[i] / D;
    }
    const Samples rate = Samples(grid, std::move(b_printed)) + f;
    const Samples W = cumulative_integral(exp_of(cumulative_integral(rate, 0)), 0);
    std::vector<double> psi(n);
    for (std::size_t i = 0; i < n; ++i) psi[i] = psi0 * eF[i] * (t.C6 + W[i]);
    return schrodinger_residual(Samples(grid, std::move(m)), Samples(grid, std::move(b_true)), V,
                                Samples(grid, std::move(psi)), setup);
}

}  // namespace

Tolerances default_tolerances(const FamilySpec& spec) {
    if (std::holds_alternative<family::Case3>(spec)) return {1e-10, 1e-9, 1e-5};
    return {};
}

VerificationReport verify_bundle(const SolutionBundle& bundle, const Tolerances& tol) {
    VerificationReport rep;
    rep.family = family_name(bundle.family);
    rep.tolerances = tol;
    rep.notes = bundle.notes;
    rep.riccati_residual = riccati_residual(bundle);
    rep.schrodinger_residual = schrodinger_residual(bundle);
    rep.masked_fraction = static_cast<double>(bundle.u.invalid_count()) / static_cast<double>(bundle.u.size());

    const OdeSolution ode = ode_oracle(bundle.m, bundle.V, bundle.setup.energy, bundle.setup.hbar, bundle.psi[0],
                                       bundle.dpsi[0]);
    rep.oracle_diverged = ode.diverged;
    const double scale = bundle.psi.max_abs();
    double dev = 0.0;
    for (std::size_t i = 0; i < bundle.psi.size(); ++i) {
        if (!ode.psi.valid(i)) continue;
        dev = std::max(dev, std::fabs(ode.psi[i] - bundle.psi[i]));
    }
    rep.oracle_max_rel_dev = scale > 0.0 ? dev / scale : dev;
    if (ode.diverged) rep.notes.emplace_back("oracle diverged after x = " + std::to_string(bundle.psi.grid().x(ode.last_valid)));
    if (rep.masked_fraction >= kMaxMaskedFraction) rep.notes.emplace_back("masked fraction of u exceeds 5%");

    rep.pass = rep.riccati_residual <= tol.riccati && rep.schrodinger_residual <= tol.schrodinger &&
               rep.oracle_max_rel_dev <= tol.oracle && !ode.diverged && rep.masked_fraction < kMaxMaskedFraction;
    return rep;
}

bool has_printed_formula(const FamilySpec& spec) noexcept {
    return std::holds_alternative<family::Theorem5>(spec) || std::holds_alternative<family::Theorem6>(spec) ||
           std::holds_alternative<family::Theorem7>(spec);
}

double printed_formula_crosscheck(const FamilySpec& spec, const Expr& m, const PhysicalSetup& setup,
                                  const Grid& grid, double psi0) {
    if (const auto* t5 = std::get_if<family::Theorem5>(&spec)) return printed_theorem5(*t5, m, setup, grid, psi0);
    if (const auto* t6 = std::get_if<family::Theorem6>(&spec)) return printed_theorem6(*t6, m, setup, grid, psi0);
    if (const auto* t7 = std::get_if<family::Theorem7>(&spec)) return printed_theorem7(*t7, setup, grid, psi0);
    throw std::invalid_argument("no printed wavefunction for family " + family_name(spec));
}

VerificationReport verify(const FamilySpec& spec, const Expr& m, double psi0, const PhysicalSetup& setup,
                          const Grid& grid, const std::optional<Tolerances>& tol) {
    const SolutionBundle bundle = build(spec, m, psi0, setup, grid);
    VerificationReport rep = verify_bundle(bundle, tol ? *tol : default_tolerances(spec));
    if (has_printed_formula(spec)) {
        try {
            rep.printed_formula_residual = printed_formula_crosscheck(spec, m, setup, grid, psi0);
        } catch (const Error& e) {
            rep.notes.push_back(std::string("printed formula not evaluable: ") + e.what());
        }
    }
    return rep;
}

EnergyNorm energy_dependent_norm(const FamilySpec& spec, const Expr& m, const PhysicalSetup& setup,
                                 const Grid& grid, double deltaE, double psi0) {
    if (!(deltaE > 0.0)) deltaE = 1e-4 * std::max(1.0, std::fabs(setup.energy));
    const SolutionBundle centre = build(spec, m, psi0, setup, grid);
    PhysicalSetup up = setup;
    PhysicalSetup down = setup;
    up.energy += deltaE;
    down.energy -= deltaE;
    const Samples Vp = build(spec, m, psi0, up, grid).V;
    const Samples Vm = build(spec, m, psi0, down, grid).V;
    const double denom = up.energy - down.energy;

    std::vector<double> weight(grid.size()), plain(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double dVdE = (Vp[i] - Vm[i]) / denom;
        const double p2 = centre.psi[i] * centre.psi[i];
        weight[i] = p2 * (1.0 - dVdE);
        plain[i] = p2;
    }
    return {integrate(Samples(grid, std::move(weight))), integrate(Samples(grid, std::move(plain)))};
}

std::vector<VerificationReport> sweep(const std::vector<SweepCase>& cases, const Grid& grid,
                                      const std::optional<Tolerances>& tol, unsigned threads) {
    std::vector<VerificationReport> out(cases.size());
    if (cases.empty()) return out;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cases.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
            const SweepCase& c = cases[i];
            VerificationReport rep;
            try {
                rep = verify(c.spec, c.mass, c.psi0, c.setup, grid, tol);
            } catch (const std::exception& e) {
                rep.family = family_name(c.spec);
                rep.tolerances = tol ? *tol : default_tolerances(c.spec);
                rep.pass = false;
                rep.error = e.what();
            }
            if (!c.label.empty()) rep.notes.insert(rep.notes.begin(), c.label);
            out[i] = std::move(rep);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace pdm
