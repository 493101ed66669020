// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//   pdm_acceptance [--report path.json]

#include "pdm/catalog.hpp"
#include "pdm/errors.hpp"
#include "pdm/families.hpp"
#include "pdm/verify.hpp"
#include "random_expr.hpp"

#ifdef PDM_HAVE_CLI
#include "pdm_cli/app.hpp"
#include "pdm_cli/output.hpp"
#endif

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace pdm;
using json = nlohmann::ordered_json;

namespace {

const Grid kGrid(-4.0, 4.0, 4001);
const PhysicalSetup kSetup{1.0, 1.0};

struct Verdict {
    int id;
    std::string title;
    bool pass = true;
    std::string summary;
    json data = json::object();
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

std::vector<std::pair<std::string, Expr>> catalog_masses() {
    std::vector<std::pair<std::string, Expr>> out;
    for (const auto& e : mass_catalog()) out.emplace_back(e.name, e.bound());
    return out;
}

std::vector<FamilySpec> constructions() {
    const Expr f4 = parse("1 + 0.5*tanh(x)^2");
    return {family::Case1{0.5, 1.0},
            family::Case2{1.0, 0.0},
            family::Case3{1.0, Branch::Plus},
            family::Case3{1.0, Branch::Minus},
            family::Theorem4{f4, Branch::Plus, 1.0, std::nullopt},
            family::Theorem4{f4, Branch::Minus, 1.0, std::nullopt},
            family::Case4a{1.0},
            family::Case4b{1.0},
            family::Theorem5{parse("1"), Branch::Plus, 1.0},
            family::Theorem5{parse("1"), Branch::Minus, 1.0},
            family::Theorem6{parse("tanh(x)"), 1.0}};
}

std::vector<FamilySpec> theorem7_constructions() {
    const Expr V = parse("1 + 0.2*exp(-x^2)");
    return {family::Theorem7{parse("1"), V, 1.0, 0.0}, family::Theorem7{parse("2 + tanh(x)"), V, 1.0, 0.0},
            family::Theorem7{parse("1 + 0.5*sin(x)"), V, 1.0, 0.0}};
}

std::string describe(const FamilySpec& spec) {
    std::string s = family_name(spec);
    if (const auto* c = std::get_if<family::Case3>(&spec)) s += to_string(c->branch);
    if (const auto* t = std::get_if<family::Theorem4>(&spec)) s += to_string(t->branch);
    if (const auto* t = std::get_if<family::Theorem5>(&spec)) s += to_string(t->branch);
    if (const auto* t = std::get_if<family::Theorem7>(&spec)) s += "[f=" + to_string(t->f) + "]";
    return s;
}

struct Instance {
    std::string label;
    FamilySpec spec;
    VerificationReport report;
    double seconds = 0.0;
};

// Every construction on every catalog mass, plus Theorem 7 on its own masses.
std::vector<Instance> run_suite() {
    std::vector<std::pair<FamilySpec, std::pair<std::string, Expr>>> todo;
    for (const FamilySpec& spec : constructions())
        for (const auto& m : catalog_masses()) todo.push_back({spec, m});
    for (const FamilySpec& spec : theorem7_constructions()) todo.push_back({spec, {"constructed", Expr()}});

    std::vector<Instance> out;
    for (const auto& [spec, mass] : todo) {
        Instance inst{describe(spec) + " / " + mass.first, spec, {}, 0.0};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            inst.report = verify(spec, mass.second, 1.0, kSetup, kGrid);
        } catch (const std::exception& e) {
            inst.report.family = family_name(spec);
            inst.report.error = e.what();
        }
        inst.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(inst));
    }
    return out;
}

Verdict residual_suite(const std::vector<Instance>& suite) {
    Verdict v{1, "residual suite", true, "", json::array()};
    double worst_r = 0.0, worst_s = 0.0, worst_t = 0.0, worst_c3r = 0.0, worst_c3s = 0.0;
    int failed = 0;
    for (const auto& inst : suite) {
        const auto& r = inst.report;
        const Tolerances tol = default_tolerances(inst.spec);
        const bool ok = !r.error && r.riccati_residual <= tol.riccati && r.schrodinger_residual <= tol.schrodinger &&
                        r.masked_fraction < kMaxMaskedFraction && inst.seconds <= 1.0;
        if (!ok) {
            ++failed;
            std::cerr << "criterion 1: " << inst.label << " failed"
                      << (r.error ? ": " + *r.error : " (ric " + sci(r.riccati_residual) + ", sch " +
                                                          sci(r.schrodinger_residual) + ", " + sci(inst.seconds) + " s)")
                      << '\n';
        }
        worst_r = std::max(worst_r, r.riccati_residual);
        worst_s = std::max(worst_s, r.schrodinger_residual);
        worst_t = std::max(worst_t, inst.seconds);
        if (std::holds_alternative<family::Case3>(inst.spec)) {
            worst_c3r = std::max(worst_c3r, r.riccati_residual);
            worst_c3s = std::max(worst_c3s, r.schrodinger_residual);
        }
        v.data.push_back({{"instance", inst.label},
                          {"riccati", r.riccati_residual},
                          {"schrodinger", r.schrodinger_residual},
                          {"masked_fraction", r.masked_fraction},
                          {"ok", ok}});
    }
    v.pass = failed == 0 && !suite.empty();
    v.summary = std::to_string(suite.size() - failed) + "/" + std::to_string(suite.size()) +
                " instances; worst riccati " + sci(worst_r) + " (<= 1e-6), schrodinger " + sci(worst_s) +
                " (<= 1e-5); case3 " + sci(worst_c3r) + " / " + sci(worst_c3s) + " (<= 1e-10 / 1e-9); slowest " +
                sci(worst_t) + " s (<= 1 s)";
    return v;
}

Verdict oracle_agreement(const std::vector<Instance>& suite) {
    Verdict v{2, "oracle cross-validation"};
    double worst = 0.0;
    int checked = 0, bad = 0;
    for (const auto& inst : suite) {
        if (!inst.report.pass) continue;
        ++checked;
        worst = std::max(worst, inst.report.oracle_max_rel_dev);
        if (inst.report.oracle_diverged || inst.report.oracle_max_rel_dev > 1e-5) ++bad;
    }
    v.pass = checked > 0 && bad == 0;
    v.summary = std::to_string(checked) + " passing instances; worst max relative deviation " + sci(worst) +
                " (<= 1e-5)";
    v.data = {{"checked", checked}, {"worst", worst}};
    return v;
}

Verdict worked_example() {
    Verdict v{3, "sech^2 worked example"};
    const double m0 = 1.0, w = 1.2, beta = 0.5, hbar = kSetup.hbar, E = kSetup.energy;
    const Expr m = find_catalog_entry("sech2")->bound({{"m0", m0}, {"w", w}});
    const Samples V = case1_potential_from_mass(m, beta, kSetup, kGrid);
    const Expr closed = bind(parse("E + (beta*hbar^2*cosh(w*x)^2/(2*m0))*(beta + 2*w*tanh(w*x))"),
                                {{"E", E}, {"beta", beta}, {"hbar", hbar}, {"m0", m0}, {"w", w}});
    const Samples want = sample(closed, kGrid);
    double dev = 0.0;
    for (std::size_t i = 0; i < kGrid.size(); ++i)
        dev = std::max(dev, std::abs(V[i] - want[i]) / std::max(1.0, std::abs(want[i])));
    const VerificationReport r = verify(family::Case1{beta, 1.0}, m, 1.0, kSetup, kGrid);
    const Tolerances tol = default_tolerances(family::Case1{});
    const bool psi_ok = r.riccati_residual <= tol.riccati && r.schrodinger_residual <= tol.schrodinger && r.pass;
    v.pass = dev <= 1e-10 && psi_ok;
    v.summary = "V vs closed-form potential " + sci(dev) + " (<= 1e-10); psi residuals " + sci(r.riccati_residual) +
                " / " + sci(r.schrodinger_residual) + (psi_ok ? " pass" : " FAIL");
    v.data = {{"potential_deviation", dev}, {"riccati", r.riccati_residual}, {"schrodinger", r.schrodinger_residual}};
    return v;
}

double shape_deviation(const Samples& a, const Samples& b) {
    double ab = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ab += a[i] * b[i], bb += b[i] * b[i];
    const double c = ab / bb;
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - c * b[i]));
    return d / a.max_abs();
}

Verdict reductions() {
    Verdict v{4, "reductions"};
    double to_case3 = 0.0, to_4a = 0.0, to_4b = 0.0;
    bool ok = true;
    try {
        for (const auto& [name, m] : catalog_masses()) {
            for (Branch br : {Branch::Plus, Branch::Minus}) {
                const SolutionBundle t = theorem4_solve(m, Expr(1.0), br, 1e12, 1.0, kSetup, kGrid);
                const SolutionBundle c = build(family::Case3{1.0, br}, m, 1.0, kSetup, kGrid);
                for (std::size_t i = kGrid.size() / 2; i < kGrid.size(); ++i)
                    to_case3 = std::max(to_case3, std::abs(t.u[i] - c.u[i]));
            }
            const SolutionBundle a = build(family::Case4a{1.0}, m, 1.0, kSetup, kGrid);
            const SolutionBundle ta = theorem4_solve(m, Expr(0.0), Branch::Plus, 1.0, 1.0, kSetup, kGrid);
            to_4a = std::max(to_4a, shape_deviation(a.psi, ta.psi));

            // f = b^2 with the signed root b; constants line up as v0 -> v0 m_min
            const Expr b = differentiate(ln(m));
            const double m_min = eval(m, kGrid.x_min());
            const SolutionBundle bb = build(family::Case4b{1.0}, m, 1.0, kSetup, kGrid);
            const SolutionBundle tb = theorem4_solve(m, simplify(b * b), Branch::Plus, m_min, 1.0, kSetup, kGrid, b);
            to_4b = std::max(to_4b, shape_deviation(bb.psi, tb.psi));
        }
    } catch (const std::exception& e) {
        ok = false;
        std::cerr << "criterion 4: " << e.what() << '\n';
    }
    v.pass = ok && to_case3 <= 1e-6 && to_4a <= 1e-8 && to_4b <= 1e-8;
    v.summary = "theorem4(f=Delta) vs case3 u " + sci(to_case3) + " (<= 1e-6); case4a " + sci(to_4a) + ", case4b " +
                sci(to_4b) + " (<= 1e-8)";
    v.data = {{"case3", to_case3}, {"case4a", to_4a}, {"case4b", to_4b}};
    return v;
}

Verdict inverse_pair() {
    Verdict v{5, "inverse pair"};
    double worst = 0.0;
    for (double beta : {0.3, 1.0, 2.0}) {
        for (const auto& [name, m] : catalog_masses()) {
            const Samples V = case1_potential_from_mass(m, beta, kSetup, kGrid);
            const Samples ms = sample(m, kGrid);
            const double m2 = std::exp(beta * kGrid.x_min()) / ms[0];
            const Samples back = case1_mass_from_potential(V, beta, m2, kSetup);
            for (std::size_t i = 0; i < kGrid.size(); ++i) worst = std::max(worst, std::abs(back[i] / ms[i] - 1.0));
        }
    }
    v.pass = worst <= 1e-7;
    v.summary = "beta in {0.3, 1, 2} x catalog; worst relative deviation " + sci(worst) + " (<= 1e-7)";
    v.data = {{"worst", worst}};
    return v;
}

Verdict adjudication(const std::vector<Instance>& suite) {
    Verdict v{6, "printed-formula records", true, "", json::array()};
    int records = 0, engine_ok = 0, total = 0;
    double lo = INFINITY, hi = 0.0;
    for (const auto& inst : suite) {
        if (!has_printed_formula(inst.spec)) continue;
        ++total;
        const auto& r = inst.report;
        const Tolerances tol = default_tolerances(inst.spec);
        const bool engine = !r.error && r.riccati_residual <= tol.riccati && r.schrodinger_residual <= tol.schrodinger;
        engine_ok += engine;
        json rec{{"instance", inst.label}, {"engine_schrodinger", r.schrodinger_residual}};
        if (r.printed_formula_residual) {
            ++records;
            lo = std::min(lo, *r.printed_formula_residual);
            hi = std::max(hi, *r.printed_formula_residual);
            rec["printed_schrodinger"] = *r.printed_formula_residual;
        } else {
            rec["printed_schrodinger"] = nullptr;
        }
        v.data.push_back(std::move(rec));
    }
    v.pass = total > 0 && records == total && engine_ok == total;
    v.summary = std::to_string(records) + "/" + std::to_string(total) + " printed residuals recorded (" + sci(lo) +
                " .. " + sci(hi) + "); engine passes " + std::to_string(engine_ok) + "/" + std::to_string(total);
    return v;
}

double fd_order(double (*f)(double), double (*F)(double)) {
    auto err = [&](std::size_t n) {
        const Grid g(-2.0, 3.0, n);
        const Samples I = cumulative_integral(Samples::generate(g, f), 0);
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(I[i] - (F(g.x(i)) - F(g.x_min()))));
        return e;
    };
    return std::log2(err(101) / err(201));
}

Verdict numerics_gates() {
    Verdict v{7, "numerics quality gates"};
    // quadrature order on smooth integrands with known antiderivatives
    const double orders[] = {
        fd_order([](double x) { return std::cos(x); }, [](double x) { return std::sin(x); }),
        fd_order([](double x) { return std::exp(0.7 * x); }, [](double x) { return std::exp(0.7 * x) / 0.7; }),
        fd_order([](double x) { return 1.0 / (std::cosh(x) * std::cosh(x)); }, [](double x) { return std::tanh(x); })};
    const double order = *std::min_element(std::begin(orders), std::end(orders));

    // symbolic derivatives vs central differences, catalog masses and random smooth trees
    double dev = 0.0;
    int points = 0;
    pdm::testing::ExprGenerator gen(0xacce97);
    std::vector<Expr> exprs;
    for (const auto& [name, m] : catalog_masses()) exprs.push_back(ln(m));
    for (int k = 0; k < 200; ++k) exprs.push_back(gen.smooth(5));
    for (const Expr& e : exprs) {
        const Expr d = differentiate(e);
        for (int j = 0; j < 10; ++j) {
            const double x = gen.uniform(-3.0, 3.0);
            const double fd = pdm::testing::central_fd(e, x, 1e-3);
            // skip points where the difference quotient itself has not converged
            if (std::abs(fd - pdm::testing::central_fd(e, x, 5e-4)) > 1e-8 * (1.0 + std::abs(fd))) continue;
            const double sym = eval(d, x);
            dev = std::max(dev, std::abs(sym - fd) / (1.0 + std::abs(sym)));
            ++points;
        }
    }

    // Cole-Hopf round trip on positive and negative wavefunctions
    double ch = 0.0;
    for (double s : {1.0, -1.0}) {
        const Samples psi = Samples::generate(
            kGrid, [&](double x) { return s * std::exp(0.4 * std::sin(1.3 * x) + 0.2 * x) * (1.5 + std::tanh(x)); });
        const Samples back = wavefunction_from_logderivative(logderivative(psi), psi[0]);
        for (std::size_t i = 0; i < kGrid.size(); ++i) ch = std::max(ch, std::abs(back[i] / psi[i] - 1.0));
    }
    v.pass = order >= 3.5 && dev <= 1e-6 && points > 1000 && ch <= 1e-5;
    v.summary = "quadrature order " + std::to_string(order).substr(0, 4) + " (>= 3.5); derivative " + sci(dev) +
                " over " + std::to_string(points) + " points (<= 1e-6); Cole-Hopf " + sci(ch) + " (<= 1e-5)";
    v.data = {{"order", order}, {"derivative", dev}, {"points", points}, {"cole_hopf", ch}};
    return v;
}

Verdict norm_property() {
    Verdict v{8, "energy-dependent norm"};
    double additive = 0.0, pinned = 0.0;
    bool ok = true;
    try {
        for (const FamilySpec& spec : constructions()) {
            for (const auto& [name, m] : catalog_masses()) {
                const EnergyNorm n = energy_dependent_norm(spec, m, kSetup, kGrid);
                additive = std::max(additive, std::abs(n.value) / n.psi_squared);
            }
        }
        for (const FamilySpec& spec : theorem7_constructions()) {
            const EnergyNorm n = energy_dependent_norm(spec, Expr(), kSetup, kGrid);
            ok = ok && n.value > 0.0;
            pinned = std::max(pinned, std::abs(n.value - n.psi_squared) / n.psi_squared);
        }
    } catch (const std::exception& e) {
        ok = false;
        std::cerr << "criterion 8: " << e.what() << '\n';
    }
    v.pass = ok && additive <= 1e-8 && pinned <= 1e-8;
    v.summary = "additive-energy families |N|/int psi^2 " + sci(additive) + " (<= 1e-8); pinned V |N - int psi^2| " +
                sci(pinned) + " relative (<= 1e-8)";
    v.data = {{"additive", additive}, {"pinned", pinned}};
    return v;
}

#ifdef PDM_HAVE_CLI
// Every artifact the CLI writes for a fixed set of runs, by name.
std::vector<std::pair<std::string, std::string>> cli_artifacts(const std::filesystem::path& dir) {
    std::vector<std::pair<std::string, std::string>> out;
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const std::string grid = "-4:4:4001";
    const std::vector<std::vector<std::string>> solves{
        {"--family", "case1", "--beta", "0.5", "--c1", "1", "--mass", "@sech2", "--param", "w=1.2"},
        {"--family", "case2", "--mass", "@gauss"},
        {"--family", "case3", "--delta", "1", "--branch", "minus", "--mass", "@rational"},
        {"--family", "theorem4", "--f", "1 + 0.5*tanh(x)^2", "--v0", "1", "--mass", "@exp"},
        {"--family", "case4a", "--v0", "1", "--mass", "@const"},
        {"--family", "case4b", "--v0", "1", "--mass", "@gauss"},
        {"--family", "theorem5", "--f", "1", "--c", "1", "--mass", "@exp"},
        {"--family", "theorem6", "--f", "tanh(x)", "--c", "1", "--mass", "@rational"},
        {"--family", "theorem7", "--f", "2 + tanh(x)", "--potential", "1 + 0.2*exp(-x^2)"}};
    for (std::size_t k = 0; k < solves.size(); ++k) {
        const std::string base = (dir / ("solve" + std::to_string(k) + ".csv")).string();
        std::vector<std::string> args{"solve", "--grid", grid, "--energy", "1", "--out", base};
        args.insert(args.end(), solves[k].begin(), solves[k].end());
        std::ostringstream o, e;
        const int code = pdm::cli::run(args, o, e);
        out.push_back({"solve" + std::to_string(k) + " exit", std::to_string(code) + e.str()});
        out.push_back({"solve" + std::to_string(k) + ".csv", slurp(base)});
        out.push_back({"solve" + std::to_string(k) + ".csv.json", slurp(base + ".json")});

        std::vector<std::string> vargs{"verify", "--grid", grid, "--energy", "1"};
        vargs.insert(vargs.end(), solves[k].begin(), solves[k].end());
        std::ostringstream vo, ve;
        const int vcode = pdm::cli::run(vargs, vo, ve);
        out.push_back({"verify" + std::to_string(k) + ".json", std::to_string(vcode) + vo.str() + ve.str()});
    }
    std::ostringstream so, se;
    pdm::cli::run({"sweep", "--family", "case1", "--beta", "0.25,0.5,1", "--c1", "1", "--mass",
                   "@sech2,@gauss,@rational", "--grid", grid, "--json", "--threads", "4"},
                  so, se);
    out.push_back({"sweep.json", so.str() + se.str()});
    return out;
}
#endif

Verdict determinism(const std::vector<Instance>& suite) {
    Verdict v{9, "determinism"};
    // the in-process suite, rerun and compared field by field
    const std::vector<Instance> again = run_suite();
    bool same = again.size() == suite.size();
    for (std::size_t i = 0; same && i < suite.size(); ++i) {
        const auto& a = suite[i].report;
        const auto& b = again[i].report;
        same = a.riccati_residual == b.riccati_residual && a.schrodinger_residual == b.schrodinger_residual &&
               a.oracle_max_rel_dev == b.oracle_max_rel_dev && a.masked_fraction == b.masked_fraction &&
               a.printed_formula_residual == b.printed_formula_residual && a.notes == b.notes && a.pass == b.pass;
    }
#ifdef PDM_HAVE_CLI
    namespace fs = std::filesystem;
    // same output paths in both runs, so sidecars that echo the path compare equal
    const fs::path dir = fs::temp_directory_path() / "pdm_acceptance_artifacts";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto first = cli_artifacts(dir);
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto second = cli_artifacts(dir);
    fs::remove_all(dir);
    std::size_t bytes = 0, differing = 0;
    for (std::size_t i = 0; i < first.size(); ++i) {
        bytes += first[i].second.size();
        if (i >= second.size() || first[i] != second[i]) {
            ++differing;
            std::cerr << "criterion 9: artifact " << first[i].first << " differs between runs\n";
        }
    }
    const bool cli_same = differing == 0 && first.size() == second.size() && bytes > 0;
    v.pass = same && cli_same;
    v.summary = "suite rerun " + std::string(same ? "identical" : "DIFFERS") + "; " + std::to_string(first.size()) +
                " CLI artifacts (" + std::to_string(bytes) + " bytes), " + std::to_string(differing) + " differ";
    v.data = {{"suite_identical", same}, {"artifacts", first.size()}, {"bytes", bytes}, {"differing", differing}};
#else
    v.pass = false;
    v.summary = "CLI not built; artifacts cannot be compared";
#endif
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    std::string report_path;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--report" && i + 1 < argc) {
            report_path = argv[++i];
        } else {
            std::cerr << "usage: pdm_acceptance [--report path.json]\n";
            return 2;
        }
    }

    const std::vector<Instance> suite = run_suite();
    std::vector<Verdict> verdicts;
    verdicts.push_back(residual_suite(suite));
    verdicts.push_back(oracle_agreement(suite));
    verdicts.push_back(worked_example());
    verdicts.push_back(reductions());
    verdicts.push_back(inverse_pair());
    verdicts.push_back(adjudication(suite));
    verdicts.push_back(numerics_gates());
    verdicts.push_back(norm_property());
    verdicts.push_back(determinism(suite));

    bool all = true;
    json report = json::array();
    for (const auto& v : verdicts) {
        std::cout << "criterion " << v.id << ' ' << (v.pass ? "PASS" : "FAIL") << "  " << v.title << ": " << v.summary
                  << '\n';
        all = all && v.pass;
        report.push_back({{"criterion", v.id}, {"title", v.title}, {"pass", v.pass}, {"summary", v.summary},
                          {"data", v.data}});
    }
    if (!report_path.empty()) {
        std::ofstream os(report_path);
        os << report.dump(2) << '\n';
    }
    std::cout << (all ? "all criteria pass" : "some criteria FAIL") << '\n';
    return all ? 0 : 1;
}
