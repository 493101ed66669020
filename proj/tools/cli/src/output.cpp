#include "pdm_cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <type_traits>

namespace pdm::cli {

namespace {

using json = nlohmann::ordered_json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void put_g17(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

json family_parameters(const FamilySpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            json j;
            if constexpr (std::is_same_v<T, family::Case1>) {
                j["beta_c"] = s.beta_c;
                j["C1"] = s.C1;
            } else if constexpr (std::is_same_v<T, family::Case2>) {
                j["a0"] = s.a0;
                j["f0"] = s.f0;
            } else if constexpr (std::is_same_v<T, family::Case3>) {
                j["Delta"] = s.Delta;
                j["branch"] = to_string(s.branch);
            } else if constexpr (std::is_same_v<T, family::Theorem4>) {
                j["f"] = to_string(s.f);
                j["branch"] = to_string(s.branch);
                j["v0"] = s.v0;
            } else if constexpr (std::is_same_v<T, family::Case4a> || std::is_same_v<T, family::Case4b>) {
                j["v0"] = s.v0;
            } else if constexpr (std::is_same_v<T, family::Theorem5>) {
                j["f"] = to_string(s.f);
                j["branch"] = to_string(s.branch);
                j["C"] = s.C;
            } else if constexpr (std::is_same_v<T, family::Theorem6>) {
                j["f"] = to_string(s.f);
                j["C"] = s.C;
            } else {
                j["f"] = to_string(s.f);
                j["V"] = to_string(s.V);
                j["C5"] = s.C5;
                j["C6"] = s.C6;
            }
            return j;
        },
        spec);
}

}  // namespace

void write_csv(std::ostream& os, const Samples& m, const Samples& V, const Samples& u, const Samples& psi) {
    os << "x,m,V,u,psi,mask\n";
    const Grid& g = m.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        put_g17(os, g.x(i));
        for (const Samples* s : {&m, &V, &u, &psi}) {
            os << ',';
            put_g17(os, (*s)[i]);
        }
        os << ',' << (u.valid(i) ? 1 : 0) << '\n';
    }
}

json describe_run(const RunConfig& cfg, const FamilySpec& spec) {
    json j;
    j["family"] = family_name(spec);
    j["parameters"] = family_parameters(spec);
    if (cfg.mass) j["mass"] = *cfg.mass;
    if (!cfg.params.empty()) {
        json p = json::object();
        for (const auto& [k, v] : cfg.params) p[k] = v;
        j["params"] = p;
    }
    j["psi0"] = cfg.psi0;
    j["setup"] = {{"hbar", cfg.setup.hbar}, {"energy", cfg.setup.energy}};
    j["grid"] = {{"x_min", cfg.grid.x_min}, {"x_max", cfg.grid.x_max}, {"n", cfg.grid.n}};
    j["anchors"] = {{"integral_base", cfg.grid.x_min}};
    return j;
}

json to_json(const VerificationReport& r) {
    json j;
    j["family"] = r.family;
    j["riccati_residual"] = number(r.riccati_residual);
    j["schrodinger_residual"] = number(r.schrodinger_residual);
    j["oracle_max_rel_dev"] = number(r.oracle_max_rel_dev);
    j["masked_fraction"] = number(r.masked_fraction);
    j["printed_formula_residual"] = r.printed_formula_residual ? number(*r.printed_formula_residual) : json(nullptr);
    j["oracle_diverged"] = r.oracle_diverged;
    j["pass"] = r.pass;
    j["tolerances"] = {{"riccati", r.tolerances.riccati},
                       {"schrodinger", r.tolerances.schrodinger},
                       {"oracle", r.tolerances.oracle}};
    j["notes"] = r.notes;
    if (r.error) j["error"] = *r.error;
    return j;
}

json catalog_json() {
    json list = json::array();
    for (const auto& e : mass_catalog()) {
        json d = json::object();
        for (const auto& [k, v] : e.defaults) d[k] = v;
        list.push_back({{"name", e.name},
                        {"expression", e.expression},
                        {"defaults", d},
                        {"valid_range", e.valid_range},
                        {"description", e.description}});
    }
    return list;
}

}  // namespace pdm::cli
