#include "pdm/catalog.hpp"

namespace pdm {

Expr CatalogEntry::bound(const Params& overrides) const {
    Params p = defaults;
    for (const auto& [k, v] : overrides) p[k] = v;
    return simplify(bind(parse(expression), p));
}

const std::vector<CatalogEntry>& mass_catalog() {
    static const std::vector<CatalogEntry> entries{
        {"const", "m0", {{"m0", 1.0}}, "m0 > 0", "constant mass"},
        {"sech2", "m0*sech(w*x)^2", {{"m0", 1.0}, {"w", 1.0}}, "m0 > 0, w real", "hyperbolic secant squared well"},
        {"exp", "m0*exp(lambda*x)", {{"m0", 1.0}, {"lambda", 0.5}}, "m0 > 0, lambda real", "exponential mass"},
        {"gauss", "m0*(1 + A*exp(-x^2))", {{"m0", 1.0}, {"A", 0.5}}, "m0 > 0, A > -1", "Gaussian bump"},
        {"rational", "m0/(1 + x^2)", {{"m0", 1.0}}, "m0 > 0", "rational decay"},
    };
    return entries;
}

const CatalogEntry* find_catalog_entry(std::string_view name) {
    if (!name.empty() && name.front() == '@') name.remove_prefix(1);
    for (const auto& e : mass_catalog()) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

}  // namespace pdm
