#include "pdm_cli/config.hpp"

#include "pdm/catalog.hpp"
#include "pdm/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

namespace pdm::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& name, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const char* end = t.data() + t.size();
    auto [p, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || p != end || !std::isfinite(v)) {
        throw ConfigError("--" + name + ": '" + text + "' is not a finite number");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

// Flags whose values are numbers (and so may be lists in a sweep).
const std::set<std::string>& numeric_flags() {
    static const std::set<std::string> s{"hbar", "energy", "beta", "a0", "f0", "delta", "v0", "c",
                                         "c1",   "c5",     "c6",   "m2", "psi0", "tol-r", "tol-s", "tol-o"};
    return s;
}

// Which expression inputs and constants each family reads.
struct FamilyShape {
    bool mass;
    bool potential;
    bool f;
    std::vector<std::string> constants;
};

const std::map<std::string, FamilyShape>& families() {
    static const std::map<std::string, FamilyShape> m{
        {"case1", {true, false, false, {"beta", "c1"}}},
        {"case2", {true, false, false, {"a0", "f0"}}},
        {"case3", {true, false, false, {"delta"}}},
        {"theorem4", {true, false, true, {"v0"}}},
        {"case4a", {true, false, false, {"v0"}}},
        {"case4b", {true, false, false, {"v0"}}},
        {"theorem5", {true, false, true, {"c"}}},
        {"theorem6", {true, false, true, {"c"}}},
        {"theorem7", {false, true, true, {"c5", "c6"}}},
    };
    return m;
}

const std::map<std::string, double>& constant_defaults() {
    static const std::map<std::string, double> d{{"beta", 0.0}, {"c1", 0.0}, {"a0", 1.0}, {"f0", 0.0},
                                                 {"delta", 0.0}, {"v0", 0.0}, {"c", 0.0}, {"c5", 1.0},
                                                 {"c6", 0.0}, {"m2", 1.0}};
    return d;
}

Branch to_branch(const std::optional<std::string>& s, Branch fallback) {
    if (!s) return fallback;
    if (*s == "plus" || *s == "+") return Branch::Plus;
    if (*s == "minus" || *s == "-") return Branch::Minus;
    throw ConfigError("--branch must be 'plus' or 'minus' (got '" + *s + "')");
}

}  // namespace

const std::vector<std::string>& value_flags() {
    static const std::vector<std::string> f{"family", "mass", "potential", "f",  "grid", "hbar", "energy",
                                            "beta",   "a0",   "f0",        "delta", "branch", "v0", "c",
                                            "c1",     "c5",   "c6",        "m2", "psi0", "tol-r", "tol-s",
                                            "tol-o",  "out"};
    return f;
}

GridSpec parse_grid(const std::string& text) {
    const auto parts = split(trim(text), ':');
    if (parts.size() != 3) throw ConfigError("grid must be 'min:max:n' (got '" + text + "')");
    GridSpec g;
    g.x_min = to_double("grid", parts[0]);
    g.x_max = to_double("grid", parts[1]);
    const std::string nt = trim(parts[2]);
    unsigned long long n = 0;
    auto [p, ec] = std::from_chars(nt.data(), nt.data() + nt.size(), n);
    if (nt.empty() || ec != std::errc() || p != nt.data() + nt.size()) {
        throw ConfigError("grid n must be a positive integer (got '" + parts[2] + "')");
    }
    g.n = static_cast<std::size_t>(n);
    if (g.n % 2 == 0) throw ConfigError("grid n must be odd");
    if (g.n < 9) throw ConfigError("grid n must be at least 9");
    if (!(g.x_min < g.x_max)) throw ConfigError("grid requires min < max");
    return g;
}

Grid make_grid(const GridSpec& g) {
    try {
        return Grid(g.x_min, g.x_max, g.n);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

Expr parse_bound(const std::string& text, const Params& params) {
    try {
        if (!text.empty() && text.front() == '@') {
            const CatalogEntry* entry = find_catalog_entry(text);
            if (!entry) throw ConfigError("unknown catalog mass '" + text + "' (see 'pdm catalog')");
            return entry->bound(params);
        }
        Expr e = bind(parse(text), params);
        const auto unbound = parameters(e);
        if (!unbound.empty()) throw ConfigError("unbound parameter '" + *unbound.begin() + "' in '" + text + "'");
        return simplify(e);
    } catch (const ParseError& e) {
        throw ConfigError("cannot parse '" + text + "' at offset " + std::to_string(e.offset()) + ": " + e.what());
    }
}

std::vector<RawOptions> expand_lists(const RawOptions& raw) {
    std::vector<RawOptions> rows{raw};
    for (const auto& [key, value] : raw) {
        if (!numeric_flags().count(key) && key != "mass" && key != "f" && key != "branch") continue;
        const auto items = split(value, ',');
        if (items.size() == 1) continue;
        std::vector<RawOptions> next;
        for (const auto& row : rows) {
            for (const auto& item : items) {
                RawOptions r = row;
                r[key] = trim(item);
                next.push_back(std::move(r));
            }
        }
        rows = std::move(next);
    }
    return rows;
}

RunConfig resolve(Command command, const RawOptions& raw, bool json) {
    RunConfig cfg;
    cfg.command = command;
    cfg.json = json;

    auto get = [&](const std::string& k) -> std::optional<std::string> {
        auto it = raw.find(k);
        if (it == raw.end()) return std::nullopt;
        return it->second;
    };
    for (const auto& [k, v] : raw) {
        if (numeric_flags().count(k) && v.find(',') != std::string::npos) {
            throw ConfigError("--" + k + " takes a single value outside 'sweep'");
        }
    }
    auto num = [&](const std::string& k) -> std::optional<double> {
        auto v = get(k);
        if (!v) return std::nullopt;
        return to_double(k, *v);
    };

    if (auto g = get("grid")) {
        cfg.grid = parse_grid(*g);
    } else if (const char* env = std::getenv("PDM_DEFAULT_GRID"); env && *env) {
        cfg.grid = parse_grid(env);
    }

    cfg.setup.hbar = num("hbar").value_or(1.0);
    cfg.setup.energy = num("energy").value_or(0.0);
    if (!(cfg.setup.hbar > 0.0)) throw ConfigError("--hbar must be positive");
    cfg.psi0 = num("psi0").value_or(1.0);
    if (cfg.psi0 == 0.0) throw ConfigError("--psi0 must be nonzero");
    cfg.tol_r = num("tol-r");
    cfg.tol_s = num("tol-s");
    cfg.tol_o = num("tol-o");
    cfg.out = get("out");
    cfg.branch = get("branch");
    cfg.mass = get("mass");
    cfg.potential = get("potential");
    cfg.f = get("f");
    for (const auto& [k, v] : raw) {
        if (k.rfind("param.", 0) == 0) cfg.params[k.substr(6)] = to_double(k, v);
    }
    for (const auto& [k, d] : constant_defaults()) cfg.constants[k] = num(k).value_or(d);

    if (command == Command::Invert) {
        if (!cfg.potential) throw ConfigError("invert requires --potential");
        if (cfg.mass) throw ConfigError("invert constructs the mass; --mass is not accepted");
        if (cfg.constants["beta"] == 0.0) throw ConfigError("invert requires --beta != 0");
        cfg.family = "case1";
        return cfg;
    }
    if (command == Command::Catalog) return cfg;

    auto fam = get("family");
    if (!fam) throw ConfigError("--family is required");
    cfg.family = *fam;
    auto it = families().find(cfg.family);
    if (it == families().end()) throw ConfigError("unknown family '" + cfg.family + "'");
    const FamilyShape& shape = it->second;
    if (shape.mass && !cfg.mass) throw ConfigError(cfg.family + " requires --mass");
    if (!shape.mass && cfg.mass) throw ConfigError(cfg.family + " builds its own mass; use --potential, not --mass");
    if (shape.potential && !cfg.potential) throw ConfigError(cfg.family + " requires --potential");
    if (!shape.potential && cfg.potential) {
        throw ConfigError(cfg.family + " derives the potential from the mass; --potential is not accepted");
    }
    if (shape.f && !cfg.f) throw ConfigError(cfg.family + " requires --f");
    return cfg;
}

Instance make_instance(const RunConfig& cfg) {
    Instance inst;
    const auto& c = cfg.constants;
    auto expr = [&](const std::optional<std::string>& s) { return s ? parse_bound(*s, cfg.params) : Expr(0.0); };
    inst.mass = cfg.mass ? expr(cfg.mass) : Expr(1.0);

    if (cfg.family == "case1") {
        inst.spec = family::Case1{c.at("beta"), c.at("c1")};
    } else if (cfg.family == "case2") {
        if (c.at("a0") == 0.0) throw ConfigError("case2 requires --a0 != 0");
        inst.spec = family::Case2{c.at("a0"), c.at("f0")};
    } else if (cfg.family == "case3") {
        if (c.at("delta") < 0.0) throw ConfigError("case3 requires --delta >= 0");
        inst.spec = family::Case3{c.at("delta"), to_branch(cfg.branch, Branch::Plus)};
    } else if (cfg.family == "theorem4") {
        inst.spec = family::Theorem4{expr(cfg.f), to_branch(cfg.branch, Branch::Plus), c.at("v0"), std::nullopt};
    } else if (cfg.family == "case4a") {
        inst.spec = family::Case4a{c.at("v0")};
    } else if (cfg.family == "case4b") {
        inst.spec = family::Case4b{c.at("v0")};
    } else if (cfg.family == "theorem5") {
        inst.spec = family::Theorem5{expr(cfg.f), to_branch(cfg.branch, Branch::Minus), c.at("c")};
    } else if (cfg.family == "theorem6") {
        inst.spec = family::Theorem6{expr(cfg.f), c.at("c")};
    } else if (cfg.family == "theorem7") {
        inst.spec = family::Theorem7{expr(cfg.f), expr(cfg.potential), c.at("c5"), c.at("c6")};
    } else {
        throw ConfigError("unknown family '" + cfg.family + "'");
    }

    if (cfg.tol_r || cfg.tol_s || cfg.tol_o) {
        Tolerances t = default_tolerances(inst.spec);
        if (cfg.tol_r) t.riccati = *cfg.tol_r;
        if (cfg.tol_s) t.schrodinger = *cfg.tol_s;
        if (cfg.tol_o) t.oracle = *cfg.tol_o;
        inst.tolerances = t;
    }
    return inst;
}

}  // namespace pdm::cli
