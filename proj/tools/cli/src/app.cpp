#include "pdm_cli/app.hpp"

#include "pdm/catalog.hpp"
#include "pdm/errors.hpp"
#include "pdm/families.hpp"
#include "pdm/verify.hpp"
#include "pdm_cli/config.hpp"
#include "pdm_cli/output.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pdm::cli {

namespace {

using json = nlohmann::ordered_json;

std::string shortest(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, p) : std::to_string(v);
}

std::string json_scalar(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return shortest(v.get<double>());
    if (v.is_array()) {
        std::string s;
        for (const auto& item : v) s += (s.empty() ? "" : ",") + json_scalar(item, key);
        return s;
    }
    throw ConfigError("config key '" + key + "' must be a string, number or list");
}

// Keys of a JSON config file mirror the long flag names; "param" is an object.
RawOptions load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    RawOptions raw;
    const auto& known = value_flags();
    for (const auto& [key, value] : j.items()) {
        if (key == "param") {
            if (!value.is_object()) throw ConfigError("config key 'param' must be an object");
            for (const auto& [pk, pv] : value.items()) raw["param." + pk] = json_scalar(pv, pk);
        } else if (std::find(known.begin(), known.end(), key) != known.end()) {
            raw[key] = json_scalar(value, key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return raw;
}

void add_params(RawOptions& raw, const std::vector<std::string>& params) {
    for (const auto& p : params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects name=value (got '" + p + "')");
        raw["param." + p.substr(0, eq)] = p.substr(eq + 1);
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + path + "'");
    os << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// A residual with no valid points is reported as null instead of failing the run.
template <typename F>
json residual_or_null(F&& f) {
    try {
        return f();
    } catch (const NumericsError&) {
        return nullptr;
    }
}

json header(const char* command) {
    json j;
    j["schema"] = kSchemaVersion;
    j["command"] = command;
    return j;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    const Instance inst = make_instance(cfg);
    const Grid grid = make_grid(cfg.grid);
    const SolutionBundle bundle = build(inst.spec, inst.mass, cfg.psi0, cfg.setup, grid);

    json side = header("solve");
    side.update(describe_run(cfg, inst.spec));
    side["notes"] = bundle.notes;
    side["residuals"] = {{"riccati", residual_or_null([&] { return riccati_residual(bundle); })},
                         {"schrodinger", residual_or_null([&] { return schrodinger_residual(bundle); })}};
    side["rows"] = grid.size();

    std::ostringstream csv;
    write_csv(csv, bundle.m, bundle.V, bundle.u, bundle.psi);
    if (cfg.out) {
        write_text(*cfg.out, csv.str());
        write_text(*cfg.out + ".json", dump(side));
        if (cfg.json) out << dump(side);
    } else {
        out << (cfg.json ? dump(side) : csv.str());
    }
    return kPass;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const Instance inst = make_instance(cfg);
    const Grid grid = make_grid(cfg.grid);
    const VerificationReport rep = verify(inst.spec, inst.mass, cfg.psi0, cfg.setup, grid, inst.tolerances);

    json j = header("verify");
    j["run"] = describe_run(cfg, inst.spec);
    j.update(to_json(rep));
    if (cfg.out) write_text(*cfg.out, dump(j));
    if (!cfg.out || cfg.json) out << dump(j);
    return rep.pass ? kPass : kVerificationFailed;
}

int cmd_invert(const RunConfig& cfg, std::ostream& out) {
    const Grid grid = make_grid(cfg.grid);
    const double beta = cfg.constants.at("beta");
    const Expr V_e = parse_bound(*cfg.potential, cfg.params);
    const Samples V = sample(V_e, grid);
    if (!V.all_valid()) throw ConstructionError("potential undefined at some grid points");
    const Samples m = case1_mass_from_potential(V, beta, cfg.constants.at("m2"), cfg.setup);

    // (ln m)' of m = e^{beta x}/D is beta - (2/beta hbar^2) m (V - E).
    const double k = 2.0 / (beta * cfg.setup.hbar * cfg.setup.hbar);
    const Samples b = zip(m, V, [&](double mi, double vi) { return beta - k * mi * (vi - cfg.setup.energy); });
    const double m_min = m[0];
    const double C = cfg.constants.at("c1") * std::exp(2.0 * beta * grid.x_min()) / m_min;
    const double p0 = cfg.psi0 * m_min * std::exp(-beta * grid.x_min());
    const BernoulliSolution sol = solve_bernoulli(Samples::filled(grid, beta), b, C, p0);

    const double s = 2.0 / (cfg.setup.hbar * cfg.setup.hbar);
    const RiccatiCoefficients rc{zip(m, V, [&](double mi, double vi) { return s * mi * (vi - cfg.setup.energy); }), b};

    json side = header("invert");
    side["family"] = "case1";
    side["potential"] = *cfg.potential;
    side["parameters"] = {{"beta_c", beta}, {"m2", cfg.constants.at("m2")}, {"C1", cfg.constants.at("c1")}};
    side["psi0"] = cfg.psi0;
    side["setup"] = {{"hbar", cfg.setup.hbar}, {"energy", cfg.setup.energy}};
    side["grid"] = {{"x_min", cfg.grid.x_min}, {"x_max", cfg.grid.x_max}, {"n", cfg.grid.n}};
    side["anchors"] = {{"integral_base", cfg.grid.x_min}};
    side["residuals"] = {{"riccati", residual_or_null([&] { return riccati_residual(sol.u, rc); })},
                         {"schrodinger", residual_or_null([&] { return schrodinger_residual(m, b, V, sol.psi, cfg.setup); })}};
    side["rows"] = grid.size();

    std::ostringstream csv;
    write_csv(csv, m, V, sol.u, sol.psi);
    if (cfg.out) {
        write_text(*cfg.out, csv.str());
        write_text(*cfg.out + ".json", dump(side));
        if (cfg.json) out << dump(side);
    } else {
        out << (cfg.json ? dump(side) : csv.str());
    }
    return kPass;
}

std::string row_label(const RawOptions& row, const RawOptions& raw) {
    std::string label;
    for (const auto& [k, v] : row) {
        if (raw.at(k) == v) continue;
        label += (label.empty() ? "" : " ") + k + "=" + v;
    }
    return label;
}

int cmd_sweep(const RawOptions& raw, bool as_json, unsigned threads, std::ostream& out) {
    const auto rows = expand_lists(raw);
    std::vector<SweepCase> cases;
    std::optional<Tolerances> tol;
    RunConfig first;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const RunConfig cfg = resolve(Command::Sweep, rows[i], as_json);
        const Instance inst = make_instance(cfg);
        if (i == 0) {
            first = cfg;
            tol = inst.tolerances;
        }
        cases.push_back({inst.spec, inst.mass, cfg.setup, cfg.psi0, row_label(rows[i], raw)});
    }
    const Grid grid = make_grid(first.grid);
    const auto reports = sweep(cases, grid, tol, threads);

    json j = header("sweep");
    j["family"] = first.family;
    j["grid"] = {{"x_min", first.grid.x_min}, {"x_max", first.grid.x_max}, {"n", first.grid.n}};
    json list = json::array();
    bool all = true;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        json r;
        r["label"] = cases[i].label;
        r.update(to_json(reports[i]));
        list.push_back(std::move(r));
        all = all && reports[i].pass;
    }
    j["rows"] = std::move(list);
    if (first.out) write_text(*first.out, dump(j));
    if (!first.out || first.json) out << dump(j);
    return all ? kPass : kVerificationFailed;
}

int cmd_catalog(bool as_json, std::ostream& out) {
    if (as_json) {
        json j = header("catalog");
        j["entries"] = catalog_json();
        out << dump(j);
        return kPass;
    }
    for (const auto& e : mass_catalog()) {
        out << '@' << e.name << "  " << e.expression << "  [";
        bool first = true;
        for (const auto& [k, v] : e.defaults) {
            out << (first ? "" : ", ") << k << '=' << shortest(v);
            first = false;
        }
        out << "]  valid: " << e.valid_range << "  (" << e.description << ")\n";
    }
    return kPass;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Position-dependent-mass Schrodinger solver: build and verify exact solution families"};
    app.name("pdm");
    app.require_subcommand(1);
    app.fallthrough();

    std::map<std::string, std::string> flag_values;
    for (const auto& name : value_flags()) app.add_option("--" + name, flag_values[name]);
    std::vector<std::string> params;
    std::string config_path;
    bool as_json = false;
    unsigned threads = 0;
    app.add_option("--param", params, "Bind an expression parameter, name=value (repeatable)");
    app.add_option("--config", config_path, "JSON config file; flags override its keys");
    app.add_flag("--json", as_json, "Machine-readable output on stdout");
    app.add_option("--threads", threads, "Worker threads for sweep (0 = hardware concurrency)");

    auto* solve_cmd = app.add_subcommand("solve", "Build a solution and write CSV plus a JSON sidecar");
    auto* verify_cmd = app.add_subcommand("verify", "Build, verify and write a JSON report; exit 1 on failure");
    auto* invert_cmd = app.add_subcommand("invert", "Case 1 mass from a potential");
    auto* sweep_cmd = app.add_subcommand("sweep", "Verify every combination of comma-separated values");
    auto* catalog_cmd = app.add_subcommand("catalog", "List the built-in mass profiles");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "pdm: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (catalog_cmd->parsed()) return cmd_catalog(as_json, out);

        RawOptions raw;
        if (!config_path.empty()) raw = load_config_file(config_path);
        for (const auto& name : value_flags()) {
            if (app.get_option("--" + name)->count() > 0) raw[name] = flag_values[name];
        }
        add_params(raw, params);

        if (sweep_cmd->parsed()) return cmd_sweep(raw, as_json, threads, out);
        const Command cmd = solve_cmd->parsed()    ? Command::Solve
                            : verify_cmd->parsed() ? Command::Verify
                                                   : Command::Invert;
        (void)invert_cmd;
        const RunConfig cfg = resolve(cmd, raw, as_json);
        switch (cmd) {
            case Command::Solve: return cmd_solve(cfg, out);
            case Command::Verify: return cmd_verify(cfg, out);
            default: return cmd_invert(cfg, out);
        }
    } catch (const ConfigError& e) {
        err << "pdm: " << e.what() << '\n';
        return kConfigError;
    } catch (const UnboundParameter& e) {
        err << "pdm: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "pdm: construction failed: " << e.what() << '\n';
        return kConstructionError;
    }
}

}  // namespace pdm::cli
