#include "scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "qfluct/annex_oracle.hpp"
#include "qfluct/channel.hpp"
#include "qfluct/errors.hpp"
#include "qfluct/observables.hpp"
#include "qfluct/pipeline.hpp"
#include "qfluct/states.hpp"
#include "qfluct/sweeps.hpp"
#include "qfluct/urelations.hpp"

namespace qfluct::cli {

namespace {

class IoError : public Error {
public:
    using Error::Error;
};

const std::vector<std::string> global_keys{"nodes", "hbar", "tol", "seed", "out", "format"};

const std::map<std::string, std::vector<std::string>>& local_keys() {
    static const std::map<std::string, std::vector<std::string>> keys{
        {"catalog", {"state"}},
        {"audit", {"state", "pair", "delta-e"}},
        {"detcheck", {"state", "ops"}},
        {"channel", {"x0", "sigma", "k", "gamma", "lambda", "upsilon", "mass"}},
        {"classical", {"dist", "s", "width", "max-order"}},
        {"annex", {"x0", "sigma", "k", "gamma", "lambda", "upsilon", "mass", "omega"}},
        {"spins", {"n", "spin-gamma", "cases"}},
        {"sweep", {"kind", "cases"}},
    };
    return keys;
}

const std::vector<std::string> sweep_kinds{"entropy", "boundary", "determinant",
                                           "rotor",   "density",  "stability"};

Json full_json(const ScenarioConfig& c) {
    Json j;
    j["nodes"] = c.nodes;
    j["hbar"] = c.hbar;
    j["tol"] = c.tol;
    j["seed"] = c.seed;
    j["out"] = c.out;
    j["format"] = c.format;
    j["state"] = c.state;
    j["pair"] = c.pair;
    j["ops"] = c.ops;
    j["delta-e"] = c.delta_e;
    j["x0"] = c.x0;
    j["sigma"] = c.sigma;
    j["k"] = c.k;
    j["gamma"] = c.gamma;
    j["lambda"] = c.lambda;
    j["upsilon"] = c.upsilon;
    j["mass"] = c.mass;
    j["omega"] = c.omega;
    j["dist"] = c.dist;
    j["s"] = c.s;
    j["width"] = c.width;
    j["max-order"] = c.max_order;
    j["n"] = c.n;
    j["spin-gamma"] = c.spin_gamma;
    j["cases"] = c.cases;
    j["kind"] = c.kind;
    return j;
}

// Binds every option of `command` on `sub` to the fields of `c`.
void add_local_options(CLI::App& sub, const std::string& command, ScenarioConfig& c) {
    for (const auto& key : local_keys().at(command)) {
        const std::string flag = "--" + key;
        if (key == "state") sub.add_option(flag, c.state, "State spec, e.g. azimuthal:m=1");
        else if (key == "pair") sub.add_option(flag, c.pair, "Operator pair A,B (or E,t)");
        else if (key == "ops") sub.add_option(flag, c.ops, "Comma-separated operator list");
        else if (key == "delta-e") sub.add_option(flag, c.delta_e, "Energy spread for the E,t pair");
        else if (key == "x0") sub.add_option(flag, c.x0, "Packet center");
        else if (key == "sigma") sub.add_option(flag, c.sigma, "Packet width")->check(CLI::PositiveNumber);
        else if (key == "k") sub.add_option(flag, c.k, "Packet wave number");
        else if (key == "gamma") sub.add_option(flag, c.gamma, "Density kernel width")->check(CLI::NonNegativeNumber);
        else if (key == "lambda") sub.add_option(flag, c.lambda, "Current kernel width")->check(CLI::NonNegativeNumber);
        else if (key == "upsilon") sub.add_option(flag, c.upsilon, "Current speed scale (0: hbar k / m)")->check(CLI::NonNegativeNumber);
        else if (key == "mass") sub.add_option(flag, c.mass, "Particle mass")->check(CLI::PositiveNumber);
        else if (key == "omega") sub.add_option(flag, c.omega, "Oscillator frequency")->check(CLI::PositiveNumber);
        else if (key == "dist") sub.add_option(flag, c.dist, "Input distribution")->check(CLI::IsMember({"gaussian", "uniform"}));
        else if (key == "s") sub.add_option(flag, c.s, "Gaussian input spread")->check(CLI::PositiveNumber);
        else if (key == "width") sub.add_option(flag, c.width, "Kernel width")->check(CLI::NonNegativeNumber);
        else if (key == "max-order") sub.add_option(flag, c.max_order, "Highest central moment")->check(CLI::Range(2, 6));
        else if (key == "n") sub.add_option(flag, c.n, "Number of spins")->check(CLI::Range(1, 8));
        else if (key == "spin-gamma") sub.add_option(flag, c.spin_gamma, "Gyromagnetic factor");
        else if (key == "cases") sub.add_option(flag, c.cases, "Random cases (0: default)")->check(CLI::NonNegativeNumber);
        else if (key == "kind") sub.add_option(flag, c.kind, "Sweep kind")->check(CLI::IsMember(sweep_kinds));
    }
}

void build_app(CLI::App& app, ScenarioConfig& c) {
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.fallthrough();
    app.require_subcommand(1);
    app.set_help_flag("-h,--help", "Print help");
    app.add_option("--nodes", c.nodes, "Grid nodes per axis (0: default)");
    app.add_option("--hbar", c.hbar, "Reduced Planck constant")->check(CLI::PositiveNumber);
    app.add_option("--tol", c.tol, "Tolerance (0: command default)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", c.seed, "Seed for random sweeps");
    app.add_option("--out", c.out, "Write the report to this path");
    app.add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.footer("--config <path> reads a JSON document mirroring the flags; explicit flags win.");

    const std::map<std::string, std::string> help{
        {"catalog", "Closed-form catalog values against numerics"},
        {"audit", "Uncertainty-relation audit of one state and pair"},
        {"detcheck", "Correlation determinant of an observable set"},
        {"channel", "Gaussian packet through a density/current channel"},
        {"classical", "Classical distribution through a Gaussian kernel"},
        {"annex", "Packet and oscillator channel runs against closed forms"},
        {"spins", "Spin magnetization commutators and density matrices"},
        {"sweep", "Seeded property sweeps"},
    };
    for (const auto& [name, text] : help) {
        auto* sub = app.add_subcommand(name, text);
        add_local_options(*sub, name, c);
        sub->callback([&c, name = name] { c.command = name; });
    }
}

std::vector<std::string> tokens_from_json(const Json& doc, std::string& command) {
    if (!doc.is_object()) throw ParseError("config document must be a JSON object");
    std::vector<std::string> tokens;
    for (const auto& [key, value] : doc.items()) {
        if (key == "command") {
            if (!value.is_string()) throw ParseError("config 'command' must be a string");
            command = value.get<std::string>();
            continue;
        }
        std::string text;
        if (value.is_string()) {
            text = value.get<std::string>();
            if (text.empty()) continue;
        }
        else if (value.is_number()) text = value.dump();
        else throw ParseError("config value for '" + key + "' must be a string or number");
        tokens.push_back("--" + key + "=" + text);
    }
    return tokens;
}

Json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError("config file '" + path + "': " + e.what());
    }
}

// Program name first; the command (from argv or config) is placed ahead of the
// config tokens, which precede the explicit flags so that the latter win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::vector<std::string> config_tokens;
    std::string config_command;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config" || a.rfind("--config=", 0) == 0) {
            std::string path;
            if (a == "--config") {
                if (i + 1 >= args.size()) throw ParseError("--config needs a path");
                path = args[++i];
            } else {
                path = a.substr(9);
            }
            auto more = tokens_from_json(read_config_file(path), config_command);
            config_tokens.insert(config_tokens.end(), more.begin(), more.end());
        } else {
            rest.push_back(a);
        }
    }
    const auto& keys = local_keys();
    std::vector<std::string> out;
    auto cmd = std::find_if(rest.begin(), rest.end(), [&](const std::string& a) { return keys.count(a) > 0; });
    if (cmd != rest.end()) {
        out.assign(rest.begin(), cmd + 1);
        out.insert(out.end(), config_tokens.begin(), config_tokens.end());
        out.insert(out.end(), cmd + 1, rest.end());
    } else {
        if (!config_command.empty()) out.push_back(config_command);
        out.insert(out.end(), config_tokens.begin(), config_tokens.end());
        out.insert(out.end(), rest.begin(), rest.end());
    }
    return out;
}

void parse_into(CLI::App& app, std::vector<std::string> tokens) {
    std::reverse(tokens.begin(), tokens.end());
    app.parse(tokens);
}

// ---------------------------------------------------------------------------
// Reports

struct Report {
    Json json;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    bool pass = true;
};

std::string complex_text(complex z) {
    return format_number(z.real()) + (z.imag() < 0 ? "-" : "+") + format_number(std::abs(z.imag())) + "i";
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::vector<std::string>>& rows) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
    } else if (j.is_string()) {
        rows.push_back({prefix, j.get<std::string>()});
    } else {
        rows.push_back({prefix, j.dump()});
    }
}

std::string render(const Report& r, const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        os << r.json.dump(2) << '\n';
        return os.str();
    }
    auto header = r.header;
    auto rows = r.rows;
    if (header.empty()) {
        header = {"key", "value"};
        flatten(r.json, "", rows);
    }
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
        os << '\n';
    };
    line(header);
    for (const auto& row : rows) line(row);
    return os.str();
}

Json table_json(const SweepTable& t) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        Json row;
        for (std::size_t c = 0; c < t.header.size() && c < t.rows[i].size(); ++c) row[t.header[c]] = t.rows[i][c];
        rows.push_back(row);
    }
    Json j;
    j["kind"] = t.kind;
    j["cases"] = t.rows.size();
    j["pass"] = t.pass();
    j["worst_margin"] = json_number(t.worst_margin);
    j["rows"] = rows;
    return j;
}

std::string grid_kind_name(DomainKind k) {
    switch (k) {
        case DomainKind::segment: return "segment";
        case DomainKind::circle: return "circle";
        case DomainKind::plane: return "plane";
        case DomainKind::sphere: return "sphere";
    }
    return "unknown";
}

Json grid_json(const Grid& g) {
    Json j;
    j["kind"] = grid_kind_name(g.kind());
    Json axes = Json::array();
    for (std::size_t a = 0; a < g.rank(); ++a) axes.push_back(g.axis(a).size());
    j["nodes"] = axes;
    return j;
}

// Operators whose parameters come from the state when the text leaves them out.
std::vector<OperatorSpec> resolve_operators(const std::string& text, const StateSpec& spec) {
    auto ops = parse_operator_list(text);
    if (const auto* q = std::get_if<TorsionPendulum>(&spec); q && text.find("H_qtp(") == std::string::npos) {
        for (auto& op : ops) {
            if (op.kind == OpKind::H_qtp) {
                op.inertia = q->I;
                op.omega = q->omega;
            }
        }
    }
    return ops;
}

std::string natural_operators(const StateSpec& spec) {
    const std::string kind = state_kind(spec);
    if (kind == "azimuthal" || kind == "rotor") return "Lz,phi,H_rotor";
    if (kind == "phase") return "N,phase";
    if (kind == "qtp") return "Lz,phi,H_qtp";
    if (kind == "gaussian") return "x,p,H_osc";
    if (kind == "box2d") return "px,py";
    return "x,p";
}

StateSpec require_state(const ScenarioConfig& c) {
    if (c.state.empty()) throw ParseError(c.command + " needs --state");
    auto spec = parse_state(c.state);
    validate_state(spec);
    return spec;
}

double rel_error(complex got, complex want) {
    const double d = std::abs(got - want);
    return std::abs(want) > 0.0 ? d / std::abs(want) : d;
}

// ---------------------------------------------------------------------------
// Commands

Report run_catalog(const ScenarioConfig& c) {
    const double tol = c.tol > 0.0 ? c.tol : 1e-3;
    std::vector<StateSpec> states;
    if (c.state.empty()) states = catalog_states();
    else states.push_back(require_state(c));

    Report r;
    r.header = {"state", "label", "closed_form", "numeric", "error", "status"};
    Json list = Json::array();
    for (const auto& spec : states) {
        validate_state(spec);
        const auto card = closed_form_card(spec, c.hbar);
        auto grid = default_grid(spec, c.nodes, c.hbar);
        auto psi = sample(spec, grid, c.hbar);

        std::vector<std::string> names;
        for (const auto& e : card.entries) {
            std::string args = e.label.substr(e.label.find(':') + 1);
            std::stringstream ss(args);
            std::string name;
            while (std::getline(ss, name, ',')) {
                if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
            }
        }
        std::string joined;
        for (const auto& n : names) joined += (joined.empty() ? "" : ",") + n;
        const auto ops = resolve_operators(joined, spec);
        const auto set = estimator_set(ops, psi, c.hbar);
        auto op_of = [&](const std::string& name) {
            return ops[static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin())];
        };

        Json entries = Json::array();
        for (const auto& e : card.entries) {
            const auto colon = e.label.find(':');
            const std::string what = e.label.substr(0, colon);
            const std::string args = e.label.substr(colon + 1);
            const auto comma = args.find(',');
            const std::string a = args.substr(0, comma);
            const std::string b = comma == std::string::npos ? a : args.substr(comma + 1);
            complex numeric;
            if (what == "mean") numeric = set.mean(a);
            else if (what == "delta") numeric = set.delta(a);
            else if (what == "corr") numeric = set.corr(a, b);
            else if (what == "corr_abs") numeric = std::abs(set.corr(a, b));
            else if (what == "gap") numeric = condition_gap(op_of(a), op_of(b), psi, c.hbar);
            else throw DomainError("unknown card label '" + e.label + "'");
            const double err = rel_error(numeric, e.value);
            const bool ok = err <= tol;
            r.pass = r.pass && ok;
            r.rows.push_back({format_state(spec), e.label, complex_text(e.value), complex_text(numeric),
                              format_number(err), ok ? "PASS" : "FAIL"});
            entries.push_back({{"label", e.label},
                               {"source", e.source},
                               {"closed_form", json_complex(e.value)},
                               {"numeric", json_complex(numeric)},
                               {"error", json_number(err)},
                               {"pass", ok}});
        }
        list.push_back({{"state", format_state(spec)}, {"grid", grid_json(*grid)}, {"entries", entries}});
    }
    r.json["tolerance"] = json_number(tol);
    r.json["states"] = list;
    r.json["pass"] = r.pass;
    return r;
}

Report run_audit(const ScenarioConfig& c) {
    Report r;
    std::string pair = c.pair;
    pair.erase(std::remove(pair.begin(), pair.end(), ' '), pair.end());
    if (pair == "E,t" || pair == "t,E") {
        if (c.delta_e < 0.0) throw DomainError("--delta-e must be nonnegative");
        r.json["verdict"] = to_json(energy_time_verdict(c.delta_e, c.hbar));
        return r;
    }
    const auto spec = require_state(c);
    const auto ops = resolve_operators(pair, spec);
    if (ops.size() != 2) throw ParseError("--pair needs exactly two operators");
    auto grid = default_grid(spec, c.nodes, c.hbar);
    auto psi = sample(spec, grid, c.hbar);
    const auto verdict = audit_pair(ops[0], ops[1], psi, c.hbar, c.tol);

    r.json["state"] = format_state(spec);
    r.json["grid"] = grid_json(*grid);
    r.json["tolerance"] = json_number(c.tol > 0.0 ? c.tol : gap_tolerance(*grid, c.hbar));
    r.json["verdict"] = to_json(verdict);
    r.json["estimators"] = to_json(estimator_set(ops, psi, c.hbar));
    if (grid->kind() == DomainKind::circle) r.json["boundary_rhs"] = json_number(boundary_rhs(psi, c.hbar));
    r.json["closed_form"] = to_json(closed_form_card(spec, c.hbar));
    return r;
}

Report run_detcheck(const ScenarioConfig& c) {
    const auto spec = require_state(c);
    const auto ops = resolve_operators(c.ops.empty() ? natural_operators(spec) : c.ops, spec);
    auto grid = default_grid(spec, c.nodes, c.hbar);
    auto psi = sample(spec, grid, c.hbar);
    const auto set = estimator_set(ops, psi, c.hbar);
    const auto det = correlation_determinant(set);
    Report r;
    r.pass = det.nonnegative;
    r.json["state"] = format_state(spec);
    r.json["grid"] = grid_json(*grid);
    r.json["estimators"] = to_json(set);
    r.json["determinant"] = json_number(det.value);
    r.json["nonnegative"] = det.nonnegative;
    return r;
}

PacketChannelParams packet_params(const ScenarioConfig& c) {
    PacketChannelParams p;
    p.packet = GaussianPacket{c.x0, c.sigma, c.k};
    p.gamma = c.gamma;
    p.lambda = c.lambda;
    p.mass = c.mass;
    p.hbar = c.hbar;
    if (c.upsilon > 0.0) p.upsilon = c.upsilon;
    p.nodes = c.nodes;
    return p;
}

Report run_channel(const ScenarioConfig& c) {
    const auto run = run_packet_channel(packet_params(c));
    Report r;
    r.json["state"] = format_state(GaussianPacket{c.x0, c.sigma, c.k});
    r.json["grid"] = grid_json(*run.grid);
    r.json["upsilon"] = json_number(run.upsilon);
    r.json["in"] = to_json(run.in_set);
    r.json["out"] = to_json(run.out_set);
    r.json["indicators"] = to_json(run.report);
    return r;
}

Report run_classical(const ScenarioConfig& c) {
    const double reach = std::max(1.0, 8.0 * std::max(c.s, c.width));
    const bool uniform = c.dist == "uniform";
    auto grid = Grid::segment(-reach, uniform ? 1.0 + reach : reach, c.nodes ? c.nodes : 2048);
    std::vector<double> w(grid->size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double x = grid->coordinate(i, 0);
        w[i] = uniform ? (x >= 0.0 && x <= 1.0 ? 1.0 : 0.0) : std::exp(-x * x / (2.0 * c.s * c.s));
    }
    const double total = integrate(RealField(grid, w));
    for (auto& v : w) v /= total;
    const RealField w_in(grid, std::move(w));
    const auto w_out = classical_transform(w_in, make_gaussian_kernel(grid, c.width));
    Report r;
    r.json["distribution"] = c.dist;
    r.json["grid"] = grid_json(*grid);
    r.json["indicators"] = to_json(classical_error_indicators(w_in, w_out, c.max_order));
    return r;
}

void add_check_rows(Report& r, const std::string& run, const CheckReport& check) {
    for (const auto& row : check.rows) {
        r.rows.push_back({run, row.label, complex_text(row.expected), complex_text(row.actual),
                          format_number(row.error), row.pass ? "PASS" : "FAIL"});
    }
    r.pass = r.pass && check.pass;
}

Report run_annex(const ScenarioConfig& c) {
    const double tol = c.tol > 0.0 ? c.tol : 1e-3;
    const auto run = run_packet_channel(packet_params(c));
    const auto packet_oracle = gaussian_packet_oracle(c.x0, c.sigma, c.k, c.gamma, c.lambda, c.hbar, c.mass);
    const auto packet_check = crosscheck(packet_oracle, run.numeric, tol);

    const auto osc = run_oscillator_channel(c.mass, c.omega, c.gamma, c.hbar, c.nodes);
    const auto osc_oracle = oscillator_oracle(c.mass, c.omega, c.gamma, c.hbar);
    const auto osc_check = crosscheck(osc_oracle, osc.numeric, tol);

    Report r;
    r.header = {"run", "label", "oracle", "numeric", "error", "status"};
    add_check_rows(r, "gaussian", packet_check);
    add_check_rows(r, "oscillator", osc_check);
    r.json["tolerance"] = json_number(tol);
    r.json["gaussian"] = {{"oracle", to_json(packet_oracle)}, {"check", to_json(packet_check)}};
    r.json["oscillator"] = {{"oracle", to_json(osc_oracle)}, {"check", to_json(osc_check)}};
    r.json["pass"] = r.pass;
    return r;
}

Report run_spins(const ScenarioConfig& c) {
    const double tol = c.tol > 0.0 ? c.tol : 1e-12;
    const auto m = magnetization_operators(c.n, c.spin_gamma, c.hbar);
    const double residual = magnetization_commutator_residual(m, c.spin_gamma, c.hbar);
    const auto table = density_matrix_sweep(c.cases ? c.cases : 50, c.n, c.seed, c.hbar);
    Report r;
    r.pass = residual <= tol && table.pass();
    r.json["n"] = c.n;
    r.json["dimension"] = m.front().matrix.rows();
    r.json["commutator_residual"] = json_number(residual);
    r.json["residual_pass"] = residual <= tol;
    r.json["density_matrices"] = table_json(table);
    return r;
}

Report run_sweep(const ScenarioConfig& c) {
    const int cases = c.cases ? c.cases : 100;
    SweepTable t;
    if (c.kind == "entropy") t = entropy_sweep(cases, c.seed, c.hbar);
    else if (c.kind == "boundary") t = boundary_sweep(cases, c.seed, c.nodes, c.hbar);
    else if (c.kind == "determinant") t = determinant_sweep(c.hbar);
    else if (c.kind == "rotor") t = rotor_search(cases, c.seed, c.nodes, c.hbar);
    else if (c.kind == "density") t = density_matrix_sweep(c.cases ? c.cases : 50, 3, c.seed, c.hbar);
    else t = stability_sweep(c.hbar);
    Report r;
    r.header = t.header;
    r.rows = t.rows;
    r.pass = t.pass();
    r.json = table_json(t);
    return r;
}

int status_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return parse_failure;
    if (dynamic_cast<const IoError*>(&e)) return io_failure;
    if (dynamic_cast<const std::ios_base::failure*>(&e)) return io_failure;
    if (dynamic_cast<const ValidityError*>(&e) || dynamic_cast<const DomainError*>(&e)) {
        return validity_failure;
    }
    return validity_failure;
}

}  // namespace

const std::vector<std::string>& command_keys(const std::string& command) {
    static std::map<std::string, std::vector<std::string>> cache;
    auto it = local_keys().find(command);
    if (it == local_keys().end()) throw ParseError("unknown command '" + command + "'");
    auto& keys = cache[command];
    if (keys.empty()) {
        keys = global_keys;
        keys.insert(keys.end(), it->second.begin(), it->second.end());
    }
    return keys;
}

Json to_json(const ScenarioConfig& config) {
    const Json all = full_json(config);
    Json j;
    j["command"] = config.command;
    for (const auto& key : command_keys(config.command)) j[key] = all[key];
    return j;
}

ScenarioConfig config_from_json(const Json& doc) {
    std::string command;
    auto tokens = tokens_from_json(doc, command);
    if (command.empty()) throw ParseError("config document needs a 'command'");
    tokens.insert(tokens.begin(), command);
    ScenarioConfig c;
    CLI::App app{"qfluct"};
    build_app(app, c);
    try {
        parse_into(app, tokens);
    } catch (const CLI::ParseError& e) {
        throw ParseError(e.what());
    }
    return c;
}

ScenarioConfig parse_command_line(const std::vector<std::string>& args) {
    ScenarioConfig c;
    CLI::App app{"qfluct"};
    build_app(app, c);
    try {
        parse_into(app, expand_config(args));
    } catch (const CLI::ParseError& e) {
        throw ParseError(e.what());
    }
    return c;
}

int run_scenario(const ScenarioConfig& config, std::ostream& out, std::ostream& err) {
    Report r;
    const auto& cmd = config.command;
    if (cmd == "catalog") r = run_catalog(config);
    else if (cmd == "audit") r = run_audit(config);
    else if (cmd == "detcheck") r = run_detcheck(config);
    else if (cmd == "channel") r = run_channel(config);
    else if (cmd == "classical") r = run_classical(config);
    else if (cmd == "annex") r = run_annex(config);
    else if (cmd == "spins") r = run_spins(config);
    else if (cmd == "sweep") r = run_sweep(config);
    else throw ParseError("unknown command '" + cmd + "'");

    Json doc;
    doc["config"] = to_json(config);
    for (const auto& [k, v] : r.json.items()) doc[k] = v;
    if (!doc.contains("pass")) doc["pass"] = r.pass;
    r.json = std::move(doc);

    std::string format = config.format;
    if (format.empty()) format = (cmd == "annex" || cmd == "sweep") ? "csv" : "json";
    const std::string text = render(r, format);
    if (config.out.empty()) {
        out << text;
    } else {
        std::ofstream file(config.out, std::ios::binary);
        if (!file) throw IoError("cannot open '" + config.out + "' for writing");
        file << text;
        if (!file.flush()) throw IoError("failed writing '" + config.out + "'");
    }
    if (!r.pass) err << "qfluct: " << cmd << ": tolerance check failed\n";
    return r.pass ? ok : tolerance_failure;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    ScenarioConfig c;
    CLI::App app{"Fluctuation estimators, uncertainty-relation audits and measurement channels",
                 "qfluct"};
    build_app(app, c);
    try {
        parse_into(app, expand_config(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "qfluct: " << e.what() << '\n';
        return parse_failure;
    } catch (const std::exception& e) {
        err << "qfluct: " << e.what() << '\n';
        return status_for(e);
    }
    try {
        return run_scenario(c, out, err);
    } catch (const std::exception& e) {
        err << "qfluct: " << e.what() << '\n';
        return status_for(e);
    }
}

}  // namespace qfluct::cli
