#include "amput_cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace amput::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double to_number(const std::string& s, const std::string& where) {
    std::string t = trim(s);
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size()) {
        throw ConfigError(where + ": not a number: '" + t + "'");
    }
    return v;
}

int to_int(const std::string& s, const std::string& where) {
    double v = to_number(s, where);
    if (v != static_cast<double>(static_cast<int>(v))) throw ConfigError(where + ": expected an integer");
    return static_cast<int>(v);
}

bool to_bool(const std::string& s, const std::string& where) {
    std::string t = lower(trim(s));
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    throw ConfigError(where + ": expected true or false");
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

std::vector<double> number_list(const std::string& s, const std::string& where) {
    std::string t = s;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::vector<double> out;
    for (const auto& w : split_ws(t)) out.push_back(to_number(w, where));
    return out;
}

const std::set<std::string> kCurveNames = {"r", "q", "sigma", "lambda", "phi", "theta1", "theta2", "p"};

}  // namespace

const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::exponential_jump: return "exponential-jump";
        case ModelKind::kou: return "kou";
        case ModelKind::no_jump: return "no-jump";
    }
    return "?";
}

ParamCurve parse_curve(const std::string& spec) {
    auto w = split_ws(spec);
    if (w.empty()) throw ConfigError("empty curve declaration");
    std::string kind = lower(w[0]);
    std::vector<double> c;
    for (std::size_t i = 1; i < w.size(); ++i) c.push_back(to_number(w[i], "curve '" + spec + "'"));
    auto need = [&](std::size_t n) {
        if (c.size() != n) {
            throw ConfigError("curve '" + spec + "': " + kind + " takes " + std::to_string(n) + " coefficient(s)");
        }
    };
    try {
        if (kind == "constant") {
            need(1);
            return ParamCurve::constant(c[0]);
        }
        if (kind == "exp_decay") {
            need(2);
            return ParamCurve::exp_decay(c[0], c[1]);
        }
        if (kind == "linear") {
            need(2);
            return ParamCurve::linear(c[0], c[1]);
        }
        if (kind == "quadratic") {
            need(2);
            return ParamCurve::quadratic(c[0], c[1]);
        }
        if (kind == "tabulated") {
            if (c.size() < 4 || c.size() % 2 != 0) throw ConfigError("curve '" + spec + "': tabulated takes t v pairs");
            std::vector<double> t, v;
            for (std::size_t i = 0; i < c.size(); i += 2) {
                t.push_back(c[i]);
                v.push_back(c[i + 1]);
            }
            return ParamCurve::tabulated(t, v);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError("curve '" + spec + "': " + e.what());
    }
    throw ConfigError("unknown curve kind '" + w[0] + "'");
}

ParamSet RunConfig::params_for(double K) const {
    ParamSet p;
    auto get = [&](const char* name) -> const ParamCurve& {
        auto it = curves.find(name);
        if (it == curves.end()) throw ConfigError(std::string("missing curve '") + name + "'");
        return it->second;
    };
    p.r = get("r");
    p.q = get("q");
    p.sigma = get("sigma");
    p.T = T;
    p.K = K;
    p.S_star = K;
    switch (model) {
        case ModelKind::exponential_jump:
            p.lam = get("lambda");
            p.phi = get("phi");
            break;
        case ModelKind::kou:
            p.lam = get("lambda");
            p.phi = curves.count("phi") ? curves.at("phi") : ParamCurve::constant(1.0);
            p.kou = KouCurves{get("theta1"), get("theta2"), get("p")};
            break;
        case ModelKind::no_jump:
            p.lam = ParamCurve::constant(0.0);
            p.phi = curves.count("phi") ? curves.at("phi") : ParamCurve::constant(1.0);
            break;
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid parameters: ") + e.what());
    }
    return p;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    bool have_strikes = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto cpos = line.find_first_of("#;");
        if (cpos != std::string::npos) line.erase(cpos);
        line = trim(line);
        if (line.empty()) continue;
        std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = lower(trim(line.substr(1, line.size() - 2)));
            static const std::set<std::string> known = {"model", "curves", "strikes", "solver", "xi",
                                                        "fd", "tree", "compare", "output"};
            if (!known.count(section)) throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        std::string key = lower(trim(line.substr(0, eq)));
        std::string val = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(where + ": key outside any section");
        where += " [" + section + "] " + key;
        auto unknown = [&]() { return ConfigError(where + ": unknown key"); };

        if (section == "model") {
            if (key == "type") {
                std::string v = lower(val);
                if (v == "exponential-jump" || v == "exponential") cfg.model = ModelKind::exponential_jump;
                else if (v == "kou") cfg.model = ModelKind::kou;
                else if (v == "no-jump" || v == "none") cfg.model = ModelKind::no_jump;
                else throw ConfigError(where + ": unknown model '" + val + "'");
            } else if (key == "t") {
                cfg.T = to_number(val, where);
            } else {
                throw unknown();
            }
        } else if (section == "curves") {
            if (!kCurveNames.count(key)) throw unknown();
            cfg.curves[key] = parse_curve(val);
        } else if (section == "strikes") {
            if (key != "values") throw unknown();
            cfg.strikes = number_list(val, where);
            have_strikes = true;
        } else if (section == "solver") {
            if (key == "m") cfg.solver.M = to_int(val, where);
            else if (key == "node_tol") cfg.solver.node_tol = to_number(val, where);
            else if (key == "max_iters") cfg.solver.max_iters = to_int(val, where);
            else if (key == "root_tol") cfg.solver.root_tol = to_number(val, where);
            else if (key == "grid") {
                try {
                    cfg.solver.grid = grid_kind_from_string(val);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(where + ": " + e.what());
                }
            } else if (key == "l") cfg.solver.L = to_number(val, where);
            else if (key == "slice_refine") cfg.solver.slice_refine = to_int(val, where);
            else if (key == "allow_no_jump") cfg.solver.allow_no_jump = to_bool(val, where);
            else throw unknown();
        } else if (section == "xi") {
            if (key == "points") cfg.solver.xi_points = to_int(val, where);
            else if (key == "truncation") cfg.solver.xi_trunc = to_number(val, where);
            else throw unknown();
        } else if (section == "fd") {
            if (key == "x_lo") cfg.fd.x_lo = to_number(val, where);
            else if (key == "x_hi") cfg.fd.x_hi = to_number(val, where);
            else if (key == "nx") cfg.fd.Nx = to_int(val, where);
            else if (key == "nt") cfg.fd.Nt = to_int(val, where);
            else if (key == "penalty") cfg.fd.penalty = to_number(val, where);
            else if (key == "rannacher_steps") cfg.fd.rannacher_steps = to_int(val, where);
            else throw unknown();
        } else if (section == "tree") {
            if (key == "steps") cfg.tree_steps = to_int(val, where);
            else throw unknown();
        } else if (section == "compare") {
            if (key == "price_atm") cfg.tol.price_atm = to_number(val, where);
            else if (key == "price_wing") cfg.tol.price_wing = to_number(val, where);
            else if (key == "boundary") cfg.tol.boundary = to_number(val, where);
            else if (key == "tree_fd") cfg.tol.tree_fd = to_number(val, where);
            else throw unknown();
        } else if (section == "output") {
            if (key == "boundary") cfg.out.boundary = val;
            else if (key == "diagnostics") cfg.out.diagnostics = val;
            else if (key == "prices") cfg.out.prices = val;
            else if (key == "compare") cfg.out.compare = val;
            else if (key == "oracle") cfg.out.oracle = val;
            else throw unknown();
        }
    }

    if (!have_strikes || cfg.strikes.empty()) throw ConfigError("no strikes given");
    for (double K : cfg.strikes) {
        if (!(K > 0.0)) throw ConfigError("strikes must be positive");
    }
    if (cfg.solver.xi_points < 5) throw ConfigError("xi points must be at least 5");
    if (!(cfg.T > 0.0)) throw ConfigError("T must be positive");
    try {
        cfg.solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("solver settings: ") + e.what());
    }
    if (cfg.tree_steps < 10) throw ConfigError("tree steps must be at least 10");
    if (cfg.fd.Nx < 50 || cfg.fd.Nt < 50) throw ConfigError("fd Nx and Nt must be at least 50");
    if (!(cfg.fd.x_lo < 0.0 && cfg.fd.x_hi > 0.0)) throw ConfigError("fd grid must straddle the strike");
    // Build once so that missing or invalid curves fail at parse time.
    cfg.params_for(cfg.strikes.front());
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

}  // namespace amput::cli
