#include "amput_cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <variant>

#include "amput/oracle.hpp"
#include "amput/pricer.hpp"
#include "amput/volterra.hpp"

namespace amput::cli {

namespace {

using Cell = std::variant<double, std::string>;

class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<Cell> row) { rows_.push_back(std::move(row)); }

    bool finite() const {
        for (const auto& r : rows_) {
            for (const auto& c : r) {
                if (const double* d = std::get_if<double>(&c); d && !std::isfinite(*d)) return false;
            }
        }
        return true;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        write_row(f, header_);
        for (const auto& r : rows_) {
            std::vector<std::string> s;
            for (const auto& c : r) {
                s.push_back(std::holds_alternative<double>(c) ? format_number(std::get<double>(c)) : std::get<std::string>(c));
            }
            write_row(f, s);
        }
    }

private:
    static void write_row(std::ostream& o, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) o << (i ? "," : "") << cells[i];
        o << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

Streams streams(const CommandOptions& opt) {
    return {opt.out ? *opt.out : std::cout, opt.err ? *opt.err : std::cerr};
}

struct StrikeRun {
    double K = 0.0;
    std::unique_ptr<Model> model;
    BoundarySolution sol;
    double wall = 0.0;
    std::string error;
    int node = -1;
    bool singular = false;
};

StrikeRun solve_strike(const RunConfig& cfg, double K) {
    StrikeRun run;
    run.K = K;
    auto t0 = std::chrono::steady_clock::now();
    try {
        run.model = std::make_unique<Model>(cfg.params_for(K));
        run.sol = solve_boundary(*run.model, cfg.solver);
    } catch (const SolverError& e) {
        run.error = e.what();
        run.node = e.node();
    } catch (const SingularLimitError& e) {
        run.error = e.what();
        run.singular = true;
    } catch (const std::exception& e) {
        run.error = e.what();
    }
    run.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

std::vector<StrikeRun> solve_all(const RunConfig& cfg) {
    std::vector<std::future<StrikeRun>> jobs;
    for (double K : cfg.strikes) jobs.push_back(std::async(std::launch::async, solve_strike, std::cref(cfg), K));
    std::vector<StrikeRun> runs;
    for (auto& j : jobs) runs.push_back(j.get());
    return runs;
}

// First failed strike, in config order, as an exit code with a message.
int report_failures(const std::vector<StrikeRun>& runs, std::ostream& err) {
    for (const auto& r : runs) {
        if (r.error.empty()) continue;
        err << "error: strike " << format_number(r.K) << ": " << r.error;
        if (r.node >= 0) err << " (node " << r.node << ")";
        err << '\n';
        return solver_error;
    }
    return ok;
}

int finish(const std::vector<std::pair<const Table*, std::string>>& files, const CommandOptions& opt,
           std::ostream& err) {
    for (const auto& [t, name] : files) {
        if (!t->finite()) {
            err << "error: non-finite value in " << name << "\n";
            return non_finite;
        }
    }
    std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    for (const auto& [t, name] : files) t->write(dir / name);
    return ok;
}

template <class F>
int guarded(const CommandOptions& opt, F&& body) {
    auto [out, err] = streams(opt);
    (void)out;
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return solver_error;
    }
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int cmd_boundary(const std::string& config_path, const CommandOptions& opt) {
    return guarded(opt, [&]() {
        auto [out, err] = streams(opt);
        RunConfig cfg = load_config(config_path);
        if (cfg.model == ModelKind::kou) throw ConfigError("the boundary solver supports the exponential-jump model only");
        auto runs = solve_all(cfg);
        if (int rc = report_failures(runs, err)) return rc;

        Table b({"strike", "i", "t", "tau", "S_B", "x_B", "Pxx", "iterations"});
        Table d({"strike", "i", "iterations", "residual_evals", "residual_xB", "residual_Pxx", "converged", "gamma_warning"});
        for (const auto& r : runs) {
            const auto& bs = r.sol.bs;
            for (std::size_t i = 0; i < bs.tau.size(); ++i) {
                const auto& dg = r.sol.diag[i];
                double t = r.model->time_change().t_of_tau(bs.tau[i]);
                b.add({r.K, double(i), t, bs.tau[i], r.model->S_star() * std::exp(bs.x_B[i]), bs.x_B[i], bs.Pxx[i],
                       double(dg.iterations)});
                d.add({r.K, double(i), double(dg.iterations), double(dg.residual_evals), dg.residual_xB, dg.residual_Pxx,
                       std::string(dg.converged ? "1" : "0"), std::string(dg.gamma_warning ? "1" : "0")});
                if (dg.gamma_warning && opt.verbose) {
                    err << "warning: strike " << format_number(r.K) << " node " << i << ": negative boundary gamma\n";
                }
            }
        }
        if (int rc = finish({{&b, cfg.out.boundary}, {&d, cfg.out.diagnostics}}, opt, err)) return rc;
        for (const auto& r : runs) {
            int worst = 0;
            for (const auto& dg : r.sol.diag) worst = std::max(worst, dg.iterations);
            out << "strike " << r.K << ": " << r.sol.bs.tau.size() << " nodes, max iterations " << worst
                << ", wall " << r.wall << " s\n";
        }
        return int(ok);
    });
}

int cmd_price(const std::string& config_path, double t, const std::vector<double>& spots, const CommandOptions& opt) {
    return guarded(opt, [&]() {
        auto [out, err] = streams(opt);
        RunConfig cfg = load_config(config_path);
        if (cfg.model == ModelKind::kou) throw ConfigError("the boundary solver supports the exponential-jump model only");
        if (spots.empty()) throw ConfigError("no spots given");
        for (double S : spots) {
            if (!(S > 0.0)) throw ConfigError("spots must be positive");
        }
        if (!(t >= 0.0 && t <= cfg.T)) throw ConfigError("t must lie in [0, T]");
        auto runs = solve_all(cfg);
        if (int rc = report_failures(runs, err)) return rc;

        Table p({"strike", "t", "S", "price", "intrinsic", "exercised", "ode_residual"});
        for (const auto& r : runs) {
            PriceResult pr = price_query(*r.model, r.sol.bs, PriceQuery{t, spots});
            for (std::size_t j = 0; j < spots.size(); ++j) {
                p.add({r.K, t, spots[j], pr.prices[j], std::max(r.K - spots[j], 0.0),
                       std::string(pr.exercised[j] ? "1" : "0"), pr.ode_residual});
            }
            if (opt.verbose) out << "strike " << r.K << ": S_B(t) = " << pr.boundary_value << '\n';
        }
        return finish({{&p, cfg.out.prices}}, opt, err);
    });
}

int cmd_compare(const std::string& config_path, const CommandOptions& opt) {
    return guarded(opt, [&]() {
        auto [out, err] = streams(opt);
        RunConfig cfg = load_config(config_path);
        if (cfg.model == ModelKind::kou) throw ConfigError("compare needs the exponential-jump or no-jump model");
        Table c({"strike", "quantity", "t", "S", "value", "reference", "abs_diff", "rel_diff", "criterion",
                 "tolerance", "pass"});
        struct Worst {
            double ratio = 0.0;
            std::string what;
        } worst;
        auto row = [&](double K, const std::string& qty, double t, double S, double v, double ref, bool relative,
                       double tol) {
            double ad = std::abs(v - ref);
            double rd = ad / std::max(std::abs(ref), 1e-300);
            double metric = relative ? rd : ad;
            bool pass = metric <= tol;
            c.add({K, qty, t, S, v, ref, ad, rd, std::string(relative ? "rel" : "abs"), tol, std::string(pass ? "1" : "0")});
            if (metric / tol > worst.ratio) {
                worst.ratio = metric / tol;
                worst.what = qty + " K=" + format_number(K) + " t=" + format_number(t) + " S=" + format_number(S) +
                             " diff=" + format_number(metric) + " tol=" + format_number(tol);
            }
        };

        if (cfg.model == ModelKind::no_jump) {
            // The heat-potential solver is undefined here; compare the two oracles instead.
            for (double K : cfg.strikes) {
                ParamSet p = cfg.params_for(K);
                if (!p.r.is_constant() || !p.q.is_constant() || !p.sigma.is_constant()) {
                    throw ConfigError("no-jump compare needs constant r, q and sigma");
                }
                try {
                    Model m(p);
                    solve_boundary(m, cfg.solver);
                    err << "error: strike " << format_number(K) << ": expected the solver to refuse lambda = 0\n";
                    return int(solver_error);
                } catch (const SingularLimitError& e) {
                    if (opt.verbose) out << "strike " << K << ": solver refused: " << e.what() << '\n';
                }
                TreeConfig tc{cfg.tree_steps, p.r.value(0), p.q.value(0), p.sigma.value(0), p.T, K};
                TreeResult tr = tree_american(tc, OptionType::put);
                FDConfig fc = cfg.fd;
                FDResult fd = fd_pide_american(fc, p);
                for (double m : {0.8, 0.9, 1.0, 1.1, 1.2}) {
                    double S = m * K;
                    row(K, "price", 0.0, S, fd.price(S), tr.price(S), false, cfg.tol.tree_fd * K);
                }
            }
        } else {
            struct Job {
                StrikeRun run;
                std::unique_ptr<FDResult> fd;
                std::string fd_error;
            };
            std::vector<std::future<Job>> jobs;
            for (double K : cfg.strikes) {
                jobs.push_back(std::async(std::launch::async, [&cfg, K]() {
                    Job j;
                    j.run = solve_strike(cfg, K);
                    try {
                        j.fd = std::make_unique<FDResult>(fd_pide_american(cfg.fd, cfg.params_for(K)));
                    } catch (const std::exception& e) {
                        j.fd_error = e.what();
                    }
                    return j;
                }));
            }
            std::vector<Job> done;
            for (auto& j : jobs) done.push_back(j.get());
            std::vector<StrikeRun> runs;
            for (auto& j : done) {
                if (!j.fd_error.empty()) {
                    err << "error: strike " << format_number(j.run.K) << ": oracle: " << j.fd_error << '\n';
                    return int(solver_error);
                }
            }
            for (auto& j : done) {
                if (!j.run.error.empty()) {
                    std::vector<StrikeRun> one;
                    one.push_back(std::move(j.run));
                    return report_failures(one, err);
                }
            }
            for (auto& j : done) {
                const StrikeRun& r = j.run;
                const double K = r.K;
                std::vector<double> spots{0.8 * K, K, 1.2 * K};
                PriceResult pr = price_query(*r.model, r.sol.bs, PriceQuery{0.0, spots});
                for (std::size_t s = 0; s < spots.size(); ++s) {
                    double tol = s == 1 ? cfg.tol.price_atm : cfg.tol.price_wing;
                    row(K, "price", 0.0, spots[s], pr.prices[s], j.fd->price(spots[s]), true, tol);
                }
                const auto& bs = r.sol.bs;
                for (std::size_t i = 0; i < bs.tau.size(); ++i) {
                    double t = r.model->time_change().t_of_tau(bs.tau[i]);
                    double sb = r.model->S_star() * std::exp(bs.x_B[i]);
                    row(K, "boundary", t, sb, sb, j.fd->boundary_at(t), false, cfg.tol.boundary * K);
                }
            }
        }
        if (int rc = finish({{&c, cfg.out.compare}}, opt, err)) return rc;
        if (worst.ratio > 1.0) {
            err << "tolerance exceeded: " << worst.what << '\n';
            return int(tolerance_error);
        }
        if (opt.verbose) out << "worst diff/tolerance " << worst.ratio << '\n';
        return int(ok);
    });
}

int cmd_oracle(const std::string& config_path, const CommandOptions& opt) {
    return guarded(opt, [&]() {
        auto [out, err] = streams(opt);
        RunConfig cfg = load_config(config_path);
        Table o({"strike", "method", "kind", "t", "S", "value"});
        std::vector<std::future<FDResult>> jobs;
        for (double K : cfg.strikes) {
            ParamSet p = cfg.params_for(K);
            jobs.push_back(std::async(std::launch::async, [&cfg, p]() { return fd_pide_american(cfg.fd, p); }));
        }
        for (std::size_t s = 0; s < cfg.strikes.size(); ++s) {
            const double K = cfg.strikes[s];
            FDResult fd = jobs[s].get();
            for (std::size_t n = fd.times.size(); n-- > 0;) {
                if (std::isnan(fd.boundary[n])) continue;
                o.add({K, std::string("fd"), std::string("boundary"), fd.times[n], fd.boundary[n], K - fd.boundary[n]});
            }
            for (double m : {0.8, 0.9, 1.0, 1.1, 1.2}) {
                o.add({K, std::string("fd"), std::string("price"), 0.0, m * K, fd.price(m * K)});
            }
            ParamSet p = cfg.params_for(K);
            bool constant = p.r.is_constant() && p.q.is_constant() && p.sigma.is_constant();
            if (cfg.model == ModelKind::no_jump && constant) {
                TreeConfig tc{cfg.tree_steps, p.r.value(0), p.q.value(0), p.sigma.value(0), p.T, K};
                TreeResult tr = tree_american(tc, OptionType::put);
                for (std::size_t n = tr.times.size(); n-- > 0;) {
                    if (std::isnan(tr.boundary[n])) continue;
                    o.add({K, std::string("tree"), std::string("boundary"), tr.times[n], tr.boundary[n],
                           K - tr.boundary[n]});
                }
                for (double m : {0.8, 0.9, 1.0, 1.1, 1.2}) {
                    o.add({K, std::string("tree"), std::string("price"), 0.0, m * K, tr.price(m * K)});
                }
            }
            if (opt.verbose) out << "strike " << K << ": penalty residual " << fd.penalty_residual << '\n';
        }
        return finish({{&o, cfg.out.oracle}}, opt, err);
    });
}

}  // namespace amput::cli
