#include "cmx/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "cmx/acceptance.hpp"
#include "cmx/errors.hpp"
#include "cmx/local_caprini.hpp"
#include "cmx/oracle.hpp"
#include "cmx/phi_solver.hpp"
#include "cmx/quadrature.hpp"
#include "cmx/special_fn.hpp"

namespace cmx::cli {

using nlohmann::json;

namespace {

phi::SolverOptions solver_options(const RunConfig& c) {
    phi::SolverOptions o;
    o.mu_step = c.quad.mu_step;
    o.tail_tol = c.tol.tail_tol;
    o.mu_max_override = c.quad.mu_max_override;
    o.mu_switch = c.quad.mu_switch;
    return o;
}

local::LocalOptions local_options(const RunConfig& c) {
    local::LocalOptions o;
    o.grid_points = c.quad.grid_points;
    o.tol_cert = c.tol.tol_cert;
    o.max_outer = c.tol.max_outer;
    o.prune = c.tol.prune;
    o.merge = c.tol.merge;
    return o;
}

void check_format(const RunConfig& c) {
    if (c.format != "csv" && c.format != "json") throw ConfigError("format must be csv or json");
}

// Writes to the configured file, or to out.
class Sink {
public:
    Sink(const RunConfig& c, std::ostream& out) : out_(&out) {
        if (!c.output.empty()) {
            file_ = std::make_unique<std::ofstream>(c.output);
            if (!*file_) throw ConfigError("cannot write " + c.output);
            out_ = file_.get();
        }
    }
    std::ostream& stream() { return *out_; }
    bool to_file() const { return file_ != nullptr; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

std::vector<double> eps_values(const RunConfig& c) {
    if (!c.eps.empty()) return c.eps;
    if (!(c.eps_lo > 0.0 && c.eps_hi > c.eps_lo)) throw ConfigError("eps range needs 0 < lo < hi");
    return phi::eps_decades(c.eps_lo, c.eps_hi, c.per_decade);
}

local::ReferenceF0 parse_f0(const std::string& s) {
    if (s == "exp") return local::ReferenceF0::exponential();
    std::vector<Atom> atoms;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("f0 atoms must look like t:a,t:a");
        std::vector<double> t = parse_list(item.substr(0, colon)), a = parse_list(item.substr(colon + 1));
        if (t.size() != 1 || a.size() != 1 || !(t[0] >= 0.0) || !(a[0] > 0.0))
            throw ConfigError("f0 atom '" + item + "' needs t >= 0 and a > 0");
        atoms.push_back({t[0], a[0]});
    }
    if (atoms.empty()) throw ConfigError("f0 has no atoms");
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.t < y.t; });
    return local::ReferenceF0::from_measure(CmfMeasure(atoms));
}

json state_json(const local::CapriniState& st) {
    json atoms = json::array();
    for (const auto& a : st.support.atoms()) atoms.push_back({{"t", a.t}, {"a", a.a}});
    double tol = 1e-8 * st.f0.l2_norm_sq;
    std::vector<double> grid = quad::logspace(1e-6, st.t_max, 9999);
    grid.insert(grid.begin(), 0.0);
    json violations = json::array();
    double cmin = 0.0;
    for (double t : grid) {
        double v = st.C_hat(t);
        cmin = std::min(cmin, v);
        if (v < -tol && violations.size() < 20) violations.push_back({{"t", t}, {"C_hat", v}});
    }
    return {
        {"delta", st.delta},
        {"converged", st.converged},
        {"iterations", st.iterations},
        {"atoms", atoms},
        {"m", st.m},
        {"residual_l2", st.residual_l2},
        {"value_at_x0", st.support(st.x0)},
        {"constraint_residual", st.constraint_residual()},
        {"certificate_min", cmin},
        {"atom_residual", st.atom_residual()},
        {"violations", violations},
        {"diagnostics", st.diagnostics},
    };
}

void write_trace(const std::string& path, int n, const std::vector<const local::CapriniState*>& states,
                 const std::vector<std::string>& names) {
    if (path.empty()) return;
    if (n < 2) throw ConfigError("trace needs at least 2 points");
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    double t_max = states.front()->t_max;
    std::vector<double> ts = quad::logspace(1e-3, t_max, n - 1);
    ts.insert(ts.begin(), 0.0);
    Table tab;
    tab.columns.push_back("t");
    for (const auto& nm : names) tab.columns.push_back(nm);
    for (double t : ts) {
        std::vector<json> row{t};
        for (const auto* s : states) row.push_back(s->C_hat(t));
        tab.rows.push_back(row);
    }
    write_table(tab, "csv", f);
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_table(const Table& t, const std::string& format, std::ostream& out) {
    if (format == "json") {
        json arr = json::array();
        for (const auto& r : t.rows) {
            json o;
            for (std::size_t k = 0; k < t.columns.size(); ++k) o[t.columns[k]] = r[k];
            arr.push_back(o);
        }
        out << arr.dump(2) << "\n";
        return;
    }
    for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << t.columns[k];
    out << "\n";
    for (const auto& r : t.rows) {
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (k) out << ",";
            if (r[k].is_number()) out << format_number(r[k].get<double>());
            else if (r[k].is_string()) out << r[k].get<std::string>();
            else out << r[k].dump();
        }
        out << "\n";
    }
}

std::complex<double> parse_point(const std::string& s) {
    auto bad = [&] { return ConfigError("not a point: '" + s + "'"); };
    if (s.empty()) throw bad();
    auto num = [&](const std::string& p) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(p, &used);
        } catch (const std::exception&) {
            throw bad();
        }
        if (used != p.size()) throw bad();
        return v;
    };
    if (s.back() != 'i') return {num(s), 0.0};
    std::string body = s.substr(0, s.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;)
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    if (split == std::string::npos) {
        if (body.empty() || body == "+") return {0.0, 1.0};
        if (body == "-") return {0.0, -1.0};
        return {0.0, num(body)};
    }
    std::string im = body.substr(split);
    double imv = (im == "+") ? 1.0 : (im == "-") ? -1.0 : num(im);
    return {num(body.substr(0, split)), imv};
}

int cmd_powerlaw(const RunConfig& c, std::ostream& out, std::ostream& err) {
    check_format(c);
    std::vector<double> eps = eps_values(c);
    phi::PowerlawResult pl = phi::powerlaw_fit(c.x0, eps, solver_options(c), c.workers);
    Sink sink(c, out);
    if (c.format == "json") {
        json rows = json::array();
        for (const auto& r : pl.rows)
            rows.push_back({{"eps", r.eps}, {"veps", r.veps}, {"delta_star", r.delta_star},
                            {"asymptotic", r.asymptotic_value}, {"ratio", r.ratio}, {"local_slope", r.local_slope}});
        sink.stream() << json{{"x0", pl.x0}, {"slope", pl.slope}, {"gamma_star", pl.gamma_star}, {"rows", rows}}.dump(2)
                      << "\n";
    } else {
        Table t{{"eps", "veps", "delta_star", "asymptotic", "ratio", "local_slope"}, {}};
        for (const auto& r : pl.rows)
            t.rows.push_back({r.eps, r.veps, r.delta_star, r.asymptotic_value, r.ratio, r.local_slope});
        write_table(t, "csv", sink.stream());
    }
    std::ostream& summary = sink.to_file() ? out : err;
    summary << "x0 " << format_number(c.x0) << ": fitted slope " << format_number(pl.slope) << ", gamma* "
            << format_number(pl.gamma_star) << "\n";
    return exit_ok;
}

int cmd_delta_star(const RunConfig& c, std::ostream& out, std::ostream&) {
    check_format(c);
    auto opt = solver_options(c);
    auto cache = std::make_shared<phi::SpectralCache>(c.x0, opt.mu_step, opt.mu_switch);
    Table t{{"eps", "veps", "delta_star", "psi_x0", "norm_l2", "norm_hardy", "pythagoras_residual", "mu_max"}, {}};
    auto add = [&](const phi::PhiSolution& s) {
        t.rows.push_back({s.eps, s.veps, s.delta_star, s.psi_at_x0, s.norm_l2, s.norm_hardy, s.pythagoras_residual(),
                          s.mu_max});
    };
    if (!c.veps.empty()) {
        for (double v : c.veps) add(phi::solve_psi(cache, v, opt));
    } else {
        for (double e : eps_values(c)) add(phi::delta_star_solve(c.x0, e, opt, cache).solution);
    }
    Sink sink(c, out);
    write_table(t, c.format, sink.stream());
    return exit_ok;
}

int cmd_local(const RunConfig& c, std::ostream& out, std::ostream& err) {
    check_format(c);
    Sink sink(c, out);
    if (c.slopes) {
        if (c.f0 != "exp") throw ConfigError("--slopes needs --f0 exp");
        local::ESlopes e = local::e_slopes(c.x0);
        sink.stream() << json{{"x0", c.x0}, {"E_plus", e.E_plus}, {"E_minus", e.E_minus}}.dump(2) << "\n";
        return exit_ok;
    }
    local::ReferenceF0 f0 = parse_f0(c.f0);
    auto opt = local_options(c);
    json report{{"x0", c.x0}, {"f0", c.f0}, {"f0_at_x0", f0.value(c.x0)}, {"f0_l2", f0.l2_norm()}};
    bool ok = true;
    if (c.delta) {
        local::CapriniState st = local::solve_local(f0, c.x0, *c.delta, opt);
        report["state"] = state_json(st);
        ok = st.converged;
        if (!ok) err << "local: no certificate at delta " << format_number(*c.delta) << ": " << st.diagnostics << "\n";
        write_trace(c.trace_path, c.trace_points, {&st}, {"C_hat"});
    } else {
        if (c.eps.size() != 1) throw ConfigError("local needs --delta or a single --eps");
        local::SweepResult sw = local::sweep_epsilon(f0, c.x0, c.eps[0], opt);
        report["eps"] = sw.eps;
        report["M_eps"] = sw.M_eps;
        report["m_eps"] = sw.m_eps;
        report["plus"] = state_json(sw.plus);
        report["minus"] = state_json(sw.minus);
        for (const auto* st : {&sw.plus, &sw.minus})
            if (!st->converged) {
                ok = false;
                err << "local: no certificate at delta " << format_number(st->delta) << ": " << st->diagnostics << "\n";
            }
        write_trace(c.trace_path, c.trace_points, {&sw.plus, &sw.minus}, {"C_hat_plus", "C_hat_minus"});
    }
    sink.stream() << report.dump(2) << "\n";
    return ok ? exit_ok : exit_solver;
}

int cmd_eig(const RunConfig& c, std::ostream& out, std::ostream&) {
    check_format(c);
    std::vector<double> mus = c.mu.empty() ? std::vector<double>{0.5, 1.0, 2.0, 5.0} : c.mu;
    std::vector<std::string> pts = c.points.empty() ? std::vector<std::string>{"0.5", "1", "2"} : c.points;
    auto method_name = [](special::UMethod m) {
        switch (m) {
            case special::UMethod::euler_integral: return "euler";
            case special::UMethod::hypergeometric_series: return "series";
            case special::UMethod::asymptotic: return "asymptotic";
            case special::UMethod::exact_one: return "exact";
        }
        return "?";
    };
    special::EigOptions eo;
    if (std::isfinite(c.quad.mu_switch)) eo.mu_switch = c.quad.mu_switch;
    Table t{{"re_z", "im_z", "mu", "nu", "re_u", "im_u", "method", "error_estimate"}, {}};
    for (const auto& p : pts) {
        std::complex<double> z = parse_point(p);
        for (double mu : mus) {
            auto s = special::eigfun_sample(z, mu, eo);
            t.rows.push_back({z.real(), z.imag(), mu, special::eigenvalue_nu(mu), s.value.real(), s.value.imag(),
                              method_name(s.method), s.error_estimate});
        }
    }
    Sink sink(c, out);
    write_table(t, c.format, sink.stream());
    return exit_ok;
}

int cmd_oracle_compare(const RunConfig& c, std::ostream& out, std::ostream&) {
    check_format(c);
    std::vector<double> xs = c.x0_list.empty() ? std::vector<double>{c.x0} : c.x0_list;
    int n = c.quad.nystrom_nodes;
    Table t;
    if (!c.p_scan.empty()) {
        std::vector<double> eps = c.eps.empty() ? std::vector<double>{0.05} : c.eps;
        t.columns = {"x0", "eps", "p", "bound", "delta_star", "excess"};
        for (double x0 : xs)
            for (double e : eps) {
                oracle::NystromSolution m = oracle::nystrom_match_eps(x0, e, n);
                oracle::DualBound d = oracle::dual_upper_bound(x0, e, c.p_scan, n);
                for (const auto& q : d.scan)
                    t.rows.push_back({x0, e, q.p, q.bound, m.delta_star(), q.bound / m.delta_star() - 1.0});
            }
    } else {
        std::vector<double> veps = c.veps.empty() ? std::vector<double>{1e-2, 1e-3, 1e-4} : c.veps;
        t.columns = {"x0", "veps", "psi_spectral", "psi_nystrom", "rel_psi", "l2_spectral", "l2_nystrom", "rel_l2",
                     "pythagoras_spectral", "pythagoras_nystrom"};
        auto opt = solver_options(c);
        for (double x0 : xs)
            for (double v : veps) {
                phi::PhiSolution s = phi::solve_psi(x0, v, opt);
                oracle::NystromSolution ny = oracle::nystrom_solve(x0, v * v, n);
                t.rows.push_back({x0, v, s.psi_at_x0, ny.psi_at_x0, ny.psi_at_x0 / s.psi_at_x0 - 1.0, s.norm_l2,
                                  ny.norm_l2, ny.norm_l2 / s.norm_l2 - 1.0, s.pythagoras_residual(),
                                  ny.pythagoras_residual()});
            }
    }
    Sink sink(c, out);
    write_table(t, c.format, sink.stream());
    return exit_ok;
}

int cmd_demo_left(const RunConfig& c, std::ostream& out, std::ostream&) {
    check_format(c);
    if (c.eps.size() > 1) throw ConfigError("demo-left takes a single --eps");
    double eps = c.eps.empty() ? 0.01 : c.eps[0];
    std::vector<double> K = c.K.empty() ? std::vector<double>{50.0, 5000.0, 500000.0} : c.K;
    Table t{{"K", "l2_discrepancy", "gap"}, {}};
    for (const auto& r : oracle::left_unbounded_demo(eps, K, c.c)) t.rows.push_back({r.K, r.l2_discrepancy, r.gap});
    Sink sink(c, out);
    write_table(t, c.format, sink.stream());
    return exit_ok;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream&) {
    acceptance::Options opt;
    opt.seed = c.seed;
    opt.workers = c.workers;
    for (const auto& n : c.only)
        if (std::find(acceptance::check_names().begin(), acceptance::check_names().end(), n) ==
            acceptance::check_names().end())
            throw ConfigError("unknown check '" + n + "'");
    Sink sink(c, out);
    std::vector<acceptance::Outcome> res;
    int failed = 0;
    for (const auto& name : acceptance::check_names()) {
        if (!c.only.empty() && std::find(c.only.begin(), c.only.end(), name) == c.only.end()) continue;
        res.push_back(acceptance::run_check(name, opt));
        if (!res.back().pass) ++failed;
        if (!c.json_report) sink.stream() << acceptance::format_line(res.back()) << std::endl;
    }
    if (c.json_report) {
        json checks = json::array();
        for (const auto& o : res)
            checks.push_back({{"id", o.id}, {"name", o.name}, {"pass", o.pass}, {"seconds", o.seconds},
                              {"detail", o.detail}});
        sink.stream() << json{{"checks", checks}, {"passed", res.size() - failed}, {"failed", failed}, {"seed", c.seed}}
                             .dump(2)
                      << "\n";
    } else {
        sink.stream() << res.size() - failed << "/" << res.size() << " checks passed\n";
    }
    return failed ? exit_verify : exit_ok;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        if (c.workers < 1) throw ConfigError("workers must be >= 1");
        switch (c.command) {
            case Command::powerlaw: return cmd_powerlaw(c, out, err);
            case Command::delta_star: return cmd_delta_star(c, out, err);
            case Command::local: return cmd_local(c, out, err);
            case Command::eig: return cmd_eig(c, out, err);
            case Command::oracle_compare: return cmd_oracle_compare(c, out, err);
            case Command::demo_left: return cmd_demo_left(c, out, err);
            case Command::verify: return cmd_verify(c, out, err);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const BracketError& e) {
        err << "solver failure: " << e.what() << "\n";
        for (const auto& [x, f] : e.trace) err << "  " << format_number(x) << " -> " << format_number(f) << "\n";
        return exit_solver;
    } catch (const std::exception& e) {
        err << "solver failure: " << e.what() << "\n";
        return exit_solver;
    }
    return exit_usage;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    // the config file seeds the defaults; flags given on the command line override it
    for (int k = 1; k + 1 < argc; ++k)
        if (std::string(argv[k]) == "--config") {
            try {
                cfg = load_config(argv[k + 1], cfg);
            } catch (const ConfigError& e) {
                err << "error: " << e.what() << "\n";
                return exit_usage;
            }
        }

    CLI::App app{"Worst-case extrapolation bounds for completely monotone functions"};
    app.require_subcommand(1);
    std::string config_path;
    bool dump_config = false;
    std::string x0_s, eps_s, veps_s, range_s, mu_s, K_s, p_s, only_s;
    double delta = 0.0;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", config_path, "JSON config file (same keys as --dump-config)");
        s->add_flag("--dump-config", dump_config, "Print the effective config as JSON and exit");
        s->add_option("-o,--output", cfg.output, "Output file (default standard output)");
        s->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("--x0", x0_s, "Extrapolation point x0 >= 1 (comma list for oracle-compare)");
        s->add_option("--workers", cfg.workers, "Worker threads for sweeps");
        s->add_option("--seed", cfg.seed, "Seed for randomized checks");
        s->add_option("--mu-step", cfg.quad.mu_step, "Simpson step in mu");
        s->add_option("--mu-max", cfg.quad.mu_max_override, "Fixed mu truncation (0 = tail rule)");
        s->add_option("--mu-switch", cfg.quad.mu_switch, "mu above which complex points use the asymptotic branch");
        s->add_option("--tail-tol", cfg.tol.tail_tol, "Relative tail tolerance of the mu integrals");
        s->add_option("--nodes", cfg.quad.nystrom_nodes, "Nystrom node count");
    };
    auto sub = [&](const char* name, const char* help, Command cmd) {
        CLI::App* s = app.add_subcommand(name, help);
        common(s);
        s->callback([&cfg, cmd] { cfg.command = cmd; });
        return s;
    };

    CLI::App* pl = sub("powerlaw", "Delta* over an eps sweep and the fitted power law", Command::powerlaw);
    pl->add_option("--eps-decades", range_s, "eps range lo:hi");
    pl->add_option("--per-decade", cfg.per_decade, "Points per decade");
    pl->add_option("--eps", eps_s, "Explicit eps list");

    CLI::App* ds = sub("delta-star", "Delta*(eps) with the spectral solution", Command::delta_star);
    ds->add_option("--eps", eps_s, "eps list");
    ds->add_option("--veps", veps_s, "Regularization list (instead of eps)");
    ds->add_option("--eps-decades", range_s, "eps range lo:hi");
    ds->add_option("--per-decade", cfg.per_decade, "Points per decade");

    CLI::App* lc = sub("local", "Local worst case around f0 with optimality certificates", Command::local);
    lc->add_option("--f0", cfg.f0, "exp or atoms t:a,t:a");
    lc->add_option("--eps", eps_s, "L2 tolerance; solves both sides");
    CLI::Option* delta_opt = lc->add_option("--delta", delta, "Single offset f(x0) - f0(x0)");
    lc->add_flag("--slopes", cfg.slopes, "E+ and E- for f0 = e^{-x}");
    lc->add_option("--trace", cfg.trace_path, "CSV file for the certificate trace (t, C_hat)");
    lc->add_option("--trace-points", cfg.trace_points, "Trace length");
    lc->add_option("--grid-points", cfg.quad.grid_points, "Certificate search grid");
    lc->add_option("--tol-cert", cfg.tol.tol_cert, "Certificate tolerance relative to ||f0||^2");
    lc->add_option("--max-outer", cfg.tol.max_outer, "Exchange iteration limit");

    CLI::App* eg = sub("eig", "Eigenfunction values u(z; mu)", Command::eig);
    eg->add_option("--mu", mu_s, "mu list");
    eg->add_option("--point", cfg.points, "Evaluation point, real or a+bi (repeatable)");

    CLI::App* oc = sub("oracle-compare", "Spectral solver against the Nystrom oracle", Command::oracle_compare);
    oc->add_option("--veps", veps_s, "Regularization list");
    oc->add_option("--eps", eps_s, "eps list for the dual scan");
    oc->add_option("--p", p_s, "p list; switches to the dual bound scan");

    CLI::App* dl = sub("demo-left", "Unboundedness of left extrapolation", Command::demo_left);
    dl->add_option("--eps", eps_s, "L2 tolerance");
    dl->add_option("--K", K_s, "K list");
    dl->add_option("--c", cfg.c, "Evaluation point c <= 0");

    CLI::App* vf = sub("verify", "Run the acceptance checks", Command::verify);
    vf->add_option("--only", only_s, "Comma list of check names");
    vf->add_flag("--json", cfg.json_report, "Machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_usage;
    }
    CLI::App* active = app.get_subcommands().front();
    try {
        if (!x0_s.empty()) {
            std::vector<double> xs = parse_list(x0_s);
            cfg.x0 = xs.front();
            if (xs.size() > 1 && cfg.command != Command::oracle_compare) throw ConfigError("--x0 takes one value here");
            cfg.x0_list = xs.size() > 1 ? xs : std::vector<double>{};
        }
        if (!range_s.empty()) {
            auto [lo, hi] = parse_range(range_s);
            cfg.eps_lo = lo;
            cfg.eps_hi = hi;
            cfg.eps.clear();
        }
        if (!eps_s.empty()) cfg.eps = parse_list(eps_s);
        if (!veps_s.empty()) cfg.veps = parse_list(veps_s);
        if (!mu_s.empty()) cfg.mu = parse_list(mu_s);
        if (!K_s.empty()) cfg.K = parse_list(K_s);
        if (!p_s.empty()) cfg.p_scan = parse_list(p_s);
        if (*delta_opt) cfg.delta = delta;
        if (!only_s.empty()) {
            cfg.only.clear();
            std::stringstream ss(only_s);
            std::string item;
            while (std::getline(ss, item, ',')) cfg.only.push_back(item);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n\n" << active->help();
        return exit_usage;
    }
    if (dump_config) {
        out << to_json(cfg).dump(2) << "\n";
        return exit_ok;
    }
    return run(cfg, out, err);
}

}  // namespace cmx::cli
