#include "cmx/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "cmx/errors.hpp"
#include "cmx/local_caprini.hpp"
#include "cmx/operator_k.hpp"
#include "cmx/oracle.hpp"
#include "cmx/phi_solver.hpp"
#include "cmx/special_fn.hpp"

namespace cmx::acceptance {

namespace {

struct Report {
    bool pass = true;
    std::ostringstream out;
    Report() { out << std::setprecision(6); }
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            out << "[fail] " << what << "; ";
        }
    }
};

using CheckFn = std::function<void(Report&, const Options&)>;

void check_powerlaw(Report& r, const Options& opt) {
    auto eps = phi::eps_decades(1e-9, 1e-5);
    for (double x0 : {2.0, 5.0}) {
        auto t0 = std::chrono::steady_clock::now();
        phi::PowerlawResult pl = phi::powerlaw_fit(x0, eps, {}, opt.workers);
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double target = special::gamma_star(x0);
        r.out << "x0=" << x0 << " slope " << pl.slope << " target " << target << " (" << sec << " s); ";
        r.require(std::abs(pl.slope - target) <= 0.01, "slope off target");
        r.require(sec <= 60.0, "runtime above 60 s");
    }
}

void check_asymptotic_constant(Report& r, const Options&) {
    double eps = 1e-8;
    double d = phi::delta_star_at(2.0, eps);
    double ratio = d / (special::c_star(2.0) * std::cbrt(eps));
    r.out << "C*(2)=" << special::c_star(2.0) << " ratio " << ratio << "; ";
    r.require(ratio >= 0.95 && ratio <= 1.05, "ratio outside [0.95, 1.05]");
}

void check_x0_one(Report& r, const Options&) {
    double eps = 1e-8;
    double d = phi::delta_star_at(1.0, eps);
    double ratio = d / (std::numbers::sqrt2 / std::numbers::pi * eps * std::abs(std::log(eps)));
    r.out << "ratio " << ratio << "; ";
    r.require(ratio >= 0.90 && ratio <= 1.10, "ratio outside [0.90, 1.10]");
}

void check_pythagoras(Report& r, const Options&) {
    double worst_s = 0.0, worst_n = 0.0;
    for (double x0 : {1.0, 1.5, 2.0, 5.0})
        for (double v : {1e-2, 1e-4, 1e-6}) {
            worst_s = std::max(worst_s, phi::solve_psi(x0, v).pythagoras_residual());
            if (v * v >= 1e-10) {
                worst_n = std::max(worst_n, oracle::nystrom_solve(x0, v * v).pythagoras_residual());
            } else {
                bool refused = false;
                try {
                    oracle::nystrom_solve(x0, v * v);
                } catch (const ConditioningError&) {
                    refused = true;
                }
                r.require(refused, "Nystrom accepted a system outside its validity range");
            }
        }
    r.out << "spectral max " << worst_s << " nystrom max " << worst_n << "; ";
    r.require(worst_s <= 1e-8, "spectral residual above 1e-8");
    r.require(worst_n <= 1e-8, "Nystrom residual above 1e-8");
}

void check_eigen_relation(Report& r, const Options& opt) {
    double worst = 0.0;
    for (double mu : {0.5, 1.0, 2.0, 5.0}) worst = std::max(worst, opk::eigen_relation_residual(mu, 200));
    r.out << "max residual " << worst << "; ";
    r.require(worst <= 1e-6, "eigen-relation residual above 1e-6");
    std::mt19937_64 gen(opt.seed);
    std::uniform_real_distribution<double> dist(0.0, 30.0);
    int exact = 0;
    for (int k = 0; k < 20; ++k)
        if (special::eigfun_u(1.0, dist(gen)) == 1.0) ++exact;
    r.out << "u(1)=1 for " << exact << "/20; ";
    r.require(exact == 20, "u(1; mu) != 1");
}

void check_cross_solver(Report& r, const Options&) {
    double worst = 0.0;
    for (double x0 : {1.0, 2.0, 5.0})
        for (double v : {1e-2, 1e-3, 1e-4}) {
            phi::PhiSolution s = phi::solve_psi(x0, v);
            oracle::NystromSolution n = oracle::nystrom_solve(x0, v * v);
            worst = std::max({worst, std::abs(n.psi_at_x0 / s.psi_at_x0 - 1.0), std::abs(n.norm_l2 / s.norm_l2 - 1.0)});
        }
    r.out << "spectral/Nystrom max rel " << worst << "; ";
    r.require(worst <= 1e-4, "solvers disagree beyond 1e-4");

    const std::vector<double> p_scan = {1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0};
    for (double x0 : {1.0, 2.0, 5.0}) {
        double eps = 0.05;
        oracle::NystromSolution m = oracle::nystrom_match_eps(x0, eps);
        double dstar = m.delta_star();
        oracle::DualBound d = oracle::dual_upper_bound(x0, eps, p_scan);
        double below = 0.0;
        for (const auto& q : d.scan) below = std::max(below, (dstar - q.bound) / dstar);
        double p_star = m.psi_at_x0 / (m.norm_l2 * m.norm_l2);
        double eq = std::abs(oracle::dual_bound_at(x0, eps, p_star) / dstar - 1.0);
        r.out << "x0=" << x0 << " p*=" << p_star << " |B(p*)/D*-1| " << eq << "; ";
        r.require(below <= 1e-12, "dual bound below Delta*");
        r.require(eq <= 1e-6, "dual bound not attained at p*");
    }
}

void check_exp_slopes(Report& r, const Options&) {
    local::ESlopes e1 = local::e_slopes(1.0);
    double e = std::numbers::e;
    double exact_minus = 2.0 * std::sqrt((e * e - 1.0) / (std::pow(e, 4) - 6.0 * e * e + 1.0));
    r.out << std::setprecision(10) << "E+(1)=" << e1.E_plus << " E-(1)=" << e1.E_minus << " closed form " << exact_minus
          << " (rounded 1.5, off by " << std::setprecision(3) << exact_minus - 1.5 << "); ";
    r.require(std::abs(e1.E_plus - 2.67788263) <= 1e-4, "E+(1)");
    r.require(std::abs(e1.E_minus - exact_minus) <= 1e-3, "E-(1) vs closed form");

    local::ESlopes e50 = local::e_slopes(50.0);
    r.out << "E+(50)=" << e50.E_plus << "; ";
    r.require(std::abs(e50.E_plus / 27.488747597 - 1.0) <= 0.01, "E+(50)");

    const std::vector<double> xs = {1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0};
    std::vector<double> scaled;
    for (double x0 : xs) scaled.push_back(std::exp(x0) / x0 * local::e_slopes(x0).E_minus);
    bool mono = std::is_sorted(scaled.begin(), scaled.end(), std::less_equal<double>());
    r.out << std::setprecision(6) << "scaled E-(50)=" << scaled.back() << (mono ? " monotone" : " not monotone") << "; ";
    r.require(mono, "scaled E- not monotone");
    r.require(std::abs(scaled.back() / 5.8 - 1.0) <= 0.02, "scaled E-(50) vs 5.8");

    auto best = boost::math::tools::brent_find_minima([](double x) { return -local::e_slopes(x).E_minus; }, 1.0, 1.8, 40);
    r.out << "max E- " << -best.second << " at " << best.first << "; ";
    r.require(std::abs(best.first / 1.269 - 1.0) <= 0.01, "E- maximizer location");
    r.require(std::abs(-best.second / 1.566 - 1.0) <= 0.01, "E- maximum value");
}

void check_certificate(Report& r, const Options&) {
    std::vector<std::pair<local::ReferenceF0, std::string>> refs = {
        {local::ReferenceF0::exponential(), "exp"},
        {local::ReferenceF0::from_measure(CmfMeasure({{0.5, 0.5}, {2.0, 0.3}, {6.0, 0.2}})), "3-atom"},
    };
    int states = 0, converged = 0;
    double worst_cert = 0.0, worst_atom = 0.0;
    for (const auto& [f0, label] : refs)
        for (double x0 : {1.0, 2.0, 5.0})
            for (double delta : {1e-3, -1e-3, 0.05}) {
                if (!(delta > -f0.value(x0))) continue;
                local::CapriniState st = local::solve_local(f0, x0, delta);
                ++states;
                if (!st.converged) {
                    r.out << label << " x0=" << x0 << " delta=" << delta << " not converged; ";
                    continue;
                }
                ++converged;
                double nf = f0.l2_norm_sq;
                worst_cert = std::min(worst_cert, st.certificate_grid_min(10000) / nf);
                worst_atom = std::max(worst_atom, st.atom_residual());
            }
    r.out << converged << "/" << states << " converged, min cert/||f0||^2 " << worst_cert << " max atom |C| "
          << worst_atom << "; ";
    r.require(converged == states, "some states did not converge");
    r.require(worst_cert >= -1e-8, "certificate negative");
    r.require(worst_atom <= 1e-8, "certificate nonzero at atoms");

    double worst_diff = 0.0;
    for (double x0 : {1.0, 2.0, 5.0})
        for (double delta : {1e-3, -1e-3, 0.05}) {
            if (!(delta > -std::exp(-x0))) continue;
            local::CapriniState it = local::solve_local(local::ReferenceF0::exponential(), x0, delta);
            local::CapriniState cf = local::exp_closed_form(x0, delta);
            const auto& a = it.support.atoms();
            const auto& b = cf.support.atoms();
            if (a.size() != b.size()) {
                r.require(false, "support sizes differ");
                continue;
            }
            for (std::size_t j = 0; j < a.size(); ++j)
                worst_diff = std::max({worst_diff, std::abs(a[j].t - b[j].t), std::abs(a[j].a - b[j].a)});
        }
    r.out << "iterative vs closed form max diff " << worst_diff << "; ";
    r.require(worst_diff <= 1e-6, "iterative and closed form disagree");
}

void check_oracle_gap(Report& r, const Options&) {
    auto f0 = local::ReferenceF0::exponential();
    auto grid = oracle::default_t_grid(2.0, 2000);
    for (double delta : {1e-3, -1e-3}) {
        local::CapriniState st = local::solve_local(f0, 2.0, delta);
        oracle::GridLocalResult g = oracle::grid_local_solve(f0, 2.0, delta, grid);
        double gap = g.residual_l2 / st.residual_l2 - 1.0;
        r.out << "delta=" << delta << " gap " << gap << "; ";
        r.require(std::abs(gap) <= 1e-3, "grid residual off by more than 1e-3");
    }
}

void check_norm_bridge(Report& r, const Options& opt) {
    std::mt19937_64 gen(opt.seed);
    std::uniform_int_distribution<int> count(1, 6);
    std::uniform_real_distribution<double> logt(-3.0, 3.0), amp(0.05, 1.0);
    double fwd = 0.0, rev = 0.0;
    for (int k = 0; k < 50; ++k) {
        std::vector<Atom> atoms;
        int n = count(gen);
        for (int j = 0; j < n; ++j) atoms.push_back({std::pow(10.0, logt(gen)), amp(gen)});
        std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.t < b.t; });
        CmfMeasure f(atoms);
        double l2 = f.l2_norm();
        for (double p : {1.1, 2.0, 4.0}) {
            double h = phi::hp_norm(f, p);
            fwd = std::max(fwd, h / (phi::hp_constant(p) * l2));
            rev = std::max(rev, l2 / (phi::hp_reverse_constant(p) * h));
        }
    }
    r.out << "max forward ratio " << fwd << " max reverse ratio " << rev << "; ";
    r.require(fwd <= 1.0, "forward inequality violated");
    r.require(rev <= 1.0, "reverse inequality violated");
}

void check_left_unbounded(Report& r, const Options&) {
    double eps = 0.01;
    for (double M : {0.1, 1.0, 10.0}) {
        double K = M * M / (2.0 * eps * eps);
        auto rows = oracle::left_unbounded_demo(eps, {K, 1.5 * K, 10.0 * K});
        for (std::size_t j = 0; j < rows.size(); ++j) {
            r.require(rows[j].l2_discrepancy <= eps, "discrepancy above eps");
            r.require(rows[j].gap >= M * (1.0 - 1e-14), "gap below M");
            if (j > 0) r.require(rows[j].gap > M, "gap does not exceed M");
        }
        r.out << "M=" << M << " K=" << K << " gap " << rows[0].gap << "; ";
    }
}

struct Entry {
    const char* name;
    CheckFn fn;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> r = {
        {"powerlaw", check_powerlaw},
        {"asymptotic-constant", check_asymptotic_constant},
        {"x0-one", check_x0_one},
        {"pythagoras", check_pythagoras},
        {"eigen-relation", check_eigen_relation},
        {"cross-solver", check_cross_solver},
        {"exp-slopes", check_exp_slopes},
        {"certificate", check_certificate},
        {"oracle-gap", check_oracle_gap},
        {"norm-bridge", check_norm_bridge},
        {"left-unbounded", check_left_unbounded},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& e : registry()) v.push_back(e.name);
        return v;
    }();
    return names;
}

Outcome run_check(const std::string& name, const Options& opt) {
    const auto& reg = registry();
    auto it = std::find_if(reg.begin(), reg.end(), [&](const Entry& e) { return name == e.name; });
    if (it == reg.end()) throw DomainError("unknown check: " + name);
    Outcome o;
    o.id = static_cast<int>(it - reg.begin()) + 1;
    o.name = name;
    Report rep;
    auto t0 = std::chrono::steady_clock::now();
    try {
        it->fn(rep, opt);
    } catch (const std::exception& e) {
        rep.pass = false;
        rep.out << "exception: " << e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.pass = rep.pass;
    o.detail = rep.out.str();
    while (!o.detail.empty() && (o.detail.back() == ' ' || o.detail.back() == ';')) o.detail.pop_back();
    return o;
}

std::vector<Outcome> run_checks(const std::vector<std::string>& only, const Options& opt) {
    for (const auto& n : only)
        if (std::find(check_names().begin(), check_names().end(), n) == check_names().end())
            throw DomainError("unknown check: " + n);
    std::vector<Outcome> out;
    for (const auto& n : check_names())
        if (only.empty() || std::find(only.begin(), only.end(), n) != only.end()) out.push_back(run_check(n, opt));
    return out;
}

std::string format_line(const Outcome& o) {
    char head[96];
    std::snprintf(head, sizeof head, "%-4s %2d %-20s %8.2fs  ", o.pass ? "PASS" : "FAIL", o.id, o.name.c_str(), o.seconds);
    return head + o.detail;
}

}  // namespace cmx::acceptance
