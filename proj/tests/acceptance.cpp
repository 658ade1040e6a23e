// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "debtctl/closed_form.hpp"
#include "debtctl/hjb_verify.hpp"
#include "debtctl/monte_carlo.hpp"
#include "debtctl/pde_oracle.hpp"
#include "debtctl/scenario_runner.hpp"
#include "oracles.hpp"

using namespace debtctl;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double time_limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < time_limit_s;
    const bool pass = o.ok && in_time;
    if (!pass) ++failures;
    std::printf("[%s] %2d %s | %s | %.2fs (limit %.0fs)%s\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs,
                time_limit_s, in_time ? "" : " TIMEOUT");
    std::fflush(stdout);
}

ModelParams row(double r, double g0, double sigma, double k) {
    auto p = baseline_params();
    p.r = r;
    p.g0 = g0;
    p.sigma = sigma;
    p.cost_k = k;
    return p;
}

SimConfig sim(std::size_t n, double dt, double horizon) {
    SimConfig c;
    c.n_paths = n;
    c.dt = dt;
    c.horizon = horizon;
    return c;
}

template <class... Ts>
std::string fmt(Ts&&... parts) {
    std::ostringstream os;
    os.precision(8);
    (os << ... << parts);
    return os.str();
}

}  // namespace

int main() {
    const ModelParams base = baseline_params();

    criterion(1, "baseline threshold and v(0+), as stated", 1.0, [&] {
        const auto s = solve(base, ZetaConvention::AsStated);
        const double v0 = s.value_at_zero();
        const bool ok = std::abs(s.b - 1.28) <= 0.01 && std::abs(v0 - (-0.0125)) <= 1e-12 &&
                        std::abs(s.value(1e-9) - (-0.0125)) <= 1e-12;
        return Outcome{ok, fmt("b = ", s.b, ", v(0+) = ", v0)};
    });

    criterion(2, "strong and weak economy thresholds, as stated", 1.0, [&] {
        const double bs = solve(row(0.04, 0.03, 0.2, 0.05), ZetaConvention::AsStated).b;
        const double bw = solve(row(0.29, 0.005, 0.6, 0.3), ZetaConvention::AsStated).b;
        return Outcome{std::abs(bs - 0.90) <= 0.01 && std::abs(bw - 2.20) <= 0.02, fmt("b_strong = ", bs, ", b_weak = ", bw)};
    });

    criterion(3, "k = 0 gives b = 0 and u* = U2", 10.0, [&] {
        auto p = base;
        p.cost_k = 0.0;
        bool ok = true;
        for (auto conv : {ZetaConvention::AsStated, ZetaConvention::Derived}) {
            const auto s = solve(p, conv);
            ok = ok && s.b == 0.0 && s.regime == Regime::ConstantSurplus;
            for (double x : linear_grid(1e-4, 50.0, 5000)) ok = ok && s.optimal_control(x) == p.u2;
        }
        const auto ns = solve_pde(p);
        for (double u : ns.policy_grid) ok = ok && u == p.u2;
        return Outcome{ok, "both conventions and the oracle policy"};
    });

    criterion(4, "HJB residual and verification inequality, derived", 1.0, [&] {
        const auto s = solve(base, ZetaConvention::Derived);
        const auto r = hjb_residual(s, linear_grid(0.01, 5.0 * s.b, 1000));
        const bool ok = r.max_rel_residual_inf <= 1e-6 && r.min_residual_other >= -1e-8;
        return Outcome{ok, fmt("max rel residual ", r.max_rel_residual_inf, ", min other ", r.min_residual_other)};
    });

    criterion(5, "smooth pasting, both conventions", 1.0, [&] {
        std::string detail;
        bool ok = true;
        for (auto conv : {ZetaConvention::AsStated, ZetaConvention::Derived}) {
            const auto r = pasting_check(solve(base, conv));
            const double worst = std::max({r.rel_dv, r.rel_dvp, r.rel_dvpp});
            ok = ok && worst <= 1e-9;
            detail += fmt(to_string(conv), " worst ", worst, "; ");
        }
        return Outcome{ok, detail};
    });

    criterion(6, "root orderings on 10^4 random draws", 10.0, [&] {
        oracle::ParamGenerator gen(20240601);
        int bad = 0;
        for (int i = 0; i < 10000; ++i) {
            const auto p = gen.draw();
            if (!root_ordering(coefficients(p, ZetaConvention::Derived), p.m).all()) ++bad;
        }
        return Outcome{bad == 0, fmt(bad, " violations")};
    });

    criterion(7, "policy-iteration oracle", 60.0, [&] {
        GridConfig g;
        g.n = 4000;
        const auto ns = solve_pde(base, g);
        const auto d = compare(solve(base, ZetaConvention::Derived), ns);
        const auto a = compare(solve(base, ZetaConvention::AsStated), ns);

        const auto sa = solve(base, ZetaConvention::AsStated);
        const double res1 = hjb_expression(base, 1.0, -base.u1, sa.value(1.0), sa.value_prime(1.0), sa.value_second(1.0));
        const double mu1 = oracle::branch_drift_low(base);
        const double den = 0.5 * base.sigma * base.sigma * base.m * (base.m - 1.0) + mu1 * base.m - base.lambda;
        const double expected = -mu1 / (den - mu1) * base.cost_c;

        const bool ok = d.sup_rel_error <= 1e-2 && d.b_gap_cells <= 2.0 && a.sup_rel_error > 5e-2 &&
                        std::abs(res1 - expected) <= 1e-6 && std::abs(res1 - 0.0788) <= 1e-4;
        return Outcome{ok, fmt("derived err ", d.sup_rel_error, " gap ", d.b_gap_cells, " cells; as-stated err ",
                               a.sup_rel_error, "; residual(1) ", res1)};
    });

    criterion(8, "verification theorem by Monte Carlo", 180.0, [&] {
        const auto s = solve(base, ZetaConvention::Derived);
        const auto pols = random_step_policies(base, 20, 0xacce55);
        // Competitors share n_paths and dt; a shorter horizon is covered by their tail bound.
        const auto rep = dominance_test(base, s, pols, sim(100000, 1e-3, 10.0), sim(100000, 1e-3, 1.5));
        double worst = 1e300;
        for (const auto& e : rep.entries)
            worst = std::min(worst, e.estimate.mean - (rep.v_x0 - 3.0 * e.estimate.std_error - e.estimate.tail_bound));
        return Outcome{rep.optimal_agrees && rep.all_dominate && rep.entries.size() == 20,
                       fmt("v(1) = ", rep.v_x0, ", J_MC = ", rep.optimal.mean, " +- ", rep.optimal.std_error,
                           ", smallest dominance margin ", worst)};
    });

    criterion(9, "constant-control analytic cost", 30.0, [&] {
        const double exact = oracle::constant_cost(base, 1.0, 0.0);
        const auto est = estimate_cost(base, PolicySpec::constant(0.0), sim(100000, 1e-3, 6.0));
        const bool ok = std::abs(est.mean - exact) <= 3.0 * est.std_error && std::abs(exact - 0.12858) < 1e-5;
        return Outcome{ok, fmt("exact ", exact, ", J_MC ", est.mean, " +- ", est.std_error)};
    });

    criterion(10, "moment bound under the threshold policy", 30.0, [&] {
        const auto s = solve(base, ZetaConvention::Derived);
        const std::vector<double> times{1.0, 5.0, 10.0};
        const auto rep = moment_check(base, policy_from_solution(s), sim(50000, 1e-3, 10.0), times);
        std::string detail;
        for (const auto& e : rep.entries) detail += fmt("t=", e.t, ": ", e.sample_mean, " <= ", e.bound, "; ");
        return Outcome{rep.ok, detail};
    });

    criterion(11, "threshold scaling b(2k)/b(k) = 2^(1/m)", 1.0, [&] {
        bool ok = true;
        double worst = 0.0;
        for (auto conv : {ZetaConvention::AsStated, ZetaConvention::Derived}) {
            auto p = base;
            const double b1 = solve(p, conv).b;
            p.cost_k *= 2.0;
            const double b2 = solve(p, conv).b;
            const double err = std::abs(b2 / b1 - std::pow(2.0, 1.0 / p.m)) / std::pow(2.0, 1.0 / p.m);
            worst = std::max(worst, err);
            ok = ok && err <= 1e-12;
        }
        return Outcome{ok, fmt("worst relative error ", worst)};
    });

    criterion(12, "alpha > 1: constant deficit", 60.0, [&] {
        auto p = base;
        p.alpha = 1.5;
        const auto s = solve(p, ZetaConvention::Derived);
        const auto grid = linear_grid(0.01, 5.0, 1000);
        const auto r = hjb_residual(s, grid);
        double worst = 0.0;
        bool deficit = true;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst, std::abs(r.residual_policy[i]));
            deficit = deficit && s.optimal_control(grid[i]) == -p.u1;
        }
        const auto est = estimate_cost(p, PolicySpec::constant(-p.u1), sim(100000, 1e-3, 6.0));
        const bool ok = s.regime == Regime::ConstantDeficit && worst <= 1e-8 && deficit &&
                        std::abs(est.mean - s.value(1.0)) <= 3.0 * est.std_error;
        return Outcome{ok, fmt("max ODE residual ", worst, ", v(1) = ", s.value(1.0), ", J_MC = ", est.mean, " +- ",
                               est.std_error)};
    });

    criterion(13, "controlled versus uncontrolled paths", 30.0, [&] {
        SimConfig cfg = sim(1000, 1e-3, 30.0);
        const auto st = path_study(base, cfg, ZetaConvention::AsStated, 1000);
        // t = 5 is record 5 with a stride of 1000 steps at dt = 1e-3.
        const std::size_t rec5 = 5;
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < cfg.n_paths; ++i) {
            const double x = st.uncontrolled.state(i, rec5);
            s1 += x;
            s2 += x * x;
        }
        const double n = static_cast<double>(cfg.n_paths);
        const double mean5 = s1 / n;
        const double se5 = std::sqrt((s2 / n - mean5 * mean5) / (n - 1.0));
        const double target = std::exp((base.r - base.g0) * 5.0);
        const bool ok = std::abs(st.uncontrolled.times[rec5] - 5.0) < 1e-9 &&
                        st.mean_terminal_controlled < st.mean_terminal_uncontrolled &&
                        std::abs(mean5 - target) <= 3.0 * se5;
        return Outcome{ok, fmt("E X_30 controlled ", st.mean_terminal_controlled, " < uncontrolled ",
                               st.mean_terminal_uncontrolled, "; E X_5 ", mean5, " vs ", target, " (se ", se5, ")")};
    });

    std::printf("%s: %d of 13 criteria failed\n", failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED", failures);
    return failures ? 1 : 0;
}
