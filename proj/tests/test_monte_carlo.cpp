#include <doctest.h>

#include <cmath>

#include "debtctl/closed_form.hpp"
#include "debtctl/errors.hpp"
#include "debtctl/monte_carlo.hpp"
#include "oracles.hpp"

using namespace debtctl;

namespace {

SimConfig small(std::size_t n, double dt, double horizon) {
    SimConfig c;
    c.n_paths = n;
    c.dt = dt;
    c.horizon = horizon;
    return c;
}

}  // namespace

TEST_SUITE("monte_carlo") {
    TEST_CASE("policy step rule") {
        const auto pol = PolicySpec::step_function({0.5, 1.0}, {-1.0, 0.25, 1.0});
        CHECK(pol(0.1) == -1.0);
        CHECK(pol(0.5) == -1.0);
        CHECK(pol(0.7) == 0.25);
        CHECK(pol(1.0) == 0.25);
        CHECK(pol(1.5) == 1.0);
        CHECK(pol.at_log(std::log(0.7)) == 0.25);
        const auto th = PolicySpec::threshold(1.28, -1.0, 1.0);
        CHECK(th(1.28) == -1.0);
        CHECK(th(1.29) == 1.0);
        CHECK(PolicySpec::constant(0.3)(100.0) == 0.3);
    }

    TEST_CASE("policy admissibility") {
        const auto p = baseline_params();
        CHECK_THROWS_AS(PolicySpec::constant(1.5).check_admissible(p), Error);
        CHECK_THROWS_AS(PolicySpec::step_function({1.0, 0.5}, {0.0, 0.0, 0.0}).check_admissible(p), Error);
        CHECK_NOTHROW(PolicySpec::threshold(1.0, -1.0, 1.0).check_admissible(p));
        const auto pols = random_step_policies(p, 20, 3);
        CHECK(pols.size() == 20);
        for (const auto& pol : pols) CHECK_NOTHROW(pol.check_admissible(p));
    }

    TEST_CASE("config validation") {
        SimConfig c;
        c.n_paths = 0;
        CHECK_THROWS_AS(check_config(c), Error);
        c = SimConfig{};
        c.dt = 0.02;
        CHECK_THROWS_AS(check_config(c), Error);
        c = SimConfig{};
        c.step_budget = 1e6;
        CHECK_THROWS_AS(check_config(c), Error);
        CHECK_NOTHROW(check_config(SimConfig{}, min_estimator_paths));
        CHECK_THROWS_AS(estimate_cost(baseline_params(), PolicySpec::constant(0.0), small(999, 1e-2, 1.0)), Error);
    }

    TEST_CASE("seeds are distinct per path") {
        std::vector<std::uint64_t> seeds;
        for (std::uint64_t i = 0; i < 10000; ++i) seeds.push_back(path_seed(42, i));
        std::sort(seeds.begin(), seeds.end());
        CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
        CHECK(path_seed(1, 0) != path_seed(2, 0));
    }

    TEST_CASE("near-deterministic growth") {
        auto p = baseline_params();
        p.sigma = 1e-12;
        const auto paths = simulate_paths(p, PolicySpec::constant(0.0), small(3, 1e-3, 1.0));
        for (std::size_t i = 0; i < 3; ++i) CHECK(paths.state(i, paths.times.size() - 1) == doctest::Approx(std::exp(0.08)).epsilon(1e-9));
    }

    TEST_CASE("uncontrolled mean grows at r - g0") {
        const auto p = baseline_params();
        const auto paths = simulate_paths(p, PolicySpec::constant(0.0), small(100000, 1e-2, 5.0), 500);
        const std::size_t last = paths.times.size() - 1;
        CHECK(paths.times[last] == doctest::Approx(5.0));
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < paths.n_paths; ++i) {
            const double x = paths.state(i, last);
            s += x;
            s2 += x * x;
        }
        const double n = static_cast<double>(paths.n_paths);
        const double mean = s / n;
        const double se = std::sqrt((s2 / n - mean * mean) / (n - 1.0));
        CHECK(std::abs(mean - std::exp(0.08 * 5.0)) <= 3.0 * se);
    }

    TEST_CASE("positivity of simulated states") {
        auto p = baseline_params();
        p.sigma = 0.9;
        p.lambda = 12.0;
        const auto paths = simulate_paths(p, PolicySpec::threshold(1.0, -1.0, 1.0), small(200, 1e-3, 10.0), 7);
        for (double x : paths.x) REQUIRE(x > 0.0);
    }

    TEST_CASE("constant control cost matches the analytic oracle") {
        const auto p = baseline_params();
        const double exact = oracle::constant_cost(p, 1.0, 0.0);
        CHECK(exact == doctest::Approx(1.0 / (8.0 - 0.2225)).epsilon(1e-12));
        CHECK(constant_policy_cost(p, 1.0, 0.0) == doctest::Approx(exact).epsilon(1e-14));
        const auto est = estimate_cost(p, PolicySpec::constant(0.0), small(10000, 1e-3, 5.0));
        CHECK(est.agrees_with(exact));
    }

    TEST_CASE("threshold cost matches the derived value") {
        const auto p = baseline_params();
        const auto s = solve(p, ZetaConvention::Derived);
        const auto est = estimate_cost(p, policy_from_solution(s), small(20000, 1e-3, 5.0));
        CHECK(est.agrees_with(s.value(1.0)));
        CHECK(est.ci95_lo < est.mean);
        CHECK(est.ci95_hi > est.mean);
    }

    TEST_CASE("degenerate zero cost") {
        auto p = baseline_params();
        p.cost_c = 1e-300;
        p.cost_k = 0.0;
        const auto est = estimate_cost(p, PolicySpec::constant(0.0), small(1000, 1e-2, 1.0));
        CHECK(std::abs(est.mean) < 1e-290);
        CHECK(est.std_error < 1e-290);
    }

    TEST_CASE("tail bound formula") {
        const auto p = baseline_params();
        const double lm = 3.2225;
        const double expected = std::exp((lm - 8.0) * 10.0) / (8.0 - lm) + (1.0 + 0.1) * std::exp(-80.0) / 8.0;
        CHECK(tail_bound(p, 1.0, 10.0) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(tail_bound(p, 1.0, 10.0) < 1e-6);
    }

    TEST_CASE("moment bound under the threshold policy") {
        const auto p = baseline_params();
        const auto s = solve(p, ZetaConvention::Derived);
        const std::vector<double> times{1.0, 5.0, 10.0};
        const auto rep = moment_check(p, policy_from_solution(s), small(5000, 1e-3, 10.0), times);
        CHECK(rep.ok);
        REQUIRE(rep.entries.size() == 3);
        CHECK(rep.entries[2].bound == doctest::Approx(std::exp(3.2225 * 10.0)));
    }

    TEST_CASE("worst-drift moment matches the lognormal formula") {
        const auto p = baseline_params();
        const std::vector<double> times{1.0};
        const auto rep = moment_check(p, PolicySpec::constant(-p.u1), small(40000, 1e-2, 1.0), times);
        const double exact = std::exp(oracle::moment_rate(p, -p.u1));
        CHECK(std::abs(rep.entries[0].sample_mean - exact) <= 3.0 * rep.entries[0].std_error);
        CHECK(exact <= std::exp(lambda_m(p)));
    }

    TEST_CASE("moment with vanishing noise") {
        auto p = baseline_params();
        p.sigma = 1e-12;
        const std::vector<double> times{2.0};
        const auto rep = moment_check(p, PolicySpec::constant(0.0), small(1000, 1e-2, 2.0), times);
        CHECK(rep.entries[0].sample_mean == doctest::Approx(std::exp(2.0 * 0.08 * 2.0)).epsilon(1e-9));
    }

    TEST_CASE("derived threshold beats the as-stated threshold") {
        const auto p = baseline_params();
        const auto cfg = small(20000, 1e-3, 5.0);
        const auto d = estimate_cost(p, PolicySpec::threshold(solve(p, ZetaConvention::Derived).b, -1.0, 1.0), cfg);
        const auto a = estimate_cost(p, PolicySpec::threshold(solve(p, ZetaConvention::AsStated).b, -1.0, 1.0), cfg);
        CHECK(d.mean <= a.mean + 3.0 * std::hypot(d.std_error, a.std_error));
    }

    TEST_CASE("dominance over random step policies") {
        const auto p = baseline_params();
        const auto s = solve(p, ZetaConvention::Derived);
        const auto pols = random_step_policies(p, 5, 17);
        const auto rep = dominance_test(p, s, pols, small(10000, 1e-3, 5.0), small(2000, 1e-3, 5.0));
        CHECK(rep.optimal_agrees);
        CHECK(rep.all_dominate);
        CHECK(rep.entries.size() == 5);
    }

    TEST_CASE("bit-identical estimates across worker counts") {
        const auto p = baseline_params();
        const auto pol = PolicySpec::threshold(0.9, -1.0, 1.0);
        auto cfg = small(3000, 1e-2, 3.0);
        cfg.workers = 1;
        const auto a = estimate_cost(p, pol, cfg);
        cfg.workers = 3;
        const auto b = estimate_cost(p, pol, cfg);
        CHECK(a.mean == b.mean);
        CHECK(a.std_error == b.std_error);
        cfg.workers = 1;
        CHECK(estimate_cost(p, pol, cfg).mean == a.mean);
        cfg.master_seed += 1;
        CHECK(estimate_cost(p, pol, cfg).mean != a.mean);
    }

    TEST_CASE("stderr scales as n^-1/2") {
        const auto p = baseline_params();
        const auto pol = PolicySpec::threshold(0.9, -1.0, 1.0);
        double prev = 0.0;
        for (std::size_t n : {1000u, 4000u, 16000u}) {
            const auto est = estimate_cost(p, pol, small(n, 1e-2, 3.0));
            if (prev > 0.0) {
                const double ratio = prev / est.std_error;
                CHECK(ratio >= 2.0 / 1.5);
                CHECK(ratio <= 2.0 * 1.5);
            }
            prev = est.std_error;
        }
    }

    TEST_CASE("halving dt moves the threshold cost by less than two joint stderr") {
        const auto p = baseline_params();
        const auto pol = policy_from_solution(solve(p, ZetaConvention::Derived));
        const auto coarse = estimate_cost(p, pol, small(100000, 1e-3, 3.0));
        const auto fine = estimate_cost(p, pol, small(100000, 5e-4, 3.0));
        CHECK(std::abs(coarse.mean - fine.mean) < 2.0 * std::hypot(coarse.std_error, fine.std_error));
    }
}
