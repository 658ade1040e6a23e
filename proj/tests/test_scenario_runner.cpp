#include <doctest.h>

#include <cmath>

#include "debtctl/errors.hpp"
#include "debtctl/scenario_runner.hpp"

using namespace debtctl;

TEST_SUITE("scenario_runner") {
    TEST_CASE("baseline table") {
        const auto rs = run_builtin("baseline");
        REQUIRE(rs.size() == 2);
        CHECK(rs[0].scenario.convention == ZetaConvention::AsStated);
        CHECK(std::abs(rs[0].solution->b - 1.28) <= 0.01);
        CHECK(rs[1].scenario.convention == ZetaConvention::Derived);
        CHECK(rs[1].digest.passed);
        CHECK_FALSE(rs[0].digest.residual_ok);
        CHECK(rs[0].digest.pasting_ok);
    }

    TEST_CASE("strong and weak table") {
        const auto rs = run_builtin("strong_weak");
        REQUIRE(rs.size() == 4);
        CHECK(std::abs(rs[0].solution->b - 0.90) <= 0.01);
        CHECK(std::abs(rs[2].solution->b - 2.20) <= 0.02);
    }

    TEST_CASE("every derived scenario passes its digest") {
        const auto rs = run_builtin("extremes");
        CHECK(rs.size() == 14);
        for (const auto& r : rs) {
            CHECK_MESSAGE(r.admissibility.admissible, r.scenario.name);
            CHECK(r.completed());
            if (r.scenario.convention == ZetaConvention::Derived) CHECK_MESSAGE(r.digest.passed, r.scenario.name);
        }
    }

    TEST_CASE("very high volatility row is decided by the admissibility check") {
        const auto sc = builtin_scenarios("extremes");
        const auto it = std::find_if(sc.begin(), sc.end(), [](const Scenario& s) { return s.name == "Very high volatility"; });
        REQUIRE(it != sc.end());
        const auto r = run_scenario(*it);
        CHECK(r.admissibility.lambda_m == doctest::Approx(2.0 * (0.1 + 0.48 + 1.0) + 2.25));
        CHECK(r.admissibility.admissible == (r.admissibility.lambda_m < 8.0));
    }

    TEST_CASE("lambda override marks a row inadmissible") {
        const auto rs = run_builtin("baseline", {{"Baseline", 3.0}});
        CHECK_FALSE(rs[0].admissibility.admissible);
        CHECK_FALSE(rs[0].completed());
    }

    TEST_CASE("curve covers max(3, 5b)") {
        const auto rs = run_builtin("baseline");
        CHECK(rs[0].curve.back().x == doctest::Approx(5.0 * rs[0].solution->b));
        CHECK(rs[0].curve.size() == 400);
    }

    TEST_CASE("unknown table") { CHECK_THROWS_AS(builtin_scenarios("nope"), Error); }

    TEST_CASE("k sweep follows the square-root law") {
        const auto ks = linear_grid(0.01, 1.0, 34);
        const auto res = sweep("k", ks, baseline_params(), ZetaConvention::AsStated);
        CHECK(res.monotonicity == Monotonicity::Increasing);
        const double b1 = solve(baseline_params(), ZetaConvention::AsStated).b / std::sqrt(0.1);
        for (const auto& pt : res.points) CHECK(pt.b == doctest::Approx(b1 * std::sqrt(pt.theta)).epsilon(1e-12));

        const std::vector<double> pair{0.1, 0.2};
        const auto doubled = sweep("k", pair, baseline_params(), ZetaConvention::Derived);
        CHECK(doubled.points[1].b / doubled.points[0].b == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    }

    TEST_CASE("sigma sweep is descriptive and keeps inadmissible points") {
        const std::vector<double> sig{0.1, 0.5, 1.0, 2.5};
        const auto res = sweep("sigma", sig, baseline_params(), ZetaConvention::AsStated);
        REQUIRE(res.points.size() == 4);
        CHECK(res.points[0].admissible);
        CHECK_FALSE(res.points[3].admissible);
        CHECK(std::isnan(res.points[3].b));
        CHECK_FALSE(res.points[3].note.empty());
    }

    TEST_CASE("path study with shared seeds") {
        SimConfig cfg;
        cfg.n_paths = 10;
        cfg.horizon = 30.0;
        const auto st = path_study(baseline_params(), cfg, ZetaConvention::AsStated, 100);
        CHECK(st.mean_terminal_controlled < st.mean_terminal_uncontrolled);
        CHECK(st.b == doctest::Approx(1.2778048).epsilon(1e-6));
    }

    TEST_CASE("quiet path study converges toward b") {
        auto p = baseline_params();
        p.sigma = 1e-9;
        SimConfig cfg;
        cfg.n_paths = 1;
        cfg.horizon = 10.0;
        const auto st = path_study(p, cfg, ZetaConvention::AsStated, 1000);
        const std::size_t last = st.uncontrolled.times.size() - 1;
        CHECK(st.uncontrolled.state(0, last) == doctest::Approx(std::exp(0.08 * 10.0)).epsilon(1e-6));
        CHECK(std::abs(st.controlled.state(0, last) - st.b) < 0.01);
    }

    TEST_CASE("k = 0 path study uses the surplus from the start") {
        auto p = baseline_params();
        p.cost_k = 0.0;
        SimConfig cfg;
        cfg.n_paths = 2;
        cfg.horizon = 1.0;
        const auto st = path_study(p, cfg, ZetaConvention::AsStated, 10);
        for (double u : st.controlled.u) CHECK(u == p.u2);
    }

    TEST_CASE("digests are deterministic") {
        const auto a = to_json(run_builtin("strong_weak")[1]).dump();
        const auto b = to_json(run_builtin("strong_weak")[1]).dump();
        CHECK(a == b);
        CHECK(to_json(run_builtin("baseline")[0])["schema"] == 1);
    }
}
