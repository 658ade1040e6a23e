#include "debtctl/scenario_runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "debtctl/errors.hpp"
#include "debtctl/output.hpp"

namespace debtctl {

namespace {

// Common parameters of the comparison tables: u1 = u2 = 1, alpha = 0.5, m = 2, C = 1, lambda = 8.
ModelParams table_row(double r, double g0, double sigma, double k) {
    ModelParams p = baseline_params();
    p.r = r;
    p.g0 = g0;
    p.sigma = sigma;
    p.cost_k = k;
    return p;
}

}  // namespace

std::vector<Scenario> builtin_scenarios(const std::string& table_id, const LambdaOverrides& overrides) {
    std::vector<Scenario> out;
    if (table_id == "baseline") {
        out.push_back({"Baseline", baseline_params(), ZetaConvention::AsStated});
    } else if (table_id == "strong_weak") {
        out.push_back({"Strong economy", table_row(0.04, 0.03, 0.20, 0.05), ZetaConvention::AsStated});
        out.push_back({"Weak economy", table_row(0.29, 0.005, 0.60, 0.30), ZetaConvention::AsStated});
    } else if (table_id == "extremes") {
        out.push_back({"Strong economy", table_row(0.04, 0.03, 0.20, 0.05), ZetaConvention::AsStated});
        out.push_back({"Weak economy", table_row(0.29, 0.005, 0.60, 0.30), ZetaConvention::AsStated});
        out.push_back({"High interest", table_row(0.4, 0.02, 0.25, 0.10), ZetaConvention::AsStated});
        out.push_back({"Low growth", table_row(0.01, -0.8, 0.25, 0.10), ZetaConvention::AsStated});
        out.push_back({"Very high volatility", table_row(0.1, 0.02, 1.5, 0.10), ZetaConvention::AsStated});
        out.push_back({"Benign macro, high k", table_row(0.04, 0.04, 0.12, 1.0), ZetaConvention::AsStated});
        out.push_back({"Adverse macro, low k", table_row(0.4, 0.01, 1.0, 0.02), ZetaConvention::AsStated});
    } else {
        throw Error(ErrorKind::Config, "unknown scenario table '" + table_id + "'");
    }
    for (auto& sc : out) {
        if (auto it = overrides.find(sc.name); it != overrides.end()) sc.params.lambda = it->second;
    }
    return out;
}

ScenarioResult run_scenario(const Scenario& sc, const CurveOptions& opts) {
    ScenarioResult res;
    res.scenario = sc;
    res.admissibility = validate(sc.params);
    if (!res.admissibility.admissible) return res;

    try {
        res.solution = solve(sc.params, sc.convention);
    } catch (const Error& e) {
        res.error = e.what();
        return res;
    }
    const Solution& s = *res.solution;

    const bool finite_b = std::isfinite(s.b) && s.b > 0.0;
    const double x_max = std::max(opts.x_max_floor, finite_b ? opts.b_multiple * s.b : 0.0);
    for (double x : linear_grid(opts.x_min, x_max, opts.points))
        res.curve.push_back({x, s.value(x), s.value_prime(x), s.value_second(x), s.optimal_control(x)});

    const double check_hi = finite_b ? 5.0 * s.b : 5.0;
    const auto residual_grid = linear_grid(0.01, check_hi, 1000);
    const auto residual = hjb_residual(s, residual_grid);
    const auto property_grid = linear_grid(1e-3, check_hi, 1000);
    const auto props = property_suite(s, property_grid);

    auto& d = res.digest;
    d.max_rel_residual = residual.max_rel_residual_inf;
    d.residual_ok = residual.max_rel_residual_inf <= 1e-6;
    d.hjb_inequality_ok = residual.hjb_inequality_ok;
    d.pasting_ok = s.regime != Regime::Threshold || pasting_check(s).rel_tol_ok;
    d.properties_ok = props.all_passed;
    d.passed = d.residual_ok && d.hjb_inequality_ok && d.pasting_ok && d.properties_ok;
    return res;
}

std::vector<ScenarioResult> run_builtin(const std::string& table_id, const LambdaOverrides& overrides,
                                        const CurveOptions& opts) {
    std::vector<ScenarioResult> out;
    for (auto sc : builtin_scenarios(table_id, overrides)) {
        sc.convention = ZetaConvention::AsStated;
        out.push_back(run_scenario(sc, opts));
        sc.convention = ZetaConvention::Derived;
        out.push_back(run_scenario(sc, opts));
    }
    return out;
}

std::string_view to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::Increasing: return "increasing";
        case Monotonicity::Decreasing: return "decreasing";
        case Monotonicity::NonMonotone: return "non-monotone";
        case Monotonicity::Undetermined: return "undetermined";
    }
    return "undetermined";
}

SweepResult sweep(const std::string& param, std::span<const double> values, const ModelParams& base,
                  ZetaConvention conv) {
    SweepResult res;
    res.param = param;
    res.convention = conv;
    (void)get_param(base, param);  // rejects unknown names up front

    for (double theta : values) {
        SweepPoint pt;
        pt.theta = theta;
        pt.b = std::numeric_limits<double>::quiet_NaN();
        ModelParams p = base;
        set_param(p, param, theta);
        const auto rep = validate(p);
        pt.admissible = rep.admissible;
        if (!rep.admissible) {
            pt.note = rep.violations.front();
        } else {
            try {
                const auto s = solve(p, conv);
                pt.b = s.b;
                pt.note = std::string(to_string(s.regime));
            } catch (const Error& e) {
                pt.note = e.what();
            }
        }
        res.points.push_back(std::move(pt));
    }

    std::vector<double> bs;
    for (const auto& pt : res.points)
        if (std::isfinite(pt.b)) bs.push_back(pt.b);
    if (bs.size() >= 2) {
        bool inc = true, dec = true;
        for (std::size_t i = 1; i < bs.size(); ++i) {
            inc = inc && bs[i] > bs[i - 1];
            dec = dec && bs[i] < bs[i - 1];
        }
        res.monotonicity = inc ? Monotonicity::Increasing : dec ? Monotonicity::Decreasing : Monotonicity::NonMonotone;
    }
    return res;
}

PathStudy path_study(const ModelParams& p, const SimConfig& cfg, ZetaConvention conv, std::size_t record_every) {
    const auto s = solve(p, conv);
    PathStudy out;
    out.b = s.b;
    out.controlled_policy = policy_from_solution(s);
    out.controlled = simulate_paths(p, out.controlled_policy, cfg, record_every);
    out.uncontrolled = simulate_paths(p, PolicySpec::constant(0.0), cfg, record_every);

    const std::size_t last = out.controlled.times.size() - 1;
    double sum_c = 0.0, sum_u = 0.0;
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
        sum_c += out.controlled.state(i, last);
        sum_u += out.uncontrolled.state(i, last);
    }
    out.mean_terminal_controlled = sum_c / static_cast<double>(cfg.n_paths);
    out.mean_terminal_uncontrolled = sum_u / static_cast<double>(cfg.n_paths);
    return out;
}

nlohmann::json to_json(const ScenarioResult& r) {
    nlohmann::json j = {{"schema", json_schema_version},
                        {"name", r.scenario.name},
                        {"convention", std::string(to_string(r.scenario.convention))},
                        {"params", to_json(r.scenario.params)},
                        {"admissibility", to_json(r.admissibility)},
                        {"completed", r.completed()}};
    if (!r.error.empty()) j["error"] = r.error;
    if (r.solution) {
        j["solution"] = to_json(*r.solution);
        j["digest"] = {{"max_rel_residual", r.digest.max_rel_residual}, {"residual_ok", r.digest.residual_ok},
                       {"hjb_inequality_ok", r.digest.hjb_inequality_ok}, {"pasting_ok", r.digest.pasting_ok},
                       {"properties_ok", r.digest.properties_ok},         {"passed", r.digest.passed}};
    }
    return j;
}

nlohmann::json to_json(const SweepResult& r) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : r.points)
        pts.push_back({{"theta", p.theta}, {"admissible", p.admissible}, {"b", number_or_null(p.b)}, {"note", p.note}});
    return {{"schema", json_schema_version},
            {"param", r.param},
            {"convention", std::string(to_string(r.convention))},
            {"monotonicity", std::string(to_string(r.monotonicity))},
            {"points", pts}};
}

}  // namespace debtctl
