#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "debtctl/closed_form.hpp"
#include "debtctl/hjb_verify.hpp"
#include "debtctl/monte_carlo.hpp"

namespace debtctl {

struct Scenario {
    std::string name;
    ModelParams params;
    ZetaConvention convention = ZetaConvention::AsStated;
};

/// Verification summary attached to every completed scenario.
struct ScenarioDigest {
    double max_rel_residual = 0.0;
    bool residual_ok = false;        ///< max relative minimized residual <= 1e-6
    bool hjb_inequality_ok = false;
    bool pasting_ok = true;          ///< trivially true outside the threshold regime
    bool properties_ok = false;
    bool passed = false;
};

struct CurvePoint {
    double x, v, v_prime, v_second, u_star;
};

struct ScenarioResult {
    Scenario scenario;
    AdmissibilityReport admissibility;
    std::optional<Solution> solution;  ///< empty when rejected or the solve failed
    std::string error;                 ///< solve failure message, if any
    std::vector<CurvePoint> curve;
    ScenarioDigest digest;

    bool completed() const { return solution.has_value(); }
};

struct CurveOptions {
    std::size_t points = 400;
    double x_min = 1e-3;
    /// Upper end is max(x_max_floor, b_multiple * b).
    double x_max_floor = 3.0;
    double b_multiple = 5.0;
};

/// Per-scenario lambda replacements, keyed by scenario name.
using LambdaOverrides = std::map<std::string, double>;

/// Table ids: "baseline", "strong_weak", "extremes".
std::vector<Scenario> builtin_scenarios(const std::string& table_id, const LambdaOverrides& overrides = {});

ScenarioResult run_scenario(const Scenario& sc, const CurveOptions& opts = {});

/// Every table scenario under AsStated, each followed by its Derived re-run.
std::vector<ScenarioResult> run_builtin(const std::string& table_id, const LambdaOverrides& overrides = {},
                                        const CurveOptions& opts = {});

enum class Monotonicity { Increasing, Decreasing, NonMonotone, Undetermined };
std::string_view to_string(Monotonicity m);

struct SweepPoint {
    double theta = 0.0;
    bool admissible = false;
    double b = 0.0;  ///< NaN when not computed
    std::string note;
};

struct SweepResult {
    std::string param;
    ZetaConvention convention = ZetaConvention::AsStated;
    std::vector<SweepPoint> points;
    Monotonicity monotonicity = Monotonicity::Undetermined;
};

/// b as a function of one parameter; inadmissible points are kept and marked.
SweepResult sweep(const std::string& param, std::span<const double> values, const ModelParams& base,
                  ZetaConvention conv);

struct PathStudy {
    double b = 0.0;
    PolicySpec controlled_policy = PolicySpec::constant(0.0);
    PathSet controlled;
    PathSet uncontrolled;  ///< u = 0, same seeds
    double mean_terminal_controlled = 0.0;
    double mean_terminal_uncontrolled = 0.0;
};

/// Controlled (optimal feedback) and uncontrolled ensembles driven by the same noise.
PathStudy path_study(const ModelParams& p, const SimConfig& cfg, ZetaConvention conv,
                     std::size_t record_every = 1);

nlohmann::json to_json(const ScenarioResult& r);
nlohmann::json to_json(const SweepResult& r);

}  // namespace debtctl
