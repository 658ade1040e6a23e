#pragma once

#include <string>
#include <vector>

namespace debtctl {

/// Primitive constants of the debt-to-GDP control problem.
///
/// The state follows dX = X[(r - g(u) - u) dt + sigma dW] with linear growth
/// response g(u) = g0 - alpha*u and controls u in [-u1, u2]. The running cost
/// is cost_c * x^m + cost_k * u, discounted at rate lambda.
///
/// This is a plain aggregate so that invalid sets can be represented and
/// diagnosed; every solver entry point calls require_admissible().
struct ModelParams {
    double r = 0.0;       ///< real interest rate on debt
    double g0 = 0.0;      ///< baseline GDP growth rate
    double sigma = 0.0;   ///< volatility
    double alpha = 0.0;   ///< fiscal impact on growth
    double u1 = 0.0;      ///< maximum deficit-to-debt ratio
    double u2 = 0.0;      ///< maximum surplus-to-debt ratio
    double lambda = 0.0;  ///< discount rate
    double m = 2.0;       ///< disutility exponent, m >= 2
    double cost_c = 0.0;  ///< debt disutility weight C
    double cost_k = 0.0;  ///< fiscal-policy cost weight k

    /// GDP growth rate under control u.
    double growth(double u) const { return g0 - alpha * u; }

    /// Drift of dX/X under a frozen control u: r - g0 - (1 - alpha) u.
    double drift(double u) const { return r - g0 - (1.0 - alpha) * u; }

    bool operator==(const ModelParams&) const = default;
};

/// Baseline parameter set.
ModelParams baseline_params();

struct GrowthBounds {
    double g_bar_1;  ///< minimum growth rate, attained at u = u2
    double g_bar_2;  ///< maximum growth rate, attained at u = -u1
};

struct AdmissibilityReport {
    double lambda_m = 0.0;
    bool admissible = false;
    std::vector<std::string> violations;
    /// Non-fatal findings, e.g. the growth band not straddling zero.
    std::vector<std::string> warnings;
};

GrowthBounds growth_bounds(const ModelParams& p);

/// Exponential growth bound of E[X_t^m]: m(r - g_bar_1 + u1) + m(m-1) sigma^2 / 2.
double lambda_m(const ModelParams& p);

/// Growth rate of E[X_t^m] under a constant control u:
/// m * drift(u) + m(m-1) sigma^2 / 2.
double moment_growth_rate(const ModelParams& p, double u);

/// Collects every violated constraint; never throws.
AdmissibilityReport validate(const ModelParams& p);

/// Throws Error(Inadmissible) listing all violations.
void require_admissible(const ModelParams& p);

/// Config keys: r, g0, sigma, alpha, u1, u2, lambda, m, C, k.
const std::vector<std::string>& param_keys();
double get_param(const ModelParams& p, const std::string& key);
/// Throws Config for an unknown key.
void set_param(ModelParams& p, const std::string& key, double value);

}  // namespace debtctl
