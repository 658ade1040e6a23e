#pragma once

#include <string_view>
#include <utility>

#include "debtctl/model_params.hpp"

namespace debtctl {

/// Which denominator the particular-solution scalar zeta uses.
///
/// Derived:  -1 / (sigma^2 m(m-1)/2 + mu m - lambda). Substituting C zeta x^m
///           into the branch ODE gives exactly this form.
/// AsStated: -1 / (sigma^2 m(m-1)/2 + mu (m-1) - lambda). It yields the
///           thresholds 1.2778 / 0.9001 / 2.2027 on the built-in baseline,
///           strong and weak scenarios, but does not solve the ODE unless mu = 0.
enum class ZetaConvention { Derived, AsStated };

std::string_view to_string(ZetaConvention c);

enum class Regime {
    ConstantDeficit,  ///< alpha >= 1 (k > 0 when alpha == 1): u* = -u1 everywhere
    Threshold,        ///< 0 < alpha < 1, k > 0: -u1 on (0, b], u2 above b
    ConstantSurplus,  ///< 0 < alpha < 1, k = 0: b = 0, u* = u2 everywhere
    Indifferent,      ///< alpha == 1, k = 0: control does not enter the problem
};

std::string_view to_string(Regime r);

struct Coefficients {
    double mu1 = 0.0;  ///< drift under u = -u1
    double mu2 = 0.0;  ///< drift under u = u2
    double mu_tilde_1 = 0.0;
    double mu_tilde_2 = 0.0;
    double gamma1 = 0.0;  ///< negative root for mu1
    double gamma2 = 0.0;  ///< positive root for mu1
    double gamma_bar_1 = 0.0;  ///< negative root for mu2
    double gamma_bar_2 = 0.0;  ///< positive root for mu2
    double zeta1 = 0.0;
    double zeta2 = 0.0;
    ZetaConvention convention = ZetaConvention::Derived;
};

/// Signs of the characteristic roots relative to 0 and m.
struct RootOrdering {
    bool gamma1_negative = false;
    bool gamma_bar_1_negative = false;
    bool gamma2_above_m = false;
    bool gamma_bar_2_above_m = false;

    bool all() const {
        return gamma1_negative && gamma_bar_1_negative && gamma2_above_m && gamma_bar_2_above_m;
    }
};

/// (mu1, mu2) = (r - g0 + (1-alpha) u1, r - g0 - (1-alpha) u2).
std::pair<double, double> drifts(const ModelParams& p);

/// Roots of sigma^2 g(g-1)/2 + mu g - lambda = 0, returned as (negative, positive).
/// Uses the cancellation-free quadratic formula.
std::pair<double, double> characteristic_roots(double mu, const ModelParams& p);

/// Throws DegenerateDenominator when the denominator is below 1e-12 in magnitude.
double zeta(double mu, const ModelParams& p, ZetaConvention conv);

/// Computes all drifts, roots and zetas. Requires admissible parameters.
Coefficients coefficients(const ModelParams& p, ZetaConvention conv);

RootOrdering root_ordering(const Coefficients& c, double m);

/// Switching level of the threshold policy. Returns 0 when k == 0.
/// Throws Regime for alpha >= 1 and NonpositiveRadicand when the bracket is not positive.
double threshold_b(const ModelParams& p, const Coefficients& c);

/// Homogeneous coefficients (A1, A2) from value and slope matching at b > 0.
std::pair<double, double> coefficients_a1_a2(const ModelParams& p, const Coefficients& c, double b);

/// Closed-form value function and feedback policy.
///
/// Lower branch (x <= b): A1 x^gamma2 + C zeta1 x^m - k u1 / lambda.
/// Upper branch (x > b):  A2 x^gamma_bar_1 + C zeta2 x^m + k u2 / lambda.
/// In the constant-control regimes only one branch exists.
struct Solution {
    enum class Branch { Lower, Upper };

    Regime regime = Regime::Threshold;
    double b = 0.0;  ///< +inf for ConstantDeficit / Indifferent
    double a1 = 0.0;
    double a2 = 0.0;
    Coefficients coeffs;
    ModelParams params;
    ZetaConvention convention = ZetaConvention::Derived;

    double value(double x) const { return derivative(x, 0); }
    double value_prime(double x) const { return derivative(x, 1); }
    double value_second(double x) const { return derivative(x, 2); }

    /// order-th derivative of v at x, choosing the branch from x.
    double derivative(double x, int order) const;

    /// order-th derivative of the given branch's formula, regardless of b.
    double branch_derivative(Branch branch, double x, int order) const;

    Branch branch_at(double x) const;

    /// Feedback control u*(x).
    double optimal_control(double x) const;

    /// Limit of v as x -> 0+.
    double value_at_zero() const;
};

Solution solve(const ModelParams& p, ZetaConvention conv);

}  // namespace debtctl
