#include "debtctl/closed_form.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "debtctl/errors.hpp"

namespace debtctl {

std::string_view to_string(ZetaConvention c) {
    return c == ZetaConvention::Derived ? "derived" : "as-stated";
}

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::ConstantDeficit: return "constant-deficit";
        case Regime::Threshold: return "threshold";
        case Regime::ConstantSurplus: return "constant-surplus";
        case Regime::Indifferent: return "indifferent";
    }
    return "unknown";
}

std::pair<double, double> drifts(const ModelParams& p) {
    return {p.drift(-p.u1), p.drift(p.u2)};
}

std::pair<double, double> characteristic_roots(double mu, const ModelParams& p) {
    const double s2 = p.sigma * p.sigma;
    const double mu_tilde = mu - 0.5 * s2;
    const double sq = std::sqrt(mu_tilde * mu_tilde + 2.0 * p.lambda * s2);
    // q carries the larger-magnitude root; the other follows from the product -2 lambda / sigma^2.
    const double q = -0.5 * (mu_tilde + std::copysign(sq, mu_tilde));
    const double big = q / (0.5 * s2);
    const double small = -p.lambda / q;
    return big < small ? std::pair{big, small} : std::pair{small, big};
}

double zeta(double mu, const ModelParams& p, ZetaConvention conv) {
    const double curvature = 0.5 * p.sigma * p.sigma * p.m * (p.m - 1.0);
    const double drift_weight = conv == ZetaConvention::Derived ? p.m : p.m - 1.0;
    const double den = curvature + mu * drift_weight - p.lambda;
    if (std::abs(den) < 1e-12) {
        std::ostringstream os;
        os << "zeta denominator " << den << " for mu = " << mu;
        throw Error(ErrorKind::DegenerateDenominator, os.str());
    }
    return -1.0 / den;
}

Coefficients coefficients(const ModelParams& p, ZetaConvention conv) {
    require_admissible(p);
    Coefficients c;
    c.convention = conv;
    std::tie(c.mu1, c.mu2) = drifts(p);
    const double half_s2 = 0.5 * p.sigma * p.sigma;
    c.mu_tilde_1 = c.mu1 - half_s2;
    c.mu_tilde_2 = c.mu2 - half_s2;
    std::tie(c.gamma1, c.gamma2) = characteristic_roots(c.mu1, p);
    std::tie(c.gamma_bar_1, c.gamma_bar_2) = characteristic_roots(c.mu2, p);
    c.zeta1 = zeta(c.mu1, p, conv);
    c.zeta2 = zeta(c.mu2, p, conv);
    return c;
}

RootOrdering root_ordering(const Coefficients& c, double m) {
    return {c.gamma1 < 0.0, c.gamma_bar_1 < 0.0, c.gamma2 > m, c.gamma_bar_2 > m};
}

double threshold_b(const ModelParams& p, const Coefficients& c) {
    if (!(p.alpha < 1.0)) throw Error(ErrorKind::Regime, "threshold policy requires 0 < alpha < 1");
    if (p.cost_k == 0.0) return 0.0;
    const double m = p.m;
    const double num = c.gamma_bar_1 * c.gamma2 * p.cost_k * (p.u1 + p.u2);
    const double den = p.cost_c * p.lambda * (c.gamma_bar_1 - m) * (c.gamma2 - m) * (c.zeta1 - c.zeta2);
    const double bracket = num / den;
    if (!(bracket > 0.0) || !std::isfinite(bracket)) {
        std::ostringstream os;
        os << "b^m bracket = " << bracket;
        throw Error(ErrorKind::NonpositiveRadicand, os.str());
    }
    return std::pow(bracket, 1.0 / m);
}

std::pair<double, double> coefficients_a1_a2(const ModelParams& p, const Coefficients& c, double b) {
    if (!(b > 0.0)) throw Error(ErrorKind::Domain, "pasting point b must be positive");
    const double gap = c.gamma_bar_1 - c.gamma2;
    if (std::abs(gap) < 1e-12) throw Error(ErrorKind::SingularSystem, "gamma_bar_1 == gamma2");
    const double m = p.m;
    const double jump = p.cost_k * (p.u1 + p.u2) / p.lambda;
    const double particular = p.cost_c * (c.zeta1 - c.zeta2) * std::pow(b, m);
    const double a1 = (particular * (m - c.gamma_bar_1) + c.gamma_bar_1 * jump) /
                      (std::pow(b, c.gamma2) * gap);
    const double a2 = (particular * (m - c.gamma2) + c.gamma2 * jump) /
                      (std::pow(b, c.gamma_bar_1) * gap);
    return {a1, a2};
}

namespace {

// d^order/dx^order of coef * x^power, evaluated in log space.
double power_term(double coef, double power, double x, int order) {
    if (coef == 0.0) return 0.0;
    double falling = 1.0;
    for (int j = 0; j < order; ++j) falling *= power - j;
    if (falling == 0.0) return 0.0;
    const double mag = std::exp(std::log(std::abs(coef)) + (power - order) * std::log(x));
    return std::copysign(mag, coef) * falling;
}

}  // namespace

double Solution::branch_derivative(Branch branch, double x, int order) const {
    if (!(x > 0.0)) throw Error(ErrorKind::Domain, "value function is defined for x > 0");
    const auto& p = params;
    if (branch == Branch::Lower) {
        double out = power_term(a1, coeffs.gamma2, x, order) +
                     power_term(p.cost_c * coeffs.zeta1, p.m, x, order);
        if (order == 0) out -= p.cost_k * p.u1 / p.lambda;
        return out;
    }
    double out = power_term(a2, coeffs.gamma_bar_1, x, order) +
                 power_term(p.cost_c * coeffs.zeta2, p.m, x, order);
    if (order == 0) out += p.cost_k * p.u2 / p.lambda;
    return out;
}

Solution::Branch Solution::branch_at(double x) const {
    switch (regime) {
        case Regime::ConstantDeficit:
        case Regime::Indifferent: return Branch::Lower;
        case Regime::ConstantSurplus: return Branch::Upper;
        case Regime::Threshold: return x <= b ? Branch::Lower : Branch::Upper;
    }
    return Branch::Lower;
}

double Solution::derivative(double x, int order) const {
    if (!(x > 0.0)) throw Error(ErrorKind::Domain, "value function is defined for x > 0");
    return branch_derivative(branch_at(x), x, order);
}

double Solution::optimal_control(double x) const {
    if (!(x > 0.0)) throw Error(ErrorKind::Domain, "policy is defined for x > 0");
    if (regime == Regime::Indifferent) return 0.0;
    return branch_at(x) == Branch::Lower ? -params.u1 : params.u2;
}

double Solution::value_at_zero() const {
    return branch_at(std::numeric_limits<double>::min()) == Branch::Lower
               ? -params.cost_k * params.u1 / params.lambda
               : params.cost_k * params.u2 / params.lambda;
}

Solution solve(const ModelParams& p, ZetaConvention conv) {
    require_admissible(p);
    Solution s;
    s.params = p;
    s.convention = conv;

    if (p.alpha >= 1.0) {
        // Single-branch regime; the particular solution is the one that
        // zeroes the ODE, for either convention.
        s.coeffs = coefficients(p, ZetaConvention::Derived);
        s.coeffs.convention = conv;
        s.regime = p.cost_k > 0.0 || p.alpha > 1.0 ? Regime::ConstantDeficit : Regime::Indifferent;
        s.b = std::numeric_limits<double>::infinity();
        return s;
    }

    s.coeffs = coefficients(p, conv);
    s.b = threshold_b(p, s.coeffs);
    if (s.b == 0.0) {
        s.regime = Regime::ConstantSurplus;
        return s;
    }
    s.regime = Regime::Threshold;
    std::tie(s.a1, s.a2) = coefficients_a1_a2(p, s.coeffs, s.b);
    return s;
}

}  // namespace debtctl
