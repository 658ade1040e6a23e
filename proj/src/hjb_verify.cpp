#include "debtctl/hjb_verify.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>

#include "debtctl/errors.hpp"

namespace debtctl {

double hjb_expression(const ModelParams& p, double x, double u, double w, double wp, double wpp) {
    return 0.5 * p.sigma * p.sigma * x * x * wpp + x * p.drift(u) * wp + p.cost_c * std::pow(x, p.m) +
           p.cost_k * u - p.lambda * w;
}

double hamiltonian(const ModelParams& p, double x, double u, double slope) {
    return x * slope * (p.r - p.g0) + (p.cost_k - (1.0 - p.alpha) * x * slope) * u;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    g.back() = hi;
    return g;
}

namespace {

bool near_b(const Solution& s, double x, double rel) {
    return s.regime == Regime::Threshold && std::abs(x - s.b) <= rel * s.b;
}

}  // namespace

ResidualReport hjb_residual(const Solution& s, std::span<const double> grid, const ResidualOptions& opts) {
    const auto& p = s.params;
    ResidualReport rep;
    rep.min_residual_other = std::numeric_limits<double>::infinity();

    for (double x : grid) {
        if (!(x > 0.0)) throw Error(ErrorKind::Domain, "residual grid points must be positive");
        if (near_b(s, x, opts.b_exclusion_rel)) {
            ++rep.excluded_points;
            continue;
        }
        const double v = s.value(x), vp = s.value_prime(x), vpp = s.value_second(x);
        const double at_deficit = hjb_expression(p, x, -p.u1, v, vp, vpp);
        const double at_surplus = hjb_expression(p, x, p.u2, v, vp, vpp);
        const double u_star = s.optimal_control(x);
        const double own = s.regime == Regime::Indifferent ? hjb_expression(p, x, 0.0, v, vp, vpp)
                           : u_star < 0.0                  ? at_deficit
                                                           : at_surplus;
        const double scale = 1.0 + p.cost_c * std::pow(x, p.m) + p.lambda * std::abs(v);

        rep.grid.push_back(x);
        rep.residual_inf.push_back(std::min(at_deficit, at_surplus));
        rep.residual_other.push_back(std::max(at_deficit, at_surplus));
        rep.residual_policy.push_back(own);
        rep.scale.push_back(scale);

        rep.max_abs_residual_inf = std::max(rep.max_abs_residual_inf, std::abs(rep.residual_inf.back()));
        rep.max_rel_residual_inf = std::max(rep.max_rel_residual_inf, std::abs(rep.residual_inf.back()) / scale);
        rep.max_abs_residual_policy = std::max(rep.max_abs_residual_policy, std::abs(own));
        rep.min_residual_other = std::min(rep.min_residual_other, rep.residual_other.back());
    }

    if (s.regime == Regime::Threshold) {
        using B = Solution::Branch;
        const double b = s.b;
        auto one_sided = [&](B branch, double u) {
            return hjb_expression(p, b, u, s.branch_derivative(branch, b, 0), s.branch_derivative(branch, b, 1),
                                  s.branch_derivative(branch, b, 2));
        };
        rep.residual_at_b_lower = one_sided(B::Lower, -p.u1);
        rep.residual_at_b_upper = one_sided(B::Upper, p.u2);
    }

    rep.hjb_inequality_ok = rep.min_residual_other >= -opts.inequality_tol;
    return rep;
}

PastingReport pasting_check(const Solution& s, double rel_tol) {
    if (s.regime != Regime::Threshold || !(s.b > 0.0))
        throw Error(ErrorKind::Regime, "pasting check requires the threshold regime");
    using B = Solution::Branch;
    PastingReport rep;
    double* abs_out[] = {&rep.dv, &rep.dvp, &rep.dvpp};
    double* rel_out[] = {&rep.rel_dv, &rep.rel_dvp, &rep.rel_dvpp};
    rep.rel_tol_ok = true;
    for (int order = 0; order < 3; ++order) {
        const double lo = s.branch_derivative(B::Lower, s.b, order);
        const double hi = s.branch_derivative(B::Upper, s.b, order);
        const double diff = std::abs(hi - lo);
        const double mag = std::max({std::abs(lo), std::abs(hi), std::numeric_limits<double>::min()});
        *abs_out[order] = diff;
        *rel_out[order] = diff / mag;
        rep.rel_tol_ok = rep.rel_tol_ok && diff / mag <= rel_tol;
    }
    return rep;
}

const PropertyCheck* PropertyReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

PropertyReport property_suite(const Solution& s, std::span<const double> grid, const PropertyOptions& opts) {
    const auto& p = s.params;
    const double floor_value = -p.cost_k * p.u1 / p.lambda;
    const double lm = lambda_m(p);

    struct Worst {
        double value = 0.0;
        double at = 0.0;
        std::size_t count = 0;
    };
    Worst lower, upper, slope, curvature, minimizer;

    for (double x : grid) {
        if (!(x > 0.0)) throw Error(ErrorKind::Domain, "property grid points must be positive");
        const double v = s.value(x), vp = s.value_prime(x), vpp = s.value_second(x);

        if (v < floor_value) {
            ++lower.count;
            if (floor_value - v > lower.value) lower = {floor_value - v, x, lower.count};
        }
        const double bound = p.cost_c * std::pow(x, p.m) / (p.lambda - lm) + p.cost_c / p.lambda;
        if (v > bound) {
            ++upper.count;
            if (v - bound > upper.value) upper = {v - bound, x, upper.count};
        }
        if (vp < -opts.slope_tol) {
            ++slope.count;
            if (-vp > slope.value) slope = {-vp, x, slope.count};
        }
        if (vpp < -opts.curvature_tol) {
            ++curvature.count;
            if (-vpp > curvature.value) curvature = {-vpp, x, curvature.count};
        }
        if (s.regime != Regime::Indifferent && !near_b(s, x, opts.b_exclusion_rel)) {
            const bool prefers_deficit = p.cost_k - (1.0 - p.alpha) * x * vp >= 0.0;
            const bool policy_deficit = s.optimal_control(x) < 0.0;
            if (prefers_deficit != policy_deficit) {
                ++minimizer.count;
                minimizer.at = x;
            }
        }
    }

    PropertyReport rep;
    auto add = [&](std::string name, const Worst& w, bool gating, const char* what) {
        std::ostringstream os;
        if (w.count == 0)
            os << "ok on " << grid.size() << " points";
        else
            os << w.count << " violations of " << what << ", worst " << w.value << " at x = " << w.at;
        rep.checks.push_back({std::move(name), w.count == 0, gating, os.str()});
    };
    add("lower_bound", lower, true, "v >= -k u1 / lambda");

    {
        const double gap = std::abs(s.value(opts.limit_x) - s.value_at_zero());
        const double target_gap = std::abs(s.value_at_zero() - floor_value);
        std::ostringstream os;
        os << "|v(" << opts.limit_x << ") - v(0+)| = " << gap << ", v(0+) = " << s.value_at_zero();
        rep.checks.push_back({"limit_at_zero", gap <= opts.limit_tol && target_gap <= opts.limit_tol, true, os.str()});
    }

    add("upper_bound", upper, true, "v <= C x^m / (lambda - lambda_m) + C / lambda");
    add("monotone", slope, true, "v' >= 0");
    add("convex", curvature, false, "v'' >= 0");
    add("minimizer", minimizer, true, "minimizer consistency");

    rep.all_passed = std::all_of(rep.checks.begin(), rep.checks.end(),
                                 [](const PropertyCheck& c) { return c.passed || !c.gating; });
    return rep;
}

}  // namespace debtctl
