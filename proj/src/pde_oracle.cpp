#include "debtctl/pde_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "debtctl/errors.hpp"
#include "tridiagonal.hpp"

namespace debtctl {

void check_grid(const GridConfig& g, std::optional<double> b_guess) {
    if (g.n < 500) throw Error(ErrorKind::Config, "oracle grid needs at least 500 nodes");
    if (!(g.y_min < g.y_max)) throw Error(ErrorKind::Config, "oracle grid bounds must satisfy y_min < y_max");
    if (!(g.policy_tol > 0.0)) throw Error(ErrorKind::Config, "policy_tol must be positive");
    if (g.max_iters == 0) throw Error(ErrorKind::Config, "max_iters must be positive");
    if (b_guess && *b_guess > 0.0) {
        const double yb = std::log(*b_guess);
        if (!(yb - g.y_min >= 2.0 && g.y_max - yb >= 2.0)) {
            std::ostringstream os;
            os << "ln(b) = " << yb << " must lie at least 2 log units inside [" << g.y_min << ", " << g.y_max << "]";
            throw Error(ErrorKind::Config, os.str());
        }
    }
}

namespace {

struct Stencil {
    double lower;  // weight on v_{i-1}
    double upper;  // weight on v_{i+1}
};

// Upwind weights of sigma^2/2 v_yy + d v_y on a uniform grid.
Stencil upwind(double diff_coef, double d, double h) {
    const double base = diff_coef / (h * h);
    return {base + std::max(-d, 0.0) / h, base + std::max(d, 0.0) / h};
}

}  // namespace

NumericalSolution solve_pde(const ModelParams& p, const GridConfig& g) {
    require_admissible(p);
    if (!(p.alpha < 1.0)) throw Error(ErrorKind::Regime, "the oracle targets the 0 < alpha < 1 problem");
    check_grid(g);

    const std::size_t n = g.n;
    const double h = g.step();
    const double diff_coef = 0.5 * p.sigma * p.sigma;
    const double u_lo = -p.u1, u_hi = p.u2;
    const double d_lo = p.drift(u_lo) - diff_coef;
    const double d_hi = p.drift(u_hi) - diff_coef;
    const Stencil st_lo = upwind(diff_coef, d_lo, h);
    const Stencil st_hi = upwind(diff_coef, d_hi, h);

    NumericalSolution out;
    out.step = h;
    out.y_grid.resize(n);
    std::vector<double> running(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.y_grid[i] = g.y_min + h * static_cast<double>(i);
        running[i] = p.cost_c * std::exp(p.m * out.y_grid[i]);
    }
    out.y_grid.back() = g.y_max;

    const double left_value = -p.cost_k * p.u1 / p.lambda;
    double right_value = 0.0;
    if (g.far_field == FarField::Asymptotic) {
        const double zeta2 = zeta(p.drift(u_hi), p, ZetaConvention::Derived);
        right_value = p.cost_c * zeta2 * std::exp(p.m * g.y_max) + p.cost_k * p.u2 / p.lambda;
    }

    // Unknowns are nodes 0..last; with ZeroCurvature the final node is
    // eliminated through v_{n-1} = 2 v_{n-2} - v_{n-3}.
    const std::size_t size = g.far_field == FarField::Asymptotic ? n : n - 1;
    std::vector<double> policy(n, u_lo);
    std::vector<double> v, v_prev;
    std::vector<double> lower(size), diag(size), upper(size), rhs(size);

    bool converged = false;
    for (std::size_t iter = 0; iter < g.max_iters; ++iter) {
        lower[0] = 0.0;
        diag[0] = 1.0;
        upper[0] = 0.0;
        rhs[0] = left_value;
        for (std::size_t i = 1; i + 1 < n && i < size; ++i) {
            const Stencil& st = policy[i] == u_lo ? st_lo : st_hi;
            lower[i] = -st.lower;
            upper[i] = -st.upper;
            diag[i] = st.lower + st.upper + p.lambda;
            rhs[i] = running[i] + p.cost_k * policy[i];
        }
        if (g.far_field == FarField::Asymptotic) {
            lower[n - 1] = 0.0;
            diag[n - 1] = 1.0;
            upper[n - 1] = 0.0;
            rhs[n - 1] = right_value;
        } else {
            const std::size_t i = n - 2;
            lower[i] -= upper[i];
            diag[i] += 2.0 * upper[i];
            upper[i] = 0.0;
        }

        v = detail::solve_tridiagonal(lower, diag, upper, rhs);
        if (g.far_field == FarField::ZeroCurvature) v.push_back(2.0 * v[n - 2] - v[n - 3]);
        out.iterations = iter + 1;

        if (!v_prev.empty()) {
            double update = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                update = std::max(update, std::abs(v[i] - v_prev[i]));
                out.max_value_increase = std::max(out.max_value_increase, v[i] - v_prev[i]);
            }
            if (update < g.policy_tol) {
                converged = true;
                break;
            }
        }

        // Improvement step; ties keep the current control so the sequence terminates.
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double fwd = (v[i + 1] - v[i]) / h;
            const double bwd = (v[i] - v[i - 1]) / h;
            const double h_lo = d_lo * (d_lo > 0.0 ? fwd : bwd) + p.cost_k * u_lo;
            const double h_hi = d_hi * (d_hi > 0.0 ? fwd : bwd) + p.cost_k * u_hi;
            if (h_lo < h_hi)
                policy[i] = u_lo;
            else if (h_hi < h_lo)
                policy[i] = u_hi;
        }
        policy[0] = policy[1];
        policy[n - 1] = policy[n - 2];
        v_prev = v;
    }
    if (!converged) {
        std::ostringstream os;
        os << "policy iteration did not converge in " << g.max_iters << " iterations";
        throw Error(ErrorKind::NoConvergence, os.str());
    }

    // Policy must be a single step from -u1 to u2.
    std::size_t first_hi = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (policy[i] == u_hi) {
            first_hi = i;
            break;
        }
    }
    for (std::size_t i = first_hi; i < n; ++i) {
        if (policy[i] != u_hi) throw Error(ErrorKind::NonMonotonePolicy, "converged policy switches more than once");
    }
    if (first_hi == 0)
        out.b_numeric = 0.0;
    else if (first_hi == n)
        out.b_numeric = std::numeric_limits<double>::infinity();
    else
        out.b_numeric = std::exp(0.5 * (out.y_grid[first_hi - 1] + out.y_grid[first_hi]));

    out.v_grid = std::move(v);
    out.policy_grid = std::move(policy);
    return out;
}

OracleComparison compare(const Solution& s, const NumericalSolution& ns) {
    OracleComparison c;
    const std::size_t n = ns.y_grid.size();
    const std::size_t skip = n / 20;
    const double intercept = std::abs(s.value_at_zero());
    double sq_err = 0.0, sq_ref = 0.0;
    for (std::size_t i = skip; i + skip < n; ++i) {
        const double x = std::exp(ns.y_grid[i]);
        const double ref = s.value(x);
        const double err = std::abs(ref - ns.v_grid[i]);
        const double denom = std::abs(ref) + intercept;
        c.max_abs_error = std::max(c.max_abs_error, err);
        if (denom > 0.0) c.sup_rel_error = std::max(c.sup_rel_error, err / denom);
        sq_err += err * err;
        sq_ref += ref * ref;
        ++c.interior_nodes;
    }
    c.l2_rel_error = sq_ref > 0.0 ? std::sqrt(sq_err / sq_ref) : std::sqrt(sq_err);
    c.b_closed = s.b;
    c.b_numeric = ns.b_numeric;
    c.b_gap = std::abs(s.b - ns.b_numeric);
    if (s.b > 0.0 && ns.b_numeric > 0.0 && std::isfinite(s.b) && std::isfinite(ns.b_numeric))
        c.b_gap_cells = std::abs(std::log(s.b) - std::log(ns.b_numeric)) / ns.step;
    else
        c.b_gap_cells = s.b == ns.b_numeric ? 0.0 : std::numeric_limits<double>::infinity();
    return c;
}

}  // namespace debtctl
