#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "debtctl/closed_form.hpp"

namespace debtctl {

/// Right-boundary treatment for the truncated log-grid.
enum class FarField {
    /// Dirichlet v = C zeta2 x^m + k u2 / lambda (zeta2 from the ODE-consistent form).
    Asymptotic,
    /// v_N = 2 v_{N-1} - v_{N-2}; uses nothing from the closed form.
    ZeroCurvature,
};

struct GridConfig {
    double y_min = std::log(1e-3);
    double y_max = std::log(20.0);
    std::size_t n = 4000;
    double policy_tol = 1e-10;
    std::size_t max_iters = 200;
    FarField far_field = FarField::Asymptotic;

    double step() const { return (y_max - y_min) / static_cast<double>(n - 1); }
};

/// Throws Config if n < 500, the bounds are not ordered, or (when a guess is
/// given) ln(b_guess) is not at least 2 log units away from either bound.
void check_grid(const GridConfig& g, std::optional<double> b_guess = std::nullopt);

struct NumericalSolution {
    std::vector<double> y_grid;
    std::vector<double> v_grid;
    std::vector<double> policy_grid;
    double b_numeric = 0.0;  ///< 0 if no deficit node, +inf if no surplus node
    std::size_t iterations = 0;
    double step = 0.0;
    /// Largest pointwise increase of v between consecutive policy iterates.
    double max_value_increase = 0.0;
};

/// Policy iteration for the HJB equation in y = ln x.
///
/// Per policy the linear problem
///   sigma^2/2 v_yy + (mu(u) - sigma^2/2) v_y - lambda v + C e^{m y} + k u = 0
/// is discretized with upwind first differences, solved implicitly, and the
/// policy is improved node by node over {-u1, u2}. The left boundary is pinned
/// at -k u1 / lambda.
NumericalSolution solve_pde(const ModelParams& p, const GridConfig& g = {});

struct OracleComparison {
    /// max over interior nodes of |v_cf - v_num| / (|v_cf| + |v(0+)|)
    double sup_rel_error = 0.0;
    double l2_rel_error = 0.0;
    double max_abs_error = 0.0;
    double b_closed = 0.0;
    double b_numeric = 0.0;
    double b_gap = 0.0;
    double b_gap_cells = 0.0;  ///< |ln b_closed - ln b_numeric| / step
    std::size_t interior_nodes = 0;
};

/// Compares on interior nodes, dropping 5% of the grid at each end.
OracleComparison compare(const Solution& s, const NumericalSolution& ns);

}  // namespace debtctl
