#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "debtctl/closed_form.hpp"

namespace debtctl {

/// State-feedback step control. Every kind is stored as a step function:
/// u(x) = values[i] for the first i with x <= breakpoints[i], else values.back().
class PolicySpec {
public:
    enum class Kind { Constant, Threshold, StepFunction };

    static PolicySpec constant(double u);
    /// low on (0, b], high above b.
    static PolicySpec threshold(double b, double low, double high);
    static PolicySpec step_function(std::vector<double> breakpoints, std::vector<double> values);

    Kind kind() const { return kind_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }

    double operator()(double x) const;
    /// Same rule evaluated on ln x, without exponentiating.
    double at_log(double log_x) const;

    /// Throws Config unless every control lies in [-u1, u2] and breakpoints ascend.
    void check_admissible(const ModelParams& p) const;

    std::string describe() const;

private:
    PolicySpec(Kind kind, std::vector<double> breakpoints, std::vector<double> values);

    Kind kind_;
    std::vector<double> breakpoints_;
    std::vector<double> log_breakpoints_;
    std::vector<double> values_;
};

/// The feedback policy u*(x) of a closed-form solution.
PolicySpec policy_from_solution(const Solution& s);

/// Random admissible step policies with breakpoints drawn in [x_lo, x_hi].
std::vector<PolicySpec> random_step_policies(const ModelParams& p, std::size_t count, std::uint64_t seed,
                                             double x_lo = 0.2, double x_hi = 3.0, std::size_t max_breaks = 4);

enum class Quadrature {
    /// Trapezoid on C X^m with the discount integrated exactly on the control term.
    Trapezoid,
    /// dt * e^{-lambda t} f(X_t, u_t) at the left end of each step.
    LeftRiemann,
};

struct SimConfig {
    std::size_t n_paths = 100000;
    double dt = 1e-3;
    double horizon = 10.0;
    std::uint64_t master_seed = 20240501;
    double x0 = 1.0;
    std::size_t workers = 1;  ///< 0 selects std::thread::hardware_concurrency()
    double step_budget = 2e10;
    Quadrature quadrature = Quadrature::Trapezoid;

    std::size_t steps() const;
};

/// Paths needed by the estimators (cost, moments).
inline constexpr std::size_t min_estimator_paths = 1000;

/// Throws Config on n_paths < min_paths, dt outside (0, 1e-2], nonpositive
/// horizon or x0, or a path-step count over step_budget.
void check_config(const SimConfig& cfg, std::size_t min_paths = 1);

/// Seed for path `index`; independent of how paths are scheduled.
std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t index);

struct PathSet {
    std::vector<double> times;
    std::size_t n_paths = 0;
    /// Row-major [path][record].
    std::vector<double> x;
    std::vector<double> u;

    double state(std::size_t path, std::size_t record) const { return x[path * times.size() + record]; }
    double control(std::size_t path, std::size_t record) const { return u[path * times.size() + record]; }
};

/// Exact lognormal stepping with the control frozen at u = pol(X_t) over each step.
/// Records every `record_every` steps plus the final state.
PathSet simulate_paths(const ModelParams& p, const PolicySpec& pol, const SimConfig& cfg,
                       std::size_t record_every = 1);

struct CostEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
    double tail_bound = 0.0;  ///< deterministic bound on the cost beyond the horizon
    std::size_t n_paths = 0;
    double dt = 0.0;
    double horizon = 0.0;

    /// |mean - target| <= n_sigma * stderr + tail_bound
    bool agrees_with(double target, double n_sigma = 3.0) const;
};

/// Bound on E of the discounted cost beyond T:
/// C x0^m e^{(lambda_m - lambda) T} / (lambda - lambda_m) + (C + k max(u1, u2)) e^{-lambda T} / lambda.
double tail_bound(const ModelParams& p, double x0, double horizon);

CostEstimate estimate_cost(const ModelParams& p, const PolicySpec& pol, const SimConfig& cfg);

/// J(x, u) for a constant control: C x^m / (lambda - lambda(u)) + k u / lambda.
double constant_policy_cost(const ModelParams& p, double x0, double u);

struct MomentEntry {
    double t = 0.0;
    double sample_mean = 0.0;
    double std_error = 0.0;
    double bound = 0.0;  ///< x0^m e^{lambda_m t}
    bool violated = false;
};

struct MomentReport {
    std::vector<MomentEntry> entries;
    bool ok = false;
};

/// Sample E[X_t^m] at the requested times against the admissibility bound.
MomentReport moment_check(const ModelParams& p, const PolicySpec& pol, const SimConfig& cfg,
                          std::span<const double> times);

struct DominanceEntry {
    std::string label;
    CostEstimate estimate;
    bool dominates = false;  ///< J_MC >= v(x0) - 3 stderr - tail
};

struct DominanceReport {
    double v_x0 = 0.0;
    CostEstimate optimal;
    bool optimal_agrees = false;
    std::vector<DominanceEntry> entries;
    bool all_dominate = false;
};

/// Verification-theorem check: the optimal feedback policy from s reproduces
/// v(x0), and no competing policy beats it beyond the Monte Carlo error.
/// `policy_cfg` lets competitors run with a smaller path count.
DominanceReport dominance_test(const ModelParams& p, const Solution& s, std::span<const PolicySpec> policies,
                               const SimConfig& cfg, const SimConfig& policy_cfg);

}  // namespace debtctl
