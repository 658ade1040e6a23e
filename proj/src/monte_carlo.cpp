#include "debtctl/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "debtctl/errors.hpp"

namespace debtctl {

// --- PolicySpec -------------------------------------------------------------

PolicySpec::PolicySpec(Kind kind, std::vector<double> breakpoints, std::vector<double> values)
    : kind_(kind), breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (values_.size() != breakpoints_.size() + 1)
        throw Error(ErrorKind::Config, "step policy needs one more value than breakpoints");
    if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end()))
        throw Error(ErrorKind::Config, "step policy breakpoints must be sorted");
    log_breakpoints_.reserve(breakpoints_.size());
    for (double b : breakpoints_)
        log_breakpoints_.push_back(b > 0.0 ? std::log(b) : -std::numeric_limits<double>::infinity());
}

PolicySpec PolicySpec::constant(double u) { return PolicySpec(Kind::Constant, {}, {u}); }

PolicySpec PolicySpec::threshold(double b, double low, double high) {
    return PolicySpec(Kind::Threshold, {b}, {low, high});
}

PolicySpec PolicySpec::step_function(std::vector<double> breakpoints, std::vector<double> values) {
    return PolicySpec(Kind::StepFunction, std::move(breakpoints), std::move(values));
}

double PolicySpec::operator()(double x) const {
    for (std::size_t i = 0; i < breakpoints_.size(); ++i)
        if (x <= breakpoints_[i]) return values_[i];
    return values_.back();
}

double PolicySpec::at_log(double log_x) const {
    for (std::size_t i = 0; i < log_breakpoints_.size(); ++i)
        if (log_x <= log_breakpoints_[i]) return values_[i];
    return values_.back();
}

void PolicySpec::check_admissible(const ModelParams& p) const {
    for (double u : values_) {
        if (!(u >= -p.u1 && u <= p.u2)) {
            std::ostringstream os;
            os << "control " << u << " outside [" << -p.u1 << ", " << p.u2 << "]";
            throw Error(ErrorKind::Config, os.str());
        }
    }
}

std::string PolicySpec::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Constant: os << "constant(" << values_[0] << ")"; break;
        case Kind::Threshold:
            os << "threshold(b=" << breakpoints_[0] << ", " << values_[0] << ", " << values_[1] << ")";
            break;
        case Kind::StepFunction:
            os << "step(";
            for (std::size_t i = 0; i < breakpoints_.size(); ++i) os << values_[i] << " |" << breakpoints_[i] << "| ";
            os << values_.back() << ")";
            break;
    }
    return os.str();
}

PolicySpec policy_from_solution(const Solution& s) {
    const auto& p = s.params;
    switch (s.regime) {
        case Regime::Threshold: return PolicySpec::threshold(s.b, -p.u1, p.u2);
        case Regime::ConstantDeficit: return PolicySpec::constant(-p.u1);
        case Regime::ConstantSurplus: return PolicySpec::constant(p.u2);
        case Regime::Indifferent: return PolicySpec::constant(0.0);
    }
    return PolicySpec::constant(0.0);
}

std::vector<PolicySpec> random_step_policies(const ModelParams& p, std::size_t count, std::uint64_t seed,
                                             double x_lo, double x_hi, std::size_t max_breaks) {
    boost::random::mt19937_64 gen(seed);
    boost::random::uniform_int_distribution<std::size_t> n_breaks(1, std::max<std::size_t>(1, max_breaks));
    boost::random::uniform_real_distribution<double> where(x_lo, x_hi);
    boost::random::uniform_real_distribution<double> control(-p.u1, p.u2);
    std::vector<PolicySpec> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> bps(n_breaks(gen));
        for (double& b : bps) b = where(gen);
        std::sort(bps.begin(), bps.end());
        std::vector<double> vals(bps.size() + 1);
        for (double& u : vals) u = control(gen);
        out.push_back(PolicySpec::step_function(std::move(bps), std::move(vals)));
    }
    return out;
}

// --- configuration ----------------------------------------------------------

std::size_t SimConfig::steps() const {
    return static_cast<std::size_t>(std::llround(horizon / dt));
}

void check_config(const SimConfig& cfg, std::size_t min_paths) {
    if (cfg.n_paths < std::max<std::size_t>(min_paths, 1)) {
        std::ostringstream os;
        os << "n_paths = " << cfg.n_paths << " is below the minimum " << std::max<std::size_t>(min_paths, 1);
        throw Error(ErrorKind::Config, os.str());
    }
    if (!(cfg.dt > 0.0 && cfg.dt <= 1e-2)) throw Error(ErrorKind::Config, "dt must lie in (0, 1e-2]");
    if (!(cfg.horizon > 0.0)) throw Error(ErrorKind::Config, "horizon must be positive");
    if (!(cfg.x0 > 0.0)) throw Error(ErrorKind::Config, "x0 must be positive");
    if (cfg.steps() == 0) throw Error(ErrorKind::Config, "horizon shorter than one step");
    const double work = static_cast<double>(cfg.n_paths) * static_cast<double>(cfg.steps());
    if (work > cfg.step_budget) {
        std::ostringstream os;
        os << "n_paths * steps = " << work << " exceeds the budget " << cfg.step_budget;
        throw Error(ErrorKind::Config, os.str());
    }
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// --- simulation core --------------------------------------------------------

namespace {

/// Runs fn(i) for every path, splitting indices into contiguous blocks.
template <class Fn>
void for_each_path(std::size_t n_paths, std::size_t workers, Fn&& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n_paths);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_paths; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t block = (n_paths + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * block, hi = std::min(n_paths, lo + block);
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct SampleStats {
    double mean;
    double std_error;
};

SampleStats sample_stats(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = pairwise_sum(xs) / n;
    std::vector<double> sq(xs.size());
    std::transform(xs.begin(), xs.end(), sq.begin(), [mean](double x) { return (x - mean) * (x - mean); });
    const double var = xs.size() > 1 ? pairwise_sum(sq) / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

/// One path of log X under a frozen-control lognormal update;
/// on_step(step, log_x, u, log_x_next) is called for every step.
class PathStepper {
public:
    PathStepper(const ModelParams& p, const PolicySpec& pol, const SimConfig& cfg)
        : p_(p), pol_(pol), cfg_(cfg), n_steps_(cfg.steps()),
          half_var_dt_(0.5 * p.sigma * p.sigma * cfg.dt), vol_sqrt_dt_(p.sigma * std::sqrt(cfg.dt)) {}

    std::size_t steps() const { return n_steps_; }

    template <class OnStep>
    void run(std::size_t index, OnStep&& on_step) const {
        boost::random::mt19937_64 gen(path_seed(cfg_.master_seed, index));
        boost::random::normal_distribution<double> normal;
        double log_x = std::log(cfg_.x0);
        for (std::size_t j = 0; j < n_steps_; ++j) {
            const double u = pol_.at_log(log_x);
            const double next = log_x + p_.drift(u) * cfg_.dt - half_var_dt_ + vol_sqrt_dt_ * normal(gen);
            on_step(j, log_x, u, next);
            log_x = next;
        }
    }

private:
    const ModelParams& p_;
    const PolicySpec& pol_;
    const SimConfig& cfg_;
    std::size_t n_steps_;
    double half_var_dt_;
    double vol_sqrt_dt_;
};

void check_inputs(const ModelParams& p, const PolicySpec& pol, const SimConfig& cfg, std::size_t min_paths) {
    require_admissible(p);
    pol.check_admissible(p);
    check_config(cfg, min_paths);
}

}  // namespace

PathSet simulate_paths(const ModelParams& p, const PolicySpec& pol, const SimConfig& cfg, std::size_t record_every) {
    check_inputs(p, pol, cfg, 1);
    if (record_every == 0) throw Error(ErrorKind::Config, "record_every must be positive");
    const PathStepper stepper(p, pol, cfg);
    const std::size_t n_steps = stepper.steps();

    PathSet out;
    out.n_paths = cfg.n_paths;
    for (std::size_t j = 0; j < n_steps; j += record_every) out.times.push_back(cfg.dt * static_cast<double>(j));
    out.times.push_back(cfg.dt * static_cast<double>(n_steps));
    const std::size_t n_rec = out.times.size();
    out.x.assign(cfg.n_paths * n_rec, 0.0);
    out.u.assign(cfg.n_paths * n_rec, 0.0);

    for_each_path(cfg.n_paths, cfg.workers, [&](std::size_t i) {
        double* xs = out.x.data() + i * n_rec;
        double* us = out.u.data() + i * n_rec;
        double last = 0.0;
        stepper.run(i, [&](std::size_t j, double log_x, double u, double next) {
            if (j % record_every == 0) {
                xs[j / record_every] = std::exp(log_x);
                us[j / record_every] = u;
            }
            last = next;
        });
        xs[n_rec - 1] = std::exp(last);
        us[n_rec - 1] = pol.at_log(last);
    });
    return out;
}

double tail_bound(const ModelParams& p, double x0, double horizon) {
    const double lm = lambda_m(p);
    const double state = p.cost_c * std::pow(x0, p.m) * std::exp((lm - p.lambda) * horizon) / (p.lambda - lm);
    const double control = (p.cost_c + p.cost_k * std::max(p.u1, p.u2)) * std::exp(-p.lambda * horizon) / p.lambda;
    return state + control;
}

bool CostEstimate::agrees_with(double target, double n_sigma) const {
    return std::abs(mean - target) <= n_sigma * std_error + tail_bound;
}

CostEstimate estimate_cost(const ModelParams& p, const PolicySpec& pol, const SimConfig& cfg) {
    check_inputs(p, pol, cfg, min_estimator_paths);
    const PathStepper stepper(p, pol, cfg);
    const double dt = cfg.dt;
    const double step_discount = std::exp(-p.lambda * dt);
    const double discount_integral = -std::expm1(-p.lambda * dt) / p.lambda;  // int_0^dt e^{-lambda s} ds
    const bool trapezoid = cfg.quadrature == Quadrature::Trapezoid;

    std::vector<double> costs(cfg.n_paths);
    for_each_path(cfg.n_paths, cfg.workers, [&](std::size_t i) {
        double total = 0.0;
        double discount = 1.0;
        double state_cost = p.cost_c * std::exp(p.m * std::log(cfg.x0));  // e^{-lambda t} C X_t^m
        stepper.run(i, [&](std::size_t j, double, double u, double next) {
            const double t_next = dt * static_cast<double>(j + 1);
            const double next_cost = p.cost_c * std::exp(p.m * next - p.lambda * t_next);
            if (trapezoid)
                total += 0.5 * dt * (state_cost + next_cost) + p.cost_k * u * discount * discount_integral;
            else
                total += dt * (state_cost + p.cost_k * u * discount);
            state_cost = next_cost;
            discount *= step_discount;
        });
        costs[i] = total;
    });

    const auto stats = sample_stats(costs);
    CostEstimate est;
    est.mean = stats.mean;
    est.std_error = stats.std_error;
    est.ci95_lo = stats.mean - 1.96 * stats.std_error;
    est.ci95_hi = stats.mean + 1.96 * stats.std_error;
    est.tail_bound = tail_bound(p, cfg.x0, dt * static_cast<double>(stepper.steps()));
    est.n_paths = cfg.n_paths;
    est.dt = dt;
    est.horizon = cfg.horizon;
    return est;
}

double constant_policy_cost(const ModelParams& p, double x0, double u) {
    return p.cost_c * std::pow(x0, p.m) / (p.lambda - moment_growth_rate(p, u)) + p.cost_k * u / p.lambda;
}

MomentReport moment_check(const ModelParams& p, const PolicySpec& pol, const SimConfig& cfg,
                          std::span<const double> times) {
    check_inputs(p, pol, cfg, min_estimator_paths);
    const PathStepper stepper(p, pol, cfg);
    const std::size_t n_steps = stepper.steps();

    // Step index after which each requested time is reached.
    std::vector<std::size_t> at_step;
    for (double t : times) {
        const auto k = static_cast<std::size_t>(std::llround(t / cfg.dt));
        if (t < 0.0 || k > n_steps) throw Error(ErrorKind::Config, "moment time outside the simulated horizon");
        at_step.push_back(k);
    }
    const std::size_t n_t = times.size();
    std::vector<double> samples(cfg.n_paths * n_t);
    const double x0_m = std::pow(cfg.x0, p.m);

    for_each_path(cfg.n_paths, cfg.workers, [&](std::size_t i) {
        double* row = samples.data() + i * n_t;
        for (std::size_t q = 0; q < n_t; ++q)
            if (at_step[q] == 0) row[q] = x0_m;
        stepper.run(i, [&](std::size_t j, double, double, double next) {
            for (std::size_t q = 0; q < n_t; ++q)
                if (at_step[q] == j + 1) row[q] = std::exp(p.m * next);
        });
    });

    MomentReport rep;
    rep.ok = true;
    const double lm = lambda_m(p);
    std::vector<double> column(cfg.n_paths);
    for (std::size_t q = 0; q < n_t; ++q) {
        for (std::size_t i = 0; i < cfg.n_paths; ++i) column[i] = samples[i * n_t + q];
        const auto stats = sample_stats(column);
        MomentEntry e;
        e.t = times[q];
        e.sample_mean = stats.mean;
        e.std_error = stats.std_error;
        e.bound = x0_m * std::exp(lm * times[q]);
        e.violated = e.sample_mean > e.bound + 3.0 * e.std_error;
        rep.ok = rep.ok && !e.violated;
        rep.entries.push_back(e);
    }
    return rep;
}

DominanceReport dominance_test(const ModelParams& p, const Solution& s, std::span<const PolicySpec> policies,
                               const SimConfig& cfg, const SimConfig& policy_cfg) {
    if (policy_cfg.x0 != cfg.x0) throw Error(ErrorKind::Config, "dominance runs must share x0");
    DominanceReport rep;
    rep.v_x0 = s.value(cfg.x0);
    rep.optimal = estimate_cost(p, policy_from_solution(s), cfg);
    rep.optimal_agrees = rep.optimal.agrees_with(rep.v_x0);
    rep.all_dominate = true;
    for (const auto& pol : policies) {
        DominanceEntry e;
        e.label = pol.describe();
        e.estimate = estimate_cost(p, pol, policy_cfg);
        e.dominates = e.estimate.mean >= rep.v_x0 - 3.0 * e.estimate.std_error - e.estimate.tail_bound;
        rep.all_dominate = rep.all_dominate && e.dominates;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

}  // namespace debtctl
