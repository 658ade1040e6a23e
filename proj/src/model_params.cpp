#include "debtctl/model_params.hpp"

#include <cmath>
#include <sstream>

#include "debtctl/errors.hpp"

namespace debtctl {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Domain: return "DomainError";
        case ErrorKind::Regime: return "RegimeError";
        case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorKind::NonpositiveRadicand: return "NonpositiveRadicand";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::NonMonotonePolicy: return "NonMonotonePolicy";
        case ErrorKind::Config: return "ConfigError";
        case ErrorKind::Inadmissible: return "InadmissibleParams";
    }
    return "Error";
}

ModelParams baseline_params() {
    ModelParams p;
    p.r = 0.1;
    p.g0 = 0.02;
    p.sigma = 0.25;
    p.alpha = 0.5;
    p.u1 = 1.0;
    p.u2 = 1.0;
    p.lambda = 8.0;
    p.m = 2.0;
    p.cost_c = 1.0;
    p.cost_k = 0.1;
    return p;
}

GrowthBounds growth_bounds(const ModelParams& p) {
    return {p.g0 - p.alpha * p.u2, p.g0 + p.alpha * p.u1};
}

double lambda_m(const ModelParams& p) {
    const double g_bar_1 = growth_bounds(p).g_bar_1;
    return p.m * (p.r - g_bar_1 + p.u1) + 0.5 * p.m * (p.m - 1.0) * p.sigma * p.sigma;
}

double moment_growth_rate(const ModelParams& p, double u) {
    return p.m * p.drift(u) + 0.5 * p.m * (p.m - 1.0) * p.sigma * p.sigma;
}

namespace {

void require_positive(std::vector<std::string>& out, const char* name, double value) {
    if (!(value > 0.0)) out.push_back(std::string(name) + " must be positive");
}

}  // namespace

AdmissibilityReport validate(const ModelParams& p) {
    AdmissibilityReport report;
    auto& v = report.violations;

    const double fields[] = {p.r, p.g0, p.sigma, p.alpha, p.u1, p.u2, p.lambda, p.m, p.cost_c, p.cost_k};
    for (double f : fields) {
        if (!std::isfinite(f)) {
            v.push_back("all parameters must be finite");
            break;
        }
    }

    require_positive(v, "r", p.r);
    require_positive(v, "sigma", p.sigma);
    require_positive(v, "alpha", p.alpha);
    require_positive(v, "u1", p.u1);
    require_positive(v, "u2", p.u2);
    require_positive(v, "lambda", p.lambda);
    require_positive(v, "C", p.cost_c);
    if (!(p.cost_k >= 0.0)) v.push_back("k must be nonnegative");
    if (!(p.m >= 2.0)) v.push_back("m must be at least 2");

    report.lambda_m = lambda_m(p);
    if (!(p.lambda > report.lambda_m)) {
        std::ostringstream os;
        os << "lambda ≤ lambda_m (" << p.lambda << " <= " << report.lambda_m << ")";
        v.push_back(os.str());
    }

    const auto gb = growth_bounds(p);
    if (!(gb.g_bar_1 < 0.0 && 0.0 < gb.g_bar_2)) {
        std::ostringstream os;
        os << "growth band [" << gb.g_bar_1 << ", " << gb.g_bar_2 << "] does not straddle zero";
        report.warnings.push_back(os.str());
    }

    report.admissible = v.empty();
    return report;
}

void require_admissible(const ModelParams& p) {
    const auto report = validate(p);
    if (report.admissible) return;
    std::string msg;
    for (const auto& s : report.violations) {
        if (!msg.empty()) msg += "; ";
        msg += s;
    }
    throw Error(ErrorKind::Inadmissible, msg);
}

namespace {

double* param_slot(ModelParams& p, const std::string& key) {
    if (key == "r") return &p.r;
    if (key == "g0") return &p.g0;
    if (key == "sigma") return &p.sigma;
    if (key == "alpha") return &p.alpha;
    if (key == "u1") return &p.u1;
    if (key == "u2") return &p.u2;
    if (key == "lambda") return &p.lambda;
    if (key == "m") return &p.m;
    if (key == "C") return &p.cost_c;
    if (key == "k") return &p.cost_k;
    return nullptr;
}

}  // namespace

const std::vector<std::string>& param_keys() {
    static const std::vector<std::string> keys{"r", "g0", "sigma", "alpha", "u1", "u2", "lambda", "m", "C", "k"};
    return keys;
}

double get_param(const ModelParams& p, const std::string& key) {
    ModelParams copy = p;
    double* slot = param_slot(copy, key);
    if (!slot) throw Error(ErrorKind::Config, "unknown parameter '" + key + "'");
    return *slot;
}

void set_param(ModelParams& p, const std::string& key, double value) {
    double* slot = param_slot(p, key);
    if (!slot) throw Error(ErrorKind::Config, "unknown parameter '" + key + "'");
    *slot = value;
}

}  // namespace debtctl
