#include "debtctl/output.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "debtctl/errors.hpp"

namespace debtctl {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Config, "cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw Error(ErrorKind::Config, "failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string format_csv(std::span<const std::string> header, std::span<const std::vector<double>> rows) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
    return os.str();
}

std::string slugify(const std::string& name) {
    std::string out;
    bool pending = false;
    for (unsigned char c : name) {
        if (std::isalnum(c)) {
            if (pending && !out.empty()) out += '_';
            out += static_cast<char>(std::tolower(c));
            pending = false;
        } else {
            pending = true;
        }
    }
    return out.empty() ? "scenario" : out;
}

std::string artifact_name(const std::string& scenario, ZetaConvention conv, const std::string& artifact,
                          const std::string& ext) {
    std::string c(to_string(conv));
    for (char& ch : c)
        if (ch == '-') ch = '_';
    return slugify(scenario) + "_" + c + "_" + artifact + "." + ext;
}

std::vector<std::vector<double>> value_curve(const Solution& s, std::span<const double> grid) {
    std::vector<std::vector<double>> rows;
    rows.reserve(grid.size());
    for (double x : grid)
        rows.push_back({x, s.value(x), s.value_prime(x), s.value_second(x), s.optimal_control(x)});
    return rows;
}

std::string value_curve_csv(const Solution& s, std::span<const double> grid) {
    const std::vector<std::string> header{"x", "v", "v_prime", "v_second", "u_star"};
    return format_csv(header, value_curve(s, grid));
}

std::string path_csv(const PathSet& paths) {
    std::ostringstream os;
    os.precision(17);
    os << "t,path_id,x,u\n";
    for (std::size_t i = 0; i < paths.n_paths; ++i)
        for (std::size_t j = 0; j < paths.times.size(); ++j)
            os << paths.times[j] << ',' << i << ',' << paths.state(i, j) << ',' << paths.control(i, j) << '\n';
    return os.str();
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const ModelParams& p) {
    return {{"r", p.r},         {"g0", p.g0}, {"sigma", p.sigma}, {"alpha", p.alpha}, {"u1", p.u1},
            {"u2", p.u2},       {"lambda", p.lambda}, {"m", p.m}, {"C", p.cost_c},    {"k", p.cost_k}};
}

json to_json(const Coefficients& c) {
    return {{"mu1", c.mu1},
            {"mu2", c.mu2},
            {"mu_tilde_1", c.mu_tilde_1},
            {"mu_tilde_2", c.mu_tilde_2},
            {"gamma1", c.gamma1},
            {"gamma2", c.gamma2},
            {"gamma_bar_1", c.gamma_bar_1},
            {"gamma_bar_2", c.gamma_bar_2},
            {"zeta1", c.zeta1},
            {"zeta2", c.zeta2},
            {"convention", std::string(to_string(c.convention))}};
}

json to_json(const Solution& s) {
    const auto order = root_ordering(s.coeffs, s.params.m);
    return {{"regime", std::string(to_string(s.regime))},
            {"convention", std::string(to_string(s.convention))},
            {"b", number_or_null(s.b)},
            {"a1", s.a1},
            {"a2", s.a2},
            {"v_at_zero", s.value_at_zero()},
            {"lambda_m", lambda_m(s.params)},
            {"coefficients", to_json(s.coeffs)},
            {"root_ordering",
             {{"gamma1_negative", order.gamma1_negative},
              {"gamma_bar_1_negative", order.gamma_bar_1_negative},
              {"gamma2_above_m", order.gamma2_above_m},
              {"gamma_bar_2_above_m", order.gamma_bar_2_above_m}}},
            {"params", to_json(s.params)}};
}

json to_json(const AdmissibilityReport& r) {
    return {{"admissible", r.admissible},
            {"lambda_m", r.lambda_m},
            {"violations", r.violations},
            {"warnings", r.warnings}};
}

json to_json(const ResidualReport& r) {
    return {{"points", r.grid.size()},
            {"excluded_points", r.excluded_points},
            {"max_abs_residual_inf", r.max_abs_residual_inf},
            {"max_rel_residual_inf", r.max_rel_residual_inf},
            {"max_abs_residual_policy", r.max_abs_residual_policy},
            {"min_residual_other", number_or_null(r.min_residual_other)},
            {"hjb_inequality_ok", r.hjb_inequality_ok},
            {"residual_at_b_lower", r.residual_at_b_lower},
            {"residual_at_b_upper", r.residual_at_b_upper}};
}

json to_json(const PastingReport& r) {
    return {{"dv", r.dv},         {"dvp", r.dvp},         {"dvpp", r.dvpp},         {"rel_dv", r.rel_dv},
            {"rel_dvp", r.rel_dvp}, {"rel_dvpp", r.rel_dvpp}, {"rel_tol_ok", r.rel_tol_ok}};
}

json to_json(const PropertyReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"gating", c.gating}, {"detail", c.detail}});
    return {{"all_passed", r.all_passed}, {"checks", checks}};
}

json to_json(const OracleComparison& c) {
    return {{"sup_rel_error", c.sup_rel_error},
            {"l2_rel_error", c.l2_rel_error},
            {"max_abs_error", c.max_abs_error},
            {"b_closed", number_or_null(c.b_closed)},
            {"b_numeric", number_or_null(c.b_numeric)},
            {"b_gap", number_or_null(c.b_gap)},
            {"b_gap_cells", number_or_null(c.b_gap_cells)},
            {"interior_nodes", c.interior_nodes}};
}

json to_json(const CostEstimate& e) {
    return {{"mean", e.mean},
            {"stderr", e.std_error},
            {"ci95", {e.ci95_lo, e.ci95_hi}},
            {"tail_bound", e.tail_bound},
            {"n_paths", e.n_paths},
            {"dt", e.dt},
            {"horizon", e.horizon}};
}

json to_json(const MomentReport& r) {
    json entries = json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"t", e.t},
                           {"sample_mean", e.sample_mean},
                           {"stderr", e.std_error},
                           {"bound", e.bound},
                           {"violated", e.violated}});
    return {{"ok", r.ok}, {"entries", entries}};
}

json to_json(const DominanceReport& r) {
    json entries = json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"policy", e.label}, {"estimate", to_json(e.estimate)}, {"dominates", e.dominates}});
    return {{"v_x0", r.v_x0},
            {"optimal", to_json(r.optimal)},
            {"optimal_agrees", r.optimal_agrees},
            {"all_dominate", r.all_dominate},
            {"policies", entries}};
}

}  // namespace debtctl
