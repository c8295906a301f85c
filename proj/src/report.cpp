#include "symred/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "symred/holomorphy.hpp"

namespace symred {

std::string_view suite_name(Suite s) {
    switch (s) {
        case Suite::structures: return "structures";
        case Suite::action: return "action";
        case Suite::reduction: return "reduction";
        case Suite::main_theorem: return "main-theorem";
        case Suite::holomorphy: return "holomorphy";
    }
    return "?";
}

std::optional<Suite> parse_suite(std::string_view name) {
    for (Suite s : all_suites())
        if (suite_name(s) == name) return s;
    return std::nullopt;
}

std::vector<Suite> all_suites() {
    return {Suite::structures, Suite::action, Suite::reduction, Suite::main_theorem, Suite::holomorphy};
}

void RunConfig::validate() const {
    if (suites.empty()) throw GeometryError(ErrorKind::ValidationError, "at least one suite is required");
    if (samples && *samples < 1) throw GeometryError(ErrorKind::ValidationError, "samples must be at least 1");
    fd.validate();
}

bool SuiteReport::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

namespace {

// Fibre parameters {0, P/6, P/2} on a period P, or {0, 1/3, 1} on R.
std::vector<Vector> fiber_params(const GroupActionSpec& action) {
    std::vector<Vector> out;
    for (double frac : {0.0, 1.0 / 6.0, 0.5}) {
        Vector a(action.group_dim);
        for (int i = 0; i < action.group_dim; ++i) {
            const double period = i < static_cast<int>(action.periods.size()) ? action.periods[i] : 0.0;
            a(i) = period > 0.0 ? frac * period : 2.0 * frac;
        }
        out.push_back(std::move(a));
    }
    return out;
}

CheckResult error_check(const std::string& suite, const GeometryError& e) {
    CheckResult r;
    r.name = suite + "_error";
    r.anchor = "suite runs to completion";
    r.max_residual = std::numeric_limits<double>::infinity();
    r.tolerance = 0.0;
    r.passed = false;
    r.flags = {std::string(to_string(e.kind())), e.what()};
    return r;
}

struct Context {
    const ReductionScenario& scen;
    const RunConfig& cfg;
    Tolerances tol;
    std::uint64_t seed;
    std::size_t samples;
    std::vector<ChartPoint> ambient;
    std::vector<ChartPoint> quotient;
    std::vector<Vector> params;
    std::vector<Vector> fiber;
};

void structures_suite(const Context& c, std::vector<CheckResult>& out) {
    const auto& s = c.scen;
    out.push_back(check_metric(s.metric, c.ambient, c.tol.algebraic, c.cfg.exec));
    out.push_back(check_symplectic_pointwise(s.omega, c.ambient, c.tol.algebraic, c.cfg.exec));
    out.push_back(check_closed(s.omega, c.ambient, c.cfg.fd, c.tol.fd, c.cfg.exec));
    out.push_back(check_acs(s.acs, c.ambient, c.tol.algebraic, c.cfg.exec));
    out.push_back(check_compatibility(s.triple(), c.ambient, c.tol.algebraic, c.cfg.exec));
    out.push_back(check_compatibility_alt(s.triple(), c.ambient, c.tol.algebraic, c.cfg.exec));
}

void action_suite(const Context& c, std::vector<CheckResult>& out) {
    const auto& s = c.scen;
    out.push_back(check_identity_axiom(s.action, c.ambient, c.tol.algebraic, c.cfg.exec));
    if (s.action.abelian) out.push_back(check_abelian_composition(s.action, c.params, c.ambient, c.tol.algebraic, c.cfg.exec));
    out.push_back(check_isometry(s.action, s.metric, c.params, c.ambient, c.cfg.fd, c.tol.fd, c.cfg.exec));
    out.push_back(check_symplectomorphism(s.action, s.omega, c.params, c.ambient, c.cfg.fd, c.tol.fd, c.cfg.exec));
    out.push_back(momentum_residual(s.action, s.mu, s.omega, c.ambient, c.cfg.fd, c.tol.fd, c.cfg.exec));
    out.push_back(check_momentum_invariance(s.action, s.mu, c.params, c.ambient, c.tol.algebraic, c.cfg.exec));
    out.push_back(check_field_invariance(s.acs, s.action, c.params, c.ambient, c.cfg.fd, c.tol.fd, c.cfg.exec));
}

void reduction_suite(const Context& c, std::vector<CheckResult>& out) {
    auto sub = verify_submersion(c.scen, c.quotient, c.fiber, c.cfg.fd, c.tol, c.cfg.exec);
    for (auto& r : sub.checks) out.push_back(std::move(r));
    auto ident = verify_reduction_identity(c.scen, c.quotient, c.seed, c.samples, c.cfg.fd, c.tol, c.cfg.exec);
    for (auto& r : ident.checks) out.push_back(std::move(r));
}

void main_theorem_suite(const Context& c, std::vector<CheckResult>& out) {
    auto mt = verify_main_theorem(c.scen, c.quotient, c.fiber, c.cfg.fd, c.tol, c.cfg.exec);
    for (auto& r : mt.report.checks) out.push_back(std::move(r));
}

void holomorphy_suite(const Context& c, std::vector<CheckResult>& out) {
    const auto& s = c.scen;
    CheckBuilder acm("action_almost_complex", "dΦ_a ∘ J_M = J_M ∘ dΦ_a", c.tol.fd);
    const bool standard = max_abs(eval_field(s.acs, c.ambient.front()) - standard_acs(s.chart_dim)) == 0.0;
    CheckBuilder cr("action_cauchy_riemann", "∂a/∂x = ∂b/∂y, ∂a/∂y = −∂b/∂x", c.tol.fd);
    for (const auto& a : c.fiber) {
        const ChartedMap cm{s.chart_dim, s.chart_dim, s.action.at(a), s.acs, s.acs};
        const auto acm_res = map_indexed<double>(
            c.ambient.size(), [&](std::size_t i) { return almost_complex_residual(cm, c.ambient[i], c.cfg.fd); },
            c.cfg.exec);
        for (std::size_t i = 0; i < c.ambient.size(); ++i) acm.record(acm_res[i], c.ambient[i].coords());
        if (!standard) continue;
        const auto cr_res = map_indexed<double>(
            c.ambient.size(), [&](std::size_t i) { return cauchy_riemann_residual(cm, c.ambient[i], c.cfg.fd); },
            c.cfg.exec);
        for (std::size_t i = 0; i < c.ambient.size(); ++i) cr.record(cr_res[i], c.ambient[i].coords());
    }
    out.push_back(acm.finish());
    if (standard) out.push_back(cr.finish());

    SampleDomain disc{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0), 1.0};
    const auto pts = disc.sample(c.seed, c.samples);
    CheckBuilder holo("reference_holomorphic", "Df ∘ J = J ∘ Df for holomorphic f", c.tol.fd);
    CheckBuilder equiv("reference_cr_equivalence", "Cauchy–Riemann ⟺ almost complex", 0.0);
    for (const auto& ref : reference_maps()) {
        for (const auto& p : pts) {
            const double a = almost_complex_residual(ref.map, p, c.cfg.fd);
            const double r = cauchy_riemann_residual(ref.map, p, c.cfg.fd);
            if (ref.holomorphic) holo.record(a, p.coords());
            const bool agree = (a <= c.tol.fd && r <= c.tol.fd) || (a > 0.1 && r > 0.1);
            equiv.record(agree ? 0.0 : 1.0, p.coords());
        }
    }
    out.push_back(holo.finish());
    out.push_back(equiv.finish());
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

nlohmann::json number_json(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double number_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw GeometryError(ErrorKind::ParseError, "bad number in report: " + s);
    }
    return j.get<double>();
}

nlohmann::json check_json(const CheckResult& c) {
    nlohmann::json details = nlohmann::json::array();
    for (const auto& [k, v] : c.details) details.push_back({k, number_json(v)});
    nlohmann::json worst = nlohmann::json::array();
    for (Index i = 0; i < c.worst_point.size(); ++i) worst.push_back(number_json(c.worst_point(i)));
    return {{"name", c.name},         {"anchor", c.anchor},     {"max_residual", number_json(c.max_residual)},
            {"tolerance", number_json(c.tolerance)}, {"passed", c.passed}, {"worst_point", worst},
            {"samples", c.samples},   {"details", details},     {"flags", c.flags}};
}

CheckResult check_from_json(const nlohmann::json& j) {
    CheckResult c;
    c.name = j.at("name").get<std::string>();
    c.anchor = j.at("anchor").get<std::string>();
    c.max_residual = number_from_json(j.at("max_residual"));
    c.tolerance = number_from_json(j.at("tolerance"));
    c.passed = j.at("passed").get<bool>();
    const auto& worst = j.at("worst_point");
    c.worst_point.resize(static_cast<Index>(worst.size()));
    for (std::size_t i = 0; i < worst.size(); ++i) c.worst_point(static_cast<Index>(i)) = number_from_json(worst[i]);
    c.samples = j.at("samples").get<std::size_t>();
    for (const auto& d : j.at("details")) c.details.emplace_back(d.at(0).get<std::string>(), number_from_json(d.at(1)));
    c.flags = j.at("flags").get<std::vector<std::string>>();
    return c;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(3) << std::scientific << v;
    return os.str();
}

} // namespace

RunReport execute(const LoadedScenario& loaded, const RunConfig& cfg) {
    cfg.validate();
    const auto& scen = loaded.scenario;
    RunReport report;
    report.scenario = scen.name;
    report.seed = cfg.seed.value_or(loaded.seed.value_or(1));
    report.samples = cfg.samples.value_or(loaded.sample_count.value_or(20));
    report.timestamp = utc_timestamp();
    report.warnings = scen.warnings;

    Tolerances tol;
    for (const auto& [name, value] : loaded.tolerances) tol.set(name, value);
    for (const auto& [name, value] : cfg.tol_overrides) tol.set(name, value);
    report.tolerances = {{"algebraic", tol.algebraic}, {"fd", tol.fd}, {"constraint", tol.constraint},
                         {"geometric", tol.geometric}};

    Context c{scen, cfg, tol, report.seed, report.samples, {}, {}, {}, fiber_params(scen.action)};
    c.ambient = scen.ambient_domain.sample(report.seed, report.samples);
    c.quotient = loaded.points.empty() ? scen.quotient_domain.sample(report.seed, report.samples) : loaded.points;
    c.params = sample_group_params(scen.action, report.seed, report.samples);

    std::vector<Suite> order;
    for (Suite s : all_suites())
        if (std::find(cfg.suites.begin(), cfg.suites.end(), s) != cfg.suites.end()) order.push_back(s);

    for (Suite s : order) {
        SuiteReport sr;
        sr.suite = std::string(suite_name(s));
        try {
            switch (s) {
                case Suite::structures: structures_suite(c, sr.checks); break;
                case Suite::action: action_suite(c, sr.checks); break;
                case Suite::reduction: reduction_suite(c, sr.checks); break;
                case Suite::main_theorem: main_theorem_suite(c, sr.checks); break;
                case Suite::holomorphy: holomorphy_suite(c, sr.checks); break;
            }
        } catch (const GeometryError& e) {
            sr.checks.push_back(error_check(sr.suite, e));
        }
        report.suites.push_back(std::move(sr));
    }
    report.passed = std::all_of(report.suites.begin(), report.suites.end(), [](const auto& s) { return s.passed(); });
    return report;
}

nlohmann::json to_json(const RunReport& r) {
    nlohmann::json suites = nlohmann::json::array();
    for (const auto& s : r.suites) {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& c : s.checks) checks.push_back(check_json(c));
        suites.push_back({{"suite", s.suite}, {"passed", s.passed()}, {"checks", checks}});
    }
    nlohmann::json tols = nlohmann::json::array();
    for (const auto& [k, v] : r.tolerances) tols.push_back({k, number_json(v)});
    return {{"scenario", r.scenario}, {"version", r.version}, {"seed", r.seed},           {"samples", r.samples},
            {"timestamp", r.timestamp}, {"tolerances", tols}, {"warnings", r.warnings}, {"suites", suites},
            {"passed", r.passed}};
}

RunReport report_from_json(const nlohmann::json& j) {
    RunReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.samples = j.at("samples").get<std::size_t>();
    r.timestamp = j.at("timestamp").get<std::string>();
    for (const auto& t : j.at("tolerances")) r.tolerances.emplace_back(t.at(0).get<std::string>(), number_from_json(t.at(1)));
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& s : j.at("suites")) {
        SuiteReport sr;
        sr.suite = s.at("suite").get<std::string>();
        for (const auto& c : s.at("checks")) sr.checks.push_back(check_from_json(c));
        r.suites.push_back(std::move(sr));
    }
    r.passed = j.at("passed").get<bool>();
    return r;
}

std::string to_text(const RunReport& r) {
    std::ostringstream os;
    os << "scenario " << r.scenario << "  version " << r.version << "  seed " << r.seed << "  samples " << r.samples
       << "\n";
    for (const auto& w : r.warnings) os << "warning: " << w << "\n";
    for (const auto& s : r.suites) {
        os << "\n[" << s.suite << "]\n";
        os << std::left << std::setw(36) << "check" << std::setw(12) << "residual" << std::setw(12) << "tolerance"
           << std::setw(6) << "" << "identity\n";
        for (const auto& c : s.checks) {
            os << std::left << std::setw(36) << c.name << std::setw(12) << format_double(c.max_residual)
               << std::setw(12) << format_double(c.tolerance) << std::setw(6) << (c.passed ? "PASS" : "FAIL")
               << c.anchor << "\n";
            for (const auto& f : c.flags) os << "    flag: " << f << "\n";
        }
    }
    os << "\noverall: " << (r.passed ? "PASS" : "FAIL") << "\n";
    return os.str();
}

RunOutcome run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    RunOutcome outcome;
    try {
        cfg.validate();
        const LoadedScenario loaded = resolve_scenario(cfg.scenario);
        outcome.report = execute(loaded, cfg);
    } catch (const GeometryError& e) {
        outcome.error = e.what();
        err << "error: " << e.what() << "\n";
        return outcome;
    }
    const std::string body =
        cfg.format == OutputFormat::json ? to_json(*outcome.report).dump(2) + "\n" : to_text(*outcome.report);
    if (cfg.output.empty()) {
        out << body;
    } else {
        std::ofstream file(cfg.output, std::ios::binary);
        file << body;
        if (!file) {
            outcome.error = "cannot write " + cfg.output;
            err << "error: " << outcome.error << "\n";
            outcome.exit_code = 2;
            return outcome;
        }
    }
    outcome.exit_code = outcome.report->passed ? 0 : 1;
    return outcome;
}

} // namespace symred
