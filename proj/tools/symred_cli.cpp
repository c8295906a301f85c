#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "symred/report.hpp"

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

int parse_check(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read " << path << "\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        const auto file = symred::parse_scenario(buf.str());
        const auto scen = file.to_scenario();
        std::cout << path << ": ok (" << scen.name << ", dim " << scen.chart_dim << ", group dim "
                  << scen.action.group_dim << ", quotient dim " << scen.quotient_dim << ")\n";
        for (const auto& w : scen.warnings) std::cout << "warning: " << w << "\n";
        return 0;
    } catch (const symred::GeometryError& e) {
        std::cerr << path << ": " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for symplectic reduction of almost Kähler data"};
    app.require_subcommand(1);

    symred::RunConfig cfg;
    std::string suites, format = "text";
    std::vector<std::string> tols;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    bool serial = false;

    auto* verify = app.add_subcommand("verify", "Run verification suites on a scenario");
    verify->add_option("scenario", cfg.scenario, "Built-in name or scenario file")->required();
    auto* suites_opt = verify->add_option("--suites", suites, "Comma-separated subset of structures,action,reduction,main-theorem,holomorphy");
    auto* seed_opt = verify->add_option("--seed", seed, "Sampling seed");
    auto* samples_opt = verify->add_option("--samples", samples, "Sample count")->check(CLI::PositiveNumber);
    verify->add_option("--tol", tols, "Tolerance override name=value (algebraic, fd, constraint, geometric)");
    verify->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    verify->add_option("--out", cfg.output, "Output path (default stdout)");
    verify->add_flag("--serial", serial, "Use the serial kernels");

    auto* list = app.add_subcommand("list-scenarios", "List built-in scenarios");

    std::string path;
    auto* check = app.add_subcommand("parse-check", "Parse and validate a scenario file");
    check->add_option("path", path, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        for (const auto& name : symred::list_builtins()) std::cout << name << "\n";
        return 0;
    }
    if (check->parsed()) return parse_check(path);

    if (*suites_opt) {
        cfg.suites.clear();
        for (const auto& s : split(suites, ',')) {
            const auto suite = symred::parse_suite(s);
            if (!suite) {
                std::cerr << "error: unknown suite '" << s << "'\n";
                return 2;
            }
            cfg.suites.push_back(*suite);
        }
    }
    for (const auto& t : tols) {
        const auto eq = t.find('=');
        double value = 0.0;
        const char* first = t.data() + (eq == std::string::npos ? 0 : eq + 1);
        const char* last = t.data() + t.size();
        const auto res = std::from_chars(first, last, value);
        if (eq == std::string::npos || res.ec != std::errc() || res.ptr != last) {
            std::cerr << "error: --tol expects name=value, got '" << t << "'\n";
            return 2;
        }
        cfg.tol_overrides.emplace_back(t.substr(0, eq), value);
    }
    if (*seed_opt) cfg.seed = seed;
    if (*samples_opt) cfg.samples = samples;
    cfg.format = format == "json" ? symred::OutputFormat::json : symred::OutputFormat::text;
    cfg.exec = serial ? symred::Execution::serial : symred::Execution::parallel;
    return symred::run(cfg, std::cout, std::cerr).exit_code;
}
