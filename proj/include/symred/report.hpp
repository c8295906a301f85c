#pragma once

// Verification runs over a scenario: suite orchestration, the run report
// and its JSON and text renderings.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "symred/check.hpp"
#include "symred/scenario.hpp"

namespace symred {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

enum class Suite { structures, action, reduction, main_theorem, holomorphy };
enum class OutputFormat { text, json };

std::string_view suite_name(Suite s);
// Accepts the names printed by suite_name ("main-theorem" etc.).
std::optional<Suite> parse_suite(std::string_view name);
std::vector<Suite> all_suites();

struct RunConfig {
    std::string scenario;
    std::vector<Suite> suites = all_suites();
    std::optional<std::uint64_t> seed;       // falls back to the scenario file, then 1
    std::optional<std::size_t> samples;      // falls back to the scenario file, then 20
    std::vector<std::pair<std::string, double>> tol_overrides;
    std::string output;                      // empty means stdout
    OutputFormat format = OutputFormat::text;
    Execution exec = Execution::parallel;
    FDConfig fd{};

    // Throws ValidationError: at least one suite, samples >= 1.
    void validate() const;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;
    bool passed() const;
};

struct RunReport {
    std::string scenario;
    std::string version{kToolkitVersion};
    std::uint64_t seed = 1;
    std::size_t samples = 0;
    std::string timestamp;
    std::vector<std::pair<std::string, double>> tolerances;
    std::vector<std::string> warnings;
    std::vector<SuiteReport> suites;
    bool passed = false;  // every check of every suite passed
};

// Runs the requested suites in the fixed order structures, action,
// reduction, main-theorem, holomorphy. Deterministic apart from timestamp.
RunReport execute(const LoadedScenario& loaded, const RunConfig& cfg);

nlohmann::json to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& j);
std::string to_text(const RunReport& r);

struct RunOutcome {
    std::optional<RunReport> report;
    int exit_code = 2;
    std::string error;
};

// Resolves the scenario, runs, writes the report to cfg.output (or out).
// Exit code 0 when every check passes, 1 on a failed check, 2 on usage,
// parse or scenario errors (message on err).
RunOutcome run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace symred
