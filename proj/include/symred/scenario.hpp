#pragma once

// Built-in reduction scenarios and the line-oriented scenario file format.
// The grammar is in docs/scenario-format.md.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symred/expr.hpp"
#include "symred/reduction.hpp"

namespace symred {

// Rectangular array of expressions, row-major.
struct ExprMatrix {
    Index rows = 0;
    Index cols = 0;
    std::vector<expr::Expression> entries;

    const expr::Expression& operator()(Index r, Index c) const { return entries[static_cast<std::size_t>(r * cols + c)]; }
    Matrix eval(const expr::Env& env) const;
};

// Raw value tree of one `key = value` entry.
struct ScenarioValue {
    std::size_t line = 0;
    std::size_t column = 0;
    std::optional<expr::Expression> scalar;
    std::string word;  // bare identifier that is neither a coordinate nor a function
    std::vector<ScenarioValue> items;
    bool is_list() const { return !scalar && word.empty(); }
};

struct ScenarioEntry {
    std::string key;
    std::size_t line = 0;
    std::size_t column = 0;
    ScenarioValue value;
};

// Syntax only: no key or dimension validation.
std::vector<ScenarioEntry> parse_entries(std::string_view text);

// Interprets a value as a matrix; a list of scalars is one row.
ExprMatrix as_matrix(const ScenarioValue& value);

struct ScenarioFile {
    std::string name = "custom";
    Index dim = 0;
    int group_dim = 0;
    Index quotient_dim = 0;
    ExprMatrix omega;
    ExprMatrix metric;
    ExprMatrix acs;
    std::vector<expr::Expression> action;   // in x and t
    std::vector<double> period;             // 0 marks a noncompact factor
    int quadrature = 64;
    bool abelian = true;
    std::vector<expr::Expression> mu;       // in x
    Vector beta;
    std::vector<expr::Expression> section;  // in w
    std::vector<std::pair<std::string, double>> tolerances;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> sample_count;
    SampleDomain quotient_domain;
    SampleDomain ambient_domain;
    std::vector<ChartPoint> points;
    std::vector<std::string> warnings;

    ReductionScenario to_scenario() const;
};

// Parses and validates a scenario file. Throws SourceError with kind
// ParseError or ValidationError.
ScenarioFile parse_scenario(std::string_view text);

// Everything a run needs beyond the geometric data.
struct LoadedScenario {
    ReductionScenario scenario;
    std::vector<std::pair<std::string, double>> tolerances;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> sample_count;
    std::vector<ChartPoint> points;
};

// euclidean_r2n[:n], hopf, linear_translation, skewed_metric_hopf,
// noninvariant_metric_hopf. Throws UnknownScenario.
ReductionScenario builtin(const std::string& name);
std::vector<std::string> list_builtins();

// A built-in name, or a path to a scenario file.
LoadedScenario resolve_scenario(const std::string& name_or_path);

} // namespace symred
