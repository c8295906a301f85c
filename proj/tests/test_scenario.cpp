#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "symred/report.hpp"
#include "symred/scenario.hpp"

using namespace symred;

namespace {

const FDConfig kFd{};

const char* kMinimal = R"(dim = 2
group_dim = 1
omega = [[0, 1], [-1, 0]]
g = [[1, 0], [0, 1]]
J = [[0, -1], [1, 0]]
action = [x1 + t1, x2]
mu = [x2]
beta = [0]
section = [0, 0]
)";

SourceError scenario_failure(std::string_view text) {
    try {
        (void)parse_scenario(text);
    } catch (const SourceError& e) {
        return e;
    }
    FAIL("expected a SourceError");
    throw std::logic_error("unreachable");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string replace_line(std::string text, const std::string& key, const std::string& line) {
    const auto at = text.find(key + " =");
    const auto end = text.find('\n', at);
    return text.replace(at, end - at, line);
}

} // namespace

TEST_CASE("fragments parse to fields") {
    const auto entries = parse_entries("omega = [[0,1],[-1,0]]");
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].key == "omega");
    const auto m = as_matrix(entries[0].value);
    CHECK(m.rows == 2);
    CHECK(m.cols == 2);
    for (const auto& e : m.entries) CHECK(e.is_constant());
    CHECK(max_abs(m.eval({}) - oracle::omega_std(2)) == 0.0);

    const auto mu = parse_entries("mu = 0.5*(x1^2 + x2^2 + x3^2 + x4^2)");
    REQUIRE(mu.size() == 1);
    const std::vector<double> at{1, 0, 0, 0};
    CHECK(mu[0].value.scalar->eval({at, {}, {}}) == 0.5);
}

TEST_CASE("unclosed brackets are parse errors with a position") {
    const auto e = scenario_failure("g = [[1,0],[0,1]");
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(e.line() == 1);
    CHECK(e.column() == 17);
    CHECK_FALSE(e.expected().empty());
}

TEST_CASE("newlines inside brackets and comments are ignored") {
    const auto entries = parse_entries("# leading comment\nomega = [[0, 1],   # row one\n         [-1, 0]]\nname = demo\n");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].line == 2);
    CHECK(entries[1].key == "name");
    CHECK(entries[1].value.word == "demo");
    CHECK(as_matrix(entries[0].value).rows == 2);
}

TEST_CASE("a minimal scenario validates and builds") {
    const auto f = parse_scenario(kMinimal);
    CHECK(f.dim == 2);
    CHECK(f.group_dim == 1);
    CHECK(f.quotient_dim == 0);
    CHECK(f.name == "custom");
    const auto s = f.to_scenario();
    CHECK(s.chart_dim == 2);
    CHECK(s.warnings.empty());
}

TEST_CASE("validation errors") {
    const std::string base = kMinimal;
    struct Case {
        std::string text;
        std::size_t line;
    };
    const std::vector<Case> cases = {
        {replace_line(base, "dim", "dim = 3"), 1},
        {replace_line(base, "omega", "omega = [[0, 1, 0], [-1, 0, 0]]"), 3},
        {replace_line(base, "mu", "mu = [y1]"), 7},
        {replace_line(base, "mu", "mu = [x3]"), 7},
        {replace_line(base, "section", "section = [w1, 0]"), 9},
        {replace_line(base, "omega", "omega = [[0, 1], [-1]]"), 3},
        {base + "dim = 2\n", 10},
        {base + "colour = 2\n", 10},
        {base + "abelian = maybe\n", 10},
        {base + "tol.bogus = 1\n", 10},
        {replace_line(base, "beta", "beta = [x1]"), 8},
    };
    for (const auto& c : cases) {
        CAPTURE(c.text);
        const auto e = scenario_failure(c.text);
        CHECK(e.kind() == ErrorKind::ValidationError);
        CHECK(e.line() == c.line);
        CHECK(e.column() >= 1);
    }
    const auto odd = scenario_failure(replace_line(base, "dim", "dim = 3"));
    CHECK(std::string(odd.what()).find("odd symplectic dimension") != std::string::npos);

    const auto missing = scenario_failure("dim = 2\ngroup_dim = 1\n");
    CHECK(missing.kind() == ErrorKind::ValidationError);
    CHECK(missing.line() >= 1);
}

TEST_CASE("quotient_dim disagreement is a warning") {
    const auto f = parse_scenario("quotient_dim = 1\n" + std::string(kMinimal));
    CHECK(f.warnings.size() == 1);
}

TEST_CASE("builtin examples") {
    const auto hopf = builtin("hopf");
    CHECK(hopf.mu.value(ChartPoint{1.0, 0.0, 0.0, 0.0})(0) == 0.5);
    CHECK(hopf.quotient_dim == 2);

    const auto lin = builtin("linear_translation");
    const auto sp = split_tangent(lin, ChartPoint{0.0, 0.0, 0.0, 0.0}, kFd);
    CHECK(sp.vertical.cols() == 1);
    CHECK(std::abs(sp.vertical(0, 0) - 1.0) < 1e-12);

    const auto e1 = builtin("euclidean_r2n:1");
    CHECK(e1.chart_dim == 2);
    CHECK(e1.quotient_dim == 0);
    const auto pts = e1.ambient_domain.sample(1, 10);
    const auto c = check_compatibility(e1.triple(), pts, 0.0);
    CHECK(c.passed);
    CHECK(c.max_residual == 0.0);
    CHECK(builtin("euclidean_r2n").chart_dim == 4);
    CHECK(builtin("euclidean_r2n:32").chart_dim == 64);

    for (const char* bad : {"nope", "euclidean_r2n:0", "euclidean_r2n:33", "euclidean_r2n:x", "Hopf"}) {
        CAPTURE(bad);
        try {
            builtin(bad);
            FAIL("expected UnknownScenario");
        } catch (const GeometryError& e) {
            CHECK(e.kind() == ErrorKind::UnknownScenario);
        }
    }
    for (const auto& name : list_builtins()) CHECK_NOTHROW(builtin(name));
}

TEST_CASE("builtin hopf passes every hypothesis check at 1e-6") {
    const auto s = builtin("hopf");
    const auto pts = s.ambient_domain.sample(3, 24);
    const auto params = sample_group_params(s.action, 4, 6);
    const double tol = 1e-6;
    CHECK(check_metric(s.metric, pts, tol).passed);
    CHECK(check_symplectic_pointwise(s.omega, pts, tol).passed);
    CHECK(check_acs(s.acs, pts, tol).passed);
    CHECK(check_compatibility(s.triple(), pts, tol).passed);
    CHECK(check_isometry(s.action, s.metric, params, pts, kFd, tol).passed);
    CHECK(check_symplectomorphism(s.action, s.omega, params, pts, kFd, tol).passed);
    CHECK(momentum_residual(s.action, s.mu, s.omega, pts, kFd, tol).passed);
    CHECK(check_momentum_invariance(s.action, s.mu, params, pts, tol).passed);
    CHECK(check_field_invariance(s.acs, s.action, params, pts, kFd, tol).passed);
    for (const auto& x : s.quotient_domain.sample(5, 20))
        CHECK(std::abs(s.mu.value(ChartPoint(s.section(x.coords())))(0) - 0.5) < 1e-9);
}

TEST_CASE("the shipped hopf scenario file matches the builtin") {
    const auto loaded = resolve_scenario(SYMRED_SOURCE_DIR "/scenarios/hopf.scn");
    const auto& f = loaded.scenario;
    const auto b = builtin("hopf");
    CHECK(f.chart_dim == b.chart_dim);
    CHECK(f.quotient_dim == b.quotient_dim);
    CHECK(loaded.seed.value() == 7);
    CHECK(loaded.sample_count.value() == 16);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 20; ++i) {
        const ChartPoint p{u(rng), u(rng), u(rng), u(rng)};
        const Vector a = Vector::Constant(1, u(rng) * 2.0);
        CHECK(max_abs(eval_field(f.omega, p) - eval_field(b.omega, p)) == 0.0);
        CHECK(max_abs(eval_field(f.metric, p) - eval_field(b.metric, p)) == 0.0);
        CHECK(max_abs(eval_field(f.acs, p) - eval_field(b.acs, p)) == 0.0);
        CHECK((f.action.flow(a, p.coords()) - b.action.flow(a, p.coords())).norm() < 1e-15);
        CHECK(std::abs(f.mu.value(p)(0) - b.mu.value(p)(0)) < 1e-15);
        const Vector w = (Vector(2) << u(rng), u(rng)).finished();
        CHECK((f.section(w) - b.section(w)).norm() < 1e-15);
    }
    CHECK(f.mu.beta == b.mu.beta);
    CHECK(f.action.periods == b.action.periods);
    REQUIRE(f.action.quadrature.size() == b.action.quadrature.size());
    for (std::size_t i = 0; i < f.action.quadrature.size(); ++i) {
        CHECK(f.action.quadrature[i].params == b.action.quadrature[i].params);
        CHECK(f.action.quadrature[i].weight == b.action.quadrature[i].weight);
    }
}

TEST_CASE("resolve_scenario prefers builtins and rejects unknown names") {
    CHECK(resolve_scenario("hopf").scenario.name == "hopf");
    try {
        resolve_scenario("/nonexistent/file.scn");
        FAIL("expected UnknownScenario");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::UnknownScenario);
    }
}

TEST_CASE("property: fuzzed scenario text parses or fails with a positioned error") {
    std::mt19937_64 rng(7);
    int escaped = 0;
    for (int trial = 0; trial < 20000; ++trial) {
        const std::string input = oracle::random_bytes(rng, trial % 2 == 0);
        if (oracle::classify_parse(input, true) == oracle::ParseOutcome::escaped) ++escaped;
    }
    CHECK(escaped == 0);
}

TEST_CASE("property: mutated valid files never escape the error model") {
    const std::string base = read_file(SYMRED_SOURCE_DIR "/scenarios/hopf.scn");
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::size_t> pos(0, base.size() - 1);
    std::uniform_int_distribution<int> byte(32, 126);
    int escaped = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        std::string text = base;
        const int edits = 1 + trial % 3;
        for (int e = 0; e < edits; ++e) {
            const std::size_t at = pos(rng);
            switch (trial % 3) {
                case 0: text[at] = static_cast<char>(byte(rng)); break;
                case 1: text.erase(at, 1); break;
                default: text.insert(at, 1, static_cast<char>(byte(rng))); break;
            }
        }
        if (oracle::classify_parse(text, true) == oracle::ParseOutcome::escaped) ++escaped;
        try {
            const auto f = parse_scenario(text);
            (void)f.to_scenario();
        } catch (const SourceError&) {
        } catch (const GeometryError& e) {
            CAPTURE(e.what());
            CHECK(e.kind() == ErrorKind::ValidationError);
        }
    }
    CHECK(escaped == 0);
}
