#include "symred/scenario.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "parse_internal.hpp"

namespace symred {

using detail::Tok;
using detail::Token;

Matrix ExprMatrix::eval(const expr::Env& env) const {
    Matrix out(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) out(r, c) = (*this)(r, c).eval(env);
    return out;
}

namespace {

bool is_variable_name(std::string_view s) {
    if (s.size() < 2 || (s[0] != 'x' && s[0] != 't' && s[0] != 'w') || s[1] == '0') return false;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    return true;
}

bool is_function_name(std::string_view s) { return s == "sin" || s == "cos" || s == "exp" || s == "sqrt"; }

class EntryParser {
public:
    explicit EntryParser(const std::vector<Token>& toks) : toks_(toks), expr_(toks) {}

    std::vector<ScenarioEntry> parse() {
        std::vector<ScenarioEntry> out;
        while (peek().kind != Tok::end) {
            if (peek().kind == Tok::newline) {
                advance();
                continue;
            }
            const Token& key = expect(Tok::ident, {"key"});
            expect(Tok::equals, {"'='"});
            ScenarioEntry e{std::string(key.text), key.line, key.column, parse_value(true, 0)};
            if (peek().kind != Tok::newline && peek().kind != Tok::end)
                detail::fail_at(peek(), "unexpected '" + std::string(peek().text) + "'", {"operator", "end of line"});
            out.push_back(std::move(e));
        }
        return out;
    }

private:
    const Token& peek() const { return expr_.peek(); }
    const Token& advance() { return expr_.advance(); }
    const Token& expect(Tok kind, std::vector<std::string> expected) { return expr_.expect(kind, std::move(expected)); }

    ScenarioValue parse_value(bool top_level, int depth) {
        if (depth > detail::kMaxDepth) detail::fail_at(peek(), "array nested too deeply");
        const Token& start = peek();
        ScenarioValue v;
        v.line = start.line;
        v.column = start.column;
        if (start.kind == Tok::lbracket) {
            advance();
            if (peek().kind != Tok::rbracket) {
                v.items.push_back(parse_value(false, depth + 1));
                while (peek().kind == Tok::comma) {
                    advance();
                    v.items.push_back(parse_value(false, depth + 1));
                }
            }
            expect(Tok::rbracket, {"','", "']'"});
            return v;
        }
        if (top_level && start.kind == Tok::ident && !is_variable_name(start.text) && !is_function_name(start.text)) {
            const Token& next = toks_[expr_.position() + 1];
            if (next.kind == Tok::newline || next.kind == Tok::end) {
                v.word = std::string(start.text);
                advance();
                return v;
            }
        }
        if (start.kind == Tok::newline || start.kind == Tok::end)
            detail::fail_at(start, "missing value", {"expression", "'['"});
        v.scalar = expr::Expression(expr_.parse_expr());
        return v;
    }

    const std::vector<Token>& toks_;
    detail::ExprParser expr_;
};

[[noreturn]] void invalid(const ScenarioValue& v, const std::string& msg) { detail::invalid_at(v.line, v.column, msg); }
[[noreturn]] void invalid(const ScenarioEntry& e, const std::string& msg) {
    detail::invalid_at(e.line, e.column, e.key + ": " + msg);
}

// Throws at the first variable outside the allowed ranges.
void check_variables(const expr::NodePtr& n, int max_x, int max_t, int max_w) {
    if (!n) return;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, expr::Variable>) {
                const int limit = v.kind == expr::VarKind::x ? max_x : v.kind == expr::VarKind::t ? max_t : max_w;
                if (v.index > limit) {
                    const char c = v.kind == expr::VarKind::x ? 'x' : v.kind == expr::VarKind::t ? 't' : 'w';
                    detail::invalid_at(v.line, v.column,
                                       "unknown identifier '" + std::string(1, c) + std::to_string(v.index) + "'");
                }
            } else if constexpr (std::is_same_v<T, expr::Negate>) {
                check_variables(v.operand, max_x, max_t, max_w);
            } else if constexpr (std::is_same_v<T, expr::Binary>) {
                check_variables(v.lhs, max_x, max_t, max_w);
                check_variables(v.rhs, max_x, max_t, max_w);
            } else if constexpr (std::is_same_v<T, expr::Call>) {
                check_variables(v.arg, max_x, max_t, max_w);
            }
        },
        n->value);
}

const expr::Expression& scalar_of(const ScenarioValue& v) {
    if (!v.word.empty()) invalid(v, "unknown identifier '" + v.word + "'");
    if (!v.scalar) invalid(v, "expected a scalar, found an array");
    return *v.scalar;
}

double constant_of(const ScenarioValue& v) {
    const auto& e = scalar_of(v);
    check_variables(e.root(), 0, 0, 0);
    const double out = e.eval({});
    if (!std::isfinite(out)) invalid(v, "constant is not finite");
    return out;
}

long long integer_of(const ScenarioValue& v) {
    const double d = constant_of(v);
    if (d != std::trunc(d) || std::abs(d) > 1e9) invalid(v, "expected an integer");
    return static_cast<long long>(d);
}

// A scalar is accepted where a length-1 vector is expected.
std::vector<const ScenarioValue*> vector_items(const ScenarioValue& v, std::size_t length, const std::string& what) {
    std::vector<const ScenarioValue*> out;
    if (!v.is_list()) out.push_back(&v);
    else
        for (const auto& item : v.items) out.push_back(&item);
    if (out.size() != length)
        invalid(v, what + " needs " + std::to_string(length) + " entries, found " + std::to_string(out.size()));
    return out;
}

std::vector<expr::Expression> expr_vector(const ScenarioValue& v, std::size_t length, const std::string& what,
                                          int max_x, int max_t, int max_w) {
    std::vector<expr::Expression> out;
    for (const auto* item : vector_items(v, length, what)) {
        const auto& e = scalar_of(*item);
        check_variables(e.root(), max_x, max_t, max_w);
        out.push_back(e);
    }
    return out;
}

Matrix constant_matrix(const ScenarioValue& v, Index rows, Index cols, const std::string& what) {
    const ExprMatrix m = as_matrix(v);
    if (m.rows != rows || m.cols != cols)
        invalid(v, what + " must be " + std::to_string(rows) + "x" + std::to_string(cols) + ", found " +
                       std::to_string(m.rows) + "x" + std::to_string(m.cols));
    Matrix out(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) {
            check_variables(m(r, c).root(), 0, 0, 0);
            out(r, c) = m(r, c).eval({});
        }
    return out;
}

SampleDomain box_domain(const ScenarioValue& v, Index dim, const std::string& what) {
    const Matrix box = constant_matrix(v, dim, 2, what);
    for (Index i = 0; i < dim; ++i)
        if (!(box(i, 0) < box(i, 1))) invalid(v, what + " row " + std::to_string(i + 1) + " must satisfy lower < upper");
    return {box.col(0), box.col(1), 0.0};
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "name", "dim", "group_dim", "quotient_dim", "omega", "g", "metric", "J", "acs", "action", "period",
        "quadrature", "abelian", "mu", "beta", "section", "samples.seed", "samples.count", "samples.box",
        "samples.radius", "samples.points", "ambient.box"};
    return keys;
}

std::string canonical_key(const std::string& key) {
    if (key == "metric") return "g";
    if (key == "acs") return "J";
    return key;
}

SampleDomain centred_box(Index dim, double half) {
    return {Vector::Constant(dim, -half), Vector::Constant(dim, half), 0.0};
}

} // namespace

std::vector<ScenarioEntry> parse_entries(std::string_view text) {
    const auto toks = detail::tokenize(text);
    return EntryParser(toks).parse();
}

ExprMatrix as_matrix(const ScenarioValue& value) {
    ExprMatrix m;
    if (!value.is_list()) {
        m.rows = m.cols = 1;
        m.entries.push_back(scalar_of(value));
        return m;
    }
    const bool nested = !value.items.empty() && value.items.front().is_list();
    if (!nested) {
        m.rows = value.items.empty() ? 0 : 1;
        m.cols = static_cast<Index>(value.items.size());
        for (const auto& item : value.items) m.entries.push_back(scalar_of(item));
        return m;
    }
    m.rows = static_cast<Index>(value.items.size());
    m.cols = static_cast<Index>(value.items.front().items.size());
    for (const auto& row : value.items) {
        if (!row.is_list()) invalid(row, "matrix row must be an array");
        if (static_cast<Index>(row.items.size()) != m.cols)
            invalid(row, "ragged matrix: row has " + std::to_string(row.items.size()) + " entries, expected " +
                             std::to_string(m.cols));
        for (const auto& item : row.items) m.entries.push_back(scalar_of(item));
    }
    return m;
}

ScenarioFile parse_scenario(std::string_view text) {
    const auto entries = parse_entries(text);
    std::map<std::string, const ScenarioEntry*> by_key;
    std::vector<std::pair<std::string, double>> tolerances;
    for (const auto& e : entries) {
        if (e.key.rfind("tol.", 0) == 0) {
            const std::string name = e.key.substr(4);
            Tolerances probe;
            try {
                probe.set(name, constant_of(e.value));
            } catch (const SourceError&) {
                throw;
            } catch (const GeometryError& err) {
                invalid(e, err.what());
            }
            for (const auto& [n, _] : tolerances)
                if (n == name) invalid(e, "duplicate key");
            tolerances.emplace_back(name, constant_of(e.value));
            continue;
        }
        const auto& keys = known_keys();
        if (std::find(keys.begin(), keys.end(), e.key) == keys.end()) invalid(e, "unknown key");
        const std::string key = canonical_key(e.key);
        if (by_key.count(key)) invalid(e, "duplicate key");
        by_key[key] = &e;
    }

    std::size_t last_line = 1;
    for (char c : text)
        if (c == '\n') ++last_line;
    auto require = [&](const std::string& key) -> const ScenarioEntry& {
        auto it = by_key.find(key);
        if (it == by_key.end()) detail::invalid_at(last_line, 1, "missing required key '" + key + "'");
        return *it->second;
    };
    auto find = [&](const std::string& key) -> const ScenarioEntry* {
        auto it = by_key.find(key);
        return it == by_key.end() ? nullptr : it->second;
    };

    ScenarioFile f;
    f.tolerances = std::move(tolerances);
    if (const auto* e = find("name")) {
        if (e->value.word.empty()) invalid(*e, "name must be a bare identifier");
        f.name = e->value.word;
    }

    const auto& dim_entry = require("dim");
    const long long dim = integer_of(dim_entry.value);
    if (dim <= 0) invalid(dim_entry, "dimension must be positive");
    if (dim % 2 != 0) invalid(dim_entry, "odd symplectic dimension " + std::to_string(dim));
    if (dim > 64) invalid(dim_entry, "dimension above 64 is not supported");
    f.dim = static_cast<Index>(dim);

    const auto& group_entry = require("group_dim");
    const long long k = integer_of(group_entry.value);
    if (k <= 0 || 2 * k > dim) invalid(group_entry, "group dimension must lie in 1..dim/2");
    f.group_dim = static_cast<int>(k);

    f.quotient_dim = f.dim - 2 * f.group_dim;
    if (const auto* e = find("quotient_dim")) {
        const long long q = integer_of(e->value);
        if (q < 0 || q > dim) invalid(*e, "quotient dimension must lie in 0..dim");
        f.quotient_dim = static_cast<Index>(q);
        if (f.quotient_dim != f.dim - 2 * f.group_dim)
            f.warnings.push_back("quotient_dim " + std::to_string(q) + " differs from dim - 2*group_dim = " +
                                 std::to_string(f.dim - 2 * f.group_dim));
    }

    const int n = static_cast<int>(f.dim), kk = f.group_dim, q = static_cast<int>(f.quotient_dim);
    auto field = [&](const std::string& key, const std::string& label) {
        const auto& e = require(key);
        ExprMatrix m = as_matrix(e.value);
        if (m.rows != f.dim || m.cols != f.dim)
            invalid(e, label + " must be " + std::to_string(n) + "x" + std::to_string(n) + ", found " +
                           std::to_string(m.rows) + "x" + std::to_string(m.cols));
        for (const auto& entry : m.entries) check_variables(entry.root(), n, 0, 0);
        return m;
    };
    f.omega = field("omega", "omega");
    f.metric = field("g", "metric");
    f.acs = field("J", "acs");

    f.action = expr_vector(require("action").value, f.dim, "action", n, kk, 0);
    f.mu = expr_vector(require("mu").value, static_cast<std::size_t>(kk), "mu", n, 0, 0);
    {
        const auto& e = require("beta");
        f.beta.resize(kk);
        const auto items = vector_items(e.value, static_cast<std::size_t>(kk), "beta");
        for (int i = 0; i < kk; ++i) f.beta(i) = constant_of(*items[static_cast<std::size_t>(i)]);
    }
    f.section = expr_vector(require("section").value, f.dim, "section", 0, 0, q);

    f.period.assign(static_cast<std::size_t>(kk), 0.0);
    if (const auto* e = find("period")) {
        const auto items = vector_items(e->value, static_cast<std::size_t>(kk), "period");
        for (int i = 0; i < kk; ++i) {
            const double p = constant_of(*items[static_cast<std::size_t>(i)]);
            if (p < 0.0) invalid(*items[static_cast<std::size_t>(i)], "period must be nonnegative");
            f.period[static_cast<std::size_t>(i)] = p;
        }
    }
    if (const auto* e = find("quadrature")) {
        const long long nodes = integer_of(e->value);
        if (nodes < 1 || nodes > 4096) invalid(*e, "quadrature must lie in 1..4096");
        f.quadrature = static_cast<int>(nodes);
    }
    if (const auto* e = find("abelian")) {
        if (e->value.word == "true") f.abelian = true;
        else if (e->value.word == "false") f.abelian = false;
        else invalid(*e, "expected true or false");
    }

    f.quotient_domain = centred_box(f.quotient_dim, 1.0);
    if (const auto* e = find("samples.box")) f.quotient_domain = box_domain(e->value, f.quotient_dim, "samples.box");
    if (const auto* e = find("samples.radius")) {
        const double r = constant_of(e->value);
        if (r < 0.0) invalid(*e, "radius must be nonnegative");
        f.quotient_domain.radius = r;
    }
    f.ambient_domain = centred_box(f.dim, 1.5);
    if (const auto* e = find("ambient.box")) f.ambient_domain = box_domain(e->value, f.dim, "ambient.box");
    if (const auto* e = find("samples.seed")) {
        const long long s = integer_of(e->value);
        if (s < 0) invalid(*e, "seed must be nonnegative");
        f.seed = static_cast<std::uint64_t>(s);
    }
    if (const auto* e = find("samples.count")) {
        const long long c = integer_of(e->value);
        if (c < 1) invalid(*e, "sample count must be at least 1");
        f.sample_count = static_cast<std::size_t>(c);
    }
    if (const auto* e = find("samples.points")) {
        if (!e->value.is_list()) invalid(*e, "expected an array of points");
        for (const auto& pt : e->value.items) {
            const Matrix row = constant_matrix(pt, 1, f.quotient_dim, "sample point");
            f.points.emplace_back(Vector(row.row(0).transpose()));
        }
    }
    return f;
}

ReductionScenario ScenarioFile::to_scenario() const {
    ReductionScenario s;
    s.name = name;
    s.chart_dim = dim;
    auto matrix_field = [n = dim](ExprMatrix m) {
        return TensorField::matrix(n, n, [m = std::move(m)](const Vector& x) {
            return m.eval({std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), {}, {}});
        });
    };
    s.omega = matrix_field(omega);
    s.metric = matrix_field(metric);
    s.acs = matrix_field(acs);

    s.action.group_dim = group_dim;
    s.action.flow = [a = action](const Vector& t, const Vector& x) {
        Vector out(static_cast<Index>(a.size()));
        const expr::Env env{std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                            std::span<const double>(t.data(), static_cast<std::size_t>(t.size())),
                            {}};
        for (std::size_t i = 0; i < a.size(); ++i) out(static_cast<Index>(i)) = a[i].eval(env);
        return out;
    };
    for (int i = 0; i < group_dim; ++i) s.action.algebra_basis.push_back("t" + std::to_string(i + 1));
    s.action.periods = period;
    s.action.abelian = abelian;
    const bool uniform_torus =
        !period.empty() && period.front() > 0.0 &&
        std::all_of(period.begin(), period.end(), [&](double p) { return p == period.front(); });
    if (uniform_torus) s.action.quadrature = uniform_torus_quadrature(group_dim, quadrature, period.front());

    for (const auto& component : mu)
        s.mu.components.push_back(TensorField::scalar([component](const Vector& x) {
            return component.eval({std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), {}, {}});
        }));
    s.mu.beta = beta;
    s.quotient_dim = quotient_dim;
    s.section = [sec = section](const Vector& w) {
        Vector out(static_cast<Index>(sec.size()));
        const expr::Env env{{}, {}, std::span<const double>(w.data(), static_cast<std::size_t>(w.size()))};
        for (std::size_t i = 0; i < sec.size(); ++i) out(static_cast<Index>(i)) = sec[i].eval(env);
        return out;
    };
    s.quotient_domain = quotient_domain;
    s.ambient_domain = ambient_domain;
    s.validate();
    return s;
}

namespace {

// R^{2n} with x1-translation, mu = y1 at beta = 0 and section (0, 0, w).
ReductionScenario translation_scenario(const std::string& name, Index dim) {
    ReductionScenario s;
    s.name = name;
    s.chart_dim = dim;
    s.omega = TensorField::constant(standard_omega(dim));
    s.metric = TensorField::constant(Matrix::Identity(dim, dim));
    s.acs = TensorField::constant(standard_acs(dim));
    s.action.group_dim = 1;
    s.action.flow = [](const Vector& t, const Vector& p) {
        Vector out = p;
        out(0) += t(0);
        return out;
    };
    s.action.algebra_basis = {"translation x1"};
    s.action.periods = {0.0};
    s.mu.components = {TensorField::scalar([](const Vector& p) { return p(1); })};
    s.mu.beta = Vector::Zero(1);
    s.quotient_dim = dim - 2;
    s.section = [dim](const Vector& w) {
        Vector out = Vector::Zero(dim);
        out.tail(dim - 2) = w;
        return out;
    };
    s.quotient_domain = centred_box(dim - 2, 1.0);
    s.ambient_domain = centred_box(dim, 1.5);
    s.validate();
    return s;
}

// C^2 with theta . z = e^{-i theta} z, mu = |z|^2 / 2 at beta = 1/2.
ReductionScenario hopf_scenario(const std::string& name, TensorField metric) {
    ReductionScenario s;
    s.name = name;
    s.chart_dim = 4;
    s.omega = TensorField::constant(standard_omega(4));
    s.metric = std::move(metric);
    s.acs = TensorField::constant(standard_acs(4));
    s.action.group_dim = 1;
    s.action.flow = [](const Vector& t, const Vector& p) {
        const double c = std::cos(t(0)), sn = std::sin(t(0));
        Vector out(4);
        for (Index b = 0; b < 4; b += 2) {
            out(b) = c * p(b) + sn * p(b + 1);
            out(b + 1) = -sn * p(b) + c * p(b + 1);
        }
        return out;
    };
    s.action.algebra_basis = {"rotation"};
    s.action.periods = {2.0 * std::numbers::pi};
    s.action.quadrature = uniform_torus_quadrature(1, 64, 2.0 * std::numbers::pi);
    s.mu.components = {TensorField::scalar([](const Vector& p) { return 0.5 * p.squaredNorm(); })};
    s.mu.beta = Vector::Constant(1, 0.5);
    s.quotient_dim = 2;
    s.section = [](const Vector& w) {
        Vector out(4);
        out << 1.0, 0.0, w(0), w(1);
        return Vector(out / std::sqrt(1.0 + w.squaredNorm()));
    };
    s.quotient_domain = {Vector::Constant(2, -2.0), Vector::Constant(2, 2.0), 2.0};
    s.ambient_domain = centred_box(4, 1.5);
    s.validate();
    return s;
}

} // namespace

ReductionScenario builtin(const std::string& name) {
    if (name == "hopf") return hopf_scenario(name, TensorField::constant(Matrix::Identity(4, 4)));
    if (name == "linear_translation") return translation_scenario(name, 4);
    if (name == "skewed_metric_hopf") {
        const Vector d = (Vector(4) << 1.0, 1.0, 4.0, 4.0).finished();
        return hopf_scenario(name, TensorField::constant(d.asDiagonal().toDenseMatrix()));
    }
    if (name == "noninvariant_metric_hopf") {
        return hopf_scenario(name, TensorField::matrix(4, 4, [](const Vector& p) {
                                 Matrix g = Matrix::Identity(4, 4);
                                 g(0, 0) = 1.0 + p(1) * p(1);
                                 return g;
                             }));
    }
    if (name == "euclidean_r2n" || name.rfind("euclidean_r2n:", 0) == 0) {
        int n = 2;
        if (name.size() > 14) {
            const char* first = name.data() + 14;
            const char* last = name.data() + name.size();
            const auto res = std::from_chars(first, last, n);
            if (res.ec != std::errc() || res.ptr != last || n < 1 || n > 32)
                throw GeometryError(ErrorKind::UnknownScenario, "euclidean_r2n needs a suffix :n with 1 <= n <= 32");
        }
        return translation_scenario(name, 2 * n);
    }
    throw GeometryError(ErrorKind::UnknownScenario, "no built-in scenario named '" + name + "'");
}

std::vector<std::string> list_builtins() {
    return {"euclidean_r2n", "hopf", "linear_translation", "skewed_metric_hopf", "noninvariant_metric_hopf"};
}

LoadedScenario resolve_scenario(const std::string& name_or_path) {
    LoadedScenario out;
    const auto names = list_builtins();
    const bool is_builtin = std::find(names.begin(), names.end(), name_or_path) != names.end() ||
                            name_or_path.rfind("euclidean_r2n:", 0) == 0;
    if (is_builtin) {
        out.scenario = builtin(name_or_path);
        return out;
    }
    std::error_code ec;
    if (!std::filesystem::is_regular_file(name_or_path, ec))
        throw GeometryError(ErrorKind::UnknownScenario,
                            "'" + name_or_path + "' is neither a built-in scenario nor a readable file");
    std::ifstream in(name_or_path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    if (!in && !in.eof()) throw GeometryError(ErrorKind::UnknownScenario, "cannot read '" + name_or_path + "'");
    const ScenarioFile file = parse_scenario(buf.str());
    out.scenario = file.to_scenario();
    out.tolerances = file.tolerances;
    out.seed = file.seed;
    out.sample_count = file.sample_count;
    out.points = file.points;
    return out;
}

} // namespace symred
