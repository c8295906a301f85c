#include "symred/check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace symred {

double CheckResult::detail(const std::string& key) const {
    for (const auto& [k, v] : details)
        if (k == key) return v;
    return std::numeric_limits<double>::quiet_NaN();
}

bool CheckResult::has_flag(const std::string& flag) const {
    return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

CheckBuilder::CheckBuilder(std::string name, std::string anchor, double tolerance) {
    result_.name = std::move(name);
    result_.anchor = std::move(anchor);
    result_.tolerance = tolerance;
}

void CheckBuilder::record(double residual, const Vector& at) {
    ++result_.samples;
    // NaN residuals count as failures and always become the worst point.
    if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
    if (result_.worst_point.size() == 0 || residual > result_.max_residual) {
        result_.max_residual = residual;
        result_.worst_point = at;
    }
}

CheckResult CheckBuilder::finish() {
    result_.passed = result_.max_residual <= result_.tolerance;
    return result_;
}

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* VerificationReport::find(const std::string& check_name) const {
    for (const auto& c : checks)
        if (c.name == check_name) return &c;
    return nullptr;
}

void Tolerances::set(const std::string& name, double value) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw GeometryError(ErrorKind::ValidationError, "tolerance '" + name + "' must be positive");
    if (name == "algebraic") algebraic = value;
    else if (name == "fd") fd = value;
    else if (name == "constraint") constraint = value;
    else if (name == "geometric") geometric = value;
    else throw GeometryError(ErrorKind::ValidationError, "unknown tolerance name '" + name + "'");
}

std::vector<ChartPoint> SampleDomain::sample(std::uint64_t seed, std::size_t count) const {
    if (lower.size() != upper.size())
        throw GeometryError(ErrorKind::DimensionMismatch, "sample box bounds differ in length");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<ChartPoint> out;
    out.reserve(count);
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (++attempts > 1000 * (count + 1))
            throw GeometryError(ErrorKind::DegenerateInput, "sample domain ball does not meet the box");
        Vector p(lower.size());
        for (Index i = 0; i < p.size(); ++i) p(i) = lower(i) + (upper(i) - lower(i)) * unit(rng);
        if (radius > 0.0 && p.norm() > radius) continue;
        out.emplace_back(std::move(p));
    }
    return out;
}

} // namespace symred
