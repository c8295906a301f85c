#pragma once

// Result records shared by every verification module.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "symred/geomcore.hpp"
#include "symred/parallel.hpp"

namespace symred {

struct CheckResult {
    std::string name;
    std::string anchor;  // the identity being checked, e.g. "ω(u,Jv) = g(u,v)"
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    Vector worst_point;  // empty when no sample produced a residual
    std::size_t samples = 0;
    std::vector<std::pair<std::string, double>> details;
    std::vector<std::string> flags;

    double detail(const std::string& key) const;
    bool has_flag(const std::string& flag) const;
};

// Accumulates per-sample residuals into a CheckResult. passed is derived
// from max_residual <= tolerance when finished.
class CheckBuilder {
public:
    CheckBuilder(std::string name, std::string anchor, double tolerance);

    void record(double residual, const Vector& at);
    void detail(std::string key, double value) { result_.details.emplace_back(std::move(key), value); }
    void flag(std::string f) { result_.flags.push_back(std::move(f)); }
    CheckResult finish();

private:
    CheckResult result_;
};

struct VerificationReport {
    std::string name;
    std::vector<CheckResult> checks;

    bool passed() const;
    const CheckResult* find(const std::string& check_name) const;
};

// Named tolerances. Algebraic identities are near machine precision;
// finite-difference identities are limited by truncation error.
struct Tolerances {
    double algebraic = 1e-8;
    double fd = 1e-5;
    double constraint = 1e-9;
    double geometric = 1e-5;

    // Throws ValidationError on unknown names.
    void set(const std::string& name, double value);
};

// Seeded uniform sampling in an axis-aligned box, optionally restricted to a
// centred ball (rejection sampling).
struct SampleDomain {
    Vector lower;
    Vector upper;
    double radius = 0.0;  // 0 means no ball restriction

    std::vector<ChartPoint> sample(std::uint64_t seed, std::size_t count) const;
};

// Evaluates residual_at(point) for every sample with the requested kernel
// and folds the residuals in sample order.
template <class Fn>
CheckResult pointwise_check(std::string name, std::string anchor, double tolerance,
                            std::span<const ChartPoint> points, Fn&& residual_at, Execution exec) {
    auto residuals = map_indexed<double>(
        points.size(), [&](std::size_t i) { return residual_at(points[i]); }, exec);
    CheckBuilder b(std::move(name), std::move(anchor), tolerance);
    for (std::size_t i = 0; i < points.size(); ++i) b.record(residuals[i], points[i].coords());
    return b.finish();
}

} // namespace symred
