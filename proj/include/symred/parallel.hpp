#pragma once

// Index-parallel kernels. Every verification loop in the library maps a
// per-sample function over [0, count) and reduces the results afterwards in
// index order, so serial and parallel runs produce identical output.

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace symred {

enum class Execution { serial, parallel };

inline int available_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Serial reference kernel.
template <class T, class Fn>
std::vector<T> map_indexed_serial(std::size_t count, Fn&& fn) {
    std::vector<T> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
    return out;
}

// OpenMP kernel. Exceptions are captured per index and the lowest-index one
// is rethrown after the region, matching what the serial kernel would throw.
template <class T, class Fn>
std::vector<T> map_indexed_parallel(std::size_t count, Fn&& fn) {
    std::vector<T> out(count);
    std::vector<std::exception_ptr> errors(count);
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

template <class T, class Fn>
std::vector<T> map_indexed(std::size_t count, Fn&& fn, Execution exec) {
    if (exec == Execution::parallel && count > 1) return map_indexed_parallel<T>(count, fn);
    return map_indexed_serial<T>(count, fn);
}

} // namespace symred
