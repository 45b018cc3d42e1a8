#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include "ctm/execution.hpp"

namespace ctm::detail {

/// Runs body(i) for i in [0, count). Results are written by index, so the
/// serial and OpenMP paths produce identical output. The first exception
/// (by index) is rethrown after the loop.
template <typename Body>
void for_each_index(std::size_t count, Execution exec, Body&& body) {
    std::vector<std::exception_ptr> errors(count);
    const bool parallel = exec == Execution::Parallel || (exec == Execution::Auto && count > 1);
    const auto n = static_cast<long long>(count);
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long long i = 0; i < n; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    } else {
        for (long long i = 0; i < n; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace ctm::detail
