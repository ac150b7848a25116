#pragma once

#include <cstddef>
#include <exception>
#include <utility>

namespace pursuit {

/// Run body(i) for i in [0, count). With parallel = true the iterations are
/// spread over an OpenMP worker pool (when compiled with OpenMP); the serial
/// path is the reference behavior and both must produce identical results for
/// independent iterations. The first exception thrown by any iteration is
/// rethrown after the loop completes.
template <class F>
void parallel_for(std::size_t count, bool parallel, F&& body) {
    std::exception_ptr first_error = nullptr;
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(count); ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical
                if (!first_error) first_error = std::current_exception();
            }
        }
        if (first_error) std::rethrow_exception(first_error);
        return;
    }
#else
    (void)parallel;
#endif
    for (std::size_t i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace pursuit
