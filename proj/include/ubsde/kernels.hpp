#pragma once

// Path-parallel loop and reduction kernels.
//
// Every kernel has a serial reference and an OpenMP variant. The OpenMP
// reduction splits the index range into fixed-size chunks, accumulates each
// chunk independently and then sums the chunk partials in chunk order, so its
// result depends only on the data and never on the thread count. The serial
// reference accumulates in one pass; the two agree to rounding.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace ubsde {

enum class Execution { serial, parallel };

namespace kernels {

inline constexpr std::size_t kReductionChunk = 2048;

inline int max_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Sets the OpenMP thread count for the lifetime of the scope.
class ThreadScope {
public:
    explicit ThreadScope(int threads) : previous_(max_threads()) {
#if defined(_OPENMP)
        omp_set_num_threads(std::max(threads, 1));
#else
        (void)threads;
#endif
    }
    ~ThreadScope() {
#if defined(_OPENMP)
        omp_set_num_threads(previous_);
#endif
    }
    ThreadScope(const ThreadScope&) = delete;
    ThreadScope& operator=(const ThreadScope&) = delete;

private:
    int previous_;
};

namespace serial {

template <class Fn>
void for_each(std::size_t n, Fn&& fn) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

// acc(i, out) adds the contribution of index i into out[0..width).
template <class Acc>
std::vector<double> reduce(std::size_t n, std::size_t width, Acc&& acc) {
    std::vector<double> out(width, 0.0);
    std::span<double> view(out);
    for (std::size_t i = 0; i < n; ++i) acc(i, view);
    return out;
}

}  // namespace serial

namespace parallel {

template <class Fn>
void for_each(std::size_t n, Fn&& fn) {
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

template <class Acc>
std::vector<double> reduce(std::size_t n, std::size_t width, Acc&& acc) {
    const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
    std::vector<double> partial(chunks * width, 0.0);
    const auto chunk_count = static_cast<long long>(chunks);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < chunk_count; ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
        const std::size_t end = std::min(n, begin + kReductionChunk);
        std::span<double> view(partial.data() + static_cast<std::size_t>(c) * width, width);
        for (std::size_t i = begin; i < end; ++i) acc(i, view);
    }
    std::vector<double> out(width, 0.0);
    for (std::size_t c = 0; c < chunks; ++c) {
        for (std::size_t j = 0; j < width; ++j) out[j] += partial[c * width + j];
    }
    return out;
}

}  // namespace parallel

template <class Fn>
void for_each(Execution exec, std::size_t n, Fn&& fn) {
    if (exec == Execution::parallel) {
        parallel::for_each(n, std::forward<Fn>(fn));
    } else {
        serial::for_each(n, std::forward<Fn>(fn));
    }
}

template <class Acc>
std::vector<double> reduce(Execution exec, std::size_t n, std::size_t width, Acc&& acc) {
    if (exec == Execution::parallel) return parallel::reduce(n, width, std::forward<Acc>(acc));
    return serial::reduce(n, width, std::forward<Acc>(acc));
}

}  // namespace kernels
}  // namespace ubsde
