#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

namespace exlab {

/// Process-wide worker count honored by every parallel loop. Zero means
/// "use all hardware threads".
void set_worker_count(unsigned workers) noexcept;
unsigned worker_count() noexcept;

/// Evaluates fn(i) for i in [0, count) on the worker pool and returns the
/// results indexed by i. Output is independent of the worker count as long
/// as fn(i) is a pure function of i.
template <class Fn>
auto parallel_map(std::size_t count, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
    using Result = std::invoke_result_t<Fn&, std::size_t>;
    const unsigned workers = std::min<std::size_t>(worker_count(), count == 0 ? 1 : count);
    if (workers <= 1) {
        std::vector<Result> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
        return out;
    }

    std::vector<std::optional<Result>> slots(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                    try {
                        slots[i].emplace(fn(i));
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next.store(count);
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<Result> out;
    out.reserve(count);
    for (auto& slot : slots) out.push_back(std::move(*slot));
    return out;
}

}  // namespace exlab
