#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ns3/error.hpp"

namespace ns3 {

/// Default worker count: NS3_THREADS if set, else the hardware concurrency.
inline std::size_t default_thread_count() {
    if (const char* env = std::getenv("NS3_THREADS"); env && *env) {
        char* end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (*end != '\0' || n < 1) fail(ErrorKind::config, "NS3_THREADS must be a positive integer");
        return static_cast<std::size_t>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Applies fn to 0..n-1 on up to `threads` workers and returns the results in
/// index order. If any call throws, the exception of the lowest failing
/// index is rethrown, so failures do not depend on scheduling.
template <class Fn>
auto parallel_map(std::size_t n, std::size_t threads, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using R = decltype(fn(std::size_t{}));
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace ns3
