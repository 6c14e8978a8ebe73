// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

/// @file parallel.hpp
/// Work distribution helpers. Tasks are identified by index so that callers can
/// lay out outputs by task and merge them in a fixed order; results never depend
/// on the number of workers.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace matbake {

struct Exec {
    /// Worker count; 0 selects std::thread::hardware_concurrency().
    int threads = 1;

    int resolved() const {
        if (threads > 0) return threads;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }
};

/// Runs fn(i) for i in [0, count). Exceptions from workers are rethrown on the
/// calling thread (the first one captured wins).
template <typename Fn>
void parallel_for(std::size_t count, const Exec& exec, Fn&& fn) {
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(
        static_cast<std::size_t>(exec.resolved()), std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace matbake
