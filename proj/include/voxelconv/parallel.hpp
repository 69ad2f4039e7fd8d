// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace voxelconv {

/// 0 (or negative) selects the hardware concurrency, never less than 1.
inline int resolve_workers(int requested) {
    if (requested > 0) return requested > 256 ? 256 : requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(chunk_begin, chunk_end) over contiguous chunks of [begin, end).
/// Each index belongs to exactly one chunk, so writes to per-index slots need
/// no synchronization. The first exception thrown by a worker is rethrown.
template <typename Fn>
void parallel_for(std::int64_t begin, std::int64_t end, int workers, Fn&& body) {
    const std::int64_t count = end - begin;
    if (count <= 0) return;
    int n = resolve_workers(workers);
    if (n > count) n = static_cast<int>(count);
    if (n <= 1) {
        body(begin, end);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(n);
    std::vector<std::exception_ptr> errors(n);
    const std::int64_t chunk = count / n;
    const std::int64_t extra = count % n;
    std::int64_t cursor = begin;
    for (int i = 0; i < n; ++i) {
        const std::int64_t b = cursor;
        const std::int64_t e = b + chunk + (i < extra ? 1 : 0);
        cursor = e;
        threads.emplace_back([&body, &errors, i, b, e] {
            try {
                body(b, e);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& ep : errors) {
        if (ep) std::rethrow_exception(ep);
    }
}

}  // namespace voxelconv
