// Copyright 2026 The ensq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ENSQ_PARALLEL_H
#define ENSQ_PARALLEL_H

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ensq {

/// Number of workers to use when the caller passes 0.
inline unsigned default_workers() {
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n) on `workers` threads. Work is handed out in index order; fn must
/// only touch per-index state. The first exception thrown by any call is rethrown.
template <typename Fn>
void parallel_for(size_t n, unsigned workers, Fn &&fn) {
    if (workers == 0) {
        workers = default_workers();
    }
    workers = static_cast<unsigned>(std::min<size_t>(workers, n));
    if (workers <= 1) {
        for (size_t i = 0; i < n; i++) {
            fn(i);
        }
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; w++) {
        pool.emplace_back(body);
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace ensq

#endif
