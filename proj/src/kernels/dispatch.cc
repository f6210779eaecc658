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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "ensq/kernels.h"

namespace ensq::kernels {

namespace {

constexpr Table kScalarTable{scalar::apply_1q, scalar::apply_diag_1q, scalar::norm_sq, scalar::prob_one};
constexpr Table kAvx2Table{avx2::apply_1q, avx2::apply_diag_1q, avx2::norm_sq, avx2::prob_one};

Backend detect() {
    const char *env = std::getenv("ENSQ_KERNELS");
    if (env != nullptr) {
        std::string_view v(env);
        if (v == "scalar") {
            return Backend::kScalar;
        }
        if (v == "avx2" && avx2_supported()) {
            return Backend::kAvx2;
        }
    }
    return avx2_supported() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<int> &selected() {
    static std::atomic<int> value{static_cast<int>(detect())};
    return value;
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok;
#else
    return false;
#endif
}

Backend active_backend() {
    return static_cast<Backend>(selected().load(std::memory_order_relaxed));
}

void set_backend(Backend backend) {
    if (backend == Backend::kAvx2 && !avx2_supported()) {
        throw std::invalid_argument("AVX2 kernels requested but the CPU does not support AVX2/FMA");
    }
    selected().store(static_cast<int>(backend), std::memory_order_relaxed);
}

const char *backend_name(Backend backend) {
    return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

const Table &table(Backend backend) {
    return backend == Backend::kAvx2 ? kAvx2Table : kScalarTable;
}

const Table &active() {
    return table(active_backend());
}

}  // namespace ensq::kernels
