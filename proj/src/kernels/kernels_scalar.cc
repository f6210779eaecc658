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

#include "ensq/kernels.h"

#include <utility>

namespace ensq::kernels {

namespace scalar {

void apply_1q(std::span<amp> a, unsigned target, uint64_t controls, const std::array<amp, 4> &m) {
    uint64_t step = uint64_t{1} << target;
    uint64_t n = a.size();
    for (uint64_t base = 0; base < n; base += 2 * step) {
        for (uint64_t j = 0; j < step; j++) {
            uint64_t i0 = base + j;
            if ((i0 & controls) != controls) {
                continue;
            }
            uint64_t i1 = i0 | step;
            amp v0 = a[i0];
            amp v1 = a[i1];
            a[i0] = m[0] * v0 + m[1] * v1;
            a[i1] = m[2] * v0 + m[3] * v1;
        }
    }
}

void apply_diag_1q(std::span<amp> a, unsigned target, uint64_t controls, amp d0, amp d1) {
    uint64_t bit = uint64_t{1} << target;
    bool skip0 = d0 == amp{1.0, 0.0};
    for (uint64_t i = 0; i < a.size(); i++) {
        if ((i & controls) != controls) {
            continue;
        }
        if (i & bit) {
            a[i] *= d1;
        } else if (!skip0) {
            a[i] *= d0;
        }
    }
}

double norm_sq(std::span<const amp> a) {
    double s = 0;
    for (const auto &v : a) {
        s += v.real() * v.real() + v.imag() * v.imag();
    }
    return s;
}

double prob_one(std::span<const amp> a, unsigned bit) {
    uint64_t mask = uint64_t{1} << bit;
    double s = 0;
    for (uint64_t i = 0; i < a.size(); i++) {
        if (i & mask) {
            s += std::norm(a[i]);
        }
    }
    return s;
}

}  // namespace scalar

void apply_x(std::span<amp> a, unsigned target, uint64_t controls) {
    uint64_t step = uint64_t{1} << target;
    for (uint64_t base = 0; base < a.size(); base += 2 * step) {
        for (uint64_t j = 0; j < step; j++) {
            uint64_t i0 = base + j;
            if ((i0 & controls) == controls) {
                std::swap(a[i0], a[i0 | step]);
            }
        }
    }
}

void apply_kq(std::span<amp> a, std::span<const unsigned> targets, uint64_t controls, std::span<const amp> m) {
    size_t k = targets.size();
    size_t dim = size_t{1} << k;
    uint64_t tmask = 0;
    std::array<uint64_t, 8> offsets{};
    for (size_t r = 0; r < dim; r++) {
        uint64_t off = 0;
        for (size_t t = 0; t < k; t++) {
            if (r & (size_t{1} << (k - 1 - t))) {
                off |= uint64_t{1} << targets[t];
            }
        }
        offsets[r] = off;
    }
    for (unsigned t : targets) {
        tmask |= uint64_t{1} << t;
    }
    std::array<amp, 8> in{};
    for (uint64_t i = 0; i < a.size(); i++) {
        if ((i & tmask) != 0 || (i & controls) != controls) {
            continue;
        }
        for (size_t r = 0; r < dim; r++) {
            in[r] = a[i | offsets[r]];
        }
        for (size_t r = 0; r < dim; r++) {
            amp acc = 0;
            for (size_t c = 0; c < dim; c++) {
                acc += m[r * dim + c] * in[c];
            }
            a[i | offsets[r]] = acc;
        }
    }
}

}  // namespace ensq::kernels
