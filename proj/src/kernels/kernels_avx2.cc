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

// Built with -mavx2 -mfma. Only reached through the dispatch table after a CPU check.

#include <immintrin.h>

#include "ensq/kernels.h"

namespace ensq::kernels::avx2 {

namespace {

inline __m256d cmul(__m256d v, __m256d cr, __m256d ci) {
    __m256d sw = _mm256_permute_pd(v, 0b0101);
    return _mm256_fmaddsub_pd(v, cr, _mm256_mul_pd(sw, ci));
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double *raw(std::span<amp> a) {
    return reinterpret_cast<double *>(a.data());
}

inline const double *raw(std::span<const amp> a) {
    return reinterpret_cast<const double *>(a.data());
}

}  // namespace

void apply_1q(std::span<amp> a, unsigned target, uint64_t controls, const std::array<amp, 4> &m) {
    if (a.size() < 2 || (controls & 1)) {
        scalar::apply_1q(a, target, controls, m);
        return;
    }
    double *p = raw(a);
    uint64_t n = a.size();
    if (target == 0) {
        __m256d car = _mm256_setr_pd(m[0].real(), m[0].real(), m[2].real(), m[2].real());
        __m256d cai = _mm256_setr_pd(m[0].imag(), m[0].imag(), m[2].imag(), m[2].imag());
        __m256d cbr = _mm256_setr_pd(m[1].real(), m[1].real(), m[3].real(), m[3].real());
        __m256d cbi = _mm256_setr_pd(m[1].imag(), m[1].imag(), m[3].imag(), m[3].imag());
        for (uint64_t i0 = 0; i0 < n; i0 += 2) {
            if ((i0 & controls) != controls) {
                continue;
            }
            __m256d v = _mm256_loadu_pd(p + 2 * i0);
            __m256d lo = _mm256_permute2f128_pd(v, v, 0x00);
            __m256d hi = _mm256_permute2f128_pd(v, v, 0x11);
            _mm256_storeu_pd(p + 2 * i0, _mm256_add_pd(cmul(lo, car, cai), cmul(hi, cbr, cbi)));
        }
        return;
    }
    __m256d m0r = _mm256_set1_pd(m[0].real()), m0i = _mm256_set1_pd(m[0].imag());
    __m256d m1r = _mm256_set1_pd(m[1].real()), m1i = _mm256_set1_pd(m[1].imag());
    __m256d m2r = _mm256_set1_pd(m[2].real()), m2i = _mm256_set1_pd(m[2].imag());
    __m256d m3r = _mm256_set1_pd(m[3].real()), m3i = _mm256_set1_pd(m[3].imag());
    uint64_t step = uint64_t{1} << target;
    for (uint64_t base = 0; base < n; base += 2 * step) {
        for (uint64_t j = 0; j < step; j += 2) {
            uint64_t i0 = base + j;
            if ((i0 & controls) != controls) {
                continue;
            }
            double *q0 = p + 2 * i0;
            double *q1 = p + 2 * (i0 | step);
            __m256d x0 = _mm256_loadu_pd(q0);
            __m256d x1 = _mm256_loadu_pd(q1);
            __m256d y0 = _mm256_add_pd(cmul(x0, m0r, m0i), cmul(x1, m1r, m1i));
            __m256d y1 = _mm256_add_pd(cmul(x0, m2r, m2i), cmul(x1, m3r, m3i));
            _mm256_storeu_pd(q0, y0);
            _mm256_storeu_pd(q1, y1);
        }
    }
}

void apply_diag_1q(std::span<amp> a, unsigned target, uint64_t controls, amp d0, amp d1) {
    if (a.size() < 2 || (controls & 1)) {
        scalar::apply_diag_1q(a, target, controls, d0, d1);
        return;
    }
    double *p = raw(a);
    uint64_t n = a.size();
    uint64_t bit = uint64_t{1} << target;
    __m256d r0, i0v, r1, i1v;
    if (target == 0) {
        r0 = r1 = _mm256_setr_pd(d0.real(), d0.real(), d1.real(), d1.real());
        i0v = i1v = _mm256_setr_pd(d0.imag(), d0.imag(), d1.imag(), d1.imag());
    } else {
        r0 = _mm256_set1_pd(d0.real());
        i0v = _mm256_set1_pd(d0.imag());
        r1 = _mm256_set1_pd(d1.real());
        i1v = _mm256_set1_pd(d1.imag());
    }
    for (uint64_t i = 0; i < n; i += 2) {
        if ((i & controls) != controls) {
            continue;
        }
        bool one = target != 0 && (i & bit);
        __m256d v = _mm256_loadu_pd(p + 2 * i);
        _mm256_storeu_pd(p + 2 * i, one ? cmul(v, r1, i1v) : cmul(v, r0, i0v));
    }
}

double norm_sq(std::span<const amp> a) {
    const double *p = raw(a);
    uint64_t n = a.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    uint64_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v0 = _mm256_loadu_pd(p + 2 * i);
        __m256d v1 = _mm256_loadu_pd(p + 2 * i + 4);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; i++) {
        s += std::norm(a[i]);
    }
    return s;
}

double prob_one(std::span<const amp> a, unsigned bit) {
    if (bit == 0) {
        return scalar::prob_one(a, bit);
    }
    const double *p = raw(a);
    uint64_t n = a.size();
    uint64_t step = uint64_t{1} << bit;
    __m256d acc = _mm256_setzero_pd();
    for (uint64_t base = step; base < n; base += 2 * step) {
        for (uint64_t j = 0; j < step; j += 2) {
            __m256d v = _mm256_loadu_pd(p + 2 * (base + j));
            acc = _mm256_fmadd_pd(v, v, acc);
        }
    }
    return hsum(acc);
}

}  // namespace ensq::kernels::avx2
