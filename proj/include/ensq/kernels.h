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

#ifndef ENSQ_KERNELS_H
#define ENSQ_KERNELS_H

#include <array>
#include <complex>
#include <cstdint>
#include <span>

namespace ensq::kernels {

using amp = std::complex<double>;

enum class Backend { kScalar, kAvx2 };

/// Bit positions here are raw index bits (bit 0 is the least significant bit of the amplitude index).
/// `controls` is a mask of index bits that must all be set for the operation to act.
struct Table {
    void (*apply_1q)(std::span<amp> a, unsigned target, uint64_t controls, const std::array<amp, 4> &m);
    void (*apply_diag_1q)(std::span<amp> a, unsigned target, uint64_t controls, amp d0, amp d1);
    double (*norm_sq)(std::span<const amp> a);
    double (*prob_one)(std::span<const amp> a, unsigned bit);
};

namespace scalar {
void apply_1q(std::span<amp> a, unsigned target, uint64_t controls, const std::array<amp, 4> &m);
void apply_diag_1q(std::span<amp> a, unsigned target, uint64_t controls, amp d0, amp d1);
double norm_sq(std::span<const amp> a);
double prob_one(std::span<const amp> a, unsigned bit);
}  // namespace scalar

namespace avx2 {
void apply_1q(std::span<amp> a, unsigned target, uint64_t controls, const std::array<amp, 4> &m);
void apply_diag_1q(std::span<amp> a, unsigned target, uint64_t controls, amp d0, amp d1);
double norm_sq(std::span<const amp> a);
double prob_one(std::span<const amp> a, unsigned bit);
}  // namespace avx2

bool avx2_supported();

/// Selected once from the CPU and the ENSQ_KERNELS variable ("scalar" or "avx2"), can be overridden.
Backend active_backend();
void set_backend(Backend backend);
const char *backend_name(Backend backend);
const Table &table(Backend backend);
const Table &active();

/// Swaps amplitude pairs differing in `target` (controlled X). Memory bound, no vector variant.
void apply_x(std::span<amp> a, unsigned target, uint64_t controls);

/// Dense k-qubit matrix (k <= 3, row-major, operand 0 is the most significant matrix bit).
void apply_kq(std::span<amp> a, std::span<const unsigned> targets, uint64_t controls, std::span<const amp> m);

}  // namespace ensq::kernels

#endif
