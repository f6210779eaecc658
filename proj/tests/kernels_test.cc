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

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace ensq::kernels;

namespace {

std::vector<amp> random_vec(size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    std::vector<amp> v(n);
    for (auto &x : v) {
        x = amp(d(rng), d(rng));
    }
    return v;
}

std::array<amp, 4> random_u(uint64_t seed) {
    // Any matrix works for comparing the two kernels.
    auto v = random_vec(4, seed + 1000);
    return {v[0], v[1], v[2], v[3]};
}

double max_diff(const std::vector<amp> &a, const std::vector<amp> &b) {
    double m = 0;
    for (size_t i = 0; i < a.size(); i++) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

}  // namespace

class KernelEquivalence : public ::testing::Test {
   protected:
    void SetUp() override {
        if (!avx2_supported()) {
            GTEST_SKIP() << "no AVX2 on this host";
        }
    }
};

TEST_F(KernelEquivalence, apply_1q_all_targets_and_controls) {
    for (unsigned n : {1u, 2u, 3u, 6u, 9u}) {
        for (unsigned t = 0; t < n; t++) {
            for (uint64_t controls : {uint64_t{0}, uint64_t{1}, uint64_t{2}, uint64_t{6}, uint64_t{5}}) {
                controls &= ((uint64_t{1} << n) - 1) & ~(uint64_t{1} << t);
                auto a = random_vec(size_t{1} << n, n * 100 + t);
                auto b = a;
                auto m = random_u(t + 17 * n);
                scalar::apply_1q(a, t, controls, m);
                avx2::apply_1q(b, t, controls, m);
                ASSERT_LT(max_diff(a, b), 1e-12) << "n=" << n << " t=" << t << " controls=" << controls;
            }
        }
    }
}

TEST_F(KernelEquivalence, apply_diag_all_targets_and_controls) {
    for (unsigned n : {1u, 2u, 5u, 8u}) {
        for (unsigned t = 0; t < n; t++) {
            for (uint64_t controls : {uint64_t{0}, uint64_t{1}, uint64_t{4}, uint64_t{3}}) {
                controls &= ((uint64_t{1} << n) - 1) & ~(uint64_t{1} << t);
                auto a = random_vec(size_t{1} << n, 7 + t);
                auto b = a;
                amp d0 = std::polar(1.0, 0.3 * t), d1 = std::polar(1.0, -1.1 + t);
                scalar::apply_diag_1q(a, t, controls, d0, d1);
                avx2::apply_diag_1q(b, t, controls, d0, d1);
                ASSERT_LT(max_diff(a, b), 1e-12) << "n=" << n << " t=" << t;
            }
        }
    }
}

TEST_F(KernelEquivalence, reductions) {
    for (unsigned n : {1u, 2u, 3u, 7u, 12u}) {
        auto a = random_vec(size_t{1} << n, n);
        EXPECT_NEAR(scalar::norm_sq(a), avx2::norm_sq(a), 1e-9);
        for (unsigned b = 0; b < n; b++) {
            EXPECT_NEAR(scalar::prob_one(a, b), avx2::prob_one(a, b), 1e-9);
        }
    }
}

TEST(Kernels, backend_switch_round_trips) {
    Backend before = active_backend();
    set_backend(Backend::kScalar);
    EXPECT_EQ(active_backend(), Backend::kScalar);
    EXPECT_STREQ(backend_name(Backend::kScalar), "scalar");
    set_backend(before);
}

TEST(Kernels, apply_kq_matches_sequence_of_1q) {
    // Dense 2-qubit kernel with a product matrix equals two single-qubit applications.
    auto a = random_vec(16, 3);
    auto b = a;
    std::array<amp, 4> u{0.6, 0.8, 0.8, -0.6};
    std::array<amp, 4> v{amp(0, 1), 0, 0, 1};
    std::vector<amp> m(16);
    for (int r = 0; r < 4; r++) {
        for (int c = 0; c < 4; c++) {
            m[r * 4 + c] = u[(r >> 1) * 2 + (c >> 1)] * v[(r & 1) * 2 + (c & 1)];
        }
    }
    unsigned targets[2] = {3, 1};
    apply_kq(a, targets, 0, m);
    scalar::apply_1q(b, 3, 0, u);
    scalar::apply_1q(b, 1, 0, v);
    EXPECT_LT(max_diff(a, b), 1e-12);
}
