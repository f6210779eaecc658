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

#include "ensq/state_vector.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ensq/kernels.h"

using namespace ensq;

namespace {

StateVector random_state(unsigned n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    std::vector<amp> v(size_t{1} << n);
    double s = 0;
    for (auto &x : v) {
        x = amp(d(rng), d(rng));
        s += std::norm(x);
    }
    for (auto &x : v) {
        x /= std::sqrt(s);
    }
    return StateVector::from_amplitudes(v);
}

// Reference: build the full 2^n matrix of a gate on given qubits and multiply.
std::vector<amp> reference_apply(const std::vector<amp> &a, unsigned n, const Gate &g, std::vector<unsigned> qs) {
    std::vector<amp> out(a.size(), 0.0);
    unsigned k = g.arity();
    for (uint64_t col = 0; col < a.size(); col++) {
        uint32_t cin = 0;
        for (unsigned j = 0; j < k; j++) {
            cin = (cin << 1) | ((col >> (n - 1 - qs[j])) & 1);
        }
        for (uint32_t rout = 0; rout < g.dim(); rout++) {
            uint64_t row = col;
            for (unsigned j = 0; j < k; j++) {
                uint64_t bit = uint64_t{1} << (n - 1 - qs[j]);
                row = ((rout >> (k - 1 - j)) & 1) ? (row | bit) : (row & ~bit);
            }
            out[row] += g.at(rout, cin) * a[col];
        }
    }
    return out;
}

}  // namespace

TEST(state_vector, qubit_zero_is_most_significant) {
    StateVector s(3);
    unsigned q[1] = {0};
    s.apply(Gate::X(), q);
    EXPECT_EQ(s[4], amp(1.0));
    EXPECT_DOUBLE_EQ(expectation_z(s, 0), -1.0);
    EXPECT_DOUBLE_EQ(expectation_z(s, 2), 1.0);
}

TEST(state_vector, bell_state) {
    StateVector s(2);
    unsigned q0[1] = {0};
    unsigned q01[2] = {0, 1};
    s.apply(Gate::H(), q0);
    s.apply(Gate::CNOT(), q01);
    EXPECT_NEAR(std::abs(s[0]), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(std::abs(s[3]), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(subsystem_purity(s, std::vector<unsigned>{0}), 0.5, 1e-12);
    EXPECT_NEAR(subsystem_purity(s, std::vector<unsigned>{0, 1}), 1.0, 1e-12);
}

TEST(state_vector, gates_match_dense_reference_on_both_backends) {
    std::vector<Gate> gates = {Gate::H(),        Gate::X(),          Gate::Y(),     Gate::S(),
                               Gate::RY(0.37),   Gate::RX(1.2),      Gate::CNOT(),  Gate::CZ(),
                               Gate::SWAP(),     Gate::CPhase(0.7),  Gate::Toffoli(), Gate::CCZ(),
                               Gate::Fredkin(),  Gate::controlled(Gate::RY(0.4), 2)};
    auto before = kernels::active_backend();
    std::vector<kernels::Backend> backends = {kernels::Backend::kScalar};
    if (kernels::avx2_supported()) {
        backends.push_back(kernels::Backend::kAvx2);
    }
    for (auto be : backends) {
        kernels::set_backend(be);
        unsigned n = 5;
        uint64_t seed = 1;
        for (const auto &g : gates) {
            for (std::vector<unsigned> qs : {std::vector<unsigned>{0, 1, 2}, {4, 2, 0}, {3, 4, 1}, {2, 0, 4}}) {
                qs.resize(g.arity());
                auto s = random_state(n, seed++);
                auto want = reference_apply(s.amplitudes(), n, g, qs);
                s.apply(g, qs);
                for (size_t i = 0; i < want.size(); i++) {
                    ASSERT_NEAR(std::abs(s[i] - want[i]), 0, 1e-12) << g.name() << " backend " << kernels::backend_name(be);
                }
            }
        }
    }
    kernels::set_backend(before);
}

TEST(state_vector, gate_preserves_norm_property) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; trial++) {
        auto s = random_state(6, trial);
        std::uniform_int_distribution<unsigned> pick(0, 5);
        unsigned a = pick(rng), b = pick(rng);
        if (a == b) {
            b = (a + 1) % 6;
        }
        unsigned qs[2] = {a, b};
        s.apply(Gate::controlled(Gate::RY(0.1 * trial)), qs);
        EXPECT_NEAR(s.norm_sq(), 1.0, 1e-12);
    }
}

TEST(state_vector, plan_detects_controls) {
    EXPECT_EQ(Gate::CNOT().plan().kind, GatePlan::Kind::kX1);
    EXPECT_EQ(Gate::CNOT().plan().control_operands, std::vector<unsigned>{0});
    EXPECT_EQ(Gate::CCZ().plan().kind, GatePlan::Kind::kDiag1);
    EXPECT_EQ(Gate::CCZ().plan().control_operands.size(), 2u);
    EXPECT_EQ(Gate::Fredkin().plan().kind, GatePlan::Kind::kDense);
    EXPECT_EQ(Gate::I().plan().kind, GatePlan::Kind::kIdentity);
}

TEST(state_vector, errors) {
    StateVector s(2);
    unsigned bad[1] = {2};
    EXPECT_THROW(s.apply(Gate::X(), bad), std::out_of_range);
    unsigned rep[2] = {1, 1};
    EXPECT_THROW(s.apply(Gate::CNOT(), rep), std::invalid_argument);
    unsigned one[1] = {0};
    EXPECT_THROW(s.apply(Gate::CNOT(), one), std::invalid_argument);
    EXPECT_THROW(StateVector(qubit_cap() + 1), CapacityError);
    EXPECT_THROW(Gate("bad", 1, {1, 1, 0, 1}), std::invalid_argument);
    EXPECT_THROW(Gate("big", 4, std::vector<amp>(256)), std::invalid_argument);
    EXPECT_THROW(StateVector::from_amplitudes({1.0, 1.0}), std::invalid_argument);
}

TEST(state_vector, collapse_and_append) {
    StateVector s(2);
    unsigned q0[1] = {0};
    unsigned q01[2] = {0, 1};
    s.apply(Gate::H(), q0);
    s.apply(Gate::CNOT(), q01);
    auto t = s;
    double p = t.collapse_remove(0, 1);
    EXPECT_NEAR(p, 0.5, 1e-12);
    EXPECT_EQ(t.num_qubits(), 1u);
    EXPECT_NEAR(std::abs(t[1]), 1.0, 1e-12);
    t.append_qubit(1);
    EXPECT_NEAR(std::abs(t[3]), 1.0, 1e-12);
}

TEST(state_vector, permuted_and_tensor) {
    auto a = StateVector::from_bits("10");
    auto b = StateVector::from_bits("1");
    auto ab = a.tensor(b);
    EXPECT_EQ(ab[5], amp(1.0));
    unsigned perm[3] = {2, 0, 1};
    auto p = ab.permuted(perm);
    EXPECT_EQ(p[6], amp(1.0));
}

TEST(state_vector, trace_distance_of_orthogonal_pure_states) {
    auto a = StateVector::from_bits("0");
    auto b = StateVector::from_bits("1");
    unsigned q[1] = {0};
    EXPECT_NEAR(trace_distance(reduced_density_matrix(a, q), reduced_density_matrix(b, q)), 1.0, 1e-12);
    EXPECT_NEAR(trace_distance(reduced_density_matrix(a, q), reduced_density_matrix(a, q)), 0.0, 1e-12);
}

TEST(gate, restrict_and_classical_image) {
    Gate t = Gate::Toffoli();
    EXPECT_TRUE(t.is_diagonal_in(0));
    EXPECT_FALSE(t.is_diagonal_in(2));
    EXPECT_TRUE(t.restrict(0, 1).approx_equal(Gate::CNOT()));
    EXPECT_TRUE(t.restrict(0, 0).is_identity());
    EXPECT_EQ(t.classical_image(0b110), 0b111u);
    EXPECT_FALSE(Gate::H().classical_image(0).has_value());
    EXPECT_THROW(t.restrict(2, 0), std::invalid_argument);
    Oracle o = Oracle::from_function("inc", 2, [](uint32_t x) { return (x + 1) & 3; });
    EXPECT_FALSE(o.preserves(1));
    EXPECT_THROW(Oracle("dup", 1, {0, 0}), std::invalid_argument);
}
