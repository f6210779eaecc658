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

#include "ensq/runner.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

using namespace ensq;

namespace {

Circuit random_circuit(unsigned n, unsigned steps, uint64_t seed, bool with_oracle) {
    std::mt19937_64 rng(seed);
    std::vector<Gate> pool = {Gate::H(),    Gate::X(),       Gate::S(),   Gate::T(),          Gate::RY(0.7),
                              Gate::CNOT(), Gate::CZ(),      Gate::SWAP(), Gate::Toffoli(),   Gate::CCZ(),
                              Gate::CS(),   Gate::Fredkin(), Gate::RX(1.3)};
    CircuitBuilder b;
    auto q = b.allocate_block(n);
    for (unsigned s = 0; s < steps; s++) {
        if (with_oracle && s % 7 == 3) {
            Oracle o = Oracle::from_function("add1", 3, [](uint32_t x) { return (x + 3) & 7; });
            std::vector<uint32_t> t = q;
            std::shuffle(t.begin(), t.end(), rng);
            t.resize(3);
            b.add(o, t);
            continue;
        }
        const Gate &g = pool[rng() % pool.size()];
        std::vector<uint32_t> t = q;
        std::shuffle(t.begin(), t.end(), rng);
        t.resize(g.arity());
        b.add(g, t);
    }
    return b.build();
}

FaultPattern random_faults(const Circuit &c, uint64_t seed, size_t count) {
    LocationTable t(c);
    std::mt19937_64 rng(seed);
    FaultPattern out;
    std::vector<size_t> idx(t.size());
    for (size_t i = 0; i < idx.size(); i++) {
        idx[i] = i;
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    for (size_t i = 0; i < count && i < idx.size(); i++) {
        out.push_back({t.locations()[idx[i]], static_cast<Pauli>(1 + rng() % 3)});
    }
    return out;
}

double max_abs_diff(const std::vector<amp> &a, const std::vector<amp> &b) {
    double m = 0;
    for (size_t i = 0; i < a.size(); i++) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

}  // namespace

TEST(runner, keep_all_matches_dense_execution) {
    for (uint64_t seed = 0; seed < 20; seed++) {
        auto c = random_circuit(5, 30, seed, true);
        auto faults = random_faults(c, seed, 3);
        RunConfig cfg;
        cfg.keep = {0, 1, 2, 3, 4};
        Executor ex(c, cfg);
        auto r = ex.run(faults);
        ASSERT_EQ(r.branches.size(), 1u);
        auto want = run_circuit(c.initial_state(), c, faults);
        EXPECT_NEAR(fidelity(r.branches[0].state, want), 1.0, 1e-10) << "seed " << seed;
    }
}

TEST(runner, reduced_state_matches_partial_trace) {
    for (bool classicalize : {false, true}) {
        for (uint64_t seed = 0; seed < 20; seed++) {
            auto c = random_circuit(6, 40, 100 + seed, seed % 2 == 0);
            auto faults = random_faults(c, seed, 2);
            RunConfig cfg;
            cfg.keep = {4, 1};
            cfg.classicalize = classicalize;
            Executor ex(c, cfg);
            auto r = ex.run(faults);
            auto full = run_circuit(c.initial_state(), c, faults);
            unsigned q[2] = {4, 1};
            unsigned local[2] = {0, 1};
            auto want = reduced_density_matrix(full, q);
            auto got = mixture_density_matrix(r, local);
            EXPECT_LT(max_abs_diff(want, got), 1e-10) << "seed " << seed << " classicalize " << classicalize;
        }
    }
}

TEST(runner, classical_circuits_stay_classical) {
    CircuitBuilder b;
    auto q = b.allocate_block(30);
    for (unsigned i = 0; i + 2 < 30; i++) {
        b.add(Gate::X(), {q[i]});
        b.add(Gate::Toffoli(), {q[i], q[i + 1], q[i + 2]});
        b.add(Gate::CNOT(), {q[i], q[i + 1]});
    }
    RunConfig cfg;
    cfg.record = {27, 28, 29};
    Executor ex(b.build(), cfg);
    auto r = ex.run();
    ASSERT_EQ(r.branches.size(), 1u);
    EXPECT_EQ(r.stats.peak_live, 0u);
    // Dense reference on the last few bits is not feasible at 30 qubits; check one exact value by hand-rolled bits.
    std::vector<int> v(30, 0);
    for (unsigned i = 0; i + 2 < 30; i++) {
        v[i] ^= 1;
        v[i + 2] ^= v[i] & v[i + 1];
        v[i + 1] ^= v[i];
    }
    EXPECT_EQ(r.branches[0].record, (std::vector<int8_t>{static_cast<int8_t>(v[27]), static_cast<int8_t>(v[28]),
                                                         static_cast<int8_t>(v[29])}));
}

TEST(runner, branches_merge_when_outcomes_are_forgotten) {
    // H then measure-and-forget many ancillas: the data qubit stays pure and one branch remains.
    CircuitBuilder b;
    uint32_t d = b.allocate();
    b.add(Gate::H(), {d});
    for (int k = 0; k < 12; k++) {
        uint32_t a = b.allocate();
        b.add(Gate::H(), {a});
        b.add(Gate::CZ(), {a, d});
        b.add(Gate::CZ(), {a, d});
    }
    RunConfig cfg;
    cfg.keep = {d};
    Executor ex(b.build(), cfg);
    auto r = ex.run();
    EXPECT_EQ(r.branches.size(), 1u);
    EXPECT_NEAR(r.branches[0].weight, 1.0, 1e-12);
    EXPECT_LE(r.stats.peak_live, 2u);
}

TEST(runner, sampling_matches_enumeration_statistically) {
    auto c = random_circuit(5, 25, 77, false);
    RunConfig ecfg;
    ecfg.keep = {0};
    ecfg.record = {1, 2};
    Executor exact(c, ecfg);
    auto er = exact.run();
    std::map<std::pair<int, int>, double> want;
    for (const auto &b : er.branches) {
        want[{b.record[0], b.record[1]}] += b.weight;
    }
    RunConfig scfg = ecfg;
    scfg.branching = Branching::kSample;
    Executor sampled(c, scfg);
    std::map<std::pair<int, int>, double> got;
    int trials = 4000;
    for (int s = 0; s < trials; s++) {
        auto r = sampled.run({}, s);
        ASSERT_EQ(r.branches.size(), 1u);
        got[{r.branches[0].record[0], r.branches[0].record[1]}] += 1.0 / trials;
    }
    for (const auto &[k, p] : want) {
        EXPECT_NEAR(got[k], p, 4 * std::sqrt(p * (1 - p) / trials) + 1e-9);
    }
}

namespace {

// Main register of `m` qubits in superposition, an external block that couples to it and is then measured.
struct DeferralCase {
    Circuit circuit;
    std::vector<uint32_t> block;
    std::vector<uint32_t> main;
    StateVector block_state;
};

DeferralCase make_case(bool block_controls_main) {
    CircuitBuilder b;
    DeferralCase d;
    d.main = b.allocate_block(4);
    d.block = b.allocate_block(3);
    for (uint32_t q : d.main) {
        b.add(Gate::RY(0.4 + q), {q});
    }
    b.add(Gate::CNOT(), {d.main[0], d.main[1]});
    if (block_controls_main) {
        b.add(Gate::CNOT(), {d.block[0], d.main[0]});
        b.add(Gate::CZ(), {d.block[1], d.main[2]});
        b.add(Gate::CNOT(), {d.block[2], d.main[3]});
        b.add(Gate::H(), {d.block[0]});
        b.add(Gate::CNOT(), {d.block[0], d.block[1]});
        b.add(Gate::RY(0.3), {d.block[2]});
    } else {
        b.add(Gate::CNOT(), {d.main[0], d.block[0]});
        b.add(Gate::H(), {d.block[1]});
        b.add(Gate::Toffoli(), {d.main[1], d.main[2], d.block[1]});
        b.add(Gate::CZ(), {d.main[3], d.block[2]});
        b.add(Gate::RY(1.1), {d.block[2]});
    }
    // Later uses of the block are controls only, so it becomes ready for measurement.
    uint32_t anc = b.allocate();
    b.add(Gate::CNOT(), {d.block[0], anc});
    b.add(Gate::CNOT(), {d.block[1], anc});
    b.add(Gate::CNOT(), {d.block[2], anc});
    d.circuit = b.build();
    std::vector<amp> v(8);
    for (int i = 0; i < 8; i++) {
        v[i] = std::polar(1.0 / std::sqrt(8.0), 0.4 * i * i);
    }
    d.block_state = StateVector::from_amplitudes(v);
    return d;
}

}  // namespace

TEST(runner, deferred_coupling_matches_merged_execution) {
    unsigned old_cap = qubit_cap();
    for (bool bcm : {false, true}) {
        auto d = make_case(bcm);
        RunConfig cfg;
        cfg.keep = d.main;
        cfg.record = d.block;
        cfg.classicalize = true;
        cfg.inputs = {{d.block, d.block_state}};
        Executor exact(d.circuit, cfg);
        auto er = exact.run();
        std::map<std::vector<int8_t>, std::pair<double, StateVector>> want;
        for (const auto &b : er.branches) {
            want.emplace(b.record, std::make_pair(b.weight, b.state));
        }
        set_qubit_cap(5);
        RunConfig scfg = cfg;
        scfg.branching = Branching::kSample;
        Executor deferred(d.circuit, scfg);
        std::map<std::vector<int8_t>, double> freq;
        int trials = 3000;
        size_t absorbed = 0;
        for (int s = 0; s < trials; s++) {
            auto r = deferred.run({}, s);
            ASSERT_EQ(r.branches.size(), 1u);
            absorbed += r.stats.absorptions;
            EXPECT_LE(r.stats.peak_live, 5u);
            const auto &br = r.branches[0];
            auto it = want.find(br.record);
            ASSERT_NE(it, want.end());
            EXPECT_NEAR(fidelity(br.state, it->second.second), 1.0, 1e-9);
            freq[br.record] += 1.0 / trials;
        }
        set_qubit_cap(old_cap);
        EXPECT_EQ(absorbed, static_cast<size_t>(trials));
        for (const auto &[k, v] : want) {
            double p = v.first;
            EXPECT_NEAR(freq[k], p, 4 * std::sqrt(p * (1 - p) / trials) + 1e-9);
        }
    }
}

TEST(runner, coupling_over_cap_without_deferral_raises) {
    unsigned old_cap = qubit_cap();
    auto d = make_case(false);
    RunConfig cfg;
    cfg.keep = d.main;
    cfg.inputs = {{d.block, d.block_state}};
    set_qubit_cap(5);
    Executor ex(d.circuit, cfg);
    EXPECT_THROW(ex.run(), CapacityError);
    set_qubit_cap(old_cap);
}

TEST(runner, faults_on_classical_bits) {
    auto c = parse_circuit("qubits 2\n0 CNOT 0 1\n");
    RunConfig cfg;
    cfg.record = {0, 1};
    Executor ex(c, cfg);
    auto r = ex.run({{{LocationKind::kInput, -1, 0}, Pauli::kY}});
    EXPECT_EQ(r.branches[0].record, (std::vector<int8_t>{1, 1}));
    auto z = ex.run({{{LocationKind::kGateOutput, 0, 1}, Pauli::kZ}});
    EXPECT_EQ(z.branches[0].record, (std::vector<int8_t>{0, 0}));
}

TEST(runner, deferred_coupling_with_faults_matches_merged_execution) {
    unsigned old_cap = qubit_cap();
    for (bool bcm : {false, true}) {
        auto d = make_case(bcm);
        for (uint64_t fs = 0; fs < 6; fs++) {
            auto faults = random_faults(d.circuit, 31 * fs + bcm, 4);
            RunConfig cfg;
            cfg.keep = d.main;
            cfg.record = d.block;
            cfg.classicalize = true;
            cfg.inputs = {{d.block, d.block_state}};
            Executor exact(d.circuit, cfg);
            auto er = exact.run(faults);
            std::map<std::vector<int8_t>, StateVector> want;
            for (const auto &b : er.branches) {
                want.emplace(b.record, b.state);
            }
            set_qubit_cap(5);
            RunConfig scfg = cfg;
            scfg.branching = Branching::kSample;
            Executor deferred(d.circuit, scfg);
            for (int s = 0; s < 40; s++) {
                auto r = deferred.run(faults, s);
                const auto &br = r.branches[0];
                auto it = want.find(br.record);
                ASSERT_NE(it, want.end());
                EXPECT_NEAR(fidelity(br.state, it->second), 1.0, 1e-9);
            }
            set_qubit_cap(old_cap);
        }
    }
}

TEST(runner, observed_z_matches_dense_expectations) {
    for (uint64_t seed = 0; seed < 30; seed++) {
        Circuit c = random_circuit(6, 25, seed, seed % 2 == 0);
        auto faults = random_faults(c, seed + 100, seed % 3);
        StateVector dense = run_circuit(c.initial_state(), c, faults);
        for (bool classicalize : {false, true}) {
            RunConfig cfg;
            cfg.classicalize = classicalize;
            cfg.observe_z = true;
            auto r = Executor(c, cfg).run(faults);
            for (unsigned q = 0; q < 6; q++) {
                double z = 0;
                for (const auto &b : r.branches) {
                    z += b.weight * b.z.at(q);
                }
                EXPECT_NEAR(z, expectation_z(dense, q), 1e-10) << "seed " << seed << " qubit " << q;
            }
        }
    }
}

TEST(runner, observed_z_sampled_mean_converges) {
    Circuit c = random_circuit(5, 30, 77, true);
    StateVector dense = run_circuit(c.initial_state(), c);
    RunConfig cfg;
    cfg.classicalize = true;
    cfg.branching = Branching::kSample;
    cfg.observe_z = true;
    Executor ex(c, cfg);
    const int trials = 4000;
    std::vector<double> sum(5, 0);
    for (int t = 0; t < trials; t++) {
        auto r = ex.run({}, static_cast<uint64_t>(t));
        ASSERT_EQ(r.branches.size(), 1u);
        for (unsigned q = 0; q < 5; q++) {
            sum[q] += r.branches[0].z[q];
        }
    }
    for (unsigned q = 0; q < 5; q++) {
        // Each trial's value lies in [-1, 1]; 5 sigma of the worst-case spread.
        EXPECT_NEAR(sum[q] / trials, expectation_z(dense, q), 5.0 / std::sqrt(trials)) << q;
    }
}
