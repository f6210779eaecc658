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

#include "ensq/gadgets.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "ensq/parallel.h"

namespace ensq {

namespace {

// The 19 commuting CNOTs and 3 syndrome negations of the steane7 copy, reordered so that ASAP
// placement leaves few idle layers. Entries are (codeword position or -1 for X, target) with
// target 0..2 a syndrome bit and 3 the copy bit.
constexpr std::pair<int, int> kSteaneCopyOrder[] = {
    {1, 3}, {2, 3}, {2, 2}, {3, 3}, {6, 3}, {4, 3}, {2, 0}, {1, 2}, {-1, 0}, {6, 2}, {3, 1},
    {5, 3}, {-1, 1}, {5, 2}, {6, 1}, {4, 0}, {4, 1}, {6, 0}, {0, 3}, {0, 0}, {5, 1}, {-1, 2},
};

Oracle multi_controlled_not(unsigned controls) {
    uint32_t all = ((1u << controls) - 1) << 1;
    return Oracle::from_function("C" + std::to_string(controls) + "NOT", controls + 1,
                                 [all](uint32_t x) { return (x & all) == all ? x ^ 1u : x; });
}

Oracle majority_oracle(unsigned n) {
    return Oracle::from_function("MAJ" + std::to_string(n), n + 1, [n](uint32_t x) {
        unsigned ones = static_cast<unsigned>(std::popcount(x >> 1));
        return 2 * ones > n ? x ^ 1u : x;
    });
}

// target ^= [bits == pattern], pattern bit j for control j.
Oracle pattern_detector(unsigned k, uint32_t pattern) {
    uint32_t want = 0;
    for (unsigned j = 0; j < k; j++) {
        if ((pattern >> j) & 1) {
            want |= 1u << (k - j);
        }
    }
    uint32_t mask = ((1u << k) - 1) << 1;
    return Oracle::from_function("SYN" + std::to_string(pattern), k + 1,
                                 [=](uint32_t x) { return (x & mask) == want ? x ^ 1u : x; });
}

void prepare_plus(CircuitBuilder &b, const CodeSpec &code, std::span<const uint32_t> block) {
    b.add(Gate::H(), {block[code.encoder_input()]});
    b.append(encoder(code), block);
}

void append_controlled(CircuitBuilder &b, uint32_t control, const LocalFactor &f,
                       const std::vector<std::vector<uint32_t>> &blocks, unsigned pos) {
    std::vector<uint32_t> t{control};
    for (unsigned o : f.operands) {
        t.push_back(blocks[o][pos]);
    }
    b.add(Op{Gate::controlled(f.gate)}, std::move(t));
}

std::vector<uint32_t> concat(const std::vector<std::vector<uint32_t>> &blocks) {
    std::vector<uint32_t> out;
    for (const auto &bl : blocks) {
        out.insert(out.end(), bl.begin(), bl.end());
    }
    return out;
}

void finish_roles(GadgetCircuit &g) {
    std::vector<char> used(g.circuit.num_qubits(), 0);
    for (uint32_t q : g.data_qubits) {
        used[q] = 1;
    }
    for (uint32_t q : g.register_bits()) {
        used[q] = 1;
    }
    g.ancilla_qubits.clear();
    for (uint32_t q = 0; q < used.size(); q++) {
        if (!used[q]) {
            g.ancilla_qubits.push_back(q);
        }
    }
}

// Syndrome copies of `source` (bits read as a classical word), majority per check, one
// detector bit per correctable position, and the controlled Pauli onto `target`.
void append_correction(CircuitBuilder &b, const CodeSpec &code, const std::vector<std::vector<uint32_t>> &checks,
                       std::span<const uint32_t> source, std::span<const uint32_t> target, const Gate &fix,
                       unsigned n_rep) {
    std::vector<uint32_t> decided;
    for (const auto &chk : checks) {
        ClassicalRegister reg{n_rep, {}};
        for (unsigned r = 0; r < n_rep; r++) {
            uint32_t s = b.allocate();
            for (uint32_t q : chk) {
                b.add(Gate::CNOT(), {source[q], s});
            }
            reg.bits.push_back(s);
        }
        decided.push_back(append_majority_bit(b, reg));
    }
    unsigned k = static_cast<unsigned>(checks.size());
    for (uint32_t pos = 0; pos < code.n(); pos++) {
        uint32_t syn = 0;
        for (unsigned j = 0; j < k; j++) {
            for (uint32_t q : checks[j]) {
                syn |= static_cast<uint32_t>(q == pos) << j;
            }
        }
        uint32_t flag = b.allocate();
        std::vector<uint32_t> t(decided.begin(), decided.end());
        t.push_back(flag);
        b.add(Op{pattern_detector(k, syn)}, std::move(t));
        b.add(Op{Gate::controlled(fix)}, {flag, target[pos]});
    }
}

}  // namespace

const char *exec_mode_name(ExecMode mode) {
    switch (mode) {
        case ExecMode::kCoherent:
            return "coherent";
        case ExecMode::kDeferredExact:
            return "deferred-exact";
        default:
            return "deferred-sampling";
    }
}

RunConfig exec_config(ExecMode mode) {
    RunConfig c;
    c.classicalize = mode != ExecMode::kCoherent;
    c.branching = mode == ExecMode::kDeferredSampling ? Branching::kSample : Branching::kEnumerate;
    return c;
}

std::pair<int, int> n_gate_contract(int logical, int classical) {
    if ((logical != 0 && logical != 1) || (classical != 0 && classical != 1)) {
        throw std::invalid_argument("labels must be 0 or 1");
    }
    return {logical, classical ^ logical};
}

N1Layout append_n1(CircuitBuilder &b, const CodeSpec &code, std::span<const uint32_t> block) {
    if (block.size() != code.n()) {
        throw std::invalid_argument("block size does not match the code");
    }
    N1Layout out;
    out.block.assign(block.begin(), block.end());
    const auto &checks = code.bit_checks();
    for (size_t j = 0; j < checks.size(); j++) {
        out.syndromes.push_back(b.allocate());
    }
    out.target = b.allocate();
    if (checks.empty()) {
        b.add(Gate::CNOT(), {block[0], out.target});
        return out;
    }
    // b ^= [syndrome != 0]: negate, flip b, multi-controlled NOT fires on the all-zero syndrome.
    auto emit = [&](int control, int j) {
        uint32_t t = j < static_cast<int>(checks.size()) ? out.syndromes[j] : out.target;
        if (control < 0) {
            b.add(Gate::X(), {t});
        } else {
            b.add(Gate::CNOT(), {block[control], t});
        }
    };
    if (code.kind() == CodeKind::kSteane7) {
        for (auto [c, j] : kSteaneCopyOrder) {
            emit(c, j);
        }
    } else {
        for (uint32_t q = 0; q < block.size(); q++) {
            emit(static_cast<int>(q), static_cast<int>(checks.size()));
        }
        for (size_t j = 0; j < checks.size(); j++) {
            for (uint32_t q : checks[j]) {
                emit(static_cast<int>(q), static_cast<int>(j));
            }
        }
        for (size_t j = 0; j < checks.size(); j++) {
            emit(-1, static_cast<int>(j));
        }
    }
    b.add(Gate::X(), {out.target});
    std::vector<uint32_t> t = out.syndromes;
    t.push_back(out.target);
    if (checks.size() == 2) {
        b.add(Op{Gate::Toffoli()}, std::move(t));
    } else {
        b.add(Op{multi_controlled_not(static_cast<unsigned>(checks.size()))}, std::move(t));
    }
    for (uint32_t s : out.syndromes) {
        b.add(Gate::X(), {s});
    }
    return out;
}

Circuit build_n1(const CodeSpec &code) {
    if (code.kind() == CodeKind::kUnencoded1) {
        throw std::invalid_argument("the protected copy needs a code with bit checks");
    }
    CircuitBuilder b;
    b.set_asap(true);
    auto block = b.allocate_block(code.n());
    append_n1(b, code, block);
    return b.build();
}

ClassicalRegister append_n_full(CircuitBuilder &b, const CodeSpec &code, std::span<const uint32_t> block,
                                unsigned n_rep, std::vector<uint32_t> *ancillas) {
    if (n_rep % 2 == 0) {
        throw std::invalid_argument("repetition count must be odd");
    }
    ClassicalRegister reg{n_rep, {}};
    for (unsigned r = 0; r < n_rep; r++) {
        auto lay = append_n1(b, code, block);
        reg.bits.push_back(lay.target);
        if (ancillas) {
            ancillas->insert(ancillas->end(), lay.syndromes.begin(), lay.syndromes.end());
        }
    }
    return reg;
}

uint32_t append_majority_bit(CircuitBuilder &b, const ClassicalRegister &reg) {
    uint32_t m = b.allocate();
    const auto &r = reg.bits;
    if (r.size() == 1) {
        b.add(Gate::CNOT(), {r[0], m});
    } else if (r.size() == 3) {
        b.add(Gate::Toffoli(), {r[0], r[1], m});
        b.add(Gate::Toffoli(), {r[1], r[2], m});
        b.add(Gate::Toffoli(), {r[0], r[2], m});
    } else {
        std::vector<uint32_t> t = r;
        t.push_back(m);
        b.add(Op{majority_oracle(static_cast<unsigned>(r.size()))}, std::move(t));
    }
    return m;
}

EigenSpec psi0_spec(const CodeSpec &code) {
    unsigned n = code.n();
    const double theta = std::numbers::pi / (4.0 * n);
    amp ph = std::polar(1.0, theta);
    // Bitwise S^(+-1) equals logical S when i^(+-w) is 1 on even and i on odd codeword weights.
    amp s1 = n % 4 == 1 ? amp(0, 1) : amp(0, -1);
    // X Z diag(1, s1) = [[0, -s1], [1, 0]].
    std::vector<amp> m{0.0, -s1 * ph, ph, 0.0};
    EigenSpec spec;
    spec.name = "psi0";
    spec.l = 1;
    spec.u.push_back({Gate("U", 1, m), {0}});
    spec.flip.push_back({Gate::Z(), {0}});
    return spec;
}

EigenSpec and_spec() {
    EigenSpec spec;
    spec.name = "and";
    spec.l = 3;
    spec.u.push_back({Gate::CZ(), {0, 1}});
    spec.u.push_back({Gate::Z(), {2}});
    spec.flip.push_back({Gate::X(), {2}});
    return spec;
}

StateVector apply_bitwise(const CodeSpec &code, const std::vector<LocalFactor> &factors, unsigned l,
                          StateVector state) {
    unsigned n = code.n();
    if (state.num_qubits() != n * l) {
        throw std::invalid_argument("state does not span the blocks");
    }
    for (unsigned i = 0; i < n; i++) {
        for (const auto &f : factors) {
            std::vector<unsigned> qs;
            for (unsigned o : f.operands) {
                qs.push_back(o * n + i);
            }
            state.apply(f.gate, qs);
        }
    }
    return state;
}

void check_eigenpair(const CodeSpec &code, const EigenSpec &spec, const StateVector &phi0, const StateVector &phi1,
                     double tol) {
    amp a = inner(phi0, apply_bitwise(code, spec.u, spec.l, phi0));
    amp b = inner(phi1, apply_bitwise(code, spec.u, spec.l, phi1));
    double f = std::norm(inner(phi1, apply_bitwise(code, spec.flip, spec.l, phi0)));
    if (std::abs(a - amp(1)) > tol) {
        throw std::invalid_argument(spec.name + ": bitwise u does not fix the target state");
    }
    if (std::abs(b + amp(1)) > tol) {
        throw std::invalid_argument(spec.name + ": bitwise u does not negate the partner state");
    }
    if (std::abs(f - 1) > tol) {
        throw std::invalid_argument(spec.name + ": flip does not exchange the two states");
    }
}

void append_eigenvector_prep(CircuitBuilder &b, const CodeSpec &code, const EigenSpec &spec,
                             const std::vector<std::vector<uint32_t>> &blocks, unsigned n_rep,
                             std::vector<uint32_t> *ancillas) {
    unsigned n = code.n();
    if (blocks.size() != spec.l) {
        throw std::invalid_argument("wrong number of blocks for " + spec.name);
    }
    ClassicalRegister parity{n_rep, {}};
    for (unsigned r = 0; r < n_rep; r++) {
        uint32_t p = b.allocate();
        auto cat = b.allocate_block(n);
        parity.bits.push_back(p);
        if (ancillas) {
            ancillas->push_back(p);
            ancillas->insert(ancillas->end(), cat.begin(), cat.end());
        }
        // The cat chain is grown one qubit ahead of use so only two cat qubits are live at once.
        b.add(Gate::H(), {cat[0]});
        for (unsigned i = 0; i < n; i++) {
            if (i + 1 < n) {
                b.add(Gate::CNOT(), {cat[i], cat[i + 1]});
            }
            for (const auto &f : spec.u) {
                append_controlled(b, cat[i], f, blocks, i);
            }
            b.add(Gate::H(), {cat[i]});
            b.add(Gate::CNOT(), {cat[i], p});
        }
    }
    for (unsigned i = 0; i < n; i++) {
        uint32_t m = append_majority_bit(b, parity);
        if (ancillas) {
            ancillas->push_back(m);
        }
        for (const auto &f : spec.flip) {
            append_controlled(b, m, f, blocks, i);
        }
    }
}

StateVector encode_blocks(const CodeSpec &code, const StateVector &logical) {
    unsigned n = code.n();
    unsigned k = logical.num_qubits();
    std::vector<std::pair<uint64_t, amp>> support[2];
    for (int v = 0; v < 2; v++) {
        const auto &l = v ? code.logical_one() : code.logical_zero();
        for (uint64_t i = 0; i < l.size(); i++) {
            if (std::abs(l[i]) > 0) {
                support[v].push_back({i, l[i]});
            }
        }
    }
    if (n * k > qubit_cap()) {
        throw CapacityError(n * k, qubit_cap(), "encoding blocks");
    }
    std::vector<amp> out(size_t{1} << (n * k));
    for (uint64_t x = 0; x < logical.size(); x++) {
        amp c = logical[x];
        if (std::abs(c) == 0) {
            continue;
        }
        std::vector<std::pair<uint64_t, amp>> acc{{0, c}};
        for (unsigned j = 0; j < k; j++) {
            int v = (x >> (k - 1 - j)) & 1;
            std::vector<std::pair<uint64_t, amp>> next;
            for (const auto &[i, a] : acc) {
                for (const auto &[s, w] : support[v]) {
                    next.push_back({(i << n) | s, a * w});
                }
            }
            acc.swap(next);
        }
        for (const auto &[i, a] : acc) {
            out[i] += a;
        }
    }
    return StateVector::from_amplitudes(std::move(out));
}

StateVector psi_state(const CodeSpec &code, int sign) {
    double h = 1 / std::sqrt(2.0);
    return encode(code, StateVector::single(h, sign * h * std::polar(1.0, std::numbers::pi / 4)));
}

StateVector and_state(const CodeSpec &code, bool bar) {
    std::vector<amp> a(8);
    for (unsigned x = 0; x < 4; x++) {
        unsigned p = x >> 1, q = x & 1;
        a[(x << 1) | ((p & q) ^ (bar ? 1 : 0))] = 0.5;
    }
    return encode_blocks(code, StateVector::from_amplitudes(a));
}

std::vector<uint32_t> GadgetCircuit::register_bits() const {
    std::vector<uint32_t> out;
    for (const auto &r : registers) {
        out.insert(out.end(), r.bits.begin(), r.bits.end());
    }
    return out;
}

std::vector<uint32_t> GadgetCircuit::kept() const {
    std::vector<uint32_t> out = data_qubits;
    if (keep_registers) {
        auto r = register_bits();
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

GadgetCircuit build_n_full(const CodeSpec &code, unsigned n_rep) {
    GadgetCircuit g;
    g.name = "n_full";
    g.code = code.kind();
    g.n_rep = n_rep;
    CircuitBuilder b;
    b.set_asap(true);
    auto block = b.allocate_block(code.n());
    g.registers.push_back(append_n_full(b, code, block, n_rep));
    g.circuit = b.build();
    g.input_blocks = {block};
    g.data_qubits = block;
    g.keep_registers = true;
    finish_roles(g);
    return g;
}

GadgetCircuit build_eigenvector(const CodeSpec &code, const EigenSpec &spec, unsigned n_rep) {
    GadgetCircuit g;
    g.name = "eigenvector_" + spec.name;
    g.code = code.kind();
    g.n_rep = n_rep;
    CircuitBuilder b;
    std::vector<std::vector<uint32_t>> blocks;
    for (unsigned j = 0; j < spec.l; j++) {
        blocks.push_back(b.allocate_block(code.n()));
    }
    append_eigenvector_prep(b, code, spec, blocks, n_rep);
    g.circuit = b.build();
    g.input_blocks = blocks;
    g.data_qubits = concat(blocks);
    finish_roles(g);
    return g;
}

GadgetCircuit build_psi0(const CodeSpec &code, unsigned n_rep) {
    GadgetCircuit g;
    g.name = "psi0";
    g.code = code.kind();
    g.n_rep = n_rep;
    CircuitBuilder b;
    auto block = b.allocate_block(code.n());
    prepare_plus(b, code, block);
    append_eigenvector_prep(b, code, psi0_spec(code), {block}, n_rep);
    g.circuit = b.build();
    g.data_qubits = block;
    finish_roles(g);
    return g;
}

GadgetCircuit build_and_state(const CodeSpec &code, unsigned n_rep) {
    GadgetCircuit g;
    g.name = "and_state";
    g.code = code.kind();
    g.n_rep = n_rep;
    CircuitBuilder b;
    std::vector<std::vector<uint32_t>> blocks;
    for (int j = 0; j < 3; j++) {
        blocks.push_back(b.allocate_block(code.n()));
    }
    for (const auto &bl : blocks) {
        prepare_plus(b, code, bl);
    }
    append_eigenvector_prep(b, code, and_spec(), blocks, n_rep);
    g.circuit = b.build();
    g.data_qubits = concat(blocks);
    finish_roles(g);
    return g;
}

GadgetCircuit build_t_gadget(const CodeSpec &code, unsigned n_rep) {
    GadgetCircuit g;
    g.name = "t";
    g.code = code.kind();
    g.n_rep = n_rep;
    unsigned n = code.n();
    CircuitBuilder b;
    auto data = b.allocate_block(n);
    auto psi = b.allocate_block(n);
    prepare_plus(b, code, psi);
    append_eigenvector_prep(b, code, psi0_spec(code), {psi}, n_rep);
    for (unsigned i = 0; i < n; i++) {
        b.add(Gate::CNOT(), {data[i], psi[i]});
    }
    auto reg = append_n_full(b, code, psi, n_rep);
    Circuit s = transversal(code, "S");
    for (unsigned i = 0; i < n; i++) {
        uint32_t m = append_majority_bit(b, reg);
        for (const auto &st : s.steps()) {
            if (st.targets[0] == i) {
                b.add(Op{Gate::controlled(std::get<Gate>(st.op))}, {m, data[i]});
            }
        }
    }
    g.registers.push_back(reg);
    g.circuit = b.build();
    g.input_blocks = {data};
    g.data_qubits = data;
    finish_roles(g);
    return g;
}

GadgetCircuit build_toffoli(const CodeSpec &code, unsigned n_rep) {
    GadgetCircuit g;
    g.name = "toffoli";
    g.code = code.kind();
    g.n_rep = n_rep;
    unsigned n = code.n();
    CircuitBuilder b;
    auto a = b.allocate_block(n);
    auto bb = b.allocate_block(n);
    auto c = b.allocate_block(n);
    auto x = b.allocate_block(n);
    auto y = b.allocate_block(n);
    auto z = b.allocate_block(n);
    for (const auto *bl : {&a, &bb, &c}) {
        prepare_plus(b, code, *bl);
    }
    append_eigenvector_prep(b, code, and_spec(), {a, bb, c}, n_rep);
    for (unsigned i = 0; i < n; i++) {
        b.add(Gate::CNOT(), {a[i], x[i]});
    }
    for (unsigned i = 0; i < n; i++) {
        b.add(Gate::CNOT(), {bb[i], y[i]});
    }
    for (unsigned i = 0; i < n; i++) {
        b.add(Gate::CNOT(), {z[i], c[i]});
    }
    b.append(logical_gate(code, "H"), z);
    auto reg_y = append_n_full(b, code, y, n_rep);
    auto reg_x = append_n_full(b, code, x, n_rep);
    auto reg_z = append_n_full(b, code, z, n_rep);
    for (unsigned i = 0; i < n; i++) {
        uint32_t mz = append_majority_bit(b, reg_z);
        b.add(Gate::CZ(), {mz, c[i]});
        b.add(Gate::CCZ(), {mz, a[i], bb[i]});
        uint32_t my = append_majority_bit(b, reg_y);
        b.add(Gate::Toffoli(), {a[i], my, c[i]});
        b.add(Gate::CNOT(), {my, bb[i]});
        uint32_t mx = append_majority_bit(b, reg_x);
        b.add(Gate::Toffoli(), {bb[i], mx, c[i]});
        b.add(Gate::CNOT(), {mx, a[i]});
    }
    g.registers = {reg_x, reg_y, reg_z};
    g.circuit = b.build();
    g.input_blocks = {x, y, z};
    g.data_qubits = concat({a, bb, c});
    finish_roles(g);
    return g;
}

GadgetCircuit build_recover(const CodeSpec &code, unsigned n_rep) {
    GadgetCircuit g;
    g.name = "recover";
    g.code = code.kind();
    g.n_rep = n_rep;
    unsigned n = code.n();
    CircuitBuilder b;
    auto data = b.allocate_block(n);
    if (!code.bit_checks().empty()) {
        // Bit flips copy onto an ancilla in |+>_L through a bitwise CNOT.
        auto anc = b.allocate_block(n);
        prepare_plus(b, code, anc);
        for (unsigned i = 0; i < n; i++) {
            b.add(Gate::CNOT(), {data[i], anc[i]});
        }
        append_correction(b, code, code.bit_checks(), anc, data, Gate::X(), n_rep);
    }
    if (!code.phase_checks().empty()) {
        // Phase flips kick back onto an ancilla in |0>_L, read in the Hadamard basis.
        auto anc = b.allocate_block(n);
        b.append(encoder(code), anc);
        for (unsigned i = 0; i < n; i++) {
            b.add(Gate::CNOT(), {anc[i], data[i]});
        }
        for (unsigned i = 0; i < n; i++) {
            b.add(Gate::H(), {anc[i]});
        }
        append_correction(b, code, code.phase_checks(), anc, data, Gate::Z(), n_rep);
    }
    g.circuit = b.build();
    g.input_blocks = {data};
    g.data_qubits = data;
    finish_roles(g);
    return g;
}

double GadgetReport::fidelity(const StateVector &target) const {
    double s = 0;
    for (const auto &br : result.branches) {
        s += br.weight * std::norm(inner(target, br.state));
    }
    return s;
}

double GadgetReport::purity() const {
    double s = 0;
    const auto &bs = result.branches;
    for (size_t i = 0; i < bs.size(); i++) {
        s += bs[i].weight * bs[i].weight;
        for (size_t j = i + 1; j < bs.size(); j++) {
            s += 2 * bs[i].weight * bs[j].weight * std::norm(inner(bs[i].state, bs[j].state));
        }
    }
    return s;
}

GadgetReport run_gadget(const GadgetCircuit &g, const std::vector<StateVector> &inputs, ExecMode mode,
                        const FaultPattern &faults, uint64_t seed) {
    RunConfig cfg = exec_config(mode);
    cfg.keep = g.kept();
    cfg.record = g.register_bits();
    if (inputs.size() == g.input_blocks.size()) {
        for (size_t j = 0; j < inputs.size(); j++) {
            cfg.inputs.push_back({g.input_blocks[j], inputs[j]});
        }
    } else if (inputs.size() == 1 && !g.input_blocks.empty()) {
        cfg.inputs.push_back({concat(g.input_blocks), inputs[0]});
    } else {
        throw std::invalid_argument(g.name + " expects " + std::to_string(g.input_blocks.size()) + " input blocks");
    }
    Executor ex(g.circuit, cfg);
    GadgetReport rep;
    rep.name = g.name;
    rep.data_qubits = g.data_qubits;
    rep.ancilla_qubits = g.ancilla_qubits;
    rep.classical_registers = g.registers;
    rep.result = ex.run(faults, seed);
    const Branch *best = nullptr;
    for (const auto &br : rep.result.branches) {
        if (!best || br.weight > best->weight) {
            best = &br;
        }
    }
    if (best) {
        rep.output_state = best->state;
    }
    return rep;
}

GadgetReport n_full(const CodeSpec &code, const StateVector &block, unsigned n_rep, ExecMode mode) {
    return run_gadget(build_n_full(code, n_rep), {block}, mode);
}

GadgetReport prepare_eigenvector(const CodeSpec &code, const EigenSpec &spec, const StateVector &start,
                                 unsigned n_rep, ExecMode mode) {
    return run_gadget(build_eigenvector(code, spec, n_rep), {start}, mode);
}

GadgetReport prepare_psi0(const CodeSpec &code, ExecMode mode) {
    return run_gadget(build_psi0(code, code.default_n_rep()), {}, mode);
}

GadgetReport prepare_and_state(const CodeSpec &code, ExecMode mode) {
    return run_gadget(build_and_state(code, code.default_n_rep()), {}, mode);
}

GadgetReport t_gadget(const CodeSpec &code, const StateVector &data, ExecMode mode) {
    return run_gadget(build_t_gadget(code, code.default_n_rep()), {data}, mode);
}

GadgetReport toffoli_gadget(const CodeSpec &code, const std::vector<StateVector> &inputs, ExecMode mode,
                            uint64_t seed) {
    return run_gadget(build_toffoli(code, code.default_n_rep()), inputs, mode, {}, seed);
}

GadgetReport recover(const CodeSpec &code, const StateVector &data, ExecMode mode) {
    return run_gadget(build_recover(code, code.default_n_rep()), {data}, mode);
}

namespace {

std::vector<Executor> n_full_executors(const CodeSpec &code, const GadgetCircuit &g, ExecMode mode) {
    std::vector<Executor> ex;
    for (int v = 0; v < 2; v++) {
        RunConfig cfg = exec_config(mode);
        cfg.record = g.register_bits();
        cfg.inputs.push_back({g.input_blocks[0], v ? code.logical_one() : code.logical_zero()});
        ex.emplace_back(g.circuit, cfg);
    }
    return ex;
}

double wrong_weight(const RunResult &r, int logical) {
    double w = 0;
    for (const auto &br : r.branches) {
        std::vector<uint8_t> bits(br.record.begin(), br.record.end());
        if (majority(bits) != logical) {
            w += br.weight;
        }
    }
    return w;
}

}  // namespace

SweepSummary n_full_single_fault_sweep(const CodeSpec &code, unsigned n_rep, bool x_only, unsigned workers) {
    GadgetCircuit g = build_n_full(code, n_rep);
    auto ex = n_full_executors(code, g, ExecMode::kDeferredExact);
    std::vector<FaultPattern> patterns;
    for (auto &p : all_single_faults(g.circuit)) {
        if (!x_only || p[0].pauli == Pauli::kX) {
            patterns.push_back(std::move(p));
        }
    }
    size_t cases = 2 * patterns.size();
    std::vector<double> worst(cases, 0);
    parallel_for(cases, workers, [&](size_t i) {
        int v = static_cast<int>(i % 2);
        worst[i] = wrong_weight(ex[v].run(patterns[i / 2]), v);
    });
    SweepSummary s;
    s.cases = cases;
    for (size_t i = 0; i < cases; i++) {
        s.worst_failure_weight = std::max(s.worst_failure_weight, worst[i]);
        if (worst[i] > 1e-12) {
            s.failures++;
            s.failing.push_back(patterns[i / 2]);
        }
    }
    return s;
}

RateEstimate n_full_failure_rate(const CodeSpec &code, unsigned n_rep, const NoiseModel &model, uint64_t trials,
                                 uint64_t seed, unsigned workers) {
    GadgetCircuit g = build_n_full(code, n_rep);
    auto ex = n_full_executors(code, g, ExecMode::kDeferredSampling);
    auto locs = enumerate_locations(g.circuit);
    std::vector<uint8_t> failed(trials, 0);
    parallel_for(trials, workers, [&](size_t i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        int v = static_cast<int>(i % 2);
        FaultPattern pat = sample_pattern(locs, model, rng);
        failed[i] = wrong_weight(ex[v].run(pat, rng()), v) > 0.5;
    });
    RateEstimate r;
    r.p = model.p();
    r.trials = trials;
    for (uint8_t f : failed) {
        r.failures += f;
    }
    r.rate = trials ? static_cast<double>(r.failures) / trials : 0;
    r.stderr_ = trials ? std::sqrt(r.rate * (1 - r.rate) / trials) : 0;
    return r;
}

}  // namespace ensq
