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

#include "ensq/codes.h"

#include <cmath>
#include <stdexcept>

namespace ensq {

namespace {

// Checks of the 7-bit Hamming code. Check 0 reads the low bit of the 1-based position, check 1
// the high bit and check 2 the middle bit.
const std::vector<std::vector<uint32_t>> kSteaneChecks = {{0, 2, 4, 6}, {3, 4, 5, 6}, {1, 2, 5, 6}};

uint64_t index_of_bits(const std::vector<uint8_t> &bits) {
    uint64_t idx = 0;
    for (uint8_t b : bits) {
        idx = (idx << 1) | b;
    }
    return idx;
}

StateVector superposition(unsigned n, const std::vector<uint64_t> &support) {
    std::vector<amp> a(size_t{1} << n);
    double c = 1 / std::sqrt(static_cast<double>(support.size()));
    for (uint64_t i : support) {
        a[i] = c;
    }
    return StateVector::from_amplitudes(std::move(a));
}

uint32_t syndrome_of(const std::vector<std::vector<uint32_t>> &checks, uint32_t position) {
    uint32_t s = 0;
    for (size_t j = 0; j < checks.size(); j++) {
        for (uint32_t q : checks[j]) {
            if (q == position) {
                s |= 1u << j;
            }
        }
    }
    return s;
}

int correction(const std::vector<std::vector<uint32_t>> &checks, unsigned n, uint32_t syndrome) {
    if (syndrome == 0) {
        return -1;
    }
    for (uint32_t q = 0; q < n; q++) {
        if (syndrome_of(checks, q) == syndrome) {
            return static_cast<int>(q);
        }
    }
    return -1;
}

Circuit inverse(const Circuit &c) {
    Circuit out(c.num_qubits());
    const auto &steps = c.steps();
    for (size_t i = steps.size(); i-- > 0;) {
        const Gate *g = std::get_if<Gate>(&steps[i].op);
        if (g == nullptr) {
            throw std::logic_error("inverse: oracle steps not supported");
        }
        out.append(g->adjoint(), steps[i].targets);
    }
    return out;
}

Circuit bitwise(unsigned n, const Gate &g, unsigned blocks = 1) {
    Circuit c(n * blocks);
    for (uint32_t i = 0; i < n; i++) {
        if (blocks == 1) {
            c.add(0, g, {i});
        } else {
            c.add(0, g, {i, n + i});
        }
    }
    return c;
}

}  // namespace

CodeSpec::CodeSpec(CodeKind kind) : kind_(kind) {
    switch (kind) {
        case CodeKind::kSteane7: {
            name_ = "steane7";
            n_ = 7;
            k_ = 1;
            bit_checks_ = kSteaneChecks;
            phase_checks_ = kSteaneChecks;
            encoder_input_ = 2;
            std::vector<uint64_t> even, odd;
            for (uint32_t x = 0; x < 128; x++) {
                std::vector<uint8_t> bits(7);
                for (int q = 0; q < 7; q++) {
                    bits[q] = (x >> (6 - q)) & 1;
                }
                bool codeword = true;
                for (const auto &chk : kSteaneChecks) {
                    int par = 0;
                    for (uint32_t q : chk) {
                        par ^= bits[q];
                    }
                    codeword = codeword && par == 0;
                }
                if (!codeword) {
                    continue;
                }
                int w = 0;
                for (uint8_t b : bits) {
                    w += b;
                }
                (w % 2 == 0 ? even : odd).push_back(index_of_bits(bits));
            }
            zero_ = superposition(7, even);
            one_ = superposition(7, odd);
            for (const auto &chk : kSteaneChecks) {
                std::string xs(7, 'I'), zs(7, 'I');
                for (uint32_t q : chk) {
                    xs[q] = 'X';
                    zs[q] = 'Z';
                }
                stabilizers_.push_back(xs);
                stabilizers_.push_back(zs);
            }
            break;
        }
        case CodeKind::kBitflip3:
            name_ = "bitflip3";
            n_ = 3;
            k_ = 1;
            bit_checks_ = {{0, 1}, {1, 2}};
            zero_ = StateVector::basis(3, 0);
            one_ = StateVector::basis(3, 7);
            stabilizers_ = {"ZZI", "IZZ"};
            break;
        case CodeKind::kUnencoded1:
            name_ = "unencoded1";
            n_ = 1;
            k_ = 0;
            zero_ = StateVector::basis(1, 0);
            one_ = StateVector::basis(1, 1);
            break;
    }
}

const CodeSpec &CodeSpec::get(CodeKind kind) {
    static const CodeSpec steane(CodeKind::kSteane7);
    static const CodeSpec bitflip(CodeKind::kBitflip3);
    static const CodeSpec bare(CodeKind::kUnencoded1);
    switch (kind) {
        case CodeKind::kSteane7:
            return steane;
        case CodeKind::kBitflip3:
            return bitflip;
        default:
            return bare;
    }
}

const CodeSpec &CodeSpec::by_name(std::string_view name) {
    if (name == "steane7") {
        return get(CodeKind::kSteane7);
    }
    if (name == "bitflip3") {
        return get(CodeKind::kBitflip3);
    }
    if (name == "unencoded1") {
        return get(CodeKind::kUnencoded1);
    }
    throw std::invalid_argument("unknown code '" + std::string(name) + "' (steane7, bitflip3, unencoded1)");
}

int CodeSpec::bit_correction(uint32_t syndrome) const {
    return correction(bit_checks_, n_, syndrome);
}

int CodeSpec::phase_correction(uint32_t syndrome) const {
    return correction(phase_checks_, n_, syndrome);
}

StateVector encode(const CodeSpec &code, const StateVector &logical) {
    if (logical.num_qubits() != 1) {
        throw std::invalid_argument("encode expects a single-qubit state");
    }
    std::vector<amp> a(code.logical_zero().size());
    for (size_t i = 0; i < a.size(); i++) {
        a[i] = logical[0] * code.logical_zero()[i] + logical[1] * code.logical_one()[i];
    }
    return StateVector::from_amplitudes(std::move(a));
}

Circuit encoder(const CodeSpec &code) {
    Circuit c(code.n());
    switch (code.kind()) {
        case CodeKind::kUnencoded1:
            break;
        case CodeKind::kBitflip3:
            c.append(Gate::CNOT(), {0, 1});
            c.append(Gate::CNOT(), {0, 2});
            break;
        case CodeKind::kSteane7:
            // The input spreads onto the odd codeword 0010110, then each check row is added in
            // superposition from its pivot (the one position no other row uses).
            c.append(Gate::CNOT(), {2, 4});
            c.append(Gate::CNOT(), {2, 5});
            for (uint32_t pivot : {0u, 1u, 3u}) {
                c.append(Gate::H(), {pivot});
            }
            for (const auto &[pivot, rest] : std::vector<std::pair<uint32_t, std::vector<uint32_t>>>{
                     {0, {2, 4, 6}}, {1, {2, 5, 6}}, {3, {4, 5, 6}}}) {
                for (uint32_t q : rest) {
                    c.append(Gate::CNOT(), {pivot, q});
                }
            }
            break;
    }
    return c;
}

Circuit transversal(const CodeSpec &code, std::string_view gate) {
    unsigned n = code.n();
    bool bare = code.kind() == CodeKind::kUnencoded1;
    bool steane = code.kind() == CodeKind::kSteane7;
    if (gate == "X" || gate == "Z") {
        return bitwise(n, Gate::pauli(gate[0]));
    }
    if (gate == "CNOT" || gate == "CX") {
        return bitwise(n, Gate::CNOT(), 2);
    }
    if (gate == "CZ") {
        return bitwise(n, Gate::CZ(), 2);
    }
    if (gate == "H" && (bare || steane)) {
        return bitwise(n, Gate::H());
    }
    if (gate == "S") {
        if (bare) {
            return bitwise(n, Gate::S());
        }
        // Bitwise S acts as S^dagger on odd-weight codewords; bitwise Z fixes the sign.
        Circuit c = bitwise(n, Gate::S());
        for (uint32_t q = 0; q < n; q++) {
            c.add(1, Gate::Z(), {q});
        }
        return c;
    }
    if (gate == "SDG") {
        return bitwise(n, bare ? Gate::Sdg() : Gate::S());
    }
    throw std::invalid_argument("no transversal " + std::string(gate) + " for " + code.name());
}

Circuit logical_gate(const CodeSpec &code, std::string_view gate) {
    try {
        return transversal(code, gate);
    } catch (const std::invalid_argument &) {
    }
    Gate g = Gate::from_name(gate);
    if (g.arity() != 1) {
        throw std::invalid_argument("no logical " + std::string(gate) + " for " + code.name());
    }
    Circuit enc = encoder(code);
    Circuit c = inverse(enc);
    c.append(g, {code.encoder_input()});
    for (const auto &s : enc.steps()) {
        c.append(s.op, s.targets);
    }
    return c;
}

void apply_pauli_string(StateVector &state, std::string_view paulis, unsigned offset) {
    for (size_t i = 0; i < paulis.size(); i++) {
        if (paulis[i] != 'I') {
            state.apply_pauli(paulis[i], offset + static_cast<unsigned>(i));
        }
    }
}

HammingResult hamming_decode(std::span<const uint8_t, 7> bits) {
    HammingResult r{};
    unsigned s = 0;
    for (unsigned i = 0; i < 7; i++) {
        r.corrected[i] = bits[i] & 1;
        if (r.corrected[i]) {
            s ^= i + 1;
        }
    }
    r.syndrome = s;
    if (s != 0) {
        r.corrected[s - 1] ^= 1;
    }
    return r;
}

uint8_t majority(std::span<const uint8_t> bits) {
    if (bits.size() % 2 == 0) {
        throw std::invalid_argument("majority needs an odd number of bits");
    }
    size_t ones = 0;
    for (uint8_t b : bits) {
        ones += b & 1;
    }
    return 2 * ones > bits.size() ? 1 : 0;
}

Circuit prepare_cat(unsigned n) {
    if (n < 1) {
        throw std::invalid_argument("cat state needs at least one qubit");
    }
    Circuit c(n);
    c.append(Gate::H(), {0});
    for (uint32_t q = 1; q < n; q++) {
        c.append(Gate::CNOT(), {q - 1, q});
    }
    return c;
}

StateVector cat_state(unsigned n) {
    return superposition(n, {0, (uint64_t{1} << n) - 1});
}

}  // namespace ensq
