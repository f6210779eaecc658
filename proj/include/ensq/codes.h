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

#ifndef ENSQ_CODES_H
#define ENSQ_CODES_H

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ensq/circuit.h"
#include "ensq/state_vector.h"

namespace ensq {

enum class CodeKind { kSteane7, kBitflip3, kUnencoded1 };

/// A single-logical-qubit block code with its logical basis states stored explicitly.
class CodeSpec {
   public:
    static const CodeSpec &get(CodeKind kind);
    /// "steane7", "bitflip3" or "unencoded1"; throws std::invalid_argument otherwise.
    static const CodeSpec &by_name(std::string_view name);

    CodeKind kind() const {
        return kind_;
    }
    const std::string &name() const {
        return name_;
    }
    unsigned n() const {
        return n_;
    }
    unsigned k_correctable() const {
        return k_;
    }
    /// Length of the classical repetition register, 2k+1.
    unsigned default_n_rep() const {
        return 2 * k_ + 1;
    }
    const StateVector &logical_zero() const {
        return zero_;
    }
    const StateVector &logical_one() const {
        return one_;
    }
    /// Classical parity checks detecting bit flips, as lists of block positions.
    const std::vector<std::vector<uint32_t>> &bit_checks() const {
        return bit_checks_;
    }
    /// Parity checks detecting phase flips (checked in the Hadamard basis). Empty for bitflip3.
    const std::vector<std::vector<uint32_t>> &phase_checks() const {
        return phase_checks_;
    }
    /// Stabilizer generators as Pauli strings of length n.
    const std::vector<std::string> &stabilizers() const {
        return stabilizers_;
    }
    /// Block position receiving the logical input in encoder().
    uint32_t encoder_input() const {
        return encoder_input_;
    }
    /// Correction table: bit-check syndrome (check j is bit j) -> block position to flip, or -1.
    int bit_correction(uint32_t syndrome) const;
    int phase_correction(uint32_t syndrome) const;

   private:
    explicit CodeSpec(CodeKind kind);
    CodeKind kind_;
    std::string name_;
    unsigned n_;
    unsigned k_;
    StateVector zero_;
    StateVector one_;
    std::vector<std::vector<uint32_t>> bit_checks_;
    std::vector<std::vector<uint32_t>> phase_checks_;
    std::vector<std::string> stabilizers_;
    uint32_t encoder_input_ = 0;
};

/// alpha|0>_L + beta|1>_L for a single-qubit input alpha|0> + beta|1>.
StateVector encode(const CodeSpec &code, const StateVector &logical);

/// Unitary fragment on n qubits mapping the input on encoder_input() (others |0>) to the codeword.
Circuit encoder(const CodeSpec &code);

/// Bitwise logical gate. One block for H, S, X, Z; two blocks (first n qubits control) for CNOT, CZ.
/// Throws std::invalid_argument for pairs that are not logical gates of the code.
Circuit transversal(const CodeSpec &code, std::string_view gate);

/// Logical gate fragment: transversal() when available, otherwise decode, act, re-encode.
/// The fallback is not fault tolerant.
Circuit logical_gate(const CodeSpec &code, std::string_view gate);

/// Applies a Pauli string to the block starting at `offset`.
void apply_pauli_string(StateVector &state, std::string_view paulis, unsigned offset = 0);

struct HammingResult {
    std::array<uint8_t, 7> corrected;
    /// 1-based position of the flipped bit, 0 when none.
    unsigned syndrome;
};

/// Decodes a 7-bit word of the Hamming code whose check matrix has column i = binary(i).
HammingResult hamming_decode(std::span<const uint8_t, 7> bits);

/// Majority of an odd number of bits. Throws std::invalid_argument on even length.
uint8_t majority(std::span<const uint8_t> bits);

/// A repetition-coded classical bit held on `bits`.
struct ClassicalRegister {
    unsigned n_rep = 0;
    std::vector<uint32_t> bits;
};

/// H on qubit 0 followed by a CNOT chain: |0...0> -> (|0...0> + |1...1>)/sqrt(2).
Circuit prepare_cat(unsigned n);

StateVector cat_state(unsigned n);

}  // namespace ensq

#endif
