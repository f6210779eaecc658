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

#ifndef ENSQ_STATE_VECTOR_H
#define ENSQ_STATE_VECTOR_H

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ensq/gate.h"

namespace ensq {

inline constexpr unsigned kDefaultQubitCap = 24;

/// Process-wide cap on dense register size. The CLI exposes it as --max-qubits.
unsigned qubit_cap();
void set_qubit_cap(unsigned cap);

/// Raised when a register would exceed the configured qubit cap.
class CapacityError : public std::runtime_error {
   public:
    CapacityError(unsigned requested, unsigned cap, const std::string &context = "");
    unsigned requested() const {
        return requested_;
    }
    unsigned cap() const {
        return cap_;
    }

   private:
    unsigned requested_;
    unsigned cap_;
};

/// Dense 2^n amplitude vector. Qubit 0 is the most significant bit of the basis index.
class StateVector {
   public:
    explicit StateVector(unsigned num_qubits = 0);
    static StateVector basis(unsigned num_qubits, uint64_t index);
    /// "0110" style bit string, qubit 0 first.
    static StateVector from_bits(std::string_view bits);
    static StateVector from_amplitudes(std::vector<amp> amplitudes, double tol = 1e-9);
    static StateVector single(amp alpha, amp beta);

    unsigned num_qubits() const {
        return n_;
    }
    size_t size() const {
        return amps_.size();
    }
    const std::vector<amp> &amplitudes() const {
        return amps_;
    }
    std::vector<amp> &mutable_amplitudes() {
        return amps_;
    }
    amp operator[](size_t i) const {
        return amps_[i];
    }
    unsigned bit_of(unsigned qubit) const {
        return n_ - 1 - qubit;
    }

    void apply(const Gate &gate, std::span<const unsigned> qubits);
    void apply(const Oracle &oracle, std::span<const unsigned> qubits);
    void apply(const Op &op, std::span<const unsigned> qubits);
    void apply_pauli(char pauli, unsigned qubit);

    double norm_sq() const;
    void normalize();
    double prob_one(unsigned qubit) const;
    /// Projects `qubit` onto `value`, removes it and renormalizes. Returns the outcome probability.
    double collapse_remove(unsigned qubit, unsigned value);
    /// Appends a fresh qubit in state |value> as the new last qubit.
    void append_qubit(unsigned value);
    /// Reorders qubits: new qubit i is old qubit perm[i].
    StateVector permuted(std::span<const unsigned> perm) const;
    StateVector tensor(const StateVector &other) const;
    std::string to_string(double tol = 1e-12) const;

   private:
    void check_qubits(std::span<const unsigned> qubits, unsigned arity) const;
    unsigned n_;
    std::vector<amp> amps_;
};

StateVector apply_gate(StateVector state, const Gate &gate, std::span<const unsigned> qubits);
double expectation_z(const StateVector &state, unsigned qubit);
amp inner(const StateVector &a, const StateVector &b);
double fidelity(const StateVector &a, const StateVector &b);

/// Row-major 2^k x 2^k density matrix of `qubits` (in the given order), tracing out the rest.
std::vector<amp> reduced_density_matrix(const StateVector &state, std::span<const unsigned> qubits);
double purity(const std::vector<amp> &rho);
double subsystem_purity(const StateVector &state, std::span<const unsigned> qubits);
/// <target| rho_qubits |target>.
double subsystem_fidelity(const StateVector &state, std::span<const unsigned> qubits, const StateVector &target);
/// Trace distance between two density matrices of equal dimension (Hermitian eigen-solve).
double trace_distance(const std::vector<amp> &rho, const std::vector<amp> &sigma);

}  // namespace ensq

#endif
