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

#ifndef ENSQ_GADGETS_H
#define ENSQ_GADGETS_H

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ensq/circuit.h"
#include "ensq/codes.h"
#include "ensq/noise.h"
#include "ensq/runner.h"

namespace ensq {

/// How gadget circuits are executed.
///   kCoherent: no deferred measurement; only discarded qubits are traced out.
///   kDeferredExact: qubits used only as controls are measured early, all outcomes kept.
///   kDeferredSampling: as above but one outcome per run is followed; allows external blocks
///   that do not fit under the qubit cap.
enum class ExecMode { kCoherent, kDeferredExact, kDeferredSampling };
const char *exec_mode_name(ExecMode mode);
RunConfig exec_config(ExecMode mode);

/// The copy rule on labels: logical value l, classical register value c -> (l, c xor l).
std::pair<int, int> n_gate_contract(int logical, int classical);

struct N1Layout {
    std::vector<uint32_t> block;
    std::vector<uint32_t> syndromes;
    uint32_t target = 0;
};

/// One copy of a block's logical bit onto a fresh target bit, protected by the code's bit checks.
N1Layout append_n1(CircuitBuilder &b, const CodeSpec &code, std::span<const uint32_t> block);

/// Standalone single copy: block on qubits 0..n-1, syndrome bits next, the target last.
/// Only for steane7 and bitflip3.
Circuit build_n1(const CodeSpec &code);

/// n_rep independent copies with fresh syndrome bits. Syndrome qubits are appended to `ancillas`.
ClassicalRegister append_n_full(CircuitBuilder &b, const CodeSpec &code, std::span<const uint32_t> block,
                                unsigned n_rep, std::vector<uint32_t> *ancillas = nullptr);

/// Fresh bit holding the majority of the register.
uint32_t append_majority_bit(CircuitBuilder &b, const ClassicalRegister &reg);

/// A gate on some of the l logical operands, applied at every block position.
struct LocalFactor {
    Gate gate;
    std::vector<unsigned> operands;
};

/// Per-position operation u (product of factors) whose bitwise power has eigenvalues +1 on
/// the wanted state and -1 on its partner; `flip` swaps the two.
struct EigenSpec {
    std::string name;
    unsigned l = 1;
    std::vector<LocalFactor> u;
    std::vector<LocalFactor> flip;
};

/// u = e^{i pi/(4n)} X Z s with s = S or S^dagger chosen so that bitwise u is the logical
/// e^{i pi/4} X Z S of the code.
EigenSpec psi0_spec(const CodeSpec &code);
/// u = CZ (x) Z, flip = I (x) I (x) X.
EigenSpec and_spec();

/// Applies the factors bitwise to l blocks of the code (block j on qubits j*n .. j*n+n-1).
StateVector apply_bitwise(const CodeSpec &code, const std::vector<LocalFactor> &factors, unsigned l,
                          StateVector state);

/// Throws std::invalid_argument unless bitwise u fixes phi0, negates phi1, and flip maps phi0 to
/// phi1 up to a phase (tolerance tol on each overlap).
void check_eigenpair(const CodeSpec &code, const EigenSpec &spec, const StateVector &phi0, const StateVector &phi1,
                     double tol = 1e-9);

/// Repeated cat-state parity rounds followed by the majority-controlled flip, on l blocks.
void append_eigenvector_prep(CircuitBuilder &b, const CodeSpec &code, const EigenSpec &spec,
                             const std::vector<std::vector<uint32_t>> &blocks, unsigned n_rep,
                             std::vector<uint32_t> *ancillas = nullptr);

/// (|0>_L + sign e^{i pi/4}|1>_L)/sqrt(2).
StateVector psi_state(const CodeSpec &code, int sign = 1);
/// |AND> (bar = false) or its partner with the last label flipped, over three blocks.
StateVector and_state(const CodeSpec &code, bool bar = false);
/// Encodes a k-qubit logical state block by block.
StateVector encode_blocks(const CodeSpec &code, const StateVector &logical);

/// A gadget circuit with its qubit roles.
struct GadgetCircuit {
    std::string name;
    CodeKind code = CodeKind::kUnencoded1;
    unsigned n_rep = 1;
    Circuit circuit;
    /// Blocks whose initial state is supplied by the caller.
    std::vector<std::vector<uint32_t>> input_blocks;
    std::vector<uint32_t> data_qubits;
    std::vector<uint32_t> ancilla_qubits;
    std::vector<ClassicalRegister> registers;
    /// Also return the registers as quantum output (n_full only).
    bool keep_registers = false;

    std::vector<uint32_t> kept() const;
    std::vector<uint32_t> register_bits() const;
};

GadgetCircuit build_n_full(const CodeSpec &code, unsigned n_rep);
GadgetCircuit build_eigenvector(const CodeSpec &code, const EigenSpec &spec, unsigned n_rep);
GadgetCircuit build_psi0(const CodeSpec &code, unsigned n_rep);
GadgetCircuit build_and_state(const CodeSpec &code, unsigned n_rep);
GadgetCircuit build_t_gadget(const CodeSpec &code, unsigned n_rep);
GadgetCircuit build_toffoli(const CodeSpec &code, unsigned n_rep);
GadgetCircuit build_recover(const CodeSpec &code, unsigned n_rep);

struct GadgetReport {
    std::string name;
    /// Kept qubits of the heaviest branch.
    StateVector output_state;
    std::vector<uint32_t> data_qubits;
    std::vector<uint32_t> ancilla_qubits;
    std::vector<ClassicalRegister> classical_registers;
    RunResult result;

    /// Weighted fidelity of the kept mixture with a pure target.
    double fidelity(const StateVector &target) const;
    /// Purity of the kept mixture.
    double purity() const;
};

/// Runs a gadget. `inputs` holds one state per input block, or a single state over all input
/// blocks in order.
GadgetReport run_gadget(const GadgetCircuit &g, const std::vector<StateVector> &inputs, ExecMode mode,
                        const FaultPattern &faults = {}, uint64_t seed = 0);

GadgetReport n_full(const CodeSpec &code, const StateVector &block, unsigned n_rep,
                    ExecMode mode = ExecMode::kCoherent);
GadgetReport prepare_eigenvector(const CodeSpec &code, const EigenSpec &spec, const StateVector &start,
                                 unsigned n_rep, ExecMode mode = ExecMode::kCoherent);
GadgetReport prepare_psi0(const CodeSpec &code, ExecMode mode = ExecMode::kCoherent);
GadgetReport prepare_and_state(const CodeSpec &code, ExecMode mode = ExecMode::kCoherent);
GadgetReport t_gadget(const CodeSpec &code, const StateVector &data, ExecMode mode = ExecMode::kCoherent);
GadgetReport toffoli_gadget(const CodeSpec &code, const std::vector<StateVector> &inputs,
                            ExecMode mode = ExecMode::kCoherent, uint64_t seed = 0);
GadgetReport recover(const CodeSpec &code, const StateVector &data, ExecMode mode = ExecMode::kCoherent);

/// Result of checking many fault patterns against n_full's classical output.
struct SweepSummary {
    size_t cases = 0;
    size_t failures = 0;
    double worst_failure_weight = 0;
    std::vector<FaultPattern> failing;
};

/// Every single (location, Pauli) fault of n_full, for logical inputs |0>_L and |1>_L. A case
/// fails when the majority of the register differs from the input with weight > 1e-12.
SweepSummary n_full_single_fault_sweep(const CodeSpec &code, unsigned n_rep, bool x_only, unsigned workers = 0);

struct RateEstimate {
    double p = 0;
    uint64_t failures = 0;
    uint64_t trials = 0;
    double rate = 0;
    double stderr_ = 0;
};

/// Monte-Carlo failure rate of n_full at i.i.d. fault rate model.p(). Trial i uses input
/// |i mod 2>_L and seed derive_seed(seed, i); the result does not depend on `workers`.
RateEstimate n_full_failure_rate(const CodeSpec &code, unsigned n_rep, const NoiseModel &model, uint64_t trials,
                                 uint64_t seed, unsigned workers = 0);

}  // namespace ensq

#endif
