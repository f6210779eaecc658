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

#ifndef ENSQ_GATE_H
#define ENSQ_GATE_H

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ensq {

using amp = std::complex<double>;

inline constexpr unsigned kMaxGateArity = 3;

/// How a gate is dispatched to the kernels. Control operands are found by inspecting the matrix.
struct GatePlan {
    enum class Kind { kIdentity, kDiag1, kX1, kGeneral1, kDense };
    Kind kind = Kind::kIdentity;
    std::vector<unsigned> control_operands;
    std::vector<unsigned> base_operands;
    std::vector<amp> base;  // row-major, 2^|base_operands| square
};

/// Dense unitary on up to three qubits. Operand 0 is the most significant bit of the matrix index.
class Gate {
   public:
    Gate(std::string name, unsigned arity, std::vector<amp> matrix, double tol = 1e-9);

    static Gate I();
    static Gate X();
    static Gate Y();
    static Gate Z();
    static Gate H();
    static Gate S();
    static Gate Sdg();
    static Gate T();
    static Gate Tdg();
    static Gate RX(double theta);
    static Gate RY(double theta);
    static Gate RZ(double theta);
    static Gate Phase(double theta);
    static Gate CNOT();
    static Gate CZ();
    static Gate CS();
    static Gate CSdg();
    static Gate SWAP();
    static Gate CPhase(double theta);
    static Gate Toffoli();
    static Gate CCZ();
    static Gate Fredkin();
    static Gate pauli(char p);

    /// Adds `num_controls` leading control operands to `base`.
    static Gate controlled(const Gate &base, unsigned num_controls = 1);
    /// Looks up a gate by its text name ("CNOT", "RY", ...). `param` is required for rotations.
    static Gate from_name(std::string_view name, std::optional<double> param = std::nullopt);

    const std::string &name() const {
        return name_;
    }
    unsigned arity() const {
        return arity_;
    }
    size_t dim() const {
        return size_t{1} << arity_;
    }
    const std::vector<amp> &matrix() const {
        return matrix_;
    }
    amp at(size_t row, size_t col) const {
        return matrix_[row * dim() + col];
    }
    const GatePlan &plan() const {
        return plan_;
    }

    bool is_diagonal(double tol = 1e-12) const;
    /// True when the gate never changes the computational value of `operand`.
    bool is_diagonal_in(unsigned operand, double tol = 1e-12) const;
    /// True when every column has a single unit-modulus entry.
    bool is_permutation(double tol = 1e-12) const;
    /// Output basis index for a basis input if the gate maps it to a single basis state.
    std::optional<uint32_t> classical_image(uint32_t input, double tol = 1e-12) const;
    /// Fixes a diagonal operand to a value, producing a gate on the remaining operands.
    Gate restrict(unsigned operand, unsigned value) const;
    bool is_identity(double tol = 1e-12) const;
    Gate adjoint() const;
    bool approx_equal(const Gate &other, double tol = 1e-12) const;

   private:
    std::string name_;
    unsigned arity_;
    std::vector<amp> matrix_;
    GatePlan plan_;
};

/// Reversible classical function on `arity` qubits given as a lookup table, applied as a permutation of basis states.
class Oracle {
   public:
    Oracle(std::string name, unsigned arity, std::vector<uint32_t> table);
    static Oracle from_function(std::string name, unsigned arity, const std::function<uint32_t(uint32_t)> &f);

    const std::string &name() const {
        return name_;
    }
    unsigned arity() const {
        return arity_;
    }
    const std::vector<uint32_t> &table() const {
        return table_;
    }
    uint32_t operator()(uint32_t input) const {
        return table_[input];
    }
    bool preserves(unsigned operand) const;
    Oracle restrict(unsigned operand, unsigned value) const;

   private:
    std::string name_;
    unsigned arity_;
    std::vector<uint32_t> table_;
};

using Op = std::variant<Gate, Oracle>;

unsigned op_arity(const Op &op);
const std::string &op_name(const Op &op);
bool op_diagonal_in(const Op &op, unsigned operand);
std::optional<uint32_t> op_classical_image(const Op &op, uint32_t input);
Op op_restrict(const Op &op, unsigned operand, unsigned value);
bool op_is_identity(const Op &op);

/// Inserts bit `value` at operand position `operand` of an arity-k index (operand 0 is the MSB).
uint32_t insert_operand_bit(uint32_t reduced, unsigned arity, unsigned operand, unsigned value);
/// Removes operand `operand` from an arity-k index.
uint32_t remove_operand_bit(uint32_t full, unsigned arity, unsigned operand);

}  // namespace ensq

#endif
