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

#include "ensq/gate.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ensq {

namespace {

const amp kI{0.0, 1.0};

std::vector<amp> restrict_matrix(const std::vector<amp> &m, unsigned arity, unsigned operand, unsigned value) {
    size_t rd = size_t{1} << (arity - 1);
    size_t fd = size_t{1} << arity;
    std::vector<amp> out(rd * rd);
    for (uint32_t r = 0; r < rd; r++) {
        for (uint32_t c = 0; c < rd; c++) {
            uint32_t fr = insert_operand_bit(r, arity, operand, value);
            uint32_t fc = insert_operand_bit(c, arity, operand, value);
            out[r * rd + c] = m[fr * fd + fc];
        }
    }
    return out;
}

bool matrix_diag_in(const std::vector<amp> &m, unsigned arity, unsigned operand, double tol) {
    size_t d = size_t{1} << arity;
    uint32_t bit = uint32_t{1} << (arity - 1 - operand);
    for (size_t r = 0; r < d; r++) {
        for (size_t c = 0; c < d; c++) {
            if (((r ^ c) & bit) && std::abs(m[r * d + c]) > tol) {
                return false;
            }
        }
    }
    return true;
}

bool matrix_is_identity(const std::vector<amp> &m, size_t d, double tol) {
    for (size_t r = 0; r < d; r++) {
        for (size_t c = 0; c < d; c++) {
            amp want = r == c ? amp{1.0} : amp{0.0};
            if (std::abs(m[r * d + c] - want) > tol) {
                return false;
            }
        }
    }
    return true;
}

GatePlan make_plan(const std::vector<amp> &matrix, unsigned arity) {
    constexpr double tol = 1e-12;
    GatePlan plan;
    if (matrix_is_identity(matrix, size_t{1} << arity, tol)) {
        return plan;
    }
    std::vector<unsigned> remaining(arity);
    for (unsigned j = 0; j < arity; j++) {
        remaining[j] = j;
    }
    std::vector<amp> cur = matrix;
    bool progress = true;
    while (progress && remaining.size() > 1) {
        progress = false;
        unsigned k = static_cast<unsigned>(remaining.size());
        for (unsigned j = 0; j < k; j++) {
            if (!matrix_diag_in(cur, k, j, tol)) {
                continue;
            }
            auto zero_block = restrict_matrix(cur, k, j, 0);
            if (!matrix_is_identity(zero_block, size_t{1} << (k - 1), tol)) {
                continue;
            }
            plan.control_operands.push_back(remaining[j]);
            cur = restrict_matrix(cur, k, j, 1);
            remaining.erase(remaining.begin() + j);
            progress = true;
            break;
        }
    }
    plan.base_operands = remaining;
    plan.base = cur;
    if (remaining.size() == 1) {
        if (std::abs(cur[1]) <= tol && std::abs(cur[2]) <= tol) {
            plan.kind = GatePlan::Kind::kDiag1;
        } else if (std::abs(cur[0]) <= tol && std::abs(cur[3]) <= tol && std::abs(cur[1] - 1.0) <= tol &&
                   std::abs(cur[2] - 1.0) <= tol) {
            plan.kind = GatePlan::Kind::kX1;
        } else {
            plan.kind = GatePlan::Kind::kGeneral1;
        }
    } else {
        plan.kind = GatePlan::Kind::kDense;
    }
    return plan;
}

std::string with_param(const char *name, double theta) {
    std::ostringstream ss;
    ss.precision(17);
    ss << name << "(" << theta << ")";
    return ss.str();
}

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto &c : out) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

}  // namespace

uint32_t insert_operand_bit(uint32_t reduced, unsigned arity, unsigned operand, unsigned value) {
    unsigned pos = arity - 1 - operand;
    uint32_t low = reduced & ((uint32_t{1} << pos) - 1);
    uint32_t high = reduced >> pos;
    return (high << (pos + 1)) | (uint32_t{value & 1} << pos) | low;
}

uint32_t remove_operand_bit(uint32_t full, unsigned arity, unsigned operand) {
    unsigned pos = arity - 1 - operand;
    uint32_t low = full & ((uint32_t{1} << pos) - 1);
    uint32_t high = full >> (pos + 1);
    return (high << pos) | low;
}

Gate::Gate(std::string name, unsigned arity, std::vector<amp> matrix, double tol)
    : name_(std::move(name)), arity_(arity), matrix_(std::move(matrix)) {
    if (arity_ == 0 || arity_ > kMaxGateArity) {
        throw std::invalid_argument("gate '" + name_ + "' has arity " + std::to_string(arity_) + " (supported: 1..3)");
    }
    size_t d = dim();
    if (matrix_.size() != d * d) {
        throw std::invalid_argument("gate '" + name_ + "' matrix size does not match arity");
    }
    for (size_t r = 0; r < d; r++) {
        for (size_t c = 0; c < d; c++) {
            amp s = 0;
            for (size_t k = 0; k < d; k++) {
                s += std::conj(matrix_[k * d + r]) * matrix_[k * d + c];
            }
            amp want = r == c ? amp{1.0} : amp{0.0};
            if (std::abs(s - want) > tol) {
                throw std::invalid_argument("gate '" + name_ + "' is not unitary");
            }
        }
    }
    plan_ = make_plan(matrix_, arity_);
}

Gate Gate::I() {
    return Gate("I", 1, {1, 0, 0, 1});
}
Gate Gate::X() {
    return Gate("X", 1, {0, 1, 1, 0});
}
Gate Gate::Y() {
    return Gate("Y", 1, {0, -kI, kI, 0});
}
Gate Gate::Z() {
    return Gate("Z", 1, {1, 0, 0, -1});
}
Gate Gate::H() {
    double s = std::numbers::sqrt2 / 2;
    return Gate("H", 1, {s, s, s, -s});
}
Gate Gate::S() {
    return Gate("S", 1, {1, 0, 0, kI});
}
Gate Gate::Sdg() {
    return Gate("SDG", 1, {1, 0, 0, -kI});
}
Gate Gate::T() {
    return Gate("T", 1, {1, 0, 0, std::polar(1.0, std::numbers::pi / 4)});
}
Gate Gate::Tdg() {
    return Gate("TDG", 1, {1, 0, 0, std::polar(1.0, -std::numbers::pi / 4)});
}
Gate Gate::RX(double theta) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return Gate(with_param("RX", theta), 1, {c, -kI * s, -kI * s, c});
}
Gate Gate::RY(double theta) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return Gate(with_param("RY", theta), 1, {c, -s, s, c});
}
Gate Gate::RZ(double theta) {
    return Gate(with_param("RZ", theta), 1, {std::polar(1.0, -theta / 2), 0, 0, std::polar(1.0, theta / 2)});
}
Gate Gate::Phase(double theta) {
    return Gate(with_param("P", theta), 1, {1, 0, 0, std::polar(1.0, theta)});
}
Gate Gate::CNOT() {
    return Gate("CNOT", 2, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
}
Gate Gate::CZ() {
    return Gate("CZ", 2, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1});
}
Gate Gate::CS() {
    return Gate("CS", 2, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, kI});
}
Gate Gate::CSdg() {
    return Gate("CSDG", 2, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -kI});
}
Gate Gate::SWAP() {
    return Gate("SWAP", 2, {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1});
}
Gate Gate::CPhase(double theta) {
    Gate g = controlled(Phase(theta));
    return Gate(with_param("CP", theta), 2, g.matrix());
}
Gate Gate::Toffoli() {
    Gate g = controlled(X(), 2);
    return Gate("TOFFOLI", 3, g.matrix());
}
Gate Gate::CCZ() {
    Gate g = controlled(Z(), 2);
    return Gate("CCZ", 3, g.matrix());
}
Gate Gate::Fredkin() {
    Gate g = controlled(SWAP(), 1);
    return Gate("FREDKIN", 3, g.matrix());
}

Gate Gate::pauli(char p) {
    switch (p) {
        case 'I':
            return I();
        case 'X':
            return X();
        case 'Y':
            return Y();
        case 'Z':
            return Z();
        default:
            throw std::invalid_argument(std::string("unknown Pauli '") + p + "'");
    }
}

Gate Gate::controlled(const Gate &base, unsigned num_controls) {
    unsigned k = base.arity() + num_controls;
    if (k > kMaxGateArity) {
        throw std::invalid_argument("controlled gate would exceed arity 3");
    }
    size_t d = size_t{1} << k;
    size_t bd = base.dim();
    std::vector<amp> m(d * d, 0.0);
    size_t offset = d - bd;
    for (size_t i = 0; i < offset; i++) {
        m[i * d + i] = 1.0;
    }
    for (size_t r = 0; r < bd; r++) {
        for (size_t c = 0; c < bd; c++) {
            m[(offset + r) * d + offset + c] = base.at(r, c);
        }
    }
    return Gate(std::string(num_controls, 'C') + base.name(), k, std::move(m));
}

Gate Gate::from_name(std::string_view name, std::optional<double> param) {
    std::string n = upper(name);
    auto need = [&]() {
        if (!param) {
            throw std::invalid_argument("gate " + n + " requires a parameter");
        }
        return *param;
    };
    auto none = [&]() {
        if (param) {
            throw std::invalid_argument("gate " + n + " takes no parameter");
        }
    };
    if (n == "RX") return RX(need());
    if (n == "RY") return RY(need());
    if (n == "RZ") return RZ(need());
    if (n == "P" || n == "PHASE") return Phase(need());
    if (n == "CP" || n == "CPHASE") return CPhase(need());
    none();
    if (n == "I") return I();
    if (n == "X") return X();
    if (n == "Y") return Y();
    if (n == "Z") return Z();
    if (n == "H") return H();
    if (n == "S") return S();
    if (n == "SDG") return Sdg();
    if (n == "T") return T();
    if (n == "TDG") return Tdg();
    if (n == "CNOT" || n == "CX") return CNOT();
    if (n == "CZ") return CZ();
    if (n == "CS") return CS();
    if (n == "CSDG") return CSdg();
    if (n == "SWAP") return SWAP();
    if (n == "TOFFOLI" || n == "CCX" || n == "CCNOT") return Toffoli();
    if (n == "CCZ") return CCZ();
    if (n == "FREDKIN" || n == "CSWAP") return Fredkin();
    throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
}

bool Gate::is_diagonal(double tol) const {
    for (unsigned j = 0; j < arity_; j++) {
        if (!is_diagonal_in(j, tol)) {
            return false;
        }
    }
    return true;
}

bool Gate::is_diagonal_in(unsigned operand, double tol) const {
    return matrix_diag_in(matrix_, arity_, operand, tol);
}

bool Gate::is_permutation(double tol) const {
    for (uint32_t c = 0; c < dim(); c++) {
        if (!classical_image(c, tol)) {
            return false;
        }
    }
    return true;
}

std::optional<uint32_t> Gate::classical_image(uint32_t input, double tol) const {
    std::optional<uint32_t> out;
    for (uint32_t r = 0; r < dim(); r++) {
        double a = std::abs(at(r, input));
        if (a <= tol) {
            continue;
        }
        if (out || std::abs(a - 1.0) > tol) {
            return std::nullopt;
        }
        out = r;
    }
    return out;
}

Gate Gate::restrict(unsigned operand, unsigned value) const {
    if (arity_ < 2) {
        throw std::invalid_argument("cannot restrict a single-qubit gate");
    }
    if (!is_diagonal_in(operand)) {
        throw std::invalid_argument("gate '" + name_ + "' is not diagonal in operand " + std::to_string(operand));
    }
    return Gate(name_ + "|" + std::to_string(operand) + "=" + std::to_string(value), arity_ - 1,
                restrict_matrix(matrix_, arity_, operand, value));
}

bool Gate::is_identity(double tol) const {
    return matrix_is_identity(matrix_, dim(), tol);
}

Gate Gate::adjoint() const {
    size_t d = dim();
    std::vector<amp> m(d * d);
    for (size_t r = 0; r < d; r++) {
        for (size_t c = 0; c < d; c++) {
            m[r * d + c] = std::conj(matrix_[c * d + r]);
        }
    }
    return Gate(name_ + "^", arity_, std::move(m));
}

bool Gate::approx_equal(const Gate &other, double tol) const {
    if (arity_ != other.arity_) {
        return false;
    }
    for (size_t i = 0; i < matrix_.size(); i++) {
        if (std::abs(matrix_[i] - other.matrix_[i]) > tol) {
            return false;
        }
    }
    return true;
}

Oracle::Oracle(std::string name, unsigned arity, std::vector<uint32_t> table)
    : name_(std::move(name)), arity_(arity), table_(std::move(table)) {
    if (arity_ == 0 || arity_ > 30) {
        throw std::invalid_argument("oracle '" + name_ + "' has unsupported arity");
    }
    if (table_.size() != (size_t{1} << arity_)) {
        throw std::invalid_argument("oracle '" + name_ + "' table size does not match arity");
    }
    std::vector<bool> seen(table_.size(), false);
    for (uint32_t v : table_) {
        if (v >= table_.size() || seen[v]) {
            throw std::invalid_argument("oracle '" + name_ + "' is not a permutation");
        }
        seen[v] = true;
    }
}

Oracle Oracle::from_function(std::string name, unsigned arity, const std::function<uint32_t(uint32_t)> &f) {
    std::vector<uint32_t> t(size_t{1} << arity);
    for (uint32_t i = 0; i < t.size(); i++) {
        t[i] = f(i);
    }
    return Oracle(std::move(name), arity, std::move(t));
}

bool Oracle::preserves(unsigned operand) const {
    uint32_t bit = uint32_t{1} << (arity_ - 1 - operand);
    for (uint32_t i = 0; i < table_.size(); i++) {
        if ((table_[i] ^ i) & bit) {
            return false;
        }
    }
    return true;
}

Oracle Oracle::restrict(unsigned operand, unsigned value) const {
    if (arity_ < 2 || !preserves(operand)) {
        throw std::invalid_argument("oracle '" + name_ + "' cannot be restricted on operand " + std::to_string(operand));
    }
    std::vector<uint32_t> t(size_t{1} << (arity_ - 1));
    for (uint32_t r = 0; r < t.size(); r++) {
        t[r] = remove_operand_bit(table_[insert_operand_bit(r, arity_, operand, value)], arity_, operand);
    }
    return Oracle(name_, arity_ - 1, std::move(t));
}

unsigned op_arity(const Op &op) {
    return std::visit([](const auto &o) { return o.arity(); }, op);
}

const std::string &op_name(const Op &op) {
    return std::visit([](const auto &o) -> const std::string & { return o.name(); }, op);
}

bool op_diagonal_in(const Op &op, unsigned operand) {
    if (auto g = std::get_if<Gate>(&op)) {
        return g->is_diagonal_in(operand);
    }
    return std::get<Oracle>(op).preserves(operand);
}

std::optional<uint32_t> op_classical_image(const Op &op, uint32_t input) {
    if (auto g = std::get_if<Gate>(&op)) {
        return g->classical_image(input);
    }
    return std::get<Oracle>(op)(input);
}

Op op_restrict(const Op &op, unsigned operand, unsigned value) {
    if (auto g = std::get_if<Gate>(&op)) {
        return g->restrict(operand, value);
    }
    return std::get<Oracle>(op).restrict(operand, value);
}

bool op_is_identity(const Op &op) {
    if (auto g = std::get_if<Gate>(&op)) {
        return g->is_identity();
    }
    const auto &t = std::get<Oracle>(op).table();
    for (uint32_t i = 0; i < t.size(); i++) {
        if (t[i] != i) {
            return false;
        }
    }
    return true;
}

}  // namespace ensq
