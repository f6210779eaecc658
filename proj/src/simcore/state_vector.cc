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

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <sstream>

#include "ensq/kernels.h"

namespace ensq {

namespace {

std::atomic<unsigned> g_cap{kDefaultQubitCap};

void check_cap(unsigned n, const char *what) {
    if (n > qubit_cap()) {
        throw CapacityError(n, qubit_cap(), what);
    }
}

}  // namespace

unsigned qubit_cap() {
    return g_cap.load(std::memory_order_relaxed);
}

void set_qubit_cap(unsigned cap) {
    if (cap == 0 || cap > 34) {
        throw std::invalid_argument("qubit cap must be in 1..34");
    }
    g_cap.store(cap, std::memory_order_relaxed);
}

CapacityError::CapacityError(unsigned requested, unsigned cap, const std::string &context)
    : std::runtime_error("register of " + std::to_string(requested) + " qubits exceeds the cap of " +
                         std::to_string(cap) + (context.empty() ? "" : " (" + context + ")")),
      requested_(requested),
      cap_(cap) {
}

StateVector::StateVector(unsigned num_qubits) : n_(num_qubits) {
    check_cap(num_qubits, "state vector");
    amps_.assign(size_t{1} << num_qubits, amp{0.0});
    amps_[0] = 1.0;
}

StateVector StateVector::basis(unsigned num_qubits, uint64_t index) {
    StateVector s(num_qubits);
    if (index >= s.size()) {
        throw std::out_of_range("basis index out of range");
    }
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

StateVector StateVector::from_bits(std::string_view bits) {
    uint64_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("bit string may only contain '0' and '1'");
        }
        index = (index << 1) | static_cast<uint64_t>(c == '1');
    }
    return basis(static_cast<unsigned>(bits.size()), index);
}

StateVector StateVector::from_amplitudes(std::vector<amp> amplitudes, double tol) {
    size_t size = amplitudes.size();
    if (size == 0 || (size & (size - 1)) != 0) {
        throw std::invalid_argument("amplitude count must be a power of two");
    }
    unsigned n = static_cast<unsigned>(std::countr_zero(size));
    StateVector s(n);
    s.amps_ = std::move(amplitudes);
    if (std::abs(s.norm_sq() - 1.0) > tol) {
        throw std::invalid_argument("amplitudes are not normalized");
    }
    return s;
}

StateVector StateVector::single(amp alpha, amp beta) {
    return from_amplitudes({alpha, beta});
}

void StateVector::check_qubits(std::span<const unsigned> qubits, unsigned arity) const {
    if (qubits.size() != arity) {
        throw std::invalid_argument("operation of arity " + std::to_string(arity) + " given " +
                                    std::to_string(qubits.size()) + " qubits");
    }
    for (size_t i = 0; i < qubits.size(); i++) {
        if (qubits[i] >= n_) {
            throw std::out_of_range("qubit " + std::to_string(qubits[i]) + " out of range for " + std::to_string(n_) +
                                    "-qubit register");
        }
        for (size_t j = 0; j < i; j++) {
            if (qubits[i] == qubits[j]) {
                throw std::invalid_argument("repeated qubit " + std::to_string(qubits[i]) + " in one operation");
            }
        }
    }
}

void StateVector::apply(const Gate &gate, std::span<const unsigned> qubits) {
    check_qubits(qubits, gate.arity());
    const GatePlan &plan = gate.plan();
    if (plan.kind == GatePlan::Kind::kIdentity) {
        return;
    }
    uint64_t controls = 0;
    for (unsigned c : plan.control_operands) {
        controls |= uint64_t{1} << bit_of(qubits[c]);
    }
    const auto &k = kernels::active();
    std::span<amp> a(amps_);
    switch (plan.kind) {
        case GatePlan::Kind::kDiag1:
            k.apply_diag_1q(a, bit_of(qubits[plan.base_operands[0]]), controls, plan.base[0], plan.base[3]);
            break;
        case GatePlan::Kind::kX1:
            kernels::apply_x(a, bit_of(qubits[plan.base_operands[0]]), controls);
            break;
        case GatePlan::Kind::kGeneral1:
            k.apply_1q(a, bit_of(qubits[plan.base_operands[0]]), controls,
                       {plan.base[0], plan.base[1], plan.base[2], plan.base[3]});
            break;
        case GatePlan::Kind::kDense: {
            std::vector<unsigned> bits;
            for (unsigned b : plan.base_operands) {
                bits.push_back(bit_of(qubits[b]));
            }
            kernels::apply_kq(a, bits, controls, plan.base);
            break;
        }
        case GatePlan::Kind::kIdentity:
            break;
    }
}

void StateVector::apply(const Oracle &oracle, std::span<const unsigned> qubits) {
    check_qubits(qubits, oracle.arity());
    unsigned k = oracle.arity();
    uint64_t tmask = 0;
    std::vector<unsigned> bits(k);
    for (unsigned j = 0; j < k; j++) {
        bits[j] = bit_of(qubits[j]);
        tmask |= uint64_t{1} << bits[j];
    }
    auto gather = [&](uint64_t i) {
        uint32_t v = 0;
        for (unsigned j = 0; j < k; j++) {
            v = (v << 1) | static_cast<uint32_t>((i >> bits[j]) & 1);
        }
        return v;
    };
    auto scatter = [&](uint64_t base, uint32_t v) {
        for (unsigned j = 0; j < k; j++) {
            if ((v >> (k - 1 - j)) & 1) {
                base |= uint64_t{1} << bits[j];
            }
        }
        return base;
    };
    std::vector<amp> out(amps_.size());
    for (uint64_t i = 0; i < amps_.size(); i++) {
        out[scatter(i & ~tmask, oracle(gather(i)))] = amps_[i];
    }
    amps_.swap(out);
}

void StateVector::apply(const Op &op, std::span<const unsigned> qubits) {
    std::visit([&](const auto &o) { apply(o, qubits); }, op);
}

void StateVector::apply_pauli(char pauli, unsigned qubit) {
    if (pauli == 'I') {
        return;
    }
    unsigned q[1] = {qubit};
    apply(Gate::pauli(pauli), q);
}

double StateVector::norm_sq() const {
    return kernels::active().norm_sq(amps_);
}

void StateVector::normalize() {
    double s = std::sqrt(norm_sq());
    if (s == 0) {
        throw std::runtime_error("cannot normalize the zero vector");
    }
    for (auto &a : amps_) {
        a /= s;
    }
}

double StateVector::prob_one(unsigned qubit) const {
    if (qubit >= n_) {
        throw std::out_of_range("qubit out of range");
    }
    return kernels::active().prob_one(amps_, bit_of(qubit));
}

double StateVector::collapse_remove(unsigned qubit, unsigned value) {
    if (qubit >= n_) {
        throw std::out_of_range("qubit out of range");
    }
    unsigned b = bit_of(qubit);
    uint64_t low_mask = (uint64_t{1} << b) - 1;
    std::vector<amp> out(amps_.size() / 2);
    double p = 0;
    for (uint64_t r = 0; r < out.size(); r++) {
        uint64_t i = ((r & ~low_mask) << 1) | (uint64_t{value & 1} << b) | (r & low_mask);
        out[r] = amps_[i];
        p += std::norm(out[r]);
    }
    if (p > 0) {
        double s = 1.0 / std::sqrt(p);
        for (auto &a : out) {
            a *= s;
        }
    }
    amps_.swap(out);
    n_ -= 1;
    return p;
}

void StateVector::append_qubit(unsigned value) {
    check_cap(n_ + 1, "adding a qubit");
    std::vector<amp> out(amps_.size() * 2, amp{0.0});
    for (uint64_t i = 0; i < amps_.size(); i++) {
        out[2 * i + (value & 1)] = amps_[i];
    }
    amps_.swap(out);
    n_ += 1;
}

StateVector StateVector::permuted(std::span<const unsigned> perm) const {
    if (perm.size() != n_) {
        throw std::invalid_argument("permutation size mismatch");
    }
    StateVector out(n_);
    for (uint64_t i = 0; i < amps_.size(); i++) {
        uint64_t j = 0;
        for (unsigned q = 0; q < n_; q++) {
            if ((i >> bit_of(perm[q])) & 1) {
                j |= uint64_t{1} << out.bit_of(q);
            }
        }
        out.amps_[j] = amps_[i];
    }
    return out;
}

StateVector StateVector::tensor(const StateVector &other) const {
    check_cap(n_ + other.n_, "tensor product");
    StateVector out(n_ + other.n_);
    size_t m = other.size();
    for (uint64_t i = 0; i < amps_.size(); i++) {
        for (uint64_t j = 0; j < m; j++) {
            out.amps_[i * m + j] = amps_[i] * other.amps_[j];
        }
    }
    return out;
}

std::string StateVector::to_string(double tol) const {
    std::ostringstream ss;
    ss.precision(6);
    bool first = true;
    for (uint64_t i = 0; i < amps_.size(); i++) {
        if (std::abs(amps_[i]) <= tol) {
            continue;
        }
        if (!first) {
            ss << " + ";
        }
        first = false;
        ss << "(" << amps_[i].real() << (amps_[i].imag() < 0 ? "" : "+") << amps_[i].imag() << "i)|";
        for (unsigned q = 0; q < n_; q++) {
            ss << ((i >> bit_of(q)) & 1);
        }
        ss << ">";
    }
    return ss.str();
}

StateVector apply_gate(StateVector state, const Gate &gate, std::span<const unsigned> qubits) {
    state.apply(gate, qubits);
    return state;
}

double expectation_z(const StateVector &state, unsigned qubit) {
    if (qubit >= state.num_qubits()) {
        throw std::out_of_range("qubit out of range");
    }
    // Pairwise differences: an unbiased qubit gives exactly 0.
    uint64_t stride = uint64_t{1} << state.bit_of(qubit);
    const auto &a = state.amplitudes();
    double s = 0;
    for (uint64_t base = 0; base < a.size(); base += 2 * stride) {
        for (uint64_t i = base; i < base + stride; i++) {
            s += std::norm(a[i]) - std::norm(a[i + stride]);
        }
    }
    return s;
}

amp inner(const StateVector &a, const StateVector &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw std::invalid_argument("inner product of states with different qubit counts");
    }
    amp s = 0;
    for (size_t i = 0; i < a.size(); i++) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

double fidelity(const StateVector &a, const StateVector &b) {
    return std::norm(inner(a, b));
}

std::vector<amp> reduced_density_matrix(const StateVector &state, std::span<const unsigned> qubits) {
    unsigned k = static_cast<unsigned>(qubits.size());
    if (k > 12) {
        throw std::invalid_argument("reduced density matrix limited to 12 qubits");
    }
    size_t d = size_t{1} << k;
    std::vector<uint64_t> offsets(d, 0);
    uint64_t tmask = 0;
    for (unsigned j = 0; j < k; j++) {
        if (qubits[j] >= state.num_qubits()) {
            throw std::out_of_range("qubit out of range");
        }
        uint64_t bit = uint64_t{1} << state.bit_of(qubits[j]);
        if (tmask & bit) {
            throw std::invalid_argument("repeated qubit");
        }
        tmask |= bit;
        for (size_t r = 0; r < d; r++) {
            if ((r >> (k - 1 - j)) & 1) {
                offsets[r] |= bit;
            }
        }
    }
    std::vector<amp> rho(d * d, amp{0.0});
    std::vector<amp> v(d);
    const auto &a = state.amplitudes();
    for (uint64_t base = 0; base < a.size(); base++) {
        if (base & tmask) {
            continue;
        }
        bool any = false;
        for (size_t r = 0; r < d; r++) {
            v[r] = a[base | offsets[r]];
            any |= v[r] != amp{0.0};
        }
        if (!any) {
            continue;
        }
        for (size_t r = 0; r < d; r++) {
            if (v[r] == amp{0.0}) {
                continue;
            }
            for (size_t c = 0; c < d; c++) {
                rho[r * d + c] += v[r] * std::conj(v[c]);
            }
        }
    }
    return rho;
}

double purity(const std::vector<amp> &rho) {
    double s = 0;
    for (const auto &x : rho) {
        s += std::norm(x);
    }
    return s;
}

double subsystem_purity(const StateVector &state, std::span<const unsigned> qubits) {
    return purity(reduced_density_matrix(state, qubits));
}

double subsystem_fidelity(const StateVector &state, std::span<const unsigned> qubits, const StateVector &target) {
    if (target.num_qubits() != qubits.size()) {
        throw std::invalid_argument("target size does not match subsystem");
    }
    auto rho = reduced_density_matrix(state, qubits);
    size_t d = target.size();
    amp s = 0;
    for (size_t r = 0; r < d; r++) {
        for (size_t c = 0; c < d; c++) {
            s += std::conj(target[r]) * rho[r * d + c] * target[c];
        }
    }
    return s.real();
}

double trace_distance(const std::vector<amp> &rho, const std::vector<amp> &sigma) {
    if (rho.size() != sigma.size()) {
        throw std::invalid_argument("density matrices differ in size");
    }
    size_t d = static_cast<size_t>(std::llround(std::sqrt(static_cast<double>(rho.size()))));
    Eigen::MatrixXcd m(d, d);
    for (size_t r = 0; r < d; r++) {
        for (size_t c = 0; c < d; c++) {
            m(r, c) = rho[r * d + c] - sigma[r * d + c];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace ensq
