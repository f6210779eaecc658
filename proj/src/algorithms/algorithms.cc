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

#include "ensq/algorithms.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "ensq/parallel.h"
#include "json.hpp"

namespace ensq {

namespace {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t n) {
    return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % n);
}

uint64_t powmod(uint64_t x, uint64_t e, uint64_t n) {
    uint64_t r = 1 % n;
    x %= n;
    while (e) {
        if (e & 1) {
            r = mulmod(r, x, n);
        }
        x = mulmod(x, x, n);
        e >>= 1;
    }
    return r;
}

uint64_t bits_to_value(std::span<const BitValue> bits, bool &ok) {
    uint64_t v = 0;
    ok = true;
    for (BitValue b : bits) {
        if (b == BitValue::kIndeterminate) {
            ok = false;
        }
        v = (v << 1) | (b == BitValue::kOne ? 1u : 0u);
    }
    return v;
}

// <Z> of each bit of v, MSB first.
void push_bits(std::vector<double> &row, uint64_t v, unsigned width) {
    for (unsigned b = 0; b < width; b++) {
        row.push_back((v >> (width - 1 - b)) & 1 ? -1.0 : 1.0);
    }
}

// Cumulative table for drawing from a fixed discrete distribution.
class Sampler {
   public:
    explicit Sampler(const std::vector<double> &p) : cdf_(p.size()) {
        std::partial_sum(p.begin(), p.end(), cdf_.begin());
    }
    uint64_t operator()(std::mt19937_64 &rng) const {
        double u = std::uniform_real_distribution<double>(0.0, cdf_.back())(rng);
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<uint64_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1));
    }

   private:
    std::vector<double> cdf_;
};

// Smallest-denominator fraction in the closed interval [a/b, c/d], 0 <= a/b <= c/d.
Fraction simplest_between(uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
    uint64_t fl = a / b;
    if (fl * b == a) {
        return {fl, 1};
    }
    if ((fl + 1) * d <= c) {
        return {fl + 1, 1};
    }
    Fraction y = simplest_between(d, c - fl * d, b, a - fl * b);
    return {fl * y.num + y.den, y.num};
}

}  // namespace

// ---- random bit and teleportation ----

Circuit rng_circuit(double p) {
    if (!(p >= 0 && p <= 1)) {
        throw std::invalid_argument("p must lie in [0, 1]");
    }
    Circuit c(1);
    c.append(Gate::RY(2 * std::acos(std::sqrt(p))), {0});
    return c;
}

EnsembleReadout rng_demo(double p) {
    return run_exact(rng_circuit(p));
}

Circuit teleport_circuit(bool coherent_correction) {
    CircuitBuilder b;
    auto q = b.allocate_block(3);
    b.add(Gate::H(), {q[1]});
    b.add(Gate::CNOT(), {q[1], q[2]});
    b.add(Gate::CNOT(), {q[0], q[1]});
    b.add(Gate::H(), {q[0]});
    if (coherent_correction) {
        b.add(Gate::CNOT(), {q[1], q[2]});
        b.add(Gate::CZ(), {q[0], q[2]});
    }
    return b.build();
}

namespace {

TeleportReport teleport(const StateVector &psi, bool coherent) {
    if (psi.num_qubits() != 1) {
        throw std::invalid_argument("teleport input must be one qubit");
    }
    Circuit c = teleport_circuit(coherent);
    TeleportReport rep;
    EnsembleOptions o;
    o.inputs = {{{0}, psi}};
    rep.readout = run_exact(c, o);
    RunConfig cfg;
    cfg.keep = {2};
    cfg.inputs = o.inputs;
    auto res = Executor(c, cfg).run();
    for (const auto &br : res.branches) {
        rep.receiver_fidelity += br.weight * fidelity(psi, br.state);
    }
    return rep;
}

}  // namespace

TeleportReport teleport_standard(const StateVector &psi) {
    return teleport(psi, false);
}

TeleportReport teleport_quantum(const StateVector &psi) {
    return teleport(psi, true);
}

// ---- order finding ----

uint64_t multiplicative_order(uint64_t x, uint64_t n) {
    if (n < 2 || std::gcd(x, n) != 1) {
        throw std::invalid_argument("x must be a unit mod n");
    }
    uint64_t r = 1;
    for (uint64_t v = x % n; v != 1; v = mulmod(v, x, n)) {
        r++;
    }
    return r;
}

ShorInstance ShorInstance::make(uint64_t n, uint64_t x) {
    if (n < 2 || x < 1 || x >= n || std::gcd(x, n) != 1) {
        throw std::invalid_argument("need n >= 2, 1 <= x < n and gcd(x, n) = 1");
    }
    if (n > (uint64_t{1} << 15)) {
        throw std::invalid_argument("n too large for the outcome tables");
    }
    ShorInstance s;
    s.n = n;
    s.x = x;
    s.q = 1;
    while (s.q <= n * n) {
        s.q <<= 1;
    }
    s.q_bits = static_cast<unsigned>(std::countr_zero(s.q));
    s.r = multiplicative_order(x, n);
    s.ell = static_cast<unsigned>(std::bit_width(n));
    return s;
}

std::vector<double> order_outcome_distribution(uint64_t r, uint64_t q) {
    if (r == 0 || q == 0) {
        throw std::invalid_argument("r and q must be positive");
    }
    // Residue k holds A_k = floor(q/r) or floor(q/r)+1 exponents; |sum_j w^j|^2 with w = e^{2 pi i r c/q}.
    uint64_t big = q % r, base = q / r;
    std::vector<double> p(q);
    for (uint64_t c = 0; c < q; c++) {
        uint64_t rc = static_cast<uint64_t>(static_cast<unsigned __int128>(r) * c % q);
        auto geo = [&](uint64_t len) -> double {
            if (rc == 0) {
                return static_cast<double>(len) * static_cast<double>(len);
            }
            double phase = std::numbers::pi * static_cast<double>(rc) / static_cast<double>(q);
            // len * rc can exceed q, so reduce the angle mod pi through an exact product.
            uint64_t lr = static_cast<uint64_t>(static_cast<unsigned __int128>(len) * rc % q);
            double top = std::sin(std::numbers::pi * static_cast<double>(lr) / static_cast<double>(q));
            double s = std::sin(phase);
            return top * top / (s * s);
        };
        double sum = static_cast<double>(big) * geo(base + 1) + static_cast<double>(r - big) * geo(base);
        p[c] = sum / (static_cast<double>(q) * static_cast<double>(q));
    }
    return p;
}

Fraction continued_fraction(uint64_t c, uint64_t q) {
    if (q == 0 || c >= q) {
        throw std::invalid_argument("need 0 <= c < q");
    }
    if (c == 0) {
        return {0, 1};
    }
    return simplest_between(2 * c - 1, 2 * q, 2 * c + 1, 2 * q);
}

bool verify_order(const ShorInstance &inst, uint64_t r) {
    if (r == 0 || powmod(inst.x, r, inst.n) != 1) {
        return false;
    }
    for (uint64_t d = 1; d < r; d++) {
        if (r % d == 0 && powmod(inst.x, d, inst.n) == 1) {
            return false;
        }
    }
    return true;
}

namespace {

// Result-register content for outcome c: the continued-fraction denominator, or 0 if it does not fit.
uint64_t register_value(const ShorInstance &inst, uint64_t c) {
    uint64_t den = continued_fraction(c, inst.q).den;
    return den < (uint64_t{1} << inst.ell) ? den : 0;
}

}  // namespace

double order_success_probability(const ShorInstance &inst) {
    auto p = order_outcome_distribution(inst.r, inst.q);
    double s = 0;
    for (uint64_t c = 0; c < inst.q; c++) {
        if (verify_order(inst, register_value(inst, c))) {
            s += p[c];
        }
    }
    return s;
}

double divisor_outcome_probability(uint64_t r, uint64_t q) {
    auto p = order_outcome_distribution(r, q);
    double s = 0;
    for (uint64_t c = 0; c < q; c++) {
        uint64_t den = continued_fraction(c, q).den;
        if (den != r && r % den == 0) {
            s += p[c];
        }
    }
    return s;
}

uint64_t euler_phi(uint64_t r) {
    if (r == 0) {
        throw std::invalid_argument("phi(0) is undefined");
    }
    uint64_t out = r;
    for (uint64_t f = 2; f * f <= r; f++) {
        if (r % f == 0) {
            while (r % f == 0) {
                r /= f;
            }
            out -= out / f;
        }
    }
    if (r > 1) {
        out -= out / r;
    }
    return out;
}

double divisor_failure_probability(uint64_t r) {
    double rr = static_cast<double>(r);
    return 4.0 * (rr - static_cast<double>(euler_phi(r))) / (std::numbers::pi * std::numbers::pi * rr);
}

namespace {

unsigned work_bits(const ShorInstance &inst) {
    return static_cast<unsigned>(std::bit_width(inst.n - 1));
}

// Counting register then work register, as fragment qubits 0.. of the builder.
void append_order_finding(CircuitBuilder &b, const ShorInstance &inst, std::span<const uint32_t> counting,
                          std::span<const uint32_t> work) {
    unsigned m = inst.q_bits, w = work_bits(inst);
    for (uint32_t c : counting) {
        b.add(Gate::H(), {c});
    }
    for (unsigned i = 0; i < m; i++) {
        uint64_t mult = powmod(inst.x, uint64_t{1} << (m - 1 - i), inst.n);
        uint64_t n = inst.n;
        Oracle mul = Oracle::from_function("cmul" + std::to_string(mult), w + 1, [=](uint32_t in) -> uint32_t {
            uint32_t ctrl = in >> w, y = in & ((1u << w) - 1);
            if (!ctrl || y >= n) {
                return in;
            }
            return (ctrl << w) | static_cast<uint32_t>(mulmod(y, mult, n));
        });
        std::vector<uint32_t> t{counting[i]};
        t.insert(t.end(), work.begin(), work.end());
        b.add(Op{mul}, t);
    }
    // Inverse Fourier transform, qubit 0 most significant.
    for (unsigned i = 0; i < m / 2; i++) {
        b.add(Gate::SWAP(), {counting[i], counting[m - 1 - i]});
    }
    for (int j = static_cast<int>(m) - 1; j >= 0; j--) {
        for (int k = static_cast<int>(m) - 1; k > j; k--) {
            double theta = -2 * std::numbers::pi / std::ldexp(1.0, k - j + 1);
            b.add(Gate::CPhase(theta), {counting[k], counting[j]});
        }
        b.add(Gate::H(), {counting[j]});
    }
}

}  // namespace

Circuit order_finding_circuit(const ShorInstance &inst) {
    CircuitBuilder b;
    auto counting = b.allocate_block(inst.q_bits);
    std::vector<uint32_t> work;
    unsigned w = work_bits(inst);
    for (unsigned i = 0; i < w; i++) {
        work.push_back(b.allocate(i == w - 1));
    }
    append_order_finding(b, inst, counting, work);
    return b.build();
}

std::vector<double> simulated_outcome_distribution(const ShorInstance &inst) {
    Circuit c = order_finding_circuit(inst);
    if (c.num_qubits() > qubit_cap()) {
        throw CapacityError(c.num_qubits(), qubit_cap(), "order finding");
    }
    StateVector s = run_circuit(c.initial_state(), c);
    unsigned w = work_bits(inst);
    std::vector<double> p(inst.q, 0.0);
    for (size_t i = 0; i < s.size(); i++) {
        p[i >> w] += std::norm(s[i]);
    }
    return p;
}

uint64_t shor_quantum_sample(const ShorInstance &inst, ShorMode mode, std::mt19937_64 &rng) {
    auto p = mode == ShorMode::kDistribution ? order_outcome_distribution(inst.r, inst.q)
                                             : simulated_outcome_distribution(inst);
    return Sampler(p)(rng);
}

// ---- verified functions ----

namespace {

void check_verifier_circuit(const Circuit &verifier, unsigned ell) {
    unsigned nv = verifier.num_qubits();
    if (verifier.init().find('1') != std::string::npos) {
        throw std::invalid_argument("verifier qubits must start in 0");
    }
    if (nv > 30) {
        throw std::invalid_argument("verifier too wide to check");
    }
    for (uint64_t v = 0; v < (uint64_t{1} << ell); v++) {
        // Qubit 0 is the most significant bit of the packed state.
        uint64_t s = v << (nv - ell);
        for (const auto &st : verifier.steps()) {
            unsigned k = op_arity(st.op);
            uint32_t in = 0;
            for (unsigned j = 0; j < k; j++) {
                in = (in << 1) | ((s >> (nv - 1 - st.targets[j])) & 1);
            }
            auto out = op_classical_image(st.op, in);
            if (!out) {
                throw std::invalid_argument("verifier step '" + op_name(st.op) + "' is not classical");
            }
            for (unsigned j = 0; j < k; j++) {
                uint64_t bit = (*out >> (k - 1 - j)) & 1;
                unsigned pos = nv - 1 - st.targets[j];
                s = (s & ~(uint64_t{1} << pos)) | (bit << pos);
            }
        }
        uint64_t flag_and_ws = s & ((uint64_t{1} << (nv - ell)) - 1);
        if ((s >> (nv - ell)) != v) {
            throw std::invalid_argument("verifier changes the result register");
        }
        if ((flag_and_ws & ((uint64_t{1} << (nv - ell - 1)) - 1)) != 0) {
            throw std::invalid_argument("verifier leaves workspace set");
        }
    }
}

}  // namespace

WrappedCircuit np_function_wrapper(const Circuit &producer, std::span<const uint32_t> result, const Circuit &verifier,
                                   bool check_verifier) {
    unsigned ell = static_cast<unsigned>(result.size());
    if (ell == 0 || verifier.num_qubits() < ell + 1) {
        throw std::invalid_argument("verifier must act on the result register and a flag");
    }
    for (uint32_t q : result) {
        if (q >= producer.num_qubits()) {
            throw std::invalid_argument("result qubit outside the producer circuit");
        }
    }
    if (check_verifier) {
        check_verifier_circuit(verifier, ell);
    }
    CircuitBuilder b;
    std::vector<uint32_t> pmap;
    for (unsigned i = 0; i < producer.num_qubits(); i++) {
        pmap.push_back(b.allocate(producer.init()[i] == '1'));
    }
    b.append(producer, pmap);
    WrappedCircuit w;
    w.result.assign(result.begin(), result.end());
    w.randomizer = b.allocate_block(ell);
    w.flag = b.allocate();
    std::vector<uint32_t> vmap(w.result);
    vmap.push_back(w.flag);
    for (unsigned i = ell + 1; i < verifier.num_qubits(); i++) {
        vmap.push_back(b.allocate());
    }
    for (uint32_t q : w.randomizer) {
        b.add(Gate::H(), {q});
    }
    b.append(verifier, vmap);
    // Swap in the random register where the flag stayed 0.
    b.add(Gate::X(), {w.flag});
    for (unsigned j = 0; j < ell; j++) {
        b.add(Gate::Fredkin(), {w.flag, w.result[j], w.randomizer[j]});
    }
    b.add(Gate::X(), {w.flag});
    w.circuit = b.build();
    return w;
}

ShorCircuit shor_circuit(const ShorInstance &inst, ShorMode mode) {
    CircuitBuilder b;
    ShorCircuit out;
    out.counting = b.allocate_block(inst.q_bits);
    if (mode == ShorMode::kFullCircuit) {
        std::vector<uint32_t> work;
        unsigned w = work_bits(inst);
        for (unsigned i = 0; i < w; i++) {
            work.push_back(b.allocate(i == w - 1));
        }
        append_order_finding(b, inst, out.counting, work);
    }
    auto s1 = b.allocate_block(inst.ell);
    unsigned m = inst.q_bits, ell = inst.ell;
    std::vector<uint32_t> table_cache(inst.q);
    for (uint64_t c = 0; c < inst.q; c++) {
        table_cache[c] = static_cast<uint32_t>(register_value(inst, c));
    }
    Oracle cf = Oracle::from_function("cfrac", m + ell, [&](uint32_t in) -> uint32_t {
        uint32_t c = in >> ell;
        return in ^ table_cache[c];
    });
    std::vector<uint32_t> t(out.counting);
    t.insert(t.end(), s1.begin(), s1.end());
    b.add(Op{cf}, t);
    Circuit producer = b.build();

    ShorInstance copy = inst;
    Oracle check = Oracle::from_function("order?", ell + 1, [&](uint32_t in) -> uint32_t {
        return in ^ (verify_order(copy, in >> 1) ? 1u : 0u);
    });
    Circuit verifier(ell + 1);
    std::vector<uint32_t> vt(ell + 1);
    std::iota(vt.begin(), vt.end(), 0u);
    verifier.append(Op{check}, vt);
    out.wrapped = np_function_wrapper(producer, s1, verifier);
    if (mode == ShorMode::kDistribution) {
        auto p = order_outcome_distribution(inst.r, inst.q);
        std::vector<amp> a(p.size());
        for (size_t c = 0; c < p.size(); c++) {
            a[c] = std::sqrt(p[c]);
        }
        out.inputs.push_back({out.counting, StateVector::from_amplitudes(std::move(a), 1e-8)});
    }
    return out;
}

ShorEnsembleResult shor_ensemble(const ShorInstance &inst, const ShorOptions &options) {
    ShorEnsembleResult res;
    res.instance = inst;
    res.p_r = order_success_probability(inst);
    if (options.molecules == 0) {
        ShorCircuit sc = shor_circuit(inst, options.mode);
        EnsembleOptions o;
        o.inputs = sc.inputs;
        o.workers = options.workers;
        EnsembleReadout full = run_exact(sc.wrapped.circuit, o);
        res.readout.means.clear();
        for (uint32_t q : sc.wrapped.result) {
            res.readout.means.push_back(full.means[q]);
        }
        res.readout.stderrs.assign(inst.ell, 0.0);
    } else {
        // Each computer measures its own outcome c; the rest of the circuit is run per outcome.
        ShorCircuit sc = shor_circuit(inst, ShorMode::kDistribution);
        auto p = options.mode == ShorMode::kDistribution ? order_outcome_distribution(inst.r, inst.q)
                                                         : simulated_outcome_distribution(inst);
        std::vector<std::vector<double>> per_c(inst.q);
        parallel_for(inst.q, options.workers, [&](size_t c) {
            if (p[c] <= 0) {
                return;
            }
            EnsembleOptions o;
            o.inputs = {{sc.counting, StateVector::basis(inst.q_bits, c)}};
            auto z = molecule_expectations(sc.wrapped.circuit, {}, o);
            for (uint32_t q : sc.wrapped.result) {
                per_c[c].push_back(z[q]);
            }
        });
        Sampler draw(p);
        std::vector<double> rows(options.molecules * inst.ell);
        parallel_for(options.molecules, options.workers, [&](size_t i) {
            std::mt19937_64 rng(derive_seed(options.seed, i));
            uint64_t c = draw(rng);
            std::copy(per_c[c].begin(), per_c[c].end(), rows.begin() + static_cast<std::ptrdiff_t>(i * inst.ell));
        });
        res.readout = readout_from_rows(rows, inst.ell);
        res.readout.seed = options.seed;
    }
    std::vector<uint32_t> idx(inst.ell);
    std::iota(idx.begin(), idx.end(), 0u);
    res.bits = decode_bits(res.readout, idx, options.threshold);
    bool ok = false;
    uint64_t v = bits_to_value(res.bits, ok);
    res.decoded = ok ? v : 0;
    return res;
}

// ---- search ----

GroverInstance GroverInstance::with_solutions(unsigned n_bits, std::vector<uint64_t> solutions) {
    if (n_bits == 0 || n_bits > 30) {
        throw std::invalid_argument("n_bits must lie in [1, 30]");
    }
    auto set = std::make_shared<std::unordered_set<uint64_t>>();
    for (uint64_t s : solutions) {
        if (s >> n_bits) {
            throw std::invalid_argument("solution outside the search space");
        }
        set->insert(s);
    }
    GroverInstance g;
    g.n_bits = n_bits;
    g.oracle = [set](uint64_t v) { return set->count(v) != 0; };
    return g;
}

std::vector<uint64_t> GroverInstance::solutions() const {
    std::vector<uint64_t> out;
    for (uint64_t v = 0; v < size(); v++) {
        if (oracle(v)) {
            out.push_back(v);
        }
    }
    return out;
}

unsigned grover_optimal_iterations(uint64_t size, uint64_t t) {
    if (t == 0) {
        return 0;
    }
    return static_cast<unsigned>(
        std::floor(std::numbers::pi / 4 * std::sqrt(static_cast<double>(size) / static_cast<double>(t))));
}

GroverRun grover_iterate(const GroverInstance &inst, unsigned k) {
    if (inst.n_bits > qubit_cap()) {
        throw CapacityError(inst.n_bits, qubit_cap(), "search register");
    }
    uint64_t n = inst.size();
    std::vector<char> mark(n);
    uint64_t t = 0;
    for (uint64_t v = 0; v < n; v++) {
        mark[v] = inst.oracle(v) ? 1 : 0;
        t += static_cast<uint64_t>(mark[v]);
    }
    std::vector<amp> a(n, amp(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
    for (unsigned it = 0; it < k; it++) {
        amp mean = 0;
        for (uint64_t v = 0; v < n; v++) {
            if (mark[v]) {
                a[v] = -a[v];
            }
            mean += a[v];
        }
        mean /= static_cast<double>(n);
        for (auto &x : a) {
            x = 2.0 * mean - x;
        }
    }
    GroverRun run;
    for (uint64_t v = 0; v < n; v++) {
        if (mark[v]) {
            run.success_probability += std::norm(a[v]);
        }
    }
    run.no_solution = t == 0 && k > 0;
    run.state = StateVector::from_amplitudes(std::move(a), 1e-6);
    return run;
}

std::vector<double> grover_output_distribution(const GroverInstance &inst, unsigned k) {
    auto run = grover_iterate(inst, k);
    std::vector<double> p(run.state.size());
    for (size_t i = 0; i < p.size(); i++) {
        p[i] = std::norm(run.state[i]);
    }
    return p;
}

std::vector<std::pair<unsigned, unsigned>> odd_even_transposition_pairs(unsigned m) {
    std::vector<std::pair<unsigned, unsigned>> out;
    for (unsigned round = 0; round < m; round++) {
        for (unsigned i = round % 2; i + 1 < m; i += 2) {
            out.emplace_back(i, i + 1);
        }
    }
    return out;
}

void odd_even_transposition_sort(std::vector<uint64_t> &v) {
    for (auto [i, j] : odd_even_transposition_pairs(static_cast<unsigned>(v.size()))) {
        if (v[i] > v[j]) {
            std::swap(v[i], v[j]);
        }
    }
}

Circuit sort_network_circuit(unsigned m, unsigned width) {
    if (m == 0 || width == 0 || 2 * width + 1 > 30) {
        throw std::invalid_argument("bad sort network shape");
    }
    auto pairs = odd_even_transposition_pairs(m);
    CircuitBuilder b;
    auto regs = b.allocate_block(m * width);
    // (a, b, f) -> (a, b, f xor [a > b]); a controlled register swap follows.
    Oracle cmp = Oracle::from_function("cmp", 2 * width + 1, [width](uint32_t in) -> uint32_t {
        uint32_t mask = (1u << width) - 1;
        uint32_t x = (in >> (width + 1)) & mask, y = (in >> 1) & mask;
        return in ^ (x > y ? 1u : 0u);
    });
    for (auto [i, j] : pairs) {
        uint32_t f = b.allocate();
        std::vector<uint32_t> t;
        for (unsigned k = 0; k < width; k++) {
            t.push_back(regs[i * width + k]);
        }
        for (unsigned k = 0; k < width; k++) {
            t.push_back(regs[j * width + k]);
        }
        t.push_back(f);
        b.add(Op{cmp}, t);
        for (unsigned k = 0; k < width; k++) {
            b.add(Gate::Fredkin(), {f, regs[i * width + k], regs[j * width + k]});
        }
    }
    return b.build();
}

double first_equals_last_probability(unsigned m, unsigned t) {
    if (m == 0 || t == 0) {
        throw std::invalid_argument("m and t must be positive");
    }
    double total = std::pow(static_cast<double>(t), m);
    if (total > 1e8) {
        throw std::invalid_argument("enumeration too large");
    }
    uint64_t hits = 0, count = static_cast<uint64_t>(total);
    std::vector<uint64_t> v(m);
    for (uint64_t code = 0; code < count; code++) {
        uint64_t c = code;
        for (unsigned i = 0; i < m; i++) {
            v[i] = c % t;
            c /= t;
        }
        odd_even_transposition_sort(v);
        hits += v.front() == v.back() ? 1 : 0;
    }
    return static_cast<double>(hits) / total;
}

MultiSolutionResult grover_multi_solution(const GroverInstance &inst, const MultiSolutionOptions &options) {
    if (options.m < 2 || options.molecules == 0) {
        throw std::invalid_argument("need m >= 2 and at least one molecule");
    }
    auto sols = inst.solutions();
    unsigned k = options.k ? options.k : grover_optimal_iterations(inst.size(), sols.size());
    auto dist = grover_output_distribution(inst, k);
    unsigned w = inst.n_bits, m = options.m;
    uint64_t smallest = sols.empty() ? 0 : sols.front();

    MultiSolutionResult res;
    // Naive: one computer per molecule, exact readout of its output register.
    res.naive.means.assign(w, 0.0);
    res.naive.stderrs.assign(w, 0.0);
    for (uint64_t v = 0; v < dist.size(); v++) {
        for (unsigned b = 0; b < w; b++) {
            res.naive.means[b] += dist[v] * (((v >> (w - 1 - b)) & 1) ? -1.0 : 1.0);
        }
    }

    Sampler draw(dist);
    std::vector<double> rows(options.molecules * m * w);
    std::vector<char> missed(options.molecules), randomized(options.molecules);
    parallel_for(options.molecules, options.workers, [&](size_t i) {
        std::mt19937_64 rng(derive_seed(options.seed, i));
        std::vector<uint64_t> out(m);
        for (auto &o : out) {
            o = draw(rng);
        }
        odd_even_transposition_sort(out);
        bool rnd = options.randomize_equal && out.front() == out.back();
        std::vector<double> row;
        row.reserve(m * w);
        for (unsigned j = 0; j < m; j++) {
            if (rnd && (j == 0 || j == m - 1)) {
                row.insert(row.end(), w, 0.0);
            } else {
                push_bits(row, out[j], w);
            }
        }
        std::copy(row.begin(), row.end(), rows.begin() + static_cast<std::ptrdiff_t>(i * m * w));
        randomized[i] = rnd;
        missed[i] = rnd || sols.empty() || out.front() != smallest;
    });
    res.readout = readout_from_rows(rows, m * w);
    res.readout.seed = options.seed;
    uint64_t miss = 0;
    for (uint64_t i = 0; i < options.molecules; i++) {
        miss += static_cast<uint64_t>(missed[i]);
        res.randomized += static_cast<uint64_t>(randomized[i]);
    }
    res.first_miss_rate = static_cast<double>(miss) / static_cast<double>(options.molecules);
    std::vector<uint32_t> first(w), last(w);
    std::iota(first.begin(), first.end(), 0u);
    std::iota(last.begin(), last.end(), (m - 1) * w);
    res.first_bits = decode_bits(res.readout, first, options.threshold);
    res.last_bits = decode_bits(res.readout, last, options.threshold);
    bool ok = false;
    uint64_t v = bits_to_value(res.first_bits, ok);
    res.first = ok ? static_cast<int64_t>(v) : -1;
    v = bits_to_value(res.last_bits, ok);
    res.last = ok ? static_cast<int64_t>(v) : -1;
    return res;
}

bool grover_existence_test(const GroverInstance &inst, uint64_t prefix, unsigned free_bits, double budget,
                           std::mt19937_64 &rng, uint64_t &queries) {
    uint64_t size = uint64_t{1} << free_bits;
    uint64_t base = prefix << free_bits;
    if (size <= 4) {
        for (uint64_t v = 0; v < size; v++) {
            queries++;
            if (inst.oracle(base + v)) {
                return true;
            }
        }
        return false;
    }
    // The sampled output is a solution with probability sin^2((2j+1) theta); only t enters.
    uint64_t t = 0;
    for (uint64_t v = 0; v < size; v++) {
        t += inst.oracle(base + v) ? 1 : 0;
    }
    double theta = std::asin(std::sqrt(static_cast<double>(t) / static_cast<double>(size)));
    double root = std::sqrt(static_cast<double>(size));
    double limit = budget * root, used = 0, mm = 1;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        auto j = static_cast<uint64_t>(u(rng) * std::ceil(mm));
        if (used + static_cast<double>(j + 1) > limit) {
            return false;
        }
        used += static_cast<double>(j + 1);
        queries += j + 1;  // j iterations and one check of the output
        double s = std::sin(static_cast<double>(2 * j + 1) * theta);
        if (t > 0 && u(rng) < s * s) {
            return true;
        }
        mm = std::min(mm * 6.0 / 5.0, root);
    }
}

BinarySearchResult grover_binary_search(const GroverInstance &inst, const BinarySearchOptions &options) {
    if (inst.n_bits == 0 || inst.n_bits > 30) {
        throw std::invalid_argument("n_bits must lie in [1, 30]");
    }
    std::mt19937_64 rng(options.seed);
    BinarySearchResult res;
    auto exists = [&](uint64_t prefix, unsigned free_bits) -> bool {
        if (options.mode == ExistenceMode::kExact) {
            uint64_t base = prefix << free_bits;
            for (uint64_t v = 0; v < (uint64_t{1} << free_bits); v++) {
                if (inst.oracle(base + v)) {
                    return true;
                }
            }
            return false;
        }
        // One test per subcube; at the default budget a miss is rarer than 1e-4.
        return grover_existence_test(inst, prefix, free_bits, options.budget, rng, res.queries);
    };
    if (!exists(0, inst.n_bits)) {
        return res;
    }
    uint64_t prefix = 0;
    for (unsigned j = 1; j <= inst.n_bits; j++) {
        unsigned free_bits = inst.n_bits - j;
        prefix = exists(prefix << 1, free_bits) ? prefix << 1 : (prefix << 1) | 1;
        res.stages++;
    }
    res.queries++;
    res.found = inst.oracle(prefix);
    res.solution = prefix;
    return res;
}

// ---- JSON ----

namespace {

nlohmann::json readout_json(const EnsembleReadout &r) {
    return nlohmann::json::parse(r.to_json());
}

std::string bits_string(std::span<const BitValue> bits) {
    std::string s;
    for (BitValue b : bits) {
        s += bit_value_name(b);
    }
    return s;
}

}  // namespace

std::string to_json(const ShorEnsembleResult &r) {
    nlohmann::json j;
    j["n"] = r.instance.n;
    j["x"] = r.instance.x;
    j["q"] = r.instance.q;
    j["order"] = r.instance.r;
    j["p_r"] = r.p_r;
    j["bits"] = bits_string(r.bits);
    j["decoded"] = r.decoded;
    j["readout"] = readout_json(r.readout);
    return j.dump(2);
}

std::string to_json(const MultiSolutionResult &r) {
    nlohmann::json j;
    j["first"] = r.first;
    j["last"] = r.last;
    j["first_bits"] = bits_string(r.first_bits);
    j["last_bits"] = bits_string(r.last_bits);
    j["first_miss_rate"] = r.first_miss_rate;
    j["randomized"] = r.randomized;
    j["readout"] = readout_json(r.readout);
    j["naive"] = readout_json(r.naive);
    return j.dump(2);
}

std::string to_json(const BinarySearchResult &r) {
    nlohmann::json j;
    j["found"] = r.found;
    if (r.found) {
        j["solution"] = r.solution;
    }
    j["stages"] = r.stages;
    j["queries"] = r.queries;
    return j.dump(2);
}

std::string to_json(const TeleportReport &r) {
    nlohmann::json j;
    j["receiver_fidelity"] = r.receiver_fidelity;
    j["readout"] = readout_json(r.readout);
    return j.dump(2);
}

}  // namespace ensq
