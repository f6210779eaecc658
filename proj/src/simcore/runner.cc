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

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>

namespace ensq {

namespace {

constexpr int16_t kClassical = -1;
constexpr double kCertain = 1e-13;

struct LogOp {
    Op op;
    std::vector<uint32_t> targets;
    bool coupling = false;
};

// A dense factor of the joint state. Factor 0 is the main register.
struct Factor {
    std::vector<uint32_t> qubits;
    StateVector state{0};
    uint64_t id = 0;
    // Deferred coupling: 1 when main qubits control this block, 2 when the block controls main qubits.
    int type = 0;
    std::vector<LogOp> log;
    std::vector<uint32_t> coupled_main;
    bool coupled() const {
        return type != 0;
    }
};

struct Queued {
    Op op;
    std::vector<uint32_t> targets;
};

struct BState {
    double weight = 1;
    std::vector<int8_t> value;
    std::vector<int16_t> where;
    std::vector<uint32_t> pos;
    // 0 free, -1 held behind the queue, otherwise id of the coupled block holding it.
    std::vector<int64_t> lock;
    Factor main;
    std::vector<Factor> ext;
    std::vector<Queued> queue;
    uint64_t next_id = 1;
    // <Z> per qubit, captured when the qubit dies (NaN before). Only with observe_z.
    std::vector<double> z;
};

double uniform01(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

uint32_t gather_bits(uint64_t index, const std::vector<unsigned> &bits) {
    uint32_t v = 0;
    for (unsigned b : bits) {
        v = (v << 1) | static_cast<uint32_t>((index >> b) & 1);
    }
    return v;
}

}  // namespace

class Machine {
   public:
    Machine(const Executor &ex, uint64_t seed) : ex_(ex), rng_(seed) {
    }

    RunResult run(const FaultSchedule &sched);

   private:
    bool sample() const {
        return ex_.config_.branching == Branching::kSample;
    }
    Factor &factor(BState &b, int16_t w) {
        return w == 0 ? b.main : b.ext[static_cast<size_t>(w - 1)];
    }
    void reindex(BState &b, int16_t w) {
        Factor &f = factor(b, w);
        for (uint32_t j = 0; j < f.qubits.size(); j++) {
            b.where[f.qubits[j]] = w;
            b.pos[f.qubits[j]] = j;
        }
    }
    void erase_ext(BState &b, size_t k) {
        b.ext.erase(b.ext.begin() + static_cast<long>(k));
        for (size_t j = k; j < b.ext.size(); j++) {
            reindex(b, static_cast<int16_t>(j + 1));
        }
    }
    void note_live(const BState &b) {
        stats_.peak_live = std::max<unsigned>(stats_.peak_live, b.main.state.num_qubits());
    }

    BState initial();
    void apply_op(BState &b, const Op &op, const std::vector<uint32_t> &targets, int64_t step);
    void apply_quantum(BState &b, Op op, std::vector<uint32_t> t);
    void promote(BState &b, uint32_t q, int16_t w);
    int16_t couple_or_merge(BState &b, const std::set<int16_t> &fs, const Op &op, const std::vector<uint32_t> &t);
    void merge_into(BState &b, int16_t dst, int16_t src);
    void apply_pauli(BState &b, uint32_t q, Pauli p);
    void settle(std::vector<BState> &out, BState b, const std::vector<uint32_t> &cands, size_t from, int64_t i);
    void absorb(BState &b, size_t k);
    uint32_t draw(const std::vector<double> &probs);
    void flush_queue(BState &b);
    std::vector<BState> merge(std::vector<BState> in);
    void capture_z(BState &b, uint32_t q);
    Branch output(BState &b);

    const Executor &ex_;
    std::mt19937_64 rng_;
    RunStats stats_;
};

BState Machine::initial() {
    const Circuit &c = ex_.circuit_;
    unsigned n = c.num_qubits();
    BState b;
    b.value.resize(n);
    for (unsigned q = 0; q < n; q++) {
        b.value[q] = static_cast<int8_t>(c.init()[q] == '1');
    }
    b.where.assign(n, kClassical);
    b.pos.assign(n, 0);
    b.lock.assign(n, 0);
    if (ex_.config_.observe_z) {
        b.z.assign(n, std::numeric_limits<double>::quiet_NaN());
    }
    b.main.id = 0;
    std::vector<char> seen(n, 0);
    for (const auto &in : ex_.config_.inputs) {
        if (in.state.num_qubits() != in.qubits.size()) {
            throw std::invalid_argument("external input state size does not match its qubit list");
        }
        Factor f;
        f.qubits = in.qubits;
        f.state = in.state;
        f.id = b.next_id++;
        for (uint32_t q : in.qubits) {
            if (q >= n) {
                throw std::out_of_range("external input qubit out of range");
            }
            if (seen[q]) {
                throw std::invalid_argument("qubit " + std::to_string(q) + " appears in two external inputs");
            }
            seen[q] = 1;
        }
        b.ext.push_back(std::move(f));
        reindex(b, static_cast<int16_t>(b.ext.size()));
    }
    return b;
}

void Machine::promote(BState &b, uint32_t q, int16_t w) {
    Factor &f = factor(b, w);
    if (w == 0 && f.state.num_qubits() + 1 > qubit_cap()) {
        throw CapacityError(f.state.num_qubits() + 1, qubit_cap(), "allocating a qubit");
    }
    f.state.append_qubit(static_cast<unsigned>(b.value[q]));
    f.qubits.push_back(q);
    b.where[q] = w;
    b.pos[q] = static_cast<uint32_t>(f.qubits.size() - 1);
    b.value[q] = 0;
    if (w == 0) {
        note_live(b);
    }
}

void Machine::merge_into(BState &b, int16_t dst, int16_t src) {
    Factor &d = factor(b, dst);
    Factor &s = factor(b, src);
    if (s.coupled() || d.coupled()) {
        throw std::logic_error("cannot merge a block with a pending deferred coupling");
    }
    d.state = d.state.tensor(s.state);
    d.qubits.insert(d.qubits.end(), s.qubits.begin(), s.qubits.end());
    erase_ext(b, static_cast<size_t>(src - 1));
    if (dst > src) {
        dst--;
    }
    reindex(b, dst);
    note_live(b);
}

int16_t Machine::couple_or_merge(BState &b, const std::set<int16_t> &fs, const Op &op, const std::vector<uint32_t> &t) {
    std::vector<int16_t> exts;
    for (int16_t w : fs) {
        if (w > 0) {
            exts.push_back(w);
        }
    }
    bool has_main = fs.count(0) > 0;
    // Several external blocks: fuse them first (they are small).
    while (exts.size() > 1) {
        int16_t src = exts.back();
        exts.pop_back();
        merge_into(b, exts[0], src);
    }
    int16_t e = exts[0];
    if (!has_main) {
        return e;
    }
    Factor &E = factor(b, e);
    unsigned total = b.main.state.num_qubits() + E.state.num_qubits();
    if (!E.coupled() && total <= qubit_cap()) {
        merge_into(b, 0, e);
        return 0;
    }
    const RunConfig &cfg = ex_.config_;
    if (!(cfg.classicalize && sample() && cfg.allow_deferral)) {
        throw CapacityError(total, qubit_cap(), "coupling an external block; deferred sampling can avoid the merge");
    }
    bool diag_main = true;
    bool diag_ext = true;
    for (unsigned j = 0; j < t.size(); j++) {
        if (b.where[t[j]] == 0) {
            diag_main &= op_diagonal_in(op, j);
        } else {
            diag_ext &= op_diagonal_in(op, j);
        }
    }
    int type = E.type;
    if (type == 0) {
        type = diag_main ? 1 : (diag_ext ? 2 : 0);
    }
    if (type == 0 || (type == 1 && !diag_main) || (type == 2 && !diag_ext)) {
        throw CapacityError(total, qubit_cap(), "gate " + op_name(op) + " couples an external block in a way that cannot be deferred");
    }
    if (type == 2) {
        bool seen_coupling = false;
        for (const auto &l : E.log) {
            seen_coupling |= l.coupling;
            if (l.coupling || !seen_coupling) {
                continue;
            }
            for (unsigned j = 0; j < l.targets.size(); j++) {
                bool shared = false;
                for (unsigned k = 0; k < t.size(); k++) {
                    shared |= t[k] == l.targets[j] && b.where[t[k]] == e;
                }
                if (shared && !op_diagonal_in(l.op, j)) {
                    throw CapacityError(total, qubit_cap(), "deferred coupling after a non-commuting block operation");
                }
            }
        }
    }
    E.type = type;
    E.log.push_back(LogOp{op, t, true});
    for (uint32_t q : t) {
        if (b.where[q] == 0) {
            b.lock[q] = static_cast<int64_t>(E.id);
            if (std::find(E.coupled_main.begin(), E.coupled_main.end(), q) == E.coupled_main.end()) {
                E.coupled_main.push_back(q);
            }
        }
    }
    return -2;
}

void Machine::apply_quantum(BState &b, Op op, std::vector<uint32_t> t) {
    std::set<int16_t> fs;
    for (uint32_t q : t) {
        if (b.where[q] != kClassical) {
            fs.insert(b.where[q]);
        }
    }
    int16_t w;
    if (fs.empty()) {
        w = 0;
    } else if (fs.size() == 1) {
        w = *fs.begin();
    } else {
        // Classical operands that still need quantum treatment go to main before any coupling.
        for (uint32_t q : t) {
            if (b.where[q] == kClassical) {
                promote(b, q, 0);
                fs.insert(0);
            }
        }
        w = couple_or_merge(b, fs, op, t);
        if (w == -2) {
            return;
        }
    }
    for (uint32_t q : t) {
        if (b.where[q] == kClassical) {
            promote(b, q, w);
        }
    }
    Factor &f = factor(b, w);
    if (f.coupled()) {
        f.log.push_back(LogOp{std::move(op), std::move(t), false});
        return;
    }
    std::vector<unsigned> positions;
    for (uint32_t q : t) {
        positions.push_back(b.pos[q]);
    }
    f.state.apply(op, positions);
}

void Machine::apply_op(BState &b, const Op &op_in, const std::vector<uint32_t> &targets, int64_t step) {
    // Ops touching qubits held behind a deferred coupling wait for it to resolve.
    bool hold = false;
    for (uint32_t q : targets) {
        int64_t l = b.lock[q];
        if (l == -1) {
            hold = true;
        } else if (l > 0) {
            bool partner = false;
            for (uint32_t r : targets) {
                int16_t w = b.where[r];
                partner |= w > 0 && b.ext[static_cast<size_t>(w - 1)].id == static_cast<uint64_t>(l);
            }
            hold |= !partner;
        }
    }
    if (hold) {
        b.queue.push_back(Queued{op_in, targets});
        for (uint32_t q : targets) {
            if (b.lock[q] == 0) {
                b.lock[q] = -1;
            }
        }
        return;
    }
    bool all_classical = true;
    for (uint32_t q : targets) {
        all_classical &= b.where[q] == kClassical;
    }
    if (all_classical) {
        uint32_t in = 0;
        for (uint32_t q : targets) {
            in = (in << 1) | static_cast<uint32_t>(b.value[q]);
        }
        int64_t img;
        if (step >= 0) {
            img = ex_.image_[static_cast<size_t>(step)][in];
        } else {
            auto r = op_classical_image(op_in, in);
            img = r ? static_cast<int64_t>(*r) : -1;
        }
        if (img >= 0) {
            size_t k = targets.size();
            for (size_t j = 0; j < k; j++) {
                b.value[targets[j]] = static_cast<int8_t>((img >> (k - 1 - j)) & 1);
            }
            return;
        }
        apply_quantum(b, op_in, targets);
        return;
    }
    Op op = op_in;
    std::vector<uint32_t> t = targets;
    for (int j = static_cast<int>(t.size()) - 1; j >= 0; j--) {
        if (b.where[t[j]] == kClassical && op_arity(op) >= 2 && op_diagonal_in(op, static_cast<unsigned>(j))) {
            op = op_restrict(op, static_cast<unsigned>(j), static_cast<unsigned>(b.value[t[j]]));
            t.erase(t.begin() + j);
        }
    }
    if (op_is_identity(op)) {
        return;
    }
    apply_quantum(b, std::move(op), std::move(t));
}

void Machine::apply_pauli(BState &b, uint32_t q, Pauli p) {
    if (p == Pauli::kI) {
        return;
    }
    if (b.lock[q] != 0) {
        b.queue.push_back(Queued{Gate::pauli(pauli_char(p)), {q}});
        return;
    }
    if (b.where[q] == kClassical) {
        if (p == Pauli::kX || p == Pauli::kY) {
            b.value[q] ^= 1;
        }
        return;
    }
    Factor &f = factor(b, b.where[q]);
    if (f.coupled()) {
        f.log.push_back(LogOp{Gate::pauli(pauli_char(p)), {q}, false});
        return;
    }
    f.state.apply_pauli(pauli_char(p), b.pos[q]);
}

uint32_t Machine::draw(const std::vector<double> &probs) {
    double total = 0;
    for (double p : probs) {
        total += p;
    }
    double r = uniform01(rng_) * total;
    uint32_t last = 0;
    for (uint32_t i = 0; i < probs.size(); i++) {
        if (probs[i] <= 0) {
            continue;
        }
        last = i;
        if (r < probs[i]) {
            return i;
        }
        r -= probs[i];
    }
    return last;
}

void Machine::absorb(BState &b, size_t k) {
    Factor e = std::move(b.ext[k]);
    b.ext.erase(b.ext.begin() + static_cast<long>(k));
    for (size_t j = k; j < b.ext.size(); j++) {
        reindex(b, static_cast<int16_t>(j + 1));
    }
    unsigned ke = e.state.num_qubits();
    size_t de = size_t{1} << ke;
    std::map<uint32_t, unsigned> epos;
    for (unsigned j = 0; j < ke; j++) {
        epos[e.qubits[j]] = j;
    }
    auto main_bits = [&](const std::vector<uint32_t> &qs) {
        std::vector<unsigned> bits;
        for (uint32_t q : qs) {
            bits.push_back(b.main.state.bit_of(b.pos[q]));
        }
        return bits;
    };
    std::vector<amp> &ma = b.main.state.mutable_amplitudes();
    uint32_t m = 0;
    if (e.type == 1) {
        const auto &U = e.coupled_main;
        auto bits = main_bits(U);
        std::vector<double> pu(size_t{1} << U.size(), 0.0);
        for (uint64_t i = 0; i < ma.size(); i++) {
            pu[gather_bits(i, bits)] += std::norm(ma[i]);
        }
        std::vector<std::vector<amp>> psi(pu.size());
        std::vector<double> pm(de, 0.0);
        for (uint32_t u = 0; u < pu.size(); u++) {
            if (pu[u] <= 0) {
                continue;
            }
            StateVector s = e.state;
            for (const auto &l : e.log) {
                Op op = l.op;
                std::vector<unsigned> positions;
                for (int j = static_cast<int>(l.targets.size()) - 1; j >= 0; j--) {
                    auto it = std::find(U.begin(), U.end(), l.targets[j]);
                    if (l.coupling && it != U.end() && b.where[l.targets[j]] == 0) {
                        unsigned idx = static_cast<unsigned>(it - U.begin());
                        unsigned v = (u >> (U.size() - 1 - idx)) & 1;
                        op = op_restrict(op, static_cast<unsigned>(j), v);
                    } else {
                        positions.insert(positions.begin(), epos.at(l.targets[j]));
                    }
                }
                if (!op_is_identity(op)) {
                    s.apply(op, positions);
                }
            }
            for (uint32_t x = 0; x < de; x++) {
                pm[x] += pu[u] * std::norm(s[x]);
            }
            psi[u] = s.amplitudes();
        }
        m = draw(pm);
        double norm = 1.0 / std::sqrt(pm[m]);
        for (uint64_t i = 0; i < ma.size(); i++) {
            uint32_t u = gather_bits(i, bits);
            ma[i] = psi[u].empty() ? amp{0.0} : ma[i] * psi[u][m] * norm;
        }
    } else {
        std::vector<uint32_t> support;
        for (uint32_t s = 0; s < de; s++) {
            if (std::abs(e.state[s]) > 1e-14) {
                support.push_back(s);
            }
        }
        size_t bytes = support.size() * ma.size() * sizeof(amp);
        if (bytes > (size_t{3} << 30)) {
            throw CapacityError(b.main.state.num_qubits() + ke, qubit_cap(), "deferred block support too large");
        }
        std::vector<StateVector> v;
        std::vector<std::vector<amp>> w;
        for (uint32_t s : support) {
            StateVector vs = b.main.state;
            StateVector ws = StateVector::basis(ke, s);
            for (const auto &l : e.log) {
                Op op = l.op;
                if (l.coupling) {
                    std::vector<unsigned> positions;
                    for (int j = static_cast<int>(l.targets.size()) - 1; j >= 0; j--) {
                        uint32_t q = l.targets[j];
                        if (b.where[q] == 0) {
                            positions.insert(positions.begin(), b.pos[q]);
                        } else {
                            unsigned val = (s >> (ke - 1 - epos.at(q))) & 1;
                            op = op_restrict(op, static_cast<unsigned>(j), val);
                        }
                    }
                    if (!op_is_identity(op)) {
                        vs.apply(op, positions);
                    }
                } else {
                    std::vector<unsigned> positions;
                    for (uint32_t q : l.targets) {
                        positions.push_back(epos.at(q));
                    }
                    ws.apply(op, positions);
                }
            }
            v.push_back(std::move(vs));
            w.push_back(ws.amplitudes());
        }
        size_t ns = support.size();
        std::vector<amp> gram(ns * ns);
        for (size_t i = 0; i < ns; i++) {
            for (size_t j = i; j < ns; j++) {
                gram[i * ns + j] = inner(v[i], v[j]);
                gram[j * ns + i] = std::conj(gram[i * ns + j]);
            }
        }
        std::vector<double> pm(de, 0.0);
        std::vector<amp> c(ns);
        for (uint32_t x = 0; x < de; x++) {
            for (size_t i = 0; i < ns; i++) {
                c[i] = w[i][x] * e.state[support[i]];
            }
            amp acc = 0;
            for (size_t i = 0; i < ns; i++) {
                for (size_t j = 0; j < ns; j++) {
                    acc += std::conj(c[i]) * c[j] * gram[i * ns + j];
                }
            }
            pm[x] = std::max(0.0, acc.real());
        }
        m = draw(pm);
        double norm = 1.0 / std::sqrt(pm[m]);
        std::fill(ma.begin(), ma.end(), amp{0.0});
        for (size_t i = 0; i < ns; i++) {
            amp ci = w[i][m] * e.state[support[i]] * norm;
            if (ci == amp{0.0}) {
                continue;
            }
            const auto &src = v[i].amplitudes();
            for (uint64_t j = 0; j < ma.size(); j++) {
                ma[j] += ci * src[j];
            }
        }
    }
    for (unsigned j = 0; j < ke; j++) {
        uint32_t q = e.qubits[j];
        b.where[q] = kClassical;
        b.value[q] = static_cast<int8_t>((m >> (ke - 1 - j)) & 1);
    }
    for (auto &l : b.lock) {
        if (l == static_cast<int64_t>(e.id)) {
            l = 0;
        }
    }
    stats_.absorptions++;
    bool pending = false;
    for (const auto &f : b.ext) {
        pending |= f.coupled();
    }
    if (!pending) {
        flush_queue(b);
    }
}

void Machine::flush_queue(BState &b) {
    std::vector<Queued> q;
    q.swap(b.queue);
    for (auto &l : b.lock) {
        if (l == -1) {
            l = 0;
        }
    }
    for (auto &item : q) {
        apply_op(b, item.op, item.targets, -1);
    }
}

void Machine::settle(std::vector<BState> &out, BState b, const std::vector<uint32_t> &cands, size_t from,
                     int64_t i) {
    for (size_t idx = from; idx < cands.size(); idx++) {
        uint32_t q = cands[idx];
        if (!ex_.done(q, i)) {
            continue;
        }
        bool dead = ex_.last_use_[q] <= i;
        bool forget = dead && !ex_.recorded_[q];
        if (b.where[q] == kClassical) {
            if (dead && !b.z.empty() && b.lock[q] == 0) {
                capture_z(b, q);
            }
            if (forget && b.lock[q] == 0) {
                b.value[q] = 0;
            }
            continue;
        }
        if (b.lock[q] != 0) {
            continue;
        }
        int16_t w = b.where[q];
        Factor &f = factor(b, w);
        if (f.coupled()) {
            bool all = true;
            for (uint32_t r : f.qubits) {
                all &= ex_.done(r, i);
            }
            if (!all) {
                continue;
            }
            absorb(b, static_cast<size_t>(w - 1));
            std::vector<uint32_t> everyone(b.value.size());
            for (uint32_t r = 0; r < everyone.size(); r++) {
                everyone[r] = r;
            }
            settle(out, std::move(b), everyone, 0, i);
            return;
        }
        if (dead && !b.z.empty()) {
            capture_z(b, q);
        }
        unsigned p = b.pos[q];
        double p1 = f.state.prob_one(p);
        unsigned outcome;
        if (p1 <= kCertain) {
            outcome = 0;
        } else if (p1 >= 1 - kCertain) {
            outcome = 1;
        } else if (sample()) {
            outcome = uniform01(rng_) < p1 ? 1 : 0;
        } else {
            BState one = b;
            Factor &f1 = factor(one, w);
            f1.state.collapse_remove(p, 1);
            f1.qubits.erase(f1.qubits.begin() + p);
            one.where[q] = kClassical;
            one.value[q] = forget ? 0 : 1;
            one.weight *= p1;
            if (w > 0 && f1.qubits.empty()) {
                erase_ext(one, static_cast<size_t>(w - 1));
            } else {
                reindex(one, w);
            }
            settle(out, std::move(one), cands, idx + 1, i);
            b.weight *= 1 - p1;
            outcome = 0;
        }
        f.state.collapse_remove(p, outcome);
        f.qubits.erase(f.qubits.begin() + p);
        b.where[q] = kClassical;
        b.value[q] = forget ? 0 : static_cast<int8_t>(outcome);
        if (w > 0 && f.qubits.empty()) {
            erase_ext(b, static_cast<size_t>(w - 1));
        } else {
            reindex(b, w);
        }
    }
    out.push_back(std::move(b));
}

std::vector<BState> Machine::merge(std::vector<BState> in) {
    if (in.size() < 2) {
        return in;
    }
    std::map<std::string, std::vector<size_t>> groups;
    std::vector<BState> out;
    for (auto &b : in) {
        std::string key;
        key.reserve(b.value.size() * 3 + 8);
        for (size_t q = 0; q < b.value.size(); q++) {
            key.push_back(static_cast<char>(b.where[q] + 2));
            key.push_back(static_cast<char>(b.where[q] == kClassical ? b.value[q] : static_cast<int8_t>(b.pos[q] & 0x7f)));
            key.push_back(static_cast<char>(b.lock[q] != 0));
        }
        bool simple = b.queue.empty();
        for (const auto &f : b.ext) {
            simple &= !f.coupled();
        }
        auto &g = groups[key];
        bool merged = false;
        if (simple) {
            for (size_t idx : g) {
                BState &r = out[idx];
                double fid = fidelity(r.main.state, b.main.state);
                for (size_t k = 0; k < b.ext.size() && fid > 0; k++) {
                    fid *= fidelity(r.ext[k].state, b.ext[k].state);
                }
                if (fid >= 1 - ex_.config_.merge_tol) {
                    for (size_t q = 0; q < r.z.size(); q++) {
                        r.z[q] = (r.weight * r.z[q] + b.weight * b.z[q]) / (r.weight + b.weight);
                    }
                    r.weight += b.weight;
                    merged = true;
                    break;
                }
            }
        }
        if (!merged) {
            if (simple) {
                g.push_back(out.size());
            }
            out.push_back(std::move(b));
        }
    }
    return out;
}

void Machine::capture_z(BState &b, uint32_t q) {
    if (!std::isnan(b.z[q])) {
        return;
    }
    if (b.where[q] == kClassical) {
        b.z[q] = b.value[q] ? -1.0 : 1.0;
    } else {
        b.z[q] = expectation_z(factor(b, b.where[q]).state, b.pos[q]);
    }
}

Branch Machine::output(BState &b) {
    const auto &keep = ex_.config_.keep;
    std::vector<uint32_t> order;
    StateVector s(0);
    std::set<int16_t> used;
    for (uint32_t q : keep) {
        int16_t w = b.where[q];
        if (w == kClassical || used.count(w)) {
            continue;
        }
        used.insert(w);
        Factor &f = factor(b, w);
        if (f.coupled()) {
            throw std::logic_error("kept qubit is part of an unresolved deferred coupling");
        }
        for (uint32_t r : f.qubits) {
            if (!ex_.kept_[r]) {
                throw std::logic_error("kept qubit shares a factor with a discarded qubit");
            }
        }
        s = s.tensor(f.state);
        order.insert(order.end(), f.qubits.begin(), f.qubits.end());
    }
    for (uint32_t q : keep) {
        if (b.where[q] == kClassical) {
            s.append_qubit(static_cast<unsigned>(b.value[q]));
            order.push_back(q);
        }
    }
    std::vector<unsigned> perm(keep.size());
    for (size_t i = 0; i < keep.size(); i++) {
        perm[i] = static_cast<unsigned>(std::find(order.begin(), order.end(), keep[i]) - order.begin());
    }
    Branch out;
    out.weight = b.weight;
    out.state = s.permuted(perm);
    if (!b.z.empty()) {
        for (uint32_t q = 0; q < b.z.size(); q++) {
            capture_z(b, q);
        }
        out.z = b.z;
    }
    for (uint32_t q : ex_.config_.record) {
        out.record.push_back(b.where[q] == kClassical ? b.value[q] : static_cast<int8_t>(-1));
    }
    return out;
}

RunResult Machine::run(const FaultSchedule &sched) {
    const Circuit &c = ex_.circuit_;
    BState b0 = initial();
    for (const auto &[q, p] : sched.inputs) {
        apply_pauli(b0, q, p);
    }
    std::vector<BState> branches;
    settle(branches, std::move(b0), ex_.events_.back(), 0, -1);
    branches = merge(std::move(branches));
    const auto &steps = c.steps();
    for (size_t i = 0; i < steps.size(); i++) {
        std::vector<BState> next;
        size_t before = branches.size();
        for (auto &b : branches) {
            apply_op(b, steps[i].op, steps[i].targets, static_cast<int64_t>(i));
            for (const auto &[q, p] : sched.after_step[i]) {
                apply_pauli(b, q, p);
            }
            settle(next, std::move(b), ex_.events_[i], 0, static_cast<int64_t>(i));
        }
        if (next.size() > before) {
            next = merge(std::move(next));
        }
        if (next.size() > ex_.config_.max_branches) {
            throw std::runtime_error("branch count " + std::to_string(next.size()) + " exceeds the limit of " +
                                     std::to_string(ex_.config_.max_branches));
        }
        if (next.size() > 1) {
            size_t total = 0;
            for (const auto &b : next) {
                total += b.main.state.size();
                for (const auto &f : b.ext) {
                    total += f.state.size();
                }
            }
            if (total > ex_.config_.max_amplitudes) {
                throw CapacityError(std::bit_width(total) - 1, qubit_cap(),
                                    "branches hold " + std::to_string(total) + " amplitudes in total; sampling avoids this");
            }
        }
        stats_.peak_branches = std::max(stats_.peak_branches, next.size());
        branches = std::move(next);
    }
    std::vector<uint32_t> all(c.num_qubits());
    for (uint32_t q = 0; q < all.size(); q++) {
        all[q] = q;
    }
    std::vector<BState> final_states;
    for (auto &b : branches) {
        settle(final_states, std::move(b), all, 0, std::numeric_limits<int64_t>::max());
    }
    final_states = merge(std::move(final_states));
    RunResult r;
    for (auto &b : final_states) {
        for (const auto &f : b.ext) {
            if (f.coupled()) {
                throw std::logic_error("deferred coupling never resolved");
            }
        }
        if (!b.queue.empty()) {
            throw std::logic_error("operations left queued behind a deferred coupling");
        }
        r.branches.push_back(output(b));
    }
    r.stats = stats_;
    return r;
}

Executor::Executor(Circuit circuit, RunConfig config)
    : circuit_(std::move(circuit)), config_(std::move(config)), table_(circuit_) {
    unsigned n = circuit_.num_qubits();
    last_use_.assign(n, -1);
    ready_after_.assign(n, -1);
    kept_.assign(n, 0);
    recorded_.assign(n, 0);
    for (uint32_t q : config_.keep) {
        if (q >= n) {
            throw std::out_of_range("kept qubit out of range");
        }
        if (kept_[q]) {
            throw std::invalid_argument("qubit kept twice");
        }
        kept_[q] = 1;
    }
    for (uint32_t q : config_.record) {
        if (q >= n) {
            throw std::out_of_range("recorded qubit out of range");
        }
        recorded_[q] = 1;
    }
    const auto &steps = circuit_.steps();
    for (size_t i = 0; i < steps.size(); i++) {
        const Step &s = steps[i];
        uint32_t mask = 0;
        for (unsigned j = 0; j < s.targets.size(); j++) {
            uint32_t q = s.targets[j];
            last_use_[q] = static_cast<int64_t>(i);
            if (op_diagonal_in(s.op, j)) {
                mask |= 1u << j;
            } else {
                ready_after_[q] = static_cast<int64_t>(i);
            }
        }
        diag_mask_.push_back(mask);
        std::vector<int32_t> img(size_t{1} << s.targets.size());
        for (uint32_t x = 0; x < img.size(); x++) {
            auto r = op_classical_image(s.op, x);
            img[x] = r ? static_cast<int32_t>(*r) : -1;
        }
        image_.push_back(std::move(img));
    }
    // events_[i]: qubits that become done after step i; the extra last entry holds those done at the start.
    events_.assign(steps.size() + 1, {});
    for (uint32_t q = 0; q < n; q++) {
        if (kept_[q]) {
            continue;
        }
        int64_t when = last_use_[q];
        if (config_.classicalize) {
            when = std::min(when, ready_after_[q]);
        }
        events_[when < 0 ? steps.size() : static_cast<size_t>(when)].push_back(q);
    }
}

bool Executor::done(uint32_t q, int64_t i) const {
    if (kept_[q]) {
        return false;
    }
    if (last_use_[q] <= i) {
        return true;
    }
    return config_.classicalize && ready_after_[q] <= i;
}

RunResult Executor::run(const FaultPattern &faults, uint64_t seed) const {
    return run_schedule(make_schedule(circuit_, table_, faults), seed);
}

RunResult Executor::run_schedule(const FaultSchedule &schedule, uint64_t seed) const {
    Machine m(*this, seed);
    return m.run(schedule);
}

std::vector<amp> mixture_density_matrix(const RunResult &r, std::span<const unsigned> qubits) {
    std::vector<amp> rho;
    for (const auto &b : r.branches) {
        auto part = reduced_density_matrix(b.state, qubits);
        if (rho.empty()) {
            rho.assign(part.size(), amp{0.0});
        }
        for (size_t i = 0; i < part.size(); i++) {
            rho[i] += b.weight * part[i];
        }
    }
    return rho;
}

double mixture_expectation_z(const RunResult &r, unsigned qubit) {
    double s = 0;
    for (const auto &b : r.branches) {
        s += b.weight * expectation_z(b.state, qubit);
    }
    return s;
}

double mixture_fidelity(const RunResult &r, std::span<const unsigned> qubits, const StateVector &target) {
    double s = 0;
    for (const auto &b : r.branches) {
        s += b.weight * subsystem_fidelity(b.state, qubits, target);
    }
    return s;
}

double mixture_purity(const RunResult &r, std::span<const unsigned> qubits) {
    return purity(mixture_density_matrix(r, qubits));
}

}  // namespace ensq
