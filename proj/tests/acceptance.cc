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

// Acceptance checks: one PASS/FAIL line per criterion, tolerances pinned below.
//
// Usage: ensq_acceptance [path to the ensq CLI]   (criterion 12 also runs the CLI when given)
//
// Exit status is 0 when every criterion passes except those listed in kKnownFailures, which must
// still fail (each one is analysed in the decisions ledger).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ensq/algorithms.h"
#include "ensq/codes.h"
#include "ensq/ensemble.h"
#include "ensq/gadgets.h"

using namespace ensq;

namespace {

// ---- pinned tolerances ----
constexpr double kFidelityTol = 1e-9;
constexpr double kBackPropTol = 1e-12;
constexpr double kEigenTol = 1e-10;
constexpr double kSlopeTarget = 2.0;
constexpr double kSlopeTol = 0.3;
constexpr uint64_t kSweepTrials = 100000;
constexpr uint64_t kSweepSeed = 42;
constexpr unsigned kSweepNRep = 3;
constexpr double kShorTol = 1e-10;
constexpr double kDivisorRelTol = 0.10;
// Independent enumeration (tests/oracles/order_oracle.py), r = 12, q = 256.
constexpr double kDivisorOracle = 0.561568988487456;
constexpr double kNaiveObscured = 0.05;
constexpr double kQueryRatioMax = 2.0;
constexpr double kTeleportQuantumTol = 1e-10;
constexpr double kTeleportStandardTol = 1e-10;
constexpr double kSenderTol = 1e-12;
constexpr double kRuntime1 = 10, kRuntime3 = 300, kRuntime5 = 600;  // seconds

const std::set<int> kKnownFailures = {8};

struct Line {
    int id;
    bool pass;
    std::string detail;
};

std::vector<Line> lines;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char *f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

void report(int id, bool pass, const std::string &detail) {
    lines.push_back({id, pass, detail});
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

// Runs a criterion body; exceptions count as failures.
void run(int id, const std::function<void()> &body) {
    try {
        body();
    } catch (const std::exception &e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

StateVector random_state(unsigned nq, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<amp> a(size_t{1} << nq);
    for (auto &x : a) {
        x = amp(g(rng), g(rng));
    }
    StateVector s = StateVector::from_amplitudes(a, 1e300);
    s.normalize();
    return s;
}

StateVector logical(const CodeSpec &code, int v) {
    return v ? code.logical_one() : code.logical_zero();
}

StateVector mix(const StateVector &a, const StateVector &b, amp alpha, amp beta) {
    StateVector s = a;
    for (size_t i = 0; i < s.size(); i++) {
        s.mutable_amplitudes()[i] = alpha * a[i] + beta * b[i];
    }
    return s;
}

StateVector apply_t(const StateVector &s) {
    return StateVector::from_amplitudes({s[0], s[1] * std::polar(1.0, std::numbers::pi / 4)});
}

StateVector apply_toffoli(const StateVector &s) {
    std::vector<amp> a(8);
    for (unsigned x = 0; x < 8; x++) {
        a[(x & 6) == 6 ? x ^ 1 : x] = s[x];
    }
    return StateVector::from_amplitudes(a);
}

// ---- 1: copy truth table ----
void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    double worst = 1;
    for (auto k : {CodeKind::kSteane7, CodeKind::kBitflip3}) {
        const auto &code = CodeSpec::get(k);
        for (int v = 0; v < 2; v++) {
            for (int c0 = 0; c0 < 2; c0++) {
                CircuitBuilder b;
                auto block = b.allocate_block(code.n());
                std::vector<uint32_t> reg;
                for (int r = 0; r < 3; r++) {
                    uint32_t t = b.allocate(c0 == 1);
                    auto lay = append_n1(b, code, block);
                    b.add(Gate::CNOT(), {lay.target, t});
                    reg.push_back(t);
                }
                RunConfig cfg;
                cfg.keep = block;
                cfg.keep.insert(cfg.keep.end(), reg.begin(), reg.end());
                cfg.inputs.push_back({block, logical(code, v)});
                auto res = Executor(b.build(), cfg).run({});
                // (logical v, classical c) -> (v, c xor v)
                StateVector want = logical(code, v).tensor(StateVector::basis(3, (c0 ^ v) ? 7 : 0));
                double f = 0;
                for (const auto &br : res.branches) {
                    f += br.weight * std::norm(inner(want, br.state));
                }
                worst = std::min(worst, f);
            }
        }
    }
    double secs = seconds_since(t0);
    report(1, worst >= 1 - kFidelityTol && secs < kRuntime1,
           fmt("min fidelity %.12f over 8 cases (steane7, bitflip3), %.2f s", worst, secs));
}

// ---- 2: phase back-propagation ----
void criterion2() {
    double h = 1 / std::sqrt(2.0);
    StateVector plus = StateVector::single(h, h), minus = StateVector::single(h, -h);
    StateVector in = plus.tensor(minus);
    StateVector out = apply_gate(in, Gate::CNOT(), std::vector<unsigned>{0, 1});
    double f = fidelity(out, minus.tensor(minus));
    report(2, f >= 1 - kBackPropTol, fmt("fidelity %.15f", f));
}

// ---- 3: gadgets equal logical gates ----
void criterion3() {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(3);
    double worst_f = 1, worst_p = 1;
    auto note = [&](const GadgetReport &r, const StateVector &target) {
        worst_f = std::min(worst_f, r.fidelity(target));
        worst_p = std::min(worst_p, r.purity());
    };
    const auto &u = CodeSpec::get(CodeKind::kUnencoded1);
    for (int i = 0; i < 20; i++) {
        StateVector s1 = random_state(1, rng);
        note(t_gadget(u, s1), apply_t(s1));
        StateVector s3 = random_state(3, rng);
        note(toffoli_gadget(u, {s3}), apply_toffoli(s3));
    }
    const auto &bf = CodeSpec::get(CodeKind::kBitflip3);
    for (int i = 0; i < 3; i++) {
        StateVector s1 = random_state(1, rng);
        note(t_gadget(bf, encode(bf, s1)), encode(bf, apply_t(s1)));
        StateVector s3 = random_state(3, rng);
        note(toffoli_gadget(bf, {encode_blocks(bf, s3)}), encode_blocks(bf, apply_toffoli(s3)));
    }
    const auto &st = CodeSpec::get(CodeKind::kSteane7);
    GadgetCircuit tg = build_t_gadget(st, st.default_n_rep());
    for (int i = 0; i < 3; i++) {
        StateVector s1 = random_state(1, rng);
        note(run_gadget(tg, {encode(st, s1)}, ExecMode::kDeferredSampling, {}, 10 + i), encode(st, apply_t(s1)));
    }
    for (unsigned x = 0; x < 8; x++) {
        std::vector<StateVector> blocks;
        for (int j = 2; j >= 0; j--) {
            blocks.push_back(logical(st, (x >> j) & 1));
        }
        auto rep = toffoli_gadget(st, blocks, ExecMode::kDeferredSampling, 20 + x);
        note(rep, encode_blocks(st, StateVector::basis(3, (x & 6) == 6 ? x ^ 1 : x)));
    }
    double secs = seconds_since(t0);
    report(3, worst_f >= 1 - kFidelityTol && worst_p >= 1 - kFidelityTol && secs < kRuntime3,
           fmt("min fidelity %.12f, min purity %.12f (unencoded1 x20, bitflip3 coherent, steane7 sampled), %.1f s",
               worst_f, worst_p, secs));
}

// ---- 4: special states ----
void criterion4() {
    std::mt19937_64 rng(4);
    double worst = 1, ident = 0;
    for (auto k : {CodeKind::kSteane7, CodeKind::kBitflip3, CodeKind::kUnencoded1}) {
        const auto &code = CodeSpec::get(k);
        auto ps = psi0_spec(code);
        StateVector p0 = psi_state(code, 1), p1 = psi_state(code, -1);
        ident = std::max(ident, std::abs(inner(p0, apply_bitwise(code, ps.u, 1, p0)) - amp(1)));
        ident = std::max(ident, std::abs(inner(p1, apply_bitwise(code, ps.u, 1, p1)) + amp(1)));
        auto as = and_spec();
        StateVector a0 = and_state(code, false), a1 = and_state(code, true);
        ident = std::max(ident, std::abs(inner(a1, apply_bitwise(code, as.u, 3, a1)) + amp(1)));

        StateVector ab = random_state(1, rng);
        for (const auto &s : {p0, p1, mix(p0, p1, ab[0], ab[1])}) {
            worst = std::min(worst, prepare_eigenvector(code, ps, s, 3).fidelity(p0));
        }
        ExecMode mode = k == CodeKind::kSteane7 ? ExecMode::kDeferredSampling : ExecMode::kCoherent;
        ab = random_state(1, rng);
        for (const auto &s : {a1, mix(a0, a1, ab[0], ab[1])}) {
            GadgetCircuit g = build_eigenvector(code, as, 3);
            worst = std::min(worst, run_gadget(g, {s}, mode, {}, 7).fidelity(a0));
        }
        worst = std::min(worst, prepare_psi0(code).fidelity(p0));
        worst = std::min(worst, prepare_and_state(code, mode).fidelity(a0));
    }
    report(4, worst >= 1 - kFidelityTol && ident <= kEigenTol,
           fmt("min preparation fidelity %.12f (starts: +1, -1 and random mixes; 3 codes), max identity error %.2e",
               worst, ident));
}

// ---- 5: single faults ----
void criterion5() {
    auto t0 = std::chrono::steady_clock::now();
    auto s = n_full_single_fault_sweep(CodeSpec::get(CodeKind::kSteane7), 3, false);
    auto b = n_full_single_fault_sweep(CodeSpec::get(CodeKind::kBitflip3), 3, true);
    // Stand-alone copy: X on any codeword qubit before it.
    size_t n1_cases = 0, n1_fail = 0;
    for (auto k : {CodeKind::kSteane7, CodeKind::kBitflip3}) {
        const auto &code = CodeSpec::get(k);
        Circuit c = build_n1(code);
        for (int v = 0; v < 2; v++) {
            for (uint32_t q = 0; q < code.n(); q++) {
                RunConfig cfg;
                cfg.record = {c.num_qubits() - 1};
                std::vector<uint32_t> block(code.n());
                for (uint32_t i = 0; i < code.n(); i++) {
                    block[i] = i;
                }
                cfg.inputs.push_back({block, logical(code, v)});
                auto r = Executor(c, cfg).run({{{LocationKind::kInput, -1, q}, Pauli::kX}});
                n1_cases++;
                n1_fail += !(r.branches.size() == 1 && r.branches[0].record[0] == v);
            }
        }
    }
    double secs = seconds_since(t0);
    bool pass = s.failures == 0 && b.failures == 0 && n1_fail == 0 && s.cases > 0 && b.cases > 0 &&
                secs < kRuntime5;
    std::ostringstream os;
    os << "n_full steane7 " << s.failures << "/" << s.cases << " failed, bitflip3 (X only) " << b.failures << "/"
       << b.cases << " failed, single copy input X " << n1_fail << "/" << n1_cases << " failed, "
       << fmt("%.1f s", secs);
    report(5, pass, os.str());
}

// ---- 6: O(p^2) ----
double fit_slope(const std::vector<double> &xs, const std::vector<double> &ys) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); i++) {
        mx += std::log(xs[i]);
        my += std::log(ys[i]);
    }
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < xs.size(); i++) {
        double dx = std::log(xs[i]) - mx;
        sxy += dx * (std::log(ys[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

void criterion6() {
    auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> ps{1e-3, 3e-3, 1e-2};
    auto sweep = [&](const CodeSpec &code, unsigned n_rep, std::string &rates) {
        std::vector<double> ys;
        for (double p : ps) {
            auto r = n_full_failure_rate(code, n_rep, NoiseModel(p), kSweepTrials, kSweepSeed);
            ys.push_back(r.rate);
            rates += fmt("%.3g:%.3e ", p, r.rate);
        }
        return ys;
    };
    std::string main_rates, ctx1, ctx2;
    double slope = fit_slope(ps, sweep(CodeSpec::get(CodeKind::kSteane7), kSweepNRep, main_rates));
    double s_bf = fit_slope(ps, sweep(CodeSpec::get(CodeKind::kBitflip3), 3, ctx1));
    double s_7 = fit_slope(ps, sweep(CodeSpec::get(CodeKind::kSteane7), 7, ctx2));
    report(6, std::abs(slope - kSlopeTarget) <= kSlopeTol,
           fmt("steane7 n_rep=3 slope %.3f (", slope) + main_rates + fmt(
               "); context: bitflip3 %.3f, steane7 n_rep=7 %.3f; 1e5 trials each, %.0f s", s_bf, s_7,
               seconds_since(t0)));
}

// ---- 7: modified order finding ----
void criterion7() {
    auto inst = ShorInstance::make(15, 7);
    auto res = shor_ensemble(inst);
    double worst = 0;
    for (unsigned j = 0; j < inst.ell; j++) {
        double bit = (inst.r >> (inst.ell - 1 - j)) & 1;
        worst = std::max(worst, std::abs(res.readout.means[j] - res.p_r * (1 - 2 * bit)));
    }
    // Rejected outcomes on their own.
    auto sc = shor_circuit(inst, ShorMode::kDistribution);
    double rejected = 0;
    size_t rejected_cases = 0;
    for (uint64_t c = 0; c < inst.q; c++) {
        if (verify_order(inst, continued_fraction(c, inst.q).den)) {
            continue;
        }
        EnsembleOptions o;
        o.inputs = {{sc.counting, StateVector::basis(inst.q_bits, c)}};
        auto z = molecule_expectations(sc.wrapped.circuit, {}, o);
        for (uint32_t q : sc.wrapped.result) {
            rejected = std::max(rejected, std::abs(z[q]));
        }
        rejected_cases++;
    }
    double brute = divisor_outcome_probability(12, 256);
    double formula = divisor_failure_probability(12);  // 8 / (3 pi^2)
    double stated = 4 / (3 * std::numbers::pi * std::numbers::pi);
    bool brute_ok = std::abs(brute - kDivisorOracle) <= kDivisorRelTol * kDivisorOracle;
    bool formula_supported = std::abs(formula - brute) <= kDivisorRelTol * brute;
    bool stated_supported = std::abs(stated - brute) <= kDivisorRelTol * brute;
    bool pass = res.decoded == 4 && rejected == 0.0 && worst <= kShorTol && brute_ok;
    std::ostringstream os;
    os << "decoded " << res.decoded << fmt(", p_r %.6f, max |mean - p_r(1-2r_j)| %.1e", res.p_r, worst)
       << ", rejected outcomes " << rejected_cases << fmt(" with max |<Z>| %.1e", rejected)
       << fmt("; divisor outcome P(r=12,q=256) brute force %.6f, formula %.6f, stated %.6f", brute, formula, stated)
       << " -> formula " << (formula_supported ? "supported" : "not supported") << ", stated constant "
       << (stated_supported ? "supported" : "not supported");
    report(7, pass, os.str());
}

// ---- 8: multi-solution search ----
void criterion8() {
    auto inst = GroverInstance::with_solutions(6, {5, 40});
    MultiSolutionOptions o;
    o.m = 4;
    o.molecules = 10000;
    o.seed = 8;
    auto res = grover_multi_solution(inst, o);
    double naive = 0;
    for (unsigned b = 0; b < 6; b++) {
        if (((5 ^ 40) >> (5 - b)) & 1) {
            naive = std::max(naive, std::abs(res.naive.means[b]));
        }
    }
    bool decode_ok = res.first == 5 && res.last == 40 && naive < kNaiveObscured;

    // Exhaustive enumeration against the literal 1/2^m, and against 2/2^m.
    bool literal = true, doubled = true;
    for (unsigned m = 1; m <= 10; m++) {
        double p = first_equals_last_probability(m, 2);
        literal &= p == std::ldexp(1.0, -static_cast<int>(m));
        doubled &= p == std::ldexp(2.0, -static_cast<int>(m));
    }

    auto three = GroverInstance::with_solutions(10, {100, 600, 900});
    MultiSolutionOptions t3;
    t3.m = 16;
    t3.molecules = 10000;
    t3.seed = 81;
    t3.randomize_equal = false;
    auto r3 = grover_multi_solution(three, t3);
    double bound = std::pow(1 - 1.0 / 3, 16);
    double sigma = std::sqrt(bound * (1 - bound) / t3.molecules);
    bool t3_ok = r3.first_miss_rate <= bound + 3 * sigma;

    std::ostringstream os;
    os << "decoded min " << res.first << " max " << res.last << fmt(", naive max |mean| %.4f", naive)
       << "; t=2 P(first==last) = 1/2^m for m<=10: " << (literal ? "yes" : "no")
       << " (enumeration gives 2/2^m: " << (doubled ? "yes" : "no") << ")"
       << fmt("; t=3 m=16 miss rate %.5f vs bound %.5f + 3 sigma %.5f", r3.first_miss_rate, bound, 3 * sigma);
    report(8, decode_ok && literal && t3_ok, os.str());
}

// ---- 9: binary search ----
void criterion9() {
    std::mt19937_64 rng(9);
    int right = 0, stages_ok = 0, total = 200;
    for (int i = 0; i < total; i++) {
        unsigned n = 1 + rng() % 10;
        uint64_t size = uint64_t{1} << n;
        std::set<uint64_t> s;
        unsigned t = 1 + rng() % 5;
        while (s.size() < std::min<uint64_t>(t, size)) {
            s.insert(rng() % size);
        }
        auto inst = GroverInstance::with_solutions(n, {s.begin(), s.end()});
        auto r = grover_binary_search(inst);
        right += r.found && r.solution == *s.begin();
        stages_ok += r.stages == n;
    }
    std::vector<double> ns, qs;
    for (unsigned n : {6u, 8u, 10u}) {
        std::mt19937_64 g(100 + n);
        double sum = 0;
        const int trials = 100;
        for (int i = 0; i < trials; i++) {
            auto inst = GroverInstance::with_solutions(n, {g() % (uint64_t{1} << n)});
            BinarySearchOptions o;
            o.mode = ExistenceMode::kSimulated;
            o.seed = 5000 + i;
            sum += double(grover_binary_search(inst, o).queries);
        }
        ns.push_back(std::ldexp(1.0, int(n)));
        qs.push_back(sum / trials);
    }
    double num = 0, den = 0, lo = 1e300, hi = 0;
    for (size_t i = 0; i < ns.size(); i++) {
        num += qs[i] * std::sqrt(ns[i]);
        den += ns[i];
        double ratio = qs[i] / std::sqrt(ns[i]);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    double c = num / den;
    bool pass = right == total && stages_ok == total && std::isfinite(c) && c > 0 && hi / lo < kQueryRatioMax;
    report(9, pass,
           fmt("%.0f/200 lexicographic minimum, %.0f/200 stage counts = n_bits; ", right, stages_ok) +
               fmt("mean queries %.0f, %.0f, %.0f at N=2^6,2^8,2^10", qs[0], qs[1], qs[2]) +
               fmt(" -> c = %.2f, max/min of queries/sqrt(N) %.3f", c, hi / lo));
}

// ---- 10: teleportation ----
void criterion10() {
    std::mt19937_64 rng(10);
    double qmin = 1, sdev = 0, sender = 0;
    for (int i = 0; i < 20; i++) {
        StateVector psi = random_state(1, rng);
        qmin = std::min(qmin, teleport_quantum(psi).receiver_fidelity);
        auto st = teleport_standard(psi);
        sdev = std::max(sdev, std::abs(st.receiver_fidelity - 0.5));
        sender = std::max({sender, std::abs(st.readout.means[0]), std::abs(st.readout.means[1])});
    }
    double h = 1 / std::sqrt(2.0);
    for (const auto &psi : {StateVector::single(1, 0), StateVector::single(h, h)}) {
        auto st = teleport_standard(psi);
        sdev = std::max(sdev, std::abs(st.receiver_fidelity - 0.5));
        sender = std::max({sender, std::abs(st.readout.means[0]), std::abs(st.readout.means[1])});
    }
    report(10, qmin >= 1 - kTeleportQuantumTol && sdev <= kTeleportStandardTol && sender <= kSenderTol,
           fmt("coherent min fidelity %.12f; standard max |F - 0.5| %.1e, max |sender mean| %.1e", qmin, sdev,
               sender));
}

// ---- 11: recovery ----
void criterion11() {
    const auto &code = CodeSpec::get(CodeKind::kSteane7);
    GadgetCircuit g = build_recover(code, 3);
    size_t nonunitary = 0;
    for (const auto &s : g.circuit.steps()) {
        // Gates are unitary by construction; oracles are permutations. Anything else is a measurement.
        if (!std::holds_alternative<Gate>(s.op) && !std::holds_alternative<Oracle>(s.op)) {
            nonunitary++;
        }
    }
    double h = 1 / std::sqrt(2.0);
    std::vector<StateVector> ins{code.logical_zero(), code.logical_one(), encode(code, StateVector::single(h, h)),
                                 encode(code, StateVector::single(0.6, amp(0, 0.8)))};
    double worst = 1;
    size_t cases = 0;
    for (const auto &in : ins) {
        for (uint32_t q = 0; q < 7; q++) {
            for (Pauli p : {Pauli::kX, Pauli::kY, Pauli::kZ}) {
                FaultPattern f{{{LocationKind::kInput, -1, q}, p}};
                worst = std::min(worst, run_gadget(g, {in}, ExecMode::kDeferredExact, f).fidelity(in));
                cases++;
            }
        }
    }
    report(11, worst >= 1 - kFidelityTol && nonunitary == 0,
           fmt("min fidelity %.12f over %.0f cases (21 Paulis x 4 states); ", worst, double(cases)) +
               fmt("%.0f non-unitary steps in %.0f", double(nonunitary), double(g.circuit.steps().size())));
}

// ---- 12: determinism ----
std::string capture(const std::string &cmd) {
    std::string out;
    FILE *f = popen(cmd.c_str(), "r");
    if (!f) {
        return "<popen failed>";
    }
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, f)) > 0) {
        out.append(buf, n);
    }
    int status = pclose(f);
    return out + "\n<status " + std::to_string(status) + ">";
}

void criterion12(const std::string &cli, const std::string &root) {
    size_t same = 0, total = 0;
    auto pair = [&](const std::string &a, const std::string &b) {
        total++;
        same += a == b;
    };
    EnsembleOptions one, four;
    one.workers = 1;
    four.workers = 4;
    Circuit c = teleport_circuit(true);
    pair(run_monte_carlo(c, NoiseModel(0.05), 3000, 12, one).to_json(),
         run_monte_carlo(c, NoiseModel(0.05), 3000, 12, four).to_json());
    const auto &bf = CodeSpec::get(CodeKind::kBitflip3);
    auto ra = n_full_failure_rate(bf, 3, NoiseModel(0.02), 5000, 12, 1);
    auto rb = n_full_failure_rate(bf, 3, NoiseModel(0.02), 5000, 12, 4);
    pair(std::to_string(ra.failures), std::to_string(rb.failures));
    ShorOptions so;
    so.molecules = 3000;
    so.seed = 12;
    so.workers = 1;
    auto sa = to_json(shor_ensemble(ShorInstance::make(21, 2), so));
    so.workers = 4;
    pair(sa, to_json(shor_ensemble(ShorInstance::make(21, 2), so)));
    BinarySearchOptions bo;
    bo.mode = ExistenceMode::kSimulated;
    bo.seed = 12;
    auto g = GroverInstance::with_solutions(9, {77, 300});
    pair(to_json(grover_binary_search(g, bo)), to_json(grover_binary_search(g, bo)));
    if (!cli.empty()) {
        const std::vector<std::string> cmds{
            "--seed 12 --molecules 2000 --p 0.03 simulate " + root + "/data/circuits/bell_sender.txt --format csv",
            "--seed 12 sweep n_full --code bitflip3 --ps 0.01,0.02 --trials 4000",
            "--seed 12 --molecules 2000 demo shor --n 15 --x 7",
            "--seed 12 --molecules 2000 demo grover-multi --bits 6 --solutions 5,40",
            "--seed 12 demo grover-binary --bits 8 --solutions 42",
            "--seed 12 demo teleport --mode standard",
            "--seed 12 gadget n_full --code bitflip3 --faults single"};
        for (const auto &cmd : cmds) {
            pair(capture(cli + " --workers 1 " + cmd + " 2>&1"), capture(cli + " --workers 3 " + cmd + " 2>&1"));
        }
    }
    report(12, same == total,
           fmt("%.0f/%.0f repeated runs byte-identical (worker counts varied)", double(same), double(total)) +
               (cli.empty() ? " (CLI not given)" : " including CLI commands"));
}

}  // namespace

int main(int argc, char **argv) {
    std::string cli = argc > 1 ? argv[1] : "";
    std::string root = argc > 2 ? argv[2] : ".";
    run(1, criterion1);
    run(2, criterion2);
    run(3, criterion3);
    run(4, criterion4);
    run(5, criterion5);
    run(6, criterion6);
    run(7, criterion7);
    run(8, criterion8);
    run(9, criterion9);
    run(10, criterion10);
    run(11, criterion11);
    run(12, [&] { criterion12(cli, root); });

    int passed = 0, unexpected = 0;
    for (const auto &l : lines) {
        passed += l.pass;
        bool known = kKnownFailures.count(l.id) != 0;
        if (l.pass == known) {
            unexpected++;
            std::printf("unexpected result for criterion %d (%s)\n", l.id, l.pass ? "passed" : "failed");
        }
    }
    std::printf("%d/%zu criteria pass; known failures:", passed, lines.size());
    for (int id : kKnownFailures) {
        std::printf(" %d", id);
    }
    std::printf("\n");
    return unexpected == 0 ? 0 : 1;
}
