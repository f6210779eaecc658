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

// ensq command-line front end.
//
// Exit codes: 0 success, 2 usage or parse error, 3 resource cap, 4 verification failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ensq/algorithms.h"
#include "ensq/codes.h"
#include "ensq/ensemble.h"
#include "ensq/gadgets.h"
#include "json.hpp"

using namespace ensq;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitCap = 3;
constexpr int kExitVerify = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    uint64_t seed = 20260101;
    uint64_t molecules = 0;
    double p = 0;
    std::string code = "steane7";
    std::string format = "json";
    std::string out;
    unsigned workers = 0;
    bool deferred_sampling = false;
};

void emit(const Options &o, const std::string &text) {
    if (o.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') {
            std::cout << '\n';
        }
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) {
        throw UsageError("cannot write " + o.out);
    }
    f << text;
    if (!text.empty() && text.back() != '\n') {
        f << '\n';
    }
}

std::string read_file(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw UsageError("cannot read " + path);
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// ---- simulate ----

int cmd_simulate(const Options &o, const std::string &path) {
    Circuit c;
    try {
        c = parse_circuit(read_file(path));
    } catch (const ParseError &e) {
        std::cerr << "error: " << path << ": " << e.what() << "\n";
        return kExitUsage;
    }
    if (c.num_qubits() > qubit_cap()) {
        throw CapacityError(c.num_qubits(), qubit_cap(), path);
    }
    EnsembleOptions eo;
    eo.workers = o.workers;
    EnsembleReadout r;
    if (o.molecules == 0) {
        if (o.p > 0) {
            throw UsageError("--p needs --molecules > 0");
        }
        r = run_exact(c, eo);
        r.seed = o.seed;
    } else {
        r = run_monte_carlo(c, NoiseModel(o.p), o.molecules, o.seed, eo);
    }
    emit(o, o.format == "csv" ? r.to_csv() : r.to_json());
    return 0;
}

// ---- gadget ----

struct Case {
    std::string name;
    bool pass = false;
    double value = 0;
};

StateVector logical(const CodeSpec &code, int v) {
    return v ? code.logical_one() : code.logical_zero();
}

StateVector apply_one(const StateVector &s, const Gate &g, std::vector<unsigned> q) {
    return apply_gate(s, g, q);
}

std::vector<StateVector> test_states() {
    double h = 1 / std::sqrt(2.0);
    return {StateVector::single(1, 0), StateVector::single(0, 1), StateVector::single(h, h),
            StateVector::single(std::cos(0.4), std::polar(std::sin(0.4), 0.9))};
}

std::vector<Case> gadget_cases(const std::string &name, const CodeSpec &code, bool single, ExecMode mode,
                               uint64_t seed, unsigned workers) {
    std::vector<Case> cases;
    const double tol = 1e-9;
    auto add = [&](std::string n, double fid) { cases.push_back({std::move(n), fid > 1 - tol, fid}); };
    if (name == "n1") {
        Circuit c = build_n1(code);
        uint32_t target = c.num_qubits() - 1;
        for (int v = 0; v < 2; v++) {
            for (int pos = -1; pos < (single ? static_cast<int>(code.n()) : 0); pos++) {
                RunConfig cfg;
                cfg.record = {target};
                cfg.inputs.push_back({{}, logical(code, v)});
                for (uint32_t q = 0; q < code.n(); q++) {
                    cfg.inputs[0].qubits.push_back(q);
                }
                FaultPattern f;
                if (pos >= 0) {
                    f.push_back({{LocationKind::kInput, -1, static_cast<uint32_t>(pos)}, Pauli::kX});
                }
                auto r = Executor(c, cfg).run(f);
                bool ok = r.branches.size() == 1 && r.branches[0].record[0] == v;
                std::string label = "input " + std::to_string(v) + "_L" +
                                    (pos < 0 ? std::string(", no fault") : ", X on qubit " + std::to_string(pos));
                cases.push_back({label, ok, ok ? 1.0 : 0.0});
            }
        }
    } else if (name == "n_full") {
        unsigned n_rep = code.default_n_rep();
        auto clean = n_full_failure_rate(code, n_rep, NoiseModel(0), 2, seed, workers);
        cases.push_back({"inputs 0_L and 1_L, no fault", clean.failures == 0, 1.0 - clean.rate});
        if (single) {
            bool x_only = code.phase_checks().empty();
            auto s = n_full_single_fault_sweep(code, n_rep, x_only, workers);
            cases.push_back({"all " + std::to_string(s.cases) + " single faults" + (x_only ? " (X only)" : ""),
                             s.failures == 0, 1.0 - double(s.failures) / double(std::max<size_t>(s.cases, 1))});
        }
    } else if (name == "psi0") {
        add("prepared state", prepare_psi0(code, mode).fidelity(psi_state(code)));
    } else if (name == "and_state") {
        add("prepared state", prepare_and_state(code, mode).fidelity(and_state(code)));
    } else if (name == "t") {
        GadgetCircuit g = build_t_gadget(code, code.default_n_rep());
        int i = 0;
        for (const auto &l : test_states()) {
            auto rep = run_gadget(g, {encode(code, l)}, mode, {}, seed);
            add("input state " + std::to_string(i++), rep.fidelity(encode(code, apply_one(l, Gate::T(), {0}))));
        }
    } else if (name == "toffoli") {
        for (unsigned x = 0; x < 8; x++) {
            std::vector<StateVector> blocks;
            for (int j = 2; j >= 0; j--) {
                blocks.push_back(logical(code, (x >> j) & 1));
            }
            auto rep = toffoli_gadget(code, blocks, mode, seed);
            unsigned y = (x & 6) == 6 ? x ^ 1 : x;
            add("input " + std::to_string(x), rep.fidelity(encode_blocks(code, StateVector::basis(3, y))));
        }
    } else if (name == "recover") {
        int i = 0;
        for (const auto &l : test_states()) {
            StateVector clean = encode(code, l);
            add("input state " + std::to_string(i) + ", no fault", recover(code, clean, mode).fidelity(clean));
            if (single) {
                for (uint32_t q = 0; q < code.n(); q++) {
                    for (char pc : std::string(code.phase_checks().empty() ? "X" : "XYZ")) {
                        StateVector hit = clean;
                        hit.apply_pauli(pc, q);
                        add("input state " + std::to_string(i) + ", " + pc + " on qubit " + std::to_string(q),
                            recover(code, hit, mode).fidelity(clean));
                    }
                }
            }
            i++;
        }
    } else {
        throw UsageError("unknown gadget '" + name + "' (n1, n_full, psi0, t, and_state, toffoli, recover)");
    }
    return cases;
}

int cmd_gadget(const Options &o, const std::string &name, const std::string &faults) {
    if (faults != "none" && faults != "single") {
        throw UsageError("--faults must be none or single");
    }
    const CodeSpec &code = CodeSpec::by_name(o.code);
    ExecMode mode = o.deferred_sampling ? ExecMode::kDeferredSampling : ExecMode::kCoherent;
    std::vector<Case> cases;
    try {
        cases = gadget_cases(name, code, faults == "single", mode, o.seed, o.workers);
    } catch (const CapacityError &e) {
        std::cerr << "error: " << e.what() << "\n"
                  << "hint: rerun with --deferred-sampling to resolve measurements one branch at a time\n";
        return kExitCap;
    }
    bool all = true;
    nlohmann::json j;
    j["gadget"] = name;
    j["code"] = code.name();
    j["mode"] = exec_mode_name(mode);
    j["faults"] = faults;
    for (const auto &c : cases) {
        all &= c.pass;
        j["cases"].push_back({{"case", c.name}, {"pass", c.pass}, {"score", c.value}});
    }
    j["pass"] = all;
    if (o.format == "csv") {
        std::string s = "case,pass,score\n";
        for (const auto &c : cases) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.12g", c.value);
            s += "\"" + c.name + "\"," + (c.pass ? "1" : "0") + "," + buf + "\n";
        }
        emit(o, s);
    } else {
        emit(o, j.dump(2));
    }
    return all ? 0 : kExitVerify;
}

// ---- sweep ----

int cmd_sweep(const Options &o, const std::string &name, const std::vector<double> &ps, uint64_t trials,
              unsigned n_rep) {
    if (name != "n_full") {
        throw UsageError("sweep supports the n_full gadget only");
    }
    if (trials == 0) {
        throw UsageError("--trials must be positive");
    }
    const CodeSpec &code = CodeSpec::by_name(o.code);
    if (code.kind() == CodeKind::kUnencoded1) {
        throw UsageError("n_full needs an encoded code");
    }
    unsigned reps = n_rep ? n_rep : code.default_n_rep();
    std::string csv = "p,failures,trials,rate,stderr\n";
    for (double p : ps) {
        auto r = n_full_failure_rate(code, reps, NoiseModel(p), trials, o.seed, o.workers);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.12g,%llu,%llu,%.12g,%.12g\n", p, static_cast<unsigned long long>(r.failures),
                      static_cast<unsigned long long>(r.trials), r.rate, r.stderr_);
        csv += buf;
    }
    emit(o, csv);
    return 0;
}

// ---- demo ----

struct DemoParams {
    double p = 0.25;
    std::string mode = "standard";
    double theta = 1.0;
    double phi = 0.5;
    uint64_t n = 15;
    uint64_t x = 7;
    std::string shor_mode = "distribution";
    unsigned bits = 6;
    std::vector<uint64_t> solutions;
    unsigned m = 4;
    bool no_randomize = false;
    std::string existence = "simulated";
};

int cmd_demo(const Options &o, const std::string &name, const DemoParams &d) {
    std::string out;
    if (name == "rng") {
        out = rng_demo(d.p).to_json();
    } else if (name == "teleport") {
        StateVector psi = StateVector::single(std::cos(d.theta / 2), std::polar(std::sin(d.theta / 2), d.phi));
        if (d.mode == "standard") {
            out = to_json(teleport_standard(psi));
        } else if (d.mode == "quantum") {
            out = to_json(teleport_quantum(psi));
        } else {
            throw UsageError("--mode must be standard or quantum");
        }
    } else if (name == "shor") {
        ShorInstance inst;
        try {
            inst = ShorInstance::make(d.n, d.x);
        } catch (const std::invalid_argument &e) {
            throw UsageError(e.what());
        }
        ShorOptions so;
        so.molecules = o.molecules;
        so.seed = o.seed;
        so.workers = o.workers;
        if (d.shor_mode == "full") {
            so.mode = ShorMode::kFullCircuit;
        } else if (d.shor_mode != "distribution") {
            throw UsageError("--shor-mode must be distribution or full");
        }
        out = to_json(shor_ensemble(inst, so));
    } else if (name == "grover-multi" || name == "grover-binary") {
        if (d.bits == 0 || d.bits > 20) {
            throw UsageError("--bits must lie in [1, 20]");
        }
        GroverInstance inst;
        try {
            inst = GroverInstance::with_solutions(d.bits, d.solutions);
        } catch (const std::invalid_argument &e) {
            throw UsageError(e.what());
        }
        if (name == "grover-multi") {
            MultiSolutionOptions mo;
            mo.m = d.m;
            mo.molecules = o.molecules ? o.molecules : 10000;
            mo.seed = o.seed;
            mo.workers = o.workers;
            mo.randomize_equal = !d.no_randomize;
            out = to_json(grover_multi_solution(inst, mo));
        } else {
            BinarySearchOptions bo;
            bo.seed = o.seed;
            bo.mode = ExistenceMode::kSimulated;
            if (d.existence == "exact") {
                bo.mode = ExistenceMode::kExact;
            } else if (d.existence != "simulated") {
                throw UsageError("--existence must be exact or simulated");
            }
            out = to_json(grover_binary_search(inst, bo));
        }
    } else {
        throw UsageError("unknown demo '" + name + "' (rng, teleport, shor, grover-multi, grover-binary)");
    }
    emit(o, out);
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"ensemble quantum computation simulator"};
    app.require_subcommand(1);
    // Global flags may follow the subcommand.
    app.fallthrough();
    Options o;
    app.add_option("--seed", o.seed, "RNG seed")->envname("ENSQ_SEED");
    app.add_option("--molecules", o.molecules, "molecules (0 = exact readout)")->envname("ENSQ_MOLECULES");
    app.add_option("--p", o.p, "fault rate")->check(CLI::Range(0.0, 1.0))->envname("ENSQ_P");
    app.add_option("--code", o.code, "steane7, bitflip3 or unencoded1")
        ->check(CLI::IsMember({"steane7", "bitflip3", "unencoded1"}))
        ->envname("ENSQ_CODE");
    app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->envname("ENSQ_FORMAT");
    app.add_option("--out", o.out, "output file (default stdout)")->envname("ENSQ_OUT");
    app.add_option("--workers", o.workers, "worker threads (0 = all)")->envname("ENSQ_WORKERS");
    app.add_flag("--deferred-sampling", o.deferred_sampling, "follow one sampled branch per run")
        ->envname("ENSQ_DEFERRED_SAMPLING");

    std::string circuit_file;
    auto *sim = app.add_subcommand("simulate", "run a circuit file and print the ensemble readout");
    sim->add_option("circuit", circuit_file, "circuit text file")->required();

    std::string gadget_name, faults = "none";
    auto *gad = app.add_subcommand("gadget", "verify a gadget");
    gad->add_option("name", gadget_name, "n1, n_full, psi0, t, and_state, toffoli, recover")->required();
    gad->add_option("--faults", faults, "none or single");

    std::string sweep_name;
    std::vector<double> ps;
    uint64_t trials = 10000;
    unsigned n_rep = 0;
    auto *sw = app.add_subcommand("sweep", "Monte-Carlo failure rates over fault rates");
    sw->add_option("name", sweep_name, "gadget (n_full)")->required();
    sw->add_option("--ps", ps, "fault rates in [0, 0.1]")->required()->delimiter(',')->check(CLI::Range(0.0, 0.1));
    sw->add_option("--trials", trials, "trials per fault rate");
    sw->add_option("--n-rep", n_rep, "register length (default 2k+1)");

    std::string demo_name;
    DemoParams d;
    auto *dm = app.add_subcommand("demo", "run an algorithm demo");
    dm->add_option("name", demo_name, "rng, teleport, shor, grover-multi, grover-binary")->required();
    dm->add_option("--rng-p", d.p, "rng: probability of 0")->check(CLI::Range(0.0, 1.0));
    dm->add_option("--mode", d.mode, "teleport: standard or quantum");
    dm->add_option("--theta", d.theta, "teleport: input polar angle");
    dm->add_option("--phi", d.phi, "teleport: input phase");
    dm->add_option("--n", d.n, "shor: modulus");
    dm->add_option("--x", d.x, "shor: base");
    dm->add_option("--shor-mode", d.shor_mode, "shor: distribution or full");
    dm->add_option("--bits", d.bits, "grover: search register width");
    dm->add_option("--solutions", d.solutions, "grover: marked values")->delimiter(',');
    dm->add_option("--m", d.m, "grover-multi: computers per molecule");
    dm->add_flag("--no-randomize", d.no_randomize, "grover-multi: keep first/last when equal");
    dm->add_option("--existence", d.existence, "grover-binary: exact or simulated");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*sim) {
            return cmd_simulate(o, circuit_file);
        }
        if (*gad) {
            return cmd_gadget(o, gadget_name, faults);
        }
        if (*sw) {
            return cmd_sweep(o, sweep_name, ps, trials, n_rep);
        }
        return cmd_demo(o, demo_name, d);
    } catch (const CapacityError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCap;
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
