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

#include "ensq/ensemble.h"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "ensq/parallel.h"
#include "json.hpp"

namespace ensq {

uint32_t MoleculeSpec::qubit(unsigned computer, unsigned bit) const {
    if (computer >= computers_per_molecule || bit >= register_width) {
        throw std::out_of_range("molecule qubit index");
    }
    return computer * register_width + bit;
}

uint32_t MoleculeSpec::workspace_qubit(unsigned i) const {
    if (i >= workspace) {
        throw std::out_of_range("molecule workspace index");
    }
    return computers_per_molecule * register_width + i;
}

void MoleculeSpec::validate() const {
    if (computers_per_molecule == 0 || register_width == 0) {
        throw std::invalid_argument("a molecule needs at least one computer of at least one qubit");
    }
    if (total_qubits() > qubit_cap()) {
        throw CapacityError(total_qubits(), qubit_cap(), "molecule");
    }
}

namespace {

Executor make_executor(const Circuit &circuit, const EnsembleOptions &o) {
    RunConfig cfg;
    cfg.classicalize = o.classicalize;
    cfg.branching = Branching::kEnumerate;
    cfg.observe_z = true;
    cfg.inputs = o.inputs;
    return Executor(circuit, cfg);
}

std::vector<double> branch_average(const RunResult &r, unsigned n) {
    std::vector<double> z(n, 0.0);
    for (const auto &b : r.branches) {
        for (unsigned q = 0; q < n; q++) {
            z[q] += b.weight * b.z[q];
        }
    }
    return z;
}

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0 ? 0.0 : v);
    return buf;
}

}  // namespace

std::vector<double> molecule_expectations(const Circuit &circuit, const FaultPattern &faults,
                                          const EnsembleOptions &options) {
    return branch_average(make_executor(circuit, options).run(faults), circuit.num_qubits());
}

EnsembleReadout run_exact(const Circuit &circuit, const EnsembleOptions &options) {
    EnsembleReadout r;
    r.means = molecule_expectations(circuit, {}, options);
    r.stderrs.assign(r.means.size(), 0.0);
    return r;
}

EnsembleReadout run_monte_carlo(const Circuit &circuit, const NoiseModel &model, uint64_t molecules, uint64_t seed,
                                const EnsembleOptions &options) {
    if (molecules == 0) {
        throw std::invalid_argument("at least one molecule is required");
    }
    unsigned n = circuit.num_qubits();
    Executor ex = make_executor(circuit, options);
    auto locs = enumerate_locations(circuit);
    std::vector<double> rows(molecules * n);
    parallel_for(molecules, options.workers, [&](size_t i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        FaultPattern pat = sample_pattern(locs, model, rng);
        auto z = branch_average(ex.run(pat, rng()), n);
        if (options.sample_bits) {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (auto &v : z) {
                v = u(rng) < (1 + v) / 2 ? 1.0 : -1.0;
            }
        }
        std::copy(z.begin(), z.end(), rows.begin() + static_cast<std::ptrdiff_t>(i * n));
    });
    EnsembleReadout r = readout_from_rows(rows, n);
    r.seed = seed;
    r.p = model.p();
    return r;
}

EnsembleReadout readout_from_rows(std::span<const double> rows, unsigned n) {
    if (n == 0 || rows.empty() || rows.size() % n != 0) {
        throw std::invalid_argument("rows do not form a molecules x width table");
    }
    uint64_t molecules = rows.size() / n;
    EnsembleReadout r;
    r.molecules = molecules;
    r.means.assign(n, 0.0);
    r.stderrs.assign(n, 0.0);
    // Two passes in index order, so the sums do not depend on scheduling.
    for (uint64_t i = 0; i < molecules; i++) {
        for (unsigned q = 0; q < n; q++) {
            r.means[q] += rows[i * n + q];
        }
    }
    for (auto &m : r.means) {
        m /= static_cast<double>(molecules);
    }
    if (molecules > 1) {
        for (unsigned q = 0; q < n; q++) {
            double ss = 0;
            for (uint64_t i = 0; i < molecules; i++) {
                double d = rows[i * n + q] - r.means[q];
                ss += d * d;
            }
            r.stderrs[q] = std::sqrt(ss / static_cast<double>(molecules - 1) / static_cast<double>(molecules));
        }
    }
    return r;
}

BitValue decode_value(double mean, double threshold) {
    if (!(threshold > 0)) {
        throw std::invalid_argument("threshold must be positive");
    }
    if (mean > threshold) {
        return BitValue::kZero;
    }
    if (mean < -threshold) {
        return BitValue::kOne;
    }
    return BitValue::kIndeterminate;
}

std::vector<BitValue> decode_bits(const EnsembleReadout &readout, std::span<const uint32_t> qubits,
                                  double threshold) {
    std::vector<BitValue> out;
    for (uint32_t q : qubits) {
        out.push_back(decode_value(readout.means.at(q), threshold));
    }
    return out;
}

const char *bit_value_name(BitValue v) {
    switch (v) {
        case BitValue::kZero:
            return "0";
        case BitValue::kOne:
            return "1";
        default:
            return "?";
    }
}

uint64_t molecules_for_threshold(double threshold, double spread, double sigmas) {
    if (!(threshold > 0) || !(spread >= 0) || !(sigmas > 0)) {
        throw std::invalid_argument("threshold, spread and sigmas must be positive");
    }
    double m = std::pow(sigmas * spread / threshold, 2);
    auto out = static_cast<uint64_t>(std::floor(m)) + 1;
    return std::max<uint64_t>(out, 1);
}

std::string EnsembleReadout::to_json() const {
    nlohmann::json j;
    j["molecules"] = molecules;
    j["seed"] = seed;
    j["p"] = p;
    j["means"] = means;
    j["stderrs"] = stderrs;
    return j.dump();
}

std::string EnsembleReadout::to_csv() const {
    std::string out = "qubit,mean,stderr\n";
    for (size_t q = 0; q < means.size(); q++) {
        out += std::to_string(q) + "," + number(means[q]) + "," + number(stderrs.at(q)) + "\n";
    }
    return out;
}

EnsembleReadout EnsembleReadout::from_json(const std::string &text) {
    try {
        auto j = nlohmann::json::parse(text);
        EnsembleReadout r;
        r.molecules = j.at("molecules").get<uint64_t>();
        r.seed = j.at("seed").get<uint64_t>();
        r.p = j.value("p", 0.0);
        r.means = j.at("means").get<std::vector<double>>();
        r.stderrs = j.at("stderrs").get<std::vector<double>>();
        if (r.means.size() != r.stderrs.size()) {
            throw std::invalid_argument("readout JSON: means and stderrs differ in length");
        }
        return r;
    } catch (const nlohmann::json::exception &e) {
        throw std::invalid_argument(std::string("readout JSON: ") + e.what());
    }
}

}  // namespace ensq
