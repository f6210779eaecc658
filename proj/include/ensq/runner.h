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

#ifndef ENSQ_RUNNER_H
#define ENSQ_RUNNER_H

#include <cstdint>
#include <vector>

#include "ensq/circuit.h"
#include "ensq/state_vector.h"

namespace ensq {

/// How measurement outcomes of traced-out or classicalized qubits are handled.
///   kEnumerate: keep every outcome as a weighted branch (exact mixture).
///   kSample: follow one outcome drawn from the run's RNG.
enum class Branching { kEnumerate, kSample };

/// A state supplied for some circuit qubits instead of their init bits. Kept as a separate
/// product factor until a gate couples it to the rest.
struct ExternalInput {
    std::vector<uint32_t> qubits;
    StateVector state;
};

struct RunConfig {
    /// Measure a qubit as soon as every later use is diagonal in it (deferred measurement).
    bool classicalize = false;
    Branching branching = Branching::kEnumerate;
    /// Qubits returned as a pure state per branch, in this order. Everything else is traced out.
    std::vector<uint32_t> keep;
    /// Qubits whose classical value is reported per branch.
    std::vector<uint32_t> record;
    std::vector<ExternalInput> inputs;
    /// With classicalize + sample, couplings that do not fit under the cap are resolved by
    /// measuring the external block instead of merging it.
    bool allow_deferral = true;
    /// Report <Z> of every qubit per branch, taken when the qubit dies or at the end.
    bool observe_z = false;
    size_t max_branches = 4096;
    /// Limit on amplitudes stored across all branches (16 bytes each).
    size_t max_amplitudes = size_t{1} << 26;
    double merge_tol = 1e-12;
};

struct Branch {
    double weight = 1;
    StateVector state;
    /// One entry per RunConfig::record qubit: 0/1, or -1 when that qubit is kept quantum.
    std::vector<int8_t> record;
    /// Per-qubit <Z> when RunConfig::observe_z is set.
    std::vector<double> z;
};

struct RunStats {
    unsigned peak_live = 0;
    size_t peak_branches = 1;
    size_t absorptions = 0;
};

struct RunResult {
    std::vector<Branch> branches;
    RunStats stats;
};

/// Executes a circuit allocating qubits lazily: qubits that are never put in superposition stay
/// classical bits, and qubits are dropped from the dense register as soon as they die.
class Executor {
   public:
    Executor(Circuit circuit, RunConfig config);
    RunResult run(const FaultPattern &faults = {}, uint64_t seed = 0) const;
    RunResult run_schedule(const FaultSchedule &schedule, uint64_t seed) const;

    const Circuit &circuit() const {
        return circuit_;
    }
    const LocationTable &locations() const {
        return table_;
    }
    const RunConfig &config() const {
        return config_;
    }
    /// True once qubit q needs no quantum treatment after step i.
    bool done(uint32_t q, int64_t i) const;

   private:
    friend class Machine;
    Circuit circuit_;
    RunConfig config_;
    LocationTable table_;
    std::vector<int64_t> last_use_;
    std::vector<int64_t> ready_after_;
    std::vector<char> kept_;
    std::vector<char> recorded_;
    std::vector<std::vector<int32_t>> image_;
    std::vector<uint32_t> diag_mask_;
    std::vector<std::vector<uint32_t>> events_;
};

/// Density-matrix style summaries of a mixture of branches.
std::vector<amp> mixture_density_matrix(const RunResult &r, std::span<const unsigned> qubits);
double mixture_expectation_z(const RunResult &r, unsigned qubit);
double mixture_fidelity(const RunResult &r, std::span<const unsigned> qubits, const StateVector &target);
double mixture_purity(const RunResult &r, std::span<const unsigned> qubits);

}  // namespace ensq

#endif
