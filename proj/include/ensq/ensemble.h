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

#ifndef ENSQ_ENSEMBLE_H
#define ENSQ_ENSEMBLE_H

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ensq/circuit.h"
#include "ensq/noise.h"
#include "ensq/runner.h"

namespace ensq {

/// m computers of `register_width` qubits each, then `workspace` shared qubits.
struct MoleculeSpec {
    unsigned computers_per_molecule = 1;
    unsigned register_width = 1;
    unsigned workspace = 0;

    unsigned total_qubits() const {
        return computers_per_molecule * register_width + workspace;
    }
    /// Index of bit `bit` of computer `computer`.
    uint32_t qubit(unsigned computer, unsigned bit) const;
    uint32_t workspace_qubit(unsigned i) const;
    /// Throws std::invalid_argument on zero sizes, CapacityError past the qubit cap.
    void validate() const;
};

/// Per-qubit <Z> averaged over molecules. molecules == 0 means the exact (infinite ensemble) readout.
struct EnsembleReadout {
    std::vector<double> means;
    std::vector<double> stderrs;
    uint64_t molecules = 0;
    uint64_t seed = 0;
    double p = 0;

    std::string to_json() const;
    /// Header `qubit,mean,stderr`, one row per qubit.
    std::string to_csv() const;
    static EnsembleReadout from_json(const std::string &text);
};

enum class BitValue : int8_t { kZero = 0, kOne = 1, kIndeterminate = -1 };
const char *bit_value_name(BitValue v);

struct EnsembleOptions {
    /// 0 = all hardware threads.
    unsigned workers = 0;
    /// Per-trial readout is one sampled +-1 per qubit instead of the exact <Z>.
    bool sample_bits = false;
    /// Measure control-only qubits early (same statistics, fewer live qubits).
    bool classicalize = true;
    std::vector<ExternalInput> inputs;
};

/// Exact per-qubit <Z> of the noise-free final state.
EnsembleReadout run_exact(const Circuit &circuit, const EnsembleOptions &options = {});

/// M molecules, each with its own fault pattern drawn with derive_seed(seed, i). Results do not
/// depend on the number of workers.
EnsembleReadout run_monte_carlo(const Circuit &circuit, const NoiseModel &model, uint64_t molecules, uint64_t seed,
                                const EnsembleOptions &options = {});

/// Mean and standard error per column of `rows` (molecules x width, row-major), summed in row order.
EnsembleReadout readout_from_rows(std::span<const double> rows, unsigned width);

/// Per-qubit <Z> of one molecule under a given fault pattern.
std::vector<double> molecule_expectations(const Circuit &circuit, const FaultPattern &faults,
                                          const EnsembleOptions &options = {});

/// 0 if mean > threshold, 1 if mean < -threshold, otherwise indeterminate.
std::vector<BitValue> decode_bits(const EnsembleReadout &readout, std::span<const uint32_t> qubits,
                                  double threshold = 0.05);
BitValue decode_value(double mean, double threshold = 0.05);

/// Smallest M with sigmas * spread / sqrt(M) < threshold (spread: per-molecule standard deviation).
uint64_t molecules_for_threshold(double threshold, double spread = 1.0, double sigmas = 5.0);

}  // namespace ensq

#endif
