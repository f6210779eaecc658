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

#ifndef ENSQ_NOISE_H
#define ENSQ_NOISE_H

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ensq/circuit.h"

namespace ensq {

/// Relative rates of X, Z and Y faults; normalized on construction of a NoiseModel.
struct PauliWeights {
    double x = 1.0 / 3;
    double z = 1.0 / 3;
    double y = 1.0 / 3;
};

class NoiseModel {
   public:
    explicit NoiseModel(double p = 0, PauliWeights weights = {});
    double p() const {
        return p_;
    }
    const PauliWeights &weights() const {
        return w_;
    }
    Pauli draw_pauli(std::mt19937_64 &rng) const;

   private:
    double p_;
    PauliWeights w_;
};

/// Every fault site in canonical order: inputs by qubit, then per layer gate outputs then idle qubits.
std::vector<FaultLocation> enumerate_locations(const Circuit &circuit);

/// Each location faulted independently with probability p. Deterministic for a given seed.
FaultPattern sample_pattern(const Circuit &circuit, const NoiseModel &model, uint64_t seed);
FaultPattern sample_pattern(const std::vector<FaultLocation> &locations, const NoiseModel &model, std::mt19937_64 &rng);

/// One pattern per (location, Pauli), Paulis in the order X, Z, Y.
std::vector<FaultPattern> all_single_faults(const Circuit &circuit);
std::vector<FaultPattern> all_single_faults(const std::vector<FaultLocation> &locations);

/// Seed for trial `index` of a run seeded with `seed` (splitmix64 finalizer over both).
uint64_t derive_seed(uint64_t seed, uint64_t index);

std::string pattern_to_json(const FaultPattern &pattern);
FaultPattern pattern_from_json(const std::string &text);

}  // namespace ensq

#endif
