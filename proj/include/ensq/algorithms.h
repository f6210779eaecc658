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

#ifndef ENSQ_ALGORITHMS_H
#define ENSQ_ALGORITHMS_H

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ensq/circuit.h"
#include "ensq/ensemble.h"
#include "ensq/noise.h"
#include "ensq/runner.h"
#include "ensq/state_vector.h"

namespace ensq {

// ---- random bit and teleportation ----

/// One qubit rotated to sqrt(p)|0> + sqrt(1-p)|1>.
Circuit rng_circuit(double p);
/// Exact readout of rng_circuit(p): mean 2p - 1.
EnsembleReadout rng_demo(double p);

struct TeleportReport {
    /// Exact readout of the three qubits (sender 0, 1; receiver 2).
    EnsembleReadout readout;
    /// Average overlap of the receiver qubit with the input.
    double receiver_fidelity = 0;
};

/// Bell measurement replaced by dephasing the sender qubits; no correction is possible.
TeleportReport teleport_standard(const StateVector &psi);
/// Corrections applied coherently with CNOT / CZ from the sender qubits.
TeleportReport teleport_quantum(const StateVector &psi);
Circuit teleport_circuit(bool coherent_correction);

// ---- order finding ----

struct ShorInstance {
    uint64_t n = 0;
    uint64_t x = 0;
    /// Power of two with n^2 < q <= 2 n^2.
    uint64_t q = 0;
    unsigned q_bits = 0;
    /// Order of x mod n.
    uint64_t r = 0;
    /// Width of the result register; every order fits.
    unsigned ell = 0;

    /// Throws std::invalid_argument unless n >= 2, 1 <= x < n and gcd(x, n) = 1.
    static ShorInstance make(uint64_t n, uint64_t x);
};

uint64_t multiplicative_order(uint64_t x, uint64_t n);

/// Outcome probabilities of the counting register. They depend only on r and q.
std::vector<double> order_outcome_distribution(uint64_t r, uint64_t q);

struct Fraction {
    uint64_t num = 0;
    uint64_t den = 1;
    bool operator==(const Fraction &) const = default;
};

/// Reduced fraction of smallest denominator within 1/(2q) of c/q.
Fraction continued_fraction(uint64_t c, uint64_t q);

/// x^r = 1 mod n and no smaller positive exponent works.
bool verify_order(const ShorInstance &inst, uint64_t r_candidate);

/// Probability that an outcome passes verification.
double order_success_probability(const ShorInstance &inst);
/// Probability that the continued fraction returns a proper divisor of r.
double divisor_outcome_probability(uint64_t r, uint64_t q);
/// 4 (r - phi(r)) / (pi^2 r).
double divisor_failure_probability(uint64_t r);
uint64_t euler_phi(uint64_t r);

enum class ShorMode { kDistribution, kFullCircuit };

/// Counting-register order-finding circuit: q_bits counting qubits then the work register holding 1.
Circuit order_finding_circuit(const ShorInstance &inst);
/// Outcome distribution read off the simulated order_finding_circuit.
std::vector<double> simulated_outcome_distribution(const ShorInstance &inst);

/// One computer's outcome c.
uint64_t shor_quantum_sample(const ShorInstance &inst, ShorMode mode, std::mt19937_64 &rng);

// ---- verified functions ----

/// A circuit with its result register and an acceptance circuit.
/// The verifier acts on (result bits, flag, workspace...); it must flip the flag exactly when the
/// result is accepted and return the workspace to 0.
struct WrappedCircuit {
    Circuit circuit;
    std::vector<uint32_t> result;
    std::vector<uint32_t> randomizer;
    uint32_t flag = 0;
};

/// Appends a uniformly random register and the verifier, then swaps the two registers when the
/// result is rejected. With check_verifier, the verifier is run on every basis input of the result
/// register and std::invalid_argument is thrown if it disturbs the result or leaves workspace dirty.
WrappedCircuit np_function_wrapper(const Circuit &producer, std::span<const uint32_t> result, const Circuit &verifier,
                                   bool check_verifier = true);

struct ShorEnsembleResult {
    ShorInstance instance;
    EnsembleReadout readout;  // over the result register, MSB first
    std::vector<BitValue> bits;
    /// Decoded order, or 0 if some bit is indeterminate.
    uint64_t decoded = 0;
    /// Exact probability that a computer holds a verified order.
    double p_r = 0;
};

struct ShorOptions {
    ShorMode mode = ShorMode::kDistribution;
    /// 0: exact readout. Otherwise M computers, each with a sampled outcome.
    uint64_t molecules = 0;
    uint64_t seed = 1;
    unsigned workers = 0;
    double threshold = 0.05;
};

/// Ensemble order finding: the outcome circuit, then the continued fraction into the result
/// register, then np_function_wrapper with the order verifier.
ShorEnsembleResult shor_ensemble(const ShorInstance &inst, const ShorOptions &options = {});

struct ShorCircuit {
    WrappedCircuit wrapped;
    std::vector<uint32_t> counting;
    /// Distribution mode: the counting register enters with amplitudes sqrt(P(c)).
    std::vector<ExternalInput> inputs;
};

/// The whole circuit shor_ensemble runs.
ShorCircuit shor_circuit(const ShorInstance &inst, ShorMode mode);

// ---- search ----

struct GroverInstance {
    unsigned n_bits = 0;
    std::function<bool(uint64_t)> oracle;

    static GroverInstance with_solutions(unsigned n_bits, std::vector<uint64_t> solutions);
    uint64_t size() const {
        return uint64_t{1} << n_bits;
    }
    std::vector<uint64_t> solutions() const;
};

struct GroverRun {
    StateVector state;
    double success_probability = 0;
    /// No solutions and k > 0: the iterate leaves the uniform state alone.
    bool no_solution = false;
};

/// k iterations from the uniform superposition (n_bits <= qubit cap).
GroverRun grover_iterate(const GroverInstance &inst, unsigned k);
/// floor(pi/4 sqrt(N/t)), 0 for t = 0.
unsigned grover_optimal_iterations(uint64_t size, uint64_t t);
/// Probability of each output after k iterations.
std::vector<double> grover_output_distribution(const GroverInstance &inst, unsigned k);

/// Reversible compare-exchange network on m registers of `width` bits (odd-even transposition).
/// Register i occupies qubits [i*width, (i+1)*width); each comparator writes one flag qubit after them.
Circuit sort_network_circuit(unsigned m, unsigned width);
/// The comparator pairs of the network, in order.
std::vector<std::pair<unsigned, unsigned>> odd_even_transposition_pairs(unsigned m);
/// Sorts ascending with the same comparator sequence.
void odd_even_transposition_sort(std::vector<uint64_t> &v);

/// Probability, over m outputs drawn uniformly from t solutions, that the sorted first and last agree.
double first_equals_last_probability(unsigned m, unsigned t);

struct MultiSolutionOptions {
    unsigned m = 4;
    uint64_t molecules = 10000;
    uint64_t seed = 1;
    /// Randomize first and last when they agree (the two-solution rule).
    bool randomize_equal = true;
    /// Grover iterations; 0 means grover_optimal_iterations with the true t.
    unsigned k = 0;
    unsigned workers = 0;
    double threshold = 0.05;
};

struct MultiSolutionResult {
    /// Positions 0 .. m-1, n_bits each.
    EnsembleReadout readout;
    /// Single computer, no sorting.
    EnsembleReadout naive;
    std::vector<BitValue> first_bits;
    std::vector<BitValue> last_bits;
    /// Decoded values, or -1 when some bit is indeterminate.
    int64_t first = -1;
    int64_t last = -1;
    /// Fraction of molecules whose first position is not the smallest solution.
    double first_miss_rate = 0;
    uint64_t randomized = 0;
};

MultiSolutionResult grover_multi_solution(const GroverInstance &inst, const MultiSolutionOptions &options = {});

enum class ExistenceMode { kExact, kSimulated };

struct BinarySearchResult {
    bool found = false;
    uint64_t solution = 0;
    unsigned stages = 0;
    uint64_t queries = 0;
};

struct BinarySearchOptions {
    ExistenceMode mode = ExistenceMode::kExact;
    uint64_t seed = 1;
    /// Iteration budget per existence test, in units of sqrt(subcube size).
    double budget = 18.0;
};

/// Fixes one bit per stage, most significant first, by testing whether solutions exist with the
/// next bit 0. Returns the smallest solution.
BinarySearchResult grover_binary_search(const GroverInstance &inst, const BinarySearchOptions &options = {});

/// One bounded-error existence test on the subcube {prefix followed by any `free_bits` bits}.
/// Adds the oracle calls it makes to `queries`.
bool grover_existence_test(const GroverInstance &inst, uint64_t prefix, unsigned free_bits, double budget,
                           std::mt19937_64 &rng, uint64_t &queries);

// ---- JSON ----

std::string to_json(const ShorEnsembleResult &r);
std::string to_json(const MultiSolutionResult &r);
std::string to_json(const BinarySearchResult &r);
std::string to_json(const TeleportReport &r);

}  // namespace ensq

#endif
