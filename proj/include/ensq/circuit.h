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

#ifndef ENSQ_CIRCUIT_H
#define ENSQ_CIRCUIT_H

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ensq/gate.h"
#include "ensq/state_vector.h"

namespace ensq {

struct Step {
    int64_t time = 0;
    Op op;
    std::vector<uint32_t> targets;
};

/// Time-ordered gate list. Steps sharing a time form one layer and may not share qubits.
class Circuit {
   public:
    explicit Circuit(unsigned num_qubits = 0);

    unsigned num_qubits() const {
        return num_qubits_;
    }
    const std::vector<Step> &steps() const {
        return steps_;
    }
    /// One character per qubit, '0' or '1'.
    const std::string &init() const {
        return init_;
    }
    void set_init(std::string bits);
    void set_init_bit(uint32_t qubit, bool one);

    void add(int64_t time, Op op, std::vector<uint32_t> targets);
    /// Appends at time max(last time, 1 + last use of any target).
    void append(Op op, std::vector<uint32_t> targets);
    void validate() const;
    int64_t depth() const;
    std::vector<int64_t> layer_times() const;
    StateVector initial_state() const;
    std::string to_text() const;

   private:
    unsigned num_qubits_;
    std::string init_;
    std::vector<Step> steps_;
    std::vector<int64_t> last_use_;
};

class ParseError : public std::invalid_argument {
   public:
    ParseError(size_t line, size_t column, const std::string &message);
    size_t line() const {
        return line_;
    }
    size_t column() const {
        return column_;
    }

   private:
    size_t line_;
    size_t column_;
};

Circuit parse_circuit(std::string_view text);

/// Builds circuits with named qubit allocation and greedy layering that keeps list order.
class CircuitBuilder {
   public:
    uint32_t allocate(bool init_one = false);
    std::vector<uint32_t> allocate_block(unsigned n);
    void add(Op op, std::vector<uint32_t> targets);
    void add(const Gate &gate, std::initializer_list<uint32_t> targets) {
        add(Op{gate}, std::vector<uint32_t>(targets));
    }
    /// Appends `fragment`, mapping fragment qubit i to mapping[i].
    void append(const Circuit &fragment, std::span<const uint32_t> mapping);
    /// Forces the next step into a new layer.
    void barrier();
    /// ASAP placement: a step only waits for its own qubits, so later steps may land in earlier
    /// layers. Per-qubit order is still list order.
    void set_asap(bool on) {
        asap_ = on;
    }
    unsigned num_qubits() const {
        return static_cast<unsigned>(init_.size());
    }
    Circuit build() const;

   private:
    std::string init_;
    std::vector<Step> steps_;
    std::vector<int64_t> last_use_;
    int64_t floor_ = 0;
    bool asap_ = false;
};

enum class Pauli : uint8_t { kI = 0, kX = 1, kY = 2, kZ = 3 };
char pauli_char(Pauli p);
Pauli pauli_from_char(char c);

enum class LocationKind : uint8_t { kInput = 0, kGateOutput = 1, kDelay = 2 };
const char *location_kind_name(LocationKind kind);
LocationKind location_kind_from_name(std::string_view name);

/// A site where a fault may strike. Inputs carry time -1.
struct FaultLocation {
    LocationKind kind = LocationKind::kInput;
    int64_t time = -1;
    uint32_t qubit = 0;
    auto operator<=>(const FaultLocation &) const = default;
};

struct Fault {
    FaultLocation location;
    Pauli pauli = Pauli::kX;
    bool operator==(const Fault &) const = default;
};

using FaultPattern = std::vector<Fault>;

/// All fault sites of a circuit, in a canonical order, with the execution point of each.
class LocationTable {
   public:
    explicit LocationTable(const Circuit &circuit);
    const std::vector<FaultLocation> &locations() const {
        return locations_;
    }
    size_t size() const {
        return locations_.size();
    }
    /// Index of a location, or throws std::invalid_argument for a non-site.
    size_t index_of(const FaultLocation &loc) const;
    /// For gate outputs: step index. For delays: index of the last step of the layer. Inputs: -1.
    int64_t anchor_step(size_t index) const {
        return anchor_[index];
    }
    int64_t first_time(uint32_t qubit) const {
        return first_[qubit];
    }
    int64_t last_time(uint32_t qubit) const {
        return last_[qubit];
    }

   private:
    std::vector<FaultLocation> locations_;
    std::vector<int64_t> anchor_;
    std::map<FaultLocation, size_t> index_;
    std::vector<int64_t> first_;
    std::vector<int64_t> last_;
};

/// Faults grouped by when they are applied.
struct FaultSchedule {
    std::vector<std::pair<uint32_t, Pauli>> inputs;
    /// after_step[s]: faults applied right after step s (gate outputs first, then layer delays).
    std::vector<std::vector<std::pair<uint32_t, Pauli>>> after_step;
};

FaultSchedule make_schedule(const Circuit &circuit, const LocationTable &table, const FaultPattern &pattern);

/// Plain dense execution: state must have circuit.num_qubits() qubits.
StateVector run_circuit(StateVector state, const Circuit &circuit, const FaultPattern &faults = {});

}  // namespace ensq

#endif
