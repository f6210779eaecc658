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

#include "ensq/noise.h"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace ensq {

namespace {

double uniform01(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

NoiseModel::NoiseModel(double p, PauliWeights weights) : p_(p), w_(weights) {
    if (!(p >= 0 && p <= 1)) {
        throw std::invalid_argument("fault probability must lie in [0, 1]");
    }
    if (w_.x < 0 || w_.y < 0 || w_.z < 0) {
        throw std::invalid_argument("Pauli weights must be non-negative");
    }
    double s = w_.x + w_.y + w_.z;
    if (!(s > 0)) {
        throw std::invalid_argument("Pauli weights must not all be zero");
    }
    w_.x /= s;
    w_.y /= s;
    w_.z /= s;
}

Pauli NoiseModel::draw_pauli(std::mt19937_64 &rng) const {
    double r = uniform01(rng);
    if (r < w_.x) {
        return Pauli::kX;
    }
    if (r < w_.x + w_.z) {
        return Pauli::kZ;
    }
    // Rounding can leave r just above x + z when y has no weight.
    if (w_.y > 0) {
        return Pauli::kY;
    }
    return w_.z > 0 ? Pauli::kZ : Pauli::kX;
}

std::vector<FaultLocation> enumerate_locations(const Circuit &circuit) {
    return LocationTable(circuit).locations();
}

FaultPattern sample_pattern(const std::vector<FaultLocation> &locations, const NoiseModel &model,
                            std::mt19937_64 &rng) {
    FaultPattern out;
    double p = model.p();
    if (p <= 0) {
        return out;
    }
    if (p >= 1) {
        for (const auto &loc : locations) {
            out.push_back({loc, model.draw_pauli(rng)});
        }
        return out;
    }
    // Geometric gaps between faulted locations: same law as independent Bernoulli draws.
    double log_q = std::log1p(-p);
    size_t i = 0;
    while (true) {
        double u = uniform01(rng);
        double gap = std::floor(std::log1p(-u) / log_q);
        if (gap >= static_cast<double>(locations.size() - i)) {
            break;
        }
        i += static_cast<size_t>(gap);
        out.push_back({locations[i], model.draw_pauli(rng)});
        i++;
        if (i >= locations.size()) {
            break;
        }
    }
    return out;
}

FaultPattern sample_pattern(const Circuit &circuit, const NoiseModel &model, uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_pattern(enumerate_locations(circuit), model, rng);
}

std::vector<FaultPattern> all_single_faults(const std::vector<FaultLocation> &locations) {
    std::vector<FaultPattern> out;
    out.reserve(3 * locations.size());
    for (const auto &loc : locations) {
        for (Pauli p : {Pauli::kX, Pauli::kZ, Pauli::kY}) {
            out.push_back({{loc, p}});
        }
    }
    return out;
}

std::vector<FaultPattern> all_single_faults(const Circuit &circuit) {
    return all_single_faults(enumerate_locations(circuit));
}

uint64_t derive_seed(uint64_t seed, uint64_t index) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string pattern_to_json(const FaultPattern &pattern) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto &f : pattern) {
        j.push_back({{"kind", location_kind_name(f.location.kind)},
                     {"time", f.location.time},
                     {"qubit", f.location.qubit},
                     {"pauli", std::string(1, pauli_char(f.pauli))}});
    }
    return j.dump();
}

FaultPattern pattern_from_json(const std::string &text) {
    FaultPattern out;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw std::invalid_argument(std::string("fault pattern JSON: ") + e.what());
    }
    if (!j.is_array()) {
        throw std::invalid_argument("fault pattern JSON must be an array");
    }
    for (const auto &e : j) {
        try {
            std::string p = e.at("pauli").get<std::string>();
            if (p.size() != 1) {
                throw std::invalid_argument("pauli must be one of X, Y, Z");
            }
            Fault f;
            f.location.kind = location_kind_from_name(e.at("kind").get<std::string>());
            f.location.time = e.at("time").get<int64_t>();
            f.location.qubit = e.at("qubit").get<uint32_t>();
            f.pauli = pauli_from_char(p[0]);
            out.push_back(f);
        } catch (const nlohmann::json::exception &ex) {
            throw std::invalid_argument(std::string("fault pattern JSON: ") + ex.what());
        }
    }
    return out;
}

}  // namespace ensq
