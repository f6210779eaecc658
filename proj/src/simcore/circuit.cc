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

#include "ensq/circuit.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace ensq {

Circuit::Circuit(unsigned num_qubits)
    : num_qubits_(num_qubits), init_(num_qubits, '0'), last_use_(num_qubits, -1) {
}

void Circuit::set_init(std::string bits) {
    if (bits.size() != num_qubits_) {
        throw std::invalid_argument("init string has " + std::to_string(bits.size()) + " bits for " +
                                    std::to_string(num_qubits_) + " qubits");
    }
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("init string may only contain '0' and '1'");
        }
    }
    init_ = std::move(bits);
}

void Circuit::set_init_bit(uint32_t qubit, bool one) {
    if (qubit >= num_qubits_) {
        throw std::out_of_range("qubit out of range");
    }
    init_[qubit] = one ? '1' : '0';
}

void Circuit::add(int64_t time, Op op, std::vector<uint32_t> targets) {
    if (time < 0) {
        throw std::invalid_argument("step time must be non-negative");
    }
    if (!steps_.empty() && time < steps_.back().time) {
        throw std::invalid_argument("step times must be non-decreasing");
    }
    if (targets.size() != op_arity(op)) {
        throw std::invalid_argument("gate " + op_name(op) + " expects " + std::to_string(op_arity(op)) +
                                    " qubits, got " + std::to_string(targets.size()));
    }
    for (size_t i = 0; i < targets.size(); i++) {
        if (targets[i] >= num_qubits_) {
            throw std::out_of_range("qubit " + std::to_string(targets[i]) + " out of range for " +
                                    std::to_string(num_qubits_) + "-qubit circuit");
        }
        for (size_t j = 0; j < i; j++) {
            if (targets[i] == targets[j]) {
                throw std::invalid_argument("repeated qubit " + std::to_string(targets[i]) + " in " + op_name(op));
            }
        }
        if (last_use_[targets[i]] >= time) {
            throw std::invalid_argument("qubit " + std::to_string(targets[i]) + " used twice at time " +
                                        std::to_string(time));
        }
    }
    for (uint32_t q : targets) {
        last_use_[q] = time;
    }
    steps_.push_back(Step{time, std::move(op), std::move(targets)});
}

void Circuit::append(Op op, std::vector<uint32_t> targets) {
    int64_t t = steps_.empty() ? 0 : steps_.back().time;
    for (uint32_t q : targets) {
        if (q < num_qubits_) {
            t = std::max(t, last_use_[q] + 1);
        }
    }
    add(t, std::move(op), std::move(targets));
}

void Circuit::validate() const {
    Circuit copy(num_qubits_);
    for (const auto &s : steps_) {
        copy.add(s.time, s.op, s.targets);
    }
}

int64_t Circuit::depth() const {
    return static_cast<int64_t>(layer_times().size());
}

std::vector<int64_t> Circuit::layer_times() const {
    std::vector<int64_t> out;
    for (const auto &s : steps_) {
        if (out.empty() || out.back() != s.time) {
            out.push_back(s.time);
        }
    }
    return out;
}

StateVector Circuit::initial_state() const {
    return StateVector::from_bits(init_);
}

std::string Circuit::to_text() const {
    std::ostringstream ss;
    ss << "qubits " << num_qubits_ << "\n";
    ss << "init " << init_ << "\n";
    for (const auto &s : steps_) {
        if (std::holds_alternative<Oracle>(s.op)) {
            throw std::invalid_argument("oracle '" + op_name(s.op) + "' has no text form");
        }
        ss << s.time << " " << op_name(s.op);
        for (uint32_t q : s.targets) {
            ss << " " << q;
        }
        ss << "\n";
    }
    return ss.str();
}

ParseError::ParseError(size_t line, size_t column, const std::string &message)
    : std::invalid_argument("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {
}

namespace {

struct Token {
    std::string text;
    size_t column;
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') {
            break;
        }
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            i++;
            continue;
        }
        size_t start = i;
        int depth = 0;
        while (i < line.size() && line[i] != '#' &&
               (depth > 0 || !std::isspace(static_cast<unsigned char>(line[i])))) {
            depth += line[i] == '(';
            depth -= line[i] == ')';
            i++;
        }
        out.push_back(Token{std::string(line.substr(start, i - start)), start + 1});
    }
    return out;
}

bool parse_number(std::string_view s, double &out) {
    std::string t(s);
    t.erase(std::remove_if(t.begin(), t.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
            t.end());
    if (t.empty()) {
        return false;
    }
    auto lower = t;
    for (auto &c : lower) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    size_t p = lower.find("pi");
    if (p == std::string::npos) {
        char *end = nullptr;
        out = std::strtod(t.c_str(), &end);
        return end == t.c_str() + t.size();
    }
    double factor = 1;
    std::string pre = lower.substr(0, p);
    if (pre == "-") {
        factor = -1;
    } else if (!pre.empty()) {
        if (pre.back() != '*') {
            return false;
        }
        pre.pop_back();
        if (!parse_number(pre, factor)) {
            return false;
        }
    }
    double divisor = 1;
    std::string post = lower.substr(p + 2);
    if (!post.empty()) {
        if (post[0] != '/' || !parse_number(post.substr(1), divisor) || divisor == 0) {
            return false;
        }
    }
    out = factor * std::numbers::pi / divisor;
    return true;
}

bool parse_uint(std::string_view s, uint64_t &out) {
    if (s.empty()) {
        return false;
    }
    auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
    struct Pending {
        size_t line;
        size_t column;
        int64_t time;
        Gate gate;
        std::vector<uint32_t> targets;
        std::vector<size_t> target_columns;
    };
    std::vector<Pending> pending;
    std::optional<uint64_t> declared;
    std::optional<std::pair<std::string, size_t>> init;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        line_no++;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        auto toks = tokenize(line);
        if (toks.empty()) {
            if (nl == text.size()) {
                break;
            }
            continue;
        }
        const Token &head = toks[0];
        if (head.text == "init" || head.text == "qubits") {
            if (!pending.empty()) {
                throw ParseError(line_no, head.column, "'" + head.text + "' must precede all gate lines");
            }
            if (toks.size() != 2) {
                throw ParseError(line_no, head.column, "'" + head.text + "' takes exactly one argument");
            }
            if (head.text == "init") {
                if (init) {
                    throw ParseError(line_no, head.column, "duplicate init line");
                }
                for (size_t i = 0; i < toks[1].text.size(); i++) {
                    char c = toks[1].text[i];
                    if (c != '0' && c != '1') {
                        throw ParseError(line_no, toks[1].column + i, "init bits must be '0' or '1'");
                    }
                }
                init = std::make_pair(toks[1].text, line_no);
            } else {
                uint64_t n;
                if (declared) {
                    throw ParseError(line_no, head.column, "duplicate qubits line");
                }
                if (!parse_uint(toks[1].text, n) || n == 0) {
                    throw ParseError(line_no, toks[1].column, "expected a positive qubit count");
                }
                declared = n;
            }
        } else {
            uint64_t t;
            if (!parse_uint(head.text, t)) {
                throw ParseError(line_no, head.column, "expected a non-negative time index, 'init' or 'qubits'");
            }
            if (toks.size() < 2) {
                throw ParseError(line_no, head.column + head.text.size(), "missing gate name");
            }
            const Token &g = toks[1];
            std::string name = g.text;
            std::optional<double> param;
            size_t open = name.find('(');
            if (open != std::string::npos) {
                if (name.back() != ')') {
                    throw ParseError(line_no, g.column + name.size() - 1, "missing ')' in gate parameter");
                }
                double v;
                std::string arg = name.substr(open + 1, name.size() - open - 2);
                if (!parse_number(arg, v)) {
                    throw ParseError(line_no, g.column + open + 1, "malformed gate parameter '" + arg + "'");
                }
                param = v;
                name = name.substr(0, open);
            }
            std::optional<Gate> gate;
            try {
                gate = Gate::from_name(name, param);
            } catch (const std::invalid_argument &e) {
                throw ParseError(line_no, g.column, e.what());
            }
            size_t nargs = toks.size() - 2;
            if (nargs != gate->arity()) {
                size_t col = nargs < gate->arity() ? g.column + g.text.size() : toks[2 + gate->arity()].column;
                throw ParseError(line_no, col,
                                 "gate " + name + " expects " + std::to_string(gate->arity()) + " qubits, got " +
                                     std::to_string(nargs));
            }
            Pending p{line_no, head.column, static_cast<int64_t>(t), *gate, {}, {}};
            for (size_t i = 2; i < toks.size(); i++) {
                uint64_t q;
                if (!parse_uint(toks[i].text, q) || q > 1u << 20) {
                    throw ParseError(line_no, toks[i].column, "expected a qubit index, got '" + toks[i].text + "'");
                }
                p.targets.push_back(static_cast<uint32_t>(q));
                p.target_columns.push_back(toks[i].column);
            }
            pending.push_back(std::move(p));
        }
        if (nl == text.size()) {
            break;
        }
    }
    uint64_t n = 0;
    for (const auto &p : pending) {
        for (uint32_t q : p.targets) {
            n = std::max<uint64_t>(n, q + 1);
        }
    }
    if (init) {
        if (declared && *declared != init->first.size()) {
            throw ParseError(init->second, 1, "init has " + std::to_string(init->first.size()) +
                                                  " bits but qubits is " + std::to_string(*declared));
        }
        declared = init->first.size();
    }
    unsigned num = static_cast<unsigned>(declared ? *declared : n);
    Circuit c(num);
    if (init) {
        c.set_init(init->first);
    }
    std::vector<int64_t> last(num, -1);
    int64_t prev = -1;
    for (const auto &p : pending) {
        if (p.time < prev) {
            throw ParseError(p.line, p.column, "time " + std::to_string(p.time) + " is earlier than the previous step");
        }
        prev = p.time;
        for (size_t i = 0; i < p.targets.size(); i++) {
            uint32_t q = p.targets[i];
            if (q >= num) {
                throw ParseError(p.line, p.target_columns[i],
                                 "qubit " + std::to_string(q) + " out of range for " + std::to_string(num) + " qubits");
            }
            for (size_t j = 0; j < i; j++) {
                if (p.targets[j] == q) {
                    throw ParseError(p.line, p.target_columns[i], "repeated qubit " + std::to_string(q));
                }
            }
            if (last[q] == p.time) {
                throw ParseError(p.line, p.target_columns[i],
                                 "qubit " + std::to_string(q) + " already used at time " + std::to_string(p.time));
            }
            last[q] = p.time;
        }
        c.add(p.time, p.gate, p.targets);
    }
    return c;
}

uint32_t CircuitBuilder::allocate(bool init_one) {
    init_.push_back(init_one ? '1' : '0');
    last_use_.push_back(-1);
    return static_cast<uint32_t>(init_.size() - 1);
}

std::vector<uint32_t> CircuitBuilder::allocate_block(unsigned n) {
    std::vector<uint32_t> out;
    for (unsigned i = 0; i < n; i++) {
        out.push_back(allocate());
    }
    return out;
}

void CircuitBuilder::add(Op op, std::vector<uint32_t> targets) {
    int64_t t = floor_;
    if (!asap_ && !steps_.empty()) {
        t = std::max(t, steps_.back().time);
    }
    for (uint32_t q : targets) {
        if (q >= init_.size()) {
            throw std::out_of_range("builder qubit " + std::to_string(q) + " not allocated");
        }
        t = std::max(t, last_use_[q] + 1);
    }
    for (uint32_t q : targets) {
        last_use_[q] = t;
    }
    steps_.push_back(Step{t, std::move(op), std::move(targets)});
}

void CircuitBuilder::append(const Circuit &fragment, std::span<const uint32_t> mapping) {
    if (mapping.size() != fragment.num_qubits()) {
        throw std::invalid_argument("fragment mapping size mismatch");
    }
    for (const auto &s : fragment.steps()) {
        std::vector<uint32_t> t;
        for (uint32_t q : s.targets) {
            t.push_back(mapping[q]);
        }
        add(s.op, std::move(t));
    }
}

void CircuitBuilder::barrier() {
    int64_t t = floor_;
    for (const auto &s : steps_) {
        t = std::max(t, s.time + 1);
    }
    for (int64_t u : last_use_) {
        t = std::max(t, u + 1);
    }
    floor_ = t;
}

Circuit CircuitBuilder::build() const {
    Circuit c(static_cast<unsigned>(init_.size()));
    c.set_init(init_);
    auto steps = steps_;
    std::stable_sort(steps.begin(), steps.end(), [](const Step &a, const Step &b) { return a.time < b.time; });
    for (const auto &s : steps) {
        c.add(s.time, s.op, s.targets);
    }
    return c;
}

char pauli_char(Pauli p) {
    return "IXYZ"[static_cast<int>(p)];
}

Pauli pauli_from_char(char c) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
        case 'I':
            return Pauli::kI;
        case 'X':
            return Pauli::kX;
        case 'Y':
            return Pauli::kY;
        case 'Z':
            return Pauli::kZ;
        default:
            throw std::invalid_argument(std::string("unknown Pauli '") + c + "'");
    }
}

const char *location_kind_name(LocationKind kind) {
    switch (kind) {
        case LocationKind::kInput:
            return "input";
        case LocationKind::kGateOutput:
            return "gate_output";
        case LocationKind::kDelay:
            return "delay";
    }
    return "?";
}

LocationKind location_kind_from_name(std::string_view name) {
    if (name == "input") return LocationKind::kInput;
    if (name == "gate_output") return LocationKind::kGateOutput;
    if (name == "delay") return LocationKind::kDelay;
    throw std::invalid_argument("unknown location kind '" + std::string(name) + "'");
}

LocationTable::LocationTable(const Circuit &circuit)
    : first_(circuit.num_qubits(), -1), last_(circuit.num_qubits(), -1) {
    unsigned n = circuit.num_qubits();
    const auto &steps = circuit.steps();
    for (const auto &s : steps) {
        for (uint32_t q : s.targets) {
            if (first_[q] < 0) {
                first_[q] = s.time;
            }
            last_[q] = s.time;
        }
    }
    for (uint32_t q = 0; q < n; q++) {
        locations_.push_back({LocationKind::kInput, -1, q});
        anchor_.push_back(-1);
    }
    std::vector<char> busy(n, 0);
    size_t i = 0;
    while (i < steps.size()) {
        size_t j = i;
        int64_t t = steps[i].time;
        std::fill(busy.begin(), busy.end(), 0);
        while (j < steps.size() && steps[j].time == t) {
            for (uint32_t q : steps[j].targets) {
                locations_.push_back({LocationKind::kGateOutput, t, q});
                anchor_.push_back(static_cast<int64_t>(j));
                busy[q] = 1;
            }
            j++;
        }
        for (uint32_t q = 0; q < n; q++) {
            if (!busy[q] && first_[q] >= 0 && first_[q] < t && t < last_[q]) {
                locations_.push_back({LocationKind::kDelay, t, q});
                anchor_.push_back(static_cast<int64_t>(j - 1));
            }
        }
        i = j;
    }
    for (size_t k = 0; k < locations_.size(); k++) {
        index_.emplace(locations_[k], k);
    }
}

size_t LocationTable::index_of(const FaultLocation &loc) const {
    auto it = index_.find(loc);
    if (it == index_.end()) {
        throw std::invalid_argument(std::string("unknown fault location (") + location_kind_name(loc.kind) +
                                    ", time " + std::to_string(loc.time) + ", qubit " + std::to_string(loc.qubit) +
                                    ")");
    }
    return it->second;
}

FaultSchedule make_schedule(const Circuit &circuit, const LocationTable &table, const FaultPattern &pattern) {
    FaultSchedule s;
    s.after_step.resize(circuit.steps().size());
    std::vector<size_t> seen;
    seen.reserve(pattern.size());
    std::vector<std::pair<size_t, Pauli>> ordered;
    for (const auto &f : pattern) {
        size_t idx = table.index_of(f.location);
        if (std::find(seen.begin(), seen.end(), idx) != seen.end()) {
            throw std::invalid_argument("fault pattern names the same location twice");
        }
        seen.push_back(idx);
        if (f.pauli != Pauli::kI) {
            ordered.emplace_back(idx, f.pauli);
        }
    }
    std::sort(ordered.begin(), ordered.end());
    for (const auto &[idx, p] : ordered) {
        const auto &loc = table.locations()[idx];
        if (loc.kind == LocationKind::kInput) {
            s.inputs.emplace_back(loc.qubit, p);
        } else {
            s.after_step[static_cast<size_t>(table.anchor_step(idx))].emplace_back(loc.qubit, p);
        }
    }
    return s;
}

StateVector run_circuit(StateVector state, const Circuit &circuit, const FaultPattern &faults) {
    if (state.num_qubits() != circuit.num_qubits()) {
        throw std::invalid_argument("state has " + std::to_string(state.num_qubits()) + " qubits, circuit has " +
                                    std::to_string(circuit.num_qubits()));
    }
    LocationTable table(circuit);
    FaultSchedule sched = make_schedule(circuit, table, faults);
    for (const auto &[q, p] : sched.inputs) {
        state.apply_pauli(pauli_char(p), q);
    }
    std::vector<unsigned> qs;
    const auto &steps = circuit.steps();
    for (size_t i = 0; i < steps.size(); i++) {
        qs.assign(steps[i].targets.begin(), steps[i].targets.end());
        state.apply(steps[i].op, qs);
        for (const auto &[q, p] : sched.after_step[i]) {
            state.apply_pauli(pauli_char(p), q);
        }
    }
    return state;
}

}  // namespace ensq
