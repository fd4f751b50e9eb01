#pragma once

// Test-only helpers: fixture paths and oracles that are coded independently
// of the library paths they check.

#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "lockbreak/netlist.hpp"
#include "lockbreak/bits.hpp"

namespace lockbreak::testing {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(LOCKBREAK_FIXTURE_DIR) / name;
}

// Recursive single-bit evaluator working directly on signal names. It shares
// nothing with the simulator: no topo order, no index compilation.
class ReferenceEvaluator {
public:
    explicit ReferenceEvaluator(const Netlist& n) : n_(n) {
        for (const auto& g : n.gates()) by_output_[g.output] = &g;
    }

    BitVector operator()(const BitVector& x) const {
        std::unordered_map<std::string, bool> memo;
        for (std::size_t i = 0; i < n_.inputs().size(); ++i) memo[n_.inputs()[i]] = x[i];
        BitVector y(n_.outputs().size());
        for (std::size_t o = 0; o < n_.outputs().size(); ++o) y.set(o, value(n_.outputs()[o], memo));
        return y;
    }

private:
    bool value(const std::string& s, std::unordered_map<std::string, bool>& memo) const {
        if (auto it = memo.find(s); it != memo.end()) return it->second;
        const Gate& g = *by_output_.at(s);
        std::vector<bool> in;
        for (const auto& f : g.fanin) in.push_back(value(f, memo));
        bool all = true, any = false;
        int ones = 0;
        for (bool b : in) {
            all = all && b;
            any = any || b;
            ones += b ? 1 : 0;
        }
        bool v = false;
        switch (g.kind) {
            case GateKind::And: v = all; break;
            case GateKind::Nand: v = !all; break;
            case GateKind::Or: v = any; break;
            case GateKind::Nor: v = !any; break;
            case GateKind::Xor: v = (ones % 2) == 1; break;
            case GateKind::Xnor: v = (ones % 2) == 0; break;
            case GateKind::Not: v = !in[0]; break;
            case GateKind::Buf: v = in[0]; break;
        }
        memo[s] = v;
        return v;
    }

    const Netlist& n_;
    std::map<std::string, const Gate*> by_output_;
};

// O(V+E) precedence check of a gate order, written against names only.
inline bool order_respects_dependencies(const Netlist& n, const std::vector<std::size_t>& order) {
    const auto& gates = n.gates();
    if (order.size() != gates.size()) return false;
    std::map<std::string, std::size_t> gate_of;
    for (std::size_t g = 0; g < gates.size(); ++g) gate_of[gates[g].output] = g;
    std::vector<long> pos(gates.size(), -1);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] >= gates.size() || pos[order[i]] != -1) return false;
        pos[order[i]] = static_cast<long>(i);
    }
    for (std::size_t g = 0; g < gates.size(); ++g)
        for (const auto& f : gates[g].fanin)
            if (auto it = gate_of.find(f); it != gate_of.end() && pos[it->second] >= pos[g])
                return false;
    return true;
}

}  // namespace lockbreak::testing
