#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lockbreak/error.hpp"

namespace lockbreak {

enum class GateKind { And, Nand, Or, Nor, Xor, Xnor, Not, Buf };

std::string_view to_string(GateKind kind);

// Case-insensitive lookup of a bench gate keyword.
std::optional<GateKind> gate_kind_from_string(std::string_view keyword);

// Exact fan-in count for NOT/BUF/XOR/XNOR; minimum for AND/NAND/OR/NOR.
bool arity_ok(GateKind kind, std::size_t fanin_count);

struct Gate {
    std::string output;
    GateKind kind = GateKind::Buf;
    std::vector<std::string> fanin;

    friend bool operator==(const Gate&, const Gate&) = default;
};

class NetlistError : public Error {
public:
    enum class Kind { Syntax, UndeclaredSignal, DuplicateDriver, Cycle, Arity, UndrivenOutput };

    NetlistError(Kind kind, std::string signal, const std::string& message,
                 std::size_t line = 0, std::size_t column = 0);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    // Offending signal; empty for pure syntax errors.
    [[nodiscard]] const std::string& signal() const noexcept { return signal_; }
    // 1-based source position; 0 when the error did not come from text.
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }
    // Message without the location and kind prefix.
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    Kind kind_;
    std::string signal_;
    std::string detail_;
    std::size_t line_;
    std::size_t column_;
};

// Gate indices in an order where every gate follows the drivers of its fan-ins.
struct TopoOrder {
    std::vector<std::size_t> gates;

    friend bool operator==(const TopoOrder&, const TopoOrder&) = default;
};

// Immutable combinational netlist. Construction validates the single-driver
// rule, declared fan-ins, gate arity, driven outputs and acyclicity; a
// Netlist object that exists is always well formed.
class Netlist {
public:
    Netlist(std::string name, std::vector<std::string> inputs, std::vector<std::string> outputs,
            std::vector<Gate> gates);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<std::string>& inputs() const noexcept { return inputs_; }
    [[nodiscard]] const std::vector<std::string>& outputs() const noexcept { return outputs_; }
    [[nodiscard]] const std::vector<Gate>& gates() const noexcept { return gates_; }
    [[nodiscard]] const TopoOrder& topo() const noexcept { return topo_; }

    [[nodiscard]] bool is_input(std::string_view signal) const;
    // Index of the gate driving `signal`, if a gate drives it.
    [[nodiscard]] std::optional<std::size_t> driver(std::string_view signal) const;
    [[nodiscard]] std::optional<std::size_t> input_index(std::string_view signal) const;

    // Structural equality: same pin lists and gate list in the same order.
    // The name is metadata and does not participate.
    friend bool operator==(const Netlist& a, const Netlist& b) {
        return a.inputs_ == b.inputs_ && a.outputs_ == b.outputs_ && a.gates_ == b.gates_;
    }

private:
    std::string name_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    std::vector<Gate> gates_;
    std::unordered_map<std::string, std::size_t> input_index_;
    std::unordered_map<std::string, std::size_t> driver_index_;
    TopoOrder topo_;
};

Netlist parse_bench(std::string_view text, std::string name = "netlist");
Netlist read_bench_file(const std::filesystem::path& path);
std::string serialize_bench(const Netlist& netlist);

// Deterministic dependency order; ties broken by gate declaration index.
TopoOrder topo_order(const Netlist& netlist);

// Returns true when every gate's gate-driven fan-ins appear earlier in `order`
// and `order` is a permutation of the gate indices.
bool is_valid_topo_order(const Netlist& netlist, const TopoOrder& order);

struct RandomNetlistOptions {
    std::size_t inputs = 8;
    std::size_t outputs = 4;
    std::size_t gates = 100;
    std::size_t max_fanin = 3;
    // Probability that a multi-input gate is XOR/XNOR.
    double xor_fraction = 0.1;
    // Probability of a single-input NOT/BUF gate.
    double unary_fraction = 0.1;
    // Declare gates in a random order instead of creation order.
    bool shuffle_declarations = false;
};

// Random acyclic netlist. Fan-ins prefer signals that are not consumed yet
// so most gates end up in some output cone; outputs are the last-created gates.
Netlist random_netlist(const RandomNetlistOptions& options, std::uint64_t seed,
                       std::string name = "random");

// y_i = BUF(x_i) for i < width.
Netlist identity_netlist(std::size_t width);
// y_i = NOT(x_i) for i < width.
Netlist inverter_bank(std::size_t width);

}  // namespace lockbreak
