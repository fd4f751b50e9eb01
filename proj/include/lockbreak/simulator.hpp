#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lockbreak/bits.hpp"
#include "lockbreak/netlist.hpp"

namespace lockbreak {

struct LockedNetlist;

class SimulationError : public Error {
public:
    explicit SimulationError(const std::string& what) : Error("simulator", what) {}
};

// Netlist flattened into topo-ordered index form. Signals 0..I-1 are the
// primary inputs; gate outputs follow in evaluation order.
class Simulator {
public:
    static constexpr std::size_t kLanes = 64;

    explicit Simulator(const Netlist& netlist);

    [[nodiscard]] std::size_t input_count() const noexcept { return input_count_; }
    [[nodiscard]] std::size_t output_count() const noexcept { return outputs_.size(); }
    [[nodiscard]] std::size_t signal_count() const noexcept { return signal_count_; }

    // One boolean per signal, one pass in topo order.
    [[nodiscard]] BitVector evaluate(const BitVector& stimulus) const;

    // 64 stimuli per word: `inputs[i]` holds lane bits of input i. `scratch`
    // is resized to the signal count and may be reused across calls.
    void evaluate_words(std::span<const std::uint64_t> inputs, std::span<std::uint64_t> outputs,
                        std::vector<std::uint64_t>& scratch) const;

    [[nodiscard]] std::vector<BitVector> evaluate_batch(std::span<const BitVector> stimuli) const;

private:
    struct Op {
        GateKind kind;
        std::uint32_t first_fanin;
        std::uint32_t fanin_count;
    };

    std::size_t input_count_ = 0;
    std::size_t signal_count_ = 0;
    std::vector<Op> ops_;
    std::vector<std::uint32_t> fanins_;
    std::vector<std::uint32_t> outputs_;
};

BitVector evaluate(const Netlist& netlist, const BitVector& stimulus);
std::vector<BitVector> evaluate_batch(const Netlist& netlist, std::span<const BitVector> stimuli);

// Bit-sliced storage for a column of bit vectors: words[pin][block] carries
// the bits of rows 64*block .. 64*block+63 for that pin.
struct PackedBits {
    std::size_t rows = 0;
    std::size_t width = 0;
    std::vector<std::vector<std::uint64_t>> words;

    [[nodiscard]] std::size_t blocks() const noexcept { return (rows + 63) / 64; }
    // Mask of valid lanes in `block`.
    [[nodiscard]] std::uint64_t lane_mask(std::size_t block) const noexcept;
};

PackedBits pack(std::span<const BitVector> rows, std::size_t width);

struct IoRow {
    BitVector stimulus;
    BitVector response;

    friend bool operator==(const IoRow&, const IoRow&) = default;
};

struct IOTable {
    std::vector<std::string> input_names;
    std::vector<std::string> output_names;
    std::vector<IoRow> rows;
    std::uint64_t seed = 0;
    std::string source;

    [[nodiscard]] std::size_t size() const noexcept { return rows.size(); }
    // Throws SimulationError unless every row matches the declared widths.
    void validate() const;
    [[nodiscard]] std::vector<BitVector> stimuli() const;
    [[nodiscard]] std::vector<BitVector> responses() const;
    // Rows at `indices`, metadata copied.
    [[nodiscard]] IOTable subset(std::span<const std::size_t> indices) const;

    friend bool operator==(const IOTable&, const IOTable&) = default;
};

IOTable gen_io_table(const Netlist& netlist, std::size_t count, std::uint64_t seed);

// Stimuli drawn as i.i.d. uniform bits from a seeded generator.
std::vector<BitVector> random_stimuli(std::size_t width, std::size_t count, std::uint64_t seed);

// CSV body: header `inputs,outputs`, then one `bits,bits` line per row.
std::string io_table_to_csv(const IOTable& table);
// Metadata sidecar: seed, source and pin names.
std::string io_table_metadata_json(const IOTable& table);
// `metadata_json` may be empty, in which case pin names are synthesized.
IOTable io_table_from_csv(std::string_view csv, std::string_view metadata_json = {});

struct KeyScore {
    Key key;
    double match_rate = 0.0;
};

// Scores every key of width <= kMaxBruteForceKeyWidth by exact response
// match over the oracle rows; sorted by rate descending, then key value.
inline constexpr std::size_t kMaxBruteForceKeyWidth = 24;
std::vector<KeyScore> brute_force_keys(const LockedNetlist& locked, const IOTable& oracle);

}  // namespace lockbreak
