#include "lockbreak/simulator.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

namespace lockbreak {

Simulator::Simulator(const Netlist& netlist) : input_count_(netlist.inputs().size()) {
    const auto& gates = netlist.gates();
    const auto& order = netlist.topo().gates;
    // Signal index of gate g is input_count_ + its position in topo order.
    std::vector<std::uint32_t> gate_signal(gates.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        gate_signal[order[pos]] = static_cast<std::uint32_t>(input_count_ + pos);
    signal_count_ = input_count_ + gates.size();

    auto index_of = [&](const std::string& name) -> std::uint32_t {
        if (auto i = netlist.input_index(name)) return static_cast<std::uint32_t>(*i);
        return gate_signal[*netlist.driver(name)];
    };

    ops_.reserve(order.size());
    for (std::size_t g : order) {
        const Gate& gate = gates[g];
        Op op{gate.kind, static_cast<std::uint32_t>(fanins_.size()),
              static_cast<std::uint32_t>(gate.fanin.size())};
        for (const auto& in : gate.fanin) fanins_.push_back(index_of(in));
        ops_.push_back(op);
    }
    for (const auto& out : netlist.outputs()) outputs_.push_back(index_of(out));
}

BitVector Simulator::evaluate(const BitVector& stimulus) const {
    if (stimulus.size() != input_count_)
        throw SimulationError("stimulus width " + std::to_string(stimulus.size()) +
                              " != input count " + std::to_string(input_count_));
    std::vector<std::uint8_t> value(signal_count_, 0);
    for (std::size_t i = 0; i < input_count_; ++i) value[i] = stimulus[i] ? 1 : 0;
    std::size_t sig = input_count_;
    for (const Op& op : ops_) {
        const std::uint32_t* in = fanins_.data() + op.first_fanin;
        bool v = false;
        switch (op.kind) {
            case GateKind::And:
            case GateKind::Nand:
                v = true;
                for (std::uint32_t k = 0; k < op.fanin_count; ++k) v = v && value[in[k]];
                if (op.kind == GateKind::Nand) v = !v;
                break;
            case GateKind::Or:
            case GateKind::Nor:
                v = false;
                for (std::uint32_t k = 0; k < op.fanin_count; ++k) v = v || value[in[k]];
                if (op.kind == GateKind::Nor) v = !v;
                break;
            case GateKind::Xor: v = value[in[0]] != value[in[1]]; break;
            case GateKind::Xnor: v = value[in[0]] == value[in[1]]; break;
            case GateKind::Not: v = !value[in[0]]; break;
            case GateKind::Buf: v = value[in[0]] != 0; break;
        }
        value[sig++] = v ? 1 : 0;
    }
    BitVector response(outputs_.size());
    for (std::size_t o = 0; o < outputs_.size(); ++o) response.set(o, value[outputs_[o]] != 0);
    return response;
}

void Simulator::evaluate_words(std::span<const std::uint64_t> inputs,
                               std::span<std::uint64_t> outputs,
                               std::vector<std::uint64_t>& scratch) const {
    if (inputs.size() != input_count_ || outputs.size() != outputs_.size())
        throw SimulationError("evaluate_words: width mismatch");
    scratch.resize(signal_count_);
    std::copy(inputs.begin(), inputs.end(), scratch.begin());
    std::uint64_t* value = scratch.data();
    std::size_t sig = input_count_;
    for (const Op& op : ops_) {
        const std::uint32_t* in = fanins_.data() + op.first_fanin;
        std::uint64_t v = 0;
        switch (op.kind) {
            case GateKind::And:
            case GateKind::Nand:
                v = ~std::uint64_t{0};
                for (std::uint32_t k = 0; k < op.fanin_count; ++k) v &= value[in[k]];
                if (op.kind == GateKind::Nand) v = ~v;
                break;
            case GateKind::Or:
            case GateKind::Nor:
                for (std::uint32_t k = 0; k < op.fanin_count; ++k) v |= value[in[k]];
                if (op.kind == GateKind::Nor) v = ~v;
                break;
            case GateKind::Xor: v = value[in[0]] ^ value[in[1]]; break;
            case GateKind::Xnor: v = ~(value[in[0]] ^ value[in[1]]); break;
            case GateKind::Not: v = ~value[in[0]]; break;
            case GateKind::Buf: v = value[in[0]]; break;
        }
        value[sig++] = v;
    }
    for (std::size_t o = 0; o < outputs_.size(); ++o) outputs[o] = value[outputs_[o]];
}

std::vector<BitVector> Simulator::evaluate_batch(std::span<const BitVector> stimuli) const {
    for (const auto& s : stimuli)
        if (s.size() != input_count_)
            throw SimulationError("batch stimulus width " + std::to_string(s.size()) +
                                  " != input count " + std::to_string(input_count_));
    const PackedBits packed = pack(stimuli, input_count_);
    std::vector<BitVector> responses(stimuli.size(), BitVector(outputs_.size()));
    std::vector<std::uint64_t> in(input_count_), out(outputs_.size()), scratch;
    for (std::size_t b = 0; b < packed.blocks(); ++b) {
        for (std::size_t i = 0; i < input_count_; ++i) in[i] = packed.words[i][b];
        evaluate_words(in, out, scratch);
        const std::size_t base = b * kLanes;
        const std::size_t lanes = std::min(kLanes, stimuli.size() - base);
        for (std::size_t lane = 0; lane < lanes; ++lane)
            for (std::size_t o = 0; o < out.size(); ++o)
                responses[base + lane].set(o, ((out[o] >> lane) & 1U) != 0);
    }
    return responses;
}

BitVector evaluate(const Netlist& netlist, const BitVector& stimulus) {
    return Simulator(netlist).evaluate(stimulus);
}

std::vector<BitVector> evaluate_batch(const Netlist& netlist, std::span<const BitVector> stimuli) {
    return Simulator(netlist).evaluate_batch(stimuli);
}

std::uint64_t PackedBits::lane_mask(std::size_t block) const noexcept {
    const std::size_t remaining = rows - block * 64;
    return remaining >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << remaining) - 1);
}

PackedBits pack(std::span<const BitVector> rows, std::size_t width) {
    PackedBits p;
    p.rows = rows.size();
    p.width = width;
    p.words.assign(width, std::vector<std::uint64_t>(p.blocks(), 0));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto bits = rows[r].data();
        const std::size_t block = r / 64;
        const std::uint64_t lane = std::uint64_t{1} << (r % 64);
        for (std::size_t i = 0; i < width; ++i)
            if (bits[i]) p.words[i][block] |= lane;
    }
    return p;
}

// ---------------------------------------------------------------------------
// IOTable

void IOTable::validate() const {
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].stimulus.size() != input_names.size() ||
            rows[r].response.size() != output_names.size())
            throw SimulationError("row " + std::to_string(r) + " widths " +
                                  std::to_string(rows[r].stimulus.size()) + "/" +
                                  std::to_string(rows[r].response.size()) + " != declared " +
                                  std::to_string(input_names.size()) + "/" +
                                  std::to_string(output_names.size()));
    }
}

std::vector<BitVector> IOTable::stimuli() const {
    std::vector<BitVector> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.stimulus);
    return out;
}

std::vector<BitVector> IOTable::responses() const {
    std::vector<BitVector> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.response);
    return out;
}

IOTable IOTable::subset(std::span<const std::size_t> indices) const {
    IOTable t{input_names, output_names, {}, seed, source};
    t.rows.reserve(indices.size());
    for (std::size_t i : indices) t.rows.push_back(rows.at(i));
    return t;
}

std::vector<BitVector> random_stimuli(std::size_t width, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<BitVector> out;
    out.reserve(count);
    for (std::size_t r = 0; r < count; ++r) {
        BitVector v(width);
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < width; ++i) {
            if (i % 64 == 0) word = rng();
            v.set(i, ((word >> (i % 64)) & 1U) != 0);
        }
        out.push_back(std::move(v));
    }
    return out;
}

IOTable gen_io_table(const Netlist& netlist, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw SimulationError("gen_io_table: count must be >= 1");
    const Simulator sim(netlist);
    auto stimuli = random_stimuli(netlist.inputs().size(), count, seed);
    auto responses = sim.evaluate_batch(stimuli);
    IOTable t{netlist.inputs(), netlist.outputs(), {}, seed, netlist.name()};
    t.rows.reserve(count);
    for (std::size_t r = 0; r < count; ++r)
        t.rows.push_back({std::move(stimuli[r]), std::move(responses[r])});
    return t;
}

std::string io_table_to_csv(const IOTable& table) {
    std::string out = "inputs,outputs\n";
    out.reserve(out.size() + table.rows.size() *
                                 (table.input_names.size() + table.output_names.size() + 2));
    for (const auto& row : table.rows) {
        out += row.stimulus.to_string();
        out += ',';
        out += row.response.to_string();
        out += '\n';
    }
    return out;
}

std::string io_table_metadata_json(const IOTable& table) {
    nlohmann::ordered_json j;
    j["format"] = "lockbreak-iotable";
    j["version"] = 1;
    j["source"] = table.source;
    j["seed"] = table.seed;
    j["rows"] = table.rows.size();
    j["input_names"] = table.input_names;
    j["output_names"] = table.output_names;
    return j.dump(2) + "\n";
}

IOTable io_table_from_csv(std::string_view csv, std::string_view metadata_json) {
    IOTable t;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool header_seen = false;
    std::size_t in_width = 0, out_width = 0;
    while (start < csv.size()) {
        std::size_t end = csv.find('\n', start);
        if (end == std::string_view::npos) end = csv.size();
        std::string_view line = csv.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != "inputs,outputs")
                throw SimulationError("io table csv: expected header 'inputs,outputs'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
            throw SimulationError("io table csv line " + std::to_string(line_no) +
                                  ": expected two fields");
        IoRow row;
        try {
            row.stimulus = BitVector::from_string(line.substr(0, comma));
            row.response = BitVector::from_string(line.substr(comma + 1));
        } catch (const Error& e) {
            throw SimulationError("io table csv line " + std::to_string(line_no) + ": " +
                                  e.what());
        }
        if (t.rows.empty()) {
            in_width = row.stimulus.size();
            out_width = row.response.size();
        } else if (row.stimulus.size() != in_width || row.response.size() != out_width) {
            throw SimulationError("io table csv line " + std::to_string(line_no) +
                                  ": non-uniform row width");
        }
        t.rows.push_back(std::move(row));
    }
    if (!header_seen) throw SimulationError("io table csv: missing header");

    if (!metadata_json.empty()) {
        const auto j = nlohmann::json::parse(metadata_json);
        t.source = j.value("source", std::string{});
        t.seed = j.value("seed", std::uint64_t{0});
        t.input_names = j.at("input_names").get<std::vector<std::string>>();
        t.output_names = j.at("output_names").get<std::vector<std::string>>();
    } else {
        for (std::size_t i = 0; i < in_width; ++i) t.input_names.push_back("x" + std::to_string(i));
        for (std::size_t i = 0; i < out_width; ++i)
            t.output_names.push_back("y" + std::to_string(i));
    }
    t.validate();
    return t;
}

}  // namespace lockbreak
