#include "lockbreak/locking.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <unordered_set>

#include "lockbreak/simulator.hpp"

namespace lockbreak {

namespace {

constexpr std::string_view kKeyPrefix = "keyinput";

struct Site {
    std::string wire;
    GateKind kind;  // Xor or Xnor
};

// Locked netlist with one key gate per site. The driver of each site wire is
// renamed and the key gate takes over the original name, so every consumer
// and output tap sees the keyed signal.
Netlist build_locked(const Netlist& original, const std::vector<Site>& sites) {
    std::unordered_set<std::string> names(original.inputs().begin(), original.inputs().end());
    for (const auto& g : original.gates()) names.insert(g.output);

    std::vector<std::string> inputs = original.inputs();
    for (std::size_t i = 0; i < sites.size(); ++i) {
        auto name = key_input_name(i);
        if (names.contains(name))
            throw LockingError("netlist already contains a signal named '" + name + "'");
        inputs.push_back(std::move(name));
    }

    std::vector<Gate> gates = original.gates();
    std::vector<Gate> key_gates;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const auto& wire = sites[i].wire;
        std::string renamed = wire + "_kg" + std::to_string(i);
        while (names.contains(renamed)) renamed += "_";
        names.insert(renamed);
        gates[*original.driver(wire)].output = renamed;
        key_gates.push_back({wire, sites[i].kind, {renamed, key_input_name(i)}});
    }
    gates.insert(gates.end(), key_gates.begin(), key_gates.end());
    return Netlist(original.name() + "_locked", std::move(inputs), original.outputs(),
                   std::move(gates));
}

// Input words enumerating stimuli 64*block .. 64*block+63 of an exhaustive sweep.
void exhaustive_block(std::size_t input_count, std::size_t block,
                      std::vector<std::uint64_t>& words) {
    static constexpr std::uint64_t kPatterns[6] = {
        0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
        0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
    words.resize(input_count);
    for (std::size_t j = 0; j < input_count; ++j)
        words[j] = j < 6 ? kPatterns[j] : (((block >> (j - 6)) & 1U) ? ~std::uint64_t{0} : 0);
}

// Functional stimuli used to certify key-bit observability, bit-sliced.
struct ProbeSet {
    std::size_t inputs = 0;
    bool exhaustive = false;
    std::size_t vectors = 0;
    PackedBits packed;  // used when not exhaustive

    [[nodiscard]] std::size_t blocks() const { return (vectors + 63) / 64; }

    void block(std::size_t b, std::vector<std::uint64_t>& words) const {
        if (exhaustive) {
            exhaustive_block(inputs, b, words);
        } else {
            words.resize(inputs);
            for (std::size_t j = 0; j < inputs; ++j) words[j] = packed.words[j][b];
        }
    }

    [[nodiscard]] std::uint64_t mask(std::size_t b) const {
        const std::size_t remaining = vectors - b * 64;
        return remaining >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << remaining) - 1);
    }
};

ProbeSet make_probes(std::size_t inputs, std::size_t budget, std::uint64_t seed) {
    ProbeSet p;
    p.inputs = inputs;
    if (inputs <= kCertifyExhaustiveInputs) {
        p.exhaustive = true;
        p.vectors = std::size_t{1} << inputs;
    } else {
        p.vectors = budget;
        const auto stimuli = random_stimuli(inputs, budget, seed);
        p.packed = pack(stimuli, inputs);
    }
    return p;
}

// True when flipping key bit `bit` away from `key` changes some output.
bool key_bit_observable(const Simulator& sim, const ProbeSet& probes, std::size_t functional,
                        const Key& key, std::size_t bit) {
    std::vector<std::uint64_t> words, base(sim.output_count()), flipped(sim.output_count()),
        scratch;
    for (std::size_t b = 0; b < probes.blocks(); ++b) {
        probes.block(b, words);
        words.resize(functional + key.width());
        for (std::size_t k = 0; k < key.width(); ++k)
            words[functional + k] = key[k] ? ~std::uint64_t{0} : 0;
        sim.evaluate_words(words, base, scratch);
        words[functional + bit] = ~words[functional + bit];
        sim.evaluate_words(words, flipped, scratch);
        std::uint64_t diff = 0;
        for (std::size_t o = 0; o < base.size(); ++o) diff |= base[o] ^ flipped[o];
        if (diff & probes.mask(b)) return true;
    }
    return false;
}

}  // namespace

std::string key_input_name(std::size_t index) {
    return std::string(kKeyPrefix) + std::to_string(index);
}

std::vector<std::string> LockedNetlist::functional_inputs() const {
    const auto& in = netlist.inputs();
    return {in.begin(), in.begin() + static_cast<std::ptrdiff_t>(functional_input_count())};
}

LockedNetlist as_locked(Netlist netlist, std::optional<Key> correct_key) {
    const auto& inputs = netlist.inputs();
    std::size_t first_key = inputs.size();
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i].starts_with(kKeyPrefix)) {
            first_key = i;
            break;
        }
    }
    const std::size_t key_count = inputs.size() - first_key;
    for (std::size_t k = 0; k < key_count; ++k) {
        if (inputs[first_key + k] != key_input_name(k))
            throw LockingError("key inputs must be keyinput0..keyinput" +
                               std::to_string(key_count - 1) +
                               " after all functional inputs; found '" + inputs[first_key + k] +
                               "' at position " + std::to_string(first_key + k));
    }
    if (correct_key && correct_key->width() != key_count)
        throw LockingError("key width " + std::to_string(correct_key->width()) +
                           " != key input count " + std::to_string(key_count));
    return LockedNetlist{std::move(netlist), key_count, std::move(correct_key)};
}

LockResult lock_random(const Netlist& netlist, std::size_t key_width, std::uint64_t seed) {
    if (key_width == 0) throw LockingError("key width must be >= 1");

    std::unordered_set<std::string> taps(netlist.outputs().begin(), netlist.outputs().end());
    std::vector<std::string> preferred, fallback;
    for (const auto& g : netlist.gates())
        (taps.contains(g.output) ? fallback : preferred).push_back(g.output);
    if (preferred.size() + fallback.size() < key_width)
        throw LockingError("only " + std::to_string(preferred.size() + fallback.size()) +
                           " insertable wires for a " + std::to_string(key_width) + "-bit key");

    std::mt19937_64 rng(seed);
    std::shuffle(preferred.begin(), preferred.end(), rng);
    std::shuffle(fallback.begin(), fallback.end(), rng);
    std::vector<std::string> pool = std::move(preferred);
    pool.insert(pool.end(), fallback.begin(), fallback.end());
    std::size_t next = 0;
    std::bernoulli_distribution coin(0.5);

    std::vector<Site> sites;
    Key key{BitVector(key_width)};
    for (std::size_t i = 0; i < key_width; ++i) {
        const GateKind kind = coin(rng) ? GateKind::Xnor : GateKind::Xor;
        sites.push_back({pool[next++], kind});
        key.set(i, kind == GateKind::Xnor);
    }

    const ProbeSet probes =
        make_probes(netlist.inputs().size(), kCertifyRandomVectors, seed ^ 0x9E3779B97F4A7C15ULL);
    const std::size_t functional = netlist.inputs().size();
    Netlist locked = build_locked(netlist, sites);
    for (std::size_t i = 0; i < key_width; ++i) {
        std::size_t retries = 0;
        while (!key_bit_observable(Simulator(locked), probes, functional, key, i)) {
            if (retries++ == kCertifyRetriesPerBit || next == pool.size())
                throw LockingError("non-redundancy certification failed for key bit " +
                                   std::to_string(i) + " after " + std::to_string(retries) +
                                   " draw(s)");
            sites[i].wire = pool[next++];
            locked = build_locked(netlist, sites);
        }
    }

    LockResult result{as_locked(std::move(locked), key), key, {}};
    for (const auto& s : sites) result.sites.push_back(s.wire);
    return result;
}

Netlist apply_key(const LockedNetlist& locked, const Key& key) {
    if (key.width() != locked.key_input_count)
        throw LockingError("key width " + std::to_string(key.width()) + " != key input count " +
                           std::to_string(locked.key_input_count));
    const std::size_t functional = locked.functional_input_count();
    auto key_bit = [&](const std::string& signal) -> std::optional<bool> {
        auto idx = locked.netlist.input_index(signal);
        if (!idx || *idx < functional) return std::nullopt;
        return key[*idx - functional];
    };

    std::vector<Gate> gates;
    gates.reserve(locked.netlist.gates().size());
    for (const auto& g : locked.netlist.gates()) {
        std::optional<bool> bit;
        std::size_t key_pos = 0;
        for (std::size_t k = 0; k < g.fanin.size(); ++k) {
            if (auto b = key_bit(g.fanin[k])) {
                if (bit) throw LockingError("gate '" + g.output + "' reads two key inputs");
                bit = b;
                key_pos = k;
            }
        }
        if (!bit) {
            gates.push_back(g);
            continue;
        }
        if (g.kind != GateKind::Xor && g.kind != GateKind::Xnor)
            throw LockingError("key input feeds unsupported " + std::string(to_string(g.kind)) +
                               " gate '" + g.output + "'");
        // XOR(w,0)=w, XOR(w,1)=~w, XNOR(w,1)=w, XNOR(w,0)=~w
        const bool pass = (g.kind == GateKind::Xor) != *bit;
        gates.push_back({g.output, pass ? GateKind::Buf : GateKind::Not, {g.fanin[1 - key_pos]}});
    }
    return Netlist(locked.netlist.name() + "_keyed", locked.functional_inputs(),
                   locked.netlist.outputs(), std::move(gates));
}

std::string to_string(EquivVerdict::Kind kind) {
    switch (kind) {
        case EquivVerdict::Kind::ExhaustiveEqual: return "exhaustive-equal";
        case EquivVerdict::Kind::SampledEqual: return "sampled-equal";
        case EquivVerdict::Kind::Counterexample: return "counterexample";
    }
    return "?";
}

EquivVerdict equiv_check(const Netlist& a, const Netlist& b, std::size_t budget,
                         std::uint64_t seed) {
    if (a.inputs() != b.inputs() || a.outputs() != b.outputs())
        throw LockingError("equiv_check: input/output signatures differ");
    const std::size_t n = a.inputs().size();
    const ProbeSet probes = make_probes(n, budget, seed);
    const Simulator sa(a), sb(b);
    std::vector<std::uint64_t> words, oa(sa.output_count()), ob(sb.output_count()), scratch;
    for (std::size_t blk = 0; blk < probes.blocks(); ++blk) {
        probes.block(blk, words);
        sa.evaluate_words(words, oa, scratch);
        sb.evaluate_words(words, ob, scratch);
        std::uint64_t diff = 0;
        for (std::size_t o = 0; o < oa.size(); ++o) diff |= oa[o] ^ ob[o];
        diff &= probes.mask(blk);
        if (diff) {
            const int lane = std::countr_zero(diff);
            BitVector cex(n);
            for (std::size_t j = 0; j < n; ++j) cex.set(j, ((words[j] >> lane) & 1U) != 0);
            return {EquivVerdict::Kind::Counterexample, blk * 64 + static_cast<std::size_t>(lane) + 1,
                    std::move(cex)};
        }
    }
    return {probes.exhaustive ? EquivVerdict::Kind::ExhaustiveEqual
                              : EquivVerdict::Kind::SampledEqual,
            probes.vectors, std::nullopt};
}

std::vector<std::size_t> key_gate_indices(const LockedNetlist& locked) {
    std::vector<std::size_t> out(locked.key_input_count, locked.netlist.gates().size());
    const std::size_t functional = locked.functional_input_count();
    const auto& gates = locked.netlist.gates();
    for (std::size_t g = 0; g < gates.size(); ++g) {
        for (const auto& in : gates[g].fanin) {
            auto idx = locked.netlist.input_index(in);
            if (idx && *idx >= functional && out[*idx - functional] == gates.size())
                out[*idx - functional] = g;
        }
    }
    return out;
}

}  // namespace lockbreak
