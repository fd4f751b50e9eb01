#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lockbreak/bits.hpp"
#include "lockbreak/netlist.hpp"

namespace lockbreak {

class LockingError : public Error {
public:
    explicit LockingError(const std::string& what) : Error("locking", what) {}
};

std::string key_input_name(std::size_t index);

// A netlist whose last `key_input_count` inputs are keyinput0..keyinput{k-1}.
// `correct_key` is only populated in evaluation mode.
struct LockedNetlist {
    Netlist netlist;
    std::size_t key_input_count = 0;
    std::optional<Key> correct_key;

    [[nodiscard]] std::size_t functional_input_count() const noexcept {
        return netlist.inputs().size() - key_input_count;
    }
    [[nodiscard]] std::vector<std::string> functional_inputs() const;
};

// Recognizes key inputs by the `keyinput` prefix. Throws unless they are
// exactly keyinput0..keyinput{k-1} declared after every functional input.
LockedNetlist as_locked(Netlist netlist, std::optional<Key> correct_key = std::nullopt);

struct LockResult {
    LockedNetlist locked;
    Key key;
    // Wire spliced by key gate i.
    std::vector<std::string> sites;
};

inline constexpr std::size_t kCertifyExhaustiveInputs = 20;
inline constexpr std::size_t kCertifyRandomVectors = 4096;
inline constexpr std::size_t kCertifyRetriesPerBit = 32;

// Splices `key_width` XOR/XNOR key gates into distinct random wires and
// certifies that every key bit is observable at the outputs.
LockResult lock_random(const Netlist& netlist, std::size_t key_width, std::uint64_t seed);

// Netlist over functional inputs with key gates folded to BUF/NOT.
Netlist apply_key(const LockedNetlist& locked, const Key& key);

struct EquivVerdict {
    enum class Kind { ExhaustiveEqual, SampledEqual, Counterexample };

    Kind kind = Kind::ExhaustiveEqual;
    // Vectors compared (2^inputs when exhaustive).
    std::size_t samples = 0;
    std::optional<BitVector> counterexample;

    [[nodiscard]] bool equal() const noexcept { return kind != Kind::Counterexample; }
};

std::string to_string(EquivVerdict::Kind kind);

// Exhaustive when the input count is <= kCertifyExhaustiveInputs, else
// `budget` seeded random vectors. Signatures (pin name lists) must match.
EquivVerdict equiv_check(const Netlist& a, const Netlist& b, std::size_t budget,
                         std::uint64_t seed);

// Key gate positions: for each key bit the gate consuming keyinput{i}.
std::vector<std::size_t> key_gate_indices(const LockedNetlist& locked);

}  // namespace lockbreak
