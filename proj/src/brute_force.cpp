#include <algorithm>
#include <bit>

#include "lockbreak/locking.hpp"
#include "lockbreak/simulator.hpp"

namespace lockbreak {

std::vector<KeyScore> brute_force_keys(const LockedNetlist& locked, const IOTable& oracle) {
    const std::size_t width = locked.key_input_count;
    if (width > kMaxBruteForceKeyWidth)
        throw SimulationError("brute force refused: key width " + std::to_string(width) +
                              " exceeds " + std::to_string(kMaxBruteForceKeyWidth));
    if (oracle.size() == 0) throw SimulationError("brute force needs a non-empty oracle table");
    const std::size_t functional = locked.functional_input_count();
    const std::size_t outputs = locked.netlist.outputs().size();
    oracle.validate();
    if (oracle.input_names.size() != functional || oracle.output_names.size() != outputs)
        throw SimulationError("oracle widths do not match the locked netlist");

    const Simulator sim(locked.netlist);
    const auto stimuli = oracle.stimuli();
    const auto responses = oracle.responses();
    const PackedBits in = pack(stimuli, functional);
    const PackedBits expect = pack(responses, outputs);

    std::vector<KeyScore> scores;
    scores.reserve(std::size_t{1} << width);
    std::vector<std::uint64_t> words(functional + width), out(outputs), scratch;
    for (std::uint64_t value = 0; value < (std::uint64_t{1} << width); ++value) {
        for (std::size_t k = 0; k < width; ++k)
            words[functional + k] = ((value >> k) & 1U) ? ~std::uint64_t{0} : 0;
        std::size_t matched = 0;
        for (std::size_t b = 0; b < in.blocks(); ++b) {
            for (std::size_t j = 0; j < functional; ++j) words[j] = in.words[j][b];
            sim.evaluate_words(words, out, scratch);
            std::uint64_t diff = 0;
            for (std::size_t o = 0; o < outputs; ++o) diff |= out[o] ^ expect.words[o][b];
            matched += static_cast<std::size_t>(std::popcount(~diff & in.lane_mask(b)));
        }
        scores.push_back({Key::from_uint(value, width),
                          static_cast<double>(matched) / static_cast<double>(oracle.size())});
    }
    // Enumeration order is ascending key value, so a stable sort keeps it as the tie-break.
    std::stable_sort(scores.begin(), scores.end(),
                     [](const KeyScore& a, const KeyScore& b) { return a.match_rate > b.match_rate; });
    return scores;
}

}  // namespace lockbreak
