#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lockbreak/locking.hpp"
#include "lockbreak/simulator.hpp"
#include "lockbreak/trainer.hpp"

namespace lockbreak {

class AttackError : public Error {
public:
    explicit AttackError(const std::string& what) : Error("attacks", what) {}
};

inline constexpr const char* kKeyProcedure = "surrogate-gradient-v1";

// What the attacker sees: the locked structure and oracle responses from the
// activated chip. The correct key is dropped on construction.
class ThreatModel {
public:
    ThreatModel(LockedNetlist locked, IOTable oracle);

    [[nodiscard]] const LockedNetlist& locked() const noexcept { return locked_; }
    [[nodiscard]] const IOTable& oracle() const noexcept { return oracle_; }
    [[nodiscard]] std::size_t key_width() const noexcept { return locked_.key_input_count; }

private:
    LockedNetlist locked_;
    IOTable oracle_;
};

struct NetworkConfig {
    std::vector<std::size_t> hidden{128};
    std::size_t chunk_width = 8;
    std::uint64_t init_seed = 1;
};

// Where stage A draws its functional stimuli. `Oracle` cycles through the
// optimisation slice's stimuli (their responses are not used); `Random` draws
// fresh uniform vectors, making the surrogate independent of the oracle.
enum class SurrogateStimuli { Oracle, Random };
std::string to_string(SurrogateStimuli s);
SurrogateStimuli surrogate_stimuli_from_string(std::string_view s);

struct KeyAttackConfig {
    NetworkConfig network;
    // Stage A: synthetic (x, k) rows simulated on the locked netlist, k uniform.
    std::size_t surrogate_rows = 131072;
    std::uint64_t surrogate_data_seed = 1;
    SurrogateStimuli surrogate_stimuli = SurrogateStimuli::Oracle;
    TrainConfig surrogate_train;
    // Stage B
    std::size_t restarts = 8;
    std::size_t key_epochs = 200;
    double key_learning_rate = 0.04;
    double key_momentum = kDefaultMomentum;
    std::size_t key_batch_size = 0;  // 0 = the whole optimisation slice
    // Stage C
    double holdout_fraction = 0.25;
    std::uint64_t seed = 1;

    KeyAttackConfig();
    void validate() const;
};

struct IoAttackConfig {
    NetworkConfig network;
    TrainConfig train;
    double test_fraction = 0.25;
    std::uint64_t split_seed = 1;

    void validate() const;
};

struct PinAverage {
    std::size_t pin = 0;
    double real_avg = 0.0;
    double predicted_avg = 0.0;
};

struct RestartOutcome {
    Key key;
    double surrogate_mse = 0.0;  // on the optimisation slice, continuous key
    double holdout_match_rate = 0.0;
    double optimisation_match_rate = 0.0;  // real netlist on the optimisation slice
};

struct AttackReport {
    std::string mode;  // key | output | input
    std::string procedure;
    std::optional<Key> key;
    std::vector<RestartOutcome> restarts;
    std::size_t best_restart = 0;
    std::vector<BitVector> predictions;  // output/input modes, one per held-out row
    double match_rate = 0.0;             // exact row match on held-out rows
    std::vector<double> bit_accuracy;    // per pin (output/input modes)
    double mean_bit_accuracy = 0.0;
    std::vector<PinAverage> pin_averages;
    std::optional<double> key_bit_match;  // evaluation mode only
    std::size_t train_rows = 0;
    std::size_t holdout_rows = 0;
    std::vector<std::size_t> holdout_indices;  // oracle rows the match rate is measured on
    double surrogate_dev_mse = 0.0;
    std::vector<EpochRecord> history;
    double seconds = 0.0;
    nlohmann::ordered_json config;
};

// Fraction of holdout rows reproduced exactly by apply_key(locked, key).
double score_key(const LockedNetlist& locked, const Key& key, const IOTable& holdout);

// Deterministic disjoint split of row indices; the first list is the larger.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_rows(std::size_t rows,
                                                                         double second_fraction,
                                                                         std::uint64_t seed);

// Optimisation and holdout row indices of the oracle, as used by stages A-C.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> key_attack_split(const ThreatModel& tm,
                                                                               const KeyAttackConfig& cfg);

// Stage A alone. With SurrogateStimuli::Random the result depends only on the
// locked netlist and can be shared between oracles.
TrainResult train_key_surrogate(const ThreatModel& tm, const KeyAttackConfig& cfg);

AttackReport attack_key(const ThreatModel& tm, const KeyAttackConfig& cfg,
                        const std::optional<Key>& evaluation_key = std::nullopt);
AttackReport attack_key_with_surrogate(const ThreatModel& tm, const KeyAttackConfig& cfg,
                                       const TrainResult& surrogate,
                                       const std::optional<Key>& evaluation_key = std::nullopt);

AttackReport attack_output(const ThreatModel& tm, const IoAttackConfig& cfg);
AttackReport attack_input(const ThreatModel& tm, const IoAttackConfig& cfg);

nlohmann::ordered_json config_json(const KeyAttackConfig& cfg);
nlohmann::ordered_json config_json(const IoAttackConfig& cfg);
KeyAttackConfig key_attack_config_from_json(const nlohmann::json& j);
IoAttackConfig io_attack_config_from_json(const nlohmann::json& j);

// Full report including the config echo and wall-clock seconds.
nlohmann::ordered_json report_json(const AttackReport& r);
std::string pin_average_csv(const AttackReport& r);

}  // namespace lockbreak
