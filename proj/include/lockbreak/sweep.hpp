#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lockbreak/attacks.hpp"

namespace lockbreak {

class SweepError : public Error {
public:
    explicit SweepError(const std::string& what) : Error("harness", what) {}
};

// training-size: oracle rows per point; the metric is the recovered key's
//   functional match rate on a fresh evaluation table.
// layers: grid holds hidden-layer counts, same metric at base.oracle_rows.
// momentum / training-step: surrogate training with that alpha / eta; the
//   metric is the final-epoch training MSE.
enum class SweepAxis { TrainingSize, Momentum, TrainingStep, Layers };
std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(std::string_view s);

struct SweepSpec {
    SweepAxis axis = SweepAxis::TrainingSize;
    std::vector<double> grid;
    std::size_t repetitions = 5;
    std::uint64_t seed_base = 1;
    // Hidden-layer counts run at every grid point (ignored for axis layers).
    std::vector<std::size_t> layers{1};

    void validate() const;
};

struct SweepBase {
    KeyAttackConfig attack;
    std::size_t oracle_rows = 512;
    std::size_t eval_rows = 4096;
    std::size_t workers = 1;  // cells run concurrently; results do not depend on it
};

struct SweepCell {
    double axis_value = 0.0;
    std::size_t layers = 1;
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    std::optional<double> metric;
    std::string key;  // recovered key (attack axes)
    double holdout_match_rate = 0.0;
    std::string error;
};

struct SweepPoint {
    double axis_value = 0.0;
    std::size_t layers = 1;
    std::size_t completed = 0;
    double mean = 0.0;  // over completed cells; NaN when none completed
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepCell> cells;
    std::vector<SweepPoint> summary;
};

// Seed of repetition `rep`; the same at every grid point so points differ
// only in the swept quantity.
std::uint64_t sweep_seed(const SweepSpec& spec, std::size_t rep);

// The oracle is simulated from apply_key(locked, key); the attack itself only
// sees the locked netlist and that table.
SweepResult run_sweep(const LockedNetlist& locked, const Key& key, const SweepSpec& spec, const SweepBase& base);

std::string sweep_csv(const SweepResult& r);
std::string sweep_summary_csv(const SweepResult& r);
nlohmann::ordered_json sweep_json(const SweepResult& r, const SweepBase& base);

// Worker count from LOCKBREAK_WORKERS, else 1.
std::size_t default_workers();

}  // namespace lockbreak
