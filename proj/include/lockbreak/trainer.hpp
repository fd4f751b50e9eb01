#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lockbreak/lstm.hpp"
#include "lockbreak/simulator.hpp"

namespace lockbreak {

inline constexpr double kDefaultLearningRate = 0.01;
inline constexpr double kDefaultMomentum = 0.9;

struct TrainerState {
    double learning_rate = kDefaultLearningRate;
    double momentum = kDefaultMomentum;
    LstmParameters velocity;  // last update, same shapes as the parameters
    std::uint64_t steps = 0;

    TrainerState() = default;
    TrainerState(const LstmNetwork& net, double eta, double alpha);
};

// velocity <- eta * descent + alpha * velocity;  params <- params + velocity.
// `descent` points downhill (the negative loss gradient).
void step(LstmNetwork& net, TrainerState& state, const LstmParameters& descent);

enum class Schedule { Constant, Decay };
std::string to_string(Schedule s);
Schedule schedule_from_string(std::string_view s);

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t patience = 10;
    double dev_fraction = 0.1;
    Schedule schedule = Schedule::Constant;
    double decay = 0.0;  // eta_e = eta / (1 + decay * (e - 1)) under Schedule::Decay
    double learning_rate = kDefaultLearningRate;
    double momentum = kDefaultMomentum;
    std::size_t batch_size = 16;
    std::uint64_t seed = 1;
    // Stop as soon as an epoch's training MSE falls below this.
    std::optional<double> target_train_mse;
    // Return the best-dev snapshot (true) or the last epoch's weights.
    bool restore_best = true;

    void validate() const;
    double eta_at(std::size_t epoch) const;
};

// Real-valued training data, one column per pattern.
struct Dataset {
    Eigen::MatrixXd inputs;
    Eigen::MatrixXd targets;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(inputs.cols()); }
    [[nodiscard]] Dataset columns(const std::vector<std::size_t>& idx) const;
};

Dataset dataset_from_table(const IOTable& table);
// Roles swapped: responses become inputs.
Dataset inverse_dataset_from_table(const IOTable& table);

struct EpochRecord {
    std::size_t epoch = 0;  // 0 = before any update
    double train_mse = 0.0;
    double dev_mse = 0.0;
    double eta = 0.0;
};

struct TrainResult {
    LstmNetwork net;  // best-dev snapshot
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;
    bool early_stopped = false;
    std::vector<std::size_t> dev_rows;  // column indices held out as the dev set
};

class TrainingDiverged : public ModelError {
public:
    TrainingDiverged(std::size_t last_finite_epoch);
    [[nodiscard]] std::size_t last_finite_epoch() const noexcept { return last_finite_; }

private:
    std::size_t last_finite_;
};

// Tracks the best dev loss; strict improvement resets the counter.
class EarlyStopping {
public:
    explicit EarlyStopping(std::size_t patience);
    // Returns true when training should halt.
    bool observe(std::size_t epoch, double dev_loss);
    [[nodiscard]] bool improved() const noexcept { return improved_; }
    [[nodiscard]] std::size_t best_epoch() const noexcept { return best_epoch_; }
    [[nodiscard]] double best() const noexcept { return best_; }

private:
    std::size_t patience_;
    std::size_t bad_ = 0;
    std::size_t best_epoch_ = 0;
    double best_;
    bool improved_ = false;
};

// Mean squared error of `net` on `data`, evaluated in chunks.
double evaluate_mse(const LstmNetwork& net, const Dataset& data);

TrainResult train(LstmNetwork net, const Dataset& data, const TrainConfig& cfg);
TrainResult train(LstmNetwork net, const IOTable& table, const TrainConfig& cfg);

std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace lockbreak
