#include "lockbreak/trainer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace lockbreak {

namespace {

constexpr Eigen::Index kEvalChunk = 1024;

std::vector<BitVector> as_rows(const IOTable& t, bool stimuli) {
    return stimuli ? t.stimuli() : t.responses();
}

Dataset make_dataset(const IOTable& table, bool inverse) {
    table.validate();
    const auto x = as_rows(table, !inverse);
    const auto y = as_rows(table, inverse);
    const auto xw = inverse ? table.output_names.size() : table.input_names.size();
    const auto yw = inverse ? table.input_names.size() : table.output_names.size();
    return Dataset{encode_bits(x, xw), encode_bits(y, yw)};
}

}  // namespace

TrainerState::TrainerState(const LstmNetwork& net, double eta, double alpha)
    : learning_rate(eta), momentum(alpha), velocity(net.params().zeros_like()) {}

void step(LstmNetwork& net, TrainerState& state, const LstmParameters& descent) {
    if (state.velocity.layers.empty()) state.velocity = net.params().zeros_like();
    std::vector<std::span<const double>> d;
    descent.for_each([&](std::string_view, std::span<const double> a) { d.push_back(a); });
    std::vector<std::span<double>> v;
    state.velocity.for_each([&](std::string_view, std::span<double> a) { v.push_back(a); });
    if (d.size() != v.size()) throw ModelError("step: gradient layout does not match the network");
    std::size_t k = 0;
    net.params().for_each([&](std::string_view name, std::span<double> w) {
        if (d[k].size() != w.size() || v[k].size() != w.size())
            throw ModelError("step: shape mismatch in " + std::string(name));
        for (std::size_t j = 0; j < w.size(); ++j) {
            v[k][j] = state.learning_rate * d[k][j] + state.momentum * v[k][j];
            w[j] += v[k][j];
        }
        ++k;
    });
    ++state.steps;
}

std::string to_string(Schedule s) { return s == Schedule::Constant ? "constant" : "decay"; }

Schedule schedule_from_string(std::string_view s) {
    std::string lower(s);
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "constant") return Schedule::Constant;
    if (lower == "decay") return Schedule::Decay;
    throw ModelError("unknown learning-rate schedule '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
    if (!(dev_fraction >= 0.0 && dev_fraction <= 0.5))
        throw ModelError("dev fraction must be in [0, 0.5], got " + std::to_string(dev_fraction));
    if (patience < 1) throw ModelError("patience must be >= 1");
    if (epochs < 1) throw ModelError("epochs must be >= 1");
    if (batch_size < 1) throw ModelError("batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw ModelError("learning rate must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ModelError("momentum must be in [0, 1)");
    if (decay < 0.0) throw ModelError("decay must be >= 0");
}

double TrainConfig::eta_at(std::size_t epoch) const {
    if (schedule == Schedule::Constant || epoch <= 1) return learning_rate;
    return learning_rate / (1.0 + decay * static_cast<double>(epoch - 1));
}

Dataset Dataset::columns(const std::vector<std::size_t>& idx) const {
    Dataset d;
    d.inputs.resize(inputs.rows(), static_cast<Eigen::Index>(idx.size()));
    d.targets.resize(targets.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) {
        d.inputs.col(static_cast<Eigen::Index>(c)) = inputs.col(static_cast<Eigen::Index>(idx[c]));
        d.targets.col(static_cast<Eigen::Index>(c)) = targets.col(static_cast<Eigen::Index>(idx[c]));
    }
    return d;
}

Dataset dataset_from_table(const IOTable& table) { return make_dataset(table, false); }
Dataset inverse_dataset_from_table(const IOTable& table) { return make_dataset(table, true); }

TrainingDiverged::TrainingDiverged(std::size_t last_finite_epoch)
    : ModelError("training diverged (non-finite loss); last finite epoch " +
                 std::to_string(last_finite_epoch)),
      last_finite_(last_finite_epoch) {}

EarlyStopping::EarlyStopping(std::size_t patience)
    : patience_(patience), best_(std::numeric_limits<double>::infinity()) {
    if (patience < 1) throw ModelError("patience must be >= 1");
}

bool EarlyStopping::observe(std::size_t epoch, double dev_loss) {
    improved_ = dev_loss < best_;
    if (improved_) {
        best_ = dev_loss;
        best_epoch_ = epoch;
        bad_ = 0;
        return false;
    }
    return ++bad_ >= patience_;
}

double evaluate_mse(const LstmNetwork& net, const Dataset& data) {
    if (data.size() == 0) return 0.0;
    double sum = 0.0;
    for (Eigen::Index c = 0; c < data.inputs.cols(); c += kEvalChunk) {
        const Eigen::Index n = std::min(kEvalChunk, data.inputs.cols() - c);
        sum += squared_error(predict(net, data.inputs.middleCols(c, n)), data.targets.middleCols(c, n)).sum;
    }
    return sum / (static_cast<double>(data.size()) * static_cast<double>(data.targets.rows()));
}

TrainResult train(LstmNetwork net, const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    const auto& shape = net.shape();
    if (static_cast<std::size_t>(data.inputs.rows()) > shape.input_bits ||
        static_cast<std::size_t>(data.targets.rows()) != shape.outputs)
        throw ModelError("dataset widths " + std::to_string(data.inputs.rows()) + "->" +
                         std::to_string(data.targets.rows()) + " do not fit the network " +
                         std::to_string(shape.input_bits) + "->" + std::to_string(shape.outputs));
    if (data.size() < 2 * cfg.batch_size)
        throw ModelError("training needs at least 2 x batch size = " + std::to_string(2 * cfg.batch_size) +
                         " rows, got " + std::to_string(data.size()));

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    // dev_fraction 0: no dev split, the training MSE drives early stopping.
    const auto n_dev = cfg.dev_fraction == 0.0
                           ? std::size_t{0}
                           : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(
                                                          cfg.dev_fraction * static_cast<double>(data.size()))));
    const Dataset dev = data.columns({order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_dev)});
    const Dataset tr = data.columns({order.begin() + static_cast<std::ptrdiff_t>(n_dev), order.end()});
    if (tr.size() < cfg.batch_size) throw ModelError("training split smaller than one batch");

    TrainResult result;
    result.dev_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_dev));
    std::sort(result.dev_rows.begin(), result.dev_rows.end());
    TrainerState state(net, cfg.learning_rate, cfg.momentum);
    EarlyStopping stopper(cfg.patience);

    auto record = [&](std::size_t epoch, double eta) {
        const double train_mse = evaluate_mse(net, tr);
        return EpochRecord{epoch, train_mse, n_dev == 0 ? train_mse : evaluate_mse(net, dev), eta};
    };
    EpochRecord rec = record(0, cfg.eta_at(1));
    if (!std::isfinite(rec.train_mse) || !std::isfinite(rec.dev_mse)) throw TrainingDiverged(0);
    result.history.push_back(rec);
    stopper.observe(0, rec.dev_mse);
    LstmNetwork best = net;

    std::vector<std::size_t> perm(tr.size());
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        state.learning_rate = cfg.eta_at(epoch);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t b = 0; b < perm.size(); b += cfg.batch_size) {
            const std::vector<std::size_t> idx(perm.begin() + static_cast<std::ptrdiff_t>(b),
                                               perm.begin() + static_cast<std::ptrdiff_t>(std::min(b + cfg.batch_size, perm.size())));
            const Dataset batch = tr.columns(idx);
            const auto cache = forward_batch(net, batch.inputs);
            auto g = backward(net, cache, batch.targets);
            const double scale = -1.0;
            g.params.for_each([&](std::string_view, std::span<double> a) {
                for (double& v : a) v *= scale;
            });
            step(net, state, g.params);
        }
        rec = record(epoch, state.learning_rate);
        if (!std::isfinite(rec.train_mse) || !std::isfinite(rec.dev_mse)) throw TrainingDiverged(epoch - 1);
        result.history.push_back(rec);
        const bool stop = stopper.observe(epoch, rec.dev_mse);
        if (stopper.improved()) best = net;
        if (stop) {
            result.early_stopped = true;
            break;
        }
        if (cfg.target_train_mse && rec.train_mse < *cfg.target_train_mse) break;
    }
    result.best_epoch = stopper.best_epoch();
    if (cfg.restore_best) {
        result.net = std::move(best);
    } else {
        result.net = std::move(net);
        result.best_epoch = result.history.back().epoch;
    }
    return result;
}

TrainResult train(LstmNetwork net, const IOTable& table, const TrainConfig& cfg) {
    return train(std::move(net), dataset_from_table(table), cfg);
}

std::string history_csv(const std::vector<EpochRecord>& history) {
    std::ostringstream out;
    out.precision(17);
    out << "epoch,train_mse,dev_mse,eta\n";
    for (const auto& r : history) out << r.epoch << ',' << r.train_mse << ',' << r.dev_mse << ',' << r.eta << '\n';
    return out.str();
}

}  // namespace lockbreak
