#include "lockbreak/attacks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace lockbreak {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

NetworkShape shape_for(const NetworkConfig& n, std::size_t in, std::size_t out) {
    return NetworkShape{in, n.chunk_width, n.hidden, out};
}

ordered_json network_json(const NetworkConfig& n) {
    return ordered_json{{"hidden", n.hidden}, {"chunk_width", n.chunk_width}, {"init_seed", n.init_seed}};
}

NetworkConfig network_from_json(const json& j) {
    NetworkConfig n;
    n.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    n.chunk_width = j.at("chunk_width").get<std::size_t>();
    n.init_seed = j.at("init_seed").get<std::uint64_t>();
    return n;
}

ordered_json train_json(const TrainConfig& c) {
    ordered_json j{{"epochs", c.epochs},
                   {"patience", c.patience},
                   {"dev_fraction", c.dev_fraction},
                   {"schedule", to_string(c.schedule)},
                   {"decay", c.decay},
                   {"learning_rate", c.learning_rate},
                   {"momentum", c.momentum},
                   {"batch_size", c.batch_size},
                   {"seed", c.seed},
                   {"restore_best", c.restore_best}};
    j["target_train_mse"] = c.target_train_mse ? json(*c.target_train_mse) : json(nullptr);
    return j;
}

TrainConfig train_from_json(const json& j) {
    TrainConfig c;
    c.epochs = j.at("epochs").get<std::size_t>();
    c.patience = j.at("patience").get<std::size_t>();
    c.dev_fraction = j.at("dev_fraction").get<double>();
    c.schedule = schedule_from_string(j.at("schedule").get<std::string>());
    c.decay = j.at("decay").get<double>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.momentum = j.at("momentum").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.restore_best = j.at("restore_best").get<bool>();
    if (!j.at("target_train_mse").is_null()) c.target_train_mse = j.at("target_train_mse").get<double>();
    return c;
}

ordered_json history_json(const std::vector<EpochRecord>& h) {
    ordered_json a = ordered_json::array();
    for (const auto& r : h)
        a.push_back({{"epoch", r.epoch}, {"train_mse", r.train_mse}, {"dev_mse", r.dev_mse}, {"eta", r.eta}});
    return a;
}

std::vector<BitVector> pick(const std::vector<BitVector>& rows, const std::vector<std::size_t>& idx) {
    std::vector<BitVector> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(rows[i]);
    return out;
}

// Shared tail of attack_output / attack_input: learn x -> y on one slice,
// predict the other.
AttackReport io_attack(const ThreatModel& tm, const IoAttackConfig& cfg, bool inverse) {
    cfg.validate();
    const auto t0 = Clock::now();
    const IOTable& oracle = tm.oracle();
    oracle.validate();
    const auto [train_idx, test_idx] = split_rows(oracle.size(), cfg.test_fraction, cfg.split_seed);
    if (train_idx.empty() || test_idx.empty()) throw AttackError("train/test split leaves an empty side");

    const auto stimuli = oracle.stimuli();
    const auto responses = oracle.responses();
    const auto& xs = inverse ? responses : stimuli;
    const auto& ys = inverse ? stimuli : responses;
    const std::size_t xw = inverse ? oracle.output_names.size() : oracle.input_names.size();
    const std::size_t yw = inverse ? oracle.input_names.size() : oracle.output_names.size();

    const Dataset train_set{encode_bits(pick(xs, train_idx), xw), encode_bits(pick(ys, train_idx), yw)};
    const LstmNetwork init(shape_for(cfg.network, xw, yw), cfg.network.init_seed);
    const TrainResult trained = train(init, train_set, cfg.train);

    const auto test_x = pick(xs, test_idx);
    const auto test_y = pick(ys, test_idx);
    const MatrixXd pred = predict(trained.net, encode_bits(test_x, xw));

    AttackReport r;
    r.mode = inverse ? "input" : "output";
    r.predictions = decode_threshold(pred);
    r.train_rows = train_idx.size();
    r.holdout_rows = test_idx.size();
    r.holdout_indices = test_idx;
    r.history = trained.history;
    r.surrogate_dev_mse = trained.history.at(trained.best_epoch).dev_mse;

    std::vector<std::size_t> correct(yw, 0), real_ones(yw, 0), pred_ones(yw, 0);
    std::size_t rows_ok = 0;
    for (std::size_t i = 0; i < test_y.size(); ++i) {
        rows_ok += r.predictions[i] == test_y[i] ? 1 : 0;
        for (std::size_t p = 0; p < yw; ++p) {
            correct[p] += r.predictions[i][p] == test_y[i][p] ? 1 : 0;
            real_ones[p] += test_y[i][p] ? 1 : 0;
            pred_ones[p] += r.predictions[i][p] ? 1 : 0;
        }
    }
    const double n = static_cast<double>(test_y.size());
    r.match_rate = static_cast<double>(rows_ok) / n;
    double total = 0.0;
    for (std::size_t p = 0; p < yw; ++p) {
        r.bit_accuracy.push_back(static_cast<double>(correct[p]) / n);
        total += static_cast<double>(correct[p]);
        r.pin_averages.push_back({p, static_cast<double>(real_ones[p]) / n, static_cast<double>(pred_ones[p]) / n});
    }
    r.mean_bit_accuracy = total / (n * static_cast<double>(yw));
    r.config = config_json(cfg);
    r.seconds = seconds_since(t0);
    return r;
}

}  // namespace

ThreatModel::ThreatModel(LockedNetlist locked, IOTable oracle)
    : locked_(std::move(locked)), oracle_(std::move(oracle)) {
    locked_.correct_key.reset();
    if (oracle_.size() == 0) throw AttackError("oracle table is empty");
    oracle_.validate();
    if (oracle_.input_names.size() != locked_.functional_input_count() ||
        oracle_.output_names.size() != locked_.netlist.outputs().size())
        throw AttackError("oracle widths " + std::to_string(oracle_.input_names.size()) + "/" +
                          std::to_string(oracle_.output_names.size()) + " do not match the locked netlist " +
                          std::to_string(locked_.functional_input_count()) + "/" +
                          std::to_string(locked_.netlist.outputs().size()));
}

KeyAttackConfig::KeyAttackConfig() {
    network.hidden = {64};
    surrogate_train.epochs = 20;
    surrogate_train.patience = 8;
    surrogate_train.batch_size = 32;
}

void KeyAttackConfig::validate() const {
    surrogate_train.validate();
    if (surrogate_rows < 2 * surrogate_train.batch_size) throw AttackError("too few surrogate rows");
    if (restarts < 1) throw AttackError("restarts must be >= 1");
    if (key_epochs < 1) throw AttackError("key epochs must be >= 1");
    if (!(key_learning_rate > 0.0)) throw AttackError("key learning rate must be > 0");
    if (!(key_momentum >= 0.0 && key_momentum < 1.0)) throw AttackError("key momentum must be in [0, 1)");
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) throw AttackError("holdout fraction must be in (0, 1)");
}

void IoAttackConfig::validate() const {
    train.validate();
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw AttackError("test fraction must be in (0, 1)");
}

double score_key(const LockedNetlist& locked, const Key& key, const IOTable& holdout) {
    if (key.width() != locked.key_input_count)
        throw AttackError("key width " + std::to_string(key.width()) + " != key inputs " +
                          std::to_string(locked.key_input_count));
    if (holdout.size() == 0) throw AttackError("score_key needs a non-empty table");
    holdout.validate();
    if (holdout.input_names.size() != locked.functional_input_count() ||
        holdout.output_names.size() != locked.netlist.outputs().size())
        throw AttackError("holdout widths do not match the locked netlist");
    const Netlist keyed = apply_key(locked, key);
    const auto got = evaluate_batch(keyed, holdout.stimuli());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < got.size(); ++i) hits += got[i] == holdout.rows[i].response ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(holdout.size());
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_rows(std::size_t rows,
                                                                         double second_fraction,
                                                                         std::uint64_t seed) {
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    auto second = static_cast<std::size_t>(std::round(second_fraction * static_cast<double>(rows)));
    if (rows >= 2) second = std::clamp<std::size_t>(second, 1, rows - 1);
    std::vector<std::size_t> b(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(second));
    std::vector<std::size_t> a(order.begin() + static_cast<std::ptrdiff_t>(second), order.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return {a, b};
}

std::string to_string(SurrogateStimuli s) { return s == SurrogateStimuli::Oracle ? "oracle" : "random"; }

SurrogateStimuli surrogate_stimuli_from_string(std::string_view s) {
    if (s == "oracle") return SurrogateStimuli::Oracle;
    if (s == "random") return SurrogateStimuli::Random;
    throw AttackError("unknown surrogate stimulus source '" + std::string(s) + "' (oracle | random)");
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> key_attack_split(const ThreatModel& tm,
                                                                               const KeyAttackConfig& cfg) {
    auto split = split_rows(tm.oracle().size(), cfg.holdout_fraction, cfg.seed);
    if (split.first.empty() || split.second.empty())
        throw AttackError("oracle of " + std::to_string(tm.oracle().size()) +
                          " rows is too small for the holdout split");
    return split;
}

TrainResult train_key_surrogate(const ThreatModel& tm, const KeyAttackConfig& cfg) {
    cfg.validate();
    const LockedNetlist& locked = tm.locked();
    const std::size_t width = locked.netlist.inputs().size();
    std::vector<BitVector> xs;
    if (cfg.surrogate_stimuli == SurrogateStimuli::Random) {
        xs = random_stimuli(width, cfg.surrogate_rows, cfg.surrogate_data_seed);
    } else {
        const auto opt = key_attack_split(tm, cfg).first;
        const auto keys = random_stimuli(locked.key_input_count, cfg.surrogate_rows, cfg.surrogate_data_seed);
        xs.reserve(cfg.surrogate_rows);
        for (std::size_t i = 0; i < cfg.surrogate_rows; ++i)
            xs.push_back(concat(tm.oracle().rows[opt[i % opt.size()]].stimulus, keys[i]));
    }
    const auto ys = evaluate_batch(locked.netlist, xs);
    const Dataset data{encode_bits(xs, width), encode_bits(ys, locked.netlist.outputs().size())};
    const LstmNetwork init(shape_for(cfg.network, width, locked.netlist.outputs().size()),
                           cfg.network.init_seed);
    return train(init, data, cfg.surrogate_train);
}

AttackReport attack_key(const ThreatModel& tm, const KeyAttackConfig& cfg,
                        const std::optional<Key>& evaluation_key) {
    const auto t0 = Clock::now();
    const TrainResult surrogate = train_key_surrogate(tm, cfg);
    AttackReport r = attack_key_with_surrogate(tm, cfg, surrogate, evaluation_key);
    r.seconds = seconds_since(t0);
    return r;
}

AttackReport attack_key_with_surrogate(const ThreatModel& tm, const KeyAttackConfig& cfg,
                                       const TrainResult& surrogate,
                                       const std::optional<Key>& evaluation_key) {
    cfg.validate();
    const auto t0 = Clock::now();
    const LockedNetlist& locked = tm.locked();
    const std::size_t n_key = tm.key_width();
    const std::size_t n_x = locked.functional_input_count();
    const std::size_t n_y = locked.netlist.outputs().size();
    if (n_key == 0) throw AttackError("locked netlist has no key inputs");
    const LstmNetwork& g = surrogate.net;
    if (g.shape().input_bits != n_x + n_key || g.shape().outputs != n_y)
        throw AttackError("surrogate shape does not match the locked netlist");

    const auto [opt_idx, hold_idx] = key_attack_split(tm, cfg);
    const IOTable opt_table = tm.oracle().subset(opt_idx);
    const IOTable hold_table = tm.oracle().subset(hold_idx);
    const MatrixXd X = encode_bits(opt_table.stimuli(), n_x);
    const MatrixXd Y = encode_bits(opt_table.responses(), n_y);
    const auto N = static_cast<Eigen::Index>(opt_idx.size());
    const auto R = static_cast<Eigen::Index>(cfg.restarts);
    const auto nk = static_cast<Eigen::Index>(n_key);
    const auto nx = static_cast<Eigen::Index>(n_x);
    const std::size_t batch = cfg.key_batch_size == 0 ? opt_idx.size() : std::min(cfg.key_batch_size, opt_idx.size());

    // Continuous keys, one column per restart.
    MatrixXd K(nk, R), V = MatrixXd::Zero(nk, R);
    for (Eigen::Index rr = 0; rr < R; ++rr) {
        std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(rr) + 1);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (Eigen::Index k = 0; k < nk; ++k) K(k, rr) = u(rng);
    }

    // Timesteps made only of functional bits do not depend on the key; run
    // them once and start every key pass from their final state.
    const auto w = static_cast<Eigen::Index>(g.shape().chunk_width);
    const auto T = static_cast<Eigen::Index>(g.shape().timesteps());
    const Eigen::Index t_key = nx / w;
    MatrixXd padded = MatrixXd::Zero(T * w, N);
    padded.topRows(nx) = X;
    RecurrentState prefix;
    if (t_key > 0) prefix = final_state(forward_from(g, RecurrentState{}, padded.topRows(t_key * w)));
    const Eigen::Index suffix_rows = (T - t_key) * w;
    const Eigen::Index key_row = nx - t_key * w;  // first key bit within the suffix

    auto slice_state = [&](const std::vector<std::size_t>& cols) {
        RecurrentState st;
        if (prefix.zero()) return st;
        for (std::size_t l = 0; l < prefix.h.size(); ++l) {
            MatrixXd h(prefix.h[l].rows(), static_cast<Eigen::Index>(cols.size()));
            MatrixXd c(prefix.c[l].rows(), static_cast<Eigen::Index>(cols.size()));
            for (std::size_t j = 0; j < cols.size(); ++j) {
                h.col(static_cast<Eigen::Index>(j)) = prefix.h[l].col(static_cast<Eigen::Index>(cols[j]));
                c.col(static_cast<Eigen::Index>(j)) = prefix.c[l].col(static_cast<Eigen::Index>(cols[j]));
            }
            st.h.push_back(std::move(h));
            st.c.push_back(std::move(c));
        }
        return st;
    };

    std::mt19937_64 batch_rng(cfg.seed);
    std::vector<std::size_t> perm(opt_idx.size());
    std::iota(perm.begin(), perm.end(), 0);
    BackwardOptions bopt;
    bopt.parameter_gradients = false;
    bopt.input_gradients = true;

    // Column blocks keep the working set cache-sized; the key gradient is
    // summed over blocks, so blocking does not change the result.
    constexpr std::size_t kBlock = 64;
    struct Block {
        RecurrentState start;
        MatrixXd suffix;
        MatrixXd target;
    };
    for (std::size_t epoch = 0; epoch < cfg.key_epochs; ++epoch) {
        if (batch < opt_idx.size()) std::shuffle(perm.begin(), perm.end(), batch_rng);
        for (std::size_t start = 0; start < perm.size(); start += batch) {
            const std::size_t end = std::min(start + batch, perm.size());
            std::vector<Block> blocks;
            for (std::size_t b0 = start; b0 < end; b0 += kBlock) {
                const std::vector<std::size_t> cols(perm.begin() + static_cast<std::ptrdiff_t>(b0),
                                                    perm.begin() + static_cast<std::ptrdiff_t>(std::min(b0 + kBlock, end)));
                Block blk{slice_state(cols), MatrixXd(suffix_rows, static_cast<Eigen::Index>(cols.size())),
                          MatrixXd(static_cast<Eigen::Index>(n_y), static_cast<Eigen::Index>(cols.size()))};
                for (std::size_t j = 0; j < cols.size(); ++j) {
                    blk.suffix.col(static_cast<Eigen::Index>(j)) =
                        padded.col(static_cast<Eigen::Index>(cols[j])).bottomRows(suffix_rows);
                    blk.target.col(static_cast<Eigen::Index>(j)) = Y.col(static_cast<Eigen::Index>(cols[j]));
                }
                blocks.push_back(std::move(blk));
            }
            for (Eigen::Index rr = 0; rr < R; ++rr) {
                VectorXd dk = VectorXd::Zero(nk);
                for (auto& blk : blocks) {
                    blk.suffix.middleRows(key_row, nk) = K.col(rr).replicate(1, blk.suffix.cols());
                    const auto cache = forward_from(g, blk.start, blk.suffix);
                    dk += backward(g, cache, blk.target, bopt).inputs.middleRows(key_row, nk).rowwise().sum();
                }
                dk /= static_cast<double>(end - start);  // mean over rows: step size independent of oracle size
                V.col(rr) = cfg.key_learning_rate * (-dk) + cfg.key_momentum * V.col(rr);
                K.col(rr) = (K.col(rr) + V.col(rr)).cwiseMax(0.0).cwiseMin(1.0);
            }
        }
    }

    AttackReport r;
    r.mode = "key";
    r.procedure = kKeyProcedure;
    r.train_rows = opt_idx.size();
    r.holdout_rows = hold_idx.size();
    r.holdout_indices = hold_idx;
    r.history = surrogate.history;
    r.surrogate_dev_mse = surrogate.history.at(surrogate.best_epoch).dev_mse;
    {
        MatrixXd in(nx + nk, N * R), target(static_cast<Eigen::Index>(n_y), N * R);
        for (Eigen::Index rr = 0; rr < R; ++rr) {
            in.block(0, rr * N, nx, N) = X;
            in.block(nx, rr * N, nk, N) = K.col(rr).replicate(1, N);
            target.middleCols(rr * N, N) = Y;
        }
        const MatrixXd pred = predict(g, in);
        for (Eigen::Index rr = 0; rr < R; ++rr) {
            RestartOutcome o;
            BitVector bits(n_key);
            for (Eigen::Index k = 0; k < nk; ++k) bits.set(static_cast<std::size_t>(k), K(k, rr) >= 0.5);
            o.key = Key(bits);
            o.surrogate_mse = squared_error(pred.middleCols(rr * N, N), Y).mse;
            o.holdout_match_rate = score_key(locked, o.key, hold_table);
            o.optimisation_match_rate = score_key(locked, o.key, opt_table);
            r.restarts.push_back(std::move(o));
        }
    }
    // Holdout rate decides; the optimisation slice breaks ties, then the index.
    auto rank = [](const RestartOutcome& o) { return std::pair(o.holdout_match_rate, o.optimisation_match_rate); };
    for (std::size_t i = 1; i < r.restarts.size(); ++i)
        if (rank(r.restarts[i]) > rank(r.restarts[r.best_restart])) r.best_restart = i;
    r.key = r.restarts[r.best_restart].key;
    r.match_rate = r.restarts[r.best_restart].holdout_match_rate;

    // Evaluation mode: compared only after the candidate is final.
    if (evaluation_key) {
        if (evaluation_key->width() != n_key) throw AttackError("evaluation key width mismatch");
        std::size_t same = 0;
        for (std::size_t i = 0; i < n_key; ++i) same += (*r.key)[i] == (*evaluation_key)[i] ? 1 : 0;
        r.key_bit_match = static_cast<double>(same) / static_cast<double>(n_key);
    }
    r.config = config_json(cfg);
    r.seconds = seconds_since(t0);
    return r;
}

AttackReport attack_output(const ThreatModel& tm, const IoAttackConfig& cfg) { return io_attack(tm, cfg, false); }
AttackReport attack_input(const ThreatModel& tm, const IoAttackConfig& cfg) { return io_attack(tm, cfg, true); }

ordered_json config_json(const KeyAttackConfig& c) {
    return ordered_json{{"procedure", kKeyProcedure},
                        {"network", network_json(c.network)},
                        {"surrogate_rows", c.surrogate_rows},
                        {"surrogate_data_seed", c.surrogate_data_seed},
                        {"surrogate_stimuli", to_string(c.surrogate_stimuli)},
                        {"surrogate_train", train_json(c.surrogate_train)},
                        {"restarts", c.restarts},
                        {"key_epochs", c.key_epochs},
                        {"key_learning_rate", c.key_learning_rate},
                        {"key_momentum", c.key_momentum},
                        {"key_batch_size", c.key_batch_size},
                        {"holdout_fraction", c.holdout_fraction},
                        {"seed", c.seed}};
}

ordered_json config_json(const IoAttackConfig& c) {
    return ordered_json{{"network", network_json(c.network)},
                        {"train", train_json(c.train)},
                        {"test_fraction", c.test_fraction},
                        {"split_seed", c.split_seed}};
}

KeyAttackConfig key_attack_config_from_json(const json& j) {
    KeyAttackConfig c;
    c.network = network_from_json(j.at("network"));
    c.surrogate_rows = j.at("surrogate_rows").get<std::size_t>();
    c.surrogate_data_seed = j.at("surrogate_data_seed").get<std::uint64_t>();
    c.surrogate_stimuli = surrogate_stimuli_from_string(j.at("surrogate_stimuli").get<std::string>());
    c.surrogate_train = train_from_json(j.at("surrogate_train"));
    c.restarts = j.at("restarts").get<std::size_t>();
    c.key_epochs = j.at("key_epochs").get<std::size_t>();
    c.key_learning_rate = j.at("key_learning_rate").get<double>();
    c.key_momentum = j.at("key_momentum").get<double>();
    c.key_batch_size = j.at("key_batch_size").get<std::size_t>();
    c.holdout_fraction = j.at("holdout_fraction").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

IoAttackConfig io_attack_config_from_json(const json& j) {
    IoAttackConfig c;
    c.network = network_from_json(j.at("network"));
    c.train = train_from_json(j.at("train"));
    c.test_fraction = j.at("test_fraction").get<double>();
    c.split_seed = j.at("split_seed").get<std::uint64_t>();
    return c;
}

ordered_json report_json(const AttackReport& r) {
    ordered_json j;
    j["mode"] = r.mode;
    if (!r.procedure.empty()) j["procedure"] = r.procedure;
    if (r.key) j["key"] = r.key->to_string();
    j["match_rate"] = r.match_rate;
    if (r.key_bit_match) j["key_bit_match"] = *r.key_bit_match;
    if (!r.restarts.empty()) {
        ordered_json rs = ordered_json::array();
        for (std::size_t i = 0; i < r.restarts.size(); ++i)
            rs.push_back({{"restart", i},
                          {"key", r.restarts[i].key.to_string()},
                          {"surrogate_mse", r.restarts[i].surrogate_mse},
                          {"holdout_match_rate", r.restarts[i].holdout_match_rate},
                          {"optimisation_match_rate", r.restarts[i].optimisation_match_rate}});
        j["restarts"] = rs;
        j["best_restart"] = r.best_restart;
    }
    if (!r.bit_accuracy.empty()) {
        j["mean_bit_accuracy"] = r.mean_bit_accuracy;
        j["bit_accuracy"] = r.bit_accuracy;
        ordered_json pins = ordered_json::array();
        for (const auto& p : r.pin_averages)
            pins.push_back({{"pin_index", p.pin}, {"real_avg", p.real_avg}, {"predicted_avg", p.predicted_avg}});
        j["pin_averages"] = pins;
        std::vector<std::string> preds;
        preds.reserve(r.predictions.size());
        for (const auto& p : r.predictions) preds.push_back(p.to_string());
        j["predictions"] = preds;
    }
    j["train_rows"] = r.train_rows;
    j["holdout_rows"] = r.holdout_rows;
    j["holdout_indices"] = r.holdout_indices;
    j["model_dev_mse"] = r.surrogate_dev_mse;
    j["history"] = history_json(r.history);
    j["seconds"] = r.seconds;
    j["config"] = r.config;
    return j;
}

std::string pin_average_csv(const AttackReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "pin_index,real_avg,predicted_avg\n";
    for (const auto& p : r.pin_averages) out << p.pin << ',' << p.real_avg << ',' << p.predicted_avg << '\n';
    return out.str();
}

}  // namespace lockbreak
