#include "lockbreak/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

namespace lockbreak {

using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kEvalSeedOffset = std::uint64_t{1} << 32;

bool attack_axis(SweepAxis a) { return a == SweepAxis::TrainingSize || a == SweepAxis::Layers; }

std::size_t as_count(double v, const char* what) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9)
        throw SweepError(std::string(what) + " grid values must be positive integers, got " + std::to_string(v));
    return static_cast<std::size_t>(v);
}

void run_cell(const LockedNetlist& locked, const Netlist& oracle_net, const SweepSpec& spec,
              const SweepBase& base, SweepCell& cell) {
    KeyAttackConfig cfg = base.attack;
    cfg.seed = cell.seed;
    cfg.network.init_seed = cell.seed;
    cfg.surrogate_data_seed = cell.seed;
    cfg.surrogate_train.seed = cell.seed;
    const std::size_t width = cfg.network.hidden.empty() ? 64 : cfg.network.hidden.front();
    cfg.network.hidden.assign(cell.layers, width);

    std::size_t rows = base.oracle_rows;
    switch (spec.axis) {
        case SweepAxis::TrainingSize: rows = as_count(cell.axis_value, "training-size"); break;
        case SweepAxis::Momentum: cfg.surrogate_train.momentum = cell.axis_value; break;
        case SweepAxis::TrainingStep: cfg.surrogate_train.learning_rate = cell.axis_value; break;
        case SweepAxis::Layers: break;
    }
    const ThreatModel tm(locked, gen_io_table(oracle_net, rows, cell.seed));
    if (attack_axis(spec.axis)) {
        const AttackReport r = attack_key(tm, cfg);
        const IOTable eval = gen_io_table(oracle_net, base.eval_rows, cell.seed + kEvalSeedOffset);
        cell.metric = score_key(locked, *r.key, eval);
        cell.key = r.key->to_string();
        cell.holdout_match_rate = r.match_rate;
    } else {
        const TrainResult s = train_key_surrogate(tm, cfg);
        cell.metric = s.history.back().train_mse;
    }
}

}  // namespace

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::TrainingSize: return "training-size";
        case SweepAxis::Momentum: return "momentum";
        case SweepAxis::TrainingStep: return "training-step";
        case SweepAxis::Layers: return "layers";
    }
    return "?";
}

SweepAxis sweep_axis_from_string(std::string_view s) {
    for (auto a : {SweepAxis::TrainingSize, SweepAxis::Momentum, SweepAxis::TrainingStep, SweepAxis::Layers})
        if (to_string(a) == s) return a;
    throw SweepError("unknown sweep axis '" + std::string(s) +
                     "' (training-size | momentum | training-step | layers)");
}

void SweepSpec::validate() const {
    if (grid.empty()) throw SweepError("sweep grid is empty");
    if (repetitions < 1) throw SweepError("repetitions must be >= 1");
    for (double v : grid) {
        switch (axis) {
            case SweepAxis::TrainingSize: as_count(v, "training-size"); break;
            case SweepAxis::Layers:
                if (v != 1.0 && v != 2.0) throw SweepError("layers grid values must be 1 or 2");
                break;
            case SweepAxis::Momentum:
                if (!(v >= 0.0 && v < 1.0)) throw SweepError("momentum grid values must be in [0, 1)");
                break;
            case SweepAxis::TrainingStep:
                if (!(v > 0.0)) throw SweepError("training-step grid values must be > 0");
                break;
        }
    }
    if (axis != SweepAxis::Layers) {
        if (layers.empty()) throw SweepError("at least one layer count is required");
        for (auto l : layers)
            if (l != 1 && l != 2) throw SweepError("layer counts must be 1 or 2");
    }
}

std::uint64_t sweep_seed(const SweepSpec& spec, std::size_t rep) { return spec.seed_base + rep; }

SweepResult run_sweep(const LockedNetlist& locked, const Key& key, const SweepSpec& spec, const SweepBase& base) {
    spec.validate();
    base.attack.validate();
    if (base.eval_rows < 1) throw SweepError("evaluation table needs at least one row");
    if (key.width() != locked.key_input_count) throw SweepError("key width does not match the locked netlist");
    const Netlist oracle_net = apply_key(locked, key);

    SweepResult res;
    res.spec = spec;
    const std::vector<std::size_t> layer_set =
        spec.axis == SweepAxis::Layers ? std::vector<std::size_t>{0} : spec.layers;
    for (double v : spec.grid)
        for (auto l : layer_set)
            for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
                SweepCell c;
                c.axis_value = v;
                c.layers = spec.axis == SweepAxis::Layers ? static_cast<std::size_t>(v) : l;
                c.repetition = rep;
                c.seed = sweep_seed(spec, rep);
                res.cells.push_back(c);
            }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < res.cells.size(); i = next++) {
            try {
                run_cell(locked, oracle_net, spec, base, res.cells[i]);
            } catch (const std::exception& e) {
                res.cells[i].metric.reset();
                res.cells[i].error = e.what();
            }
        }
    };
    const std::size_t n_workers = std::clamp<std::size_t>(base.workers, 1, res.cells.size());
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }

    for (const auto& c : res.cells) {
        if (c.repetition != 0) continue;
        SweepPoint p{c.axis_value, c.layers, 0, 0.0};
        double sum = 0.0;
        for (const auto& d : res.cells)
            if (d.axis_value == p.axis_value && d.layers == p.layers && d.metric) {
                sum += *d.metric;
                ++p.completed;
            }
        p.mean = p.completed ? sum / static_cast<double>(p.completed) : std::numeric_limits<double>::quiet_NaN();
        res.summary.push_back(p);
    }
    return res;
}

std::string sweep_csv(const SweepResult& r) {
    std::ostringstream out;
    out.precision(17);
    out << "axis,axis_value,layers,repetition,seed,metric,key,holdout_match_rate,error\n";
    for (const auto& c : r.cells) {
        out << to_string(r.spec.axis) << ',' << c.axis_value << ',' << c.layers << ',' << c.repetition << ','
            << c.seed << ',';
        if (c.metric) out << *c.metric;
        std::string err = c.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
        out << ',' << c.key << ',' << c.holdout_match_rate << ',' << err << '\n';
    }
    return out.str();
}

std::string sweep_summary_csv(const SweepResult& r) {
    std::ostringstream out;
    out.precision(17);
    out << "axis,axis_value,layers,completed,mean_metric\n";
    for (const auto& p : r.summary)
        out << to_string(r.spec.axis) << ',' << p.axis_value << ',' << p.layers << ',' << p.completed << ','
            << p.mean << '\n';
    return out.str();
}

ordered_json sweep_json(const SweepResult& r, const SweepBase& base) {
    ordered_json spec{{"axis", to_string(r.spec.axis)},
                      {"grid", r.spec.grid},
                      {"repetitions", r.spec.repetitions},
                      {"seed_base", r.spec.seed_base},
                      {"layers", r.spec.layers}};
    ordered_json cells = ordered_json::array();
    for (const auto& c : r.cells) {
        ordered_json j{{"axis_value", c.axis_value}, {"layers", c.layers}, {"repetition", c.repetition},
                       {"seed", c.seed}};
        j["metric"] = c.metric ? ordered_json(*c.metric) : ordered_json(nullptr);
        if (!c.key.empty()) {
            j["key"] = c.key;
            j["holdout_match_rate"] = c.holdout_match_rate;
        }
        if (!c.error.empty()) j["error"] = c.error;
        cells.push_back(j);
    }
    ordered_json summary = ordered_json::array();
    for (const auto& p : r.summary) {
        ordered_json j{{"axis_value", p.axis_value}, {"layers", p.layers}, {"completed", p.completed}};
        j["mean_metric"] = p.completed ? ordered_json(p.mean) : ordered_json(nullptr);
        summary.push_back(j);
    }
    return ordered_json{{"spec", spec},
                        {"attack", config_json(base.attack)},
                        {"oracle_rows", base.oracle_rows},
                        {"eval_rows", base.eval_rows},
                        {"cells", cells},
                        {"summary", summary}};
}

std::size_t default_workers() {
    if (const char* v = std::getenv("LOCKBREAK_WORKERS")) {
        char* end = nullptr;
        const unsigned long n = std::strtoul(v, &end, 10);
        if (end != v && *end == '\0' && n >= 1) return n;
    }
    return 1;
}

}  // namespace lockbreak
