// lockbreak: command-line front end. Every subcommand writes its artifacts
// atomically and prints one summary line; errors exit nonzero with the module
// that raised them.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lockbreak/attacks.hpp"
#include "lockbreak/locking.hpp"
#include "lockbreak/model_io.hpp"
#include "lockbreak/netlist.hpp"
#include "lockbreak/runtime.hpp"
#include "lockbreak/simulator.hpp"
#include "lockbreak/sweep.hpp"
#include "lockbreak/trainer.hpp"

namespace fs = std::filesystem;
using namespace lockbreak;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Flags that name outputs; they are not part of a run's identity.
const std::vector<std::string> kOutputFlags = {"--out",         "--key-out", "--report",   "--model-out",
                                               "--history-out", "--pins-csv", "--summary-out"};

std::string meta_path(const std::string& csv) { return csv + ".meta.json"; }

void write_text(const std::string& path, std::string_view text) { write_file_atomic(path, text); }

void write_json(const std::string& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

IOTable read_table(const std::string& path) {
    const std::string csv = read_file(path);
    const std::string meta = fs::exists(meta_path(path)) ? read_file(meta_path(path)) : std::string();
    return io_table_from_csv(csv, meta);
}

void write_table(const std::string& path, const IOTable& t) {
    write_text(path, io_table_to_csv(t));
    write_text(meta_path(path), io_table_metadata_json(t));
}

Key read_key(const std::string& path) { return parse_key_text(read_file(path)); }

LockedNetlist read_locked(const std::string& path) { return as_locked(read_bench_file(path)); }

template <typename T>
std::string join(const std::vector<T>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
    return out.str();
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

// The arguments after the subcommand name, minus output flags, with input
// paths made absolute so the echo can be replayed from any directory.
json run_echo(const std::string& command, const std::vector<std::string>& args,
              const std::vector<std::string>& path_flags) {
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string a = args[i];
        std::string value;
        bool inline_value = false;
        if (auto eq = a.find('='); a.rfind("--", 0) == 0 && eq != std::string::npos) {
            value = a.substr(eq + 1);
            a = a.substr(0, eq);
            inline_value = true;
        }
        const bool is_output = std::find(kOutputFlags.begin(), kOutputFlags.end(), a) != kOutputFlags.end();
        const bool is_path = std::find(path_flags.begin(), path_flags.end(), a) != path_flags.end();
        if (!inline_value && (is_output || is_path) && i + 1 < args.size()) value = args[++i];
        if (is_output) continue;
        if (is_path) value = fs::absolute(value).lexically_normal().string();
        kept.push_back(a);
        if (inline_value || is_path) kept.push_back(value);
    }
    return json{{"command", command}, {"args", kept}};
}

struct NetKnobs {
    std::size_t hidden = 128;
    std::size_t layers = 1;
    std::size_t chunk_width = 8;
    std::uint64_t init_seed = 1;

    NetworkConfig config() const {
        if (layers != 1 && layers != 2) throw ModelError("--layers must be 1 or 2");
        NetworkConfig n;
        n.hidden.assign(layers, hidden);
        n.chunk_width = chunk_width;
        n.init_seed = init_seed;
        return n;
    }
};

struct TrainKnobs {
    TrainConfig cfg;
    std::string schedule = "constant";

    TrainConfig config() const {
        TrainConfig c = cfg;
        c.schedule = schedule_from_string(schedule);
        return c;
    }
};

void add_net(CLI::App* sub, NetKnobs& n) {
    sub->add_option("--hidden", n.hidden, "Hidden width per LSTM layer")->capture_default_str();
    sub->add_option("--layers", n.layers, "LSTM layers (1 or 2)")->capture_default_str();
    sub->add_option("--chunk-width", n.chunk_width, "Bits consumed per timestep")->capture_default_str();
    sub->add_option("--init-seed", n.init_seed, "Weight initialisation seed")->capture_default_str();
}

void add_train(CLI::App* sub, TrainKnobs& t, const std::string& prefix = "") {
    sub->add_option("--" + prefix + "epochs", t.cfg.epochs, "Maximum epochs")->capture_default_str();
    sub->add_option("--" + prefix + "patience", t.cfg.patience, "Early-stopping patience")->capture_default_str();
    sub->add_option("--" + prefix + "dev-fraction", t.cfg.dev_fraction, "Dev split fraction")->capture_default_str();
    sub->add_option("--" + prefix + "schedule", t.schedule, "constant | decay")->capture_default_str();
    sub->add_option("--" + prefix + "decay", t.cfg.decay, "Per-epoch decay of the learning rate")
        ->capture_default_str();
    sub->add_option("--" + prefix + "lr", t.cfg.learning_rate, "Learning rate")->capture_default_str();
    sub->add_option("--" + prefix + "momentum", t.cfg.momentum, "Momentum")->capture_default_str();
    sub->add_option("--" + prefix + "batch-size", t.cfg.batch_size, "Batch size")->capture_default_str();
    sub->add_option("--" + prefix + "train-seed", t.cfg.seed, "Shuffle and dev-split seed")->capture_default_str();
}

struct KeyKnobs {
    KeyAttackConfig cfg;
    NetKnobs net;
    TrainKnobs train;
    std::string stimuli = "oracle";

    KeyKnobs() {
        net.hidden = cfg.network.hidden.front();
        train.cfg = cfg.surrogate_train;
    }

    KeyAttackConfig config() const {
        KeyAttackConfig c = cfg;
        c.network = net.config();
        c.surrogate_train = train.config();
        c.surrogate_stimuli = surrogate_stimuli_from_string(stimuli);
        return c;
    }
};

void add_key(CLI::App* sub, KeyKnobs& k) {
    add_net(sub, k.net);
    add_train(sub, k.train, "surrogate-");
    auto& c = k.cfg;
    sub->add_option("--surrogate-rows", c.surrogate_rows, "Synthetic (x, k) rows for the surrogate")
        ->capture_default_str();
    sub->add_option("--surrogate-data-seed", c.surrogate_data_seed, "Seed of the synthetic keys/stimuli")
        ->capture_default_str();
    sub->add_option("--surrogate-stimuli", k.stimuli, "oracle | random")->capture_default_str();
    sub->add_option("--restarts", c.restarts, "Random key restarts")->capture_default_str();
    sub->add_option("--key-epochs", c.key_epochs, "Key-update passes over the oracle slice")->capture_default_str();
    sub->add_option("--key-lr", c.key_learning_rate, "Key learning rate")->capture_default_str();
    sub->add_option("--key-momentum", c.key_momentum, "Key momentum")->capture_default_str();
    sub->add_option("--key-batch-size", c.key_batch_size, "Oracle rows per key update (0 = all)")
        ->capture_default_str();
    sub->add_option("--holdout-fraction", c.holdout_fraction, "Oracle fraction kept for validation")
        ->capture_default_str();
    sub->add_option("--seed", c.seed, "Restart and split seed")->capture_default_str();
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw SweepError("grid value '" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

int category_exit(const std::string& module) {
    static const std::map<std::string, int> codes = {{"io", 3},         {"netlist", 4}, {"locking", 5},
                                                     {"simulator", 6},  {"drnn", 7},    {"attacks", 8},
                                                     {"harness", 9}};
    const auto it = codes.find(module);
    return it == codes.end() ? 1 : it->second;
}

int run_cli(std::vector<std::string> argv);

// Runs a report's echoed command again into a scratch directory and compares
// every field except wall-clock time.
void strip_volatile(json& j) {
    if (!j.is_object()) return;
    j.erase("seconds");
    j.erase("run");
    for (auto& [k, v] : j.items()) strip_volatile(v);
}

bool rerun(const std::string& report_path, const std::string& out_path) {
    const json old = json::parse(read_file(report_path));
    if (!old.contains("run")) throw Error("harness", "report has no run echo: " + report_path);
    const auto& run = old.at("run");
    std::vector<std::string> argv{"lockbreak", run.at("command").get<std::string>()};
    for (const auto& a : run.at("args")) argv.push_back(a.get<std::string>());
    const fs::path target = out_path.empty() ? fs::temp_directory_path() / "lockbreak_rerun.json" : fs::path(out_path);
    argv.push_back("--report");
    argv.push_back(target.string());
    if (const int rc = run_cli(argv); rc != 0) throw Error("harness", "re-run exited with status " + std::to_string(rc));
    json fresh = json::parse(read_file(target));
    json a = old;
    strip_volatile(a);
    strip_volatile(fresh);
    if (out_path.empty()) fs::remove(target);
    if (a == fresh) return true;
    for (auto& [k, v] : a.items())
        if (!fresh.contains(k) || fresh[k] != v) std::cerr << "differs: " << k << '\n';
    return false;
}

int run_cli(std::vector<std::string> argv) {
    CLI::App app{"Logic-locking workbench and recurrent-network attacks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "lockbreak 0.1.0");

    // ---- fixture
    std::string fx_kind, out;
    RandomNetlistOptions ro;
    ro.inputs = 16;
    ro.outputs = 8;
    ro.gates = 200;
    ro.max_fanin = 2;
    ro.xor_fraction = 0.3;
    std::size_t fx_width = 8;
    std::uint64_t seed = 1;
    auto* fx = app.add_subcommand("fixture", "Generate a benchmark netlist (random | identity | inverters)");
    fx->add_option("kind", fx_kind, "random | identity | inverters")->required();
    fx->add_option("--out", out, "Output .bench")->required();
    fx->add_option("--inputs", ro.inputs)->capture_default_str();
    fx->add_option("--outputs", ro.outputs)->capture_default_str();
    fx->add_option("--gates", ro.gates)->capture_default_str();
    fx->add_option("--max-fanin", ro.max_fanin)->capture_default_str();
    fx->add_option("--xor-fraction", ro.xor_fraction)->capture_default_str();
    fx->add_option("--unary-fraction", ro.unary_fraction)->capture_default_str();
    fx->add_option("--width", fx_width, "Pin count for identity / inverters")->capture_default_str();
    fx->add_option("--seed", seed)->capture_default_str();
    std::string fx_name;
    fx->add_option("--name", fx_name, "Netlist name (default: file stem)");

    // ---- lock
    std::string in_path, key_out;
    std::size_t key_width = 8;
    std::size_t equiv_budget = 1 << 14;
    auto* lock = app.add_subcommand("lock", "Insert random XOR/XNOR key gates");
    lock->add_option("--in", in_path, "Original .bench")->required()->check(CLI::ExistingFile);
    lock->add_option("--key-width", key_width)->capture_default_str();
    lock->add_option("--seed", seed)->capture_default_str();
    lock->add_option("--out", out, "Locked .bench")->required();
    lock->add_option("--key-out", key_out, "Key file")->required();
    lock->add_option("--equiv-budget", equiv_budget, "Random vectors when exhaustive check is too large")
        ->capture_default_str();

    // ---- simulate
    std::string netlist_path, key_path, stimuli_path;
    std::vector<std::string> vectors;
    auto* sim = app.add_subcommand("simulate", "Evaluate a netlist on given stimuli");
    sim->add_option("--netlist", netlist_path)->required()->check(CLI::ExistingFile);
    sim->add_option("--key", key_path, "Key file; required for locked netlists")->check(CLI::ExistingFile);
    auto* sim_src = sim->add_option("--stimuli", stimuli_path, "File with one bit string per line")
                        ->check(CLI::ExistingFile);
    sim->add_option("--vector", vectors, "Bit string (input 0 first); repeatable")->excludes(sim_src);
    sim->add_option("--out", out, "IO-table CSV (stdout when omitted)");

    // ---- gendata
    std::size_t count = 1000;
    auto* gen = app.add_subcommand("gendata", "Random stimuli and their responses as an IO table");
    gen->add_option("--netlist", netlist_path)->required()->check(CLI::ExistingFile);
    gen->add_option("--key", key_path, "Key file; required for locked netlists")->check(CLI::ExistingFile);
    gen->add_option("--count", count)->capture_default_str();
    gen->add_option("--seed", seed)->capture_default_str();
    gen->add_option("--out", out, "IO-table CSV (+ .meta.json sidecar)")->required();

    // ---- train
    std::string table_path, warm_path, model_out, history_out, report_out;
    bool inverse = false;
    NetKnobs tr_net;
    TrainKnobs tr_train;
    auto* trn = app.add_subcommand("train", "Train a recurrent network on an IO table");
    trn->add_option("--table", table_path)->required()->check(CLI::ExistingFile);
    trn->add_flag("--inverse", inverse, "Learn outputs -> inputs");
    trn->add_option("--warm-start", warm_path, "Continue from a saved model")->check(CLI::ExistingFile);
    add_net(trn, tr_net);
    add_train(trn, tr_train);
    trn->add_option("--model-out", model_out);
    trn->add_option("--history-out", history_out, "Per-epoch CSV");
    trn->add_option("--report", report_out);

    // ---- attack-key
    std::string locked_path, oracle_path, eval_key_path;
    KeyKnobs kk;
    auto* ak = app.add_subcommand("attack-key", "Recover the key from oracle pairs");
    ak->add_option("--locked", locked_path)->required()->check(CLI::ExistingFile);
    ak->add_option("--oracle", oracle_path, "IO table from the activated chip")->required()->check(CLI::ExistingFile);
    ak->add_option("--eval-key", eval_key_path, "True key; only used after the attack to report bit match")
        ->check(CLI::ExistingFile);
    add_key(ak, kk);
    ak->add_option("--key-out", key_out);
    ak->add_option("--report", report_out);

    // ---- attack-output / attack-input
    IoAttackConfig io_cfg;
    NetKnobs io_net;
    TrainKnobs io_train;
    std::string pins_out;
    auto add_io = [&](CLI::App* sub) {
        sub->add_option("--netlist", netlist_path, "Netlist (locked or not); only its pin lists are used")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--oracle", oracle_path)->required()->check(CLI::ExistingFile);
        add_net(sub, io_net);
        add_train(sub, io_train);
        sub->add_option("--test-fraction", io_cfg.test_fraction)->capture_default_str();
        sub->add_option("--split-seed", io_cfg.split_seed)->capture_default_str();
        sub->add_option("--report", report_out);
        sub->add_option("--pins-csv", pins_out, "pin_index,real_avg,predicted_avg");
    };
    auto* ao = app.add_subcommand("attack-output", "Predict outputs of unseen stimuli");
    add_io(ao);
    auto* ai = app.add_subcommand("attack-input", "Predict stimuli from desired outputs");
    add_io(ai);

    // ---- bruteforce
    std::size_t top = 5;
    auto* bf = app.add_subcommand("bruteforce", "Score every key against an oracle table");
    bf->add_option("--locked", locked_path)->required()->check(CLI::ExistingFile);
    bf->add_option("--oracle", oracle_path)->required()->check(CLI::ExistingFile);
    bf->add_option("--out", out, "CSV key,match_rate");
    bf->add_option("--top", top, "Keys to print")->capture_default_str();

    // ---- sweep
    std::string axis = "training-size", summary_out;
    std::string grid_text;
    std::vector<std::size_t> layer_list{1};
    SweepSpec spec;
    SweepBase base;
    base.workers = default_workers();
    KeyKnobs sk;
    auto* sw = app.add_subcommand("sweep", "Repeat the key attack (or surrogate training) over a grid");
    sw->add_option("--locked", locked_path)->required()->check(CLI::ExistingFile);
    sw->add_option("--key", key_path, "True key: drives the simulated oracle")->required()->check(CLI::ExistingFile);
    sw->add_option("--axis", axis, "training-size | momentum | training-step | layers")->capture_default_str();
    sw->add_option("--grid", grid_text, "Comma-separated grid points")->required();
    sw->add_option("--repetitions", spec.repetitions)->capture_default_str();
    sw->add_option("--seed-base", spec.seed_base)->capture_default_str();
    sw->add_option("--layer-counts", layer_list, "Layer counts at every point")->delimiter(',')->capture_default_str();
    sw->add_option("--oracle-rows", base.oracle_rows, "Oracle rows when not sweeping training size")
        ->capture_default_str();
    sw->add_option("--eval-rows", base.eval_rows, "Fresh rows scoring each recovered key")->capture_default_str();
    sw->add_option("--workers", base.workers, "Concurrent cells (env LOCKBREAK_WORKERS)")->capture_default_str();
    add_key(sw, sk);
    sw->add_option("--out", out, "Per-cell CSV");
    sw->add_option("--summary-out", summary_out, "Per-point mean CSV");
    sw->add_option("--report", report_out);

    // ---- rerun
    std::string report_in;
    auto* rr = app.add_subcommand("rerun", "Replay a report's config echo and compare metrics");
    rr->add_option("report", report_in)->required()->check(CLI::ExistingFile);
    rr->add_option("--out", out, "Keep the fresh report here");

    std::vector<const char*> cargv;
    for (const auto& a : argv) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::vector<std::string> args(argv.begin() + 2, argv.end());

    try {
        if (*fx) {
            Netlist n = [&] {
                const std::string name = fx_name.empty() ? fs::path(out).stem().string() : fx_name;
                if (fx_kind == "random") return random_netlist(ro, seed, name);
                if (fx_kind == "identity") return identity_netlist(fx_width);
                if (fx_kind == "inverters") return inverter_bank(fx_width);
                throw Error("harness", "unknown fixture kind '" + fx_kind + "'");
            }();
            write_text(out, serialize_bench(n));
            std::cout << "fixture " << fx_kind << ": " << n.inputs().size() << " inputs, " << n.outputs().size()
                      << " outputs, " << n.gates().size() << " gates -> " << out << '\n';
        } else if (*lock) {
            const Netlist orig = read_bench_file(in_path);
            const LockResult lr = lock_random(orig, key_width, seed);
            const auto verdict = equiv_check(orig, apply_key(lr.locked, lr.key), equiv_budget, seed);
            if (!verdict.equal()) throw LockingError("locked netlist with its key differs from the original");
            write_text(out, serialize_bench(lr.locked.netlist));
            write_text(key_out, key_text(lr.key));
            std::cout << "locked " << orig.name() << " with " << key_width << " key gates; equiv "
                      << to_string(verdict.kind) << " over " << verdict.samples << " vectors -> " << out << ", "
                      << key_out << '\n';
        } else if (*sim || *gen) {
            LockedNetlist l = read_locked(netlist_path);
            Netlist n = l.netlist;
            if (l.key_input_count > 0) {
                if (key_path.empty()) throw Error("harness", "netlist is locked; pass --key");
                n = apply_key(l, read_key(key_path));
            } else if (!key_path.empty()) {
                throw Error("harness", "--key given but the netlist has no key inputs");
            }
            IOTable t;
            if (*gen) {
                t = gen_io_table(n, count, seed);
            } else {
                std::vector<BitVector> xs;
                std::vector<std::string> lines = vectors;
                if (!stimuli_path.empty()) {
                    std::istringstream s(read_file(stimuli_path));
                    for (std::string line; std::getline(s, line);) {
                        if (!line.empty() && line.back() == '\r') line.pop_back();
                        if (!line.empty()) lines.push_back(line);
                    }
                }
                if (lines.empty()) throw Error("harness", "no stimuli: pass --stimuli or --vector");
                for (const auto& v : lines) {
                    xs.push_back(BitVector::from_string(v));
                    if (xs.back().size() != n.inputs().size())
                        throw SimulationError("stimulus '" + v + "' has width " + std::to_string(v.size()) +
                                              ", netlist has " + std::to_string(n.inputs().size()) + " inputs");
                }
                const auto ys = evaluate_batch(n, xs);
                t = IOTable{n.inputs(), n.outputs(), {}, 0, n.name()};
                for (std::size_t i = 0; i < xs.size(); ++i) t.rows.push_back({xs[i], ys[i]});
            }
            if (out.empty()) {
                std::cout << io_table_to_csv(t);
            } else {
                write_table(out, t);
                std::cout << (*gen ? "gendata " : "simulate ") << t.size() << " rows of " << n.name() << " -> "
                          << out << '\n';
            }
        } else if (*trn) {
            const IOTable t = read_table(table_path);
            const Dataset d = inverse ? inverse_dataset_from_table(t) : dataset_from_table(t);
            const auto xw = static_cast<std::size_t>(d.inputs.rows());
            const auto yw = static_cast<std::size_t>(d.targets.rows());
            const NetworkConfig nc = tr_net.config();
            LstmNetwork init = warm_path.empty() ? LstmNetwork(NetworkShape{xw, nc.chunk_width, nc.hidden, yw}, nc.init_seed)
                                                 : load_model_file(warm_path);
            const TrainConfig tc = tr_train.config();
            const TrainResult r = train(std::move(init), d, tc);
            if (!model_out.empty()) save_model_file(r.net, model_out);
            if (!history_out.empty()) write_text(history_out, history_csv(r.history));
            const auto& best = r.history.at(r.best_epoch);
            if (!report_out.empty()) {
                ordered_json j;
                j["mode"] = "train";
                j["best_epoch"] = r.best_epoch;
                j["early_stopped"] = r.early_stopped;
                j["best_dev_mse"] = best.dev_mse;
                j["final_train_mse"] = r.history.back().train_mse;
                j["initial_dev_mse"] = r.history.front().dev_mse;
                j["warm_start"] = !warm_path.empty();
                ordered_json h = ordered_json::array();
                for (const auto& e : r.history)
                    h.push_back({{"epoch", e.epoch}, {"train_mse", e.train_mse}, {"dev_mse", e.dev_mse}, {"eta", e.eta}});
                j["history"] = h;
                j["config"] = {{"network", {{"hidden", nc.hidden}, {"chunk_width", nc.chunk_width}, {"init_seed", nc.init_seed}}},
                               {"train", {{"epochs", tc.epochs}, {"patience", tc.patience}, {"dev_fraction", tc.dev_fraction},
                                          {"schedule", to_string(tc.schedule)}, {"decay", tc.decay},
                                          {"learning_rate", tc.learning_rate}, {"momentum", tc.momentum},
                                          {"batch_size", tc.batch_size}, {"seed", tc.seed}}},
                               {"inverse", inverse}};
                j["run"] = run_echo("train", args, {"--table", "--warm-start"});
                write_json(report_out, j);
            }
            std::cout << "train: " << r.history.size() - 1 << " epochs, best epoch " << r.best_epoch << " dev mse "
                      << fmt(best.dev_mse) << " (epoch-0 dev mse " << fmt(r.history.front().dev_mse) << ")"
                      << (r.early_stopped ? ", early stop" : "") << '\n';
        } else if (*ak) {
            const LockedNetlist locked = read_locked(locked_path);
            const ThreatModel tm(locked, read_table(oracle_path));
            std::optional<Key> ek;
            if (!eval_key_path.empty()) ek = read_key(eval_key_path);
            const AttackReport r = attack_key(tm, kk.config(), ek);
            if (!key_out.empty()) write_text(key_out, key_text(*r.key));
            if (!report_out.empty()) {
                auto j = report_json(r);
                j["run"] = run_echo("attack-key", args, {"--locked", "--oracle", "--eval-key"});
                write_json(report_out, j);
            }
            std::cout << "attack-key: key " << r.key->to_string() << " holdout match " << fmt(r.match_rate)
                      << " over " << r.holdout_rows << " rows";
            if (r.key_bit_match) std::cout << ", key bits " << fmt(*r.key_bit_match);
            std::cout << ", " << fmt(r.seconds) << " s\n";
        } else if (*ao || *ai) {
            const LockedNetlist l = read_locked(netlist_path);
            const ThreatModel tm(l, read_table(oracle_path));
            IoAttackConfig c = io_cfg;
            c.network = io_net.config();
            c.train = io_train.config();
            const AttackReport r = *ao ? attack_output(tm, c) : attack_input(tm, c);
            if (!pins_out.empty()) write_text(pins_out, pin_average_csv(r));
            if (!report_out.empty()) {
                auto j = report_json(r);
                j["run"] = run_echo(*ao ? "attack-output" : "attack-input", args, {"--netlist", "--oracle"});
                write_json(report_out, j);
            }
            std::cout << "attack-" << r.mode << ": mean bit accuracy " << fmt(r.mean_bit_accuracy) << ", row match "
                      << fmt(r.match_rate) << " over " << r.holdout_rows << " held-out rows, "
                      << r.pin_averages.size() << " pins\n";
        } else if (*bf) {
            const LockedNetlist locked = read_locked(locked_path);
            const auto scores = brute_force_keys(locked, read_table(oracle_path));
            std::size_t perfect = 0;
            for (const auto& s : scores) perfect += s.match_rate == 1.0 ? 1 : 0;
            if (!out.empty()) {
                std::ostringstream csv;
                csv.precision(17);
                csv << "key,match_rate\n";
                for (const auto& s : scores) csv << s.key.to_string() << ',' << s.match_rate << '\n';
                write_text(out, csv.str());
            }
            std::cout << "bruteforce: " << scores.size() << " keys, " << perfect << " with match rate 1";
            for (std::size_t i = 0; i < std::min(top, scores.size()); ++i)
                std::cout << (i ? ", " : "; top: ") << scores[i].key.to_string() << '=' << fmt(scores[i].match_rate);
            std::cout << '\n';
        } else if (*sw) {
            spec.axis = sweep_axis_from_string(axis);
            spec.grid = parse_grid(grid_text);
            spec.layers = layer_list;
            base.attack = sk.config();
            const LockedNetlist locked = read_locked(locked_path);
            const SweepResult r = run_sweep(locked, read_key(key_path), spec, base);
            if (!out.empty()) write_text(out, sweep_csv(r));
            if (!summary_out.empty()) write_text(summary_out, sweep_summary_csv(r));
            if (!report_out.empty()) {
                auto j = sweep_json(r, base);
                j["run"] = run_echo("sweep", args, {"--locked", "--key"});
                write_json(report_out, j);
            }
            std::size_t failed = 0;
            for (const auto& c : r.cells) failed += c.metric ? 0 : 1;
            std::cout << "sweep " << axis << ": " << r.cells.size() << " cells (" << failed << " failed);";
            for (const auto& p : r.summary)
                std::cout << ' ' << p.axis_value << '/' << p.layers << "L=" << fmt(p.mean);
            std::cout << '\n';
        } else if (*rr) {
            const bool same = rerun(report_in, out);
            std::cout << "rerun: metrics " << (same ? "identical" : "DIFFER") << '\n';
            return same ? 0 : 10;
        }
    } catch (const Error& e) {
        std::cerr << "error [" << e.module() << "]: " << e.what() << '\n';
        return category_exit(e.module());
    } catch (const json::exception& e) {
        std::cerr << "error [io]: malformed JSON: " << e.what() << '\n';
        return category_exit("io");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    tune_allocator();
    return run_cli(std::vector<std::string>(argv, argv + argc));
}
