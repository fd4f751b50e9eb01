// Acceptance run: one PASS/FAIL line per criterion. Every threshold, seed and
// budget is a named constant below. `acceptance 5 7` runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lockbreak/attacks.hpp"
#include "lockbreak/locking.hpp"
#include "lockbreak/runtime.hpp"
#include "lockbreak/simulator.hpp"
#include "lockbreak/sweep.hpp"
#include "lockbreak/trainer.hpp"

using namespace lockbreak;
using Eigen::MatrixXd;

namespace {

using Clock = std::chrono::steady_clock;

std::string fixture(const std::string& name) { return std::string(LOCKBREAK_FIXTURE_DIR) + "/" + name; }

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---- 1: locking correctness
constexpr double kC1Seconds = 1.0;
constexpr std::size_t kC1KeyWidth = 4;
constexpr std::uint64_t kC1LockSeed = 7;

Outcome criterion1() {
    const Netlist c17 = read_bench_file(fixture("c17.bench"));
    const LockResult lock = lock_random(c17, kC1KeyWidth, kC1LockSeed);
    const Simulator orig(c17), locked(lock.locked.netlist);
    const std::size_t n = c17.inputs().size();
    auto corrupted = [&](const Key& k) {
        std::size_t bad = 0;
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
            const BitVector x = BitVector::from_uint(v, n);
            bad += orig.evaluate(x) != locked.evaluate(concat(x, k.bits())) ? 1 : 0;
        }
        return bad;
    };
    const std::size_t with_key = corrupted(lock.key);
    std::size_t min_flip = SIZE_MAX;
    for (std::size_t i = 0; i < kC1KeyWidth; ++i) {
        Key k = lock.key;
        k.flip(i);
        min_flip = std::min(min_flip, corrupted(k));
    }
    std::ostringstream d;
    d << "32 stimuli, correct key mismatches " << with_key << ", fewest corrupted stimuli under a bit flip "
      << min_flip;
    return {with_key == 0 && min_flip >= 1 && n == 5, d.str()};
}

// ---- 2: bit-parallel vs scalar simulation
constexpr double kC2Seconds = 10.0;
constexpr std::size_t kC2Vectors = 10000;
constexpr std::uint64_t kC2Seed = 2;

Outcome criterion2() {
    std::size_t mismatches = 0;
    std::ostringstream d;
    for (const char* f : {"c17.bench", "c432.bench", "c1355.bench", "c1908.bench", "c7552.bench",
                          "rand200.bench", "rand200_k8.bench"}) {
        const Netlist n = read_bench_file(fixture(f));
        const Simulator sim(n);
        const auto xs = random_stimuli(n.inputs().size(), kC2Vectors, kC2Seed);
        const auto packed = sim.evaluate_batch(xs);
        for (std::size_t i = 0; i < xs.size(); ++i) mismatches += packed[i] != sim.evaluate(xs[i]) ? 1 : 0;
        d << f << ' ';
    }
    d << "x " << kC2Vectors << " vectors, " << mismatches << " mismatches";
    return {mismatches == 0, d.str()};
}

// ---- 3: gradients vs central finite differences
constexpr double kC3Seconds = 60.0;
constexpr int kC3Instances = 100;
constexpr double kC3Step = 1e-5;
constexpr double kC3Tolerance = 1e-4;
constexpr std::uint64_t kC3Seed = 31337;

Outcome criterion3() {
    std::mt19937_64 rng(kC3Seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5), unit(0.0, 1.0);
    double worst = 0.0;
    std::size_t checked = 0;
    for (int trial = 0; trial < kC3Instances; ++trial) {
        NetworkShape s;
        s.chunk_width = 1 + rng() % 3;
        s.input_bits = s.chunk_width * (rng() % 3) + 1 + rng() % s.chunk_width;
        s.hidden.assign(1 + rng() % 2, 0);
        for (auto& h : s.hidden) h = 1 + rng() % 4;
        s.outputs = 1 + rng() % 3;
        LstmNetwork net(s, rng());
        net.params().for_each([&](std::string_view, std::span<double> a) {
            for (double& v : a) v = u(rng);
        });
        const Eigen::Index b = 1 + static_cast<Eigen::Index>(rng() % 3);
        MatrixXd x(static_cast<Eigen::Index>(s.input_bits), b), y(static_cast<Eigen::Index>(s.outputs), b);
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = unit(rng);
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = static_cast<double>(rng() & 1);

        const auto g = backward(net, forward_batch(net, x), y);
        std::vector<double> analytic;
        g.params.for_each([&](std::string_view, std::span<const double> a) {
            analytic.insert(analytic.end(), a.begin(), a.end());
        });
        auto loss = [&] { return squared_error(predict(net, x), y).sum; };
        std::size_t k = 0;
        net.params().for_each([&](std::string_view, std::span<double> a) {
            for (double& w : a) {
                const double saved = w;
                w = saved + kC3Step;
                const double up = loss();
                w = saved - kC3Step;
                const double down = loss();
                w = saved;
                const double numeric = (up - down) / (2 * kC3Step);
                const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-5});
                worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
                ++k;
                ++checked;
            }
        });
    }
    std::ostringstream d;
    d << kC3Instances << " instances, " << checked << " parameters, max relative error " << worst;
    return {worst < kC3Tolerance, d.str()};
}

// ---- 4: memorization
constexpr double kC4Seconds = 120.0;
constexpr std::size_t kC4Rows = 64;
constexpr std::size_t kC4In = 6;
constexpr std::size_t kC4Out = 4;
constexpr std::size_t kC4Hidden = 128;
constexpr std::size_t kC4Epochs = 5000;
constexpr double kC4TargetMse = 1e-2;
constexpr std::uint64_t kC4Seed = 4;

Outcome criterion4() {
    // The full 6-bit input space with uniformly random 4-bit responses.
    std::mt19937_64 rng(kC4Seed);
    IOTable t;
    for (std::size_t i = 0; i < kC4In; ++i) t.input_names.push_back("x" + std::to_string(i));
    for (std::size_t i = 0; i < kC4Out; ++i) t.output_names.push_back("y" + std::to_string(i));
    for (std::uint64_t v = 0; v < kC4Rows; ++v) t.rows.push_back({BitVector::from_uint(v, kC4In),
                                                                  BitVector::from_uint(rng() & 0xF, kC4Out)});
    const Dataset d = dataset_from_table(t);

    TrainConfig cfg;  // shipped eta / alpha
    cfg.epochs = kC4Epochs;
    cfg.patience = kC4Epochs;
    cfg.dev_fraction = 0.0;
    cfg.target_train_mse = kC4TargetMse;
    cfg.restore_best = false;
    cfg.seed = kC4Seed;
    const LstmNetwork init(NetworkShape{kC4In, 8, {kC4Hidden, kC4Hidden}, kC4Out}, kC4Seed);
    const TrainResult r = train(init, d, cfg);
    const double final_mse = squared_error(predict(r.net, d.inputs), d.targets).mse;
    std::ostringstream s;
    s << "2HL-" << kC4Hidden << ", eta " << cfg.learning_rate << ", alpha " << cfg.momentum << ": train MSE "
      << final_mse << " after " << r.history.size() - 1 << " epochs";
    return {final_mse < kC4TargetMse && r.history.size() - 1 <= kC4Epochs, s.str()};
}

// ---- 5: key attack on the 8-bit fixture
constexpr double kC5Seconds = 600.0;
constexpr std::size_t kC5OracleRows = 512;
constexpr std::size_t kC5Restarts = 8;
constexpr int kC5Trials = 10;
constexpr int kC5MinInSet = 8;
constexpr std::size_t kC5RandomKeys = 64;

KeyAttackConfig trial_config(std::uint64_t seed) {
    KeyAttackConfig cfg;
    cfg.restarts = kC5Restarts;
    cfg.seed = cfg.network.init_seed = cfg.surrogate_data_seed = cfg.surrogate_train.seed = seed;
    return cfg;
}

Outcome criterion5() {
    const Netlist original = read_bench_file(fixture("rand200.bench"));
    const LockedNetlist locked = as_locked(read_bench_file(fixture("rand200_k8.bench")));
    int in_set = 0, beat_median = 0;
    std::ostringstream d;
    for (int t = 0; t < kC5Trials; ++t) {
        const IOTable oracle = gen_io_table(original, kC5OracleRows, 1000 + static_cast<std::uint64_t>(t));
        const KeyAttackConfig cfg = trial_config(100 + static_cast<std::uint64_t>(t));
        const ThreatModel tm(locked, oracle);
        const AttackReport r = attack_key(tm, cfg);

        std::set<std::string> perfect;
        for (const auto& ks : brute_force_keys(locked, oracle))
            if (ks.match_rate == 1.0) perfect.insert(ks.key.to_string());
        const bool ok = perfect.count(r.key->to_string()) == 1;
        in_set += ok ? 1 : 0;

        const IOTable holdout = oracle.subset(key_attack_split(tm, cfg).second);
        std::mt19937_64 rng(7000 + static_cast<std::uint64_t>(t));
        std::vector<double> rates;
        for (std::size_t i = 0; i < kC5RandomKeys; ++i)
            rates.push_back(score_key(locked, Key::from_uint(rng() & 0xFF, 8), holdout));
        std::sort(rates.begin(), rates.end());
        const double median = 0.5 * (rates[kC5RandomKeys / 2 - 1] + rates[kC5RandomKeys / 2]);
        const double mine = score_key(locked, *r.key, holdout);
        beat_median += mine > median ? 1 : 0;
        d << (ok ? 'Y' : 'n');
    }
    std::ostringstream s;
    s << "in rate-1 set " << in_set << "/" << kC5Trials << " (" << d.str() << "), beat random-key median "
      << beat_median << "/" << kC5Trials;
    return {in_set >= kC5MinInSet && beat_median == kC5Trials, s.str()};
}

// ---- 6: training-size sweep
constexpr double kC6Seconds = 1800.0;
const std::vector<double> kC6Sizes = {64, 128, 256, 512};
constexpr std::size_t kC6Seeds = 5;
constexpr double kC6Tolerance = 0.05;
// Stage A budget per cell; the full default keeps 40 cells well over budget.
constexpr std::size_t kC6SurrogateRows = 32768;

Outcome criterion6() {
    const LockedNetlist locked = as_locked(read_bench_file(fixture("rand200_k8.bench")));
    const Key key = parse_key_text(read_file(fixture("rand200_k8.key")));
    SweepSpec spec;
    spec.axis = SweepAxis::TrainingSize;
    spec.grid = kC6Sizes;
    spec.repetitions = kC6Seeds;
    spec.layers = {1, 2};
    SweepBase base;
    base.attack.surrogate_rows = kC6SurrogateRows;
    base.workers = default_workers();
    const SweepResult r = run_sweep(locked, key, spec, base);

    std::vector<double> one, two;
    std::size_t failed = 0;
    for (const auto& p : r.summary) (p.layers == 1 ? one : two).push_back(p.mean);
    for (const auto& c : r.cells) failed += c.metric ? 0 : 1;
    auto curve_ok = [](const std::vector<double>& m) {
        int inversions = 0;
        for (std::size_t i = 1; i < m.size(); ++i) {
            if (m[i] >= m[i - 1]) continue;
            if (m[i - 1] - m[i] > kC6Tolerance) return false;
            ++inversions;
        }
        return inversions <= 1;
    };
    const bool layers_ok = two.back() >= one.back() - kC6Tolerance;
    std::ostringstream s;
    s.precision(3);
    s << "mean success 1HL";
    for (double v : one) s << ' ' << v;
    s << " | 2HL";
    for (double v : two) s << ' ' << v;
    s << " | failed cells " << failed;
    return {failed == 0 && curve_ok(one) && curve_ok(two) && layers_ok, s.str()};
}

// ---- 7: output guessing on identity and inverter banks
constexpr double kC7Seconds = 300.0;
constexpr std::size_t kC7Width = 16;
constexpr std::size_t kC7TrainRows = 512;
constexpr double kC7TestFraction = 0.25;
constexpr double kC7MinAccuracy = 0.99;

Outcome criterion7() {
    // 512 training rows after holding out a quarter.
    const auto total = static_cast<std::size_t>(std::round(kC7TrainRows / (1.0 - kC7TestFraction)));
    std::ostringstream s;
    bool ok = true;
    for (const Netlist& n : {identity_netlist(kC7Width), inverter_bank(kC7Width)}) {
        IoAttackConfig cfg;
        cfg.test_fraction = kC7TestFraction;
        const AttackReport r = attack_output(ThreatModel(as_locked(n), gen_io_table(n, total, 7)), cfg);
        std::istringstream csv(pin_average_csv(r));
        std::string line;
        std::getline(csv, line);
        std::size_t pairs = 0;
        std::set<std::size_t> pins;
        while (std::getline(csv, line)) {
            std::istringstream f(line);
            std::string pin, real, pred, extra;
            if (std::getline(f, pin, ',') && std::getline(f, real, ',') && std::getline(f, pred, ',') &&
                !std::getline(f, extra, ','))
                pins.insert(std::stoul(pin));
            ++pairs;
        }
        const bool this_ok = r.train_rows == kC7TrainRows && r.mean_bit_accuracy >= kC7MinAccuracy &&
                             *std::min_element(r.bit_accuracy.begin(), r.bit_accuracy.end()) >= kC7MinAccuracy &&
                             pairs == kC7Width && pins.size() == kC7Width;
        ok = ok && this_ok;
        if (s.tellp() > 0) s << "; ";
        s << n.name() << ": accuracy " << r.mean_bit_accuracy << " (" << r.train_rows << " rows), " << pairs
          << " pin pairs";
    }
    return {ok, s.str()};
}

// ---- 8: re-running a report's config echo
Outcome criterion8() {
    auto strip = [](nlohmann::ordered_json j) {
        j.erase("seconds");
        return j;
    };
    const LockedNetlist locked = as_locked(read_bench_file(fixture("rand200_k8.bench")));
    const Netlist original = read_bench_file(fixture("rand200.bench"));
    const IOTable oracle = gen_io_table(original, 256, 8);
    const ThreatModel tm(locked, oracle);

    KeyAttackConfig kc;
    kc.surrogate_rows = 4096;
    kc.surrogate_train.epochs = 5;
    kc.restarts = 3;
    kc.key_epochs = 30;
    kc.seed = 8;
    const auto key_report = report_json(attack_key(tm, kc));
    const auto key_cfg = key_attack_config_from_json(nlohmann::json::parse(key_report.at("config").dump()));
    const bool key_same = strip(report_json(attack_key(tm, key_cfg))) == strip(key_report);

    IoAttackConfig ic;
    ic.network.hidden = {32};
    ic.train.epochs = 40;
    const auto out_report = report_json(attack_output(tm, ic));
    const auto io_cfg = io_attack_config_from_json(nlohmann::json::parse(out_report.at("config").dump()));
    const bool out_same = strip(report_json(attack_output(tm, io_cfg))) == strip(out_report);
    const auto in_report = report_json(attack_input(tm, ic));
    const bool in_same = strip(report_json(attack_input(tm, io_cfg))) == strip(in_report);

    std::ostringstream s;
    s << "key report " << (key_same ? "identical" : "differs") << ", output report "
      << (out_same ? "identical" : "differs") << ", input report " << (in_same ? "identical" : "differs");
    return {key_same && out_same && in_same, s.str()};
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;  // 0 = no runtime bound
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    tune_allocator();
    const std::vector<Criterion> all = {
        {1, "locking correctness", kC1Seconds, criterion1},
        {2, "simulator agreement", kC2Seconds, criterion2},
        {3, "gradient fidelity", kC3Seconds, criterion3},
        {4, "memorization", kC4Seconds, criterion4},
        {5, "key attack vs exact oracle", kC5Seconds, criterion5},
        {6, "training-size sweep shape", kC6Seconds, criterion6},
        {7, "output guessing on identity/inverter banks", kC7Seconds, criterion7},
        {8, "report reproducibility", 0.0, criterion8},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        const bool in_time = c.budget_seconds == 0.0 || secs < c.budget_seconds;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
                  << "; " << secs << " s";
        if (c.budget_seconds > 0.0) std::cout << " (limit " << c.budget_seconds << " s)";
        std::cout << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
