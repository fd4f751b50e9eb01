// Python extension. Configs and reports cross the boundary as JSON text; the
// package wrapper turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lockbreak/attacks.hpp"
#include "lockbreak/locking.hpp"
#include "lockbreak/netlist.hpp"
#include "lockbreak/simulator.hpp"
#include "lockbreak/sweep.hpp"
#include "lockbreak/trainer.hpp"

namespace py = pybind11;
using namespace lockbreak;
using nlohmann::json;

namespace {

std::vector<BitVector> to_bits(const std::vector<std::string>& rows) {
    std::vector<BitVector> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(BitVector::from_string(r));
    return out;
}

std::vector<std::string> to_strings(const std::vector<BitVector>& rows) {
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.to_string());
    return out;
}

IOTable make_table(const Netlist& n, const std::vector<std::pair<std::string, std::string>>& rows) {
    IOTable t{n.inputs(), n.outputs(), {}, 0, n.name()};
    for (const auto& [x, y] : rows) t.rows.push_back({BitVector::from_string(x), BitVector::from_string(y)});
    return t;
}

// The oracle table of a locked netlist carries only its functional inputs.
IOTable make_oracle(const LockedNetlist& l, const std::vector<std::pair<std::string, std::string>>& rows) {
    IOTable t{l.functional_inputs(), l.netlist.outputs(), {}, 0, l.netlist.name()};
    for (const auto& [x, y] : rows) t.rows.push_back({BitVector::from_string(x), BitVector::from_string(y)});
    return t;
}

std::vector<std::pair<std::string, std::string>> table_rows(const IOTable& t) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& r : t.rows) out.emplace_back(r.stimulus.to_string(), r.response.to_string());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Logic-locking workbench and recurrent-network attacks";

    static py::exception<Error> base_error(m, "LockbreakError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            base_error(("[" + e.module() + "] " + e.what()).c_str());
        }
    });

    py::class_<Netlist>(m, "Netlist")
        .def_property_readonly("name", &Netlist::name)
        .def_property_readonly("inputs", &Netlist::inputs)
        .def_property_readonly("outputs", &Netlist::outputs)
        .def_property_readonly("gate_count", [](const Netlist& n) { return n.gates().size(); })
        .def("to_bench", &serialize_bench)
        .def("__eq__", [](const Netlist& a, const Netlist& b) { return a == b; })
        .def("__repr__", [](const Netlist& n) {
            return "<Netlist " + n.name() + ": " + std::to_string(n.inputs().size()) + " in, " +
                   std::to_string(n.outputs().size()) + " out, " + std::to_string(n.gates().size()) + " gates>";
        });

    m.def("parse_bench", [](const std::string& text, const std::string& name) { return parse_bench(text, name); },
          py::arg("text"), py::arg("name") = "netlist");
    m.def("read_bench", [](const std::string& path) { return read_bench_file(path); }, py::arg("path"));
    m.def("random_netlist",
          [](std::size_t inputs, std::size_t outputs, std::size_t gates, std::size_t max_fanin, double xor_fraction,
             std::uint64_t seed, const std::string& name) {
              RandomNetlistOptions o;
              o.inputs = inputs;
              o.outputs = outputs;
              o.gates = gates;
              o.max_fanin = max_fanin;
              o.xor_fraction = xor_fraction;
              return random_netlist(o, seed, name);
          },
          py::arg("inputs"), py::arg("outputs"), py::arg("gates"), py::arg("max_fanin") = 3,
          py::arg("xor_fraction") = 0.1, py::arg("seed") = 1, py::arg("name") = "random");
    m.def("identity_netlist", &identity_netlist, py::arg("width"));
    m.def("inverter_bank", &inverter_bank, py::arg("width"));

    m.def("lock_random",
          [](const Netlist& n, std::size_t width, std::uint64_t seed) {
              auto r = lock_random(n, width, seed);
              return py::make_tuple(r.locked.netlist, r.key.to_string());
          },
          py::arg("netlist"), py::arg("key_width"), py::arg("seed"),
          "Returns (locked netlist, correct key as a bit string).");
    m.def("apply_key", [](const Netlist& locked, const std::string& key) {
        return apply_key(as_locked(locked), Key::from_string(key));
    });
    m.def("equivalent",
          [](const Netlist& a, const Netlist& b, std::size_t budget, std::uint64_t seed) {
              return equiv_check(a, b, budget, seed).equal();
          },
          py::arg("a"), py::arg("b"), py::arg("budget") = 1 << 14, py::arg("seed") = 1);

    m.def("simulate", [](const Netlist& n, const std::vector<std::string>& stimuli) {
        return to_strings(evaluate_batch(n, to_bits(stimuli)));
    });
    m.def("gen_io_table",
          [](const Netlist& n, std::size_t count, std::uint64_t seed) { return table_rows(gen_io_table(n, count, seed)); },
          py::arg("netlist"), py::arg("count"), py::arg("seed"), "List of (stimulus, response) bit strings.");
    m.def("brute_force", [](const Netlist& locked, const std::vector<std::pair<std::string, std::string>>& rows) {
        const auto l = as_locked(locked);
        std::vector<std::pair<std::string, double>> out;
        for (const auto& s : brute_force_keys(l, make_oracle(l, rows))) out.emplace_back(s.key.to_string(), s.match_rate);
        return out;
    });
    m.def("score_key",
          [](const Netlist& locked, const std::string& key, const std::vector<std::pair<std::string, std::string>>& rows) {
              const auto l = as_locked(locked);
              return score_key(l, Key::from_string(key), make_oracle(l, rows));
          });

    m.def("default_key_attack_config", [] { return config_json(KeyAttackConfig{}).dump(); });
    m.def("default_io_attack_config", [] { return config_json(IoAttackConfig{}).dump(); });
    m.def("attack_key", [](const Netlist& locked, const std::vector<std::pair<std::string, std::string>>& rows,
                           const std::string& config) {
        const auto l = as_locked(locked);
        const auto cfg = key_attack_config_from_json(json::parse(config));
        py::gil_scoped_release nogil;
        return report_json(attack_key(ThreatModel(l, make_oracle(l, rows)), cfg)).dump();
    });
    m.def("attack_output", [](const Netlist& n, const std::vector<std::pair<std::string, std::string>>& rows,
                              const std::string& config) {
        const auto cfg = io_attack_config_from_json(json::parse(config));
        py::gil_scoped_release nogil;
        return report_json(attack_output(ThreatModel(as_locked(n), make_oracle(as_locked(n), rows)), cfg)).dump();
    });
    m.def("attack_input", [](const Netlist& n, const std::vector<std::pair<std::string, std::string>>& rows,
                             const std::string& config) {
        const auto cfg = io_attack_config_from_json(json::parse(config));
        py::gil_scoped_release nogil;
        return report_json(attack_input(ThreatModel(as_locked(n), make_oracle(as_locked(n), rows)), cfg)).dump();
    });
    m.def("sweep", [](const Netlist& locked, const std::string& key, const std::string& axis,
                      const std::vector<double>& grid, std::size_t repetitions, std::uint64_t seed_base,
                      const std::vector<std::size_t>& layers, const std::string& attack_config,
                      std::size_t oracle_rows, std::size_t eval_rows, std::size_t workers) {
        SweepSpec spec;
        spec.axis = sweep_axis_from_string(axis);
        spec.grid = grid;
        spec.repetitions = repetitions;
        spec.seed_base = seed_base;
        spec.layers = layers;
        SweepBase base;
        base.attack = key_attack_config_from_json(json::parse(attack_config));
        base.oracle_rows = oracle_rows;
        base.eval_rows = eval_rows;
        base.workers = workers;
        const auto l = as_locked(locked);
        py::gil_scoped_release nogil;
        return sweep_json(run_sweep(l, Key::from_string(key), spec, base), base).dump();
    });
    m.def("train_table",
          [](const Netlist& n, const std::vector<std::pair<std::string, std::string>>& rows,
             const std::vector<std::size_t>& hidden, std::size_t epochs, double learning_rate, double momentum,
             std::uint64_t seed) {
              TrainConfig c;
              c.epochs = epochs;
              c.patience = epochs;
              c.learning_rate = learning_rate;
              c.momentum = momentum;
              c.seed = seed;
              const IOTable t = make_table(n, rows);
              py::gil_scoped_release nogil;
              const auto r = train(LstmNetwork(NetworkShape{n.inputs().size(), 8, hidden, n.outputs().size()}, seed),
                                   t, c);
              std::vector<std::pair<double, double>> hist;
              for (const auto& e : r.history) hist.emplace_back(e.train_mse, e.dev_mse);
              return hist;
          },
          py::arg("netlist"), py::arg("rows"), py::arg("hidden") = std::vector<std::size_t>{128},
          py::arg("epochs") = 200, py::arg("learning_rate") = kDefaultLearningRate,
          py::arg("momentum") = kDefaultMomentum, py::arg("seed") = 1,
          "Per-epoch (train MSE, dev MSE), epoch 0 first.");
}
