"""End-to-end checks of the command-line tool.

usage: cli_test.py <lockbreak binary> <fixtures dir>

Responses are recomputed with a small bench evaluator written here, so the
checks do not go through the library's simulator.
"""

import json
import os
import subprocess
import sys
import tempfile

BIN, FIX = sys.argv[1], sys.argv[2]
failures = []


def run(*args, expect=0):
    p = subprocess.run([BIN, *args], capture_output=True, text=True)
    if p.returncode != expect:
        failures.append(f"{' '.join(args)}: exit {p.returncode}, wanted {expect}\n{p.stdout}{p.stderr}")
    return p


def check(cond, what):
    if not cond:
        failures.append(what)


def parse_bench(path):
    ins, outs, gates = [], [], {}
    for raw in open(path):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        if line.startswith("INPUT("):
            ins.append(line[6:-1].strip())
        elif line.startswith("OUTPUT("):
            outs.append(line[7:-1].strip())
        else:
            lhs, rhs = line.split("=")
            op, args = rhs.strip().split("(", 1)
            gates[lhs.strip()] = (op.strip().upper(), [a.strip() for a in args.rstrip(")").split(",")])
    return ins, outs, gates


def evaluate(bench, bits):
    ins, outs, gates = bench
    val = {n: b == "1" for n, b in zip(ins, bits)}

    def get(s):
        if s not in val:
            op, args = gates[s]
            v = [get(a) for a in args]
            val[s] = {
                "AND": lambda: all(v), "NAND": lambda: not all(v),
                "OR": lambda: any(v), "NOR": lambda: not any(v),
                "XOR": lambda: sum(v) % 2 == 1, "XNOR": lambda: sum(v) % 2 == 0,
                "NOT": lambda: not v[0], "BUF": lambda: v[0], "BUFF": lambda: v[0],
            }[op]()
        return val[s]

    return "".join("1" if get(o) else "0" for o in outs)


def read_key(path):
    return "".join(c for c in open(path).read() if c in "01")


def table_rows(path):
    lines = open(path).read().split()
    assert lines[0] == "inputs,outputs"
    return [tuple(l.split(",")) for l in lines[1:]]


with tempfile.TemporaryDirectory() as d:
    p = lambda name: os.path.join(d, name)
    c17 = os.path.join(FIX, "c17.bench")

    # lock: the emitted netlist with the emitted key equals c17 on all 32 inputs.
    r = run("lock", "--in", c17, "--key-width", "4", "--seed", "7", "--out", p("c17_k4.bench"),
            "--key-out", p("c17_k4.key"))
    check(len(r.stdout.strip().splitlines()) == 1, "lock prints one summary line")
    orig, locked = parse_bench(c17), parse_bench(p("c17_k4.bench"))
    key = read_key(p("c17_k4.key"))
    check(len(key) == 4, "4-bit key file")
    check(locked[0][5:] == [f"keyinput{i}" for i in range(4)], "key inputs declared last")
    for v in range(32):
        x = format(v, "05b")
        check(evaluate(orig, x) == evaluate(locked, x + key), f"locked c17 differs on {x}")
    flips = 0
    for i in range(4):
        wrong = key[:i] + ("1" if key[i] == "0" else "0") + key[i + 1:]
        flips += any(evaluate(orig, format(v, "05b")) != evaluate(locked, format(v, "05b") + wrong)
                     for v in range(32))
    check(flips == 4, "every key-bit flip corrupts c17")

    # gendata is deterministic and its responses are correct.
    for name in ("a.csv", "b.csv"):
        run("gendata", "--netlist", p("c17_k4.bench"), "--key", p("c17_k4.key"), "--count", "1000",
            "--seed", "1", "--out", p(name))
    check(open(p("a.csv"), "rb").read() == open(p("b.csv"), "rb").read(), "gendata CSVs byte-identical")
    check(open(p("a.csv.meta.json"), "rb").read() == open(p("b.csv.meta.json"), "rb").read(),
          "gendata metadata byte-identical")
    rows = table_rows(p("a.csv"))
    check(len(rows) == 1000, "1000 rows")
    check(all(evaluate(orig, x) == y for x, y in rows), "gendata responses match c17")
    run("gendata", "--netlist", p("c17_k4.bench"), "--count", "10", "--out", p("c.csv"), expect=9)

    # simulate
    r = run("simulate", "--netlist", c17, "--vector", "10101", "--vector", "00000")
    check(r.stdout.split() == ["inputs,outputs", "10101," + evaluate(orig, "10101"),
                               "00000," + evaluate(orig, "00000")], "simulate output")
    run("simulate", "--netlist", c17, "--vector", "101", expect=6)

    # bruteforce lists the correct key with rate 1.
    run("bruteforce", "--locked", p("c17_k4.bench"), "--oracle", p("a.csv"), "--out", p("bf.csv"))
    bf = dict(l.split(",") for l in open(p("bf.csv")).read().split()[1:])
    check(len(bf) == 16 and float(bf[key]) == 1.0, "bruteforce scores the correct key 1.0")

    # attack-key on the 8-bit fixture: the reported rate is recomputed here.
    rand = os.path.join(FIX, "rand200.bench")
    rand_k8 = os.path.join(FIX, "rand200_k8.bench")
    run("gendata", "--netlist", rand, "--count", "512", "--seed", "3", "--out", p("oracle.csv"))
    run("attack-key", "--locked", rand_k8, "--oracle", p("oracle.csv"), "--surrogate-rows", "4096",
        "--surrogate-epochs", "5", "--restarts", "3", "--key-epochs", "40", "--report", p("key.json"),
        "--key-out", p("found.key"))
    rep = json.load(open(p("key.json")))
    oracle = table_rows(p("oracle.csv"))
    lk = parse_bench(rand_k8)
    found = rep["key"]
    check(read_key(p("found.key")) == found, "key file matches report")
    hold = rep["holdout_indices"]
    check(len(hold) == rep["holdout_rows"] == 128, "holdout size")
    hits = sum(evaluate(lk, oracle[i][0] + found) == oracle[i][1] for i in hold)
    check(rep["match_rate"] == hits / len(hold), f"match rate {rep['match_rate']} vs {hits}/{len(hold)}")
    check(0.0 <= rep["match_rate"] <= 1.0, "rate in [0, 1]")
    check("key_bit_match" not in rep, "no key comparison without --eval-key")
    check(rep["config"]["procedure"] == "surrogate-gradient-v1", "procedure recorded")
    check(all(a not in ("--report", "--key-out") for a in rep["run"]["args"]), "run echo drops outputs")
    r = run("rerun", p("key.json"))
    check("identical" in r.stdout, "attack-key rerun reproduces the report")

    # attack-output: one pin pair per output; rerun reproduces.
    run("attack-output", "--netlist", c17, "--oracle", p("a.csv"), "--hidden", "16", "--epochs", "20",
        "--report", p("out.json"), "--pins-csv", p("pins.csv"))
    pins = open(p("pins.csv")).read().split()
    check(pins[0] == "pin_index,real_avg,predicted_avg" and len(pins) == 3, "pins CSV has one line per pin")
    r = run("rerun", p("out.json"))
    check("identical" in r.stdout, "attack-output rerun reproduces the report")
    tampered = json.load(open(p("out.json")))
    tampered["mean_bit_accuracy"] = -1
    json.dump(tampered, open(p("tampered.json"), "w"))
    run("rerun", p("tampered.json"), expect=10)

    # train writes a model and history; warm start continues from it.
    run("train", "--table", p("a.csv"), "--hidden", "8", "--epochs", "3", "--model-out", p("m.bin"),
        "--history-out", p("h.csv"), "--report", p("train.json"))
    check(open(p("h.csv")).readline().strip() == "epoch,train_mse,dev_mse,eta", "history CSV header")
    run("train", "--table", p("a.csv"), "--warm-start", p("m.bin"), "--epochs", "1", "--report", p("t2.json"))
    check(json.load(open(p("t2.json")))["warm_start"] is True, "warm start recorded")

    # sweep: an empty grid is a validation error; a bad axis too.
    r = run("sweep", "--locked", p("c17_k4.bench"), "--key", p("c17_k4.key"), "--axis", "momentum",
            "--grid", "", expect=9)
    check("grid is empty" in r.stderr, "empty grid message")
    run("sweep", "--locked", p("c17_k4.bench"), "--key", p("c17_k4.key"), "--axis", "width", "--grid", "1",
        expect=9)
    run("sweep", "--locked", p("c17_k4.bench"), "--key", p("c17_k4.key"), "--axis", "momentum",
        "--grid", "0,0.5,0.9", "--repetitions", "1", "--oracle-rows", "64", "--surrogate-rows", "256",
        "--surrogate-epochs", "2", "--hidden", "8", "--summary-out", p("sum.csv"), "--out", p("cells.csv"))
    summary = open(p("sum.csv")).read().split()
    check(summary[0] == "axis,axis_value,layers,completed,mean_metric" and len(summary) == 4,
          "momentum sweep gives three points")

    # errors carry a category; usage errors exit 2.
    open(p("bad.bench"), "w").write("INPUT(a)\nOUTPUT(y)\ny = FOO(a)\n")
    r = run("simulate", "--netlist", p("bad.bench"), "--vector", "1", expect=4)
    check(r.stderr.startswith("error [netlist]"), "netlist errors are labelled")
    run("lock", "--in", p("missing.bench"), "--out", p("x"), "--key-out", p("y"), expect=2)
    run("frobnicate", expect=2)

    # fixture regenerates the committed random netlist.
    run("fixture", "random", "--seed", "2", "--inputs", "16", "--outputs", "8", "--gates", "200",
        "--max-fanin", "2", "--xor-fraction", "0.3", "--name", "rand200", "--out", p("r.bench"))
    check(open(p("r.bench")).read() == open(rand).read(), "fixture random reproduces rand200.bench")

    # Atomic writes leave no temporary files behind.
    check(not [f for f in os.listdir(d) if ".tmp" in f], "no temporary files left")

for f in failures:
    print("FAIL:", f)
print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
