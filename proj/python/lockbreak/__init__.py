"""Logic-locking workbench: netlists, XOR/XNOR locking, simulation and
recurrent-network attacks (key reconstruction, output and input guessing).

Configs are plain dicts; pass only the fields you want to change, nested
sections are merged over the defaults.
"""

import json

from ._core import (
    LockbreakError,
    Netlist,
    apply_key,
    brute_force,
    equivalent,
    gen_io_table,
    identity_netlist,
    inverter_bank,
    lock_random,
    parse_bench,
    random_netlist,
    read_bench,
    score_key,
    simulate,
    train_table,
)
from . import _core

__all__ = [
    "LockbreakError", "Netlist", "apply_key", "attack_input", "attack_key", "attack_output", "brute_force",
    "default_io_attack_config", "default_key_attack_config", "equivalent", "gen_io_table", "identity_netlist",
    "inverter_bank", "lock_random", "parse_bench", "random_netlist", "read_bench", "score_key", "simulate",
    "sweep", "train_table",
]


def _merge(base, overrides):
    out = dict(base)
    for k, v in (overrides or {}).items():
        if k not in out:
            raise KeyError(f"unknown config field '{k}'")
        out[k] = _merge(out[k], v) if isinstance(v, dict) and isinstance(out[k], dict) else v
    return out


def default_key_attack_config():
    return json.loads(_core.default_key_attack_config())


def default_io_attack_config():
    return json.loads(_core.default_io_attack_config())


def attack_key(locked, oracle_rows, config=None):
    """Recover a key for `locked` from (stimulus, response) oracle rows. Returns the report dict."""
    cfg = _merge(default_key_attack_config(), config)
    return json.loads(_core.attack_key(locked, oracle_rows, json.dumps(cfg)))


def attack_output(netlist, oracle_rows, config=None):
    cfg = _merge(default_io_attack_config(), config)
    return json.loads(_core.attack_output(netlist, oracle_rows, json.dumps(cfg)))


def attack_input(netlist, oracle_rows, config=None):
    cfg = _merge(default_io_attack_config(), config)
    return json.loads(_core.attack_input(netlist, oracle_rows, json.dumps(cfg)))


def sweep(locked, key, axis, grid, repetitions=5, seed_base=1, layers=(1,), attack_config=None,
          oracle_rows=512, eval_rows=4096, workers=1):
    cfg = _merge(default_key_attack_config(), attack_config)
    return json.loads(_core.sweep(locked, key, axis, list(grid), repetitions, seed_base, list(layers),
                                  json.dumps(cfg), oracle_rows, eval_rows, workers))
