"""CSV and JSON emission.

Floats are written with repr(), the shortest decimal string that
round-trips to the same bit pattern, so parsing an emitted file
recovers every value exactly.  All text output uses LF line endings.
"""

from __future__ import annotations

import json
from typing import Optional, TextIO

import numpy as np

from .integrate import EnsembleResult, StrongOrderResult, Trajectory

__all__ = [
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_ensemble_csv",
    "ensemble_stats_dict",
    "write_ensemble_json",
    "convergence_dict",
    "write_convergence_json",
]


def _fmt(v: float) -> str:
    return repr(float(v))


def write_trajectory_csv(traj: Trajectory, fh: TextIO) -> None:
    n = traj.states.shape[1] // 2
    cols = (["t"] + [f"x_{i + 1}" for i in range(n)]
            + [f"v_{i + 1}" for i in range(n)] + ["escaped"])
    fh.write(",".join(cols) + "\n")
    flag = "1" if traj.escaped else "0"
    for t, row in zip(traj.times, traj.states):
        fh.write(",".join([_fmt(t)] + [_fmt(v) for v in row] + [flag]) + "\n")


def read_trajectory_csv(fh: TextIO) -> tuple[np.ndarray, np.ndarray, bool]:
    """Times, states and the escape flag, bit-exact for files we wrote."""
    header = fh.readline().strip().split(",")
    if header[0] != "t" or header[-1] != "escaped":
        raise ValueError("not a trajectory CSV")
    times = []
    states = []
    escaped = False
    for line in fh:
        parts = line.strip().split(",")
        times.append(float(parts[0]))
        states.append([float(v) for v in parts[1:-1]])
        escaped = parts[-1] == "1"
    return np.array(times), np.array(states), escaped


def write_ensemble_csv(res: EnsembleResult, fh: TextIO) -> None:
    fh.write("t,mean_abs_z,var_abs_z,n_alive\n")
    for t, m, v, a in zip(res.times, res.mean_abs_z, res.var_abs_z, res.n_alive):
        fh.write(f"{_fmt(t)},{_fmt(m)},{_fmt(v)},{int(a)}\n")


def ensemble_stats_dict(res: EnsembleResult, model: str,
                        representation: str = "direct") -> dict:
    escape_times = [float(t) for t in res.escape_times]
    return {
        "model": model,
        "representation": representation,
        "seed": int(res.seed),
        "n_paths": int(res.n_paths),
        "escape_count": res.escape_count,
        "escape_times": escape_times,
    }


def write_ensemble_json(res: EnsembleResult, model: str, fh: TextIO,
                        representation: str = "direct") -> None:
    json.dump(ensemble_stats_dict(res, model, representation), fh,
              indent=2, sort_keys=True)
    fh.write("\n")


def convergence_dict(res: StrongOrderResult, model: Optional[str] = None) -> dict:
    out = {
        "order_estimate": res.order,
        "errors_per_level": [float(e) for e in res.errors],
        "dts": [float(d) for d in res.dts],
        "n_paths": int(res.n_paths),
        "n_escaped": int(res.n_escaped),
        "reliable": bool(res.reliable),
    }
    if model is not None:
        out["model"] = model
    return out


def write_convergence_json(res: StrongOrderResult, fh: TextIO,
                           model: Optional[str] = None) -> None:
    json.dump(convergence_dict(res, model), fh, indent=2, sort_keys=True)
    fh.write("\n")
