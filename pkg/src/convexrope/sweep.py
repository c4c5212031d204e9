"""Tolerance sweeps: length and runtime as epsilon shrinks."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from typing import List, Sequence

from .domain import RopeDomain
from .solver import CONVERGED, SolverConfig, solve


def epsilon_decades(text: str) -> List[float]:
    """``"1e0:1e-9"`` -> [1, 0.1, ..., 1e-9] (one value per decade, largest first)."""
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise ValueError(f"sweep must look like 1e0:1e-9, got {text!r}") from None
    if a <= 0 or b <= 0:
        raise ValueError("sweep bounds must be positive")
    hi, lo = max(a, b), min(a, b)
    k0 = round(math.log10(hi))
    k1 = round(math.log10(lo))
    return [10.0 ** k for k in range(k0, k1 - 1, -1)]


def prefix_sweep(d: RopeDomain, n_cuts: int, eps: Sequence[float], max_iterations: int = 10000) -> List[dict]:
    """One run at the smallest tolerance, read off at every threshold.

    The iterates do not depend on epsilon, so the run stopped at tolerance e
    is exactly the prefix up to the first sweep whose shift drops below e;
    its runtime is the elapsed time at that sweep.
    """
    eps = sorted(eps, reverse=True)
    # warm-up run, excluded from timing
    solve(d, SolverConfig(n_cuts=n_cuts, epsilon=eps[0], max_iterations=max_iterations, record_history=False))
    res = solve(d, SolverConfig(n_cuts=n_cuts, epsilon=eps[-1], max_iterations=max_iterations))
    hist = res.history
    rows = []
    for e in eps:
        hit = next((k for k, r in enumerate(hist) if r.max_shift < e), None)
        if hit is None:
            rows.append({"epsilon": e, "iterations": len(hist), "runtime": res.wall_time,
                         "length": res.length, "status": res.status})
            continue
        length = hist[hit + 1].length if hit + 1 < len(hist) else res.length
        rows.append({"epsilon": e, "iterations": hit + 1, "runtime": hist[hit].elapsed,
                     "length": length, "status": CONVERGED})
    return rows


def _one(args):
    d, n_cuts, e, max_iterations = args
    t0 = time.perf_counter()
    res = solve(d, SolverConfig(n_cuts=n_cuts, epsilon=e, max_iterations=max_iterations, record_history=False))
    return {"epsilon": e, "iterations": res.iterations, "runtime": time.perf_counter() - t0,
            "length": res.length, "status": res.status}


def independent_sweep(d: RopeDomain, n_cuts: int, eps: Sequence[float], max_iterations: int = 10000,
                      parallel: bool = False) -> List[dict]:
    """A fresh solve per tolerance. Parallel mode gives up timing fidelity."""
    eps = sorted(eps, reverse=True)
    jobs = [(d, n_cuts, e, max_iterations) for e in eps]
    if parallel:
        with ProcessPoolExecutor() as ex:
            return list(ex.map(_one, jobs))
    _one(jobs[0])  # warm-up
    return [_one(j) for j in jobs]
