"""Shared helpers: worker counts, seeded RNG streams, small optimizers."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np


def worker_count() -> int:
    cap = os.environ.get("MAGIC_LAB_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def root_seed(rng: int | np.random.Generator | None) -> int:
    """Collapse a seed or generator to an integer root seed."""
    if rng is None:
        return 0
    if isinstance(rng, (int, np.integer)):
        return int(rng)
    return int(rng.integers(0, 2**63 - 1))


def stream(seed: int, *index: int) -> np.random.Generator:
    """Independent generator for ``(seed, *index)``; stable under reordering."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *index])))


def parallel_map(fn: Callable, items) -> list:
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class DescentResult:
    params: np.ndarray
    value: float
    iterations: int
    converged: bool


def normalize_params(theta: np.ndarray) -> np.ndarray:
    return theta / np.linalg.norm(theta)


def params_to_state(theta: np.ndarray) -> np.ndarray:
    """Real parameters ``(re..., im...)`` to a normalized amplitude vector."""
    half = theta.shape[-1] // 2
    psi = theta[..., :half] + 1j * theta[..., half:]
    return psi / np.linalg.norm(psi, axis=-1, keepdims=True)


def momentum_descent(
    batch_objective: Callable[[np.ndarray], np.ndarray],
    theta0: np.ndarray,
    *,
    max_iters: int = 2000,
    step_size: float = 0.05,
    momentum: float = 0.9,
    fd_step: float = 1e-5,
    min_step: float = 1e-9,
) -> DescentResult:
    """Minimize a function on the unit sphere of real parameters.

    ``batch_objective`` maps an array ``(B, P)`` of parameter vectors to B
    values; the central-difference gradient is evaluated in one batch.
    Parameters are renormalized after every step; the step size halves (and
    the velocity resets) whenever a step fails to decrease the objective.
    """
    theta = normalize_params(np.asarray(theta0, dtype=float))
    p = theta.size
    eye = np.eye(p) * fd_step
    f = float(batch_objective(theta[None, :])[0])
    v = np.zeros(p)
    eta = step_size
    it = 0
    converged = False
    while it < max_iters:
        it += 1
        probes = np.concatenate([theta + eye, theta - eye])
        vals = batch_objective(probes)
        grad = (vals[:p] - vals[p:]) / (2 * fd_step)
        grad -= (grad @ theta) * theta
        v = momentum * v - eta * grad
        trial = normalize_params(theta + v)
        ft = float(batch_objective(trial[None, :])[0])
        if ft < f:
            theta, f = trial, ft
        else:
            v[:] = 0.0
            eta *= 0.5
            if eta < min_step:
                converged = True
                break
    return DescentResult(theta, f, it, converged)
