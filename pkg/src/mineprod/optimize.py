"""Derivative-free minimizer used by the model-fitting routines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError


@dataclass(frozen=True)
class OptimizeResult:
    x: np.ndarray
    fval: float
    n_eval: int
    converged: bool


def nelder_mead(
    func: Callable[[np.ndarray], float],
    x0: Sequence[float],
    step: float = 0.25,
    tol: float = 1e-8,
    budget: int = 2000,
) -> OptimizeResult:
    """Minimize func by the Nelder-Mead simplex method.

    Converges when the relative spread of the simplex, both in function
    value and in vertex coordinates, falls below tol. Raises nothing on a
    stalled simplex; the caller inspects `converged` (fit routines raise
    ConvergenceError when the budget runs out first).
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    if n == 0:
        return OptimizeResult(x0, float(func(x0)), 1, True)

    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5
    n_eval = 0

    def call(x: np.ndarray) -> float:
        nonlocal n_eval
        n_eval += 1
        val = float(func(x))
        return val if np.isfinite(val) else np.inf

    verts = [x0.copy()]
    for i in range(n):
        v = x0.copy()
        v[i] += step if step != 0.0 else 0.25
        verts.append(v)
    fvals = np.array([call(v) for v in verts])
    if not np.isfinite(fvals[0]):
        raise ValueError("objective is not finite at the starting point")

    while n_eval < budget:
        order = np.argsort(fvals, kind="stable")
        verts = [verts[i] for i in order]
        fvals = fvals[order]
        fbest, fworst = fvals[0], fvals[-1]

        # relative simplex spread: vertex scatter and value scatter together
        fspread = (fworst - fbest) / (abs(fbest) + tol)
        xscale = 1.0 + float(np.max(np.abs(verts[0])))
        xspread = max(float(np.max(np.abs(v - verts[0]))) for v in verts[1:])
        if fspread <= tol and xspread <= tol * xscale:
            return OptimizeResult(verts[0], fbest, n_eval, True)

        centroid = np.mean(verts[:-1], axis=0)
        xr = centroid + alpha * (centroid - verts[-1])
        fr = call(xr)
        if fvals[0] <= fr < fvals[-2]:
            verts[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = call(xe)
            if fe < fr:
                verts[-1], fvals[-1] = xe, fe
            else:
                verts[-1], fvals[-1] = xr, fr
            continue
        # contraction: outside when reflection beat the worst, else inside
        if fr < fvals[-1]:
            xc = centroid + rho * (xr - centroid)
            fc = call(xc)
            if fc <= fr:
                verts[-1], fvals[-1] = xc, fc
                continue
        else:
            xc = centroid - rho * (centroid - verts[-1])
            fc = call(xc)
            if fc < fvals[-1]:
                verts[-1], fvals[-1] = xc, fc
                continue
        # shrink toward the best vertex
        for i in range(1, n + 1):
            verts[i] = verts[0] + sigma * (verts[i] - verts[0])
            fvals[i] = call(verts[i])

    order = np.argsort(fvals, kind="stable")
    return OptimizeResult(verts[order[0]], float(fvals[order[0]]), n_eval, False)


def minimize_or_raise(func, x0, step=0.25, tol=1e-8, budget=2000) -> OptimizeResult:
    """nelder_mead wrapper that raises ConvergenceError on budget exhaustion."""
    res = nelder_mead(func, x0, step=step, tol=tol, budget=budget)
    if not res.converged:
        raise ConvergenceError(
            f"optimizer spent {res.n_eval} evaluations without converging"
        )
    return res
