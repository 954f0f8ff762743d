"""Canned experiments exposed by ``unipade demo``."""

from __future__ import annotations

import numpy as np

from .algebra import FormalPowerSeries, Polynomial, partial_sum
from .builder import BuildTask, Schedule, build
from .errors import NotInDpq, PoleOnSet
from .pade import pade_solve
from .sets import disk, sample, sup_norm

BOUNDED_Q_CENTER = 5.0
BOUNDED_Q_RADIUS = 2.0


def bounded_q(n_max: int = 30, h: float = 0.05) -> dict:
    """Error floor of ``[0/n]``-type approximants to ``z - 5`` on
    ``|z - 5| <= 2``.

    Two families are searched for n = 1..n_max: the Pade approximants
    ``[0/n]`` of ``z - 5`` itself, and least-squares fits ``1/B`` with
    ``deg B <= n`` (minimizing ``|B(z)(z - 5) - 1|`` on the grid). The
    report gives each sup error and the smallest one found.
    """
    K = sample(disk(BOUNDED_Q_CENTER, BOUNDED_Q_RADIUS), h=h, flags={"complement_connected": True})
    target = Polynomial([-BOUNDED_Q_CENTER, 1.0])
    f = FormalPowerSeries(target.padded(n_max + 1))
    pade_err, ls_err = [], []
    z = K.eval_grid
    w = (z - BOUNDED_Q_CENTER) / BOUNDED_Q_RADIUS
    for n in range(1, n_max + 1):
        try:
            approx = pade_solve(f, (0, n))
            pade_err.append(sup_norm(lambda x: approx(x) - target(x), K, "validation"))
        except (NotInDpq, PoleOnSet):
            pade_err.append(None)
        cols = w[:, None] ** np.arange(n + 1)[None, :] * target(z)[:, None]
        coef, *_ = np.linalg.lstsq(cols, np.ones_like(z), rcond=None)

        def fit(x, coef=coef):
            wx = (x - BOUNDED_Q_CENTER) / BOUNDED_Q_RADIUS
            return 1.0 / np.polynomial.polynomial.polyval(wx, coef)

        try:
            ls_err.append(sup_norm(lambda x: fit(x) - target(x), K, "validation"))
        except PoleOnSet:
            ls_err.append(None)
    seen = [e for e in pade_err + ls_err if e is not None]
    return {
        "demo": "bounded-q",
        "set": K.to_json(),
        "target": "z - 5",
        "n_max": n_max,
        "pade_errors": pade_err,
        "least_squares_errors": ls_err,
        "floor": min(seen) if seen else None,
    }


def seleznev() -> dict:
    """Row-0 build on two nested disks: every approximant is a partial sum."""
    tasks = [
        BuildTask(sample(disk(4.0, 0.1), h=0.005, flags={"complement_connected": True}), Polynomial([-1.0, 1.0]), 1e-2),
        BuildTask(sample(disk(0.5j, 0.01), h=0.0005, flags={"complement_connected": True}), Polynomial([2.0]), 1e-2),
    ]
    transcript = build(tasks, Schedule.row(0))
    final = transcript.final_prefix
    rows = []
    for step in transcript.steps:
        p, q = step.order
        num = step.result.rational.numerator
        s_p = partial_sum(final, p).padded(p + 1)
        rows.append(
            {
                "task": step.task,
                "p": p,
                "q": q,
                "partial_sum_equal": bool(q == 0 and np.array_equal(num.padded(p + 1), s_p)),
                "sup_error": step.sup_error,
            }
        )
    return {"demo": "seleznev", "steps": rows, "transcript": transcript.to_json()}


DEMOS = {"bounded-q": bounded_q, "seleznev": seleznev}
