"""Dense two-phase simplex solver.

Problems are small (a few hundred variables at most), so the tableau is kept
dense in a numpy array and pivots are plain rank-one updates. Bland's rule is
used for both entering and leaving variables, which guarantees termination on
degenerate problems at the price of some extra pivots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = ["LPProblem", "LPResult", "SolverError", "solve"]

_RELATIONS = {"<=": -1, "==": 0, "=": 0, ">=": 1}


class SolverError(RuntimeError):
    """Raised when the simplex iterations fail to produce a verified answer."""


@dataclass
class LPProblem:
    """``min`` (or ``max``) of ``objective @ x`` subject to linear rows and bounds.

    ``constraints`` is a sequence of ``(coefficients, relation, bound)`` with the
    relation one of ``"<="``, ``"=="`` or ``">="``. ``bounds`` gives a
    ``(lower, upper)`` pair per variable, ``None`` meaning unbounded on that
    side; the default is ``x >= 0`` for every variable.
    """

    objective: np.ndarray
    constraints: Sequence[tuple[Sequence[float], str, float]] = ()
    bounds: Sequence[tuple[float | None, float | None]] | None = None
    maximize: bool = False

    def __post_init__(self) -> None:
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        n = self.objective.size
        rows, senses, rhs = [], [], []
        for coeffs, rel, bound in self.constraints:
            coeffs = np.asarray(coeffs, dtype=float).ravel()
            if coeffs.size != n:
                raise ValueError(
                    f"constraint has {coeffs.size} coefficients, objective has {n}"
                )
            if rel not in _RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
            rows.append(coeffs)
            senses.append(_RELATIONS[rel])
            rhs.append(float(bound))
        self.A = np.array(rows, dtype=float).reshape(len(rows), n)
        self.senses = np.array(senses, dtype=int)
        self.rhs = np.array(rhs, dtype=float)
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        elif len(self.bounds) != n:
            raise ValueError(f"{len(self.bounds)} bounds for {n} variables")

    @classmethod
    def from_arrays(
        cls,
        objective,
        A_ub=None,
        b_ub=None,
        A_eq=None,
        b_eq=None,
        A_lb=None,
        b_lb=None,
        bounds=None,
        maximize: bool = False,
    ) -> "LPProblem":
        """Build a problem from ``A_ub x <= b_ub``, ``A_eq x == b_eq``, ``A_lb x >= b_lb``."""
        cons: list[tuple[np.ndarray, str, float]] = []
        for mat, vec, rel in ((A_ub, b_ub, "<="), (A_eq, b_eq, "=="), (A_lb, b_lb, ">=")):
            if mat is None:
                continue
            mat = np.atleast_2d(np.asarray(mat, dtype=float))
            vec = np.asarray(vec, dtype=float).ravel()
            cons.extend((row, rel, b) for row, b in zip(mat, vec))
        if bounds is not None and isinstance(bounds, tuple) and len(bounds) == 2 and not isinstance(bounds[0], tuple):
            bounds = [bounds] * np.asarray(objective).size
        return cls(objective, cons, bounds, maximize)

    @property
    def n_vars(self) -> int:
        return self.objective.size

    def residual(self, x: np.ndarray) -> float:
        """Largest violation of any row or bound at ``x`` (0 when feasible)."""
        worst = 0.0
        if self.A.shape[0]:
            lhs = self.A @ x
            gap = lhs - self.rhs
            worst = max(
                worst,
                float(np.max(np.where(self.senses < 0, gap, 0.0), initial=0.0)),
                float(np.max(np.where(self.senses > 0, -gap, 0.0), initial=0.0)),
                float(np.max(np.where(self.senses == 0, np.abs(gap), 0.0), initial=0.0)),
            )
        for xj, (lo, hi) in zip(x, self.bounds):
            if lo is not None:
                worst = max(worst, lo - xj)
            if hi is not None:
                worst = max(worst, xj - hi)
        return worst


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None = None
    value: float | None = None
    duals: np.ndarray | None = None
    farkas: np.ndarray | None = None
    residual: float | None = None
    iterations: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Standardized:
    """``min c.y  s.t.  A y == b, y >= 0`` with ``x = x0 + T y``."""

    def __init__(self, p: LPProblem):
        n = p.n_vars
        cols, offset = [], np.zeros(n)
        upper_rows: list[tuple[int, float]] = []
        simple = True
        for j, (lo, hi) in enumerate(p.bounds):
            lo = -np.inf if lo is None else float(lo)
            hi = np.inf if hi is None else float(hi)
            if lo > hi:
                raise ValueError(f"variable {j} has empty bounds [{lo}, {hi}]")
            e = np.zeros(n)
            e[j] = 1.0
            if np.isfinite(lo):
                offset[j] = lo
                cols.append(e)
                if lo != 0.0:
                    simple = False
                if np.isfinite(hi):
                    upper_rows.append((len(cols) - 1, hi - lo))
                    simple = False
            elif np.isfinite(hi):
                offset[j] = hi
                cols.append(-e)
                simple = False
            else:
                cols.append(e)
                cols.append(-e)
        T = np.array(cols).T.reshape(n, len(cols))
        ny = T.shape[1]

        A = p.A @ T
        b = p.rhs - p.A @ offset
        senses = p.senses.copy()
        if upper_rows:
            extra = np.zeros((len(upper_rows), ny))
            for r, (k, cap) in enumerate(upper_rows):
                extra[r, k] = 1.0
            A = np.vstack([A, extra])
            b = np.concatenate([b, [cap for _, cap in upper_rows]])
            senses = np.concatenate([senses, -np.ones(len(upper_rows), dtype=int)])

        m = A.shape[0]
        slack_rows = np.flatnonzero(senses != 0)
        S = np.zeros((m, slack_rows.size))
        for k, i in enumerate(slack_rows):
            S[i, k] = 1.0 if senses[i] < 0 else -1.0
        A_std = np.hstack([A, S])
        sign = np.where(b < 0, -1.0, 1.0)
        A_std *= sign[:, None]
        b_std = b * sign

        self.problem = p
        self.T, self.offset = T, offset
        self.ny = ny
        self.A, self.b, self.sign = A_std, b_std, sign
        self.n_orig_rows = p.A.shape[0]
        self.slack_rows = slack_rows
        c = p.objective @ T
        self.c = np.concatenate([c if not p.maximize else -c, np.zeros(slack_rows.size)])
        self.simple_bounds = simple

    def to_x(self, y: np.ndarray) -> np.ndarray:
        return self.offset + self.T @ y[: self.ny]


def _pivot(tab: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    col_vals = tab[:, col].copy()
    col_vals[row] = 0.0
    tab -= np.outer(col_vals, tab[row])


def _run(tab, basis, n_cols, tol, max_iter, start_iter):
    """Bland's-rule simplex on a tableau whose last row is the reduced-cost row."""
    m = tab.shape[0] - 1
    it = start_iter
    while True:
        if it >= max_iter:
            raise SolverError(f"simplex did not terminate within {max_iter} pivots")
        reduced = tab[m, :n_cols]
        candidates = np.flatnonzero(reduced < -tol)
        if candidates.size == 0:
            return "optimal", it
        col = int(candidates[0])
        column = tab[:m, col]
        positive = np.flatnonzero(column > tol)
        if positive.size == 0:
            return "unbounded", it
        ratios = tab[positive, -1] / column[positive]
        best = ratios.min()
        ties = positive[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(tab, row, col)
        basis[row] = col
        it += 1


def solve(p: LPProblem, tol: float = 1e-9, max_iter: int = 50_000) -> LPResult:
    """Solve ``p`` and return a verified :class:`LPResult`.

    Optimal points are re-derived from the final basis by a direct linear solve
    and checked against every row and bound; a residual above ``10 * tol``
    raises :class:`SolverError`.
    """
    std = _Standardized(p)
    A, b = std.A, std.b
    m, n = A.shape

    # initial basis: a +1 slack where the row has one, an artificial otherwise
    basis = [-1] * m
    for k, i in enumerate(std.slack_rows):
        col = std.ny + k
        if A[i, col] == 1.0:
            basis[i] = col
    art_rows = [i for i in range(m) if basis[i] < 0]
    n_art = len(art_rows)
    tab = np.zeros((m + 1, n + n_art + 1))
    tab[:m, :n] = A
    tab[:m, -1] = b
    for k, i in enumerate(art_rows):
        tab[i, n + k] = 1.0
        basis[i] = n + k

    iterations = 0
    farkas = None
    if n_art:
        tab[m, n : n + n_art] = 1.0
        for i in art_rows:
            tab[m] -= tab[i]
        _, iterations = _run(tab, basis, n + n_art, tol, max_iter, 0)
        infeas = -tab[m, -1]
        if infeas > tol * max(1.0, np.abs(b).max(initial=0.0)):
            w = _phase_one_duals(std, basis, n, n_art, art_rows)
            if std.simple_bounds and w is not None:
                farkas = (w * std.sign)[: std.n_orig_rows]
            return LPResult("infeasible", farkas=farkas, iterations=iterations,
                            extra={"phase_one_value": float(infeas)})
        # drive zero-level artificials out of the basis, dropping redundant rows
        keep_tab, drop_orig = list(range(m)), []
        for i in range(m):
            if basis[i] >= n:
                k = int(np.argmax(np.abs(tab[i, :n])))
                if abs(tab[i, k]) > tol:
                    _pivot(tab, i, k)
                    basis[i] = k
                else:
                    # this tableau row is a combination of the others; the
                    # original row tied to its artificial is the redundant one
                    keep_tab.remove(i)
                    drop_orig.append(art_rows[basis[i] - n])
        tab = np.vstack([tab[keep_tab], tab[m:]])
        basis = [basis[i] for i in keep_tab]
        keep_orig = [i for i in range(m) if i not in drop_orig]
        A, b = A[keep_orig], b[keep_orig]
        m = len(keep_orig)
        tab = np.hstack([tab[:, :n], tab[:, -1:]])

    # phase two
    tab[m] = 0.0
    tab[m, :n] = std.c
    for i, j in enumerate(basis):
        tab[m] -= std.c[j] * tab[i]
    status, iterations = _run(tab, basis, n, tol, max_iter, iterations)
    if status == "unbounded":
        return LPResult("unbounded", iterations=iterations)

    # refine: solve B y_B = b from the original data
    B = A[:, basis]
    y = np.zeros(n)
    try:
        y[basis] = np.linalg.solve(B, b) if m else []
        duals_std = np.linalg.solve(B.T, std.c[basis]) if m else np.zeros(0)
    except np.linalg.LinAlgError as exc:
        raise SolverError("singular final basis") from exc
    y = np.where(np.abs(y) < tol * 1e-3, 0.0, y)
    y = np.maximum(y, 0.0)
    x = std.to_x(y)
    residual = p.residual(x)
    scale = max(1.0, float(np.abs(p.rhs).max(initial=0.0)))
    if residual > 10 * tol * scale:
        raise SolverError(f"optimal point violates constraints by {residual:.3e}")
    value = float(p.objective @ x)

    duals = None
    if len(basis) == std.A.shape[0] and std.simple_bounds:
        duals = (duals_std * std.sign)[: std.n_orig_rows]
        if p.maximize:
            duals = -duals
    return LPResult("optimal", x=x, value=value, duals=duals, residual=residual,
                    iterations=iterations)


def _phase_one_duals(std, basis, n, n_art, art_rows):
    """Phase-one multipliers ``w`` with ``w @ A <= 0`` and ``w @ b > 0``."""
    m = std.A.shape[0]
    full = np.hstack([std.A, np.zeros((m, n_art))])
    for k, i in enumerate(art_rows):
        full[i, n + k] = 1.0
    cost = np.concatenate([np.zeros(n), np.ones(n_art)])
    B = full[:, basis]
    try:
        w = np.linalg.solve(B.T, cost[basis])
    except np.linalg.LinAlgError:
        return None
    # nonnegative reduced costs on the structural columns give w @ A <= 0
    return w
