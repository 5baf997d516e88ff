"""Rectangular min-cost assignment with a deterministic tie-break.

Shortest augmenting paths with row/column potentials (the Jonker-Volgenant
flavour of the Hungarian method), O(n^2 m) for an ``n x m`` matrix with
``n <= m``. The inner column scan is vectorized with numpy.

Among all optimal assignments the lexicographically smallest one (compare
the column of row 0, then row 1, ...) is returned. Optimal assignments are
exactly the row-perfect matchings on edges that are tight under the final
potentials and leave only zero-potential columns unmatched, so the
tie-break is a greedy search on that tight subgraph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Infeasible


@dataclass(frozen=True)
class Assignment:
    cols: tuple[int, ...]  # cols[i] is the column matched to row i
    cost: float

    def __iter__(self):
        # allows ``cols, cost = min_cost_assignment(M)``
        yield self.cols
        yield self.cost


def _hungarian(c: np.ndarray):
    n, m = c.shape
    INF = np.inf
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    p = np.zeros(m + 1, dtype=np.int64)  # p[j]: row (1-based) matched to column j
    way = np.zeros(m + 1, dtype=np.int64)
    cc = np.full((n + 1, m + 1), INF)
    cc[1:, 1:] = c
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(m + 1, INF)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used
            cur = cc[i0] - u[i0] - v
            better = free & (cur < minv)
            minv[better] = cur[better]
            way[better] = j0
            cand = np.where(free, minv, INF)
            cand[0] = INF
            j1 = int(np.argmin(cand))
            delta = cand[j1]
            if not np.isfinite(delta):
                raise Infeasible("no finite-cost assignment exists")
            uj = used.nonzero()[0]
            u[p[uj]] += delta
            v[uj] -= delta
            minv[free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    row_col = np.full(n, -1, dtype=np.int64)
    for j in range(1, m + 1):
        if p[j]:
            row_col[p[j] - 1] = j - 1
    return row_col, u[1:], v[1:]


def _lexicographic(c: np.ndarray, row_col: np.ndarray, u: np.ndarray, v: np.ndarray, tol: float):
    n, m = c.shape
    with np.errstate(invalid="ignore"):
        red = c - u[:, None] - v[None, :]
    tight = np.isfinite(red) & (red <= tol)
    zero_col = v >= -tol
    tight_cols = [np.nonzero(tight[i])[0] for i in range(n)]
    col_row = np.full(m, -1, dtype=np.int64)
    for i, j in enumerate(row_col):
        col_row[j] = i
    row_col = row_col.copy()

    def reroute(start_row: int, banned_col: int, freed_col: int, min_row: int) -> list | None:
        # BFS over rows >= min_row for an alternating path from start_row to a
        # column that may end up unmatched-then-matched without raising the cost
        prev = {start_row: None}
        queue = [start_row]
        for r in queue:
            for j in tight_cols[r]:
                if j == banned_col:
                    continue
                holder = col_row[j]
                if holder == -1 or j == freed_col:
                    if j == freed_col or zero_col[freed_col]:
                        path = [(r, j)]
                        while prev[r] is not None:
                            r, jj = prev[r]
                            path.append((r, jj))
                        return path
                    continue
                if holder < min_row or holder in prev:
                    continue
                prev[holder] = (r, j)
                queue.append(holder)
        return None

    for i in range(n):
        cur = row_col[i]
        for j in tight_cols[i]:
            if j >= cur:
                break
            holder = col_row[j]
            if holder != -1 and holder < i:
                continue
            if holder == -1:
                if not zero_col[cur]:
                    continue
                col_row[cur] = -1
                row_col[i] = j
                col_row[j] = i
                break
            # column cur is about to be released; holder must move elsewhere
            col_row[cur] = -1
            path = reroute(holder, j, cur, i + 1)
            if path is None:
                col_row[cur] = i
                continue
            for r, jj in path:
                row_col[r] = jj
                col_row[jj] = r
            row_col[i] = j
            col_row[j] = i
            break
    return row_col


def min_cost_assignment(matrix, *, tol: float | None = None) -> Assignment:
    """Match every row to a distinct column at minimum total cost.

    Accepts ``inf`` entries for forbidden pairs. Raises ``Infeasible`` when
    there are more rows than columns or no finite assignment exists.
    """
    c = np.asarray(matrix, dtype=float)
    if c.ndim != 2:
        raise ValueError("cost matrix must be two-dimensional")
    n, m = c.shape
    if n == 0:
        return Assignment((), 0.0)
    if n > m:
        raise Infeasible(f"{n} rows cannot be matched into {m} columns")
    if np.isnan(c).any():
        raise ValueError("cost matrix contains NaN")
    finite = c[np.isfinite(c)]
    scale = max(1.0, float(np.max(np.abs(finite)))) if finite.size else 1.0
    if tol is None:
        tol = 1e-9 * scale
    row_col, u, v = _hungarian(c)
    row_col = _lexicographic(c, row_col, u, v, tol)
    total = float(np.sum(c[np.arange(n), row_col]))
    return Assignment(tuple(int(j) for j in row_col), total)
