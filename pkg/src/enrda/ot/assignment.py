"""Exact transport on the assignment case (square, uniform marginals).

Serves as the unregularized oracle against which the entropic solver is
checked.  For uniform marginals the coupling polytope has permutation
vertices, so a linear-assignment solve is exact.  Intended for small
instances (M <= 64).
"""

from __future__ import annotations

import numpy as np

from .discrete import CostMatrix
from .plan import TransportPlan


def _hungarian(cost: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """O(n^3) augmenting-path assignment. Returns (col_of_row, u, v) where
    u, v are optimal dual potentials with c_ij - u_i - v_j >= 0."""
    n = cost.shape[0]
    inf = np.inf
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    row_of_col = np.zeros(n + 1, dtype=np.intp)  # 0 = unassigned, rows are 1-based
    way = np.zeros(n + 1, dtype=np.intp)

    for i in range(1, n + 1):
        row_of_col[0] = i
        j0 = 0
        minv = np.full(n + 1, inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = row_of_col[j0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[row_of_col[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if row_of_col[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            row_of_col[j0] = row_of_col[j1]
            j0 = j1

    col_of_row = np.empty(n, dtype=np.intp)
    for j in range(1, n + 1):
        col_of_row[row_of_col[j] - 1] = j - 1
    return col_of_row, u[1:], v[1:]


def _has_perfect_matching(adj: list[np.ndarray], rows: list[int], free_cols: np.ndarray) -> bool:
    """Kuhn's matching restricted to ``rows`` and columns marked free."""
    match_col = {}  # col -> row

    def try_augment(r: int, visited: set[int]) -> bool:
        for c in adj[r]:
            if not free_cols[c] or c in visited:
                continue
            visited.add(c)
            if c not in match_col or try_augment(match_col[c], visited):
                match_col[c] = r
                return True
        return False

    for r in rows:
        if not try_augment(r, set()):
            return False
    return True


def _lexicographic_optimal_permutation(cost: np.ndarray) -> np.ndarray:
    """Smallest optimal permutation in lexicographic order of
    (sigma(0), sigma(1), ...).

    Any optimal permutation uses only edges that are tight for the optimal
    duals (complementary slackness), and conversely every perfect matching
    on tight edges attains the optimum.  So the search reduces to the
    lexicographically-first perfect matching of the tight-edge graph.
    """
    n = cost.shape[0]
    col_of_row, u, v = _hungarian(cost)
    scale = max(1.0, float(np.max(np.abs(cost))))
    tight = cost - u[:, None] - v[None, :] <= 1e-9 * scale
    adj = [np.flatnonzero(tight[i]) for i in range(n)]

    free_cols = np.ones(n, dtype=bool)
    result = np.empty(n, dtype=np.intp)
    for i in range(n):
        remaining = list(range(i + 1, n))
        for c in adj[i]:
            if not free_cols[c]:
                continue
            free_cols[c] = False
            if _has_perfect_matching(adj, remaining, free_cols):
                result[i] = c
                break
            free_cols[c] = True
        else:
            # numerically degenerate tight graph; fall back to the solver's pick
            return col_of_row
    return result


def solve_exact_assignment(
    cost: CostMatrix | np.ndarray,
    row_marginal: np.ndarray | None = None,
    col_marginal: np.ndarray | None = None,
) -> TransportPlan:
    """Exact minimizer of <C, U> over couplings of two uniform histograms of
    equal size.  Returns a permutation plan with mass 1/M per matched pair;
    ties are broken toward the lexicographically smallest permutation.
    """
    entries = cost.entries if isinstance(cost, CostMatrix) else np.asarray(cost, dtype=float)
    m, n = entries.shape
    if m != n:
        raise ValueError("oracle restricted to assignment case: cost must be square")
    uniform = np.full(m, 1.0 / m)
    for marginal in (row_marginal, col_marginal):
        if marginal is not None and not np.allclose(marginal, uniform, atol=1e-12):
            raise ValueError("oracle restricted to assignment case: marginals must be uniform")

    permutation = _lexicographic_optimal_permutation(entries)
    mass = np.zeros((m, n))
    mass[np.arange(m), permutation] = 1.0 / m
    transport_cost = float(entries[np.arange(m), permutation].sum() / m)
    return TransportPlan(
        mass=mass,
        row_marginal=uniform,
        col_marginal=uniform.copy(),
        transport_cost=transport_cost,
        gamma=0.0,
    )
