"""Exact solver for the balanced transportation problem.

Transportation simplex (network simplex specialized to a dense bipartite
graph): start from a northwest-corner basic feasible solution, then pivot
on negative reduced costs until optimal. The entering cell is normally the
most negative reduced cost (fast in practice); after a run of degenerate
pivots the solver falls back to Bland's rule (lowest-index entering and
leaving cells), whose anti-cycling guarantee makes termination certain.
The solver either returns an exact optimum or raises; it never silently
returns a suboptimal plan.
"""

from __future__ import annotations

import numpy as np


class TransportSolverError(RuntimeError):
    """The solver failed to converge (iteration cap exceeded)."""


def solve_transport(
    supply: np.ndarray,
    demand: np.ndarray,
    cost: np.ndarray,
    max_iterations: int | None = None,
    stall_limit: int | None = None,
) -> tuple[np.ndarray, float]:
    """Minimum-cost flow between discrete mass distributions.

    Parameters
    ----------
    supply : (m,) positive masses.
    demand : (n,) positive masses with the same total as ``supply``.
    cost : (m, n) non-negative unit transport costs.

    Returns
    -------
    (flow, total_cost) where flow is an (m, n) matrix whose row sums equal
    ``supply`` and column sums equal ``demand``.
    """
    supply = np.asarray(supply, dtype=np.float64)
    demand = np.asarray(demand, dtype=np.float64)
    cost = np.asarray(cost, dtype=np.float64)
    m, n = cost.shape
    if supply.shape != (m,) or demand.shape != (n,):
        raise ValueError("supply/demand shapes do not match the cost matrix")
    if (supply <= 0).any() or (demand <= 0).any():
        raise ValueError("supply and demand masses must be strictly positive")
    if not np.isclose(supply.sum(), demand.sum(), rtol=0, atol=1e-9):
        raise ValueError(
            f"unbalanced problem: supply {supply.sum()!r} vs demand {demand.sum()!r}"
        )

    flow, basis = _northwest_corner(supply, demand)
    # Reduced costs below -tol trigger a pivot; relative to the cost scale
    # so exactness does not degrade for very small or very large costs.
    tol = 1e-12 * float(np.abs(cost).max())
    if max_iterations is None:
        max_iterations = 1000 * (m + n) + 10_000
    if stall_limit is None:
        stall_limit = m + n + 16  # degenerate pivots tolerated before Bland's rule
    stalled = 0

    for _ in range(max_iterations):
        u, v = _duals(basis, cost, m, n)
        if np.isnan(u).any() or np.isnan(v).any():
            raise TransportSolverError("basis lost its spanning tree structure")
        reduced = cost - u[:, None] - v[None, :]
        reduced[tuple(zip(*basis))] = 0.0
        if stalled <= stall_limit:
            entering = _dantzig_entering(reduced, -tol)
        else:
            entering = _bland_entering(reduced, -tol)
        if entering is None:
            total = float((flow * cost).sum())
            return flow, total
        cycle = _find_cycle(basis, entering, m, n)
        # Odd positions lose flow; the tightest one leaves the basis.
        losers = cycle[1::2]
        theta = min(flow[cell] for cell in losers)
        leaving = min(cell for cell in losers if flow[cell] == theta)
        for idx, cell in enumerate(cycle):
            flow[cell] += theta if idx % 2 == 0 else -theta
        flow[leaving] = 0.0
        basis.remove(leaving)
        basis.add(entering)
        stalled = 0 if theta > 0.0 else stalled + 1
    raise TransportSolverError(
        f"no convergence after {max_iterations} pivots on a {m}x{n} problem"
    )


def _northwest_corner(supply, demand):
    """Initial basic feasible solution with exactly m + n - 1 basic cells."""
    m, n = len(supply), len(demand)
    a = supply.copy()
    b = demand.copy()
    flow = np.zeros((m, n))
    basis = set()
    i = j = 0
    while True:
        t = min(a[i], b[j])
        flow[i, j] = t
        basis.add((i, j))
        a[i] -= t
        b[j] -= t
        if i == m - 1 and j == n - 1:
            break
        if j == n - 1:
            i += 1
        elif i == m - 1:
            j += 1
        elif a[i] <= 0.0:
            i += 1
        else:
            j += 1
    return flow, basis


def _duals(basis, cost, m, n):
    """Solve u_i + v_j = c_ij over the basis spanning tree (u_0 = 0)."""
    rows_of = [[] for _ in range(m)]
    cols_of = [[] for _ in range(n)]
    for i, j in basis:
        rows_of[i].append(j)
        cols_of[j].append(i)
    u = np.full(m, np.nan)
    v = np.full(n, np.nan)
    u[0] = 0.0
    stack = [("r", 0)]
    while stack:
        kind, idx = stack.pop()
        if kind == "r":
            for j in rows_of[idx]:
                if np.isnan(v[j]):
                    v[j] = cost[idx, j] - u[idx]
                    stack.append(("c", j))
        else:
            for i in cols_of[idx]:
                if np.isnan(u[i]):
                    u[i] = cost[i, idx] - v[idx]
                    stack.append(("r", i))
    return u, v


def _dantzig_entering(reduced, threshold):
    """Cell with the most negative reduced cost, or None at optimality."""
    flat = int(reduced.argmin())
    cell = divmod(flat, reduced.shape[1])
    return cell if reduced[cell] < threshold else None


def _bland_entering(reduced, threshold):
    """Lowest-index (row-major) cell with reduced cost below threshold.

    Slower than the Dantzig rule but immune to cycling; used to escape
    runs of degenerate pivots.
    """
    mask = reduced < threshold
    if not mask.any():
        return None
    flat = int(np.flatnonzero(mask.ravel())[0])
    return divmod(flat, reduced.shape[1])


def _find_cycle(basis, entering, m, n):
    """Unique alternating cycle the entering cell closes in the basis tree.

    Returned as a list of cells starting with the entering cell; even
    positions gain flow, odd positions lose it.
    """
    i0, j0 = entering
    rows_of = [[] for _ in range(m)]
    cols_of = [[] for _ in range(n)]
    for i, j in basis:
        rows_of[i].append(j)
        cols_of[j].append(i)
    # Path from column j0 back to row i0 through basis edges.
    parent: dict[tuple[str, int], tuple[str, int, tuple[int, int]]] = {}
    stack = [("c", j0)]
    seen = {("c", j0)}
    while stack:
        kind, idx = stack.pop()
        if (kind, idx) == ("r", i0):
            break
        if kind == "c":
            for i in cols_of[idx]:
                if ("r", i) not in seen:
                    seen.add(("r", i))
                    parent[("r", i)] = ("c", idx, (i, idx))
                    stack.append(("r", i))
        else:
            for j in rows_of[idx]:
                if ("c", j) not in seen:
                    seen.add(("c", j))
                    parent[("c", j)] = ("r", idx, (idx, j))
                    stack.append(("c", j))
    cycle = [entering]
    node = ("r", i0)
    while node != ("c", j0):
        kind, idx, cell = parent[node]
        cycle.append(cell)
        node = (kind, idx)
    return cycle
