"""Linear-optimization oracles: deterministic solvers for min_{z in Z} t.z.

Every oracle exposes a batch interface (rows of a cost matrix solved at once)
because the training loop hammers it; single-vector calls wrap the batch path.
Tie-breaking is always toward the lexicographically smallest decision vector,
which for the grid oracle means "prefer the right-going arc".
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

GRID_SIDE = 5
GRID_ARCS = 40  # 20 right-going + 20 down-going on a 5x5 grid
PATH_LEN = 2 * (GRID_SIDE - 1)


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class OracleSolution:
    decision: np.ndarray
    value: float


@dataclass(frozen=True)
class OracleSpec:
    """Description of the feasible region Z.

    kind: 'binary' (Z = {0,1}^d), 'interval' (Z = [-1,1], d=1),
    'grid-path' (monotone paths on the 5x5 grid, d=40),
    'capped-simplex' (0 <= z_j <= cap, sum z = 1),
    'enumerated' (explicit extreme-point list).
    """

    kind: str
    d: int = 1
    cap: float = 1.0
    points: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("binary", "interval", "grid-path", "capped-simplex", "enumerated"):
            raise OracleError(f"unknown oracle kind {self.kind!r}")
        if self.kind == "interval" and self.d != 1:
            raise OracleError("interval oracle requires d=1")
        if self.kind == "grid-path" and self.d != GRID_ARCS:
            raise OracleError(f"grid-path oracle requires d={GRID_ARCS}")
        if self.kind == "capped-simplex":
            if not (0.0 < self.cap <= 1.0):
                raise OracleError("cap must lie in (0, 1]")
            if self.d * self.cap < 1.0 - 1e-12:
                raise OracleError("infeasible capped simplex: d * cap < 1")
        if self.kind == "enumerated":
            if len(self.points) == 0:
                raise OracleError("enumerated oracle needs a nonempty point list")
            pts = np.asarray(self.points, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != self.d:
                raise OracleError("enumerated points must all have dimension d")

    def point_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)


def binary_spec(d: int = 1) -> OracleSpec:
    return OracleSpec("binary", d=d)


def interval_spec() -> OracleSpec:
    return OracleSpec("interval", d=1)


def grid_path_spec() -> OracleSpec:
    return OracleSpec("grid-path", d=GRID_ARCS)


def capped_simplex_spec(d: int, cap: float) -> OracleSpec:
    return OracleSpec("capped-simplex", d=d, cap=cap)


def enumerated_spec(points) -> OracleSpec:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise OracleError("enumerated oracle needs a nonempty point list")
    return OracleSpec("enumerated", d=pts.shape[1], points=tuple(map(tuple, pts)))


def right_arc(i: int, j: int) -> int:
    """Arc (i,j)->(i,j+1); rows indexed top to bottom."""
    return i * (GRID_SIDE - 1) + j


def down_arc(i: int, j: int) -> int:
    """Arc (i,j)->(i+1,j); down arcs live in the upper index half."""
    return GRID_SIDE * (GRID_SIDE - 1) + j * (GRID_SIDE - 1) + i


def _check_costs(spec: OracleSpec, T: np.ndarray) -> np.ndarray:
    T = np.asarray(T, dtype=float)
    if T.ndim == 1:
        T = T[None, :]
    if T.ndim != 2 or T.shape[1] != spec.d:
        raise OracleError(f"cost dimension {T.shape} does not match oracle d={spec.d}")
    if not np.all(np.isfinite(T)):
        raise OracleError("non-finite entry in cost vector")
    return T


def _solve_binary(T):
    Z = (T < 0).astype(float)
    return Z, np.minimum(T, 0.0).sum(axis=1)


def _solve_interval(T):
    # z = -sign(t), with z = -1 at the tie t = 0
    Z = np.where(T < 0, 1.0, -1.0)
    return Z, -np.abs(T).sum(axis=1)


def _solve_grid_path(T):
    n = T.shape[0]
    s = GRID_SIDE
    # dist[i][j] = best cost-to-go from node (i,j) to (s-1,s-1)
    dist = [[None] * s for _ in range(s)]
    go_right = [[None] * s for _ in range(s)]
    dist[s - 1][s - 1] = np.zeros(n)
    for i in range(s - 1, -1, -1):
        for j in range(s - 1, -1, -1):
            if i == s - 1 and j == s - 1:
                continue
            via_right = T[:, right_arc(i, j)] + dist[i][j + 1] if j < s - 1 else None
            via_down = T[:, down_arc(i, j)] + dist[i + 1][j] if i < s - 1 else None
            if via_down is None:
                dist[i][j], go_right[i][j] = via_right, np.ones(n, dtype=bool)
            elif via_right is None:
                dist[i][j], go_right[i][j] = via_down, np.zeros(n, dtype=bool)
            else:
                right_wins = via_right <= via_down
                dist[i][j] = np.where(right_wins, via_right, via_down)
                go_right[i][j] = right_wins
    Z = np.zeros_like(T)
    rows = np.arange(n)
    ii = np.zeros(n, dtype=int)
    jj = np.zeros(n, dtype=int)
    flat_right = np.empty((s, s, n), dtype=bool)
    for i in range(s):
        for j in range(s):
            flat_right[i, j] = go_right[i][j] if go_right[i][j] is not None else False
    for _ in range(PATH_LEN):
        r = flat_right[ii, jj, rows]
        arc = np.where(r, ii * (s - 1) + jj, s * (s - 1) + jj * (s - 1) + ii)
        Z[rows, arc] = 1.0
        jj = jj + r
        ii = ii + (~r)
    # recompute values from the incidence vectors so value == t.z bit-exactly
    return Z, np.einsum("ij,ij->i", T, Z)


def _capped_simplex_fill(spec: OracleSpec):
    n_full = int(np.floor(1.0 / spec.cap + 1e-12))
    n_full = min(n_full, spec.d)
    rem = 1.0 - n_full * spec.cap
    if rem < 1e-12:
        rem = 0.0
    return n_full, rem


def _solve_capped_simplex(T, spec):
    n_full, rem = _capped_simplex_fill(spec)
    order = np.argsort(T, axis=1, kind="stable")
    Z = np.zeros_like(T)
    rows = np.arange(T.shape[0])[:, None]
    Z[rows, order[:, :n_full]] = spec.cap
    if rem > 0.0:
        Z[rows[:, 0], order[:, n_full]] = rem
    return Z, np.einsum("ij,ij->i", T, Z)


def _solve_enumerated(T, spec):
    P = spec.point_array()
    vals = T @ P.T
    idx = np.argmin(vals, axis=1)  # first index wins ties
    return P[idx].copy(), vals[np.arange(T.shape[0]), idx]


def solve_batch(spec: OracleSpec, T) -> tuple[np.ndarray, np.ndarray]:
    """Solve min_z t.z for every row of T; returns (decisions, values)."""
    T = _check_costs(spec, T)
    if spec.kind == "binary":
        return _solve_binary(T)
    if spec.kind == "interval":
        return _solve_interval(T)
    if spec.kind == "grid-path":
        return _solve_grid_path(T)
    if spec.kind == "capped-simplex":
        return _solve_capped_simplex(T, spec)
    return _solve_enumerated(T, spec)


def solve(spec: OracleSpec, t) -> OracleSolution:
    Z, v = solve_batch(spec, np.atleast_2d(np.asarray(t, dtype=float)))
    return OracleSolution(decision=Z[0], value=float(v[0]))


def solve_interval(t) -> OracleSolution:
    return solve(interval_spec(), t)


def solve_grid_path(t) -> OracleSolution:
    return solve(grid_path_spec(), t)


def solve_capped_simplex(t, cap: float) -> OracleSolution:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return solve(capped_simplex_spec(t.shape[0], cap), t)


def solve_enumerated(points, t) -> OracleSolution:
    return solve(enumerated_spec(points), t)


def enumerate_grid_paths() -> np.ndarray:
    """All C(8,4)=70 monotone paths as 0/1 incidence vectors (brute-force oracle)."""
    from itertools import combinations

    s = GRID_SIDE
    paths = []
    for right_steps in combinations(range(PATH_LEN), s - 1):
        z = np.zeros(GRID_ARCS)
        i = j = 0
        for step in range(PATH_LEN):
            if step in right_steps:
                z[right_arc(i, j)] = 1.0
                j += 1
            else:
                z[down_arc(i, j)] = 1.0
                i += 1
        paths.append(z)
    return np.array(paths)


def capped_simplex_vertices(d: int, cap: float) -> np.ndarray:
    """Extreme points of {0 <= z <= cap, sum z = 1}; small d only."""
    from itertools import combinations, permutations

    n_full, rem = _capped_simplex_fill(OracleSpec("capped-simplex", d=d, cap=cap))
    verts = set()
    idx = range(d)
    if rem == 0.0:
        for full in combinations(idx, n_full):
            z = np.zeros(d)
            z[list(full)] = cap
            verts.add(tuple(z))
    else:
        for full in combinations(idx, n_full):
            for r in idx:
                if r in full:
                    continue
                z = np.zeros(d)
                z[list(full)] = cap
                z[r] = rem
                verts.add(tuple(z))
    return np.array(sorted(verts))


def is_feasible(spec: OracleSpec, z, tol: float = 1e-9) -> bool:
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape[0] != spec.d:
        return False
    if spec.kind == "binary":
        return bool(np.all((z == 0.0) | (z == 1.0)))
    if spec.kind == "interval":
        return bool(np.all(np.abs(z) <= 1.0 + tol))
    if spec.kind == "grid-path":
        if not np.all((z == 0.0) | (z == 1.0)):
            return False
        return any(np.array_equal(z, p) for p in enumerate_grid_paths())
    if spec.kind == "capped-simplex":
        return bool(
            np.all(z >= -tol) and np.all(z <= spec.cap + tol) and abs(z.sum() - 1.0) <= tol
        )
    return any(np.allclose(z, p, atol=tol) for p in spec.point_array())


def diameter_bound(spec: OracleSpec) -> float:
    """B with max_{z in Z} ||z|| <= B, attained at an extreme point."""
    if spec.kind == "binary":
        return float(np.sqrt(spec.d))
    if spec.kind == "interval":
        return 1.0
    if spec.kind == "grid-path":
        return float(np.sqrt(PATH_LEN))
    if spec.kind == "capped-simplex":
        n_full, rem = _capped_simplex_fill(spec)
        return float(np.sqrt(n_full * spec.cap**2 + rem**2))
    return float(np.max(np.linalg.norm(spec.point_array(), axis=1)))
