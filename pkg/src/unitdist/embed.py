"""Unit-distance embeddability solver.

Coordinates live in C (the plane).  A node of the search holds the working
graph, a set of complex linear constraints ``rows @ f = 0`` that every unit
distance embedding in this branch must satisfy, and an orthonormal basis of
their common kernel.  Moves:

* L0  rhombus rows from every 4-cycle;
* L1a two vertices coincide on the whole kernel (refutes the branch);
* L1b two edges whose differences are locked at a non-unit ratio (refutes);
* L2  a non-edge locked at a unit ratio to an edge becomes an edge;
* L3  three edges with a rank-2 linear relation split the branch in two.

Leaves are completed by fixing random relative angles between independent
edge pairs until the embedding is determined up to similarity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from scipy.optimize import least_squares

from .graphcore import Graph, bits

# --------------------------------------------------------------------------
# configuration and results
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EmbedConfig:
    eps_rank: float = 1e-9
    eps_mod: float = 1e-9
    eps_res: float = 1e-9
    max_retries: int = 100
    max_nodes: int = 10_000
    rng_seed: int = 0
    # least-squares polish inside the leaf kernel once random completion gives up
    refine_fallback: bool = True
    refine_attempts: int = 20
    # vertices closer than this count as coincident when checking an embedding
    min_separation: float = 1e-6

    def __post_init__(self):
        if min(self.eps_rank, self.eps_mod, self.eps_res) <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class Move:
    kind: str
    branch: str
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"move": self.kind, "branch": self.branch, **_jsonable(self.data)}


@dataclass
class Embedded:
    coords: np.ndarray
    branch: str
    seed: int
    method: str = "random"
    trace: list[Move] = field(default_factory=list)
    constraints: int = 0  # random unit-ratio constraints used by the completion

    tag = "embedded"


@dataclass
class Refuted:
    trace: list[Move]

    tag = "refuted"


@dataclass
class Unknown:
    reason: str
    trace: list[Move] = field(default_factory=list)

    tag = "unknown"


SolverOutcome = Embedded | Refuted | Unknown


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex | np.complexfloating):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


# --------------------------------------------------------------------------
# linear algebra
# --------------------------------------------------------------------------


def kernel_basis(rows: np.ndarray | list, n: int, eps_rank: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (as columns) of ``{f : rows @ f = 0}``."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    A = np.asarray(rows, dtype=complex).reshape(-1, n)
    if A.shape[0] == 0:
        return np.eye(n, dtype=complex)
    norms = np.linalg.norm(A, axis=1)
    A = A[norms > 0] / norms[norms > 0, None]
    if A.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > eps_rank * s[0]))
    return vh[rank:].conj().T


def _restrict(K: np.ndarray, rows: np.ndarray, eps_rank: float) -> np.ndarray:
    """Kernel of ``rows`` intersected with span(K), as K times a basis."""
    if rows.shape[0] == 0 or K.shape[1] == 0:
        return K
    M = rows @ K
    norms = np.linalg.norm(rows, axis=1)
    M = M / norms[:, None]
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > eps_rank))
    if rank == 0:
        return K
    return K @ vh[rank:].conj().T


def edge_row(n: int, u: int, v: int) -> np.ndarray:
    r = np.zeros(n, dtype=complex)
    r[u] = 1
    r[v] = -1
    return r


# --------------------------------------------------------------------------
# constraint systems
# --------------------------------------------------------------------------


@dataclass
class ConstraintSystem:
    graph: Graph
    rows: np.ndarray
    branch: str
    kernel: np.ndarray

    @property
    def dim(self) -> int:
        return self.kernel.shape[1]

    def with_rows(self, new_rows: np.ndarray, branch: str, graph: Graph | None = None, eps_rank: float = 1e-9):
        new_rows = np.asarray(new_rows, dtype=complex).reshape(-1, self.graph.n)
        return ConstraintSystem(
            graph=graph or self.graph,
            rows=np.vstack([self.rows, new_rows]),
            branch=branch,
            kernel=_restrict(self.kernel, new_rows, eps_rank),
        )


def rhombus_constraints(g: Graph) -> np.ndarray:
    """One row ``f(v1) - f(v2) + f(v3) - f(v4)`` per 4-cycle of ``g``.

    Each cycle is traversed from its smallest vertex towards the smaller of
    that vertex's two cycle neighbours.
    """
    n = g.n
    rows = []
    adj = g.rows
    for v1 in range(n):
        above = ~((1 << (v1 + 1)) - 1)
        nb = bits(adj[v1] & above)
        for i, v2 in enumerate(nb):
            for v4 in nb[i + 1:]:
                common = adj[v2] & adj[v4] & above
                for v3 in bits(common):
                    r = np.zeros(n, dtype=complex)
                    r[v1] += 1
                    r[v2] -= 1
                    r[v3] += 1
                    r[v4] -= 1
                    rows.append(r)
    if not rows:
        return np.zeros((0, n), dtype=complex)
    return np.array(rows)


def rhombus_rows_through(g: Graph, u: int, v: int) -> np.ndarray:
    """Rhombus rows for the 4-cycles of ``g`` that use the edge ``{u, v}``."""
    n = g.n
    rows = []
    for x in bits(g.rows[v] & ~(1 << u)):
        for y in bits(g.rows[u] & g.rows[x] & ~(1 << v)):
            r = np.zeros(n, dtype=complex)
            r[u] += 1
            r[v] -= 1
            r[x] += 1
            r[y] -= 1
            rows.append(r)
    if not rows:
        return np.zeros((0, n), dtype=complex)
    return np.array(rows)


def initial_system(g: Graph, config: EmbedConfig = EmbedConfig()) -> ConstraintSystem:
    rows = rhombus_constraints(g)
    return ConstraintSystem(g, rows, "0", kernel_basis(rows, g.n, config.eps_rank))


def _edge_vectors(sys: ConstraintSystem, edges: list[tuple[int, int]]) -> np.ndarray:
    K = sys.kernel
    if not edges:
        return np.zeros((0, K.shape[1]), dtype=complex)
    e = np.array(edges)
    return K[e[:, 0]] - K[e[:, 1]]


def _locked_pairs(A: np.ndarray, B: np.ndarray, eps: float, same: bool = False):
    """Yield ``(i, j, omega)`` with ``A[i] == omega * B[j]`` on the kernel."""
    if A.shape[0] == 0 or B.shape[0] == 0 or A.shape[1] == 0:
        return
    na = np.linalg.norm(A, axis=1)
    nb = np.linalg.norm(B, axis=1)
    ok_a = na > eps
    ok_b = nb > eps
    An = np.where(ok_a[:, None], A / np.where(ok_a, na, 1)[:, None], 0)
    Bn = np.where(ok_b[:, None], B / np.where(ok_b, nb, 1)[:, None], 0)
    G = np.abs(An @ Bn.conj().T)
    cand = np.argwhere(G > 1 - 1e-6)
    for i, j in cand:
        if same and j <= i:
            continue
        omega = (A[i] @ B[j].conj()) / (nb[j] ** 2)
        if np.linalg.norm(A[i] - omega * B[j]) <= eps * na[i]:
            yield int(i), int(j), complex(omega)


def find_vertex_collision(sys: ConstraintSystem, eps: float = 1e-9) -> tuple[int, int] | None:
    """Two vertices equal for every kernel member (move L1a)."""
    K = sys.kernel
    n = K.shape[0]
    if n < 2:
        return None
    if K.shape[1] == 0:
        return (0, 1)
    D = np.linalg.norm(K[:, None, :] - K[None, :, :], axis=2)
    iu = np.triu_indices(n, 1)
    hits = np.nonzero(D[iu] <= eps)[0]
    if hits.size == 0:
        return None
    return int(iu[0][hits[0]]), int(iu[1][hits[0]])


def find_nonunit_ratio(sys: ConstraintSystem, eps_res: float = 1e-9, eps_mod: float = 1e-9):
    """Two edges locked at a ratio of modulus != 1 (move L1b).

    Returns ``(v1, v2, v3, v4, omega)`` with ``f(v1)-f(v2) = omega (f(v3)-f(v4))``.
    """
    edges = sys.graph.edges()
    P = _edge_vectors(sys, edges)
    for i, j, omega in _locked_pairs(P, P, eps_res, same=True):
        if abs(abs(omega) - 1) > eps_mod:
            return (*edges[i], *edges[j], omega)
    return None


def find_forced_edge(sys: ConstraintSystem, eps_res: float = 1e-9, eps_mod: float = 1e-9):
    """A non-adjacent pair locked at a unit ratio to some edge (move L2).

    Returns ``(v3, v4, new_rows)`` where ``new_rows`` are the rhombus rows
    created by adding the edge ``{v3, v4}``.
    """
    edges = sys.graph.edges()
    non_edges = sys.graph.non_edges()
    if not edges or not non_edges:
        return None
    P = _edge_vectors(sys, edges)
    Q = _edge_vectors(sys, non_edges)
    best = None
    for j, i, omega in _locked_pairs(Q, P, eps_res):
        if abs(abs(omega) - 1) <= eps_mod:
            if best is None or j < best:
                best = j
    if best is None:
        return None
    u, v = non_edges[best]
    g2 = sys.graph.add_edge(u, v)
    return u, v, rhombus_rows_through(g2, u, v)


@dataclass(frozen=True)
class HeronBranch:
    coefficients: tuple[complex, complex, complex]
    d2: float
    children: tuple[tuple[complex, complex], ...]


def heron_branch(a: complex, b: complex, c: complex, eps: float = 1e-9) -> HeronBranch:
    """Split ``a x + b y + c z = 0`` with ``|x| = |y| = |z| = 1`` into linear cases.

    Each child ``(p, q)`` encodes the constraint ``p x + q y = 0``; there are
    two children in general, one in the collinear case and none when no
    triangle with side lengths ``|a|, |b|, |c|`` exists.
    """
    a, b, c = complex(a), complex(b), complex(c)
    if a == 0 or b == 0:
        raise ValueError("heron_branch needs a != 0 and b != 0")
    A2, B2, C2 = abs(a) ** 2, abs(b) ** 2, abs(c) ** 2
    s = A2 + B2 - C2
    d2 = (2 * abs(a) * abs(b)) ** 2 - s ** 2
    tol = eps * max(1.0, (2 * abs(a) * abs(b)) ** 2)
    q = 2 * A2 * b
    if d2 < -tol:
        children: tuple = ()
    elif d2 <= tol:
        children = ((s * a, q),)
    else:
        d = math.sqrt(d2)
        children = ((complex(s, d) * a, q), (complex(s, -d) * a, q))
    return HeronBranch((a, b, c), d2, children)


def _normalize_triple(coef: np.ndarray) -> np.ndarray:
    coef = coef / np.max(np.abs(coef))
    first = coef[np.nonzero(np.abs(coef) > 0)[0][0]]
    return coef * (abs(first) / first)


def find_dependent_triple(sys: ConstraintSystem, eps_res: float = 1e-9, screen: float = 1e-8):
    """Three pairwise independent edges whose differences have rank 2 (move L3 detection).

    Returns ``(edges, (a, b, c))`` with ``a d1 + b d2 + c d3 = 0`` on the
    kernel, edges oriented so the coefficients have nonnegative real part
    and normalised to max modulus 1 with ``a`` positive real.
    """
    edges = sys.graph.edges()
    E = len(edges)
    if E < 3 or sys.dim < 2:
        return None
    P = _edge_vectors(sys, edges)
    norms = np.linalg.norm(P, axis=1)
    live = norms > eps_res
    Pn = np.where(live[:, None], P / np.where(live, norms, 1)[:, None], 0)
    G = Pn @ Pn.conj().T
    A = np.abs(G) ** 2
    indep = (A < (1 - 1e-6) ** 2) & live[:, None] & live[None, :]
    # Gram determinant of each normalised triple
    g_ij = G[:, :, None]
    g_jk = G[None, :, :]
    g_ki = G.T[:, None, :]
    det = 1 + 2 * np.real(g_ij * g_jk * g_ki) - A[:, :, None] - A[None, :, :] - A.T[:, None, :]
    I, J, Kk = np.indices((E, E, E))
    mask = (I < J) & (J < Kk) & (det < screen) & indep[:, :, None] & indep[None, :, :] & indep.T[:, None, :]
    for i, j, k in np.argwhere(mask):
        basis = np.vstack([P[i], P[j]])
        sol, *_ = np.linalg.lstsq(basis.T, P[k], rcond=None)
        resid = np.linalg.norm(basis.T @ sol - P[k])
        if resid > eps_res * norms[k]:
            continue
        coef = _normalize_triple(np.array([sol[0], sol[1], -1.0], dtype=complex))
        oriented = [edges[i], edges[j], edges[k]]
        for t in (1, 2):
            if coef[t].real < 0 or (coef[t].real == 0 and coef[t].imag < 0):
                coef[t] = -coef[t]
                oriented[t] = oriented[t][::-1]
        return [tuple(map(int, e)) for e in oriented], tuple(complex(x) for x in coef)
    return None


# --------------------------------------------------------------------------
# saturation
# --------------------------------------------------------------------------


class _BudgetExceeded(Exception):
    pass


def _settle(node: ConstraintSystem, config: EmbedConfig, trace: list[Move]):
    """Apply L1/L2 until stuck, then L3 once.  Returns ('refuted'|'leaf'|'split', payload)."""
    while True:
        hit = find_vertex_collision(node, config.eps_res)
        if hit is not None:
            trace.append(Move("L1a", node.branch, {"pair": hit}))
            return "refuted", None
        hit = find_nonunit_ratio(node, config.eps_res, config.eps_mod)
        if hit is not None:
            v1, v2, v3, v4, omega = hit
            trace.append(Move("L1b", node.branch, {"edges": [(v1, v2), (v3, v4)], "omega": omega}))
            return "refuted", None
        hit = find_forced_edge(node, config.eps_res, config.eps_mod)
        if hit is not None:
            u, v, new_rows = hit
            g2 = node.graph.add_edge(u, v)
            trace.append(Move("L2", node.branch, {"edge": (u, v), "rows": len(new_rows)}))
            node = node.with_rows(new_rows, node.branch + "0", g2, config.eps_rank)
            continue
        hit = find_dependent_triple(node, config.eps_res)
        if hit is None:
            return "leaf", node
        oriented, (a, b, c) = hit
        hb = heron_branch(a, b, c, config.eps_mod)
        (v1, v2), (v3, v4), _ = oriented
        trace.append(Move("L3", node.branch, {"edges": oriented, "coefficients": (a, b, c), "d2": hb.d2,
                                               "children": len(hb.children)}))
        if not hb.children:
            return "refuted", None
        n = node.graph.n
        kids = []
        for idx, (p, q) in enumerate(hb.children):
            row = p * edge_row(n, v1, v2) + q * edge_row(n, v3, v4)
            kids.append(node.with_rows(row[None, :], node.branch + str(idx), None, config.eps_rank))
        return "split", kids


def iter_leaves(root: ConstraintSystem, config: EmbedConfig, trace: list[Move]) -> Iterator[ConstraintSystem]:
    """Depth-first leaves of the move tree; raises _BudgetExceeded past max_nodes."""
    stack = [root]
    nodes = 0
    while stack:
        node = stack.pop()
        nodes += 1
        if nodes > config.max_nodes:
            raise _BudgetExceeded
        status, payload = _settle(node, config, trace)
        if status == "leaf":
            trace.append(Move("leaf", payload.branch, {"dim": payload.dim}))
            yield payload
        elif status == "split":
            stack.extend(reversed(payload))


def saturate(root: ConstraintSystem, config: EmbedConfig = EmbedConfig()):
    """All leaves of the move tree, or Refuted / Unknown."""
    trace: list[Move] = [Move("L0", root.branch, {"rows": int(root.rows.shape[0])})]
    try:
        leaves = list(iter_leaves(root, config, trace))
    except _BudgetExceeded:
        return Unknown("branch budget", trace)
    if not leaves:
        return Refuted(trace)
    return leaves


# --------------------------------------------------------------------------
# completion and verification
# --------------------------------------------------------------------------


class StuckKernel(Exception):
    pass


def verify_embedding(g: Graph, coords, tol: float = 1e-9, min_separation: float = 1e-6) -> bool:
    z = np.asarray(coords, dtype=complex)
    if z.shape != (g.n,):
        return False
    for u, v in g.edges():
        if abs(abs(z[u] - z[v]) - 1) > tol:
            return False
    if g.n > 1:
        D = np.abs(z[:, None] - z[None, :])
        iu = np.triu_indices(g.n, 1)
        if np.min(D[iu]) < max(min_separation, tol):
            return False
    return True


def _spread_components(g: Graph, z: np.ndarray) -> np.ndarray:
    """Translate components apart so distinct components cannot collide."""
    comps = g.components()
    if len(comps) <= 1:
        return z
    z = z.copy()
    offset = 0.0
    for comp in comps:
        idx = bits(comp)
        z[idx] -= z[idx].real.min() + 1j * z[idx].imag.mean()
        width = z[idx].real.max()
        z[idx] += offset
        offset += width + 2.0
    return z


def _quotient_coords(g: Graph, K: np.ndarray) -> np.ndarray | None:
    """From a kernel of dim (#components + 1), a planar placement with unit first edge."""
    n = g.n
    comps = g.components()
    ind = np.zeros((n, len(comps)), dtype=complex)
    for j, comp in enumerate(comps):
        ind[bits(comp), j] = 1
    Q, _ = np.linalg.qr(ind)
    R = K - Q @ (Q.conj().T @ K)
    u_, s, vh = np.linalg.svd(R)
    z = R @ vh[0].conj()
    edges = g.edges()
    u, v = edges[0]
    scale = z[u] - z[v]
    if abs(scale) < 1e-12:
        return None
    return z / scale


def randomized_completion(leaf: ConstraintSystem, config: EmbedConfig = EmbedConfig(),
                          rng: np.random.Generator | None = None) -> np.ndarray | None:
    """Fix random unit-modulus ratios between independent edge pairs, then scale out.

    Returns verified coordinates or None after ``max_retries`` failed draws;
    raises StuckKernel if the target dimension cannot be reached.
    """
    done = _complete(leaf, config, rng)
    return None if done is None else done[0]


def _complete(leaf: ConstraintSystem, config: EmbedConfig, rng: np.random.Generator | None):
    """Coordinates plus the number of random constraints the successful attempt used."""
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    g = leaf.graph
    n = g.n
    edges = g.edges()
    if not edges:
        return _spread_components(g, np.zeros(n, dtype=complex)), 0
    target = len(g.components()) + 1
    if leaf.dim < target:
        return None
    for _ in range(max(1, config.max_retries)):
        K = leaf.kernel
        draws = used = 0
        while K.shape[1] > target:
            P = K[[u for u, _ in edges]] - K[[v for _, v in edges]]
            pairs = _independent_pairs(P, config.eps_res)
            if not pairs:
                raise StuckKernel
            i, j = pairs[int(rng.integers(len(pairs)))]
            b = np.exp(2j * math.pi * rng.random())
            row = edge_row(n, *edges[i]) + b * edge_row(n, *edges[j])
            K2 = _restrict(K, row[None, :], config.eps_rank)
            draws += 1
            if K2.shape[1] == K.shape[1] - 1:
                K = K2
                used += 1
            elif draws > 10 * n:
                raise StuckKernel
        z = _quotient_coords(g, K)
        if z is None:
            continue
        z = _spread_components(g, z)
        if verify_embedding(g, z, config.eps_res, config.min_separation):
            return z, used
    return None


def _independent_pairs(P: np.ndarray, eps: float) -> list[tuple[int, int]]:
    norms = np.linalg.norm(P, axis=1)
    live = norms > eps
    Pn = np.where(live[:, None], P / np.where(live, norms, 1)[:, None], 0)
    G = np.abs(Pn @ Pn.conj().T)
    ok = (G < 1 - 1e-6) & live[:, None] & live[None, :]
    return [(int(i), int(j)) for i, j in np.argwhere(np.triu(ok, 1))]


def refine_in_kernel(leaf: ConstraintSystem, config: EmbedConfig, rng: np.random.Generator) -> np.ndarray | None:
    """Least-squares search for unit edge lengths inside the leaf kernel."""
    g = leaf.graph
    edges = g.edges()
    if not edges:
        return None
    K = leaf.kernel
    k = K.shape[1]
    e = np.array(edges)
    D = K[e[:, 0]] - K[e[:, 1]]

    def resid(x):
        c = x[:k] + 1j * x[k:]
        w = D @ c
        return np.abs(w) ** 2 - 1

    def jac(x):
        c = x[:k] + 1j * x[k:]
        w = D @ c
        # d|w|^2/dRe(c) = 2 Re(conj(w) D), d/dIm(c) = 2 Re(conj(w) i D)
        jr = 2 * np.real(np.conj(w)[:, None] * D)
        ji = 2 * np.real(np.conj(w)[:, None] * 1j * D)
        return np.hstack([jr, ji])

    for _ in range(config.refine_attempts):
        x0 = rng.standard_normal(2 * k)
        method = "lm" if len(edges) >= 2 * k else "trf"
        sol = least_squares(resid, x0, jac=jac, method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        c = sol.x[:k] + 1j * sol.x[k:]
        z = _spread_components(g, K @ c)
        if verify_embedding(g, z, config.eps_res, config.min_separation):
            return z
    return None


def refine_embedding(g: Graph, coords, steps: int = 1) -> np.ndarray:
    """Gauss-Newton steps on squared edge-length residuals."""
    z = np.asarray(coords, dtype=complex).copy()
    edges = g.edges()
    if not edges:
        return z
    n = g.n
    for _ in range(steps):
        J = np.zeros((len(edges), 2 * n))
        r = np.zeros(len(edges))
        for t, (u, v) in enumerate(edges):
            w = z[u] - z[v]
            r[t] = abs(w) ** 2 - 1
            J[t, u], J[t, n + u] = 2 * w.real, 2 * w.imag
            J[t, v], J[t, n + v] = -2 * w.real, -2 * w.imag
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        z = z + step[:n] + 1j * step[n:]
    return z


# --------------------------------------------------------------------------
# top level
# --------------------------------------------------------------------------


def solve(g: Graph, config: EmbedConfig = EmbedConfig()) -> SolverOutcome:
    rng = np.random.default_rng(config.rng_seed)
    root = initial_system(g, config)
    trace: list[Move] = [Move("L0", root.branch, {"rows": int(root.rows.shape[0])})]
    leaves: list[ConstraintSystem] = []
    stuck = False
    try:
        for leaf in iter_leaves(root, config, trace):
            leaves.append(leaf)
            try:
                done = _complete(leaf, config, rng)
            except StuckKernel:
                stuck = True
                done = None
            if done is not None:
                return Embedded(done[0], leaf.branch, config.rng_seed, "random", trace, done[1])
    except _BudgetExceeded:
        return Unknown("branch budget", trace)
    if not leaves:
        return Refuted(trace)
    if config.refine_fallback:
        for leaf in leaves:
            z = refine_in_kernel(leaf, config, rng)
            if z is not None:
                return Embedded(z, leaf.branch, config.rng_seed, "refined", trace)
    return Unknown("stuck kernel" if stuck else "completion failed", trace)


def replay_refutation(g: Graph, trace: list[Move], config: EmbedConfig = EmbedConfig()) -> bool:
    """Re-apply a Refuted trace move by move and check each branch closes."""
    root = initial_system(g, config)
    open_nodes = {root.branch: root}
    closed: set[str] = set()
    for mv in trace:
        if mv.kind in ("L0", "leaf"):
            if mv.kind == "leaf":
                return False
            continue
        node = open_nodes.pop(mv.branch, None)
        if node is None:
            return False
        if mv.kind == "L1a":
            u, v = mv.data["pair"]
            if np.linalg.norm(node.kernel[u] - node.kernel[v]) > config.eps_res:
                return False
            closed.add(mv.branch)
        elif mv.kind == "L1b":
            (v1, v2), (v3, v4) = mv.data["edges"]
            if not (node.graph.has_edge(v1, v2) and node.graph.has_edge(v3, v4)):
                return False
            p = node.kernel[v1] - node.kernel[v2]
            q = node.kernel[v3] - node.kernel[v4]
            omega = (p @ q.conj()) / (q @ q.conj())
            if np.linalg.norm(p - omega * q) > config.eps_res * np.linalg.norm(p):
                return False
            if abs(abs(omega) - 1) <= config.eps_mod:
                return False
            closed.add(mv.branch)
        elif mv.kind == "L2":
            u, v = mv.data["edge"]
            g2 = node.graph.add_edge(u, v)
            rows = rhombus_rows_through(g2, u, v)
            open_nodes[mv.branch + "0"] = node.with_rows(rows, mv.branch + "0", g2, config.eps_rank)
        elif mv.kind == "L3":
            (v1, v2), (v3, v4), (v5, v6) = mv.data["edges"]
            a, b, c = mv.data["coefficients"]
            K = node.kernel
            rel = a * (K[v1] - K[v2]) + b * (K[v3] - K[v4]) + c * (K[v5] - K[v6])
            if np.linalg.norm(rel) > 1e-6:
                return False
            hb = heron_branch(a, b, c, config.eps_mod)
            if not hb.children:
                closed.add(mv.branch)
            for idx, (p, q) in enumerate(hb.children):
                row = p * edge_row(g.n, v1, v2) + q * edge_row(g.n, v3, v4)
                br = mv.branch + str(idx)
                open_nodes[br] = node.with_rows(row[None, :], br, None, config.eps_rank)
        else:
            return False
    return not open_nodes


def outcome_record(g: Graph, outcome: SolverOutcome) -> dict:
    rec: dict = {"outcome": outcome.tag, "n": g.n, "m": g.m}
    if isinstance(outcome, Embedded):
        rec["coords"] = [[float(z.real), float(z.imag)] for z in outcome.coords]
        rec["branch"] = outcome.branch
        rec["seed"] = outcome.seed
        rec["method"] = outcome.method
        rec["constraints"] = outcome.constraints
    if isinstance(outcome, Unknown):
        rec["reason"] = outcome.reason
    rec["trace"] = [mv.to_json() for mv in outcome.trace]
    return rec
