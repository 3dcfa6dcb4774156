"""Concrete graphs, the BFS distance-regularity certifier and a few structural predicates."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations, product
from pathlib import Path

import numpy as np

from .arrays import DomainError, IntersectionArray


class EdgeListError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[frozenset[int], ...]

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise DomainError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"edge ({u}, {v}) outside 0..{n - 1}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(frozenset(s) for s in nbrs))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in sorted(self.adj[u]) if u < v]

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for u, v in self.edges():
            A[u, v] = A[v, u] = 1
        return A

    def distances_from(self, x: int) -> list[int]:
        """BFS distances; -1 for unreachable vertices."""
        dist = [-1] * self.n
        dist[x] = 0
        queue = deque([x])
        while queue:
            u = queue.popleft()
            for w in self.adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def distance_matrix(self) -> list[list[int]]:
        return [self.distances_from(x) for x in range(self.n)]

    def is_connected(self) -> bool:
        return self.n > 0 and min(self.distances_from(0)) >= 0

    def diameter(self) -> int:
        if not self.is_connected():
            raise DomainError("graph is disconnected")
        return max(max(row) for row in self.distance_matrix())

    def remove_edge(self, u: int, v: int) -> "Graph":
        return Graph.from_edges(self.n, [e for e in self.edges() if e != (min(u, v), max(u, v))])


# --- families ------------------------------------------------------------------


def _from_relation(vertices: list, adjacent) -> Graph:
    edges = [(i, j) for i, j in combinations(range(len(vertices)), 2) if adjacent(vertices[i], vertices[j])]
    return Graph.from_edges(len(vertices), edges)


def build_johnson(n: int, m: int) -> Graph:
    if m < 1 or n < 2 * m:
        raise DomainError(f"Johnson graph J({n},{m}) needs 1 <= m and n >= 2m")
    verts = [frozenset(s) for s in combinations(range(n), m)]
    return _from_relation(verts, lambda a, b: len(a & b) == m - 1)


def build_hypercube(n: int) -> Graph:
    if n < 1:
        raise DomainError(f"hypercube dimension must be positive, got {n}")
    return _from_relation(list(range(2**n)), lambda a, b: (a ^ b).bit_count() == 1)


def build_halved_cube(n: int) -> Graph:
    if n < 2:
        raise DomainError(f"halved n-cube needs n >= 2, got {n}")
    verts = [x for x in range(2**n) if x.bit_count() % 2 == 0]
    return _from_relation(verts, lambda a, b: (a ^ b).bit_count() == 2)


def build_cycle(n: int) -> Graph:
    if n < 3:
        raise DomainError(f"cycle length must be at least 3, got {n}")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def build_pentagon() -> Graph:
    return build_cycle(5)


def build_petersen() -> Graph:
    verts = [frozenset(s) for s in combinations(range(5), 2)]
    return _from_relation(verts, lambda a, b: not (a & b))


def build_icosahedron() -> Graph:
    # apex 0, upper ring 1..5, lower ring 6..10, apex 11
    edges = []
    for i in range(5):
        u, u1 = 1 + i, 1 + (i + 1) % 5
        l, l1 = 6 + i, 6 + (i + 1) % 5
        edges += [(0, u), (11, l), (u, u1), (l, l1), (u, l), (u, l1)]
    return Graph.from_edges(12, edges)


def sylvester_matrix(t: int) -> np.ndarray:
    H = np.array([[1]], dtype=int)
    for _ in range(t):
        H = np.block([[H, H], [H, -H]])
    return H


def build_hadamard_graph(t: int) -> Graph:
    """Rows and columns of the Sylvester matrix of order 2^t, each with both signs.

    (row i, sign e) ~ (column j, sign f) iff H[i, j] = e f.
    """
    if t < 1:
        raise DomainError(f"need t >= 1, got {t}")
    H = sylvester_matrix(t)
    N = H.shape[0]

    def row(i, e):
        return 2 * i + (e < 0)

    def col(j, f):
        return 2 * N + 2 * j + (f < 0)

    edges = []
    for i, j in product(range(N), repeat=2):
        for e in (1, -1):
            f = e * H[i, j]
            edges.append((row(i, e), col(j, f)))
    return Graph.from_edges(4 * N, edges)


def build_line_graph(g: Graph) -> Graph:
    es = g.edges()
    return _from_relation(es, lambda a, b: bool(set(a) & set(b)))


FAMILIES = {
    "johnson": (build_johnson, 2),
    "hypercube": (build_hypercube, 1),
    "halved-cube": (build_halved_cube, 1),
    "cycle": (build_cycle, 1),
    "pentagon": (build_pentagon, 0),
    "petersen": (build_petersen, 0),
    "icosahedron": (build_icosahedron, 0),
    "hadamard": (build_hadamard_graph, 1),
    "line-petersen": (lambda: build_line_graph(build_petersen()), 0),
}


def build(family: str, *params: int) -> Graph:
    try:
        fn, arity = FAMILIES[family]
    except KeyError:
        raise DomainError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}") from None
    if len(params) != arity:
        raise DomainError(f"{family} takes {arity} parameter(s), got {len(params)}")
    return fn(*params)


# --- certification ----------------------------------------------------------------


@dataclass(frozen=True)
class CertificationOutcome:
    status: str  # "distance-regular" | "not-drg" | "disconnected"
    array: IntersectionArray | None = None
    witness: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "distance-regular"

    def to_json(self) -> dict:
        return {"status": self.status, "array": str(self.array) if self.array else None, "witness": self.witness}


def certify_drg(g: Graph) -> CertificationOutcome:
    """BFS from every vertex; the c_i and b_i counts must not depend on the pair."""
    if g.n == 0 or not g.is_connected():
        return CertificationOutcome("disconnected", witness="graph is not connected")
    dist = g.distance_matrix()
    b: dict[int, int] = {}
    c: dict[int, int] = {}
    first: dict[tuple[str, int], tuple[int, int]] = {}
    for x in range(g.n):
        dx = dist[x]
        for y in range(g.n):
            i = dx[y]
            nc = nb = 0
            for w in g.adj[y]:
                if dx[w] == i - 1:
                    nc += 1
                elif dx[w] == i + 1:
                    nb += 1
            for name, table, val in (("c", c, nc), ("b", b, nb)):
                if i not in table:
                    table[i] = val
                    first[(name, i)] = (x, y)
                elif table[i] != val:
                    x0, y0 = first[(name, i)]
                    return CertificationOutcome(
                        "not-drg",
                        witness=f"pair ({x}, {y}) at distance {i}: {name}_{i} = {val}, "
                        f"but pair ({x0}, {y0}) gives {table[i]}",
                    )
    D = max(c)
    if D == 0:
        return CertificationOutcome("not-drg", witness="single vertex")
    arr = IntersectionArray(tuple(b[i] for i in range(D)), tuple(c[i] for i in range(1, D + 1)))
    return CertificationOutcome("distance-regular", arr)


def distance_i_graph(g: Graph, i: int) -> Graph:
    dist = g.distance_matrix()
    if any(d < 0 for row in dist for d in row):
        raise DomainError("graph is disconnected")
    diam = max(max(row) for row in dist)
    if not 1 <= i <= diam:
        raise DomainError(f"distance {i} outside 1..{diam}")
    return Graph.from_edges(g.n, [(x, y) for x in range(g.n) for y in range(x + 1, g.n) if dist[x][y] == i])


def is_bipartite(g: Graph) -> bool:
    colour = [-1] * g.n
    for s in range(g.n):
        if colour[s] >= 0:
            continue
        colour[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.adj[u]:
                if colour[w] < 0:
                    colour[w] = 1 - colour[u]
                    queue.append(w)
                elif colour[w] == colour[u]:
                    return False
    return True


def is_antipodal(g: Graph) -> bool:
    """Being at distance 0 or D is an equivalence relation (D >= 2)."""
    dist = g.distance_matrix()
    D = max(max(row) for row in dist)
    if D < 2:
        return False
    for x in range(g.n):
        far = [y for y in range(g.n) if dist[x][y] == D]
        for y, z in combinations(far, 2):
            if dist[y][z] != D:
                return False
    return True


def is_terwilliger(g: Graph) -> bool:
    """Common neighbours of every pair at distance 2 form a clique."""
    dist = g.distance_matrix()
    for x in range(g.n):
        for y in range(x + 1, g.n):
            if dist[x][y] != 2:
                continue
            mu = g.adj[x] & g.adj[y]
            if any(w not in g.adj[u] for u, w in combinations(mu, 2)):
                return False
    return True


# --- edge lists ------------------------------------------------------------------


def parse_edge_list(text: str) -> Graph:
    edges = []
    n = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListError(f"expected two vertex ids, got {len(parts)} fields", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(f"non-integer vertex id in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise EdgeListError("vertex ids must be nonnegative", lineno)
        if u == v:
            raise EdgeListError(f"loop at vertex {u}", lineno)
        edges.append((u, v))
        n = max(n, u + 1, v + 1)
    return Graph.from_edges(n, edges)


def read_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def format_edge_list(g: Graph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.edges())


def write_edge_list(g: Graph, path) -> None:
    Path(path).write_text(format_edge_list(g))


# --- spectrum straight from the adjacency matrix -----------------------------------


def adjacency_spectrum(g: Graph, tol: float = 1e-6) -> list[tuple[float, int]]:
    """Distinct eigenvalues (descending) with multiplicities, by a symmetric eigensolve.

    Eigenvalues closer than ``tol`` are merged; LAPACK's error on these small
    0/1 matrices is around 1e-13, far below the merge width.
    """
    vals = np.sort(np.linalg.eigvalsh(g.adjacency_matrix()))[::-1]
    groups: list[list[float]] = []
    for x in vals:
        if groups and abs(groups[-1][-1] - x) < tol:
            groups[-1].append(float(x))
        else:
            groups.append([float(x)])
    return [(float(np.mean(grp)), len(grp)) for grp in groups]
