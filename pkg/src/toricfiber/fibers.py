"""Fiber enumeration and fiber graphs.

The fiber of a right-hand side b is the set of nonnegative integer points u
with B u = b.  A move set turns a fiber into a graph: u and v are adjacent
when their difference or its negative is one of the moves.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .configs import Move, MoveSet
from .errors import FiberCapExceeded, InputError

DEFAULT_FIBER_CAP = 250_000


def _degree_of_rhs(config, rhs):
    """Total degree forced by omega, or None if the fiber must be empty."""
    val = sum(Fraction(w) * x for w, x in zip(config.omega, rhs))
    if val.denominator != 1 or val < 0:
        return None
    return int(val)


def enumerate_fiber(config, rhs, cap=DEFAULT_FIBER_CAP):
    """All nonnegative integer solutions of B u = rhs, in sorted order.

    Depth-first search over variables in index order; each partial solution
    is pruned with per-row bounds on what the remaining variables can still
    contribute.  Raises FiberCapExceeded beyond cap points.
    """
    if len(rhs) != config.dim:
        raise InputError("rhs dimension mismatch")
    deg = _degree_of_rhs(config, rhs)
    if deg is None:
        return Fiber(config, tuple(rhs), ())
    n = config.n
    d = config.dim
    cols = config.columns
    # suffix bounds: for variables >= v, least and greatest entry per row
    lo = [[0] * d for _ in range(n + 1)]
    hi = [[0] * d for _ in range(n + 1)]
    for v in range(n - 1, -1, -1):
        for i in range(d):
            lo[v][i] = cols[v][i] if v == n - 1 else min(lo[v + 1][i], cols[v][i])
            hi[v][i] = cols[v][i] if v == n - 1 else max(hi[v + 1][i], cols[v][i])
    points = []
    current = [0] * n

    def feasible(v, k, remaining):
        l, h = lo[v], hi[v]
        for i in range(d):
            ri = remaining[i]
            if ri < k * l[i] or ri > k * h[i]:
                return False
        return True

    def walk(v, k, remaining):
        if v == n - 1:
            col = cols[v]
            for i in range(d):
                if remaining[i] != k * col[i]:
                    return
            current[v] = k
            points.append(tuple(current))
            current[v] = 0
            if len(points) > cap:
                raise FiberCapExceeded(
                    "fiber of %r exceeds cap %d" % (tuple(rhs), cap))
            return
        col = cols[v]
        for e in range(k + 1):
            if e:
                remaining = [ri - ci for ri, ci in zip(remaining, col)]
            if feasible(v + 1, k - e, remaining):
                current[v] = e
                walk(v + 1, k - e, remaining)
        current[v] = 0

    if n == 0:
        pts = () if any(rhs) else ((),)
        return Fiber(config, tuple(rhs), pts)
    if feasible(0, deg, list(rhs)):
        walk(0, deg, list(rhs))
    points.sort()
    return Fiber(config, tuple(rhs), tuple(points))


@dataclass(frozen=True)
class Fiber:
    config: object
    rhs: tuple
    points: tuple

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @cached_property
    def degree(self):
        if not self.points:
            return None
        return sum(self.points[0])

    def graph(self, moves):
        return FiberGraph.build(self.points, moves, self.rhs)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


@dataclass(frozen=True)
class FiberGraph:
    """A fiber (or any point set) with edges induced by a move set."""

    rhs: tuple
    points: tuple
    edges: tuple        # pairs of point indices (i, j), i < j
    component_ids: tuple

    @staticmethod
    def build(points, moves, rhs=None):
        points = tuple(sorted(points))
        index = {p: k for k, p in enumerate(points)}
        uf = _UnionFind(len(points))
        edges = set()
        vecs = moves.vectors() if isinstance(moves, MoveSet) else [
            m.vector if isinstance(m, Move) else tuple(m) for m in moves]
        for k, p in enumerate(points):
            for vec in vecs:
                q = tuple(a + b for a, b in zip(p, vec))
                j = index.get(q)
                if j is not None and j != k:
                    edges.add((min(k, j), max(k, j)))
                    uf.union(k, j)
        roots = {}
        comp = []
        for k in range(len(points)):
            r = uf.find(k)
            comp.append(roots.setdefault(r, len(roots)))
        return FiberGraph(tuple(rhs) if rhs is not None else None,
                          points, tuple(sorted(edges)), tuple(comp))

    @property
    def n_components(self):
        return (max(self.component_ids) + 1) if self.component_ids else 0

    def is_connected(self):
        return self.n_components <= 1

    def components(self):
        out = [[] for _ in range(self.n_components)]
        for k, c in enumerate(self.component_ids):
            out[c].append(self.points[k])
        return [tuple(c) for c in out]

    def component_representatives(self):
        return tuple(c[0] for c in self.components())


def connected_components(config, rhs, moves, cap=DEFAULT_FIBER_CAP):
    """Fiber graph of rhs under the given moves."""
    fiber = enumerate_fiber(config, rhs, cap=cap)
    return fiber.graph(moves)


@dataclass(frozen=True)
class ProjectedGraph:
    """Image of a fiber graph under a coordinate-summing projection."""

    vertices: tuple
    edges: tuple      # pairs of projected vertices (u, v), u < v; loops dropped

    @staticmethod
    def of(fiber_graph, gamma):
        verts = sorted({gamma(p) for p in fiber_graph.points})
        edges = set()
        for i, j in fiber_graph.edges:
            u = gamma(fiber_graph.points[i])
            v = gamma(fiber_graph.points[j])
            if u != v:
                edges.add((min(u, v), max(u, v)))
        return ProjectedGraph(tuple(verts), tuple(sorted(edges)))

    def intersect(self, other):
        verts = tuple(sorted(set(self.vertices) & set(other.vertices)))
        edges = tuple(sorted(set(self.edges) & set(other.edges)))
        return ProjectedGraph(verts, edges)

    def is_connected(self):
        if len(self.vertices) <= 1:
            return True
        index = {v: k for k, v in enumerate(self.vertices)}
        uf = _UnionFind(len(self.vertices))
        for u, v in self.edges:
            uf.union(index[u], index[v])
        root = uf.find(0)
        return all(uf.find(k) == root for k in range(len(self.vertices)))

    def components(self):
        index = {v: k for k, v in enumerate(self.vertices)}
        uf = _UnionFind(len(self.vertices))
        for u, v in self.edges:
            uf.union(index[u], index[v])
        groups = {}
        for v in self.vertices:
            groups.setdefault(uf.find(index[v]), []).append(v)
        return [tuple(g) for g in groups.values()]


def project_graph(config, fiber_graph):
    """Project a fiber graph to class margins (one coordinate per class)."""
    return ProjectedGraph.of(fiber_graph, config.class_margin)


def points_by_rhs(config, degree):
    """All exponent vectors of total degree exactly `degree`, grouped by image.

    Returns a dict rhs -> sorted tuple of points.  This enumerates every
    monomial of the given total degree, so it is only for small instances.
    """
    n = config.n
    cols = config.columns
    d = config.dim
    groups = {}
    current = [0] * n
    rhs = [0] * d

    def walk(v, k):
        if v == n - 1:
            col = cols[v]
            current[v] = k
            key = tuple(rhs[i] + k * col[i] for i in range(d))
            groups.setdefault(key, []).append(tuple(current))
            current[v] = 0
            return
        col = cols[v]
        for e in range(k + 1):
            current[v] = e
            if e:
                for i in range(d):
                    rhs[i] += col[i]
            walk(v + 1, k - e)
        for i in range(d):
            rhs[i] -= current[v] * col[i]
        current[v] = 0

    if n:
        walk(0, degree)
    elif degree == 0:
        groups[()] = [()]
    return {k: tuple(sorted(v)) for k, v in groups.items()}
