"""Markov width machinery for graphical models.

Bounds for ring graphs come from gluing cycles along vertices and edges,
where the width is the maximum over the pieces; series-parallel graphs
get explicit degree {2,4} bases by recursing through their two-terminal
structure.  Everything here stays in exact integers; graph utilities
lean on networkx.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property

import networkx as nx

from .complexes import (HierModel, graph_complex, model_matrix, parity_move,
                        product_cell_map, side_cell_map, split)
from .configs import MoveSet
from .errors import InputError
from .markov import markov_basis
from .products import codim0_basis, glue_sets, product_config, tilde_extend


@dataclass(frozen=True)
class MarkovGraph:
    """Simple undirected graph with sortable vertex labels."""

    vertices: tuple
    edges: tuple

    @staticmethod
    def of(vertices, edges):
        verts = tuple(sorted(set(vertices)))
        vset = set(verts)
        seen = set()
        out = []
        for e in edges:
            u, v = e
            if u == v:
                raise InputError("loop at %r" % (u,))
            if u not in vset or v not in vset:
                raise InputError("edge %r leaves the vertex set" % (e,))
            key = (u, v) if u < v else (v, u)
            if key not in seen:
                seen.add(key)
                out.append(key)
        out.sort()
        return MarkovGraph(verts, tuple(out))

    @property
    def n(self):
        return len(self.vertices)

    @cached_property
    def adjacency(self):
        adj = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def neighbors(self, v):
        return sorted(self.adjacency[v])

    def degree(self, v):
        return len(self.adjacency[v])

    def has_edge(self, u, v):
        return v in self.adjacency.get(u, ())

    def add_edge(self, u, v):
        return MarkovGraph.of(self.vertices, self.edges + ((u, v),))

    def remove_edge(self, u, v):
        key = (u, v) if u < v else (v, u)
        return MarkovGraph.of(self.vertices,
                              tuple(e for e in self.edges if e != key))

    def induced(self, subset):
        subset = set(subset)
        return MarkovGraph.of((v for v in self.vertices if v in subset),
                              (e for e in self.edges
                               if e[0] in subset and e[1] in subset))

    def without(self, subset):
        subset = set(subset)
        return self.induced(v for v in self.vertices if v not in subset)

    def contract(self, u, v):
        """Merge v into u, dropping loops and parallel copies."""
        if u > v:
            u, v = v, u
        edges = []
        for a, b in self.edges:
            a = u if a == v else a
            b = u if b == v else b
            if a != b:
                edges.append((a, b))
        return MarkovGraph.of((w for w in self.vertices if w != v), edges)

    def to_nx(self):
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def is_connected(self):
        return self.n > 0 and nx.is_connected(self.to_nx())

    def components(self):
        comps = [tuple(sorted(c)) for c in nx.connected_components(self.to_nx())]
        return sorted(comps)

    def is_cycle_graph(self):
        return (self.n >= 3 and self.is_connected()
                and all(self.degree(v) == 2 for v in self.vertices))

    def cycle_order(self):
        """Vertices of a cycle graph walked from the lowest label."""
        if not self.is_cycle_graph():
            raise InputError("not a cycle")
        start = self.vertices[0]
        order = [start]
        prev, cur = None, start
        while True:
            nxt = min(w for w in self.adjacency[cur] if w != prev)
            if nxt == start:
                break
            order.append(nxt)
            prev, cur = cur, nxt
        return tuple(order)


def complete_graph(labels):
    labels = tuple(labels)
    return MarkovGraph.of(labels, itertools.combinations(labels, 2))


def cycle_graph(labels):
    labels = tuple(labels)
    if len(labels) < 3:
        raise InputError("a cycle needs at least three vertices")
    edges = list(zip(labels, labels[1:])) + [(labels[-1], labels[0])]
    return MarkovGraph.of(labels, edges)


def path_graph(labels):
    labels = tuple(labels)
    return MarkovGraph.of(labels, zip(labels, labels[1:]))


def complete_bipartite(left, right):
    left = tuple(left)
    right = tuple(right)
    return MarkovGraph.of(left + right, itertools.product(left, right))


def _levels(graph, d):
    if isinstance(d, int):
        return (d,) * graph.n
    if isinstance(d, dict):
        return tuple(d[v] for v in graph.vertices)
    d = tuple(d)
    if len(d) != graph.n:
        raise InputError("need one level count per vertex")
    return d


def graph_model(graph, d=2):
    return HierModel.of(graph_complex(graph.vertices, graph.edges),
                        _levels(graph, d))


def width(model):
    """Largest degree of a minimal generator, computed exactly."""
    return markov_basis(model_matrix(model)).mu


def _triangle_width(levels):
    a, b, c = sorted(levels)
    if a == 2:
        return min(2 * b, 2 * c)
    table = {(3, 3, 3): 6, (3, 3, 4): 8, (3, 4, 4): 12, (4, 4, 4): 14}
    if (a, b) == (3, 3) and c >= 5:
        return 10
    return table.get((a, b, c))


def _dihedral_min(seq):
    n = len(seq)
    best = None
    for s in (tuple(seq), tuple(reversed(seq))):
        for i in range(n):
            rot = s[i:] + s[:i]
            if best is None or rot < best:
                best = rot
    return best


_C4_TABLE = {
    (2, 2, 2, 2): 4,
    (2, 2, 3, 3): 6, (2, 2, 3, 4): 6, (2, 2, 3, 5): 6,
    (2, 2, 4, 4): 8, (2, 2, 4, 5): 8, (2, 2, 5, 5): 10,
    (2, 3, 3, 3): 6, (3, 3, 3, 3): 6,
}

_C5_TABLE = {(2, 2, 3, 3, 3): 6}


def known_width(graph, d=2):
    """Exact Markov width when the instance matches a tabulated family."""
    levels = dict(zip(graph.vertices, _levels(graph, d)))
    if graph.is_cycle_graph():
        order = graph.cycle_order()
        seq = tuple(levels[v] for v in order)
        if graph.n == 3:
            return _triangle_width(seq)
        if graph.n == 4:
            return _C4_TABLE.get(_dihedral_min(seq))
        if graph.n == 5:
            return _C5_TABLE.get(_dihedral_min(seq))
        return None
    degs = sorted(graph.degree(v) for v in graph.vertices)
    if graph.n == 4 and degs == [3, 3, 3, 3]:
        if all(levels[v] == 2 for v in graph.vertices):
            return 6
        return None
    if graph.n == 5 and degs == [2, 2, 2, 3, 3]:
        if not nx.is_isomorphic(graph.to_nx(),
                                nx.complete_bipartite_graph(2, 3)):
            return None
        ok = all(levels[v] == (3 if graph.degree(v) == 3 else 2)
                 for v in graph.vertices)
        return 6 if ok else None
    return None


def _cyclic_run(flags, k):
    """Is there a run of k consecutive True values, read cyclically?

    Returns (exists, wrapped): whether any witnessing run crosses the
    seam between the last and first position.
    """
    n = len(flags)
    if n < k:
        return False, False
    exists = False
    wrapped = False
    for i in range(n):
        if all(flags[(i + j) % n] for j in range(k)):
            exists = True
            if i + k > n:
                wrapped = True
    return exists, wrapped


def _cycle_case_bound(seq, trace, label):
    """First applicable cycle bound; None when no case matches."""
    big = [x > 2 for x in seq]
    pair, wrap = _cyclic_run(big, 2)
    if not pair:
        trace.append("%s: no adjacent pair of levels above 2, width 4" % label)
        return 4
    if max(seq) <= 3:
        run, wrap = _cyclic_run(big, 4)
        if not run:
            trace.append("%s: levels at most 3 and no cyclic run of four "
                         "above 2, bound 6" % label)
            return 6
    if max(seq) <= 5:
        run, wrap = _cyclic_run(big, 3)
        if not run:
            bound = 8 if max(seq) <= 4 else 10
            trace.append("%s: levels at most %d and no cyclic run of three "
                         "above 2, bound %d" % (label, max(seq), bound))
            return bound
        if wrap:
            trace.append("%s: blocking run of high levels wraps around the "
                         "cycle seam" % label)
    trace.append("%s: no cycle case applies" % label)
    return None


def _cycle_bound(graph, levels, trace):
    order = graph.cycle_order()
    seq = tuple(levels[v] for v in order)
    label = "cycle %s with levels %s" % ("-".join(str(v) for v in order),
                                         seq)
    exact = known_width(graph, levels)
    if exact is not None:
        trace.append("%s: tabulated width %d" % (label, exact))
        return exact
    return _cycle_case_bound(seq, trace, label)


def _maxdefined(values):
    if any(v is None for v in values):
        return None
    return max([2] + values)


def _block_bound(g, levels, trace):
    if len(g.edges) == 1:
        trace.append("single edge %s-%s: width 2" % g.edges[0])
        return 2
    if g.is_cycle_graph():
        return _cycle_bound(g, levels, trace)
    exact = known_width(g, levels)
    if exact is not None:
        trace.append("tabulated width %d on %d vertices" % (exact, g.n))
        return exact
    for u, v in itertools.combinations(g.vertices, 2):
        if not g.has_edge(u, v):
            continue
        rest = g.without((u, v))
        comps = rest.components()
        if len(comps) < 2:
            continue
        trace.append("edge %s-%s separates the block; width is the maximum "
                     "over the glued pieces" % (u, v))
        vals = []
        for comp in comps:
            piece = g.induced(set(comp) | {u, v})
            vals.append(_bound(piece, levels, trace))
        return _maxdefined(vals)
    for u, v in itertools.combinations(g.vertices, 2):
        if g.has_edge(u, v) or levels[u] != 2 or levels[v] != 2:
            continue
        rest = g.without((u, v))
        comps = rest.components()
        if len(comps) < 2:
            continue
        sides = [g.induced(set(c) | {u, v}) for c in comps]
        if not all(nx.is_forest(s.to_nx()) for s in sides):
            continue
        trace.append("non-edge %s-%s with 2 levels separates into trees; "
                     "bound is the maximum after adding the edge" % (u, v))
        vals = [_bound(s.add_edge(u, v), levels, trace) for s in sides]
        return _maxdefined(vals)
    trace.append("no derivation rule applies to a block on %d vertices" % g.n)
    return None


def _bound(g, levels, trace):
    if not g.edges:
        trace.append("edgeless part: width 2")
        return 2
    comps = g.components()
    if len(comps) > 1:
        trace.append("disjoint pieces: bound is the maximum")
        return _maxdefined([_bound(g.induced(c), levels, trace)
                            for c in comps])
    blocks = [tuple(sorted(b)) for b in
              nx.biconnected_components(g.to_nx())]
    blocks.sort()
    if len(blocks) > 1:
        cuts = sorted(nx.articulation_points(g.to_nx()))
        trace.append("cut vertices %s split off %d blocks; width is the "
                     "maximum over blocks" % (cuts, len(blocks)))
        return _maxdefined([_block_bound(g.induced(b), levels, trace)
                            for b in blocks])
    return _block_bound(g, levels, trace)


@dataclass(frozen=True)
class WidthBound:
    """Upper bound from the gluing rules, or None with the failing trace."""

    bound: object
    trace: tuple

    @property
    def derivable(self):
        return self.bound is not None

    def summary(self):
        head = ("width bound %d" % self.bound if self.derivable
                else "no bound derivable")
        return "\n".join([head] + ["  " + t for t in self.trace])


def width_bound(graph, d=2):
    levels = dict(zip(graph.vertices, _levels(graph, d)))
    if any(x < 2 for x in levels.values()):
        raise InputError("level counts must be at least 2")
    trace = []
    if graph.n == 0:
        return WidthBound(2, ("empty graph: width 2",))
    return WidthBound(_bound(graph, levels, trace), tuple(trace))


MINOR_VERTEX_CAP = 12


def has_minor(graph, minor):
    """Brute-force minor containment via deletions and contractions."""
    if graph.n > MINOR_VERTEX_CAP:
        raise InputError("minor search is capped at %d vertices"
                         % MINOR_VERTEX_CAP)
    target = minor.to_nx()
    tn, te = minor.n, len(minor.edges)
    min_degree = min((minor.degree(v) for v in minor.vertices), default=0)
    smooth_ok = min_degree >= 3
    memo = {}

    def shrink(g):
        while True:
            drop = [v for v in g.vertices if g.degree(v) <= 1]
            if drop:
                g = g.without(drop)
                continue
            if smooth_ok:
                deg2 = next((v for v in g.vertices if g.degree(v) == 2), None)
                if deg2 is not None:
                    a, b = g.neighbors(deg2)
                    g = g.without((deg2,))
                    if not g.has_edge(a, b):
                        g = g.add_edge(a, b)
                    continue
            return g

    def rec(g):
        g = shrink(g)
        if g.n < tn or len(g.edges) < te:
            return False
        key = (g.vertices, g.edges)
        if key in memo:
            return memo[key]
        gm = nx.algorithms.isomorphism.GraphMatcher(g.to_nx(), target)
        if gm.subgraph_is_monomorphic():
            memo[key] = True
            return True
        u, v = g.edges[0]
        out = rec(g.contract(u, v)) or rec(g.remove_edge(u, v))
        memo[key] = out
        return out

    return rec(graph)


def _peelable_chains(g):
    """Maximal chains of degree-2 vertices with their attachment points."""
    chains = []
    seen = set()
    for v in g.vertices:
        if g.degree(v) != 2 or v in seen:
            continue
        chain = [v]
        seen.add(v)
        for direction in (0, 1):
            cur = v
            prev = None
            while True:
                nbrs = [w for w in g.neighbors(cur) if w != prev]
                nxt = nbrs[direction] if cur == v and len(nbrs) > direction \
                    else (nbrs[0] if nbrs else None)
                if nxt is None or g.degree(nxt) != 2 or nxt in seen:
                    break
                seen.add(nxt)
                if direction == 0:
                    chain.append(nxt)
                else:
                    chain.insert(0, nxt)
                prev, cur = cur, nxt
        ends = []
        for w in g.neighbors(chain[0]):
            if w not in chain:
                ends.append(w)
        for w in g.neighbors(chain[-1]):
            if w not in chain:
                ends.append(w)
        if len(ends) == 2:
            chains.append((tuple(chain), ends[0], ends[1]))
    chains.sort()
    return chains


def _ring_block(g):
    """Can the 2-connected block be peeled down to a single cycle?"""
    if len(g.edges) == 1 or g.is_cycle_graph():
        return True
    for chain, u, w in _peelable_chains(g):
        if g.has_edge(u, w) and _ring_block(g.without(chain)):
            return True
    return False


def is_ring_graph(graph):
    """Recursively built from paths and cycles by vertex and edge gluing."""
    if graph.n == 0:
        return True
    for comp in graph.components():
        sub = graph.induced(comp)
        if not sub.edges:
            continue
        for b in nx.biconnected_components(sub.to_nx()):
            if not _ring_block(sub.induced(b)):
                return False
    return True


@dataclass(frozen=True)
class SlimReport:
    outerplanar: bool
    ring_graph: bool
    markov_slim_claim: bool
    notes: tuple

    def summary(self):
        return "\n".join(["outerplanar: %s" % self.outerplanar,
                          "ring graph: %s" % self.ring_graph,
                          "Markov slim (claim): %s" % self.markov_slim_claim]
                         + ["  " + n for n in self.notes])


def outerplanar_and_slim(graph):
    """Outerplanarity by excluded minors, with the width-four claim."""
    if graph.n > MINOR_VERTEX_CAP:
        raise InputError("outerplanarity test is capped at %d vertices"
                         % MINOR_VERTEX_CAP)
    k4 = has_minor(graph, complete_graph(range(4)))
    k23 = has_minor(graph, complete_bipartite(range(2), range(2, 5)))
    notes = []
    if k4:
        notes.append("contains a K4 minor")
    if k23:
        notes.append("contains a K2,3 minor")
    outer = not k4 and not k23
    ring = is_ring_graph(graph)
    if outer:
        notes.append("free of K4 and K2,3 minors; every independent-set "
                     "level choice has width at most 4")
    return SlimReport(outer, ring, outer, tuple(notes))


def connected_graphs(max_vertices):
    """All connected graphs up to isomorphism, labels 1..n, from the atlas."""
    if max_vertices > 7:
        raise InputError("the graph atlas stops at seven vertices")
    out = []
    for g in nx.generators.atlas.graph_atlas_g():
        n = g.number_of_nodes()
        if n < 1 or n > max_vertices:
            continue
        if not nx.is_connected(g):
            continue
        out.append(MarkovGraph.of(range(1, n + 1),
                                  ((u + 1, v + 1) for u, v in g.edges())))
    return out


def series_parallel_graphs(max_vertices):
    """Connected graphs without a K4 minor, up to isomorphism."""
    k4 = complete_graph(range(4))
    return [g for g in connected_graphs(max_vertices)
            if g.n < 4 or not has_minor(g, k4)]


@dataclass(frozen=True)
class SPBasis:
    graph: MarkovGraph
    model: HierModel
    moves: MoveSet
    top: object
    bottom: object

    def degree_histogram(self):
        return self.moves.degree_histogram()


def _side_moves(sp, side, moves):
    """Re-index lex-cell moves into a side configuration's variable order."""
    perm = side_cell_map(sp, side)
    return MoveSet.of([tuple(m.vector[perm[i]] for i in range(len(perm)))
                       for m in moves])


def _z_moves_to_cells(sp, moves):
    perm = product_cell_map(sp)
    out = []
    for m in moves:
        vec = [0] * len(perm)
        for z, e in enumerate(m.vector):
            vec[perm[z]] = e
        out.append(tuple(vec))
    return MoveSet.of(out)


def _assemble_split(g, v1, v2, f1, f2):
    """Join side bases over a codim-0 or codim-1 split of the model."""
    model = graph_model(g, 2)
    sp = split(model, v1, v2)
    fx = _side_moves(sp, "x", f1)
    gy = _side_moves(sp, "y", f2)
    pc = product_config(sp.x_config, sp.y_config, sp.grading)
    if sp.codim == 0:
        return _z_moves_to_cells(sp, codim0_basis(fx, gy, pc))
    if sp.codim != 1:
        raise InputError("separator grading has kernel rank %d" % sp.codim)
    t, b = sp.separator
    g1t = _sp_tt(g.induced(v1).add_edge(t, b), t, b)
    g2t = _sp_tt(g.induced(v2).add_edge(t, b), t, b)
    tp = tilde_extend(pc)
    h = codim0_basis(_side_moves(sp, "x", g1t), _side_moves(sp, "y", g2t),
                     tp.product)
    fvar = MoveSet.of([m for m in fx
                       if any(pc.left.class_margin(m.vector))])
    gvar = MoveSet.of([m for m in gy
                       if any(pc.right.class_margin(m.vector))])
    glued = glue_sets(fvar, gvar, pc)
    return _z_moves_to_cells(sp, h.union(glued))


def _sp_tt(g, t, b):
    """Markov basis moves for a two-terminal series-parallel graph."""
    if g.n <= 2:
        return MoveSet.of([])
    if g.n == 3 and len(g.edges) == 3:
        return MoveSet.of([parity_move(graph_model(g, 2))])
    for v in g.vertices:
        if v in (t, b):
            continue
        comps = g.without((v,)).components()
        if len(comps) < 2:
            continue
        ct = next(c for c in comps if t in c)
        cb = next(c for c in comps if b in c)
        if ct == cb:
            continue
        if len(comps) > 2:
            raise InputError("vertices off every top-bottom path: "
                             "not series-parallel")
        v1 = set(ct) | {v}
        v2 = set(cb) | {v}
        f1 = _sp_tt(g.induced(v1), t, v)
        f2 = _sp_tt(g.induced(v2), v, b)
        return _assemble_split(g, v1, v2, f1, f2)
    pieces = g.without((t, b)).components()
    for piece in pieces:
        attach = {w for p in piece for w in g.neighbors(p)}
        if t not in attach or b not in attach:
            raise InputError("vertices off every top-bottom path: "
                             "not series-parallel")
    if len(pieces) >= 2:
        v1 = set(pieces[0]) | {t, b}
        v2 = {t, b}.union(*[set(p) for p in pieces[1:]])
        f1 = _sp_tt(g.induced(v1), t, b)
        f2 = _sp_tt(g.induced(v2), t, b)
        return _assemble_split(g, v1, v2, f1, f2)
    if g.has_edge(t, b):
        gm = g.remove_edge(t, b)
        for v in gm.vertices:
            if v in (t, b):
                continue
            comps = gm.without((v,)).components()
            if len(comps) < 2:
                continue
            ct = next(c for c in comps if t in c)
            cb = next(c for c in comps if b in c)
            if ct == cb or len(comps) > 2:
                continue
            # rebase the terminals so the next parallel split shrinks;
            # the tb margin rows keep every kernel move liftable
            if len(cb) + 1 >= 3:
                return _sp_tt(g, *sorted((v, b)))
            return _sp_tt(g, *sorted((t, v)))
    raise InputError("not series-parallel between %r and %r" % (t, b))


def _sp_connected(g):
    if g.n <= 2:
        return MoveSet.of([])
    cuts = sorted(nx.articulation_points(g.to_nx()))
    if cuts:
        v = cuts[0]
        comps = g.without((v,)).components()
        v1 = set(comps[0]) | {v}
        v2 = {v}.union(*[set(c) for c in comps[1:]])
        f1 = _sp_connected(g.induced(v1))
        f2 = _sp_connected(g.induced(v2))
        return _assemble_split(g, v1, v2, f1, f2)
    t, b = g.edges[0]
    return _sp_tt(g, t, b)


def sp_basis(graph, top=None, bottom=None):
    """Degree {2,4} Markov basis of a connected series-parallel graph.

    With terminals the graph must be series-parallel between them; without
    terminals any connected graph free of K4 minors works, decomposed
    along its cut vertices first.
    """
    if not graph.is_connected():
        raise InputError("graph must be connected")
    if (top is None) != (bottom is None):
        raise InputError("give both terminals or neither")
    if top is not None:
        if top not in graph.vertices or bottom not in graph.vertices:
            raise InputError("terminals must be vertices")
        if top == bottom:
            raise InputError("terminals must differ")
        moves = _sp_tt(graph, top, bottom)
    else:
        moves = _sp_connected(graph)
    return SPBasis(graph, graph_model(graph, 2), moves, top, bottom)


def cycle_width_experiment(d_seq):
    """Observed vs conjectured width of a cycle; reports, never asserts."""
    d_seq = tuple(d_seq)
    n = len(d_seq)
    if n < 3:
        raise InputError("a cycle needs at least three vertices")
    g = cycle_graph(range(1, n + 1))
    exact = width(graph_model(g, d_seq))
    windows = []
    for i in range(n):
        triple = (d_seq[i], d_seq[(i + 1) % n], d_seq[(i + 2) % n])
        val = _triangle_width(triple)
        if val is None:
            val = width(graph_model(complete_graph(range(1, 4)), triple))
        windows.append(val)
    conjectured = max(windows)
    return {"levels": d_seq, "observed": exact, "conjectured": conjectured,
            "agree": exact == conjectured}
