"""Hierarchical log-linear models on simplicial complexes.

A model is a complex on a vertex set together with a level count per
vertex.  Its matrix sends a joint cell to the stack of its margins over
the facets; splitting along a vertex separator rewrites the model as a
product of the two induced sides, graded by the separator margins.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property

from .configs import (GradedVariables, Grading, Move, MoveSet,
                      VectorConfiguration, matrix_configuration)
from .errors import InputError


def _norm_face(face):
    return tuple(sorted(set(face)))


@dataclass(frozen=True)
class SimplicialComplex:
    vertices: tuple
    facets: tuple

    @staticmethod
    def of(vertices, facets):
        vertices = tuple(vertices)
        vset = set(vertices)
        cleaned = []
        for f in facets:
            f = _norm_face(f)
            if not set(f) <= vset:
                raise InputError("facet %s leaves the vertex set" % (f,))
            cleaned.append(f)
        maximal = []
        for f in cleaned:
            if any(set(f) < set(g) for g in cleaned):
                continue
            if f not in maximal:
                maximal.append(f)
        maximal.sort()
        return SimplicialComplex(vertices, tuple(maximal))

    def is_face(self, face):
        face = set(face)
        return any(face <= set(f) for f in self.facets)

    @cached_property
    def covered(self):
        got = set()
        for f in self.facets:
            got.update(f)
        return got

    def induced(self, subset):
        subset = set(subset)
        verts = tuple(v for v in self.vertices if v in subset)
        facets = [tuple(v for v in f if v in subset) for f in self.facets]
        facets = [f for f in facets if f]
        if not facets:
            facets = [()]
        return SimplicialComplex.of(verts, facets)

    def join_simplex(self, face):
        """Add face (and its subsets) to the complex."""
        return SimplicialComplex.of(self.vertices,
                                    self.facets + (_norm_face(face),))

    @property
    def is_simplex(self):
        return len(self.facets) == 1 and set(self.facets[0]) == set(self.vertices)

    def cone_apex(self):
        """A vertex lying in every facet, or None."""
        for v in self.vertices:
            if all(v in f for f in self.facets):
                return v
        return None

    def non_faces(self):
        """All nonempty subsets of the vertex set that are not faces."""
        if len(self.vertices) > 20:
            raise InputError("vertex set too large for subset enumeration")
        out = []
        for r in range(1, len(self.vertices) + 1):
            for sub in itertools.combinations(self.vertices, r):
                if not self.is_face(sub):
                    out.append(sub)
        return out


def simplex(vertices):
    return SimplicialComplex.of(vertices, [tuple(vertices)])


def simplex_boundary(vertices):
    vertices = tuple(vertices)
    facets = [tuple(v for v in vertices if v != w) for w in vertices]
    return SimplicialComplex.of(vertices, facets)


def graph_complex(vertices, edges):
    """One-dimensional complex; isolated vertices become singleton facets."""
    facets = [tuple(e) for e in edges]
    touched = {v for e in edges for v in e}
    facets += [(v,) for v in vertices if v not in touched]
    return SimplicialComplex.of(vertices, facets)


@dataclass(frozen=True)
class HierModel:
    complex: SimplicialComplex
    d: tuple

    @staticmethod
    def of(complex, d):
        d = tuple(d)
        if len(d) != len(complex.vertices):
            raise InputError("need one level count per vertex")
        if any(dv < 2 for dv in d):
            raise InputError("level counts must be at least 2")
        if complex.covered != set(complex.vertices):
            raise InputError("every vertex must lie in some facet")
        return HierModel(complex, d)

    @property
    def vertices(self):
        return self.complex.vertices

    def levels(self, verts):
        """Level counts along a list of vertices."""
        pos = {v: i for i, v in enumerate(self.vertices)}
        return tuple(self.d[pos[v]] for v in verts)

    def cells(self, verts=None):
        if verts is None:
            verts = self.vertices
        return list(itertools.product(*(range(dv) for dv in self.levels(verts))))

    def sub(self, subset):
        subset = set(subset)
        verts = tuple(v for v in self.vertices if v in subset)
        return HierModel.of(self.complex.induced(verts), self.levels(verts))


def _cell_name(cell, d):
    if all(dv <= 10 for dv in d):
        return "p" + "".join(str(c) for c in cell)
    return "p" + "_".join(str(c) for c in cell)


def _margin_rows(model, facets, cells):
    pos = {v: i for i, v in enumerate(model.vertices)}
    rows = []
    row_index = []
    for f in facets:
        idx = [pos[v] for v in f]
        for state in itertools.product(*(range(model.d[i]) for i in idx)):
            row = tuple(1 if all(cell[i] == s for i, s in zip(idx, state))
                        else 0 for cell in cells)
            rows.append(row)
            row_index.append((f, state))
    return rows, row_index


def model_matrix(model):
    """Configuration of facet margins; columns are joint cells in lex order."""
    cells = model.cells()
    rows, _ = _margin_rows(model, model.complex.facets, cells)
    names = tuple(_cell_name(c, model.d) for c in cells)
    return matrix_configuration(rows, names=names)


def hier_codim(model):
    """Kernel rank of the model matrix, by counting non-faces."""
    pos = {v: i for i, v in enumerate(model.vertices)}
    total = 0
    for sub in model.complex.non_faces():
        prod = 1
        for v in sub:
            prod *= model.d[pos[v]] - 1
        total += prod
    return total


@dataclass(frozen=True)
class ModelSplit:
    """A model rewritten as a graded product along a separator."""
    model: HierModel
    left: HierModel
    right: HierModel
    separator: tuple
    grading: Grading
    x_config: VectorConfiguration
    y_config: VectorConfiguration

    @property
    def codim(self):
        return self.grading.codim

    def tilde_model(self, side):
        """Side model with the full separator simplex adjoined."""
        src = self.left if side == "x" else self.right
        cx = src.complex.join_simplex(self.separator)
        return HierModel.of(cx, src.d)


def _side_config(side_model, separator):
    """Side of a split, columns grouped by separator state."""
    sep = tuple(separator)
    rest = tuple(v for v in side_model.vertices if v not in sep)
    pos = {v: i for i, v in enumerate(side_model.vertices)}
    sep_cells = side_model.cells(sep)
    rest_cells = side_model.cells(rest)
    cells = []
    for s in sep_cells:
        for r in rest_cells:
            cell = [0] * len(side_model.vertices)
            for v, val in zip(sep, s):
                cell[pos[v]] = val
            for v, val in zip(rest, r):
                cell[pos[v]] = val
            cells.append(tuple(cell))
    rows, row_index = _margin_rows(side_model, side_model.complex.facets, cells)
    sizes = tuple(len(rest_cells) for _ in sep_cells)
    names = tuple(_cell_name(c, side_model.d) for c in cells)
    variables = GradedVariables(sizes=sizes, names=names)

    sep_complex = side_model.complex.induced(sep)
    sep_model = HierModel.of(sep_complex, side_model.levels(sep))
    arows, arow_index = _margin_rows(sep_model, sep_complex.facets, sep_cells)
    acols = tuple(tuple(r[i] for r in arows) for i in range(len(sep_cells)))
    grading = Grading(columns=acols)

    # margin over a separator face equals a sum of full-facet margin rows
    pi = []
    for g, gstate in arow_index:
        gset = set(g)
        host = next(i for i, f in enumerate(side_model.complex.facets)
                    if gset <= set(f))
        prow = [0] * len(row_index)
        for i, (f, state) in enumerate(row_index):
            if f != side_model.complex.facets[host]:
                continue
            fmap = {v: s for v, s in zip(f, state)}
            if all(fmap[v] == s for v, s in zip(g, gstate)):
                prow[i] = 1
        pi.append(tuple(prow))

    cols = tuple(tuple(r[i] for r in rows) for i in range(len(cells)))
    return VectorConfiguration(variables=variables, columns=cols,
                               grading=grading, pi=tuple(pi)), grading


def split(model, v1, v2):
    """Split the model along the separator v1 & v2.

    Every facet must lie inside one of the two vertex sets; the grading
    is by margins of the induced complex on the separator, under which
    both side matrices are homogeneous by construction.
    """
    v1 = set(v1)
    v2 = set(v2)
    if v1 | v2 != set(model.vertices):
        raise InputError("the two sides must cover the vertex set")
    sep = tuple(v for v in model.vertices if v in (v1 & v2))
    for f in model.complex.facets:
        if not (set(f) <= v1 or set(f) <= v2):
            raise InputError("facet %s crosses the split" % (f,))
    if not (v1 - v2) or not (v2 - v1):
        raise InputError("each side must contribute a vertex")
    left = model.sub(v1)
    right = model.sub(v2)
    x_config, gx = _side_config(left, sep)
    y_config, gy = _side_config(right, sep)
    if gx.columns != gy.columns:
        raise InputError("separator gradings disagree between the sides")
    return ModelSplit(model=model, left=left, right=right, separator=sep,
                      grading=gx, x_config=x_config, y_config=y_config)


def product_cell_map(sp):
    """Variable order of the split product as positions into model.cells().

    Product variable (class, j, k) stands for the joint cell that takes
    separator state number class, left-rest state number j and right-rest
    state number k; entry z of the returned tuple is where that joint cell
    sits in the lex cell order of the whole model.
    """
    model = sp.model
    pos = {v: i for i, v in enumerate(model.vertices)}
    sep = sp.separator
    rest_x = tuple(v for v in sp.left.vertices if v not in sep)
    rest_y = tuple(v for v in sp.right.vertices if v not in sep)
    sep_cells = model.cells(sep)
    x_cells = model.cells(rest_x)
    y_cells = model.cells(rest_y)
    index_of = {c: i for i, c in enumerate(model.cells())}
    out = []
    for s in sep_cells:
        for rx in x_cells:
            for ry in y_cells:
                cell = [0] * len(model.vertices)
                for v, val in zip(sep, s):
                    cell[pos[v]] = val
                for v, val in zip(rest_x, rx):
                    cell[pos[v]] = val
                for v, val in zip(rest_y, ry):
                    cell[pos[v]] = val
                out.append(index_of[tuple(cell)])
    return tuple(out)


def parity_move(model):
    """The two-term relation of the boundary of a binary simplex."""
    if any(dv != 2 for dv in model.d):
        raise InputError("parity move needs binary levels")
    want = simplex_boundary(model.vertices)
    if model.complex.facets != want.facets:
        raise InputError("complex is not the boundary of the full simplex")
    cells = model.cells()
    vec = tuple(1 if sum(c) % 2 == 0 else -1 for c in cells)
    return Move.canonical(vec)


def simplex_boundary_move(vertices):
    """Even-minus-odd product move of the binary simplex boundary model."""
    verts = tuple(vertices)
    if len(verts) < 2:
        raise InputError("a simplex boundary needs at least two vertices")
    model = HierModel.of(simplex_boundary(verts), (2,) * len(verts))
    return parity_move(model)


def side_cell_map(sp, side):
    """Variable order of one split side as positions into its lex cells.

    The side configuration groups cells by separator state; entry i says
    where side variable i sits in the plain lex cell order of the side
    model, so bases computed on the model can be re-indexed for lifting.
    """
    side_model = sp.left if side == "x" else sp.right
    sep = sp.separator
    rest = tuple(v for v in side_model.vertices if v not in sep)
    pos = {v: i for i, v in enumerate(side_model.vertices)}
    index_of = {c: i for i, c in enumerate(side_model.cells())}
    out = []
    for s in side_model.cells(sep):
        for r in side_model.cells(rest):
            cell = [0] * len(side_model.vertices)
            for v, val in zip(sep, s):
                cell[pos[v]] = val
            for v, val in zip(rest, r):
                cell[pos[v]] = val
            out.append(index_of[tuple(cell)])
    return tuple(out)


def cone_basis(moves, model, apex=None):
    """Moves of a cone model from base moves, one copy per apex level.

    The matrix of a cone is block diagonal with one base block per apex
    level, so each base move reappears with the apex column held at every
    fixed level; degrees are preserved.
    """
    if apex is None:
        apex = model.complex.cone_apex()
        if apex is None:
            raise InputError("no vertex lies in every facet")
    elif not all(apex in f for f in model.complex.facets):
        raise InputError("apex %r does not lie in every facet" % (apex,))
    pos = {v: i for i, v in enumerate(model.vertices)}
    ai = pos[apex]
    rest = tuple(v for v in model.vertices if v != apex)
    base = model.sub(rest)
    index_of = {c: i for i, c in enumerate(model.cells())}
    out = []
    for level in range(model.d[ai]):
        for mv in moves:
            vec = [0] * len(index_of)
            for bcell, coef in zip(base.cells(), mv.vector):
                if not coef:
                    continue
                cell = list(bcell)
                cell.insert(ai, level)
                vec[index_of[tuple(cell)]] = coef
            out.append(tuple(vec))
    return MoveSet.of(out)


def cone_lift(model):
    """Markov basis of a cone model, lifted from a computed base basis.

    Returns (apex, base_model, moves); a full simplex has no relations.
    """
    from .markov import markov_basis

    apex = model.complex.cone_apex()
    if apex is None:
        raise InputError("no vertex lies in every facet")
    if model.complex.is_simplex:
        return apex, None, MoveSet.of([])
    rest = tuple(v for v in model.vertices if v != apex)
    base = model.sub(rest)
    base_moves = markov_basis(model_matrix(base)).basis
    return apex, base, cone_basis(base_moves, model, apex)
