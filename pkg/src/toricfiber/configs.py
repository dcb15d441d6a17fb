"""Graded variable sets, vector configurations, and integer moves.

A configuration is a list of integer column vectors, one per variable.  The
variables are partitioned into classes; all variables in class i share the
same degree a^i under the coarse grading.  A rational certificate omega with
omega . column = 1 for every column guarantees all fibers are finite and
makes the coarse degree of a monomial equal to its total degree.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import exact
from .errors import InputError


@dataclass(frozen=True)
class GradedVariables:
    """Variables grouped into classes; class i has sizes[i] members.

    Variables are ordered class by class, so flat index <-> (class, member)
    is a fixed bijection.  Optional names are display labels only.
    """

    sizes: tuple
    names: tuple = None

    def __post_init__(self):
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise InputError("class sizes must be positive")
        if self.names is not None and len(self.names) != self.n:
            raise InputError("need one name per variable")

    @cached_property
    def n(self):
        return sum(self.sizes)

    @cached_property
    def r(self):
        return len(self.sizes)

    @cached_property
    def offsets(self):
        out = []
        acc = 0
        for s in self.sizes:
            out.append(acc)
            acc += s
        return tuple(out)

    @cached_property
    def class_of(self):
        out = []
        for i, s in enumerate(self.sizes):
            out.extend([i] * s)
        return tuple(out)

    def index(self, cls, member):
        if not (0 <= cls < self.r and 0 <= member < self.sizes[cls]):
            raise InputError("variable label out of range")
        return self.offsets[cls] + member

    def label(self, v):
        cls = self.class_of[v]
        return cls, v - self.offsets[cls]

    def name(self, v):
        if self.names is not None:
            return self.names[v]
        cls, member = self.label(v)
        return "x%d_%d" % (cls + 1, member + 1)

    @staticmethod
    def single_classes(n, names=None):
        """Fine grouping: every variable its own class."""
        return GradedVariables(sizes=(1,) * n, names=names)


def _normalize_sign(vec):
    for x in vec:
        if x > 0:
            return tuple(vec)
        if x < 0:
            return tuple(-y for y in vec)
    return tuple(vec)


@dataclass(frozen=True, order=True)
class Move:
    """An integer vector u with Bu = 0, split as u = plus - minus.

    Canonically signed: the first nonzero entry is positive.
    """

    vector: tuple

    @staticmethod
    def canonical(vec):
        return Move(_normalize_sign(vec))

    @staticmethod
    def from_parts(plus, minus):
        return Move(tuple(p - m for p, m in zip(plus, minus)))

    @cached_property
    def plus(self):
        return tuple(x if x > 0 else 0 for x in self.vector)

    @cached_property
    def minus(self):
        return tuple(-x if x < 0 else 0 for x in self.vector)

    @cached_property
    def degree(self):
        return sum(self.plus)

    @cached_property
    def norm1(self):
        return sum(abs(x) for x in self.vector)

    def support(self):
        return tuple(i for i, x in enumerate(self.vector) if x)

    def is_zero(self):
        return not any(self.vector)

    def __neg__(self):
        return Move(tuple(-x for x in self.vector))

    def tableau(self, variables=None):
        """Render as two stacked row lists, one row per exponent unit."""
        def rows(part):
            out = []
            for v, e in enumerate(part):
                name = variables.name(v) if variables else str(v)
                out.extend([name] * e)
            return out
        return rows(self.plus), rows(self.minus)


def _move_key(m):
    return (m.degree, m.vector)


@dataclass(frozen=True)
class MoveSet:
    """Deduplicated, canonically ordered set of nonzero moves."""

    moves: tuple

    @staticmethod
    def of(items):
        seen = set()
        out = []
        for item in items:
            vec = item.vector if isinstance(item, Move) else tuple(item)
            m = Move.canonical(vec)
            if m.is_zero() or m.vector in seen:
                continue
            seen.add(m.vector)
            out.append(m)
        out.sort(key=_move_key)
        return MoveSet(tuple(out))

    def __iter__(self):
        return iter(self.moves)

    def __len__(self):
        return len(self.moves)

    def __contains__(self, move):
        vec = move.vector if isinstance(move, Move) else _normalize_sign(move)
        return any(m.vector == vec for m in self.moves)

    def union(self, other):
        return MoveSet.of(list(self.moves) + list(other.moves))

    def vectors(self):
        return [m.vector for m in self.moves]

    def degree_histogram(self):
        hist = {}
        for m in self.moves:
            hist[m.degree] = hist.get(m.degree, 0) + 1
        return dict(sorted(hist.items()))

    def max_degree(self):
        return max((m.degree for m in self.moves), default=0)


@dataclass(frozen=True)
class Grading:
    """The coarse grading: a matrix whose columns are the class degrees a^i.

    omega is a rational row vector with omega . a^i = 1 for every class, so
    coarse degrees agree with total degrees.  codim is the rank of the
    integer kernel; when codim == 1 the kernel has a primitive generator h.
    """

    columns: tuple

    def __post_init__(self):
        if not self.columns:
            raise InputError("grading needs at least one class")
        d = len(self.columns[0])
        if any(len(c) != d for c in self.columns):
            raise InputError("grading columns must share a dimension")

    @cached_property
    def r(self):
        return len(self.columns)

    @cached_property
    def dim(self):
        return len(self.columns[0])

    @cached_property
    def rows(self):
        return tuple(tuple(c[i] for c in self.columns) for i in range(self.dim))

    @cached_property
    def omega(self):
        sol = exact.solve_rational([tuple(c) for c in self.columns],
                                   [1] * self.r)
        if sol is None:
            raise InputError("no rational omega with omega . a^i = 1 exists")
        return sol

    @cached_property
    def codim(self):
        return self.r - exact.mat_rank(self.rows)

    @cached_property
    def kernel(self):
        return [Move.canonical(v) for v in exact.kernel_lattice(self.rows, self.r)]

    @cached_property
    def kernel_generator(self):
        """Primitive generator h of the kernel when codim == 1."""
        if self.codim != 1:
            return None
        return self.kernel[0]

    def is_linearly_independent(self):
        return self.codim == 0


@dataclass(frozen=True)
class VectorConfiguration:
    """Integer columns, one per variable, with class structure and grading.

    pi, when present, is the linear map sending every column of class i to
    the grading column a^i; construction checks this.
    """

    variables: GradedVariables
    columns: tuple
    grading: Grading = None
    pi: tuple = None

    def __post_init__(self):
        if len(self.columns) != self.variables.n:
            raise InputError("need one column per variable")
        d = len(self.columns[0]) if self.columns else 0
        if any(len(c) != d for c in self.columns):
            raise InputError("columns must share a dimension")
        if (self.grading is None) != (self.pi is None):
            raise InputError("grading and pi come together")
        if self.grading is not None:
            if len(self.grading.columns) != self.variables.r:
                raise InputError("one grading column per class")
            if not check_homogeneous(self):
                raise InputError("columns are not homogeneous under pi")

    @cached_property
    def n(self):
        return len(self.columns)

    @cached_property
    def dim(self):
        return len(self.columns[0]) if self.columns else 0

    @cached_property
    def rows(self):
        return tuple(tuple(c[i] for c in self.columns) for i in range(self.dim))

    @cached_property
    def omega(self):
        sol = exact.solve_rational([tuple(c) for c in self.columns],
                                   [1] * self.n)
        if sol is None:
            raise InputError("no rational omega certificate; fibers may be infinite")
        return sol

    @cached_property
    def rank(self):
        return exact.mat_rank(self.rows)

    def codim(self):
        return self.n - self.rank

    def image(self, point):
        """Column combination B u for a nonnegative exponent vector u."""
        b = [0] * self.dim
        for v, e in enumerate(point):
            if e:
                col = self.columns[v]
                for i in range(self.dim):
                    b[i] += e * col[i]
        return tuple(b)

    def class_margin(self, vector):
        """Sum the entries of an exponent vector or move within each class."""
        out = [0] * self.variables.r
        for v, e in enumerate(vector):
            if e:
                out[self.variables.class_of[v]] += e
        return tuple(out)

    def coarse_degree(self, rhs):
        val = sum(Fraction(w) * x for w, x in zip(self.omega, rhs))
        return val

    def with_grading(self, grading, pi):
        return VectorConfiguration(self.variables, self.columns, grading, pi)


def _apply_map(matrix, vec):
    return tuple(sum(row[i] * vec[i] for i in range(len(vec))) for row in matrix)


def check_homogeneous(config):
    """Does pi send every column of class i to the grading column a^i?"""
    if config.grading is None or config.pi is None:
        return False
    for v, col in enumerate(config.columns):
        cls = config.variables.class_of[v]
        if _apply_map(config.pi, col) != tuple(config.grading.columns[cls]):
            return False
    return True


def kernel_basis(config):
    """Lattice basis of the integer kernel, as a canonical MoveSet."""
    cols = config.columns if isinstance(config, VectorConfiguration) else config
    rows = tuple(tuple(c[i] for c in cols) for i in range(len(cols[0])))
    vecs = exact.kernel_lattice(rows, len(cols))
    return MoveSet.of(vecs)


def matrix_configuration(rows, names=None, sizes=None):
    """Configuration from a raw integer matrix (columns = variables)."""
    if not rows:
        raise InputError("empty matrix")
    ncols = len(rows[0])
    cols = tuple(tuple(r[j] for r in rows) for j in range(ncols))
    if sizes is None:
        variables = GradedVariables.single_classes(ncols, names)
    else:
        variables = GradedVariables(tuple(sizes), names)
    return VectorConfiguration(variables, cols)
