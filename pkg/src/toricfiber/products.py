"""Products of graded configurations: Quad, Lift, and Glue moves.

Two configurations over a shared coarse grading pair up class by class:
class i contributes one product variable z for every combination of a left
member j and a right member k, with column the concatenation of the two
member columns.  Moves of the product then fall into three families:
exchanges inside a class (Quad), one-sided moves with freely assigned
far-side indices (Lift), and pastings of compatible left and right moves
that shift weight between classes (Glue).
"""

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

from . import exact
from .configs import Grading, GradedVariables, Move, MoveSet, VectorConfiguration
from .errors import InputError, ResourceError
from .fibers import (DEFAULT_FIBER_CAP, FiberGraph, ProjectedGraph,
                     enumerate_fiber, points_by_rhs)

DEFAULT_MULTIPLIER_CAP = 20_000
DEFAULT_PAIRING_CAP = 100_000


def _solve_grading_map(config, grading):
    """Rational map sending every column of class i to the degree a^i."""
    cols = [tuple(c) for c in config.columns]
    classes = config.variables.class_of
    rows = []
    for l in range(grading.dim):
        rhs = [grading.columns[classes[v]][l] for v in range(config.n)]
        sol = exact.solve_rational(cols, rhs)
        if sol is None:
            raise InputError("columns are not homogeneous for the grading")
        rows.append(tuple(sol))
    return tuple(rows)


def _ensure_graded(config, grading):
    if config.grading is not None:
        if config.grading != grading:
            raise InputError("side carries a different grading")
        return config
    return config.with_grading(grading, _solve_grading_map(config, grading))


@dataclass(frozen=True)
class ProductConfiguration:
    """A left and right configuration paired over a common grading.

    The product configuration has one variable per (class, left member,
    right member) triple; codim is the rank of the grading kernel.
    """

    left: VectorConfiguration
    right: VectorConfiguration
    grading: Grading
    product: VectorConfiguration
    codim: int

    @property
    def variables(self):
        return self.product.variables

    def sizes(self, cls):
        return self.left.variables.sizes[cls], self.right.variables.sizes[cls]

    def index(self, cls, j, k):
        t = self.right.variables.sizes[cls]
        return self.variables.index(cls, j * t + k)

    def label(self, z):
        cls, member = self.variables.label(z)
        t = self.right.variables.sizes[cls]
        return cls, member // t, member % t

    def project_left(self, vector):
        """Sum out the right index; moves land in the left kernel."""
        out = [0] * self.left.n
        for z, e in enumerate(vector):
            if e:
                cls, j, _ = self.label(z)
                out[self.left.variables.index(cls, j)] += e
        return tuple(out)

    def project_right(self, vector):
        out = [0] * self.right.n
        for z, e in enumerate(vector):
            if e:
                cls, _, k = self.label(z)
                out[self.right.variables.index(cls, k)] += e
        return tuple(out)

    def gamma(self, vector):
        return self.product.class_margin(vector)

    @cached_property
    def augmented(self):
        """Equivalent-kernel form with the class degree spliced in."""
        d1 = self.left.dim
        e = self.grading.dim
        d2 = self.right.dim
        cols = []
        for z in range(self.product.n):
            cls, j, k = self.label(z)
            cols.append(tuple(self.left.columns[self.left.variables.index(cls, j)])
                        + tuple(self.grading.columns[cls])
                        + tuple(self.right.columns[self.right.variables.index(cls, k)]))
        pi = tuple(tuple([0] * d1 + [1 if m == l else 0 for m in range(e)]
                         + [0] * d2) for l in range(e))
        return VectorConfiguration(self.variables, tuple(cols), self.grading, pi)


def product_config(left, right, grading):
    """Pair two graded configurations into their product configuration.

    Both sides must be homogeneous: some linear map must send every column
    of class i to the shared degree a^i.  Sides without an attached grading
    get one solved for; sides with a different grading are rejected.
    """
    if left.variables.r != right.variables.r:
        raise InputError("sides have different class counts")
    if grading.r != left.variables.r:
        raise InputError("grading has one column per class")
    left = _ensure_graded(left, grading)
    right = _ensure_graded(right, grading)
    sizes = []
    names = []
    cols = []
    for cls in range(grading.r):
        s = left.variables.sizes[cls]
        t = right.variables.sizes[cls]
        sizes.append(s * t)
        for j in range(s):
            for k in range(t):
                names.append("z%d_%d_%d" % (cls + 1, j + 1, k + 1))
                cols.append(tuple(left.columns[left.variables.index(cls, j)])
                            + tuple(right.columns[right.variables.index(cls, k)]))
    variables = GradedVariables(sizes=tuple(sizes), names=tuple(names))
    d2 = right.dim
    pi = tuple(tuple(row) + (0,) * d2 for row in left.pi)
    product = VectorConfiguration(variables, tuple(cols), grading, pi)
    return ProductConfiguration(left, right, grading, product, grading.codim)


@dataclass(frozen=True)
class TildeProduct:
    """The product with one indicator row per class appended to each side.

    The appended rows make the grading columns linearly independent, so the
    extended product always has codim zero; dropping them recovers the
    original sides.
    """

    tilde_left: VectorConfiguration
    tilde_right: VectorConfiguration
    tilde_grading: Grading
    product: ProductConfiguration


def _append_indicators(config, grading):
    classes = config.variables.class_of
    r = config.variables.r
    cols = tuple(tuple(col) + tuple(1 if i == classes[v] else 0 for i in range(r))
                 for v, col in enumerate(config.columns))
    d = config.dim
    pi = tuple(tuple(row) + (0,) * r for row in config.pi)
    pi += tuple(tuple([0] * d + [1 if m == l else 0 for m in range(r)])
                for l in range(r))
    return VectorConfiguration(config.variables, cols, grading, pi)


def tilde_extend(product):
    """Extend both sides and the grading by class indicator rows."""
    r = product.grading.r
    tg = Grading(tuple(tuple(a) + tuple(1 if i == cls else 0 for i in range(r))
                       for cls, a in enumerate(product.grading.columns)))
    tl = _append_indicators(product.left, tg)
    tr = _append_indicators(product.right, tg)
    return TildeProduct(tl, tr, tg, product_config(tl, tr, tg))


def quad_moves(product):
    """All within-class exchange quadrics of the product."""
    nz = product.product.n
    out = []
    for cls in range(product.grading.r):
        s, t = product.sizes(cls)
        for j1, j2 in itertools.combinations(range(s), 2):
            for k1, k2 in itertools.combinations(range(t), 2):
                vec = [0] * nz
                vec[product.index(cls, j1, k1)] += 1
                vec[product.index(cls, j2, k2)] += 1
                vec[product.index(cls, j1, k2)] -= 1
                vec[product.index(cls, j2, k1)] -= 1
                out.append(vec)
    return MoveSet.of(out)


def _class_rows(variables, part):
    """Member indices per class, with multiplicity, for a monomial."""
    rows = {}
    for v, e in enumerate(part):
        if e:
            cls, member = variables.label(v)
            rows.setdefault(cls, []).extend([member] * e)
    return rows


def _distinct_pairings(avals, bvals, cap):
    """Distinct one-to-one pairings between two equal-size multisets.

    Bijections inducing the same multiset of pairs count once.  The number
    of recursion leaves is capped; factorial blowups surface as a resource
    failure rather than a hang.
    """
    avals = sorted(avals)
    out = set()
    leaves = 0

    def rec(i, remaining, acc):
        nonlocal leaves
        if i == len(avals):
            leaves += 1
            if leaves > cap:
                raise ResourceError("row pairing count exceeds cap %d" % cap)
            out.add(tuple(sorted(acc)))
            return
        a = avals[i]
        seen = set()
        for t, b in enumerate(remaining):
            if b in seen:
                continue
            seen.add(b)
            rec(i + 1, remaining[:t] + remaining[t + 1:], acc + [(a, b)])

    rec(0, sorted(bvals), [])
    return sorted(out)


def _combined_pairings(plus_rows, minus_rows, cap):
    """All ways to pair the two row sets class by class."""
    classes = sorted(plus_rows)
    per_class = [_distinct_pairings(plus_rows[c], minus_rows[c], cap)
                 for c in classes]
    for combo in itertools.product(*per_class):
        yield [(c, a, b) for c, pairing in zip(classes, combo)
               for a, b in pairing]


def lift_moves(moves, product, side="left", cap=DEFAULT_PAIRING_CAP):
    """Lift one-sided moves into the product.

    Each row of a move's tableau gets a free far-side index, the same index
    on the paired positive and negative rows.  Rows pair within a class;
    every class-respecting pairing contributes, and the results are
    deduplicated.  A move whose two monomials use different class counts
    has no row pairing at all and is rejected.
    """
    if side not in ("left", "right"):
        raise InputError("side must be left or right")
    cfg = product.left if side == "left" else product.right
    far = product.right.variables.sizes if side == "left" \
        else product.left.variables.sizes
    nz = product.product.n
    out = []
    for m in moves:
        plus_margin = cfg.class_margin(m.plus)
        minus_margin = cfg.class_margin(m.minus)
        if plus_margin != minus_margin:
            raise InputError(
                "cannot lift %r: monomial class counts %r and %r differ"
                % (m.vector, plus_margin, minus_margin))
        plus_rows = _class_rows(cfg.variables, m.plus)
        minus_rows = _class_rows(cfg.variables, m.minus)
        for pairing in _combined_pairings(plus_rows, minus_rows, cap):
            for assignment in itertools.product(
                    *(range(far[cls]) for cls, _, _ in pairing)):
                vec = [0] * nz
                for (cls, a, b), w in zip(pairing, assignment):
                    if side == "left":
                        vec[product.index(cls, a, w)] += 1
                        vec[product.index(cls, b, w)] -= 1
                    else:
                        vec[product.index(cls, w, a)] += 1
                        vec[product.index(cls, w, b)] -= 1
                out.append(vec)
    return MoveSet.of(out)


def codim0_basis(F, G, product):
    """Lift both sides and add the quadrics; needs an independent grading."""
    if product.codim != 0:
        raise InputError("grading kernel has rank %d, not zero" % product.codim)
    lifted = lift_moves(F, product, side="left")
    lifted = lifted.union(lift_moves(G, product, side="right"))
    return lifted.union(quad_moves(product))


def _margin_difference(plus, minus):
    return tuple(p - m for p, m in zip(plus, minus))


def _joint_factorization(f_plus, f_minus, g_plus, g_minus):
    """Split class margins into shared binomial part and coprime residues.

    Returns (u1, u2, v1, v2) with f margins v1 + u1 | v1 + u2 and g margins
    v2 + u1 | v2 + u2, v1 and v2 supported on disjoint classes; None when
    the margin differences disagree.
    """
    diff = _margin_difference(f_plus, f_minus)
    if diff != _margin_difference(g_plus, g_minus):
        return None
    u1 = tuple(x if x > 0 else 0 for x in diff)
    v1 = tuple(p - u for p, u in zip(f_plus, u1))
    v2 = tuple(p - u for p, u in zip(g_plus, u1))
    common = tuple(min(a, b) for a, b in zip(v1, v2))
    u1 = tuple(u + c for u, c in zip(u1, common))
    u2 = tuple(u - d for u, d in zip(u1, diff))
    v1 = tuple(a - c for a, c in zip(v1, common))
    v2 = tuple(b - c for b, c in zip(v2, common))
    return u1, u2, v1, v2


def _profile_monomials(variables, profile):
    """All exponent vectors whose class counts match the profile."""
    per_class = []
    for cls, count in enumerate(profile):
        members = range(variables.sizes[cls])
        per_class.append(list(
            itertools.combinations_with_replacement(members, count)))
    for combo in itertools.product(*per_class):
        vec = [0] * variables.n
        for cls, chosen in enumerate(combo):
            for member in chosen:
                vec[variables.index(cls, member)] += 1
        yield tuple(vec)


def _count_profile_monomials(variables, profile):
    total = 1
    for cls, count in enumerate(profile):
        s = variables.sizes[cls]
        total *= math.comb(s + count - 1, count)
    return total


def _pastes(product, xplus, xminus, yplus, yminus, cap):
    """Class-respecting pastings of an aligned left/right tableau pair."""
    lvars = product.left.variables
    rvars = product.right.variables
    nz = product.product.n
    prow = _class_rows(lvars, xplus)
    qrow = _class_rows(rvars, yplus)
    mrow = _class_rows(lvars, xminus)
    nrow = _class_rows(rvars, yminus)
    for plus_pairing in _combined_pairings(prow, qrow, cap):
        base = [0] * nz
        for cls, j, k in plus_pairing:
            base[product.index(cls, j, k)] += 1
        for minus_pairing in _combined_pairings(mrow, nrow, cap):
            vec = list(base)
            for cls, j, k in minus_pairing:
                vec[product.index(cls, j, k)] -= 1
            yield vec


def glue_pair(f, g, product, cap=None):
    """All gluings of one left move with one right move.

    The class margins of the two moves must tell the same story: after
    pulling the shared monomial factor out of both margin binomials, and
    moving any common residue back in so the residues are coprime, the
    binomial parts must agree, possibly after negating g.  Each side is
    then padded by every monomial with the other side's residue profile,
    and every class-respecting row pairing of the padded tableaux is
    emitted.
    """
    lvars = product.left.variables
    rvars = product.right.variables
    fp = product.left.class_margin(f.plus)
    fm = product.left.class_margin(f.minus)
    pairing_cap = cap if cap is not None else DEFAULT_PAIRING_CAP
    out = []
    for g2 in (g, -g):
        gp = product.right.class_margin(g2.plus)
        gm = product.right.class_margin(g2.minus)
        fact = _joint_factorization(fp, fm, gp, gm)
        if fact is None:
            continue
        _, _, v1, v2 = fact
        if cap is not None:
            if _count_profile_monomials(lvars, v2) > cap:
                raise ResourceError("left multiplier set exceeds cap %d" % cap)
            if _count_profile_monomials(rvars, v1) > cap:
                raise ResourceError("right multiplier set exceeds cap %d" % cap)
        for xv in _profile_monomials(lvars, v2):
            xplus = tuple(a + b for a, b in zip(f.plus, xv))
            xminus = tuple(a + b for a, b in zip(f.minus, xv))
            for yv in _profile_monomials(rvars, v1):
                yplus = tuple(a + b for a, b in zip(g2.plus, yv))
                yminus = tuple(a + b for a, b in zip(g2.minus, yv))
                out.extend(_pastes(product, xplus, xminus, yplus, yminus,
                                   pairing_cap))
    return MoveSet.of(out)


def _glue_with_sources(F, G, product, cap):
    """Glued moves with the first (f, g) pair producing each of them."""
    sources = {}
    collected = []
    for fi, f in enumerate(F):
        for gi, g in enumerate(G):
            for m in glue_pair(f, g, product, cap=cap):
                if m.vector not in sources:
                    sources[m.vector] = (fi, gi)
                    collected.append(m)
    return MoveSet.of(collected), sources


def glue_sets(F, G, product, cap=DEFAULT_MULTIPLIER_CAP):
    """Union of all pairwise gluings, deduplicated and ordered."""
    moves, _ = _glue_with_sources(F, G, product, cap)
    return moves


@dataclass(frozen=True)
class SlowVaryingVerdict:
    """Do all class margins of the moves stay within one kernel step?

    The exact check tests membership of every margin in {0, h, -h} for the
    primitive kernel generator h.  max_norm < 2 * h_norm is a sufficient
    shortcut: a margin is a multiple of h no longer than the move itself.
    """

    slow_varying: bool
    h: tuple
    witness: tuple
    max_norm: int
    h_norm: int

    @property
    def shortcut(self):
        return self.max_norm < 2 * self.h_norm

    def summary(self):
        lines = ["slow-varying: %s" % ("yes" if self.slow_varying else "no"),
                 "kernel step h = %r (1-norm %d)" % (self.h, self.h_norm),
                 "max move 1-norm = %d, shortcut %s"
                 % (self.max_norm,
                    "applies" if self.shortcut else "does not apply")]
        if self.witness is not None:
            side, idx, image = self.witness
            lines.append("witness: %s move %d has margin %r" % (side, idx + 1, image))
        return "\n".join(lines)


def slow_varying_check(F, G, product):
    """Exact slow-varying verdict for a rank-one grading kernel."""
    grading = product.grading
    if grading.codim != 1:
        raise InputError("slow-varying needs a grading kernel of rank one, "
                         "got rank %d" % grading.codim)
    h = grading.kernel_generator.vector
    zero = (0,) * grading.r
    allowed = {zero, h, tuple(-x for x in h)}
    witness = None
    max_norm = 0
    for side, cfg, mset in (("left", product.left, F),
                            ("right", product.right, G)):
        for idx, m in enumerate(mset):
            max_norm = max(max_norm, m.norm1)
            image = cfg.class_margin(m.vector)
            if image not in allowed and witness is None:
                witness = (side, idx, image)
    h_norm = sum(abs(x) for x in h)
    return SlowVaryingVerdict(witness is None, h, witness, max_norm, h_norm)


@dataclass(frozen=True)
class CPPVerdict:
    """Bounded check that projected side fibers always agree.

    For every pair of side images with equal grading degree up to the
    bound, the intersection of the two projected fiber graphs must be
    connected.  Each instance also cross-checks that the projection of the
    product fiber graph under the glued moves equals that intersection,
    vertex set and edge set separately.
    """

    holds: bool
    bound: int
    pairs_checked: int
    witness: tuple
    projection_consistent: bool
    projection_witness: tuple
    glue_count: int

    def summary(self):
        lines = ["compatible projections: %s (degree bound %d, %d pairs)"
                 % ("yes" if self.holds else "no", self.bound,
                    self.pairs_checked),
                 "glued moves used: %d" % self.glue_count,
                 "projection identity: %s"
                 % ("consistent" if self.projection_consistent else
                    "violated at %r" % (self.projection_witness,))]
        if self.witness is not None:
            b, c, components = self.witness
            lines.append("witness: images %r | %r split into %d pieces"
                         % (b, c, len(components)))
        return "\n".join(lines)


def _grading_image(grading, profile):
    return tuple(sum(grading.columns[i][l] * profile[i]
                     for i in range(grading.r))
                 for l in range(grading.dim))


def cpp_check(F, G, product, degree_bound=None, cap=DEFAULT_FIBER_CAP,
              glue_cap=DEFAULT_MULTIPLIER_CAP):
    """Check compatible projections for all image pairs up to a bound.

    The default bound is the largest move degree plus two.  Images pair up
    exactly when their grading degrees agree, which forces equal total
    degrees, so enumeration goes degree by degree.
    """
    if degree_bound is None:
        degree_bound = max([m.degree for m in F] + [m.degree for m in G],
                           default=0) + 2
    glue, _ = _glue_with_sources(F, G, product, glue_cap)
    holds = True
    witness = None
    consistent = True
    pwitness = None
    pairs = 0
    for degree in range(degree_bound + 1):
        bgroups = sorted(points_by_rhs(product.left, degree).items())
        cgroups = sorted(points_by_rhs(product.right, degree).items())
        ckeyed = {}
        for c, cpts in cgroups:
            key = _grading_image(product.grading,
                                 product.right.class_margin(cpts[0]))
            ckeyed.setdefault(key, []).append((c, cpts))
        cproj = {}
        for b, bpts in bgroups:
            key = _grading_image(product.grading,
                                 product.left.class_margin(bpts[0]))
            if key not in ckeyed:
                continue
            bgraph = ProjectedGraph.of(FiberGraph.build(bpts, F, b),
                                       product.left.class_margin)
            for c, cpts in ckeyed[key]:
                if c not in cproj:
                    cproj[c] = ProjectedGraph.of(FiberGraph.build(cpts, G, c),
                                                 product.right.class_margin)
                meet = bgraph.intersect(cproj[c])
                pairs += 1
                if not meet.is_connected() and witness is None:
                    holds = False
                    witness = (b, c, meet.components())
                zfiber = enumerate_fiber(product.product, tuple(b) + tuple(c),
                                         cap=cap)
                zproj = ProjectedGraph.of(zfiber.graph(glue),
                                          product.product.class_margin)
                if (zproj.vertices, zproj.edges) != (meet.vertices, meet.edges):
                    if pwitness is None:
                        consistent = False
                        pwitness = (b, c)
    return CPPVerdict(holds, degree_bound, pairs, witness, consistent,
                      pwitness, len(glue))


@dataclass(frozen=True)
class AssemblyReport:
    """Which hypothesis, if any, justifies the Markov claim."""

    claim: str
    codim: int
    bound: int
    slow: SlowVaryingVerdict
    cpp: CPPVerdict
    note: str

    def summary(self):
        lines = ["codim %d assembly: %s" % (self.codim, self.claim)]
        if self.bound is not None:
            lines.append("checked degree bound: %d" % self.bound)
        if self.note:
            lines.append(self.note)
        return "\n".join(lines)


@dataclass(frozen=True)
class AssemblyResult:
    """Assembled move set with per-move origins and a validity report."""

    moves: MoveSet
    provenance: tuple
    report: AssemblyReport

    def provenance_of(self, move):
        vec = move.vector if isinstance(move, Move) else tuple(move)
        for m, label in zip(self.moves, self.provenance):
            if m.vector == vec:
                return label
        return None


def assemble(H, F, G, product, degree_bound=None, cap=DEFAULT_FIBER_CAP,
             glue_cap=DEFAULT_MULTIPLIER_CAP):
    """Join a codim-zero basis with the glued side moves.

    H should generate the extended product; the glued moves supply the
    missing kernel directions.  The report records whether slow variation
    (exact, codim one) or compatible projections (up to a degree bound)
    back the Markov claim; a failed check downgrades the report and leaves
    the move set as built.
    """
    glue, sources = _glue_with_sources(F, G, product, glue_cap)
    moves = H.union(glue)
    quadset = set(quad_moves(product).vectors())
    hset = {m.vector for m in H}
    labels = []
    for m in moves:
        if m.vector in hset:
            to_left = product.project_left(m.vector)
            to_right = product.project_right(m.vector)
            if m.vector in quadset or not (any(to_left) or any(to_right)):
                labels.append("quad")
            elif not any(to_right):
                labels.append("lift-left")
            elif not any(to_left):
                labels.append("lift-right")
            else:
                labels.append("tilde")
        else:
            fi, gi = sources[m.vector]
            labels.append("glue(%d,%d)" % (fi + 1, gi + 1))
    slow = None
    cpp = None
    claim = "unverified"
    note = ""
    try:
        if product.codim == 1:
            slow = slow_varying_check(F, G, product)
            if slow.slow_varying:
                claim = "slow-varying-exact"
        if claim == "unverified":
            cpp = cpp_check(F, G, product, degree_bound=degree_bound,
                            cap=cap, glue_cap=glue_cap)
            if cpp.holds:
                claim = "cpp-verified-to-bound"
            elif cpp.witness is not None:
                note = "projections disagree at %r | %r" % cpp.witness[:2]
    except ResourceError as exc:
        note = "verification stopped at a resource cap: %s" % exc
    bound = cpp.bound if cpp is not None else None
    report = AssemblyReport(claim, product.codim, bound, slow, cpp, note)
    return AssemblyResult(moves, tuple(labels), report)
