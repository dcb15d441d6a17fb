"""Primary decompositions under fiber products.

Components are monomial or binomial ideals attested as primary by the
caller; combining two decompositions multiplies them pairwise, either by
embedding generators directly (fine grading) or through the lift and
quadric construction (independent grading).  Pruning searches graded
pieces for irredundancy witnesses and reports three-valued verdicts.
All linear algebra is exact over the rationals.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, ResourceError

PIECE_CAP = 2_000_000


def _vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _vec_scale(v, c):
    return tuple(c * x for x in v)


@dataclass(frozen=True)
class Generator:
    """A monomial x^plus or a binomial x^plus - x^minus."""

    plus: tuple
    minus: object = None

    @staticmethod
    def of(plus, minus=None):
        plus = tuple(int(x) for x in plus)
        if any(x < 0 for x in plus):
            raise InputError("exponents must be nonnegative")
        if minus is not None:
            minus = tuple(int(x) for x in minus)
            if len(minus) != len(plus):
                raise InputError("terms live in different rings")
            if any(x < 0 for x in minus):
                raise InputError("exponents must be nonnegative")
            if minus == plus:
                raise InputError("zero binomial")
            if minus < plus:
                plus, minus = minus, plus
        return Generator(plus, minus)

    @property
    def monomial(self):
        return self.minus is None

    def degree(self):
        return sum(self.plus)

    def poly(self):
        if self.monomial:
            return {self.plus: 1}
        return {self.plus: 1, self.minus: -1}


def _as_generator(g, n):
    if not isinstance(g, Generator):
        if len(g) == 2 and all(isinstance(t, (list, tuple)) for t in g):
            g = Generator.of(g[0], g[1])
        else:
            g = Generator.of(g)
    if len(g.plus) != n:
        raise InputError("generator has %d exponents, ring has %d"
                         % (len(g.plus), n))
    return g


@dataclass(frozen=True)
class ComponentIdeal:
    """Monomial/binomial generators with per-variable degree columns.

    prime and geometrically_primary are caller attestations, propagated
    but never certified here.
    """

    n: int
    generators: tuple
    degrees: tuple
    prime: bool = False
    geometrically_primary: bool = False
    label: str = ""

    @staticmethod
    def of(n, generators, degrees, prime=False, geometrically_primary=False,
           label=""):
        degrees = tuple(tuple(d) for d in degrees)
        if len(degrees) != n:
            raise InputError("need one degree column per variable")
        if any(x < 0 for d in degrees for x in d):
            raise InputError("degree columns must be nonnegative")
        gens = []
        seen = set()
        for g in generators:
            g = _as_generator(g, n)
            if not g.monomial:
                if _multideg(g.plus, degrees) != _multideg(g.minus, degrees):
                    raise InputError("binomial %r is not homogeneous" % (g,))
            if g not in seen:
                seen.add(g)
                gens.append(g)
        return ComponentIdeal(n, tuple(gens), degrees, prime,
                              geometrically_primary, label)

    @property
    def monomial_only(self):
        return all(g.monomial for g in self.generators)

    def describe(self):
        return self.label or ("%d generators" % len(self.generators))


def _multideg(u, degrees):
    if not degrees:
        return ()
    total = tuple(0 for _ in degrees[0])
    for i, e in enumerate(u):
        if e:
            total = _vec_add(total, _vec_scale(degrees[i], e))
    return total


@dataclass(frozen=True)
class PairingScheme:
    """How two graded rings multiply into one: matched degree classes.

    pairs lists the product variables in ring order as (left, right)
    index pairs; both sides of a pair carry the same degree column.
    """

    left_degrees: tuple
    right_degrees: tuple
    pairs: tuple

    @staticmethod
    def of(left_degrees, right_degrees, pairs=None):
        left_degrees = tuple(tuple(d) for d in left_degrees)
        right_degrees = tuple(tuple(d) for d in right_degrees)
        if set(left_degrees) != set(right_degrees):
            raise InputError("the two sides use different degree classes")
        if pairs is None:
            pairs = []
            for j, dj in enumerate(left_degrees):
                for k, dk in enumerate(right_degrees):
                    if dj == dk:
                        pairs.append((j, k))
            pairs.sort(key=lambda p: (left_degrees[p[0]], p))
        pairs = tuple(tuple(p) for p in pairs)
        if len(set(pairs)) != len(pairs):
            raise InputError("duplicate variable pair")
        for j, k in pairs:
            if left_degrees[j] != right_degrees[k]:
                raise InputError("pair (%d, %d) mixes degree classes" % (j, k))
        return PairingScheme(left_degrees, right_degrees, pairs)

    @property
    def n(self):
        return len(self.pairs)

    @property
    def degrees(self):
        return tuple(self.left_degrees[j] for j, _ in self.pairs)

    @property
    def classes(self):
        out = []
        for d in self.left_degrees:
            if d not in out:
                out.append(d)
        return tuple(out)

    def left_of(self, cls):
        return tuple(j for j, d in enumerate(self.left_degrees) if d == cls)

    def right_of(self, cls):
        return tuple(k for k, d in enumerate(self.right_degrees) if d == cls)

    @property
    def fine(self):
        return all(len(self.left_of(c)) == 1 and len(self.right_of(c)) == 1
                   for c in self.classes)

    def index(self, j, k):
        return self.pairs.index((j, k))


@dataclass(frozen=True)
class Decomposition:
    """Component list with provenance; sides kept for witness pruning."""

    components: tuple
    provenance: tuple
    left: tuple = ()
    right: tuple = ()
    scheme: object = None

    @staticmethod
    def of(components, provenance=None, left=(), right=(), scheme=None):
        components = tuple(components)
        if provenance is None:
            provenance = tuple((i + 1,) for i in range(len(components)))
        return Decomposition(components, tuple(provenance), tuple(left),
                             tuple(right), scheme)


def _embed_fine(gen, var_to_z, n):
    def remap(u):
        out = [0] * n
        for i, e in enumerate(u):
            out[var_to_z[i]] = e
        return tuple(out)
    if gen.monomial:
        return Generator.of(remap(gen.plus))
    return Generator.of(remap(gen.plus), remap(gen.minus))


def _slots(u):
    out = []
    for i, e in enumerate(u):
        out.extend([i] * e)
    return out


def _lift_generator(gen, scheme, side):
    """All lifts of a one-sided generator into the product ring.

    Binomials pair their plus and minus factors within each degree class
    and give every matched pair one far variable; monomials assign far
    variables freely.
    """
    if side == "left":
        deg_of = scheme.left_degrees
        far_of = scheme.right_of
        z = scheme.index
    elif side == "right":
        deg_of = scheme.right_degrees
        far_of = scheme.left_of
        z = lambda j, k: scheme.index(k, j)
    else:
        raise InputError("side must be 'left' or 'right'")

    def far_choices(slots):
        pools = [far_of(deg_of[s]) for s in slots]
        return itertools.product(*pools)

    out = []
    plus_slots = _slots(gen.plus)
    if gen.monomial:
        for farv in far_choices(plus_slots):
            vec = [0] * scheme.n
            for s, k in zip(plus_slots, farv):
                vec[z(s, k)] += 1
            out.append(Generator.of(tuple(vec)))
        return out
    minus_slots = _slots(gen.minus)
    by_class = {}
    for s in plus_slots:
        by_class.setdefault(deg_of[s], ([], []))[0].append(s)
    for s in minus_slots:
        by_class.setdefault(deg_of[s], ([], []))[1].append(s)
    matchings = []
    for cls in sorted(by_class):
        ps, ms = by_class[cls]
        if len(ps) != len(ms):
            raise InputError("binomial is not homogeneous")
        matchings.append([list(zip(ps, perm))
                          for perm in itertools.permutations(ms)])
    for combo in itertools.product(*matchings):
        matched = [pair for part in combo for pair in part]
        for farv in far_choices([p for p, _ in matched]):
            pvec = [0] * scheme.n
            mvec = [0] * scheme.n
            for (p, m), k in zip(matched, farv):
                pvec[z(p, k)] += 1
                mvec[z(m, k)] += 1
            if tuple(pvec) != tuple(mvec):
                out.append(Generator.of(tuple(pvec), tuple(mvec)))
    return out


def _quad_generators(scheme):
    out = []
    for cls in scheme.classes:
        for j1, j2 in itertools.combinations(scheme.left_of(cls), 2):
            for k1, k2 in itertools.combinations(scheme.right_of(cls), 2):
                pvec = [0] * scheme.n
                mvec = [0] * scheme.n
                pvec[scheme.index(j1, k1)] += 1
                pvec[scheme.index(j2, k2)] += 1
                mvec[scheme.index(j1, k2)] += 1
                mvec[scheme.index(j2, k1)] += 1
                out.append(Generator.of(tuple(pvec), tuple(mvec)))
    return out


def product_component(ci, cj, scheme):
    """One pairwise product: embedded sum or quadrics plus all lifts."""
    if ci.degrees != scheme.left_degrees:
        raise InputError("left component grading disagrees with the scheme")
    if cj.degrees != scheme.right_degrees:
        raise InputError("right component grading disagrees with the scheme")
    gens = []
    if scheme.fine:
        lmap = [scheme.index(j, scheme.right_of(scheme.left_degrees[j])[0])
                for j in range(len(scheme.left_degrees))]
        rmap = [scheme.index(scheme.left_of(scheme.right_degrees[k])[0], k)
                for k in range(len(scheme.right_degrees))]
        for g in ci.generators:
            gens.append(_embed_fine(g, lmap, scheme.n))
        for g in cj.generators:
            gens.append(_embed_fine(g, rmap, scheme.n))
    else:
        gens.extend(_quad_generators(scheme))
        for g in ci.generators:
            gens.extend(_lift_generator(g, scheme, "left"))
        for g in cj.generators:
            gens.extend(_lift_generator(g, scheme, "right"))
    label = ""
    if ci.label or cj.label:
        label = "%s*%s" % (ci.label or "?", cj.label or "?")
    return ComponentIdeal.of(scheme.n, gens, scheme.degrees,
                             prime=ci.prime and cj.prime,
                             geometrically_primary=ci.geometrically_primary
                             and cj.geometrically_primary,
                             label=label)


def combine(decomp_i, decomp_j, scheme):
    """All pairwise products of two decompositions, with provenance."""
    comps = []
    prov = []
    for i, ci in enumerate(decomp_i.components):
        for j, cj in enumerate(decomp_j.components):
            comps.append(product_component(ci, cj, scheme))
            prov.append((i + 1, j + 1))
    return Decomposition(tuple(comps), tuple(prov),
                         left=decomp_i.components,
                         right=decomp_j.components, scheme=scheme)


def _indicator_classes(degrees):
    """The distinct degree columns if they form a 0/1 unit basis."""
    classes = []
    for d in degrees:
        if d not in classes:
            classes.append(d)
    units = set()
    for c in classes:
        if sum(c) != 1 or any(x not in (0, 1) for x in c):
            return None
        units.add(c.index(1))
    if len(units) != len(classes):
        return None
    return classes


def enumerate_multidegree(degrees, a, cap=PIECE_CAP):
    """All exponent vectors of the given multidegree, in sorted order."""
    a = tuple(a)
    classes = _indicator_classes(degrees)
    if classes is not None:
        units = {c.index(1) for c in classes}
        if any(x for i, x in enumerate(a) if i not in units):
            return []
        per_class = []
        total = 1
        for cls in classes:
            want = a[cls.index(1)]
            members = [i for i, d in enumerate(degrees) if d == cls]
            block = list(itertools.combinations_with_replacement(members,
                                                                 want))
            total *= len(block)
            if total > cap:
                raise ResourceError("piece enumeration beyond %d" % cap)
            per_class.append(block)
        out = []
        for combo in itertools.product(*per_class):
            vec = [0] * len(degrees)
            for part in combo:
                for i in part:
                    vec[i] += 1
            out.append(tuple(vec))
        return sorted(out)

    out = []

    def walk(i, remaining, acc):
        if len(out) > cap:
            raise ResourceError("piece enumeration beyond %d" % cap)
        if all(x == 0 for x in remaining):
            vec = [0] * len(degrees)
            for j, e in acc:
                vec[j] = e
            out.append(tuple(vec))
            return
        if i >= len(degrees):
            return
        d = degrees[i]
        top = 0
        if any(d):
            top = min((r // x for r, x in zip(remaining, d) if x), default=0)
        for e in range(top, -1, -1):
            nxt = _vec_sub(remaining, _vec_scale(d, e))
            if all(x >= 0 for x in nxt):
                walk(i + 1, nxt, acc + [(i, e)] if e else acc)

    walk(0, a, [])
    return sorted(out)


class SpanBasis:
    """Row space in reduced echelon form over the rationals, sparse rows."""

    def __init__(self):
        self.rows = {}

    @property
    def dim(self):
        return len(self.rows)

    def reduce(self, vec):
        vec = {k: Fraction(v) for k, v in vec.items() if v}
        while vec:
            piv = min(vec)
            if piv not in self.rows:
                return piv, vec
            row = self.rows[piv]
            c = vec.pop(piv)
            for k, v in row.items():
                vec[k] = vec.get(k, Fraction(0)) - c * v
                if not vec[k]:
                    del vec[k]
        return None, {}

    def add(self, vec):
        piv, res = self.reduce(vec)
        if piv is None:
            return False
        c = res.pop(piv)
        res = {k: v / c for k, v in res.items()}
        for row in self.rows.values():
            if piv in row:
                f = row.pop(piv)
                for k, v in res.items():
                    row[k] = row.get(k, Fraction(0)) - f * v
                    if not row[k]:
                        del row[k]
        self.rows[piv] = res
        return True

    def contains(self, vec):
        piv, _ = self.reduce(vec)
        return piv is None

    def full_rows(self):
        out = []
        for piv, row in self.rows.items():
            full = dict(row)
            full[piv] = Fraction(1)
            out.append(full)
        return out

    def canonical(self):
        return tuple(sorted((p, tuple(sorted(r.items())))
                            for p, r in self.rows.items()))


@dataclass(frozen=True)
class PieceBasis:
    """The degree-a slice of an ideal inside its ambient ring."""

    a: tuple
    span: SpanBasis
    monomial_count: int

    @property
    def dim(self):
        return self.span.dim

    @property
    def full(self):
        return self.dim == self.monomial_count

    def contains_poly(self, poly):
        return self.span.contains(poly)


def graded_piece(component, a, cap=PIECE_CAP):
    """Span of all multiples of the generators in one multidegree."""
    a = tuple(a)
    monos = enumerate_multidegree(component.degrees, a, cap)
    span = SpanBasis()
    for g in component.generators:
        gdeg = _multideg(g.plus, component.degrees)
        if len(gdeg) != len(a):
            raise InputError("degree has wrong dimension")
        rest = _vec_sub(a, gdeg)
        if any(x < 0 for x in rest):
            continue
        for m in enumerate_multidegree(component.degrees, rest, cap):
            poly = {_vec_add(m, t): c for t, c in g.poly().items()}
            span.add(poly)
    return PieceBasis(a, span, len(monos))


def intersect_spans(urows, vrows):
    """Basis rows of the intersection of two row spaces."""
    basis = SpanBasis()
    for r in urows:
        vec = {}
        for k, v in r.items():
            vec[(0, k)] = v
            vec[(1, k)] = v
        basis.add(vec)
    for r in vrows:
        basis.add({(0, k): v for k, v in r.items()})
    out = []
    for row in basis.full_rows():
        if all(k[0] == 1 for k in row):
            out.append({k[1]: v for k, v in row.items()})
    return out


def intersection_piece(components, a, cap=PIECE_CAP):
    """Degree-a slice of the intersection of several ideals."""
    if not components:
        raise InputError("need at least one component")
    pieces = [graded_piece(c, a, cap) for c in components]
    current = pieces[0].span.full_rows()
    for piece in pieces[1:]:
        current = intersect_spans(current, piece.span.full_rows())
    span = SpanBasis()
    for r in current:
        span.add(r)
    return PieceBasis(tuple(a), span, pieces[0].monomial_count)


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _monomial_member(mono, component):
    return any(g.monomial and _divides(g.plus, mono)
               for g in component.generators)


def _exact_containment(small, big):
    """True only when containment is certain without any bound."""
    if not big.monomial_only:
        return set(small.generators) <= set(big.generators)
    for g in small.generators:
        if not _monomial_member(g.plus, big):
            return False
        if not g.monomial and not _monomial_member(g.minus, big):
            return False
    return True


def minimalize(component):
    """Drop monomial generators divisible by other monomial generators."""
    gens = list(component.generators)
    keep = []
    for i, g in enumerate(gens):
        if g.monomial and any(h.monomial and j != i
                              and _divides(h.plus, g.plus)
                              for j, h in enumerate(gens)):
            continue
        keep.append(g)
    return ComponentIdeal.of(component.n, keep, component.degrees,
                             component.prime,
                             component.geometrically_primary, component.label)


def _na_degrees(degrees, bound):
    """Semigroup degrees with coarse degree up to the bound, by level."""
    classes = []
    for d in degrees:
        if d not in classes:
            classes.append(d)
    levels = []
    for k in range(1, bound + 1):
        level = set()
        for combo in itertools.combinations_with_replacement(classes, k):
            total = combo[0]
            for c in combo[1:]:
                total = _vec_add(total, c)
            level.add(total)
        levels.append(sorted(level))
    return levels


@dataclass(frozen=True)
class PruneCertificate:
    bound: int
    removed: tuple
    witnessed: int
    unknown: tuple
    never_full: tuple

    @property
    def all_witnessed(self):
        return not self.unknown

    def summary(self):
        lines = ["prune certificate at degree bound %d" % self.bound,
                 "removed: %d component(s)" % len(self.removed),
                 "witnessed-irredundant pairs: %d" % self.witnessed,
                 "unknown-to-bound pairs: %d" % len(self.unknown)]
        for idx, reason in self.removed:
            lines.append("  removed component %d: %s" % (idx + 1, reason))
        return "\n".join(lines)


class _PieceTable:
    """Memoized graded pieces of one list of side components."""

    def __init__(self, components, cap):
        self.components = components
        self.cap = cap
        self.cache = {}

    def piece(self, i, a):
        key = (i, a)
        if key not in self.cache:
            self.cache[key] = graded_piece(self.components[i], a, self.cap)
        return self.cache[key]

    def not_full(self, i, a):
        return not self.piece(i, a).full

    def non_containment(self, i1, i2, a):
        p1 = self.piece(i1, a)
        p2 = self.piece(i2, a)
        if p1.dim > p2.dim:
            return True
        if p1.dim == p2.dim:
            return p1.span.canonical() != p2.span.canonical()
        for row in p1.span.full_rows():
            if not p2.span.contains(row):
                return True
        return False


def prune(decomp, degree_bound, cap=PIECE_CAP):
    """Minimalize, drop certain redundancy, witness the surviving pairs.

    A component that contains another is redundant.  Surviving ordered
    pairs get witnessed-irredundant only when some degree within the
    bound separates them per the side tables; the rest stay
    unknown-to-bound.
    """
    comps = [minimalize(c) for c in decomp.components]
    prov = list(decomp.provenance)
    removed = []
    alive = list(range(len(comps)))
    changed = True
    while changed:
        changed = False
        for q in list(alive):
            for p in alive:
                if p == q:
                    continue
                if _exact_containment(comps[p], comps[q]):
                    alive.remove(q)
                    removed.append((q, "contains component %d" % (p + 1)))
                    changed = True
                    break
            if changed:
                break

    witnessed = 0
    unknown = []
    never_full = ()
    if decomp.left and decomp.right and decomp.scheme is not None \
            and len(alive) > 1:
        left = _PieceTable(decomp.left, cap)
        right = _PieceTable(decomp.right, cap)
        levels = _na_degrees(decomp.scheme.degrees, degree_bound)
        pending = set()
        for q1 in alive:
            for q2 in alive:
                if q1 != q2:
                    pending.add((q1, q2))
        nl, nr = len(decomp.left), len(decomp.right)
        left_seen_full = [False] * nl
        right_seen_full = [False] * nr
        for level in levels:
            if not pending:
                break
            for a in level:
                if not pending:
                    break
                right_nf = [right.not_full(j, a) for j in range(nr)]
                left_nf = [left.not_full(i, a) for i in range(nl)]
                for j in range(nr):
                    if not right_nf[j]:
                        right_seen_full[j] = True
                for i in range(nl):
                    if not left_nf[i]:
                        left_seen_full[i] = True
                lnc = {}
                rnc = {}
                for (q1, q2) in list(pending):
                    i1, j1 = prov[q1]
                    i2, j2 = prov[q2]
                    hit = False
                    if i1 != i2 and right_nf[j2 - 1]:
                        key = (i1 - 1, i2 - 1)
                        if key not in lnc:
                            lnc[key] = left.non_containment(key[0], key[1], a)
                        hit = lnc[key]
                    if not hit and j1 != j2 and left_nf[i2 - 1]:
                        key = (j1 - 1, j2 - 1)
                        if key not in rnc:
                            rnc[key] = right.non_containment(key[0], key[1],
                                                             a)
                        hit = rnc[key]
                    if hit:
                        pending.remove((q1, q2))
                        witnessed += 1
        unknown = [(tuple(prov[q1]), tuple(prov[q2]))
                   for q1, q2 in sorted(pending)]
        never_full = tuple(
            [("left", i + 1, not left_seen_full[i]) for i in range(nl)]
            + [("right", j + 1, not right_seen_full[j]) for j in range(nr)])
    out = Decomposition(tuple(comps[i] for i in alive),
                        tuple(prov[i] for i in alive),
                        left=decomp.left, right=decomp.right,
                        scheme=decomp.scheme)
    cert = PruneCertificate(degree_bound, tuple(removed), witnessed,
                            tuple(unknown), never_full)
    return out, cert


def transfer_check(component, other_degrees, bound, cap=PIECE_CAP):
    """Degrees of a second grading where the component is the full ring.

    An empty result keeps the irredundance hypothesis alive when a later
    product uses the other grading.
    """
    reindexed = ComponentIdeal.of(component.n, component.generators,
                                  tuple(other_degrees), component.prime,
                                  component.geometrically_primary,
                                  component.label)
    hits = []
    for level in _na_degrees(reindexed.degrees, bound):
        for a in level:
            if graded_piece(reindexed, a, cap).full:
                hits.append(a)
    return tuple(hits)
