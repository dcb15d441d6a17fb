"""Completion machinery on exponent vectors.

Elements are unit-coefficient binomials x^a - x^b stored as exponent
tuples, with x^b possibly absent (pure monomials, used by membership
tests for mixed monomial/binomial ideals).  Orders are graded reverse
lexicographic, encoded by a scan list of variable indices from cheapest
to most expensive.  Every element handled here is homogeneous in total
degree, so degree-truncated runs decide membership up to the truncation.

Monomials travel as packed integers, one byte per variable, so
divisibility is a single subtract-and-mask; exponents must stay below
127, which holds for any run that terminates in reasonable time.
"""

import heapq

import numpy as np

from .errors import BudgetExceeded, ResourceError

DEFAULT_PAIR_BUDGET = 5_000_000
_EXP_LIMIT = 127


def reference_scan(n):
    """Scan for the standard grevlex order x_0 > x_1 > ... > x_{n-1}."""
    return tuple(range(n - 1, -1, -1))


def saturation_scan(n, cheapest):
    return (cheapest,) + tuple(v for v in range(n - 1, -1, -1) if v != cheapest)


def _less(a, b, scan):
    """Strict comparison a < b under the grevlex order given by scan."""
    da = sum(a)
    db = sum(b)
    if da != db:
        return da < db
    for v in scan:
        d = a[v] - b[v]
        if d:
            return d > 0
    return False


def _pack(mono):
    if any(e >= _EXP_LIMIT for e in mono):
        raise ResourceError("exponent too large to pack")
    return int.from_bytes(bytes(mono), "little")


def _support_mask(pm, n):
    """Support of a packed monomial folded onto 64 bits."""
    mask = 0
    for v, byte in enumerate(pm.to_bytes(n, "little")):
        if byte:
            mask |= 1 << (v & 63)
    return mask


def _min_var(mono):
    return next(v for v, e in enumerate(mono) if e)


def _unpack(packed, n):
    return tuple(packed.to_bytes(n, "little"))


class GroebnerBasis:
    """Buchberger completion with the Gebauer-Moeller pair criteria.

    self.items records every element ever added; self.active holds the
    indices of the current basis, which is also the reducer set.  Each
    item is (packed_lead, packed_trail_or_None, lead, trail_or_None, deg).
    """

    def __init__(self, n, scan, degree_cap=None, budget=DEFAULT_PAIR_BUDGET):
        self.n = n
        self.scan = scan
        self.degree_cap = degree_cap
        self.budget = budget
        self.guard = int.from_bytes(b"\x80" * n, "little")
        self.items = []
        self.active = []
        self._red = None
        self.heap = []
        # lead exponent rows, degrees and binomial flags, indexed by item
        self._lead = np.zeros((64, n), dtype=np.int16)
        self._deg = np.zeros(64, dtype=np.int32)
        self._isbin = np.zeros(64, dtype=bool)
        # queued pairs: dict (i, j) -> (slot, packed_lcm, lcm_degree) with
        # parallel arrays of lcm rows and support bitmasks for fast pruning
        self._words = (n + 63) // 64
        self._pend = {}
        self._pmat = np.zeros((64, n), dtype=np.int16)
        self._pbits = np.zeros((64, self._words), dtype=np.uint64)
        self._palive = np.zeros(64, dtype=bool)
        self._pkey = [None] * 64
        self._plen = 0

    def _support_words(self, mat):
        """Support bitmasks of the rows of mat, one uint64 per 64 columns."""
        padded = np.zeros(mat.shape[:-1] + (8 * self._words,), dtype=np.uint8)
        bits = np.packbits(mat > 0, axis=-1, bitorder="little")
        padded[..., :bits.shape[-1]] = bits
        return padded.view(np.uint64)

    def _install_row(self, idx, plead, deg, isbin):
        cap = self._lead.shape[0]
        if idx >= cap:
            new = max(idx + 1, 2 * cap)
            for name in ("_lead", "_deg", "_isbin"):
                old = getattr(self, name)
                grown = np.zeros((new,) + old.shape[1:], dtype=old.dtype)
                grown[:cap] = old
                setattr(self, name, grown)
        row = np.frombuffer(plead.to_bytes(self.n, "little"), dtype=np.uint8)
        self._lead[idx] = row
        self._deg[idx] = deg
        self._isbin[idx] = isbin

    # -- reduction ----------------------------------------------------

    def _reducers(self):
        """Active reducers bucketed by the cheapest variable of the lead.

        A reducer can only apply to a monomial containing its whole lead
        support, so scanning the buckets of the monomial's support
        variables covers every applicable reducer.  Buckets are sorted by
        degree for early exit.
        """
        if self._red is None:
            red = [(self.items[i][4], self.items[i][0], self.items[i][1],
                    self.items[i][5], self.items[i][6])
                   for i in self.active]
            red.sort()
            buckets = {}
            for deg, pl, pt, rm, mv in red:
                buckets.setdefault(mv, []).append((deg, pl, pt, rm))
            self._red = buckets
        return self._red

    def _nf(self, pm, deg):
        """Packed normal form; None means reduced to zero.

        Reducer applicability needs the reducer's support inside the
        monomial's, so a folded support mask rejects most candidates
        before the exact packed divisibility test.
        """
        guard = self.guard
        n = self.n
        buckets = self._reducers()
        restart = True
        while restart:
            restart = False
            mask = 0
            sup = []
            for v, byte in enumerate(pm.to_bytes(n, "little")):
                if byte:
                    mask |= 1 << (v & 63)
                    sup.append(v)
            inv = ~mask
            base = pm | guard
            for v in sup:
                blist = buckets.get(v)
                if blist is None:
                    continue
                for dr, pl, pt, rm in blist:
                    if dr > deg:
                        break
                    if rm & inv:
                        continue
                    if (base - pl) & guard == guard:
                        if pt is None:
                            return None
                        pm = pm - pl + pt
                        restart = True
                        break
                if restart:
                    break
        return pm

    def reduce_monomial(self, mono):
        """Normal form of an exponent tuple; None means zero."""
        pm = self._nf(_pack(mono), sum(mono))
        return None if pm is None else _unpack(pm, self.n)

    def _make_item(self, pa, pb, deg):
        """Orient and package a reduced pair of packed monomials."""
        na = self._nf(pa, deg)
        nb = self._nf(pb, deg) if pb is not None else None
        if na is None and nb is None:
            return None
        if na is None:
            na, nb = nb, None
        if nb is not None:
            if na == nb:
                return None
            ta = _unpack(na, self.n)
            tb = _unpack(nb, self.n)
            if _less(ta, tb, self.scan):
                na, nb = nb, na
                ta, tb = tb, ta
            return (na, nb, ta, tb, deg, _support_mask(na, self.n),
                    _min_var(ta))
        ta = _unpack(na, self.n)
        return (na, None, ta, None, deg, _support_mask(na, self.n),
                _min_var(ta))

    def contains_binomial(self, a, b):
        return self._nf(_pack(a), sum(a)) == self._nf(_pack(b), sum(b))

    def contains_monomial(self, a):
        return self._nf(_pack(a), sum(a)) is None

    # -- pair management (Gebauer-Moeller update) ---------------------

    def _add(self, item):
        """Install a new element: prune pairs and reducers, queue pairs.

        Pair work is vectorized: with residuals r_g = max(lead_g - lead_h, 0)
        the candidate lcm is lead_h + r_g, so lcm divisibility between
        candidates is componentwise comparison of residuals, prefiltered by
        support bitmasks before the exact check.
        """
        idx = len(self.items)
        self.items.append(item)
        hdeg = item[4]
        hmono = item[1] is None
        self._install_row(idx, item[0], hdeg, not hmono)
        hrow = self._lead[idx]

        fresh = []
        if self.active:
            acts = np.fromiter(self.active, dtype=np.int64,
                               count=len(self.active))
            A = self._lead[acts]
            retire = (self._deg[acts] >= hdeg) & (A >= hrow).all(axis=1)
            if hmono:
                sel = self._isbin[acts]
                C, cidx, cdeg = A[sel], acts[sel], self._deg[acts][sel]
            else:
                C, cidx, cdeg = A, acts, self._deg[acts]
            k = C.shape[0]
            if k:
                R = C - hrow
                np.maximum(R, 0, out=R)
                rdeg = R.sum(axis=1, dtype=np.int32)
                bits = self._support_words(R)
                # candidate i is dominated when another candidate j has a
                # strictly smaller lcm dividing i's lcm; support masks
                # prefilter, survivors get the exact componentwise check
                compat = rdeg[None, :] < rdeg[:, None]
                for w in range(self._words):
                    bw = bits[:, w]
                    compat &= (bw[None, :] & ~bw[:, None]) == 0
                ii, jj = np.nonzero(compat)
                dominated = np.zeros(k, dtype=bool)
                if ii.size:
                    ok = (R[jj] <= R[ii]).all(axis=1)
                    dominated[ii[ok]] = True
                # among equal lcms keep one, or none when some pair has
                # coprime leads (its S-element reduces to zero on its own)
                coprime = rdeg == cdeg
                groups = {}
                for pos in np.nonzero(~dominated)[0].tolist():
                    groups.setdefault(R[pos].tobytes(), []).append(pos)
                for members in groups.values():
                    if any(coprime[pos] for pos in members):
                        continue
                    pos = members[0]
                    fresh.append((int(cidx[pos]), hrow + R[pos],
                                  hdeg + int(rdeg[pos])))
            self._chain_prune(hrow)
            if retire.any():
                self.active = [g for g, r in zip(self.active,
                                                 retire.tolist()) if not r]
        self.active.append(idx)
        self._red = None

        for g, lrow, ldeg in fresh:
            if self.degree_cap is not None and ldeg > self.degree_cap:
                continue
            if ldeg >= _EXP_LIMIT:
                raise ResourceError("pair degree too large to pack")
            self._queue_pair(g, idx, lrow, ldeg)

    def _chain_prune(self, hrow):
        """Drop queued pairs whose lcm the new lead divides, unless the new
        element's lcm with either side equals the pair's lcm."""
        m = self._plen
        if not m:
            return
        hb = self._support_words(hrow)
        strong = self._palive[:m].copy()
        for w in range(self._words):
            strong &= (hb[w] & ~self._pbits[:m, w]) == 0
        cand = np.nonzero(strong)[0]
        for slot in cand.tolist():
            row = self._pmat[slot]
            if not (row >= hrow).all():
                continue
            key = self._pkey[slot]
            i, j = key
            plcm = self._pend[key][1]
            li = np.maximum(self._lead[i], hrow).astype(np.uint8)
            if int.from_bytes(li.tobytes(), "little") == plcm:
                continue
            lj = np.maximum(self._lead[j], hrow).astype(np.uint8)
            if int.from_bytes(lj.tobytes(), "little") == plcm:
                continue
            self._retire_pair(key, slot)

    def _retire_pair(self, key, slot):
        self._palive[slot] = False
        self._pkey[slot] = None
        del self._pend[key]

    def _queue_pair(self, g, h, lrow, ldeg):
        slot = self._plen
        if slot >= self._pmat.shape[0]:
            slot = self._compact_pending()
        self._pmat[slot] = lrow
        self._pbits[slot] = self._support_words(lrow)
        self._palive[slot] = True
        self._pkey[slot] = (g, h)
        plcm = int.from_bytes(lrow.astype(np.uint8).tobytes(), "little")
        self._pend[(g, h)] = (slot, plcm, ldeg)
        self._plen = slot + 1
        heapq.heappush(self.heap, (ldeg, g, h))

    def _compact_pending(self):
        """Reclaim dead slots, or grow the arrays when mostly alive."""
        m = self._plen
        live = np.nonzero(self._palive[:m])[0]
        if 2 * live.size > m:
            new = 2 * self._pmat.shape[0]
            for name in ("_pmat", "_pbits", "_palive"):
                old = getattr(self, name)
                grown = np.zeros((new,) + old.shape[1:], dtype=old.dtype)
                grown[:m] = old[:m]
                setattr(self, name, grown)
            self._pkey.extend([None] * (new - len(self._pkey)))
            return m
        self._pmat[:live.size] = self._pmat[live]
        self._pbits[:live.size] = self._pbits[live]
        keys = [self._pkey[s] for s in live.tolist()]
        self._pkey = keys + [None] * (len(self._pkey) - len(keys))
        for slot, key in enumerate(keys):
            entry = self._pend[key]
            self._pend[key] = (slot, entry[1], entry[2])
        self._palive[:live.size] = True
        self._palive[live.size:] = False
        self._plen = live.size
        return live.size

    def seed(self, pairs):
        for a, b in pairs:
            if b is not None and sum(a) != sum(b):
                raise ResourceError("only degree-balanced binomials supported")
            item = self._make_item(_pack(a),
                                   None if b is None else _pack(b),
                                   sum(a))
            if item is not None:
                self._add(item)
        return self

    # -- completion ---------------------------------------------------

    def complete(self):
        """Process queued pairs until none survive the criteria.

        S-pair monomials come from packed arithmetic alone: lcm - lead +
        trail is borrow- and carry-free bytewise because the lcm dominates
        the lead and every exponent stays below the pack limit.
        """
        processed = 0
        while self.heap:
            ldeg, i, j = heapq.heappop(self.heap)
            entry = self._pend.pop((i, j), None)
            if entry is None:
                continue
            slot, plcm, _ = entry
            self._palive[slot] = False
            self._pkey[slot] = None
            processed += 1
            if processed > self.budget:
                raise BudgetExceeded(
                    "completion exceeded pair budget %d" % self.budget)
            pil, pit = self.items[i][0], self.items[i][1]
            pjl, pjt = self.items[j][0], self.items[j][1]
            if pit is None:
                pil, pit, pjl, pjt = pjl, pjt, pil, pit
            sa = plcm - pil + pit
            if pjt is None:
                item = self._make_item(sa, None, ldeg)
            else:
                item = self._make_item(sa, plcm - pjl + pjt, ldeg)
            if item is not None:
                self._add(item)
        return self

    # -- normalization ------------------------------------------------

    def basis_items(self):
        """Current basis as (lead, trail_or_None) tuples, sorted."""
        out = [(self.items[i][2], self.items[i][3]) for i in self.active]
        out.sort(key=lambda it: (sum(it[0]), it[0]))
        return out

    def tail_reduce(self):
        """Normalize to the reduced basis: minimal leads, reduced trails.

        After completion the active leads are pairwise indivisible, and a
        trail's rewrite chain stays strictly below its own lead in the
        order (same-degree divisibility would force equality), so one
        shared reducer set serves every element.
        """
        final = self.basis_items()
        out = []
        for lead, trail in final:
            if trail is None:
                out.append((lead, None))
                continue
            nt = self._nf(_pack(trail), sum(trail))
            out.append((lead, None if nt is None else _unpack(nt, self.n)))
        self.items = []
        self.active = []
        self._red = None
        self._pend = {}
        self._palive[:self._plen] = False
        self._pkey = [None] * len(self._pkey)
        self._plen = 0
        self.heap = []
        for lead, trail in out:
            idx = len(self.items)
            pl = _pack(lead)
            self.items.append((pl, None if trail is None else _pack(trail),
                               lead, trail, sum(lead),
                               _support_mask(pl, self.n), _min_var(lead)))
            self._install_row(idx, pl, sum(lead), trail is not None)
            self.active.append(idx)
        return self

    def canonical_vectors(self):
        """Lead-minus-trail vectors for binomial items, sorted."""
        vecs = []
        for i in self.active:
            lead, trail = self.items[i][2], self.items[i][3]
            if trail is not None:
                vecs.append(tuple(a - b for a, b in zip(lead, trail)))
        return sorted(vecs)


def vectors_to_pairs(vectors):
    out = []
    for vec in vectors:
        plus = tuple(x if x > 0 else 0 for x in vec)
        minus = tuple(-x if x < 0 else 0 for x in vec)
        out.append((plus, minus))
    return out


def groebner_of_vectors(vectors, n, scan=None, degree_cap=None,
                        budget=DEFAULT_PAIR_BUDGET):
    """Reduced Groebner basis of the pure-difference binomials of vectors."""
    if scan is None:
        scan = reference_scan(n)
    gb = GroebnerBasis(n, scan, degree_cap=degree_cap, budget=budget)
    gb.seed(vectors_to_pairs(vectors))
    gb.complete()
    gb.tail_reduce()
    return gb


def _divide_out(pair, v):
    lead, trail = pair
    c = lead[v] if trail is None else min(lead[v], trail[v])
    if not c:
        return pair
    lead = lead[:v] + (lead[v] - c,) + lead[v + 1:]
    if trail is not None:
        trail = trail[:v] + (trail[v] - c,) + trail[v + 1:]
    return (lead, trail)


def saturate_toric(vectors, n, budget=DEFAULT_PAIR_BUDGET):
    """Groebner basis of the saturation of the lattice spanned by vectors.

    Saturates variable by variable: under a grevlex order with x_v
    cheapest, dividing every element of a Groebner basis of a homogeneous
    ideal by its x_v content yields the saturation (I : x_v^inf), and the
    divided elements are again a Groebner basis of it under the same
    order.  One pass over all variables reaches the toric ideal of the
    saturated lattice; a final run under the reference order makes the
    output canonical.

    Two sound skips cut the pass short.  A variable absent from every
    generator needs no round.  And a variable dividing no lead of a
    computed Groebner basis is a nonzerodivisor (a reduced element f with
    x_v f in the ideal would have a divisible lead), so its round is a
    no-op; since colons commute, that conclusion survives later rounds.
    """
    pairs = vectors_to_pairs(vectors)
    remaining = set()
    for a, b in pairs:
        for v in range(n):
            if a[v] or (b is not None and b[v]):
                remaining.add(v)
    while remaining:
        v = min(remaining)
        gb = GroebnerBasis(n, saturation_scan(n, v), budget=budget)
        gb.seed(pairs)
        gb.complete()
        gb.tail_reduce()
        pairs = [_divide_out(p, v) for p in gb.basis_items()]
        remaining.discard(v)
        lead_vars = set()
        for lead, _ in pairs:
            for w in remaining:
                if lead[w]:
                    lead_vars.add(w)
        remaining &= lead_vars
    final = GroebnerBasis(n, reference_scan(n), budget=budget)
    final.seed(pairs)
    final.complete()
    final.tail_reduce()
    return final
