"""Quadratic presentations of the moduli algebras a_P, degree-bounded
rewriting and Hilbert counts.

Generators a^{(k)i}_j are numbered handle-major then row-major:
index = (k-1)*N^2 + (i-1)*N + (j-1).  Monomials are tuples of generator
indices and are ordered degree-lexicographically.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .pattern import CrossingType, GluingPattern, Kind, classify, parse_pattern
from .scalars import ONE, ZERO, LaurentPoly, RatFunc, _pdivexact, _pgcd, parse_ratfunc
from .tensor import (
    O_BLOCKS, V, VD, BraidWord, braid_word_eval, braiding, crossing_operator, r_matrix,
)

SCHEMA_VERSION = 1

Mono = tuple[int, ...]
Vec = dict  # Mono -> RatFunc


class CompletionError(RuntimeError):
    """An overlap failed to resolve, or a normal form was requested beyond
    the completed degree."""

    def __init__(self, message: str, overlap: Mono | None = None, difference: Vec | None = None):
        super().__init__(message)
        self.overlap = overlap
        self.difference = difference


@dataclass(frozen=True)
class Generator:
    handle: int
    row: int
    col: int

    def index(self, N: int) -> int:
        return (self.handle - 1) * N * N + (self.row - 1) * N + (self.col - 1)

    @classmethod
    def from_index(cls, g: int, N: int) -> "Generator":
        h, r = divmod(g, N * N)
        i, j = divmod(r, N)
        return cls(h + 1, i + 1, j + 1)

    def latex(self) -> str:
        return f"a^{{({self.handle}){self.row}}}_{{{self.col}}}"


@dataclass
class Relation:
    """sum lhs = sum rhs, homogeneous of degree 2."""
    lhs: dict
    rhs: dict

    def vector(self) -> Vec:
        out = dict(self.lhs)
        for m, c in self.rhs.items():
            v = out.get(m, ZERO) - c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return out

    def degree(self) -> set[int]:
        return {len(m) for m in itertools.chain(self.lhs, self.rhs)}

    def remap(self, f: Callable[[int], int]) -> "Relation":
        return Relation({tuple(map(f, m)): c for m, c in self.lhs.items()},
                        {tuple(map(f, m)): c for m, c in self.rhs.items()})

    @classmethod
    def from_pivot_row(cls, row: Vec, key=None) -> "Relation":
        lead = max(row, key=key or _deglex)
        return cls({lead: row[lead]}, {m: -c for m, c in row.items() if m != lead})


# -- exact linear algebra over Q(q) on sparse vectors

def row_reduce(rows: Iterable[Vec], key: Callable | None = None) -> list[Vec]:
    """Reduced row echelon form; each row is normalized to coefficient 1 on its
    key-largest monomial, which appears in no other row.  Rows come back
    sorted by decreasing pivot."""
    if key is None:
        key = _deglex
    pivots: dict = {}
    for r in rows:
        r = {m: c for m, c in r.items() if c}
        for m in [m for m in r if m in pivots]:
            c = r.get(m)
            if not c:
                continue
            for m2, c2 in pivots[m].items():
                v = r.get(m2, ZERO) - c * c2
                if v:
                    r[m2] = v
                else:
                    r.pop(m2, None)
        if not r:
            continue
        lead = max(r, key=key)
        inv = ONE / r[lead]
        if inv != ONE:
            r = {m: c * inv for m, c in r.items()}
        for p, row in pivots.items():
            c = row.get(lead)
            if c:
                for m2, c2 in r.items():
                    v = row.get(m2, ZERO) - c * c2
                    if v:
                        row[m2] = v
                    else:
                        row.pop(m2, None)
        pivots[lead] = r
    return [pivots[p] for p in sorted(pivots, key=key, reverse=True)]


def _deglex(m: Mono):
    return (len(m), m)


def _descending_first(m: Mono):
    """Pivot order for stored relations: strictly descending words g_b g_a
    (b > a) first.  These are the commutator leads at q = 1, so the reduced
    coefficients stay regular there."""
    return (len(m), all(x > y for x, y in zip(m, m[1:])), m)


def reduce_relations(vecs: Iterable[Vec]) -> list["Relation"]:
    return [Relation.from_pivot_row(r, _descending_first) for r in row_reduce(vecs, _descending_first)]


def same_span(a: Iterable[Vec], b: Iterable[Vec]) -> bool:
    return _canon(row_reduce(a)) == _canon(row_reduce(b))


def _canon(rows: list[Vec]):
    return [sorted(r.items()) for r in rows]


# -- matrix-form relations (route independent of the braid words)

def _gen(h: int, i: int, j: int, N: int) -> int:
    return (h * N + i) * N + j


class _MatrixExpr:
    """Entries (x, y) -> {generator word: coefficient}, x, y in [N]^2."""

    def __init__(self, N: int, ent: dict):
        self.N = N
        self.ent = ent

    @classmethod
    def scalar(cls, op) -> "_MatrixExpr":
        return cls(op.N, {(o, i): {(): c} for (o, i), c in op.entries.items()})

    @classmethod
    def leg1(cls, h: int, N: int) -> "_MatrixExpr":
        # A_1[(e, f), (g, f)] = a^e_g
        return cls(N, {((e, f), (g, f)): {(_gen(h, e, g, N),): ONE}
                       for e in range(N) for f in range(N) for g in range(N)})

    @classmethod
    def leg2(cls, h: int, N: int) -> "_MatrixExpr":
        # A_2[(k, l), (k, n)] = a^l_n
        return cls(N, {((k, l), (k, n)): {(_gen(h, l, n, N),): ONE}
                       for k in range(N) for l in range(N) for n in range(N)})

    def __mul__(self, other: "_MatrixExpr") -> "_MatrixExpr":
        rows: dict = {}
        for (y, z), v in other.ent.items():
            rows.setdefault(y, []).append((z, v))
        out: dict = {}
        for (x, y), u in self.ent.items():
            for z, v in rows.get(y, ()):
                tgt = out.setdefault((x, z), {})
                for w1, c1 in u.items():
                    for w2, c2 in v.items():
                        w = w1 + w2
                        tgt[w] = tgt.get(w, ZERO) + c1 * c2
        return _MatrixExpr(self.N, out)

    def minus(self, other: "_MatrixExpr") -> list[Vec]:
        keys = set(self.ent) | set(other.ent)
        out = []
        for k in sorted(keys):
            v: dict = {}
            for w, c in self.ent.get(k, {}).items():
                v[w] = v.get(w, ZERO) + c
            for w, c in other.ent.get(k, {}).items():
                v[w] = v.get(w, ZERO) - c
            v = {w: c for w, c in v.items() if c}
            if v:
                out.append(v)
        return out


def _r21(N: int):
    R = r_matrix(N)
    from .tensor import TensorOp
    return TensorOp(N, R.strands_in, R.strands_out,
                    {((o[1], o[0]), (i[1], i[0])): c for (o, i), c in R.entries.items()})


def re_matrix_equations(N: int, h: int = 0) -> list[Vec]:
    """The N^4 entries of R21 A1 R12 A2 - A2 R21 A1 R12 for the generators of handle h (0-based)."""
    R = _MatrixExpr.scalar(r_matrix(N))
    R21 = _MatrixExpr.scalar(_r21(N))
    A1, A2 = _MatrixExpr.leg1(h, N), _MatrixExpr.leg2(h, N)
    return (R21 * A1 * R * A2).minus(A2 * R21 * A1 * R)


def re_relations(N: int) -> list[Relation]:
    """Reflection equation R21 A1 R12 A2 = A2 R21 A1 R12, reduced to an independent set."""
    if N < 1:
        raise ValueError("N must be positive")
    return reduce_relations(re_matrix_equations(N))


def elliptic_matrix_equations(N: int, ha: int = 0, hd: int = 1) -> list[Vec]:
    """Entries of A1 R D2 - R D2 R21 A1 R."""
    R = _MatrixExpr.scalar(r_matrix(N))
    R21 = _MatrixExpr.scalar(_r21(N))
    A1, D2 = _MatrixExpr.leg1(ha, N), _MatrixExpr.leg2(hd, N)
    return (A1 * R * D2).minus(R * D2 * R21 * A1 * R)


# -- relations from the braided construction

def coend_relations(N: int) -> list[Relation]:
    """Relations of O_A obtained from the coend: the kernel of the product
    O ⊗ O -> O_{V⊗V}, i.e. the preimage under the braided multiplication of
    the dinaturality relations for sigma_{V,V}."""
    if N < 1:
        raise ValueError("N must be positive")
    # multiplication (V*, V, V*, V) -> (V*, V*, V, V)
    Minv = braid_word_eval(BraidWord(((1, 1), (2, 1)), 4).inverse(), (VD, VD, V, V), N)
    phi = braiding(V, V, N).entries
    cols = Minv.columns()
    rng = range(N)
    vecs = []
    for c, a, b, d in itertools.product(rng, repeat=4):
        k: dict = {}
        for b2, d2 in itertools.product(rng, repeat=2):
            x = phi.get(((a, c), (b2, d2)))
            if x:
                key = (d2, b2, b, d)
                k[key] = k.get(key, ZERO) + x
            x = phi.get(((b2, d2), (b, d)))
            if x:
                key = (c, a, b2, d2)
                k[key] = k.get(key, ZERO) - x
        vec: dict = {}
        for key, x in k.items():
            for o, y in cols.get(key, ()):
                m = (_gen(0, o[0], o[1], N), _gen(0, o[2], o[3], N))
                vec[m] = vec.get(m, ZERO) + y * x
        vec = {m: v for m, v in vec.items() if v}
        if vec:
            vecs.append(vec)
    return reduce_relations(vecs)


def cross_relations(t: CrossingType, N: int) -> list[Relation]:
    """Cross relations between handles i < j of type t, in two-handle local
    numbering (handle i -> generators 0..N^2-1, handle j -> N^2..2N^2-1).

    For x in O^(j), y in O^(i): x·y = m(C^{-1}(x ⊗ y)), multiplied in
    O^(i) ⊗ O^(j) order, where C = crossing_operator(t)."""
    Cinv = crossing_operator(t.opposite(), N)
    cols = Cinv.columns()
    rels = []
    for a, b, c, d in itertools.product(range(N), repeat=4):
        x, y = _gen(1, a, b, N), _gen(0, c, d, N)
        rhs = {}
        for o, co in cols.get((a, b, c, d), ()):
            m = (_gen(0, o[0], o[1], N), _gen(1, o[2], o[3], N))
            rhs[m] = rhs.get(m, ZERO) + co
        rels.append(Relation({(x, y): ONE}, {m: v for m, v in rhs.items() if v}))
    return rels


# -- presentations

@dataclass
class QuadraticPresentation:
    N: int
    n: int
    relations: list
    pattern: tuple = ()
    blocks: list = field(default_factory=list)  # (label, handles, first, count)
    _rewrite: object = field(default=None, repr=False, compare=False)

    @property
    def ngens(self) -> int:
        return self.n * self.N * self.N

    @property
    def generators(self) -> list[Generator]:
        return [Generator.from_index(g, self.N) for g in range(self.ngens)]

    def cross_types(self) -> dict:
        return {tuple(hs): lab for lab, hs, _, _ in self.blocks if len(hs) == 2}

    def vectors(self) -> list[Vec]:
        return [r.vector() for r in self.relations]

    # -- serialization
    def to_json_obj(self) -> dict:
        rels = []
        for r in self.relations:
            terms = [{"coeff": str(c), "monomial": list(m), "side": "lhs"} for m, c in sorted(r.lhs.items())]
            terms += [{"coeff": str(c), "monomial": list(m), "side": "rhs"} for m, c in sorted(r.rhs.items())]
            rels.append({"terms": terms})
        return {
            "schema_version": SCHEMA_VERSION,
            "N": self.N,
            "n": self.n,
            "pattern": list(self.pattern),
            "generators": [{"handle": g.handle, "row": g.row, "col": g.col} for g in self.generators],
            "blocks": [{"type": lab, "handles": list(hs), "first": f, "count": k} for lab, hs, f, k in self.blocks],
            "relations": rels,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json_obj(cls, d: dict) -> "QuadraticPresentation":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        N, n = int(d["N"]), int(d["n"])
        gens = d["generators"]
        for k, g in enumerate(gens):
            if Generator(g["handle"], g["row"], g["col"]).index(N) != k:
                raise ValueError(f"generator {k} out of canonical order")
        rels = []
        for r in d["relations"]:
            lhs, rhs = {}, {}
            for t in r["terms"]:
                m = tuple(int(x) for x in t["monomial"])
                if len(m) != 2 or not all(0 <= x < len(gens) for x in m):
                    raise ValueError(f"bad monomial {t['monomial']}")
                side = lhs if t["side"] == "lhs" else rhs
                side[m] = parse_ratfunc(t["coeff"])
            rels.append(Relation(lhs, rhs))
        blocks = [(b["type"], tuple(b["handles"]), b["first"], b["count"]) for b in d.get("blocks", [])]
        return cls(N, n, rels, tuple(d.get("pattern", ())), blocks)

    @classmethod
    def from_json(cls, s: str) -> "QuadraticPresentation":
        return cls.from_json_obj(json.loads(s))

    def to_latex(self) -> str:
        G = self.generators
        lines = [r"\begin{align*}"]

        def side(d):
            if not d:
                return "0"
            parts = []
            for m, c in sorted(d.items()):
                word = " ".join(G[g].latex() for g in m)
                cs = str(c)
                if cs == "1":
                    parts.append(word)
                elif cs == "-1":
                    parts.append("-" + word)
                else:
                    parts.append(rf"\left({cs}\right) {word}")
            return " + ".join(parts).replace("+ -", "- ")
        for r in self.relations:
            lines.append(f"{side(r.lhs)} &= {side(r.rhs)} \\\\")
        lines.append(r"\end{align*}")
        return "\n".join(lines) + "\n"


def _offset(rels: Sequence[Relation], mapping: Callable[[int], int]) -> list[Relation]:
    return [r.remap(mapping) for r in rels]


def build_presentation(P: GluingPattern, N: int) -> QuadraticPresentation:
    if N < 1:
        raise ValueError("N must be positive")
    n = P.n
    N2 = N * N
    rels: list[Relation] = []
    blocks = []
    re = coend_relations(N)
    for h in range(n):
        start = len(rels)
        rels += _offset(re, lambda g, h=h: g + h * N2)
        blocks.append(("RE", (h + 1,), start, len(rels) - start))
    cache: dict = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            t = classify(P, i, j)
            if t not in cache:
                cache[t] = cross_relations(t, N)
            start = len(rels)

            def f(g, i=i, j=j):
                return g + (i - 1) * N2 if g < N2 else g - N2 + (j - 1) * N2
            rels += _offset(cache[t], f)
            blocks.append((str(t), (i, j), start, len(rels) - start))
    return QuadraticPresentation(N, n, rels, P.targets, blocks)


def counit_eps(g: Generator) -> RatFunc:
    return ONE if g.row == g.col else ZERO


def counit_of(vec: Vec, N: int) -> RatFunc:
    tot = ZERO
    for m, c in vec.items():
        if all(counit_eps(Generator.from_index(g, N)) == ONE for g in m):
            tot = tot + c
    return tot


# -- specialization of q

def _clear_denominators(vec: Vec) -> dict:
    """Rescale vec so that all entries are Laurent polynomials without a
    common polynomial factor."""
    den = ()
    for c in vec.values():
        d = c.den._c
        den = d if not den else _polymul(den, _pdivexact(d, _pgcd(den, d)))
    scale = RatFunc(LaurentPoly._raw(0, den)) if den else ONE
    nums = {m: (c * scale).num for m, c in vec.items()}
    g = ()
    for p in nums.values():
        g = _pgcd(g, p._c) if g else _pgcd(p._c, ())
        if len(g) == 1:
            return nums
    return {m: LaurentPoly._raw(p.low, _pdivexact(p._c, g)) for m, p in nums.items()}


def _polymul(a, b):
    return (LaurentPoly._raw(0, a) * LaurentPoly._raw(0, b))._c


def specialize_vector(vec: Vec, q0) -> dict:
    """Limit at q = q0 of the line spanned by vec (nonzero result)."""
    q0 = Fraction(q0)
    nums = _clear_denominators(vec)
    out = {m: p(q0) for m, p in nums.items()}
    out = {m: v for m, v in out.items() if v}
    if not out:  # cannot happen after removing the common factor unless q0 = 0
        raise ZeroDivisionError("vector vanishes identically at the specialization point")
    return out


def specialize(pres: QuadraticPresentation, q0) -> QuadraticPresentation:
    rels = []
    for r in pres.relations:
        v = specialize_vector(r.vector(), q0)
        rels.append({m: RatFunc(c) for m, c in v.items()})
    red = reduce_relations(rels)
    if len(red) != len(pres.relations):
        raise ValueError(f"relations become dependent at q = {q0}")
    return QuadraticPresentation(pres.N, pres.n, red, pres.pattern, [])


def is_commutative_at_one(pres: QuadraticPresentation) -> bool:
    """At q = 1 the relations span exactly the commutators of the generators."""
    G = pres.ngens
    rows = []
    for r in pres.relations:
        v = specialize_vector(r.vector(), 1)
        for (a, b), c in v.items():
            if v.get((b, a), 0) != (-c if a != b else 0):
                return False
        rows.append({m: RatFunc(c) for m, c in v.items()})
    return len(row_reduce(rows)) == G * (G - 1) // 2


# -- rewriting

class RewriteSystem:
    """Rules lead word -> tail (a combination of smaller words), with
    degree-bounded completion."""

    def __init__(self, pres: QuadraticPresentation, relations: Iterable[Vec] | None = None):
        self.N = pres.N
        self.ngens = pres.ngens
        self.rules: dict[Mono, list] = {}
        self.rule_lengths: set[int] = set()
        self.completed = 2
        self.added: dict[int, list] = {}
        self.overlaps_checked: dict[int, int] = {}
        self._memo: dict = {}
        vecs = list(relations) if relations is not None else pres.vectors()
        for row in row_reduce(vecs):
            self._add_rule(row)

    def _add_rule(self, row: Vec):
        lead = max(row)
        c = row[lead]
        assert c == ONE
        self.rules[lead] = [(m, -v) for m, v in row.items() if m != lead]
        self.rule_lengths.add(len(lead))

    # -- reduction
    def _reduce_once(self, w: Mono):
        for p in range(len(w)):
            for L in sorted(self.rule_lengths):
                if p + L > len(w):
                    break
                tail = self.rules.get(w[p:p + L])
                if tail is not None:
                    pre, post = w[:p], w[p + L:]
                    return [(pre + m + post, c) for m, c in tail]
        return None

    def _nf_word(self, w: Mono) -> dict:
        memo = self._memo
        if w in memo:
            return memo[w]
        stack = [w]
        while stack:
            x = stack[-1]
            if x in memo:
                stack.pop()
                continue
            red = self._reduce_once(x)
            if red is None:
                memo[x] = {x: ONE}
                stack.pop()
                continue
            missing = [y for y, _ in red if y not in memo]
            if missing:
                stack.extend(missing)
                continue
            acc: dict = {}
            for y, c in red:
                for z, c2 in memo[y].items():
                    v = acc.get(z)
                    acc[z] = c * c2 if v is None else v + c * c2
            memo[x] = {z: v for z, v in acc.items() if v}
            stack.pop()
        return memo[w]

    def reduce(self, vec: Mapping) -> dict:
        acc: dict = {}
        for w, c in vec.items():
            for z, c2 in self._nf_word(tuple(w)).items():
                acc[z] = acc.get(z, ZERO) + c * c2
        return {z: v for z, v in acc.items() if v}

    def normal_form(self, word: Sequence[int]) -> dict:
        w = tuple(word)
        if len(w) > self.completed:
            raise CompletionError(
                f"rewrite system completed to degree {self.completed}, word has degree {len(w)}")
        if any(not 0 <= g < self.ngens for g in w):
            raise IndexError("generator index out of range")
        return dict(self._nf_word(w))

    # -- completion
    def overlaps(self, d: int):
        """Words of degree d carrying two overlapping rule applications."""
        by_prefix: dict = {}
        for v in self.rules:
            by_prefix.setdefault(v[0], []).append(v)
        for u in self.rules:
            for k in range(1, len(u)):
                for v in by_prefix.get(u[len(u) - k], ()):
                    if len(u) + len(v) - k != d or k >= len(v):
                        continue
                    if u[len(u) - k:] == v[:k]:
                        yield u, v, k

    def _overlap_difference(self, u, v, k) -> tuple[Mono, dict]:
        w = u + v[k:]
        s, p = v[k:], w[:len(w) - len(v)]
        r1 = {}
        for m, c in self.rules[u]:
            r1[m + s] = r1.get(m + s, ZERO) + c
        r2 = {}
        for m, c in self.rules[v]:
            r2[p + m] = r2.get(p + m, ZERO) + c
        a, b = self.reduce(r1), self.reduce(r2)
        diff = dict(a)
        for z, c in b.items():
            x = diff.get(z, ZERO) - c
            if x:
                diff[z] = x
            else:
                diff.pop(z, None)
        return w, diff

    def complete(self, D: int = 3, strict: bool = False, verify: bool = True) -> "RewriteSystem":
        for d in range(self.completed + 1, D + 1):
            new = []
            count = 0
            for u, v, k in self.overlaps(d):
                count += 1
                w, diff = self._overlap_difference(u, v, k)
                if diff:
                    if strict:
                        raise CompletionError(f"overlap {w} does not resolve", w, diff)
                    new.append(diff)
            self.overlaps_checked[d] = count
            if new:
                rows = row_reduce(new)
                self.added[d] = rows
                for r in rows:
                    self._add_rule(r)
                self._memo = {w: v for w, v in self._memo.items() if len(w) < d}
                if verify:
                    for u, v, k in self.overlaps(d):
                        w, diff = self._overlap_difference(u, v, k)
                        if diff:
                            raise CompletionError(f"overlap {w} still unresolved", w, diff)
            self.completed = d
        return self

    def is_normal(self, w: Mono) -> bool:
        return self._reduce_once(w) is None

    def hilbert_count(self, d: int) -> int:
        if d > self.completed:
            raise CompletionError(f"rewrite system completed to degree {self.completed}, asked for {d}")
        leads = set(self.rules)
        lens = sorted(self.rule_lengths)
        count = 0
        stack = [()]
        while stack:
            w = stack.pop()
            if len(w) == d:
                count += 1
                continue
            for g in range(self.ngens):
                x = w + (g,)
                if any(L <= len(x) and x[len(x) - L:] in leads for L in lens):
                    continue
                stack.append(x)
        return count


def rewrite_system(pres: QuadraticPresentation, D: int = 3) -> RewriteSystem:
    """The presentation's rewrite system, completed to degree D (cached on pres)."""
    rs = pres._rewrite
    if rs is None:
        rs = pres._rewrite = RewriteSystem(pres)
    if rs.completed < D:
        rs.complete(D)
    return rs


def normal_form(word: Sequence[int], pres: QuadraticPresentation, D: int = 3) -> dict:
    if len(word) > D:
        raise CompletionError(f"word of degree {len(word)} exceeds the degree bound {D}")
    return rewrite_system(pres, D).normal_form(word)


def hilbert_count(pres: QuadraticPresentation, d: int) -> int:
    return rewrite_system(pres, max(d, 2)).hilbert_count(d)


def commutative_count(ngens: int, d: int) -> int:
    return math.comb(ngens + d - 1, d)
