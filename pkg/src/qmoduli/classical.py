"""Classical limit: the r-matrix, Semenov-Tian-Shansky and Fock-Rosly
brackets on matrix coordinates, and their comparison with the first-order
commutators of a_P.

Coordinates are the generators of a_P at q = 1, numbered as in
``algebra``.  Polynomials in commuting coordinates are dicts mapping a
sorted tuple of generator indices to a Fraction.  The bracket is
normalized as {f, g} = lim (fg - gf)/hbar with q = exp(hbar/2).
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import Generator, build_presentation, reduce_relations
from .pattern import CrossingType, GluingPattern, Kind, classify
from .scalars import HSeries, RatFunc, hbar_expand
from .tensor import O_BLOCKS, V, VD, Strand, TensorOp, crossing_operator, r_matrix

Poly = dict  # tuple[int, ...] (sorted) -> Fraction
Tensor2 = dict  # ((a, c), (b, d)) -> Fraction, coefficient of E_ab ⊗ E_cd


def poly_add(*ps: Poly, coefs: Sequence | None = None) -> Poly:
    out: dict = {}
    for k, p in enumerate(ps):
        c = 1 if coefs is None else coefs[k]
        for m, v in p.items():
            out[m] = out.get(m, 0) + c * v
    return {m: Fraction(v) for m, v in out.items() if v}


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(sorted(m1 + m2))
            out[m] = out.get(m, 0) + c1 * c2
    return {m: v for m, v in out.items() if v}


def poly_str(p: Poly, N: int) -> str:
    if not p:
        return "0"
    parts = []
    for m, c in sorted(p.items()):
        word = "*".join(_coord_name(g, N) for g in m)
        parts.append(f"{c}*{word}" if c != 1 else word)
    return " + ".join(parts).replace("+ -", "- ")


def _coord_name(g: int, N: int) -> str:
    x = Generator.from_index(g, N)
    return f"t{x.handle}_{x.row}{x.col}"


# -- classical r-matrix

@dataclass(frozen=True)
class ClassicalRData:
    N: int
    r: dict
    rho: dict
    t: dict


def flip21(s: Tensor2) -> Tensor2:
    return {((o[1], o[0]), (i[1], i[0])): v for (o, i), v in s.items()}


def _lin(a: Tensor2, b: Tensor2, ca, cb) -> Tensor2:
    out: dict = {}
    for k, v in a.items():
        out[k] = out.get(k, 0) + ca * v
    for k, v in b.items():
        out[k] = out.get(k, 0) + cb * v
    return {k: Fraction(v) for k, v in out.items() if v}


def classical_r(N: int) -> ClassicalRData:
    if N < 1:
        raise ValueError("N must be positive")
    R = r_matrix(N)
    r = {}
    for key, c in R.entries.items():
        h = hbar_expand(c)
        o, i = key
        if h.c0 != (1 if o == i else 0):
            raise AssertionError("R-matrix is not the identity at hbar = 0")
        if h.c1:
            r[key] = h.c1
    for o in itertools.product(range(N), repeat=2):
        if (o, o) not in R.entries:
            raise AssertionError("R-matrix is not the identity at hbar = 0")
    r21 = flip21(r)
    half = Fraction(1, 2)
    return ClassicalRData(N, r, _lin(r, r21, half, -half), _lin(r, r21, half, half))


def _as_op(s: Tensor2, N: int) -> TensorOp:
    return TensorOp(N, (V, V), (V, V), {k: RatFunc(v) for k, v in s.items()})


def check_cybe(N: int) -> bool:
    r = _as_op(classical_r(N).r, N)
    st = (V, V, V)
    r12, r13, r23 = (r.embed(p, st) for p in ((0, 1), (0, 2), (1, 2)))

    def br(a, b):
        return a @ b - b @ a
    return (br(r12, r13) + br(r12, r23) + br(r13, r23)).is_zero()


def leg_operator(s: Tensor2, positions: tuple[int, int], strands: Sequence[Strand], N: int) -> TensorOp:
    """s acting on two of the given strands; on a V* strand E_ab acts by -E_ba."""
    strands = tuple(strands)
    local: dict = {}
    for ((a, c), (b, d)), v in s.items():
        x0, y0, sg = a, b, 1
        x1, y1 = c, d
        if strands[positions[0]] is VD:
            x0, y0, sg = b, a, -sg
        if strands[positions[1]] is VD:
            x1, y1, sg = d, c, -sg
        key = ((x0, x1), (y0, y1))
        local[key] = local.get(key, 0) + sg * v
    pair = (strands[positions[0]], strands[positions[1]])
    op = TensorOp(N, pair, pair, {k: RatFunc(v) for k, v in local.items() if v})
    return op.embed(positions, strands)


def block_flip(N: int) -> TensorOp:
    ent = {((c, d, a, b), (a, b, c, d)): RatFunc(1)
           for a, b, c, d in itertools.product(range(N), repeat=4)}
    return TensorOp(N, O_BLOCKS, O_BLOCKS, ent)


def expand_operator(op: TensorOp) -> tuple[dict, dict]:
    """Zeroth and first hbar-coefficients of an operator."""
    c0, c1 = {}, {}
    for k, v in op.entries.items():
        h = hbar_expand(v)
        if h.c0:
            c0[k] = h.c0
        if h.c1:
            c1[k] = h.c1
    return c0, c1


def _frac_op(d: dict, op: TensorOp) -> TensorOp:
    return TensorOp(op.N, op.strands_in, op.strands_out, {k: RatFunc(v) for k, v in d.items()})


def crossing_first_order(t: CrossingType, N: int) -> TensorOp:
    """X with crossing_operator(t) = F(1 + hbar X) + O(hbar^2), F the block flip."""
    C = crossing_operator(t, N)
    c0, c1 = expand_operator(C)
    F = block_flip(N)
    if _frac_op(c0, C) != F:
        raise AssertionError("crossing operator is not the block flip at q = 1")
    return F @ _frac_op(c1, C)  # F is an involution


def qcl_rhs(N: int) -> TensorOp:
    """r^{12,34} - 2 t^{13} - 2 t^{14} on (V*, V, V*, V)."""
    cr = classical_r(N)
    acc = TensorOp.zero(O_BLOCKS, O_BLOCKS, N)
    for i, k in ((0, 2), (0, 3), (1, 2), (1, 3)):
        acc = acc + leg_operator(cr.r, (i, k), O_BLOCKS, N)
    for pos in ((0, 2), (0, 3)):
        acc = acc - leg_operator(cr.t, pos, O_BLOCKS, N).scale(2)
    return acc


def qcl_identity_check(N: int) -> bool:
    X = crossing_first_order(CrossingType(Kind.NESTED, 1), N)
    return X == qcl_rhs(N)


# -- vector fields and bivectors

class VFKind(enum.Enum):
    LEFT = "left_invariant"
    RIGHT = "right_invariant"
    ADJOINT = "adjoint"


@dataclass(frozen=True)
class VectorFieldAction:
    kind: VFKind
    x: tuple  # N x N matrix of Fractions, as a tuple of rows


def vf_action(a: VectorFieldAction, coord: tuple[int, int]) -> dict:
    """x^l(T) = T·x, x^r(T) = x·T, x^ad = x^r - x^l, on the coordinate t_ij.
    Returns a linear combination {(i', j'): coeff} (1-based)."""
    x = a.x
    N = len(x)
    i, j = coord[0] - 1, coord[1] - 1
    out: dict = {}
    if a.kind in (VFKind.LEFT, VFKind.ADJOINT):
        sg = -1 if a.kind is VFKind.ADJOINT else 1
        for k in range(N):
            if x[k][j]:
                out[(i + 1, k + 1)] = out.get((i + 1, k + 1), 0) + sg * Fraction(x[k][j])
    if a.kind in (VFKind.RIGHT, VFKind.ADJOINT):
        for k in range(N):
            if x[i][k]:
                out[(k + 1, j + 1)] = out.get((k + 1, j + 1), 0) + Fraction(x[i][k])
    return {k: v for k, v in out.items() if v}


def _unit_vf(kind: str, a: int, b: int, g: int, N: int) -> dict:
    """E_ab acting on coordinate g by the given kind ('l', 'r', 'ad')."""
    h, rem = divmod(g, N * N)
    i, j = divmod(rem, N)
    out: dict = {}
    if kind in ("l", "ad") and b == j:
        k = (h * N + i) * N + a
        out[k] = out.get(k, 0) + (-1 if kind == "ad" else 1)
    if kind in ("r", "ad") and a == i:
        k = (h * N + b) * N + j
        out[k] = out.get(k, 0) + 1
    return {k: v for k, v in out.items() if v}


def contract(s: Tensor2, k1: str, k2: str, f: int, g: int, N: int) -> Poly:
    """s^{k1,k2}(df, dg) = sum s[a,c;b,d] (E_ab)^{k1} f · (E_cd)^{k2} g."""
    out: dict = {}
    for ((a, c), (b, d)), v in s.items():
        A = _unit_vf(k1, a, b, f, N)
        if not A:
            continue
        B = _unit_vf(k2, c, d, g, N)
        for x, cx in A.items():
            for y, cy in B.items():
                m = (x, y) if x <= y else (y, x)
                out[m] = out.get(m, 0) + v * cx * cy
    return {m: Fraction(v) for m, v in out.items() if v}


def _sts(f: int, g: int, N: int) -> Poly:
    cr = classical_r(N)
    return poly_add(contract(cr.rho, "ad", "ad", f, g, N),
                    contract(cr.t, "r", "l", f, g, N),
                    contract(cr.t, "l", "r", f, g, N), coefs=(1, 1, -1))


def sts_bracket(N: int, a: tuple[int, int], b: tuple[int, int]) -> Poly:
    """{t_ij, t_kl} for pi_STS on one copy of the group (coordinates of handle 1)."""
    f = Generator(1, *a).index(N)
    g = Generator(1, *b).index(N)
    return _sts(f, g, N)


def fr_bivector(kind: Kind, f: int, g: int, N: int) -> Poly:
    """Positive-type bivector of the table evaluated on (df, dg), first leg on f."""
    cr = classical_r(N)
    base = contract(cr.r, "ad", "ad", f, g, N)
    if kind is Kind.UNLINKED:
        return base
    if kind is Kind.LINKED:
        return poly_add(base, contract(cr.t, "r", "l", f, g, N), coefs=(1, 2))
    return poly_add(base, contract(cr.t, "r", "r", f, g, N), contract(cr.t, "r", "l", f, g, N),
                    coefs=(1, -2, 2))


def _fr(P: GluingPattern, f: int, g: int, N: int) -> Poly:
    hf, hg = f // (N * N) + 1, g // (N * N) + 1
    if hf == hg:
        return _sts(f, g, N)
    if hf > hg:
        return poly_add(_fr(P, g, f, N), coefs=(-1,))
    t = classify(P, hf, hg)
    if t.sign > 0:
        return fr_bivector(t.kind, f, g, N)
    # negative type: the positive formula with the roles of the two handles exchanged
    return poly_add(fr_bivector(t.kind, g, f, N), coefs=(-1,))


def fr_bracket(P: GluingPattern, a: tuple[int, int, int], b: tuple[int, int, int], N: int) -> Poly:
    """{t^(h1)_ij, t^(h2)_kl} for the Fock-Rosly structure of P (1-based coordinates)."""
    for h, i, j in (a, b):
        if not 1 <= h <= P.n:
            raise IndexError(f"handle {h} out of range 1..{P.n}")
        if not (1 <= i <= N and 1 <= j <= N):
            raise IndexError(f"matrix index ({i},{j}) out of range for N = {N}")
    return _fr(P, Generator(*a).index(N), Generator(*b).index(N), N)


def bracket_table(P: GluingPattern, N: int) -> dict:
    G = P.n * N * N
    return {(f, g): _fr(P, f, g, N) for f in range(G) for g in range(G)}


# -- quasi-classical limit of a_P

def first_order_brackets(P: GluingPattern, N: int) -> dict:
    """{g_b, g_a} for b > a read off the ħ-linear part of the relations of a_P."""
    pres = build_presentation(P, N)
    G = pres.ngens
    rows = reduce_relations(pres.vectors())
    out = {}
    for rel in rows:
        (lead,) = rel.lhs
        b, a = lead
        if not b > a:
            raise AssertionError(f"relation pivot {lead} is not a descending pair")
        poly: dict = {}
        for m, c in rel.rhs.items():
            h = hbar_expand(c)
            expect0 = 1 if m == (a, b) else 0
            if h.c0 != expect0:
                raise AssertionError(f"relation for {lead} is not a commutator at q = 1")
            if h.c1:
                k = tuple(sorted(m))
                poly[k] = poly.get(k, 0) + h.c1
        if (a, b) not in rel.rhs:
            raise AssertionError(f"relation for {lead} is not a commutator at q = 1")
        out[(b, a)] = {k: v for k, v in poly.items() if v}
    if len(out) != G * (G - 1) // 2:
        raise AssertionError("relations do not solve for every descending pair")
    return out


@dataclass
class PairResult:
    pair: tuple[int, int]
    quantum: Poly
    classical: Poly

    @property
    def ok(self) -> bool:
        return self.quantum == self.classical


def quasiclassical_report(P: GluingPattern, N: int) -> list[PairResult]:
    fo = first_order_brackets(P, N)
    return [PairResult((b, a), v, _fr(P, b, a, N)) for (b, a), v in sorted(fo.items())]


def quasiclassical_check(P: GluingPattern, N: int) -> bool:
    return all(r.ok for r in quasiclassical_report(P, N))


# -- Jacobi identity by brute force

def bracket_with_poly(table: dict, x: int, p: Poly) -> Poly:
    """{x, p} by the Leibniz rule."""
    out: Poly = {}
    for m, c in p.items():
        for k in range(len(m)):
            rest = {m[:k] + m[k + 1:]: c}
            out = poly_add(out, poly_mul(table[(x, m[k])], rest))
    return out


def jacobi_check(P: GluingPattern, N: int) -> list[tuple[int, int, int]]:
    """Coordinate triples violating the Jacobi identity (empty when it holds)."""
    table = bracket_table(P, N)
    G = P.n * N * N
    bad = []
    for x, y, z in itertools.product(range(G), repeat=3):
        s = poly_add(bracket_with_poly(table, x, table[(y, z)]),
                     bracket_with_poly(table, y, table[(z, x)]),
                     bracket_with_poly(table, z, table[(x, y)]))
        if s:
            bad.append((x, y, z))
    return bad


def antisymmetry_violations(P: GluingPattern, N: int) -> list[tuple[int, int]]:
    table = bracket_table(P, N)
    return [k for k, v in table.items() if poly_add(v, table[(k[1], k[0])])]
