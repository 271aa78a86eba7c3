"""Sparse operators on tensor products of V (vector representation of
U_q(gl_N)) and its dual V*, with coefficients in Q(q).

Basis indices are 0-based internally; the JSON form uses 1-based indices.
An entry ((o_1..o_m), (i_1..i_m)) -> c means the operator sends the basis
tensor e_i to sum_o c * e_o.  Operators compose right-to-left:
``A @ B`` is A after B.

Braiding conventions (checked by the coherence tests):

* sigma_{V,V} = flip o R.
* Writing X = sigma_{V,W}^{-1} with entries X[(a', b'), (b, a)],
  sigma_{V*,W}(v^c (x) w_b) = sum_{a, b'} X[(c, b'), (b, a)] w_{b'} (x) v^a.
* With Y = sigma_{W,V}, let Z(v^c (x) w_b) = sum Y[(c, b'), (b, a)] w_{b'} (x) v^a;
  then sigma_{W,V*} = Z^{-1}.
"""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .scalars import ONE, Q, QINV, ZERO, RatFunc, parse_ratfunc
from .pattern import CrossingType, GluingPattern, Kind, strand_layout


class Strand(enum.Enum):
    V = "V"
    VDUAL = "V*"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, s: str) -> "Strand":
        s = s.strip()
        if s in ("V*", "Vdual", "VDUAL", "D"):
            return cls.VDUAL
        if s == "V":
            return cls.V
        raise ValueError(f"unknown strand {s!r}")


V, VD = Strand.V, Strand.VDUAL
Index = tuple[int, ...]


class SignatureError(ValueError):
    pass


class TensorOp:
    __slots__ = ("N", "strands_in", "strands_out", "entries", "_cols")

    def __init__(self, N: int, strands_in: Sequence[Strand], strands_out: Sequence[Strand],
                 entries: Mapping[tuple[Index, Index], RatFunc]):
        if N < 1:
            raise ValueError("N must be positive")
        self.N = N
        self.strands_in = tuple(strands_in)
        self.strands_out = tuple(strands_out)
        self.entries = {k: v for k, v in entries.items() if v}
        self._cols = None

    # -- constructors
    @classmethod
    def identity(cls, strands: Sequence[Strand], N: int) -> "TensorOp":
        strands = tuple(strands)
        ent = {(ix, ix): ONE for ix in itertools.product(range(N), repeat=len(strands))}
        return cls(N, strands, strands, ent)

    @classmethod
    def zero(cls, strands_in, strands_out, N: int) -> "TensorOp":
        return cls(N, strands_in, strands_out, {})

    # -- access
    def columns(self) -> dict[Index, list[tuple[Index, RatFunc]]]:
        if self._cols is None:
            cols: dict[Index, list] = {}
            for (o, i), c in self.entries.items():
                cols.setdefault(i, []).append((o, c))
            self._cols = cols
        return self._cols

    def __getitem__(self, key: tuple[Index, Index]) -> RatFunc:
        return self.entries.get(key, ZERO)

    @property
    def dim_in(self) -> int:
        return self.N ** len(self.strands_in)

    # -- algebra
    def compose(self, other: "TensorOp") -> "TensorOp":
        """self o other (other applied first)."""
        if other.strands_out != self.strands_in or other.N != self.N:
            raise SignatureError(
                f"cannot compose {_sig(self)} after {_sig(other)}")
        cols = self.columns()
        out: dict[tuple[Index, Index], RatFunc] = {}
        for (m, i), c in other.entries.items():
            for o, c2 in cols.get(m, ()):
                k = (o, i)
                v = out.get(k)
                out[k] = c2 * c if v is None else v + c2 * c
        return TensorOp(self.N, other.strands_in, self.strands_out, out)

    __matmul__ = compose

    def tensor(self, other: "TensorOp") -> "TensorOp":
        if other.N != self.N:
            raise SignatureError("dimension mismatch in tensor product")
        out = {}
        for (o1, i1), c1 in self.entries.items():
            for (o2, i2), c2 in other.entries.items():
                out[(o1 + o2, i1 + i2)] = c1 * c2
        return TensorOp(self.N, self.strands_in + other.strands_in,
                        self.strands_out + other.strands_out, out)

    def _same_sig(self, other):
        if (self.strands_in, self.strands_out, self.N) != (other.strands_in, other.strands_out, other.N):
            raise SignatureError(f"signature mismatch: {_sig(self)} vs {_sig(other)}")

    def __add__(self, other: "TensorOp") -> "TensorOp":
        self._same_sig(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out[k] + v if k in out else v
        return TensorOp(self.N, self.strands_in, self.strands_out, out)

    def scale(self, c) -> "TensorOp":
        return TensorOp(self.N, self.strands_in, self.strands_out,
                        {k: v * c for k, v in self.entries.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, TensorOp):
            return NotImplemented
        return (self.N == other.N and self.strands_in == other.strands_in
                and self.strands_out == other.strands_out and self.entries == other.entries)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.entries

    def is_identity(self) -> bool:
        return self.strands_in == self.strands_out and self == TensorOp.identity(self.strands_in, self.N)

    def apply_local(self, op2: "TensorOp", k: int) -> "TensorOp":
        """(id ⊗ op2 ⊗ id) o self, with op2 acting on output positions k, k+1 (0-based)."""
        if self.strands_out[k:k + 2] != op2.strands_in:
            raise SignatureError("local operator does not match strands")
        cols = op2.columns()
        out: dict = {}
        for (o, i), c in self.entries.items():
            for o2, c2 in cols.get(o[k:k + 2], ()):
                key = (o[:k] + o2 + o[k + 2:], i)
                v = out.get(key)
                out[key] = c2 * c if v is None else v + c2 * c
        st = self.strands_out[:k] + op2.strands_out + self.strands_out[k + 2:]
        return TensorOp(self.N, self.strands_in, st, out)

    def embed(self, positions: Sequence[int], strands: Sequence[Strand]) -> "TensorOp":
        """Act by self on the given positions of a longer tensor product (identity elsewhere)."""
        strands = tuple(strands)
        positions = tuple(positions)
        if tuple(strands[p] for p in positions) != self.strands_in:
            raise SignatureError("embedding positions do not match strands")
        st_out = list(strands)
        for p, s in zip(positions, self.strands_out):
            st_out[p] = s
        cols = self.columns()
        out = {}
        for ix in itertools.product(range(self.N), repeat=len(strands)):
            sub = tuple(ix[p] for p in positions)
            for o, c in cols.get(sub, ()):
                oo = list(ix)
                for p, v in zip(positions, o):
                    oo[p] = v
                out[(tuple(oo), ix)] = c
        return TensorOp(self.N, strands, tuple(st_out), out)

    def inverse(self) -> "TensorOp":
        """Exact inverse by Gauss-Jordan elimination over Q(q)."""
        ins = list(itertools.product(range(self.N), repeat=len(self.strands_in)))
        outs = list(itertools.product(range(self.N), repeat=len(self.strands_out)))
        if len(ins) != len(outs):
            raise SignatureError("non-square operator")
        n = len(ins)
        ri = {o: k for k, o in enumerate(outs)}
        ci = {i: k for k, i in enumerate(ins)}
        # rows of [M | I], stored sparsely
        rows = [dict() for _ in range(n)]
        for (o, i), c in self.entries.items():
            rows[ri[o]][ci[i]] = c
        for r in range(n):
            rows[r][n + r] = ONE
        for col in range(n):
            piv = next((r for r in range(col, n) if rows[r].get(col)), None)
            if piv is None:
                raise ZeroDivisionError("operator is singular")
            rows[col], rows[piv] = rows[piv], rows[col]
            pr = rows[col]
            inv = ONE / pr[col]
            if inv != ONE:
                pr = {k: v * inv for k, v in pr.items()}
                rows[col] = pr
            for r in range(n):
                if r != col and rows[r].get(col):
                    f = rows[r][col]
                    row = rows[r]
                    for k, v in pr.items():
                        nv = row.get(k, ZERO) - f * v
                        if nv:
                            row[k] = nv
                        else:
                            row.pop(k, None)
        out = {}
        for r in range(n):
            for k, v in rows[r].items():
                if k >= n:
                    # inverse maps out-basis (index k - n) to in-basis (row r)
                    out[(ins[r], outs[k - n])] = v
        return TensorOp(self.N, self.strands_out, self.strands_in, out)

    def evaluate(self, q0) -> dict[tuple[Index, Index], object]:
        return {k: v(q0) for k, v in self.entries.items()}

    def is_permutation_at(self, q0=1) -> bool:
        ev = {k: v for k, v in self.evaluate(q0).items() if v != 0}
        if any(v != 1 for v in ev.values()):
            return False
        outs = [o for o, _ in ev]
        ins = [i for _, i in ev]
        return len(set(outs)) == len(outs) == len(set(ins)) == self.dim_in

    # -- serialization
    def to_json_obj(self) -> dict:
        ents = sorted(self.entries.items(), key=lambda kv: (kv[0][0], kv[0][1]))
        return {
            "N": self.N,
            "strands": {"in": [str(s) for s in self.strands_in],
                        "out": [str(s) for s in self.strands_out]},
            "entries": [{"out": [x + 1 for x in o], "in": [x + 1 for x in i], "coeff": str(c)}
                        for (o, i), c in ents],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, d: dict) -> "TensorOp":
        N = int(d["N"])
        sin = [Strand.parse(s) for s in d["strands"]["in"]]
        sout = [Strand.parse(s) for s in d["strands"]["out"]]
        ent = {}
        for e in d["entries"]:
            o = tuple(int(x) - 1 for x in e["out"])
            i = tuple(int(x) - 1 for x in e["in"])
            if any(not 0 <= x < N for x in o + i) or len(o) != len(sout) or len(i) != len(sin):
                raise ValueError(f"bad multi-index in entry {e}")
            ent[(o, i)] = parse_ratfunc(e["coeff"])
        return cls(N, sin, sout, ent)

    @classmethod
    def from_json(cls, s: str) -> "TensorOp":
        return cls.from_json_obj(json.loads(s))

    def __repr__(self):
        return f"TensorOp({_sig(self)}, N={self.N}, nnz={len(self.entries)})"


def _sig(op: TensorOp) -> str:
    return f"{'⊗'.join(map(str, op.strands_in)) or '1'} -> {'⊗'.join(map(str, op.strands_out)) or '1'}"


# -- R-matrix and braidings

@lru_cache(maxsize=None)
def r_matrix(N: int) -> TensorOp:
    if N < 1:
        raise ValueError("N must be positive")
    qq = Q - QINV
    ent = {}
    for i in range(N):
        for j in range(N):
            ent[((i, j), (i, j))] = Q if i == j else ONE
            if i > j:
                # E_ij ⊗ E_ji sends e_j ⊗ e_i to e_i ⊗ e_j
                ent[((i, j), (j, i))] = qq
    return TensorOp(N, (V, V), (V, V), ent)


def flip(a: Strand, b: Strand, N: int) -> TensorOp:
    ent = {((y, x), (x, y)): ONE for x in range(N) for y in range(N)}
    return TensorOp(N, (a, b), (b, a), ent)


def _partial_dualize(Y: TensorOp, a: Strand) -> TensorOp:
    """From Y : W ⊗ V -> V ⊗ W build the map V* ⊗ W -> W ⊗ V*
    sending v^c ⊗ w_b to sum Y[(c, b'), (b, a)] w_{b'} ⊗ v^a."""
    W = Y.strands_in[0]
    out = {((bp, a_), (c, b)): v for ((c, bp), (b, a_)), v in Y.entries.items()}
    return TensorOp(Y.N, (a, W), (W, a), out)


@lru_cache(maxsize=None)
def braiding(a: Strand, b: Strand, N: int) -> TensorOp:
    """sigma_{a,b} : a ⊗ b -> b ⊗ a."""
    if N < 1:
        raise ValueError("N must be positive")
    if a is V and b is V:
        return flip(V, V, N) @ r_matrix(N)
    if a is VD:
        X = braiding(V, b, N).inverse()           # b ⊗ V -> V ⊗ b
        return _partial_dualize(X, VD)
    # a is V, b is V*
    Y = braiding(V, V, N)                          # W = V
    return _partial_dualize(Y, VD).inverse()


@lru_cache(maxsize=None)
def braiding_inv(a: Strand, b: Strand, N: int) -> TensorOp:
    """sigma_{a,b}^{-1} : b ⊗ a -> a ⊗ b."""
    return braiding(a, b, N).inverse()


def ev(N: int) -> TensorOp:
    """V* ⊗ V -> 1."""
    return TensorOp(N, (VD, V), (), {((), (c, c)): ONE for c in range(N)})


def coev(N: int) -> TensorOp:
    """1 -> V ⊗ V*."""
    return TensorOp(N, (), (V, VD), {((c, c), ()): ONE for c in range(N)})


def check_yang_baxter(R: TensorOp) -> bool:
    if R.strands_in != (V, V) or R.strands_out != (V, V):
        raise SignatureError("Yang-Baxter check needs an operator on V ⊗ V")
    st = (V, V, V)
    R12, R13, R23 = (R.embed(p, st) for p in ((0, 1), (0, 2), (1, 2)))
    return R12 @ R13 @ R23 == R23 @ R13 @ R12


def check_hecke(N: int) -> bool:
    Rc = braiding(V, V, N)
    I = TensorOp.identity((V, V), N)
    return ((Rc - I.scale(Q)) @ (Rc + I.scale(QINV))).is_zero()


# -- braid words

@dataclass(frozen=True)
class BraidWord:
    """Letters (k, ±1) in operator order: the rightmost letter acts first."""
    generators: tuple[tuple[int, int], ...]
    strand_count: int

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple((int(k), int(e)) for k, e in self.generators))
        for k, e in self.generators:
            if not 1 <= k <= self.strand_count - 1:
                raise IndexError(f"generator s_{k} out of range for {self.strand_count} strands")
            if e not in (1, -1):
                raise ValueError("powers must be ±1")

    def inverse(self) -> "BraidWord":
        return BraidWord(tuple((k, -e) for k, e in reversed(self.generators)), self.strand_count)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return BraidWord(self.generators + other.generators, self.strand_count)

    def __str__(self):
        return " ".join(f"s{k}" + ("" if e > 0 else "^-1") for k, e in self.generators) or "1"

    @classmethod
    def parse(cls, text: str, strand_count: int) -> "BraidWord":
        gens = []
        for tok in text.split():
            if tok == "1":
                continue
            base, _, pw = tok.partition("^")
            gens.append((int(base.lstrip("s")), -1 if pw == "-1" else 1))
        return cls(tuple(gens), strand_count)


def braid_word_eval(w: BraidWord, strands: Sequence[Strand], N: int) -> TensorOp:
    strands = tuple(strands)
    if len(strands) != w.strand_count:
        raise SignatureError(f"word on {w.strand_count} strands applied to {len(strands)}")
    op = TensorOp.identity(strands, N)
    for k, e in reversed(w.generators):
        p = k - 1
        st = op.strands_out
        if e > 0:
            loc = braiding(st[p], st[p + 1], N)
        else:
            loc = braiding_inv(st[p + 1], st[p], N)
        op = op.apply_local(loc, p)
    return op


O_BLOCKS = (VD, V, VD, V)

CROSSING_WORDS = {
    Kind.LINKED: BraidWord(((2, -1), (1, 1), (3, 1), (2, 1)), 4),
    Kind.NESTED: BraidWord(((2, -1), (1, -1), (3, 1), (2, 1)), 4),
    Kind.UNLINKED: BraidWord(((2, 1), (1, 1), (3, 1), (2, 1)), 4),
}


def crossing_word(t: CrossingType) -> BraidWord:
    w = CROSSING_WORDS[t.kind]
    return w if t.sign > 0 else w.inverse()


@lru_cache(maxsize=None)
def crossing_operator(t: CrossingType, N: int) -> TensorOp:
    """O^(i) ⊗ O^(j) -> O^(j) ⊗ O^(i) on strands (V*, V, V*, V)."""
    op = braid_word_eval(crossing_word(t), O_BLOCKS, N)
    assert op.strands_out == O_BLOCKS
    return op


def j_word(P: GluingPattern, i: int, j: int) -> tuple[BraidWord, tuple[Strand, ...]]:
    """Positive shuffle braid taking O^(j) ⊗ O^(i) to the pattern order of
    the strands of handles i and j.  Returns the word and the target strands."""
    if i == j:
        raise ValueError("j_operator needs two distinct handles")
    P.P(i), P.P(j)  # validates the handle indices
    layout = strand_layout(P, (i, j))
    # slot k holds a strand of handle j (the first block) or of handle i
    a = [s if h == j else None for h, s in layout]
    b = [s if h == i else None for h, s in layout]
    seq = [("a", k) for k in range(4) if a[k]] + [("b", k) for k in range(4) if b[k]]
    letters = []
    for k in range(4):
        if b[k] is None:
            continue
        pos = seq.index(("b", k))
        while pos > 0 and seq[pos - 1][0] == "a" and seq[pos - 1][1] > k:
            letters.append((pos, 1))  # 1-based position of the left strand
            seq[pos - 1], seq[pos] = seq[pos], seq[pos - 1]
            pos -= 1
    target = tuple(Strand.parse(s) for _, s in layout)
    return BraidWord(tuple(reversed(letters)), 4), target


def j_operator(P: GluingPattern, i: int, j: int, N: int) -> TensorOp:
    w, target = j_word(P, i, j)
    op = braid_word_eval(w, O_BLOCKS, N)
    assert op.strands_out == target
    return op


def crossing_from_pattern(P: GluingPattern, i: int, j: int, N: int) -> TensorOp:
    """J_ij^{-1} o J_ji : O^(i) ⊗ O^(j) -> O^(j) ⊗ O^(i)."""
    w_ij, target = j_word(P, i, j)
    w_ji, _ = j_word(P, j, i)
    Jji = braid_word_eval(w_ji, O_BLOCKS, N)
    Jij_inv = braid_word_eval(w_ij.inverse(), target, N)
    return Jij_inv @ Jji


# -- coherence checks

STRAND_MIXES3 = tuple(itertools.product((V, VD), repeat=3))


def check_hexagon(x: Strand, y: Strand, z: Strand, N: int) -> bool:
    """Braid relation s1 s2 s1 = s2 s1 s2 on x ⊗ y ⊗ z.

    With sigma on tensor products defined by the hexagon axioms, this is the
    statement that the two hexagon composites for sigma_{x⊗y, z} agree after
    braiding x past y (naturality of sigma in its first argument)."""
    st = (x, y, z)
    lhs = braid_word_eval(BraidWord(((1, 1), (2, 1), (1, 1)), 3), st, N)
    rhs = braid_word_eval(BraidWord(((2, 1), (1, 1), (2, 1)), 3), st, N)
    return lhs == rhs


def _sigma_past_pair(w: Strand, pair: tuple[Strand, Strand], N: int, w_first: bool) -> TensorOp:
    """sigma_{W, X⊗Y} (w_first) or sigma_{X⊗Y, W} via the hexagon axioms."""
    if w_first:
        return braid_word_eval(BraidWord(((2, 1), (1, 1)), 3), (w,) + pair, N)
    return braid_word_eval(BraidWord(((1, 1), (2, 1)), 3), pair + (w,), N)


def check_snake(N: int) -> dict[str, bool]:
    """Naturality of sigma with respect to ev and coev, for W in {V, V*},
    together with the zigzag identities themselves."""
    res = {}
    e, c = ev(N), coev(N)
    for w in (V, VD):
        Iw = TensorOp.identity((w,), N)
        s = _sigma_past_pair(w, (VD, V), N, True)
        res[f"ev∘σ_{{{w},V*⊗V}}"] = (e.tensor(Iw) @ s) == Iw.tensor(e)
        s = _sigma_past_pair(w, (VD, V), N, False)
        res[f"ev∘σ_{{V*⊗V,{w}}}"] = (Iw.tensor(e) @ s) == e.tensor(Iw)
        s = _sigma_past_pair(w, (V, VD), N, True)
        res[f"σ_{{{w},V⊗V*}}∘coev"] = (s @ Iw.tensor(c)) == c.tensor(Iw)
        s = _sigma_past_pair(w, (V, VD), N, False)
        res[f"σ_{{V⊗V*,{w}}}∘coev"] = (s @ c.tensor(Iw)) == Iw.tensor(c)
    Iv, Ivd = TensorOp.identity((V,), N), TensorOp.identity((VD,), N)
    res["zigzag V"] = (Iv.tensor(e) @ c.tensor(Iv)).is_identity()
    res["zigzag V*"] = (e.tensor(Ivd) @ Ivd.tensor(c)).is_identity()
    return res


def check_coherence(N: int) -> dict[str, bool]:
    res = {f"hexagon {''.join(map(str, m))}": check_hexagon(*m, N) for m in STRAND_MIXES3}
    res.update(check_snake(N))
    return res
