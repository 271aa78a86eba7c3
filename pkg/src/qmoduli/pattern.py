"""Gluing patterns: parsing, handle-pair classification, disjoint union,
standard surfaces and the topology of the glued surface.

A pattern on n handles is stored as the flat tuple
(P(1), P(1'), P(2), P(2'), ..., P(n), P(n')) of interval labels in 1..2n.
Handles are 1-based throughout.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Sequence


class PatternError(ValueError):
    """Base class for invalid gluing patterns."""


class PatternSyntaxError(PatternError):
    pass


class PatternCountError(PatternError):
    pass


class PatternBijectionError(PatternError):
    pass


class PatternOrderError(PatternError):
    pass


class Kind(enum.Enum):
    LINKED = "Linked"
    NESTED = "Nested"
    UNLINKED = "Unlinked"

    @property
    def letter(self) -> str:
        return self.value[0]


@dataclass(frozen=True)
class CrossingType:
    kind: Kind
    sign: int  # +1 or -1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def opposite(self) -> "CrossingType":
        return CrossingType(self.kind, -self.sign)

    def __str__(self):
        return f"({self.kind.value},{'+' if self.sign > 0 else '-'})"

    @classmethod
    def parse(cls, text: str) -> "CrossingType":
        s = text.strip().strip("()").replace(" ", "")
        name, _, sg = s.partition(",")
        for k in Kind:
            if name.lower() in (k.value.lower(), k.letter.lower()):
                return cls(k, -1 if sg == "-" else 1)
        raise ValueError(f"unknown crossing type {text!r}")


ALL_TYPES = tuple(CrossingType(k, s) for k in Kind for s in (1, -1))


@dataclass(frozen=True)
class SurfaceTopology:
    genus: int
    boundary_components: int
    euler_char: int


@dataclass(frozen=True)
class GluingPattern:
    targets: tuple[int, ...]

    def __post_init__(self):
        t = tuple(self.targets)
        object.__setattr__(self, "targets", t)
        if len(t) % 2:
            raise PatternCountError(f"odd number of entries ({len(t)})")
        if sorted(t) != list(range(1, len(t) + 1)):
            raise PatternBijectionError(
                f"entries {list(t)} are not a permutation of 1..{len(t)}")
        for h in range(len(t) // 2):
            if t[2 * h] > t[2 * h + 1]:
                raise PatternOrderError(
                    f"handle {h + 1}: P({h + 1}) = {t[2 * h]} > P({h + 1}') = {t[2 * h + 1]}")

    @property
    def n(self) -> int:
        return len(self.targets) // 2

    def P(self, i: int) -> int:
        self._check_handle(i)
        return self.targets[2 * i - 2]

    def Pp(self, i: int) -> int:
        """P(i')."""
        self._check_handle(i)
        return self.targets[2 * i - 1]

    def _check_handle(self, i: int):
        if not (isinstance(i, int) and 1 <= i <= self.n):
            raise IndexError(f"handle {i} out of range 1..{self.n}")

    def __str__(self):
        return " ".join(map(str, self.targets))


NULL = GluingPattern(())
ANNULUS = GluingPattern((1, 2))
TORUS = GluingPattern((1, 3, 2, 4))
PANTS = GluingPattern((1, 2, 3, 4))


def parse_pattern(text: str) -> GluingPattern:
    toks = text.split()
    try:
        vals = tuple(int(x) for x in toks)
    except ValueError as e:
        raise PatternSyntaxError(f"non-integer entry in {text!r}") from e
    return GluingPattern(vals)


def classify(P: GluingPattern, i: int, j: int) -> CrossingType:
    """Crossing type of the handle pair (i, j); the sign flips when i > j."""
    if i == j:
        raise ValueError("classify needs two distinct handles")
    if i > j:
        return classify(P, j, i).opposite()
    a, ap, b, bp = P.P(i), P.Pp(i), P.P(j), P.Pp(j)
    if a < b < ap < bp:
        return CrossingType(Kind.LINKED, 1)
    if b < a < bp < ap:
        return CrossingType(Kind.LINKED, -1)
    if a < b < bp < ap:
        return CrossingType(Kind.NESTED, 1)
    if b < a < ap < bp:
        return CrossingType(Kind.NESTED, -1)
    if ap < b:
        return CrossingType(Kind.UNLINKED, 1)
    if bp < a:
        return CrossingType(Kind.UNLINKED, -1)
    raise AssertionError("unreachable: pattern endpoints are distinct")


def classifications(P: GluingPattern) -> dict[tuple[int, int], CrossingType]:
    return {(i, j): classify(P, i, j)
            for i in range(1, P.n + 1) for j in range(i + 1, P.n + 1)}


def boundary_cycles(P: GluingPattern) -> list[list[int]]:
    """Boundary cycles of the one-vertex ribbon graph.

    Half-edges are the intervals 0..2n in cyclic order around the vertex;
    interval 0 is the marked arc and stays unpaired, P(i) is paired with P(i').
    """
    m = 2 * P.n + 1
    alpha = list(range(m))
    for i in range(1, P.n + 1):
        a, b = P.P(i), P.Pp(i)
        alpha[a], alpha[b] = b, a
    seen = [False] * m
    cycles = []
    for s in range(m):
        if seen[s]:
            continue
        cyc = []
        x = s
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = (alpha[x] + 1) % m
        cycles.append(cyc)
    return cycles


def topology(P: GluingPattern) -> SurfaceTopology:
    r = len(boundary_cycles(P))
    chi = 1 - P.n
    twice_g = 2 - r - chi
    assert twice_g >= 0 and twice_g % 2 == 0, (P, r)
    return SurfaceTopology(twice_g // 2, r, chi)


def disjoint_union(P: GluingPattern, Q: GluingPattern) -> GluingPattern:
    shift = 2 * P.n
    return GluingPattern(P.targets + tuple(t + shift for t in Q.targets))


def sigma_pattern(g: int, r: int) -> GluingPattern:
    """g punctured tori followed by r - 1 annuli; (0, 1) gives the null pattern."""
    if r <= 0:
        raise ValueError("need at least one boundary component (r >= 1)")
    if g < 0:
        raise ValueError("genus must be nonnegative")
    out = NULL
    for _ in range(g):
        out = disjoint_union(out, TORUS)
    for _ in range(r - 1):
        out = disjoint_union(out, ANNULUS)
    return out


def tau_perm(P: GluingPattern) -> tuple[int, ...]:
    """tau_P as the tuple (tau(1), ..., tau(2n)) with tau(2k-1) = P(k), tau(2k) = P(k')."""
    return tuple(P.targets)


def random_pattern(n: int, rng: random.Random) -> GluingPattern:
    pts = list(range(1, 2 * n + 1))
    rng.shuffle(pts)
    pairs = [tuple(sorted(pts[2 * k: 2 * k + 2])) for k in range(n)]
    return GluingPattern(tuple(x for p in pairs for x in p))


def witness_pattern(t: CrossingType) -> GluingPattern:
    """A two-handle pattern whose pair (1, 2) has crossing type t."""
    table = {
        (Kind.LINKED, 1): (1, 3, 2, 4),
        (Kind.LINKED, -1): (2, 4, 1, 3),
        (Kind.NESTED, 1): (1, 4, 2, 3),
        (Kind.NESTED, -1): (2, 3, 1, 4),
        (Kind.UNLINKED, 1): (1, 2, 3, 4),
        (Kind.UNLINKED, -1): (3, 4, 1, 2),
    }
    return GluingPattern(table[(t.kind, t.sign)])


def strand_layout(P: GluingPattern, handles: Sequence[int]) -> list[tuple[int, str]]:
    """Strands of the given handles in pattern order.

    Interval s sits at position 2n + 1 - s, so strands are listed by
    decreasing interval label; handle h contributes V* on P(h') and V on P(h).
    """
    ivals = {}
    for h in handles:
        ivals[P.Pp(h)] = (h, "V*")
        ivals[P.P(h)] = (h, "V")
    return [ivals[s] for s in sorted(ivals, reverse=True)]
