"""Acceptance criteria.  Each test prints one line
``CRITERION k <name>: PASS|FAIL (<seconds>s, limit <limit>s)``.
Run with pytest, or directly as a script."""
import itertools
import random
import sys
import time

import pytest

from qmoduli.algebra import (
    build_presentation, commutative_count, elliptic_matrix_equations, normal_form,
    re_matrix_equations, rewrite_system, same_span,
)
from qmoduli.classical import jacobi_check, qcl_identity_check, quasiclassical_check
from qmoduli.pattern import (
    ALL_TYPES, ANNULUS, PANTS, TORUS, CrossingType, Kind, classify, disjoint_union,
    random_pattern, sigma_pattern, topology, witness_pattern,
)
from qmoduli.tensor import (
    V, VD, check_hecke, check_hexagon, check_snake, check_yang_baxter, crossing_from_pattern,
    crossing_operator, r_matrix,
)

RESULTS: list[str] = []


def _record(k, name, limit, fn):
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as e:  # report, then fail
        ok, detail = False, f"{type(e).__name__}: {e}"
    dt = time.perf_counter() - t0
    within = dt < limit
    line = (f"CRITERION {k} {name}: {'PASS' if ok and within else 'FAIL'} "
            f"({dt:.2f}s, limit {limit}s)" + (f" {detail}" if detail else ""))
    RESULTS.append(line)
    print(line)
    return ok and within, line


def c1():
    bad = [N for N in (1, 2, 3) if not (check_yang_baxter(r_matrix(N)) and check_hecke(N))]
    return not bad, f"failing N: {bad}" if bad else ""


def c2():
    mixes = list(itertools.product((V, VD), repeat=3))
    hex_bad = [m for m in mixes if not check_hexagon(*m, 2)]
    snake = check_snake(2)
    snake_bad = [k for k, v in snake.items() if not v]
    return not hex_bad and not snake_bad, (f"hexagon {hex_bad} snake {snake_bad}"
                                           if hex_bad or snake_bad else "")


def c3():
    bad = []
    for t in ALL_TYPES:
        P = witness_pattern(t)
        assert classify(P, 1, 2) == t
        op = crossing_from_pattern(P, 1, 2, 2)
        if len(op.strands_in) != 4 or op != crossing_operator(t, 2):
            bad.append(str(t))
    return not bad, f"mismatch {bad}" if bad else ""


def c4():
    bad = []
    for N in (2, 3):
        ann = build_presentation(ANNULUS, N)
        if not same_span(ann.vectors(), re_matrix_equations(N)):
            bad.append(f"Ann N={N}")
        tor = build_presentation(TORUS, N)
        spans = {lab: [r.vector() for r in tor.relations[f:f + c]] for lab, _, f, c in tor.blocks}
        tor_re = [r.vector() for lab, hs, f, c in tor.blocks if lab == "RE"
                  for r in tor.relations[f:f + c]]
        if not same_span(tor_re, re_matrix_equations(N, 0) + re_matrix_equations(N, 1)):
            bad.append(f"torus RE N={N}")
        if not same_span(spans["(Linked,+)"], elliptic_matrix_equations(N)):
            bad.append(f"torus cross N={N}")
    return not bad, f"mismatch {bad}" if bad else ""


def c5():
    pats = {"Ann": ANNULUS, "pants": PANTS, "torus": TORUS, "sigma(2,1)": sigma_pattern(2, 1)}
    bad = []
    counts = {}
    for name, P in pats.items():
        pres = build_presentation(P, 2)
        rs = rewrite_system(pres, 3)
        got = [rs.hilbert_count(d) for d in (1, 2, 3)]
        want = [commutative_count(pres.ngens, d) for d in (1, 2, 3)]
        counts[name] = got
        if got != want:
            bad.append((name, got, want))
    assert counts["Ann"][1:] == [10, 20] and counts["torus"][1] == 36
    return not bad, f"mismatch {bad}" if bad else ""


def c6():
    pats = [witness_pattern(t) for t in ALL_TYPES] + [TORUS, sigma_pattern(1, 2)]
    bad = [str(P) for P in pats if not quasiclassical_check(P, 2)]
    return not bad, f"failing {bad}" if bad else ""


def c7():
    bad = [N for N in (1, 2, 3) if not qcl_identity_check(N)]
    return not bad, f"failing N: {bad}" if bad else ""


def c8():
    bad = {str(P): jacobi_check(P, 2)[:3] for P in (ANNULUS, TORUS)}
    bad = {k: v for k, v in bad.items() if v}
    return not bad, f"violations {bad}" if bad else ""


def c9():
    bad = []
    for P, gr in ((ANNULUS, (0, 2)), (TORUS, (1, 1)), (PANTS, (0, 3))):
        top = topology(P)
        if (top.genus, top.boundary_components) != gr:
            bad.append(str(P))
    for g in range(4):
        for r in range(1, 5):
            top = topology(sigma_pattern(g, r))
            if (top.genus, top.boundary_components) != (g, r):
                bad.append(f"sigma({g},{r})")
    rng = random.Random(20240601)
    for _ in range(200):
        P = random_pattern(rng.randint(1, 6), rng)
        top = topology(P)
        if not (top.euler_char == 1 - P.n == 2 - 2 * top.genus - top.boundary_components):
            bad.append(str(P))
    return not bad, f"failing {bad[:5]}" if bad else ""


def c10():
    A, B = TORUS, ANNULUS
    U = disjoint_union(A, B)
    bad = []
    for i in range(1, A.n + 1):
        for j in range(A.n + 1, U.n + 1):
            if classify(U, i, j) != CrossingType(Kind.UNLINKED, 1):
                bad.append(("type", i, j))
    pu, pa, pb = (build_presentation(P, 2) for P in (U, A, B))
    shift = pa.ngens
    for d in (1, 2, 3):
        for w in itertools.product(range(pa.ngens), repeat=d):
            if normal_form(w, pu) != normal_form(w, pa):
                bad.append(("A", w))
        for w in itertools.product(range(pb.ngens), repeat=d):
            got = normal_form(tuple(g + shift for g in w), pu)
            want = {tuple(g + shift for g in m): c for m, c in normal_form(w, pb).items()}
            if got != want:
                bad.append(("B", w))
    return not bad, f"failing {bad[:5]}" if bad else ""


CRITERIA = [
    (1, "Yang-Baxter and Hecke, N=1,2,3", 5, c1),
    (2, "hexagon and snake coherence, N=2", 10, c2),
    (3, "crossing operators from witness patterns, N=2", 10, c3),
    (4, "reflection and elliptic matrix relations, N=2,3", 30, c4),
    (5, "Hilbert counts equal commutative counts to degree 3", 300, c5),
    (6, "quasi-classical limit equals Fock-Rosly brackets", 60, c6),
    (7, "first-order crossing identity, N=1,2,3", 30, c7),
    (8, "Jacobi identity for Ann and torus, N=2", 120, c8),
    (9, "surface topology and Euler characteristic", 5, c9),
    (10, "disjoint union is the braided tensor product", 60, c10),
]


@pytest.mark.parametrize("k,name,limit,fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(k, name, limit, fn):
    ok, line = _record(k, name, limit, fn)
    assert ok, line


if __name__ == "__main__":
    results = [_record(*c)[0] for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
