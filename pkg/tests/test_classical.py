import itertools
import random
from fractions import Fraction

import pytest
import sympy

from qmoduli.algebra import Generator
from qmoduli.classical import (
    VFKind, VectorFieldAction, antisymmetry_violations, bracket_table, check_cybe,
    classical_r, contract, first_order_brackets, fr_bivector, fr_bracket, jacobi_check,
    poly_add, poly_mul, poly_str, qcl_identity_check, quasiclassical_check,
    quasiclassical_report, sts_bracket, vf_action,
)
from qmoduli.pattern import (
    ALL_TYPES, ANNULUS, PANTS, TORUS, CrossingType, Kind, parse_pattern, sigma_pattern,
    witness_pattern,
)

h = sympy.Symbol("h")


# -- oracle: first-order expansion of the matrix relations with commuting entries

def _sym_r(N):
    """hbar-linear part of R at q = exp(hbar/2)."""
    q = sympy.exp(h / 2)
    r = sympy.zeros(N * N, N * N)
    for i in range(N):
        for j in range(N):
            e = q if i == j else 1
            r[i * N + j, i * N + j] = sympy.series(e, h, 0, 2).coeff(h, 1)
            if i > j:
                r[i * N + j, j * N + i] = sympy.series(q - 1 / q, h, 0, 2).coeff(h, 1)
    return r


def _flip(N):
    P = sympy.zeros(N * N, N * N)
    for i in range(N):
        for j in range(N):
            P[j * N + i, i * N + j] = 1
    return P


def _coords(hd, N):
    return sympy.Matrix(N, N, lambda i, j: sympy.Symbol(f"x{(hd * N + i) * N + j}"))


def _poly(e):
    e = sympy.expand(e)
    out = {}
    for term in sympy.Add.make_args(e):
        if term == 0:
            continue
        c, rest = term.as_coeff_Mul()
        mono = []
        for f in sympy.Mul.make_args(rest):
            b, ex = f.as_base_exp()
            mono += [int(str(b)[1:])] * int(ex)
        out[tuple(sorted(mono))] = out.get(tuple(sorted(mono)), 0) + Fraction(int(c.p), int(c.q))
    return {m: v for m, v in out.items() if v}


def oracle_same_handle(N):
    """{A1, A2} from the reflection equation at order hbar."""
    A = _coords(0, N)
    I = sympy.eye(N)
    A1, A2 = sympy.kronecker_product(A, I), sympy.kronecker_product(I, A)
    r = _sym_r(N)
    r21 = _flip(N) * r * _flip(N)
    return A2 * r21 * A1 + A2 * A1 * r - r21 * A1 * A2 - A1 * r * A2


def oracle_linked(N):
    """{A1, D2} from A1 R D2 = R D2 R21 A1 R at order hbar."""
    A, D = _coords(0, N), _coords(1, N)
    I = sympy.eye(N)
    A1, D2 = sympy.kronecker_product(A, I), sympy.kronecker_product(I, D)
    r = _sym_r(N)
    r21 = _flip(N) * r * _flip(N)
    return r * D2 * A1 + D2 * r21 * A1 + D2 * A1 * r - A1 * r * D2


# -- classical r-matrix

def test_classical_r_n1():
    cr = classical_r(1)
    key = ((0, 0), (0, 0))
    assert cr.r == {key: Fraction(1, 2)} and cr.rho == {} and cr.t == {key: Fraction(1, 2)}


def test_t_is_half_casimir_n2():
    cr = classical_r(2)
    hand = {((a, b), (b, a)): Fraction(1, 2) for a in range(2) for b in range(2)}
    assert cr.t == hand


def test_rho_antisymmetric_and_r_decomposes():
    cr = classical_r(3)
    for k, v in cr.rho.items():
        assert cr.rho.get(((k[0][1], k[0][0]), (k[1][1], k[1][0]))) == -v
    assert poly_add(cr.rho, cr.t) == cr.r


@pytest.mark.parametrize("N", [1, 2, 3])
def test_cybe(N):
    assert check_cybe(N)


def test_classical_r_errors():
    with pytest.raises(ValueError):
        classical_r(0)


# -- vector fields

def test_vf_action_examples():
    I2 = [[1, 0], [0, 1]]
    assert vf_action(VectorFieldAction(VFKind.ADJOINT, I2), (1, 2)) == {}
    E11 = [[1, 0], [0, 0]]
    assert vf_action(VectorFieldAction(VFKind.LEFT, E11), (1, 2)) == {}
    assert vf_action(VectorFieldAction(VFKind.LEFT, E11), (1, 1)) == {(1, 1): 1}
    assert vf_action(VectorFieldAction(VFKind.RIGHT, E11), (1, 2)) == {(1, 2): 1}


def test_adjoint_is_right_minus_left():
    rng = random.Random(7)
    for _ in range(20):
        x = [[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)]
        for c in itertools.product(range(1, 4), repeat=2):
            ad = vf_action(VectorFieldAction(VFKind.ADJOINT, x), c)
            r = vf_action(VectorFieldAction(VFKind.RIGHT, x), c)
            l = vf_action(VectorFieldAction(VFKind.LEFT, x), c)
            assert ad == {k: v for k, v in poly_add(r, l, coefs=(1, -1)).items()}


# -- brackets against the matrix-relation oracle

@pytest.mark.parametrize("N", [2, 3])
def test_sts_matches_reflection_equation(N):
    M = oracle_same_handle(N)
    for (i, j, k, l) in itertools.product(range(N), repeat=4):
        assert sts_bracket(N, (i + 1, j + 1), (k + 1, l + 1)) == _poly(M[i * N + k, j * N + l])


def test_linked_bracket_matches_elliptic_relation():
    N = 2
    M = oracle_linked(N)
    for (i, j, k, l) in itertools.product(range(N), repeat=4):
        got = fr_bracket(TORUS, (1, i + 1, j + 1), (2, k + 1, l + 1), N)
        assert got == _poly(M[i * N + k, j * N + l])


def test_sts_n1_zero_and_antisymmetric():
    assert sts_bracket(1, (1, 1), (1, 1)) == {}
    for a, b in itertools.product(itertools.product(range(1, 3), repeat=2), repeat=2):
        assert poly_add(sts_bracket(2, a, b), sts_bracket(2, b, a)) == {}


def test_same_handle_is_sts():
    for a, b in itertools.product(itertools.product(range(1, 3), repeat=2), repeat=2):
        shifted = {tuple(g + 4 for g in m): c for m, c in sts_bracket(2, a, b).items()}
        assert fr_bracket(TORUS, (2, *a), (2, *b), 2) == shifted
        assert fr_bracket(TORUS, (1, *a), (1, *b), 2) == sts_bracket(2, a, b)


def test_n1_brackets():
    # unlinked and nested handles commute at N = 1; linked ones form a quantum torus
    for P in (PANTS, witness_pattern(CrossingType(Kind.NESTED, 1))):
        assert fr_bracket(P, (1, 1, 1), (2, 1, 1), 1) == {}
    assert fr_bracket(TORUS, (2, 1, 1), (1, 1, 1), 1) == {(0, 1): Fraction(-1)}
    assert quasiclassical_check(TORUS, 1)
    assert quasiclassical_check(ANNULUS, 1)


def test_nested_bracket_is_bivector_contraction():
    P = witness_pattern(CrossingType(Kind.NESTED, 1))
    cr = classical_r(2)
    f, g = Generator(1, 1, 2).index(2), Generator(2, 2, 1).index(2)
    expect = poly_add(contract(cr.r, "ad", "ad", f, g, 2), contract(cr.t, "r", "r", f, g, 2),
                      contract(cr.t, "r", "l", f, g, 2), coefs=(1, -2, 2))
    assert fr_bracket(P, (1, 1, 2), (2, 2, 1), 2) == expect
    assert fr_bivector(Kind.NESTED, f, g, 2) == expect


def test_fr_bracket_bad_handle():
    with pytest.raises(IndexError):
        fr_bracket(TORUS, (3, 1, 1), (1, 1, 1), 2)
    with pytest.raises(IndexError):
        fr_bracket(TORUS, (1, 3, 1), (1, 1, 1), 2)


# -- quasi-classical limit

@pytest.mark.parametrize("t", ALL_TYPES, ids=str)
def test_quasiclassical_witness(t):
    assert quasiclassical_check(witness_pattern(t), 2)


@pytest.mark.parametrize("P", [TORUS, sigma_pattern(1, 2), ANNULUS], ids=str)
def test_quasiclassical_surfaces(P):
    assert quasiclassical_check(P, 2)


def test_negative_type_needs_handle_exchange():
    # for a negative pair {f_i, g_j} = -X(dg, df) with X the positive bivector;
    # the literal reading -X(df, dg) disagrees with the quantum brackets
    P = witness_pattern(CrossingType(Kind.LINKED, -1))
    fo = first_order_brackets(P, 2)
    cross = [(b, a, v) for (b, a), v in fo.items() if b // 4 != a // 4]
    assert len(cross) == 16
    assert all(v == fr_bivector(Kind.LINKED, b, a, 2) for b, a, v in cross)
    assert any(v != fr_bivector(Kind.LINKED, a, b, 2) for b, a, v in cross)


def test_report_fields():
    rep = quasiclassical_report(TORUS, 2)
    assert len(rep) == 8 * 7 // 2
    assert all(r.ok for r in rep)
    assert poly_str(rep[0].quantum, 2) == poly_str(rep[0].classical, 2)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_qcl_identity(N):
    assert qcl_identity_check(N)


# -- Jacobi and antisymmetry

@pytest.mark.parametrize("P", [ANNULUS, TORUS], ids=str)
def test_jacobi(P):
    assert jacobi_check(P, 2) == []
    assert antisymmetry_violations(P, 2) == []


def test_jacobi_detects_broken_bracket():
    import qmoduli.classical as cl
    table = bracket_table(TORUS, 2)
    # scale the cross-handle part of the bracket: Jacobi fails
    broken = {k: (poly_add(v, coefs=(2,)) if k[0] // 4 != k[1] // 4 else v) for k, v in table.items()}
    bad = [t for t in itertools.product(range(8), repeat=3)
           if poly_add(cl.bracket_with_poly(broken, t[0], broken[(t[1], t[2])]),
                       cl.bracket_with_poly(broken, t[1], broken[(t[2], t[0])]),
                       cl.bracket_with_poly(broken, t[2], broken[(t[0], t[1])]))]
    assert bad


def test_poly_helpers():
    p = {(0,): Fraction(1)}
    assert poly_mul(p, {(1,): Fraction(2)}) == {(0, 1): Fraction(2)}
    assert poly_add(p, p, coefs=(1, -1)) == {}
    assert poly_str({}, 2) == "0"
    assert poly_str({(0, 5): Fraction(-1)}, 2) == "-1*t1_11*t2_12"
