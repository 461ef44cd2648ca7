import itertools
import random
from fractions import Fraction

import pytest

from hklab.diagonal import (
    DiagonalLimits,
    DiagonalSpec,
    d_char0,
    d_f,
    diagonal_limits,
    diagonal_ring,
    g_lambda,
    g_value,
    sandwich_check,
)

HALF = Fraction(1, 2)


# ------------------------------------------------------------------- d_f


def test_two_variable_rule_sample():
    for p in (5, 7, 11):
        for a, b in [(1, 1), (2, 5), (5, 2), (4, 4), (8, 3), (7, 8)]:
            assert d_f(p, a, b) == min(a, b)


def test_cube_example():
    # (x+y)^3 = 3x^2y + 3xy^2 in F_7[x,y]/(x^3,y^3): rank-2 image
    assert d_f(7, 3, 3, 3) == 7


def test_square_example():
    assert d_f(5, 2, 2, 2) == 3


def test_char_divides_power_collapse():
    # (x+y)^3 vanishes identically mod 3, so nothing is killed
    assert d_f(3, 3, 3, 3) == 9


def test_symmetric_in_all_slots():
    rng = random.Random(11)
    for p in (7, 11):
        for _ in range(6):
            ks = tuple(rng.randint(1, 5) for _ in range(rng.choice((3, 4))))
            vals = {d_f(p, *perm) for perm in itertools.permutations(ks)}
            assert len(vals) == 1, (p, ks, vals)


def test_monotone_in_each_slot():
    base = (2, 3, 4)
    for i in range(3):
        grown = tuple(k + 1 if j == i else k for j, k in enumerate(base))
        assert d_f(7, *grown) >= d_f(7, *base)


def test_d_f_input_validation():
    with pytest.raises(ValueError):
        d_f(7, 3)
    with pytest.raises(ValueError):
        d_f(7, 3, 0)


# ---------------------------------------------------------------- d_char0


def test_char0_two_variables():
    assert d_char0(5, 9) == 5
    assert d_char0(9, 5) == 5


def test_char0_cube():
    assert d_char0(3, 3, 3) == 7


@pytest.mark.parametrize("N", range(1, 9))
def test_char0_equal_cubes_density(N):
    assert d_char0(N, N, N) == -(-3 * N * N // 4)


def test_char0_sampling_cap():
    with pytest.raises(RuntimeError, match="no stabilization"):
        d_char0(3, 3, 3, max_samples=1)


# ------------------------------------------------------------------ g sums


def test_g_lambda_unit_cube_center():
    assert g_lambda((1, 1, 1), 0) == 6


def test_g_lambda_five_halves():
    xs = [HALF] * 5
    assert g_lambda(xs, 1) == Fraction(1, 16)
    assert g_lambda(xs, 2) == 0
    assert g_lambda(xs, -2) == 0


def test_g_lambda_full_support_annihilates():
    # once every sign vector participates, the signed power sum telescopes
    # to zero
    rng = random.Random(5)
    for _ in range(8):
        xs = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(3)]
        lam = -int(sum(xs) // 2) - 1
        assert g_lambda(xs, lam) == 0


def test_g_lambda_vanishes_above_support():
    rng = random.Random(6)
    for _ in range(8):
        xs = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(4)]
        lam = int(sum(xs) // 2) + 1
        assert g_lambda(xs, lam) == 0


def test_g_value_unit_cube():
    gv = g_value((1, 1, 1))
    assert gv.prefactor == Fraction(1, 8)
    assert gv.lambda_terms == {-1: 1, 0: 6, 1: 1}
    assert gv.total == 1


def test_g_value_three_halves():
    gv = g_value([HALF, HALF, HALF])
    assert gv.lambda_terms[0] == Fraction(3, 2)
    assert gv.total == Fraction(3, 16)


def test_g_value_permutation_invariant():
    xs = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 5), 1]
    totals = {g_value(perm).total for perm in itertools.permutations(xs)}
    assert len(totals) == 1


def test_g_value_json_shape():
    d = g_value((1, 1, 1)).to_json_dict()
    assert d["prefactor"] == "1/8"
    assert d["total"] == "1/1"
    assert d["lambda_terms"] == {"-1": "1/1", "0": "6/1", "1": "1/1"}


# ------------------------------------------------------------------- limits


def test_limits_regular_ring():
    assert diagonal_limits(DiagonalSpec((1, 1, 1))) == DiagonalLimits(
        Fraction(1), Fraction(3, 4)
    )


def test_limits_quadric():
    assert diagonal_limits(DiagonalSpec((2, 2, 2))) == DiagonalLimits(
        Fraction(3, 2), Fraction(3, 2)
    )


def test_limits_quartic_four_vars():
    got = diagonal_limits(DiagonalSpec((4, 4, 4, 4)))
    assert got.e_hk_infinity == Fraction(8, 3)


def test_limits_plane_pair():
    assert diagonal_limits(DiagonalSpec((2, 2))).e_hk_infinity == 2


def test_spec_validation():
    with pytest.raises(ValueError):
        DiagonalSpec((3,))
    with pytest.raises(ValueError):
        DiagonalSpec((2, 0))


# ----------------------------------------------------------------- sandwich


def test_sandwich_quadric_surface_p5():
    rep = sandwich_check(DiagonalSpec((2, 2, 2)), 5, 1)
    assert (rep.lower, rep.value, rep.upper) == (
        Fraction(24, 25),
        Fraction(37, 25),
        Fraction(56, 25),
    )
    assert rep.gap == Fraction(32, 25)
    assert rep.gap_p == Fraction(32, 5)


def test_sandwich_quadric_surface_deeper_power():
    rep = sandwich_check(DiagonalSpec((2, 2, 2)), 5, 2)
    assert rep.value == Fraction(937, 625)
    assert rep.lower == Fraction(24, 25) and rep.upper == Fraction(56, 25)


def test_sandwich_gap_shrinks_with_p():
    gaps = [
        sandwich_check(DiagonalSpec((2, 2, 2)), p, 1).gap for p in (5, 7, 13)
    ]
    assert gaps[0] > gaps[1] > gaps[2]


def test_sandwich_four_variables():
    rep = sandwich_check(DiagonalSpec((2, 2, 2, 2)), 3, 1)
    assert (rep.lower, rep.value, rep.upper) == (
        Fraction(16, 27),
        Fraction(35, 27),
        Fraction(32, 9),
    )


def test_sandwich_regular_ring_hits_lower_bound():
    rep = sandwich_check(DiagonalSpec((1, 1, 1)), 3, 1)
    assert rep.lower == rep.value == 1
    assert rep.upper == Fraction(4, 3)


def test_sandwich_plane_pair():
    rep = sandwich_check(DiagonalSpec((2, 2)), 5, 1)
    assert (rep.lower, rep.value, rep.upper) == (
        Fraction(8, 5),
        Fraction(9, 5),
        Fraction(12, 5),
    )


def test_sandwich_needs_equal_exponents():
    with pytest.raises(ValueError, match="equal"):
        sandwich_check(DiagonalSpec((2, 3, 2)), 5, 1)
    with pytest.raises(ValueError):
        sandwich_check(DiagonalSpec((2, 2, 2)), 5, 0)


def test_diagonal_ring_shape():
    ring = diagonal_ring(DiagonalSpec((4, 4, 4)), 7)
    assert ring.krull_dim == 2
    assert str(ring.relation) == "x^4+y^4+z^4"
