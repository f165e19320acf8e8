from tmotive.ff import FiniteField
from tmotive.poly import (Poly, PolyRing, enumerate_monic_irreducibles,
                          is_irreducible, monic_polys_of_degree, theta_ring)
from tmotive.grammar import parse_poly

import pytest

F2 = FiniteField.get(2)
F3 = FiniteField.get(3)


def brute_force_irreducible(f):
    """Oracle: trial division by every monic polynomial of lower degree."""
    d = f.degree()
    if d < 1:
        return False
    for e in range(1, d // 2 + 1):
        for g in monic_polys_of_degree(f.ring, e):
            if (f % g).is_zero():
                return False
    return True


def test_irreducibility_against_brute_force():
    for field in (F2, F3):
        for d in range(1, 5):
            for f in monic_polys_of_degree(field, d):
                assert is_irreducible(f) == brute_force_irreducible(f)


def test_enumeration_q2_small():
    R = theta_ring(F2)
    assert [repr(f) for f in enumerate_monic_irreducibles(F2, 1)] == ["t", "t+1"]
    deg2 = enumerate_monic_irreducibles(F2, 2)
    assert [repr(f) for f in deg2] == ["t", "t+1", "t^2+t+1"]


def test_enumeration_counts_q2():
    # counts per degree computed by the brute-force oracle above
    counts = {}
    for f in enumerate_monic_irreducibles(F2, 6):
        counts[f.degree()] = counts.get(f.degree(), 0) + 1
    assert [counts[d] for d in range(1, 7)] == [2, 1, 2, 3, 6, 9]


@pytest.mark.parametrize("field,dmax", [(F2, 4), (F3, 4)])
def test_product_over_divisors_identity(field, dmax):
    # product of all monic irreducibles of degree dividing d equals t^(q^d) - t
    q = field.order
    R = theta_ring(field)
    t = R.gen()
    irr = enumerate_monic_irreducibles(field, dmax)
    for d in range(1, dmax + 1):
        prod = R.one
        for f in irr:
            if d % f.degree() == 0:
                prod = prod * f
        assert prod == Poly.monomial(field, "t", field.one, q ** d) - t


def test_divmod_and_gcd():
    R = theta_ring(F3)
    a = parse_poly("t^4+2*t^2+t+1", R)
    b = parse_poly("t^2+1", R)
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.degree() < b.degree()
    g = (a * b).gcd(b)
    assert g == b.monic()


def test_exact_div_raises_when_not_exact():
    R = theta_ring(F2)
    a = parse_poly("t^2+1", R)
    b = parse_poly("t^2+t", R)
    from tmotive.errors import ValidationError
    with pytest.raises(ValidationError):
        a.exact_div(b)


def test_element_frob_is_q_power():
    R = theta_ring(F3)
    a = parse_poly("t^2+2*t+1", R)
    assert a.element_frob(1, 3) == a ** 3
    assert a.element_frob(2, 3) == a ** 9


def test_eval():
    R = theta_ring(F2)
    f = parse_poly("t^2+t+1", R)
    assert f.eval(F2.one) == F2.one
    assert f.eval(F2.zero) == F2.one
