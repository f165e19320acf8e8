from tmotive.errors import ValidationError
from tmotive.ff import FF, FiniteField, embed, extension_root, unify

import pytest


def test_prime_field_arithmetic():
    F3 = FiniteField.get(3)
    a = F3.coerce(2)
    b = F3.coerce(2)
    assert (a + b).to_int() == 1
    assert (a * b).to_int() == 1
    assert (a / b).to_int() == 1
    assert a.inverse() * a == F3.one
    assert -a == F3.coerce(1)


def test_extension_field_f4():
    F4 = FiniteField.get(2, 2)
    g = F4.gen
    # modulus is x^2+x+1, so g^2 = g+1
    assert g * g == g + F4.one
    assert g ** 3 == F4.one
    assert g.inverse() == g * g


def test_field_spec_validation():
    with pytest.raises(ValidationError):
        FiniteField(4)
    with pytest.raises(ValidationError):
        FiniteField(2, 2, modulus=(0, 0, 1))  # x^2 reducible


def test_embedding_consistency():
    F2 = FiniteField.get(2)
    F4 = FiniteField.get(2, 2)
    F16 = FiniteField.get(2, 4)
    x = F4.gen
    y = embed(x, F16)
    # embeddings are ring maps
    assert embed(x * x, F16) == y * y
    assert embed(x + F4.one, F16) == y + F16.one
    assert embed(F2.one, F4) == F4.one


def test_unify_incomparable_degrees():
    F4 = FiniteField.get(2, 2)
    F8 = FiniteField.get(2, 3)
    a, b = unify(F4.gen, F8.gen)
    assert a.field.k == 6 and b.field.k == 6
    assert a ** 3 == a.field.one  # image of F4 generator keeps its order


def test_frobenius_is_field_automorphism():
    F9 = FiniteField.get(3, 2)
    for m in range(9):
        for n in range(9):
            a, b = F9.element_from_int(m), F9.element_from_int(n)
            assert (a + b) ** 3 == a ** 3 + b ** 3
            assert (a * b) ** 3 == a ** 3 * b ** 3


def test_nth_root_within_field():
    F4 = FiniteField.get(2, 2)
    g = F4.gen
    r = (g ** 2).nth_root(2)
    assert r is not None and r ** 2 == g ** 2
    assert F4.one.nth_root(3) is not None


def test_extension_root_grows_field():
    # cube root of unity other than 1 needs F_4 over F_2
    F2 = FiniteField.get(2)
    r = extension_root(F2.one, 3, base_degree=1)
    assert r ** 3 == r.field.one


def test_element_order():
    F8 = FiniteField.get(2, 3)
    assert F8.gen.order_mult() == 7
    assert F8.one.order_mult() == 1
