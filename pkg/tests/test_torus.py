import random
from fractions import Fraction

import pytest

from daggerhom.torus import (TorusElement, TorusError, TorusTensor, U1, U2, charge_audit,
                             charge_zero_generators, graded_totals, hh_bidegree, hh_total,
                             hochschild_d0, hochschild_d1, image_relation_violations,
                             kernel_relation_check, koszul_b0, koszul_b1, koszul_b1_u2_variant,
                             koszul_b2, windowed_totals)

LAM = Fraction(6, 5)


def mono(m, n, c=1, lam=LAM):
    return TorusElement.monomial(lam, m, n, c)


def rand_elem(rng, lam=LAM, n=4, r=3):
    return TorusElement(lam, {(rng.randint(-r, r), rng.randint(-r, r)): Fraction(rng.randint(-5, 5), rng.choice([1, 2, 7]))
                              for _ in range(n)})


def rand_tensor(rng, lam=LAM, n=4):
    return TorusTensor(lam, {((rng.randint(-2, 2), rng.randint(-2, 2)), (rng.randint(-2, 2), rng.randint(-2, 2))):
                             Fraction(rng.randint(-5, 5), rng.choice([1, 3])) for _ in range(n)})


def one():
    return TorusElement.one(LAM)


def tensor(f, g):
    return TorusTensor.simple(f, g)


def test_commutation_and_normal_form():
    assert U2(LAM) * U1(LAM) == (U1(LAM) * U2(LAM)).scale(LAM)
    for m in range(-3, 4):
        for n in range(-3, 4):
            assert mono(0, n) * mono(m, 0) == mono(m, n, LAM ** (n * m))


def test_b2_example():
    t = tensor(one(), one())
    first, second = koszul_b2(t)
    assert first == tensor(one(), U2(LAM)).scale(LAM) - tensor(U2(LAM), one())
    assert second == tensor(one(), U1(LAM)).scale(-1) + tensor(U1(LAM), one()).scale(LAM)


def test_b1_examples():
    zero = TorusTensor(LAM)
    t = tensor(one(), one())
    assert koszul_b1((t, zero)) == tensor(U1(LAM), one()) - tensor(one(), U1(LAM))
    assert koszul_b1((zero, t)) == tensor(U2(LAM), one()) - tensor(one(), U2(LAM))


def test_b0_examples():
    assert koszul_b0(tensor(U1(LAM), U2(LAM))) == mono(1, 1)
    assert koszul_b0(tensor(U2(LAM), U1(LAM))) == mono(1, 1, LAM)


def test_koszul_is_a_complex():
    rng = random.Random(1)
    for _ in range(100):
        t = rand_tensor(rng)
        assert koszul_b1(koszul_b2(t)).is_zero()
        pr = (rand_tensor(rng), rand_tensor(rng))
        assert koszul_b0(koszul_b1(pr)).is_zero()


def test_u2_variant_is_not_a_complex():
    zero = TorusTensor(LAM)
    t = tensor(one(), one())
    assert not koszul_b0(koszul_b1_u2_variant((t, zero))).is_zero()


def test_b2_charge_bookkeeping():
    rng = random.Random(2)
    for _ in range(30):
        k1 = (rng.randint(-2, 2), rng.randint(-2, 2))
        k2 = (rng.randint(-2, 2), rng.randint(-2, 2))
        t = TorusTensor(LAM, {(k1, k2): 1})
        total = (k1[0] + k2[0], k1[1] + k2[1])
        first, second = koszul_b2(t)
        for (a, b) in first.terms:
            assert (a[0] + b[0], a[1] + b[1]) == (total[0], total[1] + 1)
        for (a, b) in second.terms:
            assert (a[0] + b[0], a[1] + b[1]) == (total[0] + 1, total[1])


def test_d1_examples():
    assert hochschild_d1(one()) == (U2(LAM).scale(LAM - 1), U1(LAM).scale(LAM - 1))
    s1, s2 = hochschild_d1(mono(-1, -1))
    assert s1.is_zero() and s2.is_zero()


def test_d1_monomial_formula():
    for m in range(-3, 4):
        for n in range(-3, 4):
            s1, s2 = hochschild_d1(mono(m, n))
            assert s1 == mono(m, n + 1, LAM ** (m + 1) - 1)
            assert s2 == mono(m + 1, n, LAM ** (n + 1) - 1)


def test_d0_examples_and_formula():
    zero = TorusElement(LAM)
    assert hochschild_d0(mono(-1, 0), zero).is_zero()
    assert hochschild_d0(U2(LAM), zero) == mono(1, 1, LAM - 1)
    for m in range(-3, 4):
        for n in range(-3, 4):
            assert hochschild_d0(mono(m, n), zero) == mono(m + 1, n, LAM ** n - 1)
            assert hochschild_d0(zero, mono(m, n)) == mono(m, n + 1, 1 - LAM ** m)


def test_d0_d1_zero():
    rng = random.Random(3)
    for _ in range(100):
        assert hochschild_d0(*hochschild_d1(rand_elem(rng))).is_zero()


def test_charge_audit_clean():
    assert charge_audit(LAM, 3) == []
    assert charge_audit(Fraction(-1), 2) == []


def test_kernel_relation_examples():
    zero = TorusElement(LAM)
    assert kernel_relation_check(mono(-1, 0), zero)
    assert kernel_relation_check(*hochschild_d1(rand_elem(random.Random(4))))
    assert not kernel_relation_check(U2(LAM), zero)


def test_kernel_relation_characterises_kernel():
    rng = random.Random(5)
    for _ in range(200):
        if rng.random() < 0.5:
            a, b = hochschild_d1(rand_elem(rng))
            a = a + mono(-1, rng.randint(-2, 2), rng.randint(1, 3)) * (rng.random() < 0.5)
            b = b + mono(rng.randint(-2, 2), -1, rng.randint(1, 3)) * (rng.random() < 0.5)
        else:
            a, b = rand_elem(rng, n=2), rand_elem(rng, n=2)
        assert kernel_relation_check(a, b) == hochschild_d0(a, b).is_zero()


def test_image_relations():
    rng = random.Random(6)
    for _ in range(100):
        assert image_relation_violations(hochschild_d1(rand_elem(rng))) == []
    assert image_relation_violations((mono(-1, 0), TorusElement(LAM)))


def test_bidegree_examples():
    assert hh_bidegree(LAM, 0, 0) == (1, 2, 1)
    assert hh_bidegree(LAM, 3, 5) == (0, 0, 0)
    assert hh_bidegree(Fraction(-1), 2, 2) == (1, 2, 1)


def test_generic_charges_are_acyclic():
    for lam in (LAM, Fraction(2), Fraction(-3, 7)):
        for M in range(-4, 5):
            for N in range(-4, 5):
                if (M, N) != (0, 0):
                    assert hh_bidegree(lam, M, N) == (0, 0, 0)


def test_hh_total_headline():
    res = hh_total(LAM, 6, method="both", p=5)
    assert res.dims == (1, 2, 1, 0)
    assert res.stabilized and res.agreement
    assert not res.degenerate
    assert any("not a 5-adic unit" in n for n in res.notes)


def test_hh_total_at_unit_lambdas():
    for lam, p in ((LAM, 7), (Fraction(6), 5), (Fraction(2, 3), 5)):
        res = hh_total(lam, 5, method="both", p=p)
        assert res.dims == (1, 2, 1, 0)
        assert res.notes == []


def test_require_unit():
    with pytest.raises(TorusError):
        hh_total(LAM, 4, p=5, require_unit=True)
    with pytest.raises(TorusError):
        hh_total(0, 4)
    with pytest.raises(TorusError):
        hh_total(LAM, 4, method="spectral")


def test_generators():
    gens = charge_zero_generators(LAM)
    assert gens["HH0"] == [one()]
    assert gens["HH2"] == [mono(-1, -1)]
    pairs = gens["HH1"]
    assert len(pairs) == 2
    zero = TorusElement(LAM)
    supports = sorted((tuple(a.terms), tuple(b.terms)) for a, b in pairs)
    assert supports == [((), ((0, -1),)), (((-1, 0),), ())]
    for a, b in pairs:
        assert hochschild_d0(a, b).is_zero()
    for a, b in [(mono(-1, 0), zero), (zero, mono(0, -1))]:
        assert image_relation_violations((a, b))


def test_graded_and_windowed_agree():
    for w in range(4, 9):
        assert graded_totals(LAM, w) == windowed_totals(LAM, w) == (1, 2, 1, 0)


def test_degenerate_lambda():
    res = hh_total(Fraction(-1), 6)
    assert res.degenerate
    assert not res.stabilized and res.dims is None
    assert any("root of unity" in n for n in res.notes)
    res1 = hh_total(Fraction(1), 4)
    assert res1.degenerate and not res1.stabilized
