"""Group algebras, linear-growth gauges and the noncommutative torus twist."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from .group import Element, FreeAbelianGroup, Group, ProductGroup
from .scalar import INF, as_scalar, is_unit, valuation


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class Cocycle:
    """``c((m1, n1), (m2, n2)) = lam ** (n1 * m2)`` on Z^2."""

    lam: Fraction

    def __post_init__(self):
        lam = as_scalar(self.lam)
        if lam == 0:
            raise AlgebraError("lambda must be nonzero")
        object.__setattr__(self, "lam", lam)

    def __call__(self, x, y) -> Fraction:
        return self.lam ** (x[1] * y[0])

    def check_unit(self, p: int) -> bool:
        return is_unit(self.lam, p)


def _clean(terms: Mapping) -> Dict:
    return {k: Fraction(v) for k, v in terms.items() if v}


@dataclass(frozen=True)
class AlgebraElement:
    group: Group
    terms: Mapping[Element, Fraction] = field(default_factory=dict)
    twist: Optional[Cocycle] = None

    def __post_init__(self):
        object.__setattr__(self, "terms", _clean(self.terms))
        if self.twist is not None and not (
                isinstance(self.group, FreeAbelianGroup) and self.group.rank == 2):
            raise AlgebraError("twists are only defined on Z^2")

    @classmethod
    def delta(cls, group: Group, g: Element, coeff=1, twist: Optional[Cocycle] = None):
        return cls(group, {g: as_scalar(coeff)}, twist)

    @classmethod
    def one(cls, group: Group, twist: Optional[Cocycle] = None):
        return cls.delta(group, group.identity(), 1, twist)

    def _like(self, terms) -> "AlgebraElement":
        return AlgebraElement(self.group, terms, self.twist)

    def _check(self, other: "AlgebraElement"):
        if self.group != other.group:
            raise AlgebraError("group mismatch")
        if self.twist != other.twist:
            raise AlgebraError("twist mismatch")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for g, v in other.terms.items():
            out[g] = out.get(g, 0) + v
        return self._like(out)

    def __neg__(self):
        return self._like({g: -v for g, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "AlgebraElement":
        c = as_scalar(c)
        return self._like({g: c * v for g, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return convolve(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __eq__(self, other):
        return (isinstance(other, AlgebraElement) and self.group == other.group
                and self.twist == other.twist and self.terms == other.terms)

    def __hash__(self):
        return hash((self.group, frozenset(self.terms.items())))

    def support(self):
        return sorted(self.terms, key=self.group.sort_key)

    def __repr__(self):
        parts = [f"{v}*d[{self.group.format_element(g)}]" for g, v in
                 ((g, self.terms[g]) for g in self.support())]
        return " + ".join(parts) if parts else "0"


def convolve(f: AlgebraElement, h: AlgebraElement) -> AlgebraElement:
    """(Twisted) convolution: ``(f*h)(k) = sum_{g g' = k} f(g) h(g') c(g, g')``."""
    f._check(h)
    G = f.group
    c = f.twist
    out: Dict[Element, Fraction] = {}
    for g, a in f.terms.items():
        for g2, b in h.terms.items():
            k = G.multiply(g, g2)
            v = a * b
            if c is not None:
                v *= c(g, g2)
            out[k] = out.get(k, 0) + v
    return f._like(out)


def dagger_gauge(f: AlgebraElement, p: int):
    """Largest c with ``nu(x_g) + 1 >= c * l(g)`` on the support; ``inf`` if none binds.

    Returns a Fraction; a coefficient with ``nu(x_g) + 1 < 0`` gives a negative
    gauge (the element is then not in V[G] at all).
    """
    best = INF
    for g, x in f.terms.items():
        lg = f.group.word_length(g)
        if lg == 0:
            continue
        ratio = Fraction(valuation(x, p) + 1, lg)
        if ratio < best:
            best = ratio
    return best


def family_gauge(elements, p: int):
    """Common gauge of a family: the minimum of the individual gauges."""
    return min((dagger_gauge(f, p) for f in elements), default=INF)


def in_linear_growth(f: AlgebraElement, n: int, p: int) -> bool:
    """Membership in ``M_n``: ``nu(x_g) + 1 >= l(g) / n`` for every coefficient."""
    if n <= 0:
        raise AlgebraError("n must be positive")
    return all(valuation(x, p) + 1 >= Fraction(f.group.word_length(g), n)
               for g, x in f.terms.items())


def symmetry_U(phi: AlgebraElement, inverse: bool = False) -> AlgebraElement:
    """``U(phi)(g, h) = phi(gh, g)``; the inverse is ``phi(h, h^-1 g)``.

    On basis elements ``U`` sends ``d(a, b)`` to ``d(b, b^-1 a)`` and the inverse
    sends ``d(a, b)`` to ``d(ab, a)``.
    """
    if phi.twist is not None:
        raise AlgebraError("symmetry operator is defined on untwisted algebras")
    P = phi.group
    if not isinstance(P, ProductGroup):
        raise AlgebraError("symmetry operator needs an element of V[G x G]")
    G = P.left
    out = {}
    for (a, b), v in phi.terms.items():
        if inverse:
            key = (G.multiply(a, b), a)
        else:
            key = (b, G.multiply(G.inverse(b), a))
        out[key] = out.get(key, 0) + v
    return AlgebraElement(P, out)


# ----------------------------------------------------------- crossed products


@dataclass(frozen=True)
class CrossedProductElement:
    """``sum a_{n,m} t^m delta_n`` in Z acting on V[t, t^-1] by ``t^m -> lam^{nm} t^m``.

    Keys are ``(n, m)``: group index first, Laurent exponent second.
    """

    lam: Fraction
    terms: Mapping[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lam", as_scalar(self.lam))
        object.__setattr__(self, "terms", _clean(self.terms))

    @classmethod
    def monomial(cls, lam, n: int, m: int, coeff=1):
        return cls(lam, {(n, m): as_scalar(coeff)})

    def __add__(self, other):
        _same_lambda(self.lam, other.lam)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return CrossedProductElement(self.lam, out)

    def __mul__(self, other):
        return crossed_multiply(self, other)


def _same_lambda(a, b):
    if a != b:
        raise AlgebraError(f"lambda mismatch: {a} != {b}")


def crossed_multiply(x: CrossedProductElement, y: CrossedProductElement) -> CrossedProductElement:
    """``(t^m delta_n)(t^m' delta_n') = lam^{n m'} t^{m+m'} delta_{n+n'}``."""
    _same_lambda(x.lam, y.lam)
    out: Dict[Tuple[int, int], Fraction] = {}
    for (n, m), a in x.terms.items():
        for (n2, m2), b in y.terms.items():
            # a t^m alpha_n(b t^m2) = a b lam^(n m2) t^(m+m2)
            key = (n + n2, m + m2)
            out[key] = out.get(key, 0) + a * b * x.lam ** (n * m2)
    return CrossedProductElement(x.lam, out)


TORUS_GROUP = FreeAbelianGroup(2)


def crossed_to_torus(x: CrossedProductElement, swap: bool = False) -> AlgebraElement:
    """``t^m delta_n -> U1^m U2^n``, i.e. the basis element at ``(m, n)`` of V[Z^2, c].

    ``swap=True`` gives the opposite generator matching (t -> U2, delta_1 -> U1),
    which is not multiplicative; it exists for the negative test.
    """
    terms = {}
    for (n, m), v in x.terms.items():
        terms[(n, m) if swap else (m, n)] = v
    return AlgebraElement(TORUS_GROUP, terms, Cocycle(x.lam))


def torus_U1(lam) -> AlgebraElement:
    return AlgebraElement.delta(TORUS_GROUP, (1, 0), 1, Cocycle(lam))


def torus_U2(lam) -> AlgebraElement:
    return AlgebraElement.delta(TORUS_GROUP, (0, 1), 1, Cocycle(lam))
