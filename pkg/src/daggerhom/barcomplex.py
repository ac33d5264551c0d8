"""Bar complexes of a group, prism homotopies and combing contractions.

A degree-n chain is a finitely supported function on (n+1)-tuples of group
elements.  In the reduced (normalised) complex a tuple with two equal
neighbours is zero, so such tuples are dropped wherever they arise.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .group import Combing, CombingProfile, Element, Group, combing_profile
from .scalar import INF, as_scalar, valuation

Simplex = Tuple[Element, ...]

# Orientation of the prism homotopy: with this sign
# delta H(f, g) + H(f, g) delta = g_* - f_*, and the combing homotopy
# satisfies delta H + H delta = id on the augmentation-kernel complex.
PRISM_SIGN = 1


class ChainError(ValueError):
    pass


class CombingError(RuntimeError):
    """The combing did not stabilise within its stage cap."""


def is_degenerate(t: Sequence) -> bool:
    return any(a == b for a, b in zip(t, t[1:]))


@dataclass(frozen=True)
class BarChain:
    group: Group
    degree: int
    terms: Mapping[Simplex, Fraction] = field(default_factory=dict)
    reduced: bool = True

    def __post_init__(self):
        if self.degree < 0:
            raise ChainError("degree must be nonnegative")
        clean = {}
        for t, v in self.terms.items():
            t = tuple(t)
            if len(t) != self.degree + 1:
                raise ChainError(f"tuple {t!r} has wrong length for degree {self.degree}")
            if self.reduced and is_degenerate(t):
                continue
            v = as_scalar(v)
            if v:
                clean[t] = clean.get(t, 0) + v
        object.__setattr__(self, "terms", {t: v for t, v in clean.items() if v})

    def _like(self, terms, degree=None) -> "BarChain":
        return BarChain(self.group, self.degree if degree is None else degree, terms, self.reduced)

    def _check(self, other: "BarChain"):
        if (self.group, self.degree, self.reduced) != (other.group, other.degree, other.reduced):
            raise ChainError("chains live in different complexes")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for t, v in other.terms.items():
            out[t] = out.get(t, 0) + v
        return self._like(out)

    def __neg__(self):
        return self._like({t: -v for t, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = as_scalar(c)
        return self._like({t: c * v for t, v in self.terms.items()})

    def __eq__(self, other):
        return (isinstance(other, BarChain) and self.group == other.group
                and self.degree == other.degree and self.reduced == other.reduced
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.degree, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> List[Simplex]:
        key = self.group.sort_key
        return sorted(self.terms, key=lambda t: [key(x) for x in t])

    def elements(self) -> set:
        return {x for t in self.terms for x in t}

    def __repr__(self):
        fmt = self.group.format_element
        parts = [f"{self.terms[t]}*({', '.join(str(fmt(x)) for x in t)})" for t in self.support()]
        return " + ".join(parts) if parts else "0"


def zero_chain(group: Group, degree: int, reduced: bool = True) -> BarChain:
    return BarChain(group, degree, {}, reduced)


def basis_chain(group: Group, simplex: Sequence[Element], coeff=1, reduced: bool = True) -> BarChain:
    simplex = tuple(simplex)
    return BarChain(group, len(simplex) - 1, {simplex: as_scalar(coeff)}, reduced)


def _accumulate(out: Dict, t, v, reduced: bool):
    if reduced and is_degenerate(t):
        return
    out[t] = out.get(t, 0) + v


def bar_differential(ch: BarChain) -> BarChain:
    """Alternating face sum ``sum_j (-1)^j (x_0, .., x_j^, .., x_n)``."""
    if ch.degree == 0:
        raise ChainError("the differential is not defined on degree 0; use augmentation")
    out: Dict[Simplex, Fraction] = {}
    for t, v in ch.terms.items():
        for j in range(len(t)):
            face = t[:j] + t[j + 1:]
            _accumulate(out, face, v if j % 2 == 0 else -v, ch.reduced)
    return ch._like(out, ch.degree - 1)


def augmentation(ch: BarChain) -> Fraction:
    """Sum of the coefficients of a degree-0 chain."""
    if ch.degree != 0:
        raise ChainError("augmentation is defined on degree 0 only")
    return sum(ch.terms.values(), Fraction(0))


def boundary(ch: BarChain):
    """``delta`` in positive degree and the augmentation in degree 0."""
    return augmentation(ch) if ch.degree == 0 else bar_differential(ch)


def pushforward(f: Callable[[Element], Element], ch: BarChain) -> BarChain:
    """``f_*``: apply ``f`` entrywise (degenerate images vanish when reduced)."""
    out: Dict[Simplex, Fraction] = {}
    for t, v in ch.terms.items():
        _accumulate(out, tuple(f(x) for x in t), v, ch.reduced)
    return ch._like(out)


def _prism_terms(f, g, t: Simplex, reduced: bool, sign: int):
    ft = [f(x) for x in t]
    gt = [g(x) for x in t]
    for j in range(len(t)):
        s = tuple(ft[: j + 1]) + tuple(gt[j:])
        if reduced and is_degenerate(s):
            continue
        yield s, sign if j % 2 == 0 else -sign


def prism_homotopy(f: Callable[[Element], Element], g: Callable[[Element], Element],
                   ch: BarChain, sign: int = PRISM_SIGN) -> BarChain:
    """``H(f, g)(x_0..x_n) = sum_j (-1)^j (f x_0, .., f x_j, g x_j, .., g x_n)``."""
    out: Dict[Simplex, Fraction] = {}
    for t, v in ch.terms.items():
        for s, e in _prism_terms(f, g, t, ch.reduced, sign):
            out[s] = out.get(s, 0) + e * v
    return ch._like(out, ch.degree + 1)


def _stable_stage(c: Combing, x: Element) -> int:
    cache = c.__dict__.setdefault("_stable_cache", {})
    n = cache.get(x)
    if n is None:
        n = c.stabilization(x)
        if n is None:
            raise CombingError(f"combing {c.name} does not stabilise on "
                               f"{c.group.format_element(x)} within {c.max_stage} stages")
        cache[x] = n
    return n


def homotopy_summands(c: Combing, t: Simplex, reduced: bool = True,
                      sign: int = PRISM_SIGN) -> List[Tuple[Simplex, int]]:
    """Nonzero basis summands of ``H(t) = sum_j H(f_j, f_{j+1})(t)`` before merging."""
    stop = max(_stable_stage(c, x) for x in t)
    out = []
    for j in range(stop):
        out.extend(_prism_terms(c.stage_map(j), c.stage_map(j + 1), t, reduced, sign))
    return out


def combing_homotopy(c: Combing, ch: BarChain, sign: int = PRISM_SIGN) -> BarChain:
    """Contracting homotopy ``H = sum_j H(f_j, f_{j+1})`` induced by a combing."""
    if not ch.reduced:
        raise ChainError("the combing homotopy acts on reduced chains")
    out: Dict[Simplex, Fraction] = {}
    for t, v in ch.terms.items():
        for s, e in homotopy_summands(c, t, True, sign):
            out[s] = out.get(s, 0) + e * v
    return ch._like(out, ch.degree + 1)


def contraction_defect(c: Combing, ch: BarChain, sign: int = PRISM_SIGN) -> BarChain:
    """``(delta H + H delta)(ch) - ch``; zero on the augmentation-kernel complex."""
    lhs = bar_differential(combing_homotopy(c, ch, sign))
    if ch.degree > 0:
        lhs = lhs + combing_homotopy(c, bar_differential(ch), sign)
    return lhs - ch


def _int_homotopy(c: Combing, t: Simplex, sign: int, cache: Optional[Dict] = None) -> Dict[Simplex, int]:
    if cache is not None and t in cache:
        return cache[t]
    out: Dict[Simplex, int] = {}
    for s, e in homotopy_summands(c, t, True, sign):
        out[s] = out.get(s, 0) + e
    if cache is not None:
        cache[t] = out
    return out


def basis_contraction_defect(c: Combing, t: Simplex, sign: int = PRISM_SIGN,
                             cache: Optional[Dict] = None) -> Dict[Simplex, int]:
    """Integer form of :func:`contraction_defect` on one reduced basis tuple.

    For degree 0 the tuple ``(x)``, ``x != e``, is paired with ``-(e)`` so that
    it lies in the augmentation kernel.  ``cache`` memoises ``H`` on basis tuples and
    makes exhaustive sweeps affordable.
    """
    t = tuple(t)
    if is_degenerate(t):
        raise ChainError("basis tuple must be non-degenerate")
    n = len(t) - 1
    lhs: Dict[Simplex, int] = {}

    def add(d, s, v):
        d[s] = d.get(s, 0) + v

    src = {t: 1}
    if n == 0:
        e = c.group.identity()
        if t[0] == e:
            raise ChainError("(e) has no representative in the augmentation kernel")
        src = {t: 1, (e,): -1}
    for s0, v0 in src.items():
        for s, v in _int_homotopy(c, s0, sign, cache).items():
            for j in range(len(s)):
                face = s[:j] + s[j + 1:]
                if not is_degenerate(face):
                    add(lhs, face, v * v0 * (1 if j % 2 == 0 else -1))
        if n > 0:
            for j in range(n + 1):
                face = s0[:j] + s0[j + 1:]
                if is_degenerate(face):
                    continue
                for s, v in _int_homotopy(c, face, sign, cache).items():
                    add(lhs, s, v * v0 * (1 if j % 2 == 0 else -1))
        add(lhs, s0, -v0)
    return {s: v for s, v in lhs.items() if v}


def prism_defect(f, g, ch: BarChain, sign: int = PRISM_SIGN) -> BarChain:
    """``(delta H + H delta)(ch) - (g_* - f_*)(ch)`` for the prism homotopy."""
    lhs = bar_differential(prism_homotopy(f, g, ch, sign))
    if ch.degree > 0:
        lhs = lhs + prism_homotopy(f, g, bar_differential(ch), sign)
    return lhs - (pushforward(g, ch) - pushforward(f, ch))


# ------------------------------------------------------- free module structure


def act(g: Element, ch: BarChain) -> BarChain:
    """Diagonal left action ``g.(x_0..x_n) = (g x_0, .., g x_n)``."""
    G = ch.group
    return ch._like({tuple(G.multiply(g, x) for x in t): v for t, v in ch.terms.items()})


def free_coordinates(ch: BarChain) -> Dict[Element, Dict[Simplex, Fraction]]:
    """Split ``(x_0..x_n)`` as ``x_0 (x) (e, x_0^-1 x_1, .., x_0^-1 x_n)``."""
    G = ch.group
    out: Dict[Element, Dict[Simplex, Fraction]] = {}
    for t, v in ch.terms.items():
        x0 = t[0]
        inv = G.inverse(x0)
        inner = tuple(G.multiply(inv, x) for x in t)
        slot = out.setdefault(x0, {})
        slot[inner] = slot.get(inner, 0) + v
    return out


def from_free_coordinates(group: Group, degree: int, coords: Mapping[Element, Mapping[Simplex, Fraction]],
                          reduced: bool = True) -> BarChain:
    terms: Dict[Simplex, Fraction] = {}
    for g, inner in coords.items():
        for t, v in inner.items():
            if t[0] != group.identity():
                raise ChainError("inner tuples must start at the identity")
            s = tuple(group.multiply(g, x) for x in t)
            terms[s] = terms.get(s, 0) + v
    return BarChain(group, degree, terms, reduced)


# ------------------------------------------------------------- growth gauges


def chain_gauge(ch: BarChain, p: int):
    """Largest c with ``nu(a_t) + 1 >= c (sum_i l(x_i) + 1)`` over the support."""
    G = ch.group
    best = INF
    for t, v in ch.terms.items():
        r = Fraction(valuation(v, p) + 1, sum(G.word_length(x) for x in t) + 1)
        if r < best:
            best = r
    return best


@dataclass
class GrowthCertificate:
    D: Fraction
    length_distortion: Fraction
    gauge_in: Fraction
    gauge_out: Fraction
    observed_gauge: object
    verified: bool
    profile_ok: bool
    witness: Optional[Simplex] = None
    notes: List[str] = field(default_factory=list)


def growth_certificate(c: Combing, ch: BarChain, gauge_in, p: int,
                       profile: Optional[CombingProfile] = None) -> GrowthCertificate:
    """Certify that ``combing_homotopy(c, ch)`` has gauge at least ``gauge_in / D``.

    ``D = (n + 2) * D_len`` where ``D_len`` is the length distortion
    ``max (l(f_j g) + 1) / (l(g) + 1)`` from the combing profile over the ball
    covering the support; the factor ``n + 2`` accounts for the tuple length
    of the image.  The flag compares every output coefficient against the
    predicted gauge.
    """
    gauge_in = as_scalar(gauge_in)
    if gauge_in <= 0:
        raise ChainError("input gauge must be positive")
    G = ch.group
    for t, v in ch.terms.items():
        if valuation(v, p) + 1 < gauge_in * (sum(G.word_length(x) for x in t) + 1):
            raise ChainError(f"coefficient at {t!r} violates the input gauge {gauge_in}")
    radius = max((G.word_length(x) for x in ch.elements()), default=0)
    if profile is None:
        profile = combing_profile(c, radius, lipschitz=False)
    d_len = Fraction(profile.D_est).limit_denominator(10**9)
    D = (ch.degree + 2) * d_len
    gauge_out = gauge_in / D
    image = combing_homotopy(c, ch)
    witness = None
    for t in image.support():
        v = image.terms[t]
        if valuation(v, p) + 1 < gauge_out * (sum(G.word_length(x) for x in t) + 1):
            witness = t
            break
    notes = list(profile.failures)
    return GrowthCertificate(D=D, length_distortion=d_len, gauge_in=gauge_in, gauge_out=gauge_out,
                             observed_gauge=chain_gauge(image, p), verified=witness is None and profile.ok,
                             profile_ok=profile.ok, witness=witness, notes=notes)


# -------------------------------------------------------------- sampling


def random_simplex(group: Group, degree: int, ball: Sequence[Element], rng: random.Random,
                   reduced: bool = True) -> Simplex:
    while True:
        t = tuple(rng.choice(ball) for _ in range(degree + 1))
        if not (reduced and is_degenerate(t)):
            return t


def random_chain(group: Group, degree: int, ball: Sequence[Element], rng: random.Random,
                 nterms: int = 4, reduced: bool = True, coeffs: Sequence[int] = (-3, -2, -1, 1, 2, 3)
                 ) -> BarChain:
    terms = {}
    for _ in range(nterms):
        t = random_simplex(group, degree, ball, rng, reduced)
        terms[t] = terms.get(t, 0) + Fraction(rng.choice(coeffs), rng.choice((1, 1, 2, 5)))
    return BarChain(group, degree, terms, reduced)


def random_kernel_chain(group: Group, degree: int, ball: Sequence[Element], rng: random.Random,
                        nterms: int = 4) -> BarChain:
    """Random reduced chain in the augmentation-kernel complex."""
    ch = random_chain(group, degree, ball, rng, nterms)
    if degree == 0:
        e = group.identity()
        ch = ch - BarChain(group, 0, {(e,): augmentation(ch)})
    return ch
