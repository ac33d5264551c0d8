"""The p-adic noncommutative torus and its Hochschild homology.

Monomials are kept in the normal form ``U1^m U2^n`` keyed by ``(m, n)``;
commutation uses ``U2^n U1^m = lam^(n m) U1^m U2^n``.

The Hochschild complex ``A -d1-> A + A -d0-> A`` splits by charge: the
degree-2 monomial ``(m, n)`` has charge ``(m + 1, n + 1)``, the first slot of a
degree-1 pair at ``(m, n)`` has charge ``(m + 1, n)``, the second slot has
charge ``(m, n + 1)``, and a degree-0 monomial is its own charge.  Every
differential preserves charge, so each charge contributes a 1 -> 2 -> 1 complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from .linalg import SparseMatrix, homology_dim, kernel_basis, rank
from .scalar import as_scalar, is_root_of_unity, is_unit

Mono = Tuple[int, int]


class TorusError(ValueError):
    pass


def _clean(terms):
    return {k: Fraction(v) for k, v in terms.items() if v}


def _same(a, b):
    if a != b:
        raise TorusError(f"lambda mismatch: {a} != {b}")


@dataclass(frozen=True)
class TorusElement:
    lam: Fraction
    terms: Mapping[Mono, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lam", as_scalar(self.lam))
        object.__setattr__(self, "terms", _clean(self.terms))

    @classmethod
    def monomial(cls, lam, m: int, n: int, coeff=1):
        return cls(lam, {(m, n): as_scalar(coeff)})

    @classmethod
    def one(cls, lam):
        return cls.monomial(lam, 0, 0)

    def __add__(self, other):
        _same(self.lam, other.lam)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return TorusElement(self.lam, out)

    def __neg__(self):
        return TorusElement(self.lam, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = as_scalar(c)
        return TorusElement(self.lam, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, TorusElement):
            return self.scale(other)
        _same(self.lam, other.lam)
        out: Dict[Mono, Fraction] = {}
        for (m, n), a in self.terms.items():
            for (m2, n2), b in other.terms.items():
                k = (m + m2, n + n2)
                out[k] = out.get(k, 0) + a * b * self.lam ** (n * m2)
        return TorusElement(self.lam, out)

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self):
        return not self.terms

    def __repr__(self):
        parts = [f"{v}*U1^{m}U2^{n}" for (m, n), v in sorted(self.terms.items())]
        return " + ".join(parts) if parts else "0"


def U1(lam) -> TorusElement:
    return TorusElement.monomial(lam, 1, 0)


def U2(lam) -> TorusElement:
    return TorusElement.monomial(lam, 0, 1)


@dataclass(frozen=True)
class TorusTensor:
    """Element of ``A (x) A``; keys are pairs of monomials."""

    lam: Fraction
    terms: Mapping[Tuple[Mono, Mono], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lam", as_scalar(self.lam))
        object.__setattr__(self, "terms", _clean(self.terms))

    @classmethod
    def simple(cls, f: TorusElement, g: TorusElement) -> "TorusTensor":
        _same(f.lam, g.lam)
        out = {}
        for k1, a in f.terms.items():
            for k2, b in g.terms.items():
                out[k1, k2] = out.get((k1, k2), 0) + a * b
        return cls(f.lam, out)

    def __add__(self, other):
        _same(self.lam, other.lam)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return TorusTensor(self.lam, out)

    def __neg__(self):
        return TorusTensor(self.lam, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = as_scalar(c)
        return TorusTensor(self.lam, {k: c * v for k, v in self.terms.items()})

    def left_mul(self, a: TorusElement) -> "TorusTensor":
        """``a f (x) g``."""
        return self._slot(a, slot=0, on_left=True)

    def right_mul(self, a: TorusElement) -> "TorusTensor":
        """``f (x) g a``."""
        return self._slot(a, slot=1, on_left=False)

    def inner_right(self, a: TorusElement) -> "TorusTensor":
        """``f a (x) g``."""
        return self._slot(a, slot=0, on_left=False)

    def inner_left(self, a: TorusElement) -> "TorusTensor":
        """``f (x) a g``."""
        return self._slot(a, slot=1, on_left=True)

    def _slot(self, a: TorusElement, slot: int, on_left: bool) -> "TorusTensor":
        _same(self.lam, a.lam)
        out: Dict = {}
        for (k1, k2), v in self.terms.items():
            x = TorusElement(self.lam, {(k1, k2)[slot]: v})
            y = a * x if on_left else x * a
            for k, w in y.terms.items():
                key = (k, k2) if slot == 0 else (k1, k)
                out[key] = out.get(key, 0) + w
        return TorusTensor(self.lam, out)

    def is_zero(self):
        return not self.terms


# -------------------------------------------------------- Koszul resolution


def koszul_b2(t: TorusTensor) -> Tuple[TorusTensor, TorusTensor]:
    """``f (x) g -> (lam f (x) U2 g - f U2 (x) g, -f (x) U1 g + lam f U1 (x) g)``."""
    lam = t.lam
    u1, u2 = U1(lam), U2(lam)
    first = t.inner_left(u2).scale(lam) - t.inner_right(u2)
    second = t.inner_right(u1).scale(lam) - t.inner_left(u1)
    return first, second


def koszul_b1(pr: Tuple[TorusTensor, TorusTensor]) -> TorusTensor:
    """``(f1 (x) f2, f3 (x) f4) -> f1 U1 (x) f2 - f1 (x) U1 f2 + f3 U2 (x) f4 - f3 (x) U2 f4``.

    Putting ``U2`` in the second summand gives a map with ``b0 b1 != 0``;
    :func:`koszul_b1_u2_variant` keeps that form for the regression test.
    """
    x, y = pr
    _same(x.lam, y.lam)
    lam = x.lam
    u1, u2 = U1(lam), U2(lam)
    return (x.inner_right(u1) - x.inner_left(u1)) + (y.inner_right(u2) - y.inner_left(u2))


def koszul_b1_u2_variant(pr: Tuple[TorusTensor, TorusTensor]) -> TorusTensor:
    x, y = pr
    lam = x.lam
    u1, u2 = U1(lam), U2(lam)
    return (x.inner_right(u1) - x.inner_left(u2)) + (y.inner_right(u2) - y.inner_left(u2))


def koszul_b0(t: TorusTensor) -> TorusElement:
    """Multiplication ``f (x) g -> f g``."""
    out = TorusElement(t.lam)
    for (k1, k2), v in t.terms.items():
        out = out + TorusElement(t.lam, {k1: v}) * TorusElement(t.lam, {k2: 1})
    return out


# ------------------------------------------------------- Hochschild complex


def hochschild_d1(a: TorusElement) -> Tuple[TorusElement, TorusElement]:
    """``a -> (lam U2 a - a U2, lam a U1 - U1 a)``."""
    lam = a.lam
    u1, u2 = U1(lam), U2(lam)
    return (u2 * a).scale(lam) - a * u2, (a * u1).scale(lam) - u1 * a


def hochschild_d0(a: TorusElement, b: TorusElement) -> TorusElement:
    """``(a, b) -> a U1 - U1 a + b U2 - U2 b``."""
    _same(a.lam, b.lam)
    lam = a.lam
    u1, u2 = U1(lam), U2(lam)
    return a * u1 - u1 * a + b * u2 - u2 * b


def kernel_relation_check(a: TorusElement, b: TorusElement) -> bool:
    """Coefficientwise ``(lam^(n+1) - 1) a_{m,n+1} = (lam^(m+1) - 1) b_{m+1,n}``.

    This is ``d0(a, b) = 0`` read at the degree-0 monomial ``(m + 1, n + 1)``.
    Only index pairs touching the supports can fail, so only those are checked.
    """
    _same(a.lam, b.lam)
    lam = a.lam
    idx = {(m, n - 1) for (m, n) in a.terms} | {(m - 1, n) for (m, n) in b.terms}
    for m, n in idx:
        lhs = (lam ** (n + 1) - 1) * a.terms.get((m, n + 1), 0)
        rhs = (lam ** (m + 1) - 1) * b.terms.get((m + 1, n), 0)
        if lhs != rhs:
            return False
    return True


def image_relation_violations(pair: Tuple[TorusElement, TorusElement]) -> List[str]:
    """Relations satisfied by every image ``d1(f) = (f1, f2)``, in product form.

    ``f1`` vanishes on the column ``m = -1`` and ``f2`` on the row ``n = -1``
    (charge coordinate zero in each case), and
    ``(lam^(n+1) - 1) f1_{m, n+1} = (lam^(m+1) - 1) f2_{m+1, n}`` for all m, n.
    """
    f1, f2 = pair
    lam = f1.lam
    bad = []
    for m, n in f1.terms:
        if m == -1:
            bad.append(f"f1 has coefficient at (-1, {n})")
    for m, n in f2.terms:
        if n == -1:
            bad.append(f"f2 has coefficient at ({m}, -1)")
    idx = {(m, n - 1) for (m, n) in f1.terms} | {(m - 1, n) for (m, n) in f2.terms}
    for m, n in sorted(idx):
        lhs = (lam ** (n + 1) - 1) * f1.terms.get((m, n + 1), 0)
        rhs = (lam ** (m + 1) - 1) * f2.terms.get((m + 1, n), 0)
        if lhs != rhs:
            bad.append(f"cross relation fails at (m, n) = ({m}, {n})")
    return bad


# ------------------------------------------------------------- homology


def _check_lambda(lam, p: Optional[int], require_unit: bool) -> Tuple[Fraction, List[str]]:
    lam = as_scalar(lam)
    if lam == 0:
        raise TorusError("lambda must be nonzero")
    notes = []
    if p is not None and not is_unit(lam, p):
        msg = f"lambda = {lam} is not a {p}-adic unit"
        if require_unit:
            raise TorusError(msg)
        notes.append(msg + "; dimensions are those of the algebra over F")
    return lam, notes


def charge_matrices(lam, M: int, N: int) -> Tuple[SparseMatrix, SparseMatrix]:
    """``d1`` (2x1) and ``d0`` (1x2) of the charge-(M, N) summand."""
    lam = as_scalar(lam)
    d1 = SparseMatrix.from_dense([[lam ** M - 1], [lam ** N - 1]])
    d0 = SparseMatrix.from_dense([[lam ** N - 1, 1 - lam ** M]])
    return d1, d0


def hh_bidegree(lam, M: int, N: int) -> Tuple[int, int, int]:
    """Homology dimensions ``(h0, h1, h2)`` of the charge-(M, N) summand."""
    d1, d0 = charge_matrices(lam, M, N)
    h2 = 1 - rank(d1)
    h1 = homology_dim(d1, d0)
    h0 = 1 - rank(d0)
    return h0, h1, h2


def charge_audit(lam, radius: int = 2) -> List[str]:
    """Check that ``d1``/``d0`` map each monomial into its own charge."""
    lam = as_scalar(lam)
    bad = []
    rng = range(-radius, radius + 1)
    for m in rng:
        for n in rng:
            a = TorusElement.monomial(lam, m, n)
            s1, s2 = hochschild_d1(a)
            want = (m + 1, n + 1)
            if any((k[0] + 1, k[1]) != want for k in s1.terms):
                bad.append(f"d1 slot 1 leaves charge at {(m, n)}")
            if any((k[0], k[1] + 1) != want for k in s2.terms):
                bad.append(f"d1 slot 2 leaves charge at {(m, n)}")
            if any(k != (m + 1, n) for k in hochschild_d0(a, TorusElement(lam)).terms):
                bad.append(f"d0 slot a leaves charge at {(m, n)}")
            if any(k != (m, n + 1) for k in hochschild_d0(TorusElement(lam), a).terms):
                bad.append(f"d0 slot b leaves charge at {(m, n)}")
    return bad


def graded_totals(lam, window: int) -> Tuple[int, int, int, int]:
    tot = [0, 0, 0]
    for M in range(-window, window + 1):
        for N in range(-window, window + 1):
            for i, h in enumerate(hh_bidegree(lam, M, N)):
                tot[i] += h
    return tot[0], tot[1], tot[2], 0


def _box(window: int, shift: Tuple[int, int]) -> List[Mono]:
    # monomials whose charge (monomial + shift) lies in [-window, window]^2
    return [(M - shift[0], N - shift[1])
            for M in range(-window, window + 1) for N in range(-window, window + 1)]


def windowed_matrices(lam, window: int):
    """Sparse ``d1``, ``d0`` on the monomial boxes, built from the algebra.

    The boxes are offset by the charge shift of each slot (one step in the
    relevant coordinate), so each box is closed under the differentials and
    no boundary artefacts occur.
    """
    lam = as_scalar(lam)
    deg2 = _box(window, (1, 1))
    slot_a = _box(window, (1, 0))
    slot_b = _box(window, (0, 1))
    deg0 = _box(window, (0, 0))
    ia = {k: i for i, k in enumerate(slot_a)}
    ib = {k: i + len(slot_a) for i, k in enumerate(slot_b)}
    i0 = {k: i for i, k in enumerate(deg0)}
    cols = []
    for mono in deg2:
        s1, s2 = hochschild_d1(TorusElement.monomial(lam, *mono))
        col = {}
        for k, v in s1.terms.items():
            col[ia[k]] = v
        for k, v in s2.terms.items():
            col[ib[k]] = v
        cols.append(col)
    d1 = SparseMatrix.from_columns(len(slot_a) + len(slot_b), cols)
    zero = TorusElement(lam)
    cols = []
    for mono in slot_a:
        cols.append({i0[k]: v for k, v in hochschild_d0(TorusElement.monomial(lam, *mono), zero).terms.items()})
    for mono in slot_b:
        cols.append({i0[k]: v for k, v in hochschild_d0(zero, TorusElement.monomial(lam, *mono)).terms.items()})
    d0 = SparseMatrix.from_columns(len(deg0), cols)
    return d1, d0, (deg2, slot_a, slot_b, deg0)


def windowed_totals(lam, window: int) -> Tuple[int, int, int, int]:
    d1, d0, _ = windowed_matrices(lam, window)
    r1, r0 = rank(d1), rank(d0)
    h2 = d1.cols - r1
    h1 = d0.cols - r0 - r1
    h0 = d0.rows - r0
    return h0, h1, h2, 0


def charge_zero_generators(lam):
    """Generators of each homology group, read off the charge-(0, 0) summand."""
    lam = as_scalar(lam)
    d1, d0 = charge_matrices(lam, 0, 0)
    gens = {"HH0": [], "HH1": [], "HH2": []}
    if rank(d1) == 0:
        gens["HH2"].append(TorusElement.monomial(lam, -1, -1))
    # d1 = 0 so every kernel vector of d0 is a class
    for vec in kernel_basis(d0):
        a = TorusElement(lam, {(-1, 0): vec.get(0, 0)})
        b = TorusElement(lam, {(0, -1): vec.get(1, 0)})
        gens["HH1"].append((a, b))
    if rank(d0) == 0:
        gens["HH0"].append(TorusElement.one(lam))
    return gens


@dataclass
class HHResult:
    lam: Fraction
    dims: Optional[Tuple[int, int, int, int]]
    stabilized: bool
    degenerate: bool
    method: str
    per_window: Dict[int, Dict[str, Tuple[int, int, int, int]]]
    agreement: Optional[bool]
    generators: Dict[str, list]
    notes: List[str]


def hh_total(lam, window: int, method: str = "graded", p: Optional[int] = None,
             require_unit: bool = False, min_window: Optional[int] = None) -> HHResult:
    """Hochschild homology of the torus with stabilisation over windows.

    Totals are computed for windows ``min_window .. window`` (default
    ``window - 2``, at least 0); the answer is stable when all totals agree.  ``method`` is ``graded``,
    ``windowed`` or ``both`` (in which case the two must agree exactly).
    A lambda that is not a unit at ``p`` is noted, or rejected with
    ``require_unit``.
    """
    if method not in ("graded", "windowed", "both"):
        raise TorusError(f"unknown method {method!r}")
    if window < 0:
        raise TorusError("window must be nonnegative")
    lam, notes = _check_lambda(lam, p, require_unit)
    degenerate = is_root_of_unity(lam)
    if degenerate:
        notes.append(f"lambda = {lam} is a root of unity; infinitely many charges contribute")
    per_window: Dict[int, Dict[str, Tuple[int, int, int, int]]] = {}
    agreement = None if method != "both" else True
    lo = window - 2 if min_window is None else min_window
    if lo > window:
        raise TorusError("min_window exceeds window")
    windows = list(range(max(lo, 0), window + 1))
    for w in windows:
        entry = {}
        if method in ("graded", "both"):
            entry["graded"] = graded_totals(lam, w)
        if method in ("windowed", "both"):
            entry["windowed"] = windowed_totals(lam, w)
        if method == "both" and entry["graded"] != entry["windowed"]:
            agreement = False
            notes.append(f"graded and windowed disagree at window {w}")
        per_window[w] = entry
    key = "windowed" if method == "windowed" else "graded"
    series = [per_window[w][key] for w in windows]
    stabilized = len(series) >= 2 and len(set(series)) == 1
    if not stabilized:
        notes.append("totals did not stabilise over windows " + ", ".join(map(str, windows)))
    return HHResult(lam=lam, dims=series[-1] if stabilized else None, stabilized=stabilized,
                    degenerate=degenerate, method=method, per_window=per_window, agreement=agreement,
                    generators=charge_zero_generators(lam), notes=notes)
