"""Noncommutative differential forms over finite-dimensional algebras.

``Omega^n(A) = A (x) Abar^(x)n`` with ``Abar = A / F 1``.  The algebra is given
by structure constants on a basis that contains the unit; the basis of
``Abar`` is the remaining basis vectors.  A basis form is an index tuple
``(i0, i1, .., in)`` standing for ``a_i0 d a_i1 .. d a_in`` with no
``i1..in`` equal to the unit index.

Conventions: ``b`` and ``B`` follow Cuntz-Quillen,

    b(a0 da1..dan) = a0 a1 da2..dan
                     + sum_{i=1}^{n-1} (-1)^i a0 da1..d(ai ai+1)..dan
                     + (-1)^n an a0 da1..dan-1
    B(a0 da1..dan) = sum_{i=0}^{n} (-1)^(n i) dai..dan da0..dai-1
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .config import CapExceeded, resource_cap
from .group import FiniteGroup, parse_group
from .linalg import SparseMatrix, annihilator, hstack, kernel_basis, rank, vstack
from .scalar import as_scalar

Terms = Dict[Tuple[int, ...], Fraction]


class FormsError(ValueError):
    pass


class FiniteAlgebra:
    """Unital associative algebra with exact structure constants."""

    def __init__(self, labels: Sequence[str], mult: Sequence[Sequence[Mapping[int, Fraction]]],
                 unit: int, provenance: str = ""):
        self.labels = list(labels)
        self.dim = len(self.labels)
        self.mult = [[{k: Fraction(v) for k, v in mult[i][j].items() if v} for j in range(self.dim)]
                     for i in range(self.dim)]
        self.unit = unit
        self.provenance = provenance
        self._check()
        self.bar = [i for i in range(self.dim) if i != unit]
        self._cache: Dict = {}

    def _check(self):
        d, u = self.dim, self.unit
        for i in range(d):
            if self.mult[u][i] != {i: 1} or self.mult[i][u] != {i: 1}:
                raise FormsError(f"basis element {u} is not a two-sided unit")
        for i, j, k in itertools.product(range(d), repeat=3):
            left = self.mul_vec(self.mult[i][j], {k: Fraction(1)})
            right = self.mul_vec({i: Fraction(1)}, self.mult[j][k])
            if left != right:
                raise FormsError(f"structure constants not associative at {(i, j, k)}")

    def mul_vec(self, x: Mapping[int, Fraction], y: Mapping[int, Fraction]) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.mult[i][j].items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: v for k, v in out.items() if v}

    def __repr__(self):
        return f"<FiniteAlgebra {self.provenance or self.dim}>"

    # ---- constructors

    @classmethod
    def group_algebra(cls, G: FiniteGroup) -> "FiniteAlgebra":
        n = G.order
        mult = [[{G.multiply(g, h): Fraction(1)} for h in range(n)] for g in range(n)]
        return cls([str(l) for l in G.labels], mult, G.identity(), provenance=f"F[{G.spec}]")

    @classmethod
    def matrix_algebra(cls, k: int) -> "FiniteAlgebra":
        """``M_k(F)`` on the basis ``I`` and ``E_ij`` with ``(i, j) != (k, k)``."""
        units = [(i, j) for i in range(k) for j in range(k) if (i, j) != (k - 1, k - 1)]
        labels = ["I"] + [f"E{i + 1}{j + 1}" for i, j in units]
        mats = [[[Fraction(int(r == c)) for c in range(k)] for r in range(k)]]
        for i, j in units:
            m = [[Fraction(0)] * k for _ in range(k)]
            m[i][j] = Fraction(1)
            mats.append(m)

        def coords(m):
            # X = X_kk I + sum_{(i,j) != (k,k)} (X_ij - [i == j] X_kk) E_ij
            last = m[k - 1][k - 1]
            out = {0: last} if last else {}
            for idx, (i, j) in enumerate(units, start=1):
                v = m[i][j] - (last if i == j else 0)
                if v:
                    out[idx] = v
            return out

        def matmul(a, b):
            return [[sum(a[r][t] * b[t][c] for t in range(k)) for c in range(k)] for r in range(k)]

        mult = [[coords(matmul(a, b)) for b in mats] for a in mats]
        return cls(labels, mult, 0, provenance=f"M{k}(F)")


def algebra_from_spec(spec: str) -> FiniteAlgebra:
    """``matrix:k`` or any finite group spec (``sym:3``, ``cyclic:4``, ``finite:<path>``)."""
    if spec.startswith("matrix:"):
        return FiniteAlgebra.matrix_algebra(int(spec.split(":", 1)[1]))
    G = parse_group(spec)
    if not isinstance(G, FiniteGroup):
        raise FormsError(f"{spec} is not a finite group")
    return FiniteAlgebra.group_algebra(G)


# --------------------------------------------------------------- form spaces


def omega_dim(alg: FiniteAlgebra, n: int) -> int:
    return alg.dim * (alg.dim - 1) ** n


def omega_basis(alg: FiniteAlgebra, n: int) -> List[Tuple[int, ...]]:
    key = ("basis", n)
    if key not in alg._cache:
        size = omega_dim(alg, n)
        if size > resource_cap():
            raise CapExceeded(f"dim Omega^{n} = {size} exceeds cap")
        alg._cache[key] = [(i0,) + rest for i0 in range(alg.dim)
                           for rest in itertools.product(alg.bar, repeat=n)]
    return alg._cache[key]


def omega_index(alg: FiniteAlgebra, n: int) -> Dict[Tuple[int, ...], int]:
    key = ("index", n)
    if key not in alg._cache:
        alg._cache[key] = {t: i for i, t in enumerate(omega_basis(alg, n))}
    return alg._cache[key]


@dataclass(frozen=True)
class Form:
    algebra: FiniteAlgebra
    degree: int
    terms: Mapping[Tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        u = self.algebra.unit
        clean = {}
        for t, v in self.terms.items():
            if len(t) != self.degree + 1:
                raise FormsError(f"{t!r} is not a degree-{self.degree} basis form")
            if u in t[1:]:
                continue  # d(1) = 0
            v = as_scalar(v)
            if v:
                clean[t] = clean.get(t, 0) + v
        object.__setattr__(self, "terms", {t: v for t, v in clean.items() if v})

    def __add__(self, other):
        if self.degree != other.degree or self.algebra is not other.algebra:
            raise FormsError("forms live in different spaces")
        out = dict(self.terms)
        for t, v in other.terms.items():
            out[t] = out.get(t, 0) + v
        return Form(self.algebra, self.degree, out)

    def __neg__(self):
        return Form(self.algebra, self.degree, {t: -v for t, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = as_scalar(c)
        return Form(self.algebra, self.degree, {t: c * v for t, v in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def vector(self) -> Dict[int, Fraction]:
        idx = omega_index(self.algebra, self.degree)
        return {idx[t]: v for t, v in self.terms.items()}

    @classmethod
    def from_vector(cls, alg: FiniteAlgebra, n: int, vec: Mapping[int, Fraction]) -> "Form":
        basis = omega_basis(alg, n)
        return cls(alg, n, {basis[i]: v for i, v in vec.items()})

    @classmethod
    def basis(cls, alg: FiniteAlgebra, t: Sequence[int]) -> "Form":
        t = tuple(t)
        return cls(alg, len(t) - 1, {t: Fraction(1)})


def _add(out: Terms, t, v):
    out[t] = out.get(t, 0) + v


def _expand(alg: FiniteAlgebra, coeff: Fraction, slots: Sequence[Mapping[int, Fraction]], out: Terms):
    """Accumulate ``coeff * s0 d s1 .. d sn`` for vectors ``s_i`` into ``out``."""
    u = alg.unit
    choices = [list(slots[0].items())] + [[(k, v) for k, v in s.items() if k != u] for s in slots[1:]]
    for combo in itertools.product(*choices):
        c = coeff
        for _, v in combo:
            c *= v
        _add(out, tuple(k for k, _ in combo), c)


def _e(i: int) -> Dict[int, Fraction]:
    return {i: Fraction(1)}


def _linear(fn: Callable[[Tuple[int, ...]], Terms]):
    def apply(w: Form, degree: int) -> Form:
        out: Terms = {}
        for t, v in w.terms.items():
            for s, c in fn(w.algebra, t).items():
                _add(out, s, v * c)
        return Form(w.algebra, degree, out)
    return apply


def _b_basis(alg: FiniteAlgebra, t: Tuple[int, ...]) -> Terms:
    key = ("b", t)
    hit = alg._cache.get(key)
    if hit is not None:
        return hit
    n = len(t) - 1
    out: Terms = {}
    m = alg.mult
    _expand(alg, Fraction(1), [m[t[0]][t[1]]] + [_e(i) for i in t[2:]], out)
    for i in range(1, n):
        sign = Fraction(-1 if i % 2 else 1)
        slots = [_e(t[0])] + [_e(x) for x in t[1:i]] + [m[t[i]][t[i + 1]]] + [_e(x) for x in t[i + 2:]]
        _expand(alg, sign, slots, out)
    _expand(alg, Fraction(-1 if n % 2 else 1), [m[t[n]][t[0]]] + [_e(x) for x in t[1:n]], out)
    out = {s: v for s, v in out.items() if v}
    alg._cache[key] = out
    return out


def _B_basis(alg: FiniteAlgebra, t: Tuple[int, ...]) -> Terms:
    n = len(t) - 1
    u = alg.unit
    if t[0] == u:
        return {}
    out: Terms = {}
    for i in range(n + 1):
        sign = -1 if (n * i) % 2 else 1
        _add(out, (u,) + t[i:] + t[:i], Fraction(sign))
    return {s: v for s, v in out.items() if v}


def forms_b(w: Form) -> Form:
    """Hochschild boundary ``Omega^n -> Omega^(n-1)``."""
    if w.degree == 0:
        raise FormsError("b is not defined on degree 0")
    return _linear(_b_basis)(w, w.degree - 1)


def forms_B(w: Form) -> Form:
    """Connes operator ``Omega^n -> Omega^(n+1)``."""
    return _linear(_B_basis)(w, w.degree + 1)


def forms_d(w: Form) -> Form:
    """Universal derivation on the leading factor: ``a0 da1.. -> da0 da1..``."""
    u = w.algebra.unit
    return Form(w.algebra, w.degree + 1, {(u,) + t: v for t, v in w.terms.items()})


def left_mul(a: int, w: Form) -> Form:
    """``e_a . w`` for a basis element ``e_a``."""
    alg = w.algebra
    out: Terms = {}
    for t, v in w.terms.items():
        for k, c in alg.mult[a][t[0]].items():
            _add(out, (k,) + t[1:], v * c)
    return Form(alg, w.degree, out)


def _right_basis(alg: FiniteAlgebra, t: Tuple[int, ...], a: int) -> Terms:
    # (w' d x) a = w' d(x a) - (w' x) d a
    key = ("r", t, a)
    hit = alg._cache.get(key)
    if hit is not None:
        return hit
    out: Terms = {}
    if len(t) == 1:
        for k, c in alg.mult[t[0]][a].items():
            _add(out, (k,), c)
    else:
        prefix, x = t[:-1], t[-1]
        for k, c in alg.mult[x][a].items():
            if k != alg.unit:
                _add(out, prefix + (k,), c)
        if a != alg.unit:
            for s, c in _right_basis(alg, prefix, x).items():
                _add(out, s + (a,), -c)
    out = {s: v for s, v in out.items() if v}
    alg._cache[key] = out
    return out


def right_mul(w: Form, a: int) -> Form:
    """``w . e_a`` via the Leibniz rule of the bimodule ``Omega^n``."""
    out: Terms = {}
    for t, v in w.terms.items():
        for s, c in _right_basis(w.algebra, t, a).items():
            _add(out, s, v * c)
    return Form(w.algebra, w.degree, out)


def wedge_d(w: Form, x: int) -> Form:
    """``w . d e_x`` (appends a differential)."""
    if x == w.algebra.unit:
        return Form(w.algebra, w.degree + 1, {})
    return Form(w.algebra, w.degree + 1, {t + (x,): v for t, v in w.terms.items()})


# ------------------------------------------------------------ matrices


def operator_matrix(alg: FiniteAlgebra, n_in: int, n_out: int, op: Callable[[Form], Form]) -> SparseMatrix:
    idx_out = omega_index(alg, n_out)
    cols = []
    for t in omega_basis(alg, n_in):
        img = op(Form.basis(alg, t))
        cols.append({idx_out[s]: v for s, v in img.terms.items()})
    return SparseMatrix.from_columns(omega_dim(alg, n_out), cols)


def b_matrix(alg: FiniteAlgebra, n: int) -> SparseMatrix:
    key = ("bmat", n)
    if key not in alg._cache:
        alg._cache[key] = operator_matrix(alg, n, n - 1, forms_b)
    return alg._cache[key]


def B_matrix(alg: FiniteAlgebra, n: int) -> SparseMatrix:
    key = ("Bmat", n)
    if key not in alg._cache:
        alg._cache[key] = operator_matrix(alg, n, n + 1, forms_B)
    return alg._cache[key]


def commutator_matrix(alg: FiniteAlgebra, n: int) -> SparseMatrix:
    """Columns ``e_a w - w e_a`` spanning ``[A, Omega^n]``."""
    key = ("comm", n)
    if key not in alg._cache:
        idx = omega_index(alg, n)
        cols = []
        for a in range(alg.dim):
            for t in omega_basis(alg, n):
                w = Form.basis(alg, t)
                c = left_mul(a, w) - right_mul(w, a)
                if c.terms:
                    cols.append({idx[s]: v for s, v in c.terms.items()})
        alg._cache[key] = SparseMatrix.from_columns(omega_dim(alg, n), cols) if cols else \
            SparseMatrix.zero(omega_dim(alg, n), 0)
    return alg._cache[key]


def commutator_quotient_dim(alg: FiniteAlgebra, n: int) -> int:
    """``dim Omega^n / [A, Omega^n]``."""
    return omega_dim(alg, n) - rank(commutator_matrix(alg, n))


def quotient_map(alg: FiniteAlgebra, n: int) -> SparseMatrix:
    """Surjection ``Omega^n -> F^q`` whose kernel is ``[A, Omega^n]``."""
    key = ("quot", n)
    if key not in alg._cache:
        alg._cache[key] = annihilator(commutator_matrix(alg, n))
    return alg._cache[key]


# ------------------------------------------------------------ X^(n) complex


def x_complex_matrices(alg: FiniteAlgebra, n: int):
    """Blocks of the Z/2-graded complex ``Omega^0 + .. + Omega^(n-1) + Omega^n/[,]``.

    Returns ``(even_dims, odd_dims, d_even, d_odd)`` where ``d_even`` maps the
    even part to the odd part and ``d_odd`` the odd part to the even part.
    The top layer is represented through ``quotient_map`` on its incoming
    side and through ``b`` on the full ``Omega^n`` on its outgoing side; ``b``
    kills ``[A, Omega^n]``, so the outgoing rank is unchanged.
    """
    layers = list(range(n + 1))
    Q = quotient_map(alg, n)

    def layer_dim(k, incoming):
        if k < n:
            return omega_dim(alg, k)
        return Q.rows if incoming else omega_dim(alg, n)

    def block(src, dst):
        # matrix of (b + B) from layer src (as a domain) to layer dst (as a codomain)
        rows = layer_dim(dst, True)
        cols = layer_dim(src, False)
        if dst == src - 1:
            return b_matrix(alg, src)
        if dst == src + 1:
            m = B_matrix(alg, src)
            return Q @ m if dst == n else m
        return SparseMatrix.zero(rows, cols)

    even = [k for k in layers if k % 2 == 0]
    odd = [k for k in layers if k % 2 == 1]

    def assemble(src_layers, dst_layers):
        if not src_layers or not dst_layers:
            rows = sum(layer_dim(k, True) for k in dst_layers)
            cols = sum(layer_dim(k, False) for k in src_layers)
            return SparseMatrix.zero(rows, cols)
        return vstack([hstack([block(s, t) for s in src_layers]) for t in dst_layers])

    d_even = assemble(even, odd)
    d_odd = assemble(odd, even)
    even_dim = sum(layer_dim(k, True) for k in even)
    odd_dim = sum(layer_dim(k, True) for k in odd)
    return even_dim, odd_dim, d_even, d_odd


def x_complex_homology(alg: FiniteAlgebra, n: int) -> Tuple[int, int]:
    """Even and odd homology dimensions of ``X^(n)(A)``."""
    if n < 0:
        raise FormsError("n must be nonnegative")
    if n >= 1:
        top = b_matrix(alg, n) @ commutator_matrix(alg, n)
        if not top.is_zero():
            raise FormsError("b does not vanish on commutators")
    even_dim, odd_dim, d_even, d_odd = x_complex_matrices(alg, n)
    r_even, r_odd = rank(d_even), rank(d_odd)
    return even_dim - r_even - r_odd, odd_dim - r_odd - r_even


# ---------------------------------------------------------------- connections


@dataclass
class AxiomResult:
    name: str
    passed: bool
    witness: Optional[str] = None


@dataclass
class ConnectionReport:
    n: int
    axioms: List[AxiomResult]

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.axioms)

    def failing(self) -> List[str]:
        return [a.name for a in self.axioms if not a.passed]


AXIOMS = ("module_map", "leibniz", "extension", "homotopy")


def _apply(m: SparseMatrix, alg: FiniteAlgebra, n_in: int, w: Form) -> Form:
    return Form.from_vector(alg, n_in + 1, m.apply(w.vector()))


def extend_connection(alg: FiniteAlgebra, n: int, nabla: SparseMatrix, degree: int) -> SparseMatrix:
    """Canonical extension ``nabla(w dx_(n+1)..dx_k) = nabla(w) dx_(n+1)..dx_k``."""
    if degree == n:
        return nabla
    idx = omega_index(alg, degree + 1)
    cols = []
    cache: Dict[Tuple[int, ...], Form] = {}
    for t in omega_basis(alg, degree):
        head, tail = t[: n + 1], t[n + 1:]
        img = cache.get(head)
        if img is None:
            img = _apply(nabla, alg, n, Form.basis(alg, head))
            cache[head] = img
        cols.append({idx[s + tail]: v for s, v in img.terms.items()})
    return SparseMatrix.from_columns(omega_dim(alg, degree + 1), cols)


def _fmt(alg: FiniteAlgebra, t) -> str:
    return "(" + ",".join(alg.labels[i] for i in t) + ")"


def _check_shape(alg: FiniteAlgebra, n: int, nabla: SparseMatrix):
    if n < 1:
        raise FormsError("connections are checked for n >= 1")
    if (nabla.rows, nabla.cols) != (omega_dim(alg, n + 1), omega_dim(alg, n)):
        raise FormsError(f"nabla must be {omega_dim(alg, n + 1)}x{omega_dim(alg, n)}")


def axiom_residuals(alg: FiniteAlgebra, n: int, nabla: SparseMatrix) -> Dict[str, Dict[tuple, Fraction]]:
    """Nonzero defects of the module, Leibniz and homotopy axioms.

    Keys are ``(a, w, s)`` for the pair axioms (``s`` the output basis form)
    and ``(k, w, s)`` for the homotopy identity on ``Omega^k``.  All three
    residuals are affine in ``nabla``.
    """
    _check_shape(alg, n, nabla)
    sign = -1 if n % 2 else 1
    nab = lambda w: _apply(nabla, alg, n, w)
    out: Dict[str, Dict[tuple, Fraction]] = {"module_map": {}, "leibniz": {}, "homotopy": {}}
    for a in range(alg.dim):
        for t in omega_basis(alg, n):
            w = Form.basis(alg, t)
            r = nab(left_mul(a, w)) - left_mul(a, nab(w))
            out["module_map"].update({(a, t, s): v for s, v in r.terms.items()})
            r = nab(right_mul(w, a)) - right_mul(nab(w), a) - wedge_d(w, a).scale(sign)
            out["leibniz"].update({(a, t, s): v for s, v in r.terms.items()})
    for k in (n + 1, n + 2):
        lower = extend_connection(alg, n, nabla, k - 1)
        upper = extend_connection(alg, n, nabla, k)
        total = dict((lower @ b_matrix(alg, k)).entries)
        for key, v in (b_matrix(alg, k + 1) @ upper).entries.items():
            total[key] = total.get(key, 0) + v
        for i in range(omega_dim(alg, k)):
            total[i, i] = total.get((i, i), 0) - 1
        basis = omega_basis(alg, k)
        out["homotopy"].update({(k, basis[j], basis[i]): v for (i, j), v in total.items() if v})
    return out


def connection_check(alg: FiniteAlgebra, n: int, nabla: SparseMatrix,
                     nabla_next: Optional[SparseMatrix] = None) -> ConnectionReport:
    """Check a candidate ``n``-connection ``nabla: Omega^n -> Omega^(n+1)``.

    Axioms, each on all basis pairs:

    * ``module_map``: ``nabla(a w) = a nabla(w)``;
    * ``leibniz``: ``nabla(w a) = nabla(w) a + (-1)^n w da``;
    * ``extension``: the supplied degree-(n+1) map, if any, equals the
      canonical extension ``nabla(w dx) = nabla(w) dx``;
    * ``homotopy``: ``nabla b + b nabla = id`` on ``Omega^(n+1)`` and
      ``Omega^(n+2)``, with the canonical extension.
    """
    res = axiom_residuals(alg, n, nabla)
    results = []
    for name in ("module_map", "leibniz"):
        bad = res[name]
        wit = None
        if bad:
            a, t, _ = min(bad)
            wit = f"a={alg.labels[a]}, w={_fmt(alg, t)}"
        results.append(AxiomResult(name, not bad, wit))

    if nabla_next is None:
        results.append(AxiomResult("extension", True, None))
    else:
        canonical = extend_connection(alg, n, nabla, n + 1)
        if (nabla_next.rows, nabla_next.cols) != (canonical.rows, canonical.cols):
            raise FormsError("degree-(n+1) map has the wrong shape")
        diff = [key for key in set(canonical.entries) | set(nabla_next.entries)
                if canonical.entries.get(key, 0) != nabla_next.entries.get(key, 0)]
        wit = f"w={_fmt(alg, omega_basis(alg, n + 1)[min(diff)[1]])}" if diff else None
        results.append(AxiomResult("extension", not diff, wit))

    bad = res["homotopy"]
    wit = None
    if bad:
        k, t, _ = min(bad)
        wit = f"degree {k}, w={_fmt(alg, t)}"
    results.append(AxiomResult("homotopy", not bad, wit))
    return ConnectionReport(n, results)


def _affine_system(alg: FiniteAlgebra, n: int, names: Sequence[str]):
    """``(L, c, keys)`` with ``residual(x) = L x + c`` over the named axioms."""
    rows_out, cols_in = omega_dim(alg, n + 1), omega_dim(alg, n)
    zero = axiom_residuals(alg, n, SparseMatrix.zero(rows_out, cols_in))
    columns = []
    for c in range(cols_in):
        for r in range(rows_out):
            res = axiom_residuals(alg, n, SparseMatrix(rows_out, cols_in, {(r, c): Fraction(1)}))
            col = {}
            for name in names:
                for key in set(res[name]) | set(zero[name]):
                    v = res[name].get(key, 0) - zero[name].get(key, 0)
                    if v:
                        col[(name,) + key] = v
            columns.append(col)
    const = {(name,) + key: v for name in names for key, v in zero[name].items()}
    keys = sorted({k for col in columns for k in col} | set(const), key=repr)
    index = {k: i for i, k in enumerate(keys)}
    L = SparseMatrix.from_columns(len(keys), [{index[k]: v for k, v in col.items()} for col in columns])
    c = {index[k]: v for k, v in const.items()}
    return L, c


def _vec_to_matrix(alg: FiniteAlgebra, n: int, vec: Mapping[int, Fraction]) -> SparseMatrix:
    rows_out = omega_dim(alg, n + 1)
    return SparseMatrix(rows_out, omega_dim(alg, n),
                        {(x % rows_out, x // rows_out): v for x, v in vec.items()})


def single_axiom_fixture(alg: FiniteAlgebra, n: int, target: str) -> Optional[SparseMatrix]:
    """A candidate failing ``target`` while satisfying the other two affine axioms.

    Exact search over the whole affine solution space of the other axioms;
    None means no such candidate exists for this algebra and degree.
    ``extension`` is not searched: it depends on a separately supplied map.
    """
    names = [a for a in ("module_map", "leibniz", "homotopy") if a != target]
    L, c = _affine_system(alg, n, names)
    nvars = L.cols
    aug = hstack([L, SparseMatrix.from_columns(L.rows, [dict(c)])])
    x0 = None
    for vec in kernel_basis(aug):
        s = vec.get(nvars, 0)
        if s:
            x0 = {i: v / s for i, v in vec.items() if i != nvars}
            break
    if x0 is None:
        return None
    candidates = [x0]
    for k in kernel_basis(L):
        candidates.append({i: x0.get(i, 0) + k.get(i, 0) for i in set(x0) | set(k)})
    for x in candidates:
        m = _vec_to_matrix(alg, n, x)
        if axiom_residuals(alg, n, m)[target]:
            return m
    return None


def _constraint_rows(alg: FiniteAlgebra, n: int, which: Sequence[str]):
    """Affine constraints ``A x = c`` on the entries of ``nabla`` (column-major)."""
    rows_out = omega_dim(alg, n + 1)
    basis_n = omega_basis(alg, n)
    idx_n = omega_index(alg, n)
    idx_out = omega_index(alg, n + 1)
    sign = -1 if n % 2 else 1

    def var(r, c):
        return c * rows_out + r

    def nabla_of(w: Form) -> Dict[Tuple[int, int], Dict[int, Fraction]]:
        # symbolic nabla(w): output row -> {var: coeff}
        out: Dict[int, Dict[int, Fraction]] = {}
        for t, v in w.terms.items():
            c = idx_n[t]
            for r in range(rows_out):
                out.setdefault(r, {})[var(r, c)] = out.setdefault(r, {}).get(var(r, c), 0) + v
        return out

    def mul_sym(op, sym):
        # apply a linear map on Omega^(n+1) to a symbolic vector
        out: Dict[int, Dict[int, Fraction]] = {}
        basis_out = omega_basis(alg, n + 1)
        for r, coeffs in sym.items():
            img = op(Form.basis(alg, basis_out[r]))
            for s, v in img.terms.items():
                slot = out.setdefault(idx_out[s], {})
                for x, c in coeffs.items():
                    slot[x] = slot.get(x, 0) + v * c
        return out

    eqs = []
    for a in range(alg.dim):
        for t in basis_n:
            w = Form.basis(alg, t)
            if "module_map" in which:
                lhs = nabla_of(left_mul(a, w))
                rhs = mul_sym(lambda f: left_mul(a, f), nabla_of(w))
                eqs.extend(_diff_eqs(lhs, rhs, {}, rows_out))
            if "leibniz" in which:
                lhs = nabla_of(right_mul(w, a))
                rhs = mul_sym(lambda f: right_mul(f, a), nabla_of(w))
                const = {idx_out[s]: sign * v for s, v in wedge_d(w, a).terms.items()}
                eqs.extend(_diff_eqs(lhs, rhs, const, rows_out))
            if "right_module" in which:
                # the literal reading: nabla(w a) = nabla(w) a, without the d-term
                lhs = nabla_of(right_mul(w, a))
                rhs = mul_sym(lambda f: right_mul(f, a), nabla_of(w))
                eqs.extend(_diff_eqs(lhs, rhs, {}, rows_out))
    return eqs


def _diff_eqs(lhs, rhs, const, rows):
    # lhs - rhs = const, row by row
    eqs = []
    for r in range(rows):
        coeffs = dict(lhs.get(r, {}))
        for x, c in rhs.get(r, {}).items():
            coeffs[x] = coeffs.get(x, 0) - c
        coeffs = {x: c for x, c in coeffs.items() if c}
        k = const.get(r, 0)
        if coeffs or k:
            eqs.append((coeffs, Fraction(k)))
    return eqs


def solve_connection(alg: FiniteAlgebra, n: int,
                     which: Sequence[str] = ("module_map", "leibniz")) -> Optional[SparseMatrix]:
    """A particular solution of the linear constraints, or None if inconsistent.

    ``which`` names constraints among ``module_map``, ``leibniz`` and
    ``right_module``; the last is the right-module reading, kept to show that
    it cannot be combined with ``leibniz``.
    """
    eqs = _constraint_rows(alg, n, which)
    nvars = omega_dim(alg, n + 1) * omega_dim(alg, n)
    # homogenise: unknowns x and a final slack s with A x - c s = 0, s = 1
    entries = {}
    for i, (coeffs, k) in enumerate(eqs):
        for x, c in coeffs.items():
            entries[i, x] = c
        if k:
            entries[i, nvars] = -k
    m = SparseMatrix(len(eqs), nvars + 1, entries)
    for vec in kernel_basis(m):
        s = vec.get(nvars, 0)
        if s:
            rows_out = omega_dim(alg, n + 1)
            sol = {(x % rows_out, x // rows_out): v / s for x, v in vec.items() if x != nvars}
            # the kernel vector with s != 0 may mix homogeneous directions; any
            # such vector scaled to s = 1 is a particular solution
            return SparseMatrix(rows_out, omega_dim(alg, n), sol)
    return None


# ---------------------------------------------------------------- Iwasawa


@dataclass
class TowerSpec:
    """Finite groups ``G_0 <- G_1 <- ..``; ``maps[k]`` sends generators of ``G_(k+1)`` into ``G_k``."""

    levels: List[FiniteGroup]
    maps: List[Dict[int, int]]

    def __post_init__(self):
        if len(self.maps) != len(self.levels) - 1:
            raise FormsError("need one transition map per consecutive pair of levels")


def extend_homomorphism(src: FiniteGroup, dst: FiniteGroup, gens: Mapping[int, int]) -> List[int]:
    """Extend generator images to a homomorphism; raise if it is not well defined."""
    phi = {src.identity(): dst.identity()}
    frontier = [src.identity()]
    gens = dict(gens)
    for g, h in list(gens.items()):
        gens[src.inverse(g)] = dst.inverse(h)
    while frontier:
        nxt = []
        for g in frontier:
            for s, hs in gens.items():
                x = src.multiply(g, s)
                y = dst.multiply(phi[g], hs)
                if x in phi:
                    if phi[x] != y:
                        raise FormsError("generator images do not define a homomorphism")
                else:
                    phi[x] = y
                    nxt.append(x)
        frontier = nxt
    if len(phi) != src.order:
        raise FormsError("given elements do not generate the source group")
    table = [phi[g] for g in range(src.order)]
    for g in range(src.order):
        for h in range(src.order):
            if table[src.multiply(g, h)] != dst.multiply(table[g], table[h]):
                raise FormsError("generator images do not define a homomorphism")
    return table


def load_tower(path: str) -> TowerSpec:
    """Tower file: ``{"levels": [specs], "maps": [{src: dst, ..}, ..]}``.

    A bare list of specs is accepted for cyclic towers ``Z/n_k``, with the
    generator ``1`` mapped to ``1`` at each step.
    """
    with open(path) as fh:
        data = json.load(fh)
    return tower_from_data(data)


def tower_from_data(data) -> TowerSpec:
    if isinstance(data, list):
        data = {"levels": data}
    specs = data["levels"]
    levels = [parse_group(s) for s in specs]
    for G in levels:
        if not isinstance(G, FiniteGroup):
            raise FormsError(f"{G.spec} is not finite")
    maps = data.get("maps")
    if maps is None:
        maps = [{1: 1} for _ in levels[1:]]
    parsed = []
    for k, m in enumerate(maps):
        src, dst = levels[k + 1], levels[k]
        parsed.append({src.parse_element(a): dst.parse_element(b) for a, b in m.items()})
    return TowerSpec(levels, parsed)


@dataclass
class LevelReport:
    group: str
    quotient_dim: int
    x_homology: Tuple[int, int]
    class_count: int
    transition_surjective: Optional[bool] = None


def iwasawa_tower(tw: TowerSpec, n: int = 1) -> List[LevelReport]:
    """Per-level commutator quotients and ``X^(n)`` homology along a tower."""
    algs = [FiniteAlgebra.group_algebra(G) for G in tw.levels]
    out = []
    for G, A in zip(tw.levels, algs):
        out.append(LevelReport(group=G.spec, quotient_dim=commutator_quotient_dim(A, 0),
                               x_homology=x_complex_homology(A, n),
                               class_count=len(G.conjugacy_classes())))
    for k, gens in enumerate(tw.maps):
        src, dst = tw.levels[k + 1], tw.levels[k]
        table = extend_homomorphism(src, dst, gens)
        if set(table) != set(range(dst.order)):
            raise FormsError(f"transition {src.spec} -> {dst.spec} is not surjective")
        phi = SparseMatrix(dst.order, src.order, {(table[g], g): Fraction(1) for g in range(src.order)})
        Qdst = quotient_map(algs[k], 0)
        induced = Qdst @ phi
        # commutators must go to commutators for the map to descend
        descends = (induced @ commutator_matrix(algs[k + 1], 0)).is_zero()
        out[k + 1].transition_surjective = descends and rank(induced) == Qdst.rows
    return out
