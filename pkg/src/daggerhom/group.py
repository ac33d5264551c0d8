"""Finitely generated groups with word length, balls and combings.

Elements are plain hashable values so they can key sparse dictionaries:

* free group of rank r: reduced tuple of nonzero ints, ``+i`` for the i-th
  generator and ``-i`` for its inverse;
* free abelian group of rank k: tuple of k ints;
* finite group: int index into the multiplication table.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence

import numpy as np

from .config import CapExceeded, resource_cap

Element = Hashable

LETTERS = "abcdefghijklmnopqrstuvwxyz"


class GroupError(ValueError):
    pass


class Group:
    """Common interface; subclasses fix the element encoding."""

    kind: str = ""

    def identity(self) -> Element:
        raise NotImplementedError

    def multiply(self, g: Element, h: Element) -> Element:
        raise NotImplementedError

    def inverse(self, g: Element) -> Element:
        raise NotImplementedError

    def generators(self) -> List[Element]:
        raise NotImplementedError

    def validate(self, g: Element) -> Element:
        raise NotImplementedError

    def word_length(self, g: Element) -> int:
        raise NotImplementedError

    def sort_key(self, g: Element):
        return (self.word_length(g), g)

    def normal_form(self, g: Element) -> List[Element]:
        """A geodesic word (list of generators) whose product is ``g``."""
        raise NotImplementedError

    def parse_element(self, raw) -> Element:
        raise NotImplementedError

    def format_element(self, g: Element):
        raise NotImplementedError

    def product(self, word: Iterable[Element]) -> Element:
        out = self.identity()
        for s in word:
            out = self.multiply(out, s)
        return out

    def distance(self, g: Element, h: Element) -> int:
        return self.word_length(self.multiply(self.inverse(g), h))

    def ball(self, radius: int, cap: Optional[int] = None) -> List[Element]:
        """All elements of word length at most ``radius``, canonically ordered."""
        if radius < 0:
            raise GroupError("radius must be nonnegative")
        cap = resource_cap() if cap is None else cap
        e = self.identity()
        seen = {e: 0}
        frontier = [e]
        gens = self.generators()
        for r in range(1, radius + 1):
            nxt = []
            for g in frontier:
                for s in gens:
                    h = self.multiply(g, s)
                    if h not in seen:
                        seen[h] = r
                        nxt.append(h)
                        if len(seen) > cap:
                            raise CapExceeded(f"ball of radius {radius} exceeds cap {cap}")
            if not nxt:
                break
            frontier = nxt
        return sorted(seen, key=self.sort_key)

    def __eq__(self, other):
        return type(self) is type(other) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec}>"


class FreeGroup(Group):
    kind = "free"

    def __init__(self, rank: int):
        if rank < 1 or rank > len(LETTERS):
            raise GroupError(f"unsupported free rank {rank}")
        self.rank = rank
        self.spec = f"free:{rank}"

    def identity(self):
        return ()

    def multiply(self, g, h):
        # cancel at the junction only: both inputs are reduced
        k = 0
        n = min(len(g), len(h))
        while k < n and g[len(g) - 1 - k] == -h[k]:
            k += 1
        return g[: len(g) - k] + h[k:]

    def inverse(self, g):
        return tuple(-x for x in reversed(g))

    def generators(self):
        return [(i,) for i in range(1, self.rank + 1)] + [(-i,) for i in range(1, self.rank + 1)]

    def validate(self, g):
        if not isinstance(g, tuple):
            raise GroupError(f"free group element must be a tuple, got {g!r}")
        for x in g:
            if not isinstance(x, int) or x == 0 or abs(x) > self.rank:
                raise GroupError(f"bad letter {x!r} for {self.spec}")
        for x, y in zip(g, g[1:]):
            if x == -y:
                raise GroupError(f"word {g!r} is not reduced")
        return g

    def word_length(self, g):
        return len(g)

    def sort_key(self, g):
        return (len(g), tuple((abs(x), x < 0) for x in g))

    def normal_form(self, g):
        return [(x,) for x in g]

    def parse_element(self, raw):
        """Accept ``"abA"`` (upper case = inverse), ``"e"``/``""`` or an int list."""
        if isinstance(raw, (list, tuple)):
            word = [int(x) for x in raw]
        else:
            text = str(raw).replace(" ", "").replace("*", "")
            if text in ("", "e", "1"):
                return ()
            word = []
            for ch in text:
                idx = LETTERS.find(ch.lower())
                if idx < 0:
                    raise GroupError(f"bad letter {ch!r}")
                word.append(-(idx + 1) if ch.isupper() else idx + 1)
        return self.product((x,) for x in word)

    def format_element(self, g):
        if not g:
            return "e"
        return "".join(LETTERS[x - 1] if x > 0 else LETTERS[-x - 1].upper() for x in g)


class FreeAbelianGroup(Group):
    kind = "free_abelian"

    def __init__(self, rank: int):
        if rank < 1:
            raise GroupError(f"unsupported rank {rank}")
        self.rank = rank
        self.spec = f"zn:{rank}"

    def identity(self):
        return (0,) * self.rank

    def multiply(self, g, h):
        return tuple(x + y for x, y in zip(g, h))

    def inverse(self, g):
        return tuple(-x for x in g)

    def generators(self):
        gens = []
        for i in range(self.rank):
            for s in (1, -1):
                v = [0] * self.rank
                v[i] = s
                gens.append(tuple(v))
        return gens

    def validate(self, g):
        if not isinstance(g, tuple) or len(g) != self.rank or not all(isinstance(x, int) for x in g):
            raise GroupError(f"bad element {g!r} for {self.spec}")
        return g

    def word_length(self, g):
        return sum(abs(x) for x in g)

    def normal_form(self, g):
        # walk coordinate by coordinate
        word = []
        for i, x in enumerate(g):
            v = [0] * self.rank
            v[i] = 1 if x > 0 else -1
            word.extend([tuple(v)] * abs(x))
        return word

    def parse_element(self, raw):
        if isinstance(raw, str):
            raw = json.loads(raw) if raw.strip().startswith("[") else [int(t) for t in raw.split(",")]
        g = tuple(int(x) for x in raw)
        return self.validate(g)

    def format_element(self, g):
        return list(g)


class FiniteGroup(Group):
    """Finite group given by a multiplication table (``table[i][j] = i*j``)."""

    kind = "finite"

    def __init__(self, table: Sequence[Sequence[int]], generators: Optional[Sequence[int]] = None,
                 spec: str = "finite", labels: Optional[Sequence[str]] = None):
        t = np.asarray(table, dtype=np.int64)
        n = t.shape[0]
        if t.shape != (n, n) or n == 0:
            raise GroupError("multiplication table must be square and nonempty")
        if t.min() < 0 or t.max() >= n:
            raise GroupError("table entries out of range")
        for row in t:
            if len(set(row.tolist())) != n:
                raise GroupError("table rows must be permutations")
        for col in t.T:
            if len(set(col.tolist())) != n:
                raise GroupError("table columns must be permutations")
        ids = [i for i in range(n) if all(t[i, j] == j for j in range(n))]
        if not ids:
            raise GroupError("no identity element")
        self._e = ids[0]
        # associativity: (ij)k == i(jk)
        left = t[t[:, :, None], np.arange(n)[None, None, :]]
        right = t[np.arange(n)[:, None, None], t[None, :, :]]
        if not np.array_equal(left, right):
            raise GroupError("table is not associative")
        self.table = [list(map(int, row)) for row in t]
        self.order = n
        self._inv = [row.index(self._e) for row in self.table]
        if generators is None:
            generators = [i for i in range(n) if i != self._e]
        gens = sorted(set(int(g) for g in generators))
        closed = set(gens) | {self._inv[g] for g in gens}
        if closed != set(gens):
            gens = sorted(closed)
        self._gens = gens
        self.spec = spec
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n)]
        self._dist, self._words = self._bfs()
        if len(self._dist) != n:
            raise GroupError("generators do not generate the group")

    def _bfs(self):
        e = self._e
        dist = {e: 0}
        words: Dict[int, List[int]] = {e: []}
        queue = deque([e])
        while queue:
            g = queue.popleft()
            for s in self._gens:
                h = self.table[g][s]
                if h not in dist:
                    dist[h] = dist[g] + 1
                    words[h] = words[g] + [s]
                    queue.append(h)
        return dist, words

    def identity(self):
        return self._e

    def multiply(self, g, h):
        return self.table[g][h]

    def inverse(self, g):
        return self._inv[g]

    def generators(self):
        return list(self._gens)

    def validate(self, g):
        if not isinstance(g, int) or not 0 <= g < self.order:
            raise GroupError(f"bad element {g!r} for {self.spec}")
        return g

    def word_length(self, g):
        return self._dist[g]

    def normal_form(self, g):
        return list(self._words[g])

    def elements(self) -> List[int]:
        return list(range(self.order))

    def parse_element(self, raw):
        if isinstance(raw, str) and raw in self.labels:
            return self.labels.index(raw)
        return self.validate(int(raw))

    def format_element(self, g):
        return g

    def conjugacy_classes(self) -> List[List[int]]:
        seen = set()
        classes = []
        for g in range(self.order):
            if g in seen:
                continue
            cls = sorted({self.table[self.table[h][g]][self._inv[h]] for h in range(self.order)})
            seen.update(cls)
            classes.append(cls)
        return classes


class ProductGroup(Group):
    """Direct product ``G x G``; length is the sum of the factor lengths."""

    kind = "product"

    def __init__(self, left: Group, right: Group):
        self.left = left
        self.right = right
        self.spec = f"({left.spec})x({right.spec})"

    def identity(self):
        return (self.left.identity(), self.right.identity())

    def multiply(self, g, h):
        return (self.left.multiply(g[0], h[0]), self.right.multiply(g[1], h[1]))

    def inverse(self, g):
        return (self.left.inverse(g[0]), self.right.inverse(g[1]))

    def generators(self):
        return ([(s, self.right.identity()) for s in self.left.generators()]
                + [(self.left.identity(), s) for s in self.right.generators()])

    def validate(self, g):
        if not isinstance(g, tuple) or len(g) != 2:
            raise GroupError(f"bad product element {g!r}")
        return (self.left.validate(g[0]), self.right.validate(g[1]))

    def word_length(self, g):
        return self.left.word_length(g[0]) + self.right.word_length(g[1])

    def sort_key(self, g):
        return (self.word_length(g), self.left.sort_key(g[0]), self.right.sort_key(g[1]))

    def normal_form(self, g):
        return ([(s, self.right.identity()) for s in self.left.normal_form(g[0])]
                + [(self.left.identity(), s) for s in self.right.normal_form(g[1])])

    def parse_element(self, raw):
        return (self.left.parse_element(raw[0]), self.right.parse_element(raw[1]))

    def format_element(self, g):
        return [self.left.format_element(g[0]), self.right.format_element(g[1])]


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic order must be positive")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(table, spec=f"cyclic:{n}")


def symmetric_group(n: int) -> FiniteGroup:
    if n < 1 or n > 5:
        raise GroupError("sym:n supported for 1 <= n <= 5")
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    # (p*q)(x) = p(q(x))
    table = [[index[tuple(p[q[x]] for x in range(n))] for q in perms] for p in perms]
    labels = ["".join(map(str, p)) for p in perms]
    return FiniteGroup(table, spec=f"sym:{n}", labels=labels)


def load_table(path: str) -> List[List[int]]:
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data["table"]
    return [[int(x) for x in row] for row in data]


def parse_group(spec: str) -> Group:
    """Build a group from ``free:2``, ``zn:2``, ``sym:3``, ``cyclic:4`` or ``finite:<path>``."""
    kind, _, arg = spec.partition(":")
    if not arg:
        raise GroupError(f"bad group spec {spec!r}")
    kind = kind.strip().lower()
    if kind == "finite":
        return FiniteGroup(load_table(arg), spec=spec)
    try:
        n = int(arg)
    except ValueError:
        raise GroupError(f"bad group spec {spec!r}") from None
    if kind == "free":
        return FreeGroup(n)
    if kind in ("zn", "free_abelian", "z"):
        return FreeAbelianGroup(n)
    if kind == "sym":
        return symmetric_group(n)
    if kind == "cyclic":
        return cyclic_group(n)
    raise GroupError(f"unknown group kind {kind!r}")


# ---------------------------------------------------------------- combings


@dataclass(frozen=True)
class DeclaredConstants:
    C: Optional[float] = None
    S: Optional[float] = None
    growth_order: Optional[int] = None


class Combing:
    """Sequence of maps ``f_k: G -> G`` with ``f_0 = e`` eventually the identity.

    ``evaluator(k, g)`` returns the stage-k image.  ``max_stage`` bounds the
    stages a chain computation will look at; past it the combing must have
    stabilised on every element it is applied to.
    """

    def __init__(self, group: Group, evaluator: Callable[[int, Element], Element],
                 declared: Optional[DeclaredConstants] = None, max_stage: int = 256,
                 name: str = "combing"):
        self.group = group
        self.evaluator = evaluator
        self.declared = declared
        self.max_stage = max_stage
        self.name = name

    def __call__(self, k: int, g: Element) -> Element:
        if k < 0:
            raise ValueError("stage must be nonnegative")
        return self.evaluator(k, g)

    def stage_map(self, k: int) -> Callable[[Element], Element]:
        return lambda g: self.evaluator(k, g)

    def stabilization(self, g: Element, limit: Optional[int] = None) -> Optional[int]:
        """Least n with ``f_N(g) = g`` for n <= N <= limit, or None."""
        limit = self.max_stage if limit is None else limit
        n = None
        for k in range(limit, -1, -1):
            if self.evaluator(k, g) != g:
                break
            n = k
        return n


def geodesic_combing(group: Group, max_stage: int = 256) -> Combing:
    """``f_k(g)`` = product of the first ``k`` letters of the normal form of ``g``.

    For free groups this is the prefix combing on reduced words.
    """
    cache: Dict[Element, List[Element]] = {}

    def prefixes(g):
        p = cache.get(g)
        if p is None:
            p = [group.identity()]
            for s in group.normal_form(g):
                p.append(group.multiply(p[-1], s))
            cache[g] = p
        return p

    def evaluator(k, g):
        p = prefixes(g)
        return p[k] if k < len(p) else p[-1]

    declared = DeclaredConstants(S=1, growth_order=1) if group.kind == "free" else None
    return Combing(group, evaluator, declared=declared, max_stage=max_stage,
                   name="prefix" if group.kind == "free" else "geodesic")


def prefix_combing(group: FreeGroup, max_stage: int = 256) -> Combing:
    if group.kind != "free":
        raise GroupError("prefix combing is defined on free groups")
    return geodesic_combing(group, max_stage=max_stage)


def late_jump_combing(base: Combing, stage: int = 40, distance: int = 20) -> Combing:
    """Adversarial fixture: ``base`` except that at ``stage`` every ``g != e`` jumps far.

    The map at ``stage`` sends ``g`` to ``g s^distance`` (``s`` the first
    generator) and the next stage returns to ``g``.  It still starts at ``e``
    and ends at the identity, so the homotopy identity holds, but the step
    bound fails outside any profile window that stops before ``stage``.
    """
    G = base.group
    s = G.generators()[0]
    far = G.product([s] * distance)

    def evaluator(k, g):
        if k == stage and g != G.identity():
            return G.multiply(g, far)
        return base(k, g)

    return Combing(G, evaluator, declared=base.declared, max_stage=max(base.max_stage, stage + 1),
                   name=f"late-jump({base.name})")


def combing_eval(c: Combing, k: int, g: Element) -> Element:
    return c(k, g)


@dataclass
class CombingProfile:
    radius: int
    ok: bool
    C_est: float
    S_est: int
    D_est: float
    J: Dict[Element, int]
    growth_order: Optional[float]
    failures: List[str]


def combing_profile(c: Combing, radius: int, cap: Optional[int] = None,
                    lipschitz: bool = True) -> CombingProfile:
    """Exhaustive constants of ``c`` over the ball of the given radius.

    Stages ``0..4*radius`` are inspected (at least one stage past zero).
    ``C_est`` is the least C with ``d(f_k x, f_k y) <= C (d(x, y) + 1)``,
    ``S_est`` the largest single-stage step (the pairwise scan for ``C_est`` is
    skipped when ``lipschitz`` is false and ``C_est`` is then NaN), ``D_est`` the least D with
    ``l(f_k g) + 1 <= D (l(g) + 1)``, and ``J`` counts the moving stages.
    """
    G = c.group
    ball = G.ball(radius, cap=cap)
    stages = max(4 * radius, 1)
    images = {g: [c(k, g) for k in range(stages + 1)] for g in ball}
    failures = []
    J: Dict[Element, int] = {}
    S_est = 0
    D_est = 1.0
    e = G.identity()
    for g, imgs in images.items():
        if imgs[0] != e:
            failures.append(f"f_0({G.format_element(g)}) != e")
        if imgs[-1] != g:
            failures.append(f"no stabilization for {G.format_element(g)} within {stages} stages")
        J[g] = sum(1 for a, b in zip(imgs, imgs[1:]) if a != b)
        for a, b in zip(imgs, imgs[1:]):
            S_est = max(S_est, G.distance(a, b))
        lg = G.word_length(g)
        for a in imgs:
            D_est = max(D_est, (G.word_length(a) + 1) / (lg + 1))
    C_est = 0.0 if lipschitz else math.nan
    for i, x in enumerate(ball if lipschitz else ()):
        for y in ball[i + 1:]:
            dxy = G.distance(x, y)
            ix, iy = images[x], images[y]
            worst = max(G.distance(a, b) for a, b in zip(ix, iy))
            C_est = max(C_est, worst / (dxy + 1))
    growth = _fit_growth_order(G, J)
    if c.declared is not None:
        d = c.declared
        if d.S is not None and S_est > d.S:
            failures.append(f"declared S={d.S} but observed {S_est}")
        if d.C is not None and lipschitz and C_est > d.C:
            failures.append(f"declared C={d.C} but observed {C_est}")
    return CombingProfile(radius=radius, ok=not failures, C_est=C_est, S_est=S_est, D_est=D_est,
                          J=J, growth_order=growth, failures=failures)


def _fit_growth_order(G: Group, J: Dict[Element, int]) -> Optional[float]:
    # least-squares slope of log(J + 1) against log(l + 1); the +1 keeps J = 0
    # points and makes J = l fit with slope exactly one
    xs = [math.log(G.word_length(g) + 1) for g in J]
    ys = [math.log(j + 1) for j in J.values()]
    if len(set(xs)) < 2:
        return None
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)
