"""Explicit subgroups of GL_2(F_p): Cartan subgroups, their normalisers, G(p), H(p).

Matrices are row-major 4-tuples ``(a, b, c, d)`` with entries in ``range(p)``.
A :class:`SubgroupSet` carries generators, a constant-time membership test and
(lazily) the full element set.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator

import numpy as np

from .fp_arith import PrimeContext, is_cube

Mat2 = tuple[int, int, int, int]

KINDS = ("Cns", "Nns", "Csp", "Nsp", "G", "Hintersect", "Borel", "Unipotent", "Custom")

# p^4 bytes of bookkeeping per closure.
CLOSURE_PRIME_LIMIT = 100

IDENTITY: Mat2 = (1, 0, 0, 1)


def mat_mul(p: int, g: Mat2, h: Mat2) -> Mat2:
    a, b, c, d = g
    e, f, x, y = h
    return ((a * e + b * x) % p, (a * f + b * y) % p,
            (c * e + d * x) % p, (c * f + d * y) % p)


def det(p: int, g: Mat2) -> int:
    return (g[0] * g[3] - g[1] * g[2]) % p


def mat_inv(p: int, g: Mat2) -> Mat2:
    dt = det(p, g)
    if dt == 0:
        raise ZeroDivisionError(f"singular matrix {g}")
    di = pow(dt, p - 2, p)
    a, b, c, d = g
    return (d * di % p, -b * di % p, -c * di % p, a * di % p)


def mat_pow(p: int, g: Mat2, n: int) -> Mat2:
    if n < 0:
        g, n = mat_inv(p, g), -n
    result = IDENTITY
    while n:
        if n & 1:
            result = mat_mul(p, result, g)
        g = mat_mul(p, g, g)
        n >>= 1
    return result


def is_scalar(g: Mat2) -> bool:
    return g[1] == 0 and g[2] == 0 and g[0] == g[3]


def gl2_order(p: int) -> int:
    return (p * p - 1) * (p * p - p)


def element_order(p: int, g: Mat2) -> int:
    """Order of g in GL_2(F_p)."""
    k, h = 1, g
    while h != IDENTITY:
        h = mat_mul(p, h, g)
        k += 1
    return k


def pgl_order(p: int, g: Mat2) -> int:
    """Order of the image of g in PGL_2(F_p)."""
    k, h = 1, g
    while not is_scalar(h):
        h = mat_mul(p, h, g)
        k += 1
    return k


def pgl_class(p: int, g: Mat2) -> Mat2:
    """Canonical representative of g modulo scalars (first nonzero entry 1)."""
    lead = next(x for x in g if x)
    li = pow(lead, p - 2, p)
    return tuple(x * li % p for x in g)  # type: ignore[return-value]


class SubgroupSet:
    """A subgroup of GL_2(F_p) given by generators plus a membership predicate.

    ``elements`` is materialized on first use. When no enumerator is given it
    is computed as the closure of the generators.
    """

    def __init__(self, ctx: PrimeContext, kind: str, generators: Iterable[Mat2],
                 predicate: Callable[[Mat2], bool] | None = None,
                 enumerate_fn: Callable[[], Iterable[Mat2]] | None = None,
                 sl2_fn: Callable[[], Iterable[Mat2]] | None = None,
                 elements: frozenset | None = None, name: str | None = None,
                 audit: bool = True):
        if kind not in KINDS:
            raise ValueError(f"unknown subgroup kind {kind!r}")
        self.ctx = ctx
        self.kind = kind
        self.name = name or kind
        self.generators = tuple(tuple(x % ctx.p for x in g) for g in generators)
        if any(det(ctx.p, g) == 0 for g in self.generators):
            raise ValueError("generators must be invertible")
        self._elements = elements
        self._enumerate_fn = enumerate_fn
        self._sl2_fn = sl2_fn
        if predicate is None:
            predicate = lambda g: g in self.elements  # noqa: E731
        self._predicate = predicate
        if audit:
            self.audit()

    def __repr__(self):
        return f"SubgroupSet({self.name}, p={self.ctx.p})"

    @property
    def p(self) -> int:
        return self.ctx.p

    def contains(self, g: Mat2) -> bool:
        return self._predicate(tuple(x % self.p for x in g))

    __contains__ = contains

    @property
    def elements(self) -> frozenset:
        if self._elements is None:
            if self._enumerate_fn is not None:
                self._elements = frozenset(self._enumerate_fn())
            else:
                self._elements = closure_elements(self.ctx, self.generators)
        return self._elements

    def __iter__(self) -> Iterator[Mat2]:
        return iter(sorted(self.elements))

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def sl2_elements(self) -> list[Mat2]:
        """Elements of determinant one, sorted."""
        if self._sl2_fn is not None:
            return sorted(self._sl2_fn())
        return sorted(g for g in self.elements if det(self.p, g) == 1)

    def random_element(self, rng: random.Random, length: int = 24) -> Mat2:
        g = IDENTITY
        for _ in range(rng.randint(0, length)):
            g = mat_mul(self.p, g, rng.choice(self.generators))
        return g

    def audit(self, pairs: int = 1000, seed: int = 0) -> None:
        """Closure audit: g*h^-1 stays in the set for random pairs.

        Pairs are random words in the generators, so this also checks that the
        predicate accepts everything the generators produce.
        """
        p = self.p
        for g in self.generators:
            if not self.contains(g):
                raise ValueError(f"{self.name}: generator {g} fails the membership test")
        if not self.generators:
            return
        rng = random.Random(seed)
        for _ in range(pairs):
            g = self.random_element(rng)
            h = self.random_element(rng)
            if not self.contains(mat_mul(p, g, mat_inv(p, h))):
                raise ValueError(f"{self.name}: not closed, g={g} h={h}")


# -- constructions -----------------------------------------------------------

def _cns_matrix(ctx: PrimeContext, a: int, b: int) -> Mat2:
    p = ctx.p
    return (a % p, ctx.epsilon * b % p, b % p, a % p)


def _in_cns(ctx: PrimeContext, g: Mat2) -> bool:
    a, b, c, d = g
    return a == d and b == ctx.epsilon * c % ctx.p and (a or c)


def _in_cns_coset(ctx: PrimeContext, g: Mat2) -> bool:
    # diag(1,-1) * C_ns: matrices (a, eps*b; -b, -a)
    a, b, c, d = g
    p = ctx.p
    return d == -a % p and b == -ctx.epsilon * c % p and (a or c)


def _cartan_element(ctx: PrimeContext, g: Mat2):
    """The F_{p^2} element a + b*sqrt(eps) attached to g in N_ns, and the coset bit."""
    p = ctx.p
    if _in_cns(ctx, g):
        return (g[0], g[2]), 0
    if _in_cns_coset(ctx, g):
        return (g[0], -g[2] % p), 1
    return None, None


def _norm_pm1(ctx: PrimeContext) -> tuple[list, list]:
    """Elements of F_{p^2} of norm 1 and of norm -1."""
    p = ctx.p
    x, y = np.divmod(np.arange(p * p), p)
    n = (x * x - ctx.epsilon * y * y) % p
    one = list(zip(x[n == 1].tolist(), y[n == 1].tolist()))
    minus = list(zip(x[n == p - 1].tolist(), y[n == p - 1].tolist()))
    return one, minus


def _jm(ctx: PrimeContext, x: int, y: int) -> Mat2:
    """diag(1,-1) times the C_ns matrix of x + y*sqrt(eps)."""
    p = ctx.p
    return (x % p, ctx.epsilon * y % p, -y % p, -x % p)


def _cns(ctx: PrimeContext) -> SubgroupSet:
    p = ctx.p
    gx, gy = ctx.fp2_generator()

    def enum():
        # (a, b) != (0, 0): requiring b != 0 as well would not be closed (it excludes scalars).
        for a in range(p):
            for b in range(p):
                if a or b:
                    yield _cns_matrix(ctx, a, b)

    def sl2():
        return [_cns_matrix(ctx, x, y) for x, y in _norm_pm1(ctx)[0]]

    return SubgroupSet(ctx, "Cns", [_cns_matrix(ctx, gx, gy)],
                       predicate=lambda g: bool(_in_cns(ctx, g)), enumerate_fn=enum, sl2_fn=sl2)


J: Mat2 = (1, 0, 0, -1)


def _nns(ctx: PrimeContext) -> SubgroupSet:
    p = ctx.p
    gx, gy = ctx.fp2_generator()
    j = tuple(x % p for x in J)

    def enum():
        for a in range(p):
            for b in range(p):
                if a or b:
                    m = _cns_matrix(ctx, a, b)
                    yield m
                    yield mat_mul(p, j, m)

    return SubgroupSet(ctx, "Nns", [_cns_matrix(ctx, gx, gy), j],
                       predicate=lambda g: bool(_in_cns(ctx, g) or _in_cns_coset(ctx, g)),
                       enumerate_fn=enum, sl2_fn=lambda: _nns_sl2(ctx, cubes=False))


def _nns_sl2(ctx: PrimeContext, cubes: bool) -> list[Mat2]:
    one, minus = _norm_pm1(ctx)
    if cubes:
        # cubing is a bijection on F_p^x when p = 2 mod 3, so a cube of norm +-1
        # is the cube of an element of norm +-1
        one = {ctx.pow(z, 3) for z in one}
        minus = {ctx.pow(z, 3) for z in minus}
    return [_cns_matrix(ctx, x, y) for x, y in one] + [_jm(ctx, x, y) for x, y in minus]


def _g(ctx: PrimeContext) -> SubgroupSet:
    """G(p): cubes of C_ns together with diag(1,-1) times cubes."""
    p = ctx.p
    gen = ctx.fp2_generator()
    g3 = ctx.pow(gen, 3)
    j = tuple(x % p for x in J)

    def pred(g):
        z, _ = _cartan_element(ctx, g)
        return z is not None and is_cube(ctx, z)

    def enum():
        cubes = {ctx.pow(z, 3) for z in ctx.nonzero()}
        for x, y in cubes:
            m = _cns_matrix(ctx, x, y)
            yield m
            yield mat_mul(p, j, m)

    sl2 = (lambda: _nns_sl2(ctx, cubes=True)) if p % 3 == 2 else None
    return SubgroupSet(ctx, "G", [_cns_matrix(ctx, *g3), j], predicate=pred,
                       enumerate_fn=enum, sl2_fn=sl2)


def _csp(ctx: PrimeContext) -> SubgroupSet:
    p, e = ctx.p, ctx.epsilon

    def enum():
        for a in range(1, p):
            for d in range(1, p):
                yield (a, 0, 0, d)

    return SubgroupSet(ctx, "Csp", [(e, 0, 0, 1), (1, 0, 0, e)],
                       predicate=lambda g: g[1] == 0 and g[2] == 0 and g[0] and g[3],
                       enumerate_fn=enum, sl2_fn=lambda: _diag_sl2(p, anti=False))


def _diag_sl2(p: int, anti: bool) -> list[Mat2]:
    out = []
    for a in range(1, p):
        ai = pow(a, p - 2, p)
        out.append((a, 0, 0, ai))
        if anti:
            out.append((0, a, -ai % p, 0))
    return out


def _in_nsp(g: Mat2) -> bool:
    a, b, c, d = g
    return bool((b == 0 and c == 0 and a and d) or (a == 0 and d == 0 and b and c))


def _nsp(ctx: PrimeContext) -> SubgroupSet:
    p, e = ctx.p, ctx.epsilon

    def enum():
        for a in range(1, p):
            for d in range(1, p):
                yield (a, 0, 0, d)
                yield (0, a, d, 0)

    return SubgroupSet(ctx, "Nsp", [(e, 0, 0, 1), (1, 0, 0, e), (0, 1, 1, 0)],
                       predicate=_in_nsp, enumerate_fn=enum,
                       sl2_fn=lambda: _diag_sl2(p, anti=True))


def _hintersect(ctx: PrimeContext) -> SubgroupSet:
    """H(p) = N_ns(p) cap N_sp(p), listed as its two explicit families."""
    p, e = ctx.p, ctx.epsilon

    def enum():
        for a in range(1, p):
            yield (a, 0, 0, a)
            yield (a, 0, 0, -a % p)
            yield (0, e * a % p, a, 0)
            yield (0, e * a % p, -a % p, 0)

    def pred(g):
        return _in_nsp(g) and bool(_in_cns(ctx, g) or _in_cns_coset(ctx, g))

    return SubgroupSet(ctx, "Hintersect", [(e, 0, 0, e), (1, 0, 0, p - 1), (0, e, 1, 0)],
                       predicate=pred, enumerate_fn=enum)


def _borel(ctx: PrimeContext) -> SubgroupSet:
    p, e = ctx.p, ctx.epsilon

    def enum():
        for a in range(1, p):
            for d in range(1, p):
                for b in range(p):
                    yield (a, b, 0, d)

    def sl2():
        for a in range(1, p):
            ai = pow(a, p - 2, p)
            for b in range(p):
                yield (a, b, 0, ai)

    return SubgroupSet(ctx, "Borel", [(e, 0, 0, 1), (1, 0, 0, e), (1, 1, 0, 1)],
                       predicate=lambda g: g[2] == 0 and g[0] and g[3],
                       enumerate_fn=enum, sl2_fn=sl2)


def _unipotent(ctx: PrimeContext) -> SubgroupSet:
    p = ctx.p
    return SubgroupSet(ctx, "Unipotent", [(1, 1, 0, 1)],
                       predicate=lambda g: g[0] == 1 and g[2] == 0 and g[3] == 1,
                       enumerate_fn=lambda: ((1, b, 0, 1) for b in range(p)))


_BUILDERS = {
    "Cns": _cns, "Nns": _nns, "G": _g, "Csp": _csp, "Nsp": _nsp,
    "Hintersect": _hintersect, "Borel": _borel, "Unipotent": _unipotent,
}


@lru_cache(maxsize=128)
def build_subgroup(ctx: PrimeContext, kind: str) -> SubgroupSet:
    """Named subgroup (cached per context: treat the result as read-only)."""
    if kind == "Custom":
        raise ValueError("Custom subgroups are built with closure()")
    try:
        builder = _BUILDERS[kind]
    except KeyError:
        raise ValueError(f"unknown subgroup kind {kind!r}") from None
    if kind == "G" and ctx.p == 3:
        raise ValueError("G(p) needs p != 3")
    return builder(ctx)


def cns_cubes(ctx: PrimeContext) -> SubgroupSet:
    """The subgroup of cubes of C_ns(p), of index 3 in the cyclic group C_ns(p)."""
    gen = ctx.pow(ctx.fp2_generator(), 3)

    def pred(g):
        return bool(_in_cns(ctx, g)) and is_cube(ctx, (g[0], g[2]))

    return SubgroupSet(ctx, "Custom", [_cns_matrix(ctx, *gen)], predicate=pred, name="Cns^3")


def scalars(ctx: PrimeContext) -> SubgroupSet:
    e = ctx.epsilon
    return SubgroupSet(ctx, "Custom", [(e, 0, 0, e)], predicate=is_scalar_unit, name="Scalars")


def is_scalar_unit(g: Mat2) -> bool:
    return is_scalar(g) and g[0] != 0


# -- closure -----------------------------------------------------------------

def _closure_codes(ctx: PrimeContext, generators, max_order: int | None = None) -> np.ndarray:
    """Codes ((a*p + b)*p + c)*p + d of the group generated by ``generators``.

    Breadth-first search with a p^4 visited bitmap; every element of a finite
    group is a positive word in its generators, so right multiplication by
    the generators alone reaches everything.
    """
    p = ctx.p
    if p > CLOSURE_PRIME_LIMIT:
        raise MemoryError(f"closure refused for p={p} > {CLOSURE_PRIME_LIMIT}")
    gens = [tuple(x % p for x in g) for g in generators]
    if any(det(p, g) == 0 for g in gens):
        raise ValueError("generators must be invertible")
    visited = np.zeros(p**4, dtype=bool)
    frontier = np.array([[1, 0, 0, 1]], dtype=np.int64)
    visited[_encode(frontier, p)] = True
    found = [frontier]
    count = 1
    while len(frontier):
        nxt = []
        for e, f, x, y in gens:
            a, b, c, d = frontier.T
            prod = np.stack([(a * e + b * x) % p, (a * f + b * y) % p,
                             (c * e + d * x) % p, (c * f + d * y) % p], axis=1)
            nxt.append(prod)
        cand = np.concatenate(nxt)
        codes = _encode(cand, p)
        codes, first = np.unique(codes, return_index=True)
        fresh = ~visited[codes]
        visited[codes[fresh]] = True
        frontier = cand[first[fresh]]
        found.append(frontier)
        count += len(frontier)
        if max_order is not None and count > max_order:
            raise MemoryError(f"closure exceeded {max_order} elements")
    return np.sort(_encode(np.concatenate(found), p))


def _encode(m: np.ndarray, p: int) -> np.ndarray:
    return ((m[:, 0] * p + m[:, 1]) * p + m[:, 2]) * p + m[:, 3]


def _decode(codes: np.ndarray, p: int) -> list[Mat2]:
    d = codes % p
    c = codes // p % p
    b = codes // (p * p) % p
    a = codes // (p**3)
    return list(zip(a.tolist(), b.tolist(), c.tolist(), d.tolist()))


def closure_elements(ctx: PrimeContext, generators, max_order: int | None = None) -> frozenset:
    return frozenset(_decode(_closure_codes(ctx, generators, max_order), ctx.p))


def generated_order(ctx: PrimeContext, generators) -> int:
    """Order of the subgroup generated by ``generators`` (no element tuples built)."""
    return len(_closure_codes(ctx, generators))


def closure(ctx: PrimeContext, generators, name: str = "Custom") -> SubgroupSet:
    gens = list(generators) or [IDENTITY]
    elements = closure_elements(ctx, gens)
    return SubgroupSet(ctx, "Custom", gens, elements=elements, name=name, audit=False)


def conjugate(p: int, g: Mat2, h: Mat2) -> Mat2:
    """g h g^-1."""
    return mat_mul(p, mat_mul(p, g, h), mat_inv(p, g))


def random_invertible(p: int, rng: random.Random) -> Mat2:
    while True:
        g = tuple(rng.randrange(p) for _ in range(4))
        if det(p, g):
            return g  # type: ignore[return-value]


def conjugated_unipotent_generates(ctx: PrimeContext, conjugators: Iterable[Mat2]) -> list[bool]:
    """For each g, whether <H(p), g U(p) g^-1> is all of GL_2(F_p)."""
    p = ctx.p
    h = build_subgroup(ctx, "Hintersect")
    u = build_subgroup(ctx, "Unipotent")
    full = gl2_order(p)
    out = []
    for g in conjugators:
        gens = list(h.generators) + [conjugate(p, g, x) for x in u.generators]
        out.append(generated_order(ctx, gens) == full)
    return out


# -- structural checks -----------------------------------------------------------

def index(sub: SubgroupSet, sup: SubgroupSet) -> int:
    for g in sub:
        if not sup.contains(g):
            raise ValueError(f"{sub.name} is not contained in {sup.name}: witness {g}")
    n, r = divmod(sup.order, sub.order)
    if r:
        raise AssertionError("Lagrange violated; element sets are inconsistent")
    return n


def check_lemma_lem1(ctx: PrimeContext) -> bool:
    """Every element of H(p) lies in G(p); only meaningful for p = 2 mod 3."""
    if ctx.p % 3 != 2:
        raise ValueError(f"needs p = 2 mod 3, got p={ctx.p}")
    g = build_subgroup(ctx, "G")
    return all(g.contains(h) for h in build_subgroup(ctx, "Hintersect"))


@dataclass(frozen=True)
class PglProfile:
    image_size: int
    orders: dict  # PGL order -> number of image classes with that order


def pgl_order_profile(sub: SubgroupSet, elements: Iterable[Mat2] | None = None) -> PglProfile:
    """Orders of the images in PGL_2(F_p).

    ``image_size`` always refers to the whole of ``sub``; ``orders`` is taken
    over the classes of ``elements`` when given (e.g. a coset), else over sub.
    """
    p = sub.p
    image = {pgl_class(p, g) for g in sub}
    classes = image if elements is None else {pgl_class(p, g) for g in elements}
    orders = Counter(pgl_order(p, g) for g in classes)
    return PglProfile(len(image), dict(sorted(orders.items())))


def squares_are_scalar(ctx: PrimeContext, part: str = "coset") -> bool:
    """Whether g^2 is scalar for every g in N_ns - C_ns (``part='coset'``).

    ``part='cartan'`` runs the same test on the non-scalar elements of C_ns,
    where it must fail.
    """
    p = ctx.p
    nns = build_subgroup(ctx, "Nns")
    if part == "coset":
        pool = [g for g in nns if _in_cns_coset(ctx, g)]
    elif part == "cartan":
        pool = [g for g in nns if _in_cns(ctx, g) and not is_scalar(g)]
    else:
        raise ValueError(f"unknown part {part!r}")
    return all(is_scalar(mat_mul(p, g, g)) for g in pool)


def coset_elements(ctx: PrimeContext) -> list[Mat2]:
    """N_ns(p) - C_ns(p)."""
    return [g for g in build_subgroup(ctx, "Nns") if _in_cns_coset(ctx, g)]


@dataclass(frozen=True)
class QuotientGroup:
    order: int
    table: tuple  # table[i][j] = label of coset_i * coset_j
    abelian: bool


def quotient_group(big: SubgroupSet, normal: SubgroupSet) -> QuotientGroup:
    """Left cosets of ``normal`` in ``big`` with the induced multiplication.

    Raises if ``normal`` is not normal in ``big``.
    """
    p = big.p
    nel = normal.elements
    for g in nel:
        if not big.contains(g):
            raise ValueError(f"{normal.name} is not contained in {big.name}")
    label: dict[Mat2, int] = {}
    reps: list[Mat2] = []
    for g in sorted(big.elements):
        if g in label:
            continue
        k = len(reps)
        reps.append(g)
        for h in nel:
            label[mat_mul(p, g, h)] = k
    for r in reps:
        ri = mat_inv(p, r)
        for h in normal.generators:
            if mat_mul(p, mat_mul(p, r, h), ri) not in nel:
                raise ValueError(f"{normal.name} is not normal in {big.name}")
    table = tuple(tuple(label[mat_mul(p, a, b)] for b in reps) for a in reps)
    n = len(reps)
    abelian = all(table[i][j] == table[j][i] for i in range(n) for j in range(n))
    return QuotientGroup(n, table, abelian)


def quotient_is_dihedral3(ctx: PrimeContext, normal: SubgroupSet | None = None) -> bool:
    """Whether N_ns(p)/H is nonabelian of order 6, H the cubes of C_ns by default."""
    if normal is None:
        if ctx.p % 3 != 2:
            raise ValueError(f"needs p = 2 mod 3, got p={ctx.p}")
        normal = cns_cubes(ctx)
    q = quotient_group(build_subgroup(ctx, "Nns"), normal)
    return q.order == 6 and not q.abelian


def det_image(sub: SubgroupSet) -> frozenset:
    """{det g : g in sub}, computed as the subgroup of F_p^x generated by the
    determinants of the generators."""
    p = sub.p
    seen = {1}
    frontier = [1]
    dets = {det(p, g) for g in sub.generators}
    while frontier:
        nxt = []
        for x in frontier:
            for d in dets:
                y = x * d % p
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def det_section(sub: SubgroupSet) -> dict[int, Mat2]:
    """One element of ``sub`` for each attained determinant.

    Found by breadth-first search over words in the generators, so the result
    does not depend on materializing the group.
    """
    p = sub.p
    found = {1: IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for g in frontier:
            for s in sub.generators:
                h = mat_mul(p, g, s)
                dh = det(p, h)
                if dh not in found:
                    found[dh] = h
                    nxt.append(h)
        frontier = nxt
    return found
