"""Arithmetic in F_p and in F_{p^2} = F_p(sqrt(eps)).

Elements of F_{p^2} are pairs ``(x, y)`` standing for ``x + y*sqrt(eps)`` where
``eps`` is the fixed primitive root carried by the :class:`PrimeContext`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

# Explicit element sets are only enumerated below this bound.
ENUMERATION_LIMIT = 2**15


class Fp2Elem(NamedTuple):
    x: int
    y: int


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def multiplicative_order(a: int, p: int) -> int:
    """Order of ``a`` in F_p^x by brute force."""
    a %= p
    if a == 0:
        raise ValueError("0 has no multiplicative order")
    k, x = 1, a
    while x != 1:
        x = x * a % p
        k += 1
    return k


def smallest_primitive_root(p: int) -> int:
    qs = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise ValueError(f"no primitive root found mod {p}")


@dataclass(frozen=True)
class PrimeContext:
    """An odd prime together with the chosen generator ``epsilon`` of F_p^x."""

    p: int
    epsilon: int

    def __post_init__(self):
        p = self.p
        if not isinstance(p, int) or p % 2 == 0 or not is_prime(p):
            raise ValueError(f"p must be an odd prime, got {p!r}")
        if p >= ENUMERATION_LIMIT:
            raise ValueError(f"p={p} exceeds the enumeration limit {ENUMERATION_LIMIT}")
        e = self.epsilon % p
        if e == 0 or any(pow(e, (p - 1) // q, p) == 1 for q in prime_factors(p - 1)):
            raise ValueError(f"epsilon={self.epsilon} is not a primitive root mod {p}")
        object.__setattr__(self, "epsilon", e)

    # -- F_p ---------------------------------------------------------------

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 is not invertible in F_p")
        return pow(a, self.p - 2, self.p)

    def units(self) -> range:
        return range(1, self.p)

    # -- F_{p^2} -----------------------------------------------------------

    def elem(self, x: int, y: int = 0) -> Fp2Elem:
        return Fp2Elem(x % self.p, y % self.p)

    def mul(self, z: Fp2Elem, w: Fp2Elem) -> Fp2Elem:
        p = self.p
        return Fp2Elem((z[0] * w[0] + self.epsilon * z[1] * w[1]) % p,
                       (z[0] * w[1] + z[1] * w[0]) % p)

    def pow(self, z: Fp2Elem, n: int) -> Fp2Elem:
        if n < 0:
            z, n = self.inv2(z), -n
        result = Fp2Elem(1, 0)
        while n:
            if n & 1:
                result = self.mul(result, z)
            z = self.mul(z, z)
            n >>= 1
        return result

    def norm(self, z: Fp2Elem) -> int:
        return (z[0] * z[0] - self.epsilon * z[1] * z[1]) % self.p

    def inv2(self, z: Fp2Elem) -> Fp2Elem:
        n = self.norm(z)
        if n == 0:
            raise ZeroDivisionError("0 is not invertible in F_p^2")
        ni = self.inv(n)
        return Fp2Elem(z[0] * ni % self.p, -z[1] * ni % self.p)

    def nonzero(self):
        p = self.p
        for x in range(p):
            for y in range(p):
                if x or y:
                    yield Fp2Elem(x, y)

    def order2(self, z: Fp2Elem) -> int:
        """Multiplicative order of a nonzero element of F_{p^2}."""
        if z == (0, 0):
            raise ValueError("0 has no multiplicative order")
        n = self.p * self.p - 1
        order = n
        for q in prime_factors(n):
            while order % q == 0 and self.pow(z, order // q) == (1, 0):
                order //= q
        return order

    def fp2_generator(self) -> Fp2Elem:
        """Smallest (lexicographic) generator of the cyclic group F_{p^2}^x."""
        return _fp2_generator(self)


@lru_cache(maxsize=None)
def _fp2_generator(ctx: PrimeContext) -> Fp2Elem:
    n = ctx.p * ctx.p - 1
    qs = prime_factors(n)
    for z in ctx.nonzero():
        if all(ctx.pow(z, n // q) != (1, 0) for q in qs):
            return z
    raise AssertionError("F_p^2 has no generator")  # unreachable


def make_context(p: int, epsilon: int | None = None) -> PrimeContext:
    """Context for ``p`` with ``epsilon`` the smallest primitive root unless given."""
    if not isinstance(p, int) or p < 3 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p!r}")
    if epsilon is None:
        epsilon = smallest_primitive_root(p)
    return PrimeContext(p, epsilon)


def is_cube(ctx: PrimeContext, z: Fp2Elem) -> bool:
    if ctx.p == 3:
        raise ValueError("cube test is not defined for p = 3")
    z = ctx.elem(*z)
    if z == (0, 0):
        raise ValueError("0 is not in F_{p^2}^x")
    return ctx.pow(z, (ctx.p * ctx.p - 1) // 3) == (1, 0)


def cube_class(ctx: PrimeContext, z: Fp2Elem) -> int:
    """Index in {0, 1, 2} of the coset of z modulo cubes in F_{p^2}^x.

    The class is read off from z^((p^2-1)/3), a cube root of unity, compared
    with the powers of g^((p^2-1)/3) for the fixed generator g.
    """
    n = (ctx.p * ctx.p - 1) // 3
    w = ctx.pow(ctx.fp2_generator(), n)
    t = ctx.pow(ctx.elem(*z), n)
    one = Fp2Elem(1, 0)
    for k, root in enumerate((one, w, ctx.mul(w, w))):
        if t == root:
            return k
    raise AssertionError("z^((p^2-1)/3) is not a cube root of unity")


def frobenius(ctx: PrimeContext, z: Fp2Elem) -> Fp2Elem:
    return Fp2Elem(z[0] % ctx.p, -z[1] % ctx.p)
