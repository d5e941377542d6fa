"""Exact elements of the p-th cyclotomic field Q(zeta_p).

Canonical form: rational coordinates on the basis 1, zeta, ..., zeta^(p-2),
after eliminating zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2)).
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Sequence


class CycloElem:
    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Sequence):
        if len(coeffs) != p - 1:
            raise ValueError(f"need {p - 1} coordinates, got {len(coeffs)}")
        self.p = p
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    @classmethod
    def from_cyclic(cls, p: int, vec: Sequence) -> "CycloElem":
        """Image of sum vec[i] x^i from Q[x]/(x^p - 1)."""
        if len(vec) != p:
            raise ValueError(f"need {p} entries, got {len(vec)}")
        last = Fraction(vec[p - 1])
        return cls(p, [Fraction(v) - last for v in vec[: p - 1]])

    @classmethod
    def rational(cls, p: int, r) -> "CycloElem":
        return cls(p, [r] + [0] * (p - 2))

    @classmethod
    def zeta(cls, p: int, k: int = 1) -> "CycloElem":
        vec = [0] * p
        vec[k % p] = 1
        return cls.from_cyclic(p, vec)

    def cyclic(self) -> list[Fraction]:
        return list(self.coeffs) + [Fraction(0)]

    def _check(self, other) -> "CycloElem":
        if isinstance(other, (int, Fraction)):
            return CycloElem.rational(self.p, other)
        if not isinstance(other, CycloElem) or other.p != self.p:
            raise TypeError("operands live in different cyclotomic fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        return CycloElem(self.p, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.p, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        p = self.p
        out = [Fraction(0)] * p
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[(i + j) % p] += a * b
        return CycloElem.from_cyclic(p, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = self._check(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"CycloElem(p={self.p}: {' + '.join(terms) or '0'})"

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coeffs[0]

    def galois(self, t: int) -> "CycloElem":
        """The automorphism zeta -> zeta^t."""
        p = self.p
        if t % p == 0:
            raise ValueError("t must be prime to p")
        out = [Fraction(0)] * p
        for i, c in enumerate(self.coeffs):
            out[i * t % p] += c
        return CycloElem.from_cyclic(p, out)

    def norm(self) -> Fraction:
        """Field norm to Q (product of all Galois conjugates)."""
        acc = CycloElem.rational(self.p, 1)
        for t in range(1, self.p):
            acc = acc * self.galois(t)
        return acc.to_rational()

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.p)
        return sum(float(c) * z**i for i, c in enumerate(self.coeffs))
