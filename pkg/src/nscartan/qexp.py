"""Truncated series in x = q^(1/p) with cyclotomic or complex coefficients.

A :class:`QExp` stands for

    e(phase) * q^shift * sum_{k=0}^{K} c_k x^k,     x = q^(1/p),

where ``shift`` and ``phase`` are exact rationals, so leading exponents such
as B_2(a)/2 and phases of order p^2 never touch floating point. Coefficients
c_k with k > K are unknown, not zero.

Exact mode stores c_k in Z[zeta]/(...) as an integer vector of length p over
Z[x]/(x^p - 1) (row k of an object array); complex mode stores complex128.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from math import comb

import numpy as np

from .cyclotomic import CycloElem

MODES = ("exact", "complex")
EPS = np.finfo(float).eps


class QExp:
    def __init__(self, p: int, mode: str, coeffs: np.ndarray, K: int,
                 shift: Fraction = Fraction(0), phase: Fraction = Fraction(0)):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if K < 0:
            raise ValueError("truncation bound must be nonnegative")
        self.p = p
        self.mode = mode
        self.K = K
        self.coeffs = coeffs
        self.shift = Fraction(shift)
        self.phase = Fraction(phase) % 1
        # complex mode bookkeeping for the a-posteriori rounding budget
        self.error_budget = 0.0
        self.coeff_budget = None  # per-coefficient absolute budget, when known
        self.n_ops = 0
        self.max_abs = float(np.abs(coeffs).max()) if mode == "complex" and coeffs.size else 1.0

    @classmethod
    def one(cls, p: int, mode: str, K: int) -> "QExp":
        if mode == "exact":
            c = np.zeros((K + 1, p), dtype=object)
            c[:] = 0
            c[0, 0] = 1
        else:
            c = np.zeros(K + 1, dtype=complex)
            c[0] = 1
        return cls(p, mode, c, K)

    def copy(self) -> "QExp":
        out = QExp(self.p, self.mode, self.coeffs.copy(), self.K, self.shift, self.phase)
        out.n_ops, out.max_abs, out.error_budget = self.n_ops, self.max_abs, self.error_budget
        out.coeff_budget = None if self.coeff_budget is None else self.coeff_budget.copy()
        return out

    def _zeta(self, j: int) -> complex:
        return cmath.exp(2j * cmath.pi * (j % self.p) / self.p)

    # -- in-place fast paths -----------------------------------------------------

    def mul_binomial(self, j: int, e: int, power: int = 1) -> "QExp":
        """Multiply in place by (1 - zeta^j x^e)^power, e >= 0, power >= 1."""
        if e < 0 or power < 1:
            raise ValueError("need e >= 0 and power >= 1")
        old = self.coeffs
        new = old.copy()
        K = self.K
        for t in range(1, power + 1):
            s = e * t
            if s > K:
                break
            c = comb(power, t) * (-1) ** t
            if self.mode == "exact":
                new[s:] += c * np.roll(old[: K + 1 - s], j * t, axis=1)
            else:
                new[s:] += (c * self._zeta(j * t)) * old[: K + 1 - s]
        self.coeffs = new
        if self.mode == "complex":
            self.n_ops += power + 1
            self.max_abs = max(self.max_abs, float(np.abs(new).max()))
        return self

    def mul_monomial(self, shift: Fraction = Fraction(0), phase: Fraction = Fraction(0)) -> "QExp":
        """Multiply in place by e(phase) q^shift."""
        self.shift += Fraction(shift)
        self.phase = (self.phase + Fraction(phase)) % 1
        return self

    # -- general arithmetic ----------------------------------------------------------

    def _compatible(self, other: "QExp") -> None:
        if self.p != other.p or self.mode != other.mode:
            raise ValueError("series live over different rings")

    def __mul__(self, other: "QExp") -> "QExp":
        self._compatible(other)
        K = min(self.K, other.K)
        p = self.p
        a, b = self.coeffs[: K + 1], other.coeffs[: K + 1]
        if self.mode == "exact":
            out = np.zeros((K + 1, p), dtype=object)
            out[:] = 0
            for k in range(K + 1):
                row = a[k]
                if not any(row):
                    continue
                for i in np.flatnonzero([x != 0 for x in row]):
                    out[k:] += row[i] * np.roll(b[: K + 1 - k], int(i), axis=1)
        else:
            out = np.convolve(a, b)[: K + 1]
        res = QExp(p, self.mode, out, K, self.shift + other.shift, self.phase + other.phase)
        if self.mode == "complex":
            res.n_ops = self.n_ops + other.n_ops + K + 1
            res.error_budget = (self.rounding_budget() * other.max_abs
                                + other.rounding_budget() * self.max_abs) * (K + 1)
            res.max_abs = max(self.max_abs * other.max_abs, res.max_abs)
        return res

    def __pow__(self, n: int) -> "QExp":
        if n < 1:
            raise ValueError("only positive powers")
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    # -- inspection ----------------------------------------------------------------------

    def coefficient(self, k: int):
        """c_k (without the e(phase) factor): a CycloElem or a complex number."""
        if not 0 <= k <= self.K:
            raise IndexError(f"coefficient {k} is beyond the truncation bound {self.K}")
        if self.mode == "exact":
            return CycloElem.from_cyclic(self.p, list(self.coeffs[k]))
        return complex(self.coeffs[k])

    def _row_is_zero(self, k: int, tol: float = 0.0) -> bool:
        row = self.coeffs[k]
        if self.mode == "exact":
            return all(x == row[0] for x in row)
        return abs(row) <= tol

    def leading_index(self, tol: float = 0.0) -> int:
        for k in range(self.K + 1):
            if not self._row_is_zero(k, tol):
                return k
        raise ValueError("series vanishes up to its truncation bound")

    def leading_exponent(self, tol: float = 0.0) -> Fraction:
        """Exponent of q of the first nonzero term."""
        return self.shift + Fraction(self.leading_index(tol), self.p)

    def leading_coefficient(self, tol: float = 0.0):
        """First nonzero c_k (phase factor excluded)."""
        return self.coefficient(self.leading_index(tol))

    def embed(self) -> "QExp":
        """Complex image of an exact series (zeta -> e(1/p))."""
        if self.mode == "complex":
            return self.copy()
        powers = np.array([self._zeta(j) for j in range(self.p)])
        c = self.coeffs.astype(float) @ powers
        return QExp(self.p, "complex", c, self.K, self.shift, self.phase)

    def complex_coeffs(self) -> np.ndarray:
        """c_k as complex numbers, including the e(phase) factor."""
        return self.embed().coeffs * cmath.exp(2j * cmath.pi * float(self.phase))

    def evaluate(self, tau: complex) -> complex:
        """Value of the truncated series at tau (upper half plane)."""
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        x = cmath.exp(2j * cmath.pi * tau / self.p)
        poly = self.embed().coeffs
        val = np.polyval(poly[::-1], x)
        return val * cmath.exp(2j * cmath.pi * (float(self.phase) + float(self.shift) * tau))

    def rounding_budget(self) -> float:
        """Crude bound on accumulated rounding error in complex mode."""
        if self.mode == "exact":
            return 0.0
        return float(self.coefficient_budget().max())

    def coefficient_budget(self) -> np.ndarray:
        """Absolute rounding budget for each c_k (complex mode)."""
        if self.mode == "exact":
            return np.zeros(self.K + 1)
        if self.coeff_budget is not None:
            return self.coeff_budget
        return np.full(self.K + 1, self.error_budget + 4 * EPS * self.n_ops * self.max_abs)


def exp_series(log: np.ndarray) -> np.ndarray:
    """exp of a power series with zero constant term: k E_k = sum_j j L_j E_(k-j)."""
    K = len(log) - 1
    E = np.zeros(K + 1, dtype=complex)
    E[0] = 1
    jl = np.arange(K + 1) * log
    for k in range(1, K + 1):
        E[k] = np.dot(jl[1: k + 1], E[k - 1:: -1]) / k
    return E


class LogProduct:
    """Complex-mode product of binomials (1 - zeta^j x^e)^m, accumulated as a logarithm.

    log(1 - c x^e) = -sum_r c^r x^(e r) / r has coefficients of modulus <= 1, so
    the sum over many factors stays small where the direct product would pass
    through huge intermediate coefficients and cancel catastrophically.
    """

    def __init__(self, p: int, K: int):
        self.p, self.K = p, K
        self.log = np.zeros(K + 1, dtype=complex)
        self.const = complex(1)
        self.weight = 0.0   # sum over all added terms of their modulus bound
        self.n_const = 0
        self.shift = Fraction(0)
        self.phase = Fraction(0)

    def add_binomial(self, j: int, e: int, m: int = 1) -> None:
        zeta = cmath.exp(2j * cmath.pi * (j % self.p) / self.p)
        if e == 0:
            self.const *= (1 - zeta) ** m
            self.n_const += m
            return
        r = np.arange(1, self.K // e + 1)
        self.log[e * r] -= m * np.exp(2j * np.pi * ((j * r) % self.p) / self.p) / r
        self.weight += m * len(r)

    def add_monomial(self, shift: Fraction, phase: Fraction) -> None:
        self.shift += shift
        self.phase = (self.phase + phase) % 1

    def to_qexp(self) -> QExp:
        K = self.K
        E = exp_series(self.log) * self.const
        # M = exp(|L|) coefficientwise majorizes exp(L) and its perturbations:
        # to first order |dE_k| <= sum_{i<=k} M_i * sum_j |dL_j|, and the
        # rounding error of each log coefficient is at most eps times the total
        # modulus that went into it.
        M = exp_series(np.abs(self.log).astype(complex)).real
        rel = 4 * EPS * (self.weight + K * K + self.n_const)
        out = QExp(self.p, "complex", E, K, self.shift, self.phase)
        out.coeff_budget = rel * np.cumsum(M) * abs(self.const)
        return out
