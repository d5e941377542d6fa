"""Siegel units g_a, the cube-orbit unit U and its expansion at infinity.

With a = (a1, a2) = (at/p, bt/p), at, bt in [0, p),

    g_a = q^(B_2(a1)/2) e(a2 (a1 - 1)) prod_{n>=0} (1 - q^(n+a1) e(a2)) (1 - q^(n+1-a1) e(-a2)).

In x = q^(1/p) the first family has exponents n p + at with coefficient
zeta^bt, the second (n+1) p - at with zeta^-bt, zeta = e(1/p).
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cusp_comb import o_cubes
from .cyclotomic import CycloElem
from .fp_arith import PrimeContext, is_cube
from .gl2_groups import Mat2, det
from .qexp import LogProduct, QExp

# Exact-mode products are only attempted up to this prime.
EXACT_PRIME_LIMIT = 23
COMPLEX_PRIME_LIMIT = 47


def bernoulli2(x) -> Fraction:
    x = Fraction(x)
    return x * x - x + Fraction(1, 6)


def default_K(p: int) -> int:
    """Truncation in x = q^(1/p): up to q^6."""
    return 6 * p


@dataclass(frozen=True)
class OrbitLift:
    p: int
    pairs: tuple   # lifts (at, bt) in [0, p)^2
    m: int

    def __post_init__(self):
        for at, bt in self.pairs:
            if not (0 <= at < self.p and 0 <= bt < self.p) or (at, bt) == (0, 0):
                raise ValueError(f"bad lift {(at, bt)} for p={self.p}")
        if self.m < 1:
            raise ValueError("m must be a positive integer")


def orbit_lift(p: int, pairs, m: int) -> OrbitLift:
    return OrbitLift(p, tuple(sorted((a % p, b % p) for a, b in pairs)), m)


def cube_orbit(ctx: PrimeContext, m: int = 3) -> OrbitLift:
    require_cube_orbit(ctx)
    return orbit_lift(ctx.p, o_cubes(ctx), m)


def require_cube_orbit(ctx: PrimeContext) -> None:
    if ctx.p <= 3 or ctx.p % 3 != 2:
        raise ValueError(f"the cube orbit needs p = 2 mod 3 and p > 3 (so that it is one of "
                         f"two Galois orbits of cusps of X_G(p)); got p={ctx.p}")


def all_pairs(p: int, m: int = 3) -> OrbitLift:
    """Every nonzero pair of F_p^2."""
    return orbit_lift(p, [(a, b) for a in range(p) for b in range(p) if a or b], m)


def mp_pairs(p: int, m: int = 3) -> OrbitLift:
    """One lift per point of M_p (first nonzero coordinate in 1..(p-1)/2)."""
    from .cusp_comb import mp_points
    return orbit_lift(p, mp_points(p), m)


# -- series ---------------------------------------------------------------------------

def _g_factors(p: int, at: int, bt: int, K: int):
    """(zeta exponent, x exponent) of the binomial factors of g up to x^K."""
    out = []
    k = at
    while k <= K:
        out.append((bt, k))
        k += p
    k = p - at
    while k <= K:
        out.append((-bt, k))
        k += p
    return out


def _g_monomial(p: int, at: int, bt: int, m: int) -> tuple[Fraction, Fraction]:
    shift = m * bernoulli2(Fraction(at, p)) / 2
    phase = m * Fraction(bt * (at - p), p * p)
    return shift, phase


def multiply_g(series: QExp, at: int, bt: int, m: int = 1) -> QExp:
    """Multiply ``series`` in place by g_(at/p, bt/p)^m."""
    p = series.p
    for j, e in _g_factors(p, at, bt, series.K):
        series.mul_binomial(j, e, m)
    series.mul_monomial(*_g_monomial(p, at, bt, m))
    return series


def siegel_g(ctx: PrimeContext, a1, a2, K: int | None = None, mode: str = "exact") -> QExp:
    p = ctx.p
    a1, a2 = Fraction(a1), Fraction(a2)
    for a in (a1, a2):
        if not (0 <= a < 1) or (a * p).denominator != 1:
            raise ValueError(f"{a} is not of the form k/p with 0 <= k < p")
    if a1 == 0 and a2 == 0:
        raise ValueError("(a1, a2) = (0, 0) is excluded")
    K = default_K(p) if K is None else K
    if K <= 0:
        raise ValueError("K must be positive")
    return multiply_g(QExp.one(p, mode, K), int(a1 * p), int(a2 * p))


def product_series(O: OrbitLift, K: int, mode: str, omit=None) -> QExp:
    """prod over O of g^m, in lift order (at outer, bt inner).

    Exact mode multiplies binomials directly; complex mode sums logarithms and
    exponentiates once (see LogProduct).
    """
    pairs = [pair for pair in O.pairs if pair != omit]
    if mode == "exact":
        series = QExp.one(O.p, mode, K)
        for at, bt in pairs:
            multiply_g(series, at, bt, O.m)
        return series
    acc = LogProduct(O.p, K)
    for at, bt in pairs:
        for j, e in _g_factors(O.p, at, bt, K):
            acc.add_binomial(j, e, O.m)
        acc.add_monomial(*_g_monomial(O.p, at, bt, O.m))
    return acc.to_qexp()


# -- Kubert-Lang conditions ---------------------------------------------------------

@dataclass(frozen=True)
class KLResult:
    ok: bool
    sum_a2: int
    sum_b2: int
    sum_ab: int
    divisible: bool
    failures: tuple

    def __bool__(self):
        return self.ok


def kubert_lang_valid(O: OrbitLift, m: int | None = None) -> KLResult:
    p = O.p
    m = O.m if m is None else m
    sa = m * sum(a * a for a, _ in O.pairs) % p
    sb = m * sum(b * b for _, b in O.pairs) % p
    sab = m * sum(a * b for a, b in O.pairs) % p
    div = (m * len(O.pairs)) % 6 == 0
    failures = []
    if sa:
        failures.append(f"m*sum a^2 = {sa} mod {p}")
    if sb:
        failures.append(f"m*sum b^2 = {sb} mod {p}")
    if sab:
        failures.append(f"m*sum ab = {sab} mod {p}")
    if not div:
        failures.append(f"6 does not divide m*|O| = {m * len(O.pairs)}")
    return KLResult(not failures, sa, sb, sab, div, tuple(failures))


# -- the unit U ---------------------------------------------------------------------------

def order_sum(O: OrbitLift) -> Fraction:
    """m * sum_O B_2(at/p)/2 by rational arithmetic."""
    return O.m * sum((bernoulli2(Fraction(at, O.p)) for at, _ in O.pairs), Fraction(0)) / 2


def paper_order(p: int) -> Fraction:
    return Fraction(p * p - 1, 4 * p)


def paper_twisted_order(p: int) -> Fraction:
    return -Fraction(p * p - 1, 8 * p)


def paper_rho_abs(p: int) -> int:
    return (p - 1) ** 3


@dataclass
class UnitSeries:
    series: QExp            # normalized: leading coefficient positive real
    leading_exponent: Fraction
    raw_phase: Fraction     # e(raw_phase) * leading_raw is the unnormalized leading coefficient
    leading_raw: object     # CycloElem (exact) or complex
    leading_abs: float


def build_unit(ctx: PrimeContext, O: OrbitLift, K: int | None = None,
               mode: str = "exact") -> UnitSeries:
    p = ctx.p
    if O.p != p:
        raise ValueError("orbit and context disagree on p")
    kl = kubert_lang_valid(O)
    if not kl:
        raise ValueError("orbit fails the Kubert-Lang conditions: " + "; ".join(kl.failures))
    K = default_K(p) if K is None else K
    series = product_series(O, K, mode)
    k0 = series.leading_index()
    lead = series.coefficient(k0)
    raw_phase = series.phase
    if mode == "exact":
        leading_abs = abs(lead.to_complex())
        # drop the phase; a rational leading coefficient is also made positive.
        # A non-rational one keeps its argument (exact mode cannot rotate it).
        series.phase = Fraction(0)
        if lead.is_rational() and lead.to_rational() < 0:
            series.coeffs = -series.coeffs
    else:
        leading_abs = abs(lead)
        arg = cmath.phase(lead) / (2 * math.pi)
        series.phase = Fraction(0)
        series.coeffs = series.coeffs * cmath.exp(-2j * math.pi * arg)
    return UnitSeries(series, series.shift + Fraction(k0, p), raw_phase, lead, leading_abs)


@dataclass(frozen=True)
class RhoReport:
    paper_formula: complex    # product of the displayed rho factors
    paper_formula_abs: float
    paper_closed_form: int    # (p-1)^3
    oracle_abs: float         # |product of leading factors of each g|, from the product formula
    oracle_exact: Fraction | None  # same, as an exact rational when it is one


def _paper_rho(a1: Fraction, a2: Fraction) -> complex:
    if a1 != 0:
        return -cmath.exp(2j * math.pi * float((a1 - 1) * a2 / 2))
    return -2j * math.sin(math.pi * float(a2) / 2)


def rho_product(ctx: PrimeContext, O: OrbitLift) -> RhoReport:
    p, m = ctx.p, O.m
    paper = complex(1)
    oracle = 1.0
    exact = CycloElem.rational(p, 1)
    for at, bt in O.pairs:
        a1, a2 = Fraction(at, p), Fraction(bt, p)
        paper *= _paper_rho(a1, a2) ** m
        if at == 0:
            # the n = 0 factor (1 - e(a2)) has no q-dependence
            oracle *= abs(1 - cmath.exp(2j * math.pi * bt / p)) ** m
            f = CycloElem.rational(p, 1) - CycloElem.zeta(p, bt)
            for _ in range(m):
                exact = exact * f
    exact_val = exact.to_rational() if exact.is_rational() else None
    return RhoReport(paper, abs(paper), paper_rho_abs(p), oracle,
                     abs(exact_val) if exact_val is not None else None)


# -- full product identity ----------------------------------------------------------------

@dataclass(frozen=True)
class ProductVerdict:
    status: str           # pass | fail | inconclusive
    magnitude: float
    sign: int | None
    max_deviation: float  # largest |c_k| (k >= 1) relative to |c_0|
    budget: float         # rounding budget relative to |c_0| (complex mode)
    reason: str = ""


def full_product_identity(ctx: PrimeContext, K: int | None = None, mode: str = "exact",
                          tol: float = 1e-6, omit=None, index_set: str = "all") -> ProductVerdict:
    """Check that prod g^3 over all nonzero pairs of F_p^2 is the constant p^3."""
    p = ctx.p
    limit = EXACT_PRIME_LIMIT if mode == "exact" else COMPLEX_PRIME_LIMIT
    if p > limit:
        raise ValueError(f"{mode} product identity is limited to p <= {limit}")
    K = default_K(p) if K is None else K
    if index_set == "all":
        O = all_pairs(p)
    elif index_set == "mp":
        O = mp_pairs(p)
    else:
        raise ValueError(f"unknown index set {index_set!r}")
    target = p**3
    if K < p:
        return ProductVerdict("inconclusive", float("nan"), None, float("nan"), float("nan"),
                              f"K={K} < p: no full power of q is covered")
    series = product_series(O, K, mode, omit=omit)
    phase = cmath.exp(2j * math.pi * float(series.phase))
    if mode == "exact":
        c0 = series.coefficient(0)
        tail_zero = all(series._row_is_zero(k) for k in range(1, K + 1))
        c0c = c0.to_complex() * phase
        mag = abs(c0c)
        dev = max((abs(series.coefficient(k).to_complex()) for k in range(1, K + 1)),
                  default=0.0) / max(mag, 1e-300)
        sign = None
        if c0.is_rational() and series.phase in (0, Fraction(1, 2)):
            r = c0.to_rational()
            sign = (1 if r > 0 else -1) * (1 if series.phase == 0 else -1)
            exact_ok = abs(r) == target
        else:
            exact_ok = False
        ok = series.shift == 0 and tail_zero and exact_ok
        return ProductVerdict("pass" if ok else "fail", mag, sign, dev, 0.0,
                              "" if ok else _why(series.shift, tail_zero, exact_ok))
    c = series.coeffs
    bud = series.coefficient_budget()
    mag = abs(c[0])
    scale = max(mag, 1e-300)
    dev = float(np.abs(c[1:]).max() / scale) if K else 0.0
    budget = float(bud.max()) / scale
    val = c[0] * phase
    sign = (1 if val.real > 0 else -1) if abs(val.imag) <= tol * scale else None
    # a discrepancy larger than tolerance plus budget is certain
    nonconstant = bool(np.any(np.abs(c[1:]) > tol * scale + bud[1:]))
    wrong_value = abs(mag - target) > tol * target + bud[0]
    if series.shift != 0 or nonconstant or wrong_value or sign is None and bud[0] <= tol * scale:
        return ProductVerdict("fail", mag, sign, dev, budget,
                              _why(series.shift, not nonconstant, not wrong_value))
    if budget > tol:
        return ProductVerdict("inconclusive", mag, sign, dev, budget,
                              f"rounding budget {budget:.2e} exceeds tolerance {tol:.0e}")
    ok = dev <= tol and abs(mag - target) <= tol * target and sign is not None
    return ProductVerdict("pass" if ok else "fail", mag, sign, dev, budget,
                          "" if ok else _why(series.shift, dev <= tol, abs(mag - target) <= tol * target))


def _why(shift, tail_ok, value_ok) -> str:
    parts = []
    if shift != 0:
        parts.append(f"q-shift {shift} != 0")
    if not tail_ok:
        parts.append("nonconstant")
    if not value_ok:
        parts.append("constant term is not +-p^3")
    return "; ".join(parts)


# -- remainder bounds and the log decomposition ---------------------------------------------

def remainder_bound(ctx: PrimeContext, absq: float, twisted: bool = False) -> float:
    if not 0 < absq < 1:
        raise ValueError("|q| must lie in (0, 1)")
    p = ctx.p
    L = abs(math.log(absq))
    if twisted:
        return math.pi**2 * p * (p + 1) / (3 * L)
    return 2 * (p * p - 1) * absq / (1 - absq) + math.pi**2 * p * (p - 2) / (3 * L)


def log_abs_g(p: int, at: int, bt: int, tau: complex, tol: float = 1e-17) -> float:
    """log|g_(at/p, bt/p)(tau)| straight from the infinite product."""
    y = tau.imag
    if y <= 0:
        raise ValueError("tau must lie in the upper half plane")
    a1, a2 = at / p, bt / p
    absq = math.exp(-2 * math.pi * y)
    # terms with |q|^n below tol contribute less than ~tol each
    N = int(math.ceil(math.log(tol) / math.log(absq))) + 2
    n = np.arange(N)
    za = cmath.exp(2j * math.pi * a2)
    t1 = np.exp(2j * math.pi * tau * (n + a1)) * za
    t2 = np.exp(2j * math.pi * tau * (n + 1 - a1)) / za
    total = float(np.sum(np.log(np.abs(1 - t1))) + np.sum(np.log(np.abs(1 - t2))))
    return total + float(bernoulli2(Fraction(at, p))) / 2 * (-2 * math.pi * y)


def log_abs_product(O: OrbitLift, tau: complex) -> float:
    return O.m * math.fsum(log_abs_g(O.p, at, bt, tau) for at, bt in O.pairs)


@dataclass(frozen=True)
class LogDecomposition:
    tau: complex
    log_abs_u: float
    order: Fraction
    log_rho: float
    residual: float
    bound: float
    twisted: bool

    @property
    def ok(self) -> bool:
        return abs(self.residual) <= self.bound


def eval_log_decomposition(ctx: PrimeContext, tau: complex, twisted: bool = False,
                           gamma: Mat2 | None = None) -> LogDecomposition:
    """log|U(tau)| = Ord log|q| + log|rho| + log|R(tau)|, with oracle Ord and rho.

    With ``twisted`` the function is U(gamma tau), evaluated as the product of
    |g_{(a,b) gamma}(tau)|^3.
    """
    p = ctx.p
    O = cube_orbit(ctx)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    absq = math.exp(-2 * math.pi * tau.imag)
    if twisted:
        gamma = twisted_gamma(ctx) if gamma is None else gamma
        O = twisted_lift(ctx, O, gamma)
        log_rho = 0.0
    else:
        log_rho = 3 * math.log(p)
    order = order_sum(O)
    value = log_abs_product(O, tau)
    residual = value - float(order) * math.log(absq) - log_rho
    return LogDecomposition(tau, value, order, log_rho, residual,
                            remainder_bound(ctx, absq, twisted), twisted)


def sample_taus(n: int, seed: int = 0, ymin: float = 0.8, ymax: float = 5.0) -> list[complex]:
    rng = random.Random(seed)
    return [complex(round(rng.uniform(-0.5, 0.5), 6), round(rng.uniform(ymin, ymax), 6))
            for _ in range(n)]


# -- the twisted expansion ----------------------------------------------------------------

def twisted_gamma(ctx: PrimeContext) -> Mat2:
    """The first (x, eps y; y, x) of determinant 1 with x + y sqrt(eps) not a cube."""
    p, e = ctx.p, ctx.epsilon
    require_cube_orbit(ctx)
    for x in range(p):
        for y in range(1, p):
            if (x * x - e * y * y) % p == 1 and not is_cube(ctx, (x, y)):
                return (x, e * y % p, y, x)
    raise AssertionError("no determinant-one non-cube in C_ns(p)")


def _check_twist(ctx: PrimeContext, gamma: Mat2) -> None:
    p = ctx.p
    x, b, y, d = (v % p for v in gamma)
    if d != x or b != ctx.epsilon * y % p or (x == 0 and y == 0):
        raise ValueError(f"{gamma} does not reduce into C_ns(p)")
    if is_cube(ctx, (x, y)):
        raise ValueError(f"{gamma} reduces to a cube of C_ns(p)")


def row_action(p: int, v, gamma: Mat2) -> tuple[int, int]:
    """(a, b) . gamma for a row vector."""
    a, b = v
    return ((a * gamma[0] + b * gamma[2]) % p, (a * gamma[1] + b * gamma[3]) % p)


def column_action(p: int, gamma: Mat2, v) -> tuple[int, int]:
    """gamma (a, b)^T; on C_ns(p) this is multiplication in F_{p^2}."""
    a, b = v
    return ((gamma[0] * a + gamma[1] * b) % p, (gamma[2] * a + gamma[3] * b) % p)


def twisted_lift(ctx: PrimeContext, O: OrbitLift, gamma: Mat2) -> OrbitLift:
    """Indices of U o gamma: the pairs gamma (a, b)^T.

    The column action is the one under which G(p) stabilizes O_cubes. In terms
    of the row-vector transformation law g_a o s = g_{a s} (up to a root of
    unity) this is the row action of gamma^T, i.e. s is a lift of gamma^T.
    """
    _check_twist(ctx, gamma)
    return orbit_lift(ctx.p, [column_action(ctx.p, gamma, v) for v in O.pairs], O.m)


@dataclass(frozen=True)
class TwistedOrder:
    computed: Fraction
    paper: Fraction
    fiber: dict   # first coordinate of gamma (a,b)^T -> count over O_cubes


def twisted_order(ctx: PrimeContext, gamma: Mat2 | None = None) -> TwistedOrder:
    gamma = twisted_gamma(ctx) if gamma is None else gamma
    O = twisted_lift(ctx, cube_orbit(ctx), gamma)
    fiber = {a: 0 for a in range(ctx.p)}
    for a, _ in O.pairs:
        fiber[a] += 1
    return TwistedOrder(order_sum(O), paper_twisted_order(ctx.p), fiber)


def sl2z_lift(p: int, gamma: Mat2) -> tuple[int, int, int, int]:
    """An integer matrix of determinant 1 reducing to gamma mod p."""
    a0, b0, c0, d0 = (v % p for v in gamma)
    if det(p, gamma) != 1:
        raise ValueError("gamma must have determinant 1 mod p")
    c = c0 if c0 else p
    d = d0
    while math.gcd(c, d) != 1:
        d += p
    g, x, y = _egcd(d, -c)  # x d - y c = 1 up to sign
    if g < 0:
        x, y = -x, -y
    a1, b1 = x, y
    if c0:
        t = (a0 - a1) * pow(c, -1, p) % p
    else:
        t = (b0 - b1) * pow(d, -1, p) % p
    a, b = a1 + t * c, b1 + t * d
    assert a * d - b * c == 1 and (a - a0) % p == 0 and (b - b0) % p == 0
    return a, b, c, d


def _egcd(a: int, b: int):
    if b == 0:
        return a, 1, 0
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def mobius(g, tau: complex) -> complex:
    a, b, c, d = g
    return (a * tau + b) / (c * tau + d)


# -- report ------------------------------------------------------------------------------------

def unit_report(ctx: PrimeContext, mode: str = "exact", K: int | None = None,
                n_samples: int = 20, seed: int = 0) -> dict:
    p = ctx.p
    O = cube_orbit(ctx)
    K = default_K(p) if K is None else K
    unit = build_unit(ctx, O, K, mode)
    rho = rho_product(ctx, O)
    tw = twisted_order(ctx)
    ident = full_product_identity(ctx, K, mode)
    kl = kubert_lang_valid(O)
    samples = []
    for tau in sample_taus(n_samples, seed):
        dec = eval_log_decomposition(ctx, tau)
        samples.append({"tau": [tau.real, tau.imag], "residual": dec.residual,
                        "bound": dec.bound, "ok": dec.ok})
    ord_oracle = order_sum(O)
    return {
        "p": p,
        "orbit": "cubes",
        "m": O.m,
        "mode": mode,
        "K": K,
        "orbit_size": len(O.pairs),
        "kubert_lang": {"ok": kl.ok, "failures": list(kl.failures)},
        "ord_paper": str(paper_order(p)),
        "ord_computed": str(ord_oracle),
        "ord_series": str(unit.leading_exponent),
        "ord_consistent": unit.leading_exponent == ord_oracle,
        "rho_abs_paper": rho.paper_closed_form,
        "rho_abs_paper_formula": rho.paper_formula_abs,
        "rho_abs_computed": rho.oracle_abs,
        "rho_abs_series": unit.leading_abs,
        "twisted_ord_paper": str(tw.paper),
        "twisted_ord_computed": str(tw.computed),
        "product_identity": {"status": ident.status, "magnitude": ident.magnitude,
                             "sign": ident.sign, "reason": ident.reason},
        "samples": samples,
    }
