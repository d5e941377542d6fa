"""Numeric endgame: branch inequalities, the bound on log|j|, and the prime threshold.

Near the cusp at infinity (L = |log|q||, assumed >= sqrt(p)) the unit gives
inequalities of the form L <= A + B p / L, one per Galois orbit of cusps.
Their largest solutions bound L, a j-versus-q estimate turns that into a bound
on log|j|, and comparing with the lower bound from the isogeny estimate yields
a bound on p.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

PAPER_A = 1.2
PAPER_B_UNTWISTED = 13.0
PAPER_B_TWISTED = 27.0

# sup of |j(tau) - 1/q| over the fundamental domain (classical estimate)
C0 = 2079.0
FUNDAMENTAL_DOMAIN_Q = math.exp(-math.pi * math.sqrt(3))

PAPER_THRESHOLD = 1.4e7
ISOGENY_SWITCH = 12 * 985
P_MIN = 100
P_MAX = 1.4e7


def solve_branch(p: float, A: float, B: float) -> float:
    """Largest L with L <= A + B p / L, i.e. the positive root of L^2 - A L - B p."""
    if A < 0 or B <= 0 or p <= 0:
        raise ValueError(f"need A >= 0, B > 0, p > 0 (got A={A}, B={B}, p={p})")
    disc = math.sqrt(A * A + 4 * B * p)
    L = (A + disc) / 2
    if abs(L * L - A * L - B * p) > 1e-12 * L * L:
        raise ArithmeticError("quadratic root residual too large")
    return L


# -- branch constants -----------------------------------------------------------------

def oracle_order(p: int) -> Fraction:
    """Leading exponent of U at infinity, 3 sum_O B_2(a/p)/2 in closed form."""
    return Fraction(p * p - 1, 6 * p)


def oracle_twisted_order(p: int) -> Fraction:
    return -Fraction(p * p - 1, 12 * p)


def oracle_constants(p: float) -> list[tuple[float, float]]:
    """(A, B) for both branches from the computed orders and |rho_U| = p^3.

    Untwisted: Ord L <= 3 log p + 2(p^2-1) q0/(1-q0) + pi^2 p (p-2) / (3 L).
    Twisted:   |Ord_gamma| L <= 3 log p + 2(p^2-1) q0/(1-q0) + pi^2 p (p+1) / (3 L).
    Here q0 = exp(-sqrt p) bounds |q|. The twisted line keeps the geometric
    tail term although the displayed twisted remainder bound leaves it out.
    """
    ordu = (p * p - 1) / (6 * p)
    ordt = (p * p - 1) / (12 * p)
    q0 = math.exp(-math.sqrt(p))
    tail = 2 * (p * p - 1) * q0 / (1 - q0)
    A1 = (3 * math.log(p) + tail) / ordu
    B1 = math.pi**2 * (p - 2) / (3 * ordu)
    A2 = (3 * math.log(p) + tail) / ordt
    B2 = math.pi**2 * (p + 1) / (3 * ordt)
    return [(A1, B1), (A2, B2)]


def paper_constants(p: float | None = None) -> list[tuple[float, float]]:
    return [(PAPER_A, PAPER_B_UNTWISTED), (PAPER_A, PAPER_B_TWISTED)]


def branch_constants(p: float, source: str) -> list[tuple[float, float]]:
    if source == "paper":
        return paper_constants(p)
    if source == "oracle":
        return oracle_constants(p)
    raise ValueError(f"unknown constants source {source!r}")


# -- j versus q ---------------------------------------------------------------------------

def j_q_correction(absq: float, C: float = C0) -> float:
    """c with |log|j(tau)| - |log|q||| <= c, from ||j| - 1/|q|| <= C.

    Needs C |q| < 1 for the lower side; otherwise returns inf (only the upper
    side log(1 + C|q|) is then available, see :func:`j_upper_correction`).
    """
    if not 0 < absq <= FUNDAMENTAL_DOMAIN_Q:
        raise ValueError(f"|q|={absq} is outside the fundamental-domain regime |q| <= e^(-pi sqrt 3)")
    if C * absq >= 1:
        return math.inf
    return -math.log1p(-C * absq)


def j_upper_correction(absq: float, C: float = C0) -> float:
    """log|j| <= |log|q|| + log(1 + C|q|); |q| = 0 (underflow) gives 0."""
    if not 0 <= absq <= FUNDAMENTAL_DOMAIN_Q:
        raise ValueError(f"|q|={absq} is outside the fundamental-domain regime |q| <= e^(-pi sqrt 3)")
    return math.log1p(C * absq)


def j_coefficients(N: int = 30) -> list[int]:
    """c_{-1}, c_0, ..., c_N of j = sum c_n q^n, from E_4^3 / Delta in integers."""
    M = N + 2
    sigma3 = [0] * (M + 1)
    for d in range(1, M + 1):
        for n in range(d, M + 1, d):
            sigma3[n] += d**3
    e4 = [1] + [240 * sigma3[n] for n in range(1, M + 1)]
    e4_3 = _mul(_mul(e4, e4, M), e4, M)
    # Delta / q = prod (1 - q^n)^24
    eta24 = [1] + [0] * M
    for n in range(1, M + 1):
        for _ in range(24):
            for k in range(M, n - 1, -1):
                eta24[k] -= eta24[k - n]
    inv = [0] * (M + 1)
    inv[0] = 1
    for k in range(1, M + 1):
        inv[k] = -sum(eta24[i] * inv[k - i] for i in range(1, k + 1))
    coeffs = _mul(e4_3, inv, M)
    return coeffs[: N + 2]


def _mul(a, b, M):
    out = [0] * (M + 1)
    for i, x in enumerate(a[: M + 1]):
        if x:
            for j in range(M + 1 - i):
                out[i + j] += x * b[j]
    return out


_J_CACHE: dict[int, list[int]] = {}


def j_invariant(tau: complex, N: int = 30) -> complex:
    """j(tau) from its q-expansion truncated after q^N."""
    if N not in _J_CACHE:
        _J_CACHE[N] = j_coefficients(N)
    c = _J_CACHE[N]
    q = np.exp(2j * np.pi * tau)
    return complex(sum(cn * q ** (n - 1) for n, cn in enumerate(c)))


def j_from_eisenstein(tau: complex, terms: int = 60) -> complex:
    """j = 1728 E4^3 / (E4^3 - E6^2) with E4, E6 summed numerically."""
    q = np.exp(2j * np.pi * tau)
    n = np.arange(1, terms + 1)
    qn = q**n / (1 - q**n)
    e4 = 1 + 240 * np.sum(n**3 * qn)
    e6 = 1 - 504 * np.sum(n**5 * qn)
    return complex(1728 * e4**3 / (e4**3 - e6**2))


# -- the bound on log|j| ----------------------------------------------------------------

@dataclass
class RungeReport:
    p: float
    branches: list = field(default_factory=list)  # dicts {A, B, L}
    correction: float = 0.0
    j_log_bound: float = 0.0
    seven_sqrt_p: float = 0.0
    margin: float = 0.0
    headline_ok: bool = False
    constants_source: str = "paper"

    def to_dict(self) -> dict:
        return asdict(self)


def j_log_bound(p: float, source: str = "paper", C: float = C0) -> RungeReport:
    """Bound on log|j(P)| valid when p >= 100 and |log|q|| >= sqrt(p)."""
    if p < P_MIN:
        raise ValueError(f"p={p} < {P_MIN}: small primes are handled by external results, not here")
    branches = []
    for A, B in branch_constants(p, source):
        branches.append({"A": A, "B": B, "L": solve_branch(p, A, B)})
    corr = j_upper_correction(math.exp(-math.sqrt(p)), C)
    bound = max(b["L"] for b in branches) + corr
    seven = 7 * math.sqrt(p)
    return RungeReport(p, branches, corr, bound, seven, seven - bound, bound <= seven, source)


def scan_points(pmin: float = P_MIN, pmax: float = P_MAX, n: int = 1000) -> list[int]:
    """n log-spaced integers in [pmin, pmax] (duplicates removed, sorted)."""
    if pmin < P_MIN or pmax > P_MAX or pmin > pmax:
        raise ValueError(f"scan range must lie within [{P_MIN}, {P_MAX:.1e}] "
                         "(smaller p and the |log|q|| < sqrt(p) regime are handled externally)")
    pts = np.unique(np.round(np.geomspace(pmin, pmax, n)).astype(np.int64))
    return pts.tolist()


# -- isogeny estimate and threshold ---------------------------------------------------

def isogeny_upper_bound(logj: float) -> float:
    """Upper bound on p from the explicit surjectivity estimate.

    For logj >= 12*985 it is sqrt(4e7) (logj/12 + 3 + 4 log 2); below that the
    absolute bound with logj/12 replaced by 985 applies.
    """
    h = max(logj / 12, 985.0)
    return math.sqrt(4e7) * (h + 3 + 4 * math.log(2))


def lower_bound_logj(p: float) -> float:
    """log|j| >= 6p / 10^3.5 - 70, the inverse form of the isogeny bound."""
    return 6 * p / 10**3.5 - 70


@dataclass(frozen=True)
class ThresholdReport:
    p_star: float
    s_star: float
    paper_threshold: float
    consistent: bool

    def to_dict(self) -> dict:
        return {"p_star": self.p_star, "s_star": self.s_star,
                "paper_threshold": self.paper_threshold, "consistent": self.consistent}


def threshold() -> ThresholdReport:
    """Positive crossing of 6p/10^3.5 - 70 and 7 sqrt(p), via the quadratic in s = sqrt(p)."""
    a, b, c = 6 / 10**3.5, -7.0, -70.0
    s = (-b + math.sqrt(b * b - 4 * a * c)) / (2 * a)
    p_star = s * s
    return ThresholdReport(p_star, s, PAPER_THRESHOLD, p_star <= PAPER_THRESHOLD)


def crossing_gap(p: float) -> float:
    """7 sqrt(p) - lower_bound_logj(p): positive below the threshold, negative above."""
    return 7 * math.sqrt(p) - lower_bound_logj(p)
