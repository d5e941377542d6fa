"""Cusps of modular curves X_H as orbit data on M_p = (F_p^2 - 0)/{+-1}.

A cusp of X_H is an H-orbit of symbols (v, d) in M_p x F_p^x, where h acts by
(v, d) -> (h v, det(h) d). When det(H) is all of F_p^x the map
(v, d) -> gamma_d^-1 v, with gamma_d in H of determinant d, identifies these
orbits with the orbits of H cap SL_2 on M_p; that is how classes are computed.
Galois orbits of cusps are the orbits of the full group H on M_p.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .fp_arith import PrimeContext, is_cube
from .gl2_groups import SubgroupSet, build_subgroup, det, det_image, det_section, mat_inv

Point = tuple[int, int]

CURVES = {
    "x0": "Borel",
    "sp": "Csp",
    "sp+": "Nsp",
    "ns": "Cns",
    "ns+": "Nns",
    "G": "G",
    "Hp": "Hintersect",
}

INF, ZERO = "inf", "0"


def normalize(p: int, v) -> Point:
    """Canonical representative of +-v: first nonzero coordinate in 1..(p-1)/2."""
    a, b = v[0] % p, v[1] % p
    first = a or b
    if first == 0:
        raise ValueError("the zero vector is not in M_p")
    if first > (p - 1) // 2:
        a, b = -a % p, -b % p
    return a, b


def _normalize_codes(p: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = a % p, b % p
    first = np.where(a != 0, a, b)
    flip = first > (p - 1) // 2
    a = np.where(flip, (p - a) % p, a)
    b = np.where(flip, (p - b) % p, b)
    return a * p + b


def mp_points(p: int) -> list[Point]:
    """The (p^2 - 1)/2 points of M_p in canonical form, sorted."""
    return sorted({normalize(p, (a, b)) for a in range(p) for b in range(p) if a or b})


def _apply(p: int, g, v) -> Point:
    return ((g[0] * v[0] + g[1] * v[1]) % p, (g[2] * v[0] + g[3] * v[1]) % p)


@dataclass
class CuspTable:
    H: SubgroupSet
    reps: list[Point]
    sizes: list[int]
    at_infinity: list[bool]
    galois_orbit: list[int]
    _label: np.ndarray = field(repr=False)
    _section_inv: dict = field(repr=False)

    @property
    def p(self) -> int:
        return self.H.p

    @property
    def cusp_count(self) -> int:
        return len(self.reps)

    def class_of(self, v) -> int:
        a, b = normalize(self.p, v)
        return int(self._label[a * self.p + b])

    def classify(self, v, d: int) -> int:
        """Cusp index of the symbol (v, d)."""
        d %= self.p
        if d == 0:
            raise ValueError("d must be a unit")
        return self.class_of(_apply(self.p, self._section_inv[d], v))

    def is_at_infinity(self, c) -> bool:
        idx = c if isinstance(c, int) else self.class_of(c)
        return self.at_infinity[idx]

    def galois_orbits(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i, g in enumerate(self.galois_orbit):
            out.setdefault(g, []).append(i)
        return [out[k] for k in sorted(out)]

    def points_of(self, c: int) -> list[Point]:
        codes = np.flatnonzero(self._label == c)
        return [(int(x) // self.p, int(x) % self.p) for x in codes]

    def symbols_of(self, c: int) -> list[tuple[Point, int]]:
        """All symbols (v, d) of M_p x F_p^x lying in cusp class c."""
        p = self.p
        out = []
        for d in range(1, p):
            g = self._section_inv[d]
            # inverse of v -> gamma_d^-1 v on the points of class c
            ginv = mat_inv(p, g)
            for w in self.points_of(c):
                out.append((normalize(p, _apply(p, ginv, w)), d))
        return sorted(out)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "subgroup_kind": self.H.name,
            "cusp_count": self.cusp_count,
            "orbits": [
                {"rep": list(r), "size": s, "at_infinity": inf, "galois_orbit_id": g}
                for r, s, inf, g in zip(self.reps, self.sizes, self.at_infinity, self.galois_orbit)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _require_full_det(H: SubgroupSet) -> None:
    if len(det_image(H)) != H.p - 1:
        raise ValueError(f"{H.name}: det(H) is not all of F_p^x; cusp bijection unsupported")


@lru_cache(maxsize=32)
def enumerate_cusps(H: SubgroupSet) -> CuspTable:
    _require_full_det(H)
    p = H.p
    K = np.array(H.sl2_elements(), dtype=np.int64)
    label = np.full(p * p, -1, dtype=np.int64)
    reps, sizes = [], []
    for v in mp_points(p):
        code = v[0] * p + v[1]
        if label[code] >= 0:
            continue
        # the first unlabeled point in sorted order is the smallest of its orbit
        orbit = np.unique(_normalize_codes(p, K[:, 0] * v[0] + K[:, 1] * v[1],
                                           K[:, 2] * v[0] + K[:, 3] * v[1]))
        label[orbit] = len(reps)
        reps.append(v)
        sizes.append(len(orbit))

    section_inv = {d: mat_inv(p, g) for d, g in det_section(H).items()}
    galois = _galois_labels(H, label)
    # renumber Galois orbits by first appearance in cusp order
    remap: dict[int, int] = {}
    galois_orbit = [remap.setdefault(galois[r[0] * p + r[1]], len(remap)) for r in reps]

    table = CuspTable(H, reps, sizes, [False] * len(reps), galois_orbit, label, section_inv)
    for a in range(1, p):
        table.at_infinity[table.classify((a, 0), a)] = True
    return table


def _galois_labels(H: SubgroupSet, label: np.ndarray) -> np.ndarray:
    """Connected components of M_p under the generators of H (indexed by code)."""
    p = H.p
    pts = np.array(mp_points(p), dtype=np.int64)
    src = pts[:, 0] * p + pts[:, 1]
    rows, cols = [], []
    for g in H.generators:
        dst = _normalize_codes(p, g[0] * pts[:, 0] + g[1] * pts[:, 1],
                               g[2] * pts[:, 0] + g[3] * pts[:, 1])
        rows.append(src)
        cols.append(dst)
    rows.append(src)
    cols.append(src)
    r, c = np.concatenate(rows), np.concatenate(cols)
    graph = coo_matrix((np.ones(len(r)), (r, c)), shape=(p * p, p * p))
    _, comp = connected_components(graph, directed=True, connection="weak")
    return comp


@lru_cache(maxsize=64)
def cusp_table(ctx: PrimeContext, curve: str) -> CuspTable:
    try:
        kind = CURVES[curve]
    except KeyError:
        raise ValueError(f"unsupported curve {curve!r}; choose from {sorted(CURVES)}") from None
    return enumerate_cusps(build_subgroup(ctx, kind))


def galois_orbits(H: SubgroupSet | CuspTable) -> list[list[int]]:
    table = H if isinstance(H, CuspTable) else enumerate_cusps(H)
    return table.galois_orbits()


def is_at_infinity(table: CuspTable, c) -> bool:
    """True iff the class contains a symbol ((a, 0), a)."""
    return table.is_at_infinity(c)


# -- the cube orbit ------------------------------------------------------------

def o_cubes(ctx: PrimeContext) -> list[Point]:
    """Pairs (a, b) with a + b*sqrt(eps) a nonzero cube in F_{p^2}, sorted."""
    return sorted((a, b) for a in range(ctx.p) for b in range(ctx.p)
                  if (a or b) and is_cube(ctx, (a, b)))


def o_cubes_fiber_profile(ctx: PrimeContext) -> dict[int, int]:
    """Number of elements of O_cubes over each first coordinate a."""
    out = {a: 0 for a in range(ctx.p)}
    for a, _ in o_cubes(ctx):
        out[a] += 1
    return out


def cube_orbit_check(ctx: PrimeContext) -> bool:
    """At-infinity Galois orbit of X_G(p) is O_cubes/+-1 and the rest is one orbit."""
    p = ctx.p
    if p % 3 != 2 or p <= 3:
        raise ValueError(f"needs p = 2 mod 3 and p > 3, got p={p}")
    table = cusp_table(ctx, "G")
    orbits = table.galois_orbits()
    if len(orbits) != 2:
        return False
    inf_orbits = [o for o in orbits if any(table.at_infinity[c] for c in o)]
    if len(inf_orbits) != 1 or not all(table.at_infinity[c] for c in inf_orbits[0]):
        return False
    inf_points = {pt for c in inf_orbits[0] for pt in table.points_of(c)}
    return inf_points == {normalize(p, v) for v in o_cubes(ctx)}


# -- degeneracy maps and the cuspidal class group of X_0(p) ----------------------

@dataclass(frozen=True)
class SplitImages:
    symbol: tuple
    omega: tuple
    d1: str
    dp: str


def w_p(label: str) -> str:
    """The Atkin-Lehner involution on the two cusps of X_0(p)."""
    if label not in (INF, ZERO):
        raise ValueError(f"not a cusp of X_0(p): {label!r}")
    return ZERO if label == INF else INF


def omega_p(ctx: PrimeContext, symbol) -> tuple:
    (a, b), d = symbol
    return normalize(ctx.p, (b, a)), -d % ctx.p


def d1(ctx: PrimeContext, symbol) -> str:
    """Image in X_0(p) of a symbol, via the Borel cusp table."""
    table = cusp_table(ctx, "x0")
    v, d = symbol
    return INF if table.is_at_infinity(table.classify(v, d)) else ZERO


def split_cusp_maps(ctx: PrimeContext, symbol) -> SplitImages:
    """Images of a symbol of X_sp(p) under omega_p, d_1 and d_p = w_p d_1 omega_p.

    Both intertwining relations w_p d_p = d_1 omega_p and w_p d_1 = d_p omega_p
    are checked on the symbol.
    """
    v, d = symbol
    sym = (normalize(ctx.p, v), d % ctx.p)
    om = omega_p(ctx, sym)
    img1 = d1(ctx, sym)
    imgp = w_p(d1(ctx, om))
    if w_p(imgp) != d1(ctx, om):
        raise AssertionError("w_p d_p != d_1 omega_p")
    if w_p(img1) != w_p(d1(ctx, omega_p(ctx, om))):
        raise AssertionError("w_p d_1 != d_p omega_p")
    return SplitImages(sym, om, img1, imgp)


def cuspidal_order(p: int) -> int:
    """Order n(p) of cl(0 - inf) in the cuspidal class group of X_0(p)."""
    if p < 5:
        raise ValueError("needs p >= 5")
    n = (p - 1) // gcd(p - 1, 12)
    if (n > 1) != (p == 11 or p >= 17):
        raise AssertionError(f"n({p}) = {n} contradicts the expected nontriviality pattern")
    return n


@dataclass(frozen=True)
class CuspidalClassValue:
    """``coefficient`` times cl(0 - inf), reduced mod ``modulus``; ``raw`` is unreduced."""

    coefficient: int
    modulus: int
    raw: int


def _eta_prime(images: SplitImages) -> int:
    # divisor d_1(c) - d_p(c) as a multiple of (0) - (inf)
    return {(ZERO, INF): 1, (INF, ZERO): -1}.get((images.d1, images.dp), 0)


@lru_cache(maxsize=64)
def _eta_raw_table(ctx: PrimeContext) -> tuple[int, ...]:
    table = cusp_table(ctx, "sp+")
    out = []
    for c in range(table.cusp_count):
        vals = {_eta_prime(split_cusp_maps(ctx, s)) for s in table.symbols_of(c)}
        if len(vals) != 1:
            raise AssertionError(f"eta depends on the lift of cusp {c}: {vals}")
        out.append(vals.pop())
    return tuple(out)


def eta_of_cusp(ctx: PrimeContext, c) -> CuspidalClassValue:
    """eta of a cusp of X_sp+(p) (index or M_p point), from d_1(c') - d_p(c') over all lifts c'."""
    table = cusp_table(ctx, "sp+")
    idx = c if isinstance(c, int) else table.class_of(c)
    raw = _eta_raw_table(ctx)[idx]
    n = cuspidal_order(ctx.p)
    return CuspidalClassValue(raw % n, n, raw)


@dataclass(frozen=True)
class NuFiber:
    value: CuspidalClassValue
    fiber: tuple            # cusp indices of X_H(p) over c
    fiber_at_infinity: tuple
    pushforward: tuple      # matching cusp indices of X_sp+(p)
    index: int              # d = [N_ns : H]


def nu_fiber(H: SubgroupSet, c) -> NuFiber:
    """nu(c) for a cusp c of X_H: pull back to X_H(p), push to X_sp+(p), sum eta."""
    ctx = H.ctx
    p = ctx.p
    nns = build_subgroup(ctx, "Nns")
    hp = build_subgroup(ctx, "Hintersect")
    for g in hp.generators:
        if not H.contains(g):
            raise ValueError(f"{H.name} does not contain H(p)")
    for g in H.generators:
        if not nns.contains(g):
            raise ValueError(f"{H.name} is not contained in N_ns(p)")
    d, r = divmod(nns.order, H.order)
    if r:
        raise AssertionError("index is not an integer")
    if d == 1:
        raise ValueError("nu is only defined for proper subgroups (d > 1)")

    table_h = enumerate_cusps(H)
    table_hp = cusp_table(ctx, "Hp")
    table_sp = cusp_table(ctx, "sp+")
    idx = c if isinstance(c, int) else table_h.class_of(c)
    v = table_h.reps[idx]

    # the H-orbit of the symbol (v, 1), split into H(p)-orbits
    pushed: dict[int, set[int]] = {}
    for h in H.elements:
        sym = (_apply(p, h, v), det(p, h))
        c_hp = table_hp.classify(*sym)
        pushed.setdefault(c_hp, set()).add(table_sp.classify(*sym))
    for c_hp, targets in pushed.items():
        if len(targets) != 1:
            raise AssertionError(f"pushforward of X_H(p) cusp {c_hp} is not well defined")
    fiber = tuple(sorted(pushed))
    push = tuple(next(iter(pushed[x])) for x in fiber)
    raw = sum(eta_of_cusp(ctx, x).raw for x in push)
    n = cuspidal_order(p)
    return NuFiber(CuspidalClassValue(raw % n, n, raw), fiber,
                   tuple(table_hp.at_infinity[x] for x in fiber), push, d)


def nu_of_cusp(H: SubgroupSet, c) -> CuspidalClassValue:
    return nu_fiber(H, c).value


def nu_expected(p: int, d: int, at_infinity: bool) -> int:
    """(p+1)/(2d) - [c at infinity], unreduced."""
    return (p + 1) // (2 * d) - int(at_infinity)
