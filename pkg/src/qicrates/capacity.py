"""Rate regions and interference-regime classification for cc-qq channels.

Unions over input distributions are realised on a finite simplex grid
(:class:`DistGrid`), and the time-sharing variable ``Q`` is never enumerated:
conditioning on ``Q`` is a convex combination of ``Q``-free regions, so every
union below ends in one convex hull.
"""

from __future__ import annotations

import itertools
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .channels import CcqMac, CcqqChannel
from .entropic import CqState, HkInput, build_hk_state, build_ic_state, build_mac_state
from .errors import ValidationError
from .geometry import (
    Pentagon,
    RatePoint,
    RateRegion,
    convex_hull,
    halfplane_region,
    pentagon_region,
    union_hull,
)

MARGIN_TOL = 1e-9
TABLE_CAP = 4096

__all__ = [
    "DistGrid", "HkInput", "IcInformations", "ClassificationReport", "RegimeWarning",
    "ic_informations", "mac_pentagon", "mac_capacity_region", "successive_ic_pairs",
    "successive_region", "classify_very_strong", "classify_strong",
    "very_strong_capacity_region", "strong_capacity_region", "sato_outer_region",
    "hk_bounds", "hk_polygon", "hk_region", "sd_rs_points", "sd_rs_region",
    "enumerate_hk_inputs", "hk_input_pairs", "mixing_tables", "HK_COEFFS",
]


class RegimeWarning(UserWarning):
    """A capacity formula was evaluated on a channel outside its regime."""


@dataclass(frozen=True)
class DistGrid:
    """All distributions whose probabilities are multiples of ``step``."""

    step: float = 1 / 16

    def __post_init__(self):
        if not (0 < self.step <= 1):
            raise ValueError(f"grid step must lie in (0, 1], got {self.step}")
        n = round(1 / self.step)
        if abs(n * self.step - 1) > 1e-9:
            raise ValueError(f"grid step must be 1/N for an integer N, got {self.step}")

    @property
    def resolution(self) -> int:
        return round(1 / self.step)

    def distributions(self, k: int) -> list[np.ndarray]:
        n = self.resolution
        out = []
        # compositions of n into k parts, in lexicographic order
        for cuts in itertools.combinations(range(n + k - 1), k - 1):
            parts = np.diff((-1,) + cuts + (n + k - 1,)) - 1
            out.append(parts / n)
        return out

    def pairs(self, nx1: int, nx2: int) -> list[tuple[np.ndarray, np.ndarray]]:
        d1, d2 = self.distributions(nx1), self.distributions(nx2)
        return [(p1, p2) for p1 in d1 for p2 in d2]


GridLike = "DistGrid | Sequence[tuple[np.ndarray, np.ndarray]]"


def _pairs(grid, nx1: int, nx2: int) -> list:
    if grid is None:
        grid = DistGrid()
    if isinstance(grid, DistGrid):
        return grid.pairs(nx1, nx2)
    return list(grid)


def _map(fn: Callable, items: Sequence, n_jobs: int | None) -> list:
    if n_jobs is None or n_jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n_jobs) as ex:
        return list(ex.map(fn, items))


# --------------------------------------------------------------- informations

@dataclass(frozen=True)
class IcInformations:
    """The Holevo informations of one input pair ``(p1, p2)`` on an interference channel.

    Field ``i1_b1_x2`` is ``I(X1; B1 | X2)``, ``i12_b2`` is ``I(X1 X2; B2)``,
    ``i12_b12`` is ``I(X1 X2; B1 B2)`` and so on.
    """

    i1_b1_x2: float
    i2_b1_x1: float
    i12_b1: float
    i1_b1: float
    i2_b1: float
    i1_b2_x2: float
    i2_b2_x1: float
    i12_b2: float
    i1_b2: float
    i2_b2: float
    i12_b12: float


def _ic_infos_from_state(s: CqState) -> IcInformations:
    vals = {}
    for j in (1, 2):
        sys = f"B{j}"
        vals[f"i1_b{j}_x2"] = s.info("X1", "X2", sys)
        vals[f"i2_b{j}_x1"] = s.info("X2", "X1", sys)
        vals[f"i12_b{j}"] = s.info(("X1", "X2"), (), sys)
        vals[f"i1_b{j}"] = s.info("X1", (), sys)
        vals[f"i2_b{j}"] = s.info("X2", (), sys)
    vals["i12_b12"] = s.info(("X1", "X2"), (), "B1B2")
    return IcInformations(**vals)


def ic_informations(ch: CcqqChannel, p1, p2) -> IcInformations:
    return _ic_infos_from_state(build_ic_state(ch, p1, p2))


def mac_pentagon(mac: CcqMac, p1, p2) -> Pentagon:
    s = build_mac_state(mac, p1, p2)
    return Pentagon.from_informations(
        s.info("X1", "X2"), s.info("X2", "X1"), s.info(("X1", "X2")),
        i1=s.info("X1"), i2=s.info("X2"),
    )


def mac_capacity_region(mac: CcqMac, grid=None, n_jobs: int | None = None) -> RateRegion:
    """Hull over the grid of the MAC pentagons ``(I(X1;B|X2), I(X2;B|X1), I(X1X2;B))``."""
    pents = _map(lambda pr: mac_pentagon(mac, *pr), _pairs(grid, mac.nx1, mac.nx2), n_jobs)
    return union_hull(pentagon_region(p) for p in pents)


def _ic_table(ch: CcqqChannel, grid, n_jobs) -> list[tuple[tuple, IcInformations]]:
    pairs = _pairs(grid, ch.nx1, ch.nx2)
    infos = _map(lambda pr: ic_informations(ch, *pr), pairs, n_jobs)
    return list(zip(pairs, infos))


# ------------------------------------------------------- successive decoding

def _successive_from_infos(v: IcInformations) -> list[RatePoint]:
    pts = []
    for pi1 in ((1, 2), (2, 1)):
        for pi2 in ((1, 2), (2, 1)):
            r1 = []
            r2 = []
            # receiver 1 must decode m1; it decodes m2 only when m2 comes first
            if pi1 == (1, 2):
                r1.append(v.i1_b1)
            else:
                r2.append(v.i2_b1)
                r1.append(v.i1_b1_x2)
            # receiver 2 must decode m2; it decodes m1 only when m1 comes first
            if pi2 == (2, 1):
                r2.append(v.i2_b2)
            else:
                r1.append(v.i1_b2)
                r2.append(v.i2_b2_x1)
            pt = RatePoint(min(r1), min(r2))
            if pt not in pts:
                pts.append(pt)
    return pts


def successive_ic_pairs(ch: CcqqChannel, p1, p2) -> list[RatePoint]:
    """Best rate pair for each of the four pairs of decode orderings ``(pi1, pi2)``.

    Ordering ``(1, 2)`` means the receiver decodes ``m1`` first. Duplicates are
    removed; the order of the first occurrences is kept.
    """
    return _successive_from_infos(ic_informations(ch, p1, p2))


def successive_region(ch: CcqqChannel, grid=None, n_jobs: int | None = None) -> RateRegion:
    """Time-sharing hull of all successive-decoding pairs over the grid."""
    pts = [p for _, v in _ic_table(ch, grid, n_jobs) for p in _successive_from_infos(v)]
    return convex_hull(pts)


# ------------------------------------------------------------- classification

@dataclass(frozen=True)
class ClassificationReport:
    """Grid certificate for an interference regime (not a proof over all inputs)."""

    regime: str
    verdict: str
    step: float | None
    worst_margin: float
    witness: tuple[tuple[float, ...], tuple[float, ...]]
    points: int

    @property
    def holds(self) -> bool:
        return self.verdict == self.regime

    def as_dict(self) -> dict:
        return {
            "regime": self.regime,
            "verdict": self.verdict,
            "grid_step": self.step,
            "certified_on": "grid",
            "grid_points": self.points,
            "worst_margin": self.worst_margin,
            "witness": {"p1": list(self.witness[0]), "p2": list(self.witness[1])},
        }


def _classify(ch, grid, regime: str, margins: Callable[[IcInformations], float], n_jobs) -> ClassificationReport:
    table = _ic_table(ch, grid, n_jobs)
    worst = None
    for (p1, p2), v in table:
        m = margins(v)
        if worst is None or m < worst[0]:
            worst = (m, p1, p2)
    m, p1, p2 = worst
    verdict = regime if m >= -MARGIN_TOL else "unclassified"
    step = grid.step if isinstance(grid, DistGrid) else (DistGrid().step if grid is None else None)
    return ClassificationReport(
        regime, verdict, step, float(m),
        (tuple(float(x) for x in p1), tuple(float(x) for x in p2)), len(table),
    )


def classify_very_strong(ch: CcqqChannel, grid=None, n_jobs: int | None = None) -> ClassificationReport:
    """Check ``I(X1;B1|X2) <= I(X1;B2)`` and ``I(X2;B2|X1) <= I(X2;B1)`` on the grid."""
    return _classify(ch, grid, "very_strong",
                     lambda v: min(v.i1_b2 - v.i1_b1_x2, v.i2_b1 - v.i2_b2_x1), n_jobs)


def classify_strong(ch: CcqqChannel, grid=None, n_jobs: int | None = None) -> ClassificationReport:
    """Check ``I(X1;B1|X2) <= I(X1;B2|X2)`` and ``I(X2;B2|X1) <= I(X2;B1|X1)`` on the grid."""
    return _classify(ch, grid, "strong",
                     lambda v: min(v.i1_b2_x2 - v.i1_b1_x2, v.i2_b1_x1 - v.i2_b2_x1), n_jobs)


def _regime_check(check: bool, classifier, ch, grid, n_jobs, name):
    if not check:
        return
    rep = classifier(ch, grid, n_jobs)
    if not rep.holds:
        warnings.warn(
            f"channel is not certified {name} on this grid (worst margin {rep.worst_margin:.3g}); "
            "the region is computed anyway", RegimeWarning, stacklevel=3,
        )


# ------------------------------------------------------------ regime regions

def very_strong_capacity_region(ch: CcqqChannel, grid=None, check: bool = False,
                                n_jobs: int | None = None) -> RateRegion:
    """Hull of the rectangles ``R1 <= I(X1;B1|X2), R2 <= I(X2;B2|X1)``."""
    _regime_check(check, classify_very_strong, ch, grid, n_jobs, "very strong")
    return convex_hull([(v.i1_b1_x2, v.i2_b2_x1) for _, v in _ic_table(ch, grid, n_jobs)])


def _strong_pentagon(v: IcInformations) -> Pentagon:
    return Pentagon(v.i1_b1_x2, v.i2_b2_x1, min(v.i12_b1, v.i12_b2))


def _sato_pentagon(v: IcInformations) -> Pentagon:
    return Pentagon(v.i1_b1_x2, v.i2_b2_x1, v.i12_b12)


def strong_capacity_region(ch: CcqqChannel, grid=None, check: bool = False,
                           n_jobs: int | None = None) -> RateRegion:
    """Hull of pentagons with sum bound ``min(I(X1X2;B1), I(X1X2;B2))``."""
    _regime_check(check, classify_strong, ch, grid, n_jobs, "strong")
    return union_hull(pentagon_region(_strong_pentagon(v)) for _, v in _ic_table(ch, grid, n_jobs))


def sato_outer_region(ch: CcqqChannel, grid=None, n_jobs: int | None = None) -> RateRegion:
    """Hull of pentagons whose sum bound uses the joint output ``B1 B2``."""
    return union_hull(pentagon_region(_sato_pentagon(v)) for _, v in _ic_table(ch, grid, n_jobs))


# ------------------------------------------------------------- Han-Kobayashi

# coefficient vectors of the nine Han-Kobayashi faces, in order
HK_COEFFS = np.array([
    [1, 0], [1, 0], [0, 1], [0, 1], [1, 1], [1, 1], [1, 1], [2, 1], [1, 2],
], dtype=float)


def _hk_rhs(s: CqState) -> np.ndarray:
    U1, W1, U2, W2 = "U1", "W1", "U2", "W2"
    i = s.info
    a_u1 = i(U1, (W1, W2), "B1")
    a_u1w1 = i((U1, W1), W2, "B1")
    a_u1w2 = i((U1, W2), W1, "B1")
    a_all = i((U1, W1, W2), (), "B1")
    a_w2 = i(W2, (U1, W1), "B1")
    b_u2 = i(U2, (W1, W2), "B2")
    b_u2w2 = i((U2, W2), W1, "B2")
    b_u2w1 = i((U2, W1), W2, "B2")
    b_all = i((U2, W2, W1), (), "B2")
    b_w1 = i(W1, (U2, W2), "B2")
    return np.array([
        a_u1w1,                       # HK1
        a_u1 + b_w1,                  # HK2
        b_u2w2,                       # HK3
        a_w2 + b_u2,                  # HK4
        a_all + b_u2,                 # HK5
        a_u1 + b_all,                 # HK6
        a_u1w2 + b_u2w1,              # HK7
        a_u1 + b_u2w1 + a_all,        # HK8
        a_u1w2 + b_u2 + b_all,        # HK9
    ])


def hk_bounds(ch: CcqqChannel, hk: HkInput) -> np.ndarray:
    """Right-hand sides of the nine Han-Kobayashi inequalities for one input."""
    return _hk_rhs(build_hk_state(ch, hk))


def _hk_polygon_from_rhs(rhs: np.ndarray) -> RateRegion:
    return halfplane_region(zip(HK_COEFFS, rhs))


def hk_polygon(ch: CcqqChannel, hk: HkInput) -> RateRegion:
    """Polygon cut out by the nine inequalities and ``R1, R2 >= 0`` for one input."""
    return _hk_polygon_from_rhs(hk_bounds(ch, hk))


def hk_region(ch: CcqqChannel, inputs: Iterable[HkInput] | None = None,
              n_jobs: int | None = None) -> RateRegion:
    """Hull over all inputs of the per-input Han-Kobayashi polygons."""
    if inputs is None:
        inputs = enumerate_hk_inputs(ch.nx1, ch.nx2)
    polys = _map(lambda hk: hk_polygon(ch, hk), list(inputs), n_jobs)
    return union_hull(polys)


_RX1 = {"1p": "U1", "1c": "W1", "2c": "W2"}
_RX2 = {"2p": "U2", "2c": "W2", "1c": "W1"}


def _chain_rates(s: CqState, order: Sequence[str], names: dict, system: str) -> dict:
    rates = {}
    decoded: list[str] = []
    for tag in order:
        rates[tag] = s.info(names[tag], tuple(decoded), system)
        decoded.append(names[tag])
    return rates


def _sd_rs_from_state(s: CqState) -> list[RatePoint]:
    rx1 = [_chain_rates(s, o, _RX1, "B1") for o in itertools.permutations(("1p", "1c", "2c"))]
    rx2 = [_chain_rates(s, o, _RX2, "B2") for o in itertools.permutations(("2p", "2c", "1c"))]
    pts = []
    for r1 in rx1:
        for r2 in rx2:
            pts.append(RatePoint(
                r1["1p"] + min(r1["1c"], r2["1c"]),
                min(r1["2c"], r2["2c"]) + r2["2p"],
            ))
    return pts


def sd_rs_points(ch: CcqqChannel, hk: HkInput) -> list[RatePoint]:
    """The 36 rate points of successive decoding with rate splitting.

    Receiver 1 decodes ``(1p, 1c, 2c) = (U1, W1, W2)`` from ``B1`` and receiver 2
    decodes ``(2p, 2c, 1c) = (U2, W2, W1)`` from ``B2``, each in every order, with
    every sub-rate set to its chain-rule bound.
    """
    return _sd_rs_from_state(build_hk_state(ch, hk))


def sd_rs_region(ch: CcqqChannel, inputs: Iterable[HkInput] | None = None,
                 n_jobs: int | None = None) -> RateRegion:
    if inputs is None:
        inputs = enumerate_hk_inputs(ch.nx1, ch.nx2)
    groups = _map(lambda hk: sd_rs_points(ch, hk), list(inputs), n_jobs)
    return convex_hull([p for g in groups for p in g])


# --------------------------------------------------- Han-Kobayashi inputs

def _canonical_table(f: np.ndarray) -> tuple:
    best = None
    for rp in itertools.permutations(range(f.shape[0])):
        g = f[list(rp)]
        for cp in itertools.permutations(range(f.shape[1])):
            key = tuple(g[:, list(cp)].ravel())
            if best is None or key < best:
                best = key
    return best


def mixing_tables(nx: int, n_u: int, n_w: int) -> list[np.ndarray]:
    """Tables ``f: U x W -> X`` that depend on both arguments, one per relabelling class.

    Tables that ignore one argument are excluded because they coincide with the
    all-personal or all-common splits.
    """
    if nx ** (n_u * n_w) > TABLE_CAP:
        raise ValidationError(
            f"{nx}^{n_u * n_w} mixing tables exceed the enumeration cap {TABLE_CAP}; lower the auxiliary size"
        )
    seen = set()
    out = []
    for flat in itertools.product(range(nx), repeat=n_u * n_w):
        f = np.array(flat, dtype=int).reshape(n_u, n_w)
        if np.all(f == f[:, :1]) or np.all(f == f[:1, :]):
            continue
        key = _canonical_table(f)
        if key in seen:
            continue
        seen.add(key)
        out.append(np.array(key, dtype=int).reshape(n_u, n_w))
    return out


def _sender_splits(nx: int, grid: DistGrid, max_aux: int, split_grid: DistGrid) -> list[tuple]:
    ident_u = np.arange(nx).reshape(nx, 1)
    ident_w = np.arange(nx).reshape(1, nx)
    splits = []
    for p in grid.distributions(nx):
        splits.append((p, np.ones(1), ident_u))
    for p in grid.distributions(nx):
        if p.max() < 1.0:  # point masses are already covered by the all-personal form
            splits.append((np.ones(1), p, ident_w))
    if max_aux >= 2 and nx >= 2:
        dists = [p for p in split_grid.distributions(max_aux) if p.min() > 0]
        for f in mixing_tables(nx, max_aux, max_aux):
            for pu in dists:
                for pw in dists:
                    splits.append((pu, pw, f))
    return splits


def _default_aux(nx: int) -> int:
    # |X|, reduced until the mixing-table enumeration fits under the cap
    k = nx
    while k > 1 and nx ** (k * k) > TABLE_CAP:
        k -= 1
    return k


def enumerate_hk_inputs(nx1: int, nx2: int, grid: DistGrid | None = None, max_aux: int | None = None,
                        split_step: float = 0.25) -> list[HkInput]:
    """Finite family of Han-Kobayashi inputs (a declared truncation).

    Per sender the family holds: every grid distribution sent entirely as a
    personal message (``|W| = 1``); every non-degenerate grid distribution sent
    entirely as a common message (``|U| = 1``); and genuine splits with
    ``|U| = |W| = max_aux`` (default ``|X|``, lowered
    while ``|X|^(|U||W|)`` exceeds ``TABLE_CAP``), one mixing table per relabelling
    class, with full-support ``pU``, ``pW`` on the coarser ``split_step`` grid.
    Inputs are all pairs of sender splits.
    """
    grid = DistGrid() if grid is None else grid
    split_grid = DistGrid(split_step)
    s1 = _sender_splits(nx1, grid, _default_aux(nx1) if max_aux is None else max_aux, split_grid)
    s2 = _sender_splits(nx2, grid, _default_aux(nx2) if max_aux is None else max_aux, split_grid)
    return [HkInput(a[0], a[1], b[0], b[1], a[2], b[2]) for a in s1 for b in s2]


def hk_input_pairs(inputs: Iterable[HkInput], nx1: int, nx2: int, decimals: int = 12) -> list[tuple]:
    """Distinct input-distribution pairs ``(p_X1, p_X2)`` induced by a family of inputs."""
    seen = {}
    for hk in inputs:
        p1, p2 = hk.input_distributions(nx1, nx2)
        key = (tuple(np.round(p1, decimals)), tuple(np.round(p2, decimals)))
        if key not in seen:
            seen[key] = (p1, p2)
    return list(seen.values())


def fraction_label(p: np.ndarray) -> str:
    return "(" + ", ".join(str(Fraction(float(x)).limit_denominator(1 << 20)) for x in p) + ")"
