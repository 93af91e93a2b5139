"""Discretized compactification packs.

A pack is a finite metric sample of a compact space together with a
distinguished closed "boundary" subset X; the rest of the sample is the
interior X-hat.  All lengths are in the abstract units of the distance
matrix.  Scale ladders discretize the nested neighborhoods W_n = B(X, r_n)
and annuli W_n minus the closure of W_{n+2}; modulus curves sample
scale -> length functions (the boundary-approach profile h, the diagonal
gauge lambda, displacement moduli) on a ladder.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AsymmetricDistance,
    BadLadder,
    BadParams,
    DegeneratePack,
    EmptyComplement,
    EmptySide,
    IndexOutOfLadder,
    TriangleViolation,
)

DEFAULT_TRIANGLE_TOL = 1e-9

#: generator tags with the true covering dimension of the generated boundary
KNOWN_DIMS = {
    "finite_cylinder": 0,
    "interval_cylinder": 1,
    "circle_in_disk": 1,
    "cube_face": 2,
    "countable_example": 0,
}

CYLINDRICAL_KINDS = {"finite_cylinder", "interval_cylinder", "circle_in_disk", "cube_face"}


@dataclass(frozen=True)
class ModulusCurve:
    """Sampled scale -> value function, t strictly decreasing, values >= 0.

    Evaluation is by conservative step interpolation: the value at the
    smallest sample t' >= t, clamped to the end samples outside the range.
    """

    samples: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ts = [t for t, _ in self.samples]
        if not ts:
            raise BadParams("empty modulus curve")
        if any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
            raise BadParams("curve abscissae must be positive and strictly decreasing")
        if any(v < 0 for _, v in self.samples):
            raise BadParams("curve values must be nonnegative")

    @property
    def ts(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.samples])

    def _ascending(self):
        cached = getattr(self, "_asc", None)
        if cached is None:
            cached = (self.ts[::-1].copy(), self.values[::-1].copy())
            object.__setattr__(self, "_asc", cached)
        return cached

    def value_at(self, t: float) -> float:
        """Value at the smallest sampled scale >= t (clamped at both ends)."""
        ts, vs = self._ascending()
        idx = int(np.searchsorted(ts, t, side="left"))
        return float(vs[min(idx, len(ts) - 1)])

    def value_at_many(self, t: np.ndarray) -> np.ndarray:
        ts, vs = self._ascending()
        idx = np.searchsorted(ts, t, side="left")
        idx = np.clip(idx, 0, len(ts) - 1)
        return vs[idx]

    def is_nondecreasing(self, tol: float = 0.0) -> bool:
        v = self.values  # listed along decreasing t
        return bool(np.all(v[:-1] >= v[1:] - tol))

    def to_csv(self) -> str:
        lines = ["t,value"]
        lines += [f"{t!r},{v!r}" for t, v in self.samples]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class DiscretePack:
    """Finite metric sample of a compactification pack.

    Points are the integers 0..n-1.  ``dist`` is the full symmetric distance
    matrix, ``boundary`` the sorted ids of X.  Derived fields: ``k_sup`` is
    the largest boundary distance, ``delta_res`` the smallest positive one
    (the resolution floor), ``delta_dense`` how far a boundary point can be
    from the interior sample.
    """

    dist: np.ndarray
    boundary: frozenset[int]
    k_sup: float
    delta_res: float
    delta_dense: float
    meta: dict = field(default_factory=dict)

    @property
    def n_points(self) -> int:
        return self.dist.shape[0]

    @property
    def points(self) -> range:
        return range(self.n_points)

    @property
    def interior(self) -> frozenset[int]:
        return frozenset(self.points) - self.boundary

    @property
    def boundary_dist(self) -> np.ndarray:
        """Vector of d(p, X) for every point p."""
        return self._bdist

    @property
    def kind(self) -> str | None:
        return self.meta.get("kind")

    @property
    def known_dim(self) -> int | None:
        return self.meta.get("known_dim")

    @property
    def cylindrical(self) -> bool:
        return bool(self.meta.get("cylindrical", False))

    @property
    def coords(self) -> np.ndarray | None:
        c = self.meta.get("coords")
        return None if c is None else np.asarray(c, dtype=float)

    def d(self, p: int, q: int) -> float:
        return float(self.dist[p, q])

    def set_dist(self, p: int, targets: Iterable[int]) -> float:
        """min over q in targets of d(p, q); +inf for an empty target set."""
        idx = list(targets)
        if not idx:
            return float("inf")
        return float(self.dist[p, idx].min())

    def diam(self, pts: Iterable[int]) -> float:
        idx = sorted(pts)
        if len(idx) < 2:
            return 0.0
        sub = self.dist[np.ix_(idx, idx)]
        return float(sub.max())

    def to_json_dict(self) -> dict:
        meta = dict(self.meta)
        if "coords" in meta and isinstance(meta["coords"], np.ndarray):
            meta["coords"] = meta["coords"].tolist()
        meta.setdefault("delta_res", self.delta_res)
        return {
            "points": list(self.points),
            "dist": [[float(x) for x in row] for row in self.dist],
            "boundary": sorted(self.boundary),
            "meta": meta,
        }


@dataclass(frozen=True, eq=False)
class CylinderPack(DiscretePack):
    """Exact product pack X x levels with the sum metric d_X(x,y) + |t-s|.

    ``base_of`` maps every point to its boundary base id, ``level_of`` to its
    level (0.0 on the boundary).  Boundary distance equals the level exactly.
    """

    base_of: tuple[int, ...] = ()
    level_of: tuple[float, ...] = ()

    @property
    def levels(self) -> tuple[float, ...]:
        return tuple(self.meta["levels"])

    def point_at(self, base: int, level: float) -> int:
        return self._grid[(base, level)]


def _finish_pack(pack: DiscretePack) -> DiscretePack:
    bidx = sorted(pack.boundary)
    bdist = pack.dist[:, bidx].min(axis=1)
    bdist[bidx] = 0.0
    object.__setattr__(pack, "_bdist", bdist)
    pack.dist.setflags(write=False)
    if isinstance(pack, CylinderPack):
        grid = {(b, l): p for p, (b, l) in enumerate(zip(pack.base_of, pack.level_of))}
        object.__setattr__(pack, "_grid", grid)
    return pack


def _check_metric(dist: np.ndarray, tol: float) -> None:
    n = dist.shape[0]
    if dist.shape != (n, n):
        raise BadParams("distance matrix must be square")
    if np.any(np.abs(np.diag(dist)) > tol):
        raise DegeneratePack("nonzero self-distance")
    asym = np.abs(dist - dist.T)
    if asym.max(initial=0.0) > tol:
        i, j = np.unravel_index(int(asym.argmax()), asym.shape)
        raise AsymmetricDistance(f"d({i},{j}) != d({j},{i})")
    off = dist.copy()
    np.fill_diagonal(off, np.inf)
    if off.min() <= 0:
        raise DegeneratePack("distinct points at distance <= 0")
    # worst triangle defect d(i,j) - min_k (d(i,k)+d(k,j))
    worst = -np.inf
    worst_ijk = None
    for k in range(n):
        via = dist[:, k, None] + dist[None, k, :]
        defect = dist - via
        np.fill_diagonal(defect, -np.inf)
        defect[:, k] = -np.inf
        defect[k, :] = -np.inf
        m = defect.max(initial=-np.inf)
        if m > worst:
            worst = m
            i, j = np.unravel_index(int(defect.argmax()), defect.shape)
            worst_ijk = (int(i), k, int(j))
    if worst > tol:
        i, k, j = worst_ijk
        raise TriangleViolation(i, k, j, worst)


def validate_pack(
    raw_points: Sequence[int] | int,
    raw_dist,
    boundary_mask: Iterable[int] | Sequence[bool],
    tolerances: Mapping[str, float] | None = None,
    meta: dict | None = None,
) -> DiscretePack:
    """Check all pack invariants and return the finished pack.

    ``boundary_mask`` is either a boolean sequence over the points or an
    iterable of boundary ids.  Raises AsymmetricDistance, TriangleViolation,
    EmptySide or DegeneratePack on the first violated invariant.
    """
    tol = (tolerances or {}).get("triangle", DEFAULT_TRIANGLE_TOL)
    dist = np.array(raw_dist, dtype=float)
    n = dist.shape[0]
    pts = list(range(n)) if isinstance(raw_points, int) else list(raw_points)
    if len(pts) != n:
        raise BadParams("points and distance matrix disagree in size")
    mask = list(boundary_mask)
    if len(mask) == n and all(isinstance(b, (bool, np.bool_)) for b in mask):
        boundary = frozenset(i for i, b in enumerate(mask) if b)
    else:
        boundary = frozenset(int(i) for i in mask)
    if not boundary:
        raise EmptySide("boundary X is empty")
    if len(boundary) == n:
        raise EmptySide("interior X-hat is empty")
    _check_metric(dist, tol)

    bidx = sorted(boundary)
    iidx = sorted(set(range(n)) - boundary)
    bdist_int = dist[np.ix_(iidx, bidx)].min(axis=1)
    if bdist_int.min() <= 0:
        raise DegeneratePack("interior point at distance 0 from the boundary")
    k_sup = float(bdist_int.max())
    delta_res = float(bdist_int.min())
    delta_dense = float(dist[np.ix_(bidx, iidx)].min(axis=1).max())
    pack = DiscretePack(
        dist=dist,
        boundary=boundary,
        k_sup=k_sup,
        delta_res=delta_res,
        delta_dense=delta_dense,
        meta=dict(meta or {}),
    )
    return _finish_pack(pack)


def boundary_distance(pack: DiscretePack, p: int) -> float:
    """d(p, X); zero exactly on boundary points."""
    return float(pack.boundary_dist[p])


# -- scale ladders -------------------------------------------------------------


@dataclass(frozen=True)
class ScaleLadder:
    """Strictly decreasing radii r_0 > r_1 > ... > r_m realizing W_n = B(X, r_n)."""

    radii: tuple[float, ...]

    def __post_init__(self):
        r = self.radii
        if len(r) < 3:
            raise BadLadder("ladder needs at least three rungs")
        if any(x <= 0 for x in r) or any(b >= a for a, b in zip(r, r[1:])):
            raise BadLadder("radii must be positive and strictly decreasing")

    def __len__(self) -> int:
        return len(self.radii)

    def __getitem__(self, n: int) -> float:
        return self.radii[n]

    def validate_for(self, pack: DiscretePack) -> None:
        if self.radii[0] <= pack.k_sup:
            raise BadLadder(f"top rung {self.radii[0]} must exceed k_sup={pack.k_sup}")
        if self.radii[-1] >= pack.delta_res:
            raise BadLadder(
                f"bottom rung {self.radii[-1]} must bottom out below the sample floor {pack.delta_res}"
            )

    def to_json(self) -> list[float]:
        return [float(r) for r in self.radii]


def default_ladder(pack: DiscretePack, top_factor: float = 2.0) -> ScaleLadder:
    """Ladder with the harmonic pattern r_n = k_sup / (2n), nudged off sample values.

    Rungs that collide with an attained boundary distance are moved to the
    midpoint of the gap below, so that W_n and its closure never coincide on
    sample values.  The ladder is truncated one rung below the sample floor.
    """
    k = pack.k_sup
    values = np.unique(pack.boundary_dist[pack.boundary_dist > 0])
    floor = float(values.min())
    radii = [top_factor * k]
    n = 1
    while True:
        r = k / (2.0 * n)
        j = np.searchsorted(values, r)
        hit = None
        if j < len(values) and abs(values[j] - r) <= 1e-12 * k:
            hit = j
        elif j > 0 and abs(values[j - 1] - r) <= 1e-12 * k:
            hit = j - 1
        if hit is not None:
            # nudge just below the colliding value: midpoint with the closer
            # of the next sample value down and the next harmonic rung
            v = float(values[hit])
            below = float(values[hit - 1]) if hit > 0 else 0.0
            below = max(below, k / (2.0 * (n + 1)))
            r = (v + below) / 2.0
        if r < radii[-1] * (1 - 1e-12):
            radii.append(float(r))
            if r < floor:
                break
        n += 1
        if n > 10_000_000:
            raise BadLadder("runaway ladder construction")
    # margin below the sample floor so refinement recursions can take a final step
    radii.append(radii[-1] / 2.0)
    radii.append(radii[-1] / 2.0)
    ladder = ScaleLadder(tuple(radii))
    ladder.validate_for(pack)
    return ladder


def w_set(pack: DiscretePack, r: float, closed: bool = False) -> frozenset[int]:
    """The neighborhood W = B(X, r) over all pack points (closure with closed=True)."""
    bd = pack.boundary_dist
    sel = bd <= r if closed else bd < r
    return frozenset(np.flatnonzero(sel).tolist())


def annulus(pack: DiscretePack, ladder: ScaleLadder, n: int) -> frozenset[int]:
    """Interior points p with r_{n+2} < d(p, X) < r_n."""
    if n < 0 or n + 2 >= len(ladder):
        raise IndexOutOfLadder(f"annulus {n} needs rungs {n} and {n + 2}")
    bd = pack.boundary_dist
    sel = (bd > ladder[n + 2]) & (bd < ladder[n])
    return frozenset(np.flatnonzero(sel).tolist()) & pack.interior


def h_profile(pack: DiscretePack, ladder: ScaleLadder) -> ModulusCurve:
    """Boundary-approach profile sampled on the ladder.

    h(t) = max over x in X of d(x, {p : d(p,X) >= t}) for t <= k_sup, and
    k_sup beyond; nondecreasing in t with limit 0 at fine scales.
    """
    bidx = sorted(pack.boundary)
    bd = pack.boundary_dist
    order = np.argsort(-bd, kind="stable")  # deepest-from-boundary first
    depths = bd[order]
    dmin = np.full(len(bidx), np.inf)
    taken = 0
    samples = []
    for t in ladder.radii:  # descending: the far set only grows
        if t >= pack.k_sup:
            samples.append((float(t), float(pack.k_sup)))
            continue
        while taken < len(order) and depths[taken] >= t:
            p = order[taken]
            np.minimum(dmin, pack.dist[bidx, p], out=dmin)
            taken += 1
        if taken == 0:
            raise EmptyComplement(f"no point at boundary distance >= {t} < k_sup")
        samples.append((float(t), float(dmin.max())))
    return ModulusCurve(tuple(samples))


# -- generators ----------------------------------------------------------------


@dataclass(frozen=True)
class PackKind:
    """A generator family tag plus its parameters."""

    tag: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tag not in KNOWN_DIMS:
            raise BadParams(f"unknown pack kind {self.tag!r}")

    @property
    def known_dim(self) -> int:
        return KNOWN_DIMS[self.tag]


def _geometric_levels(n_levels: int, ratio: float, top: float = 1.0) -> list[float]:
    if n_levels < 1 or not (0 < ratio < 1) or top <= 0:
        raise BadParams("need n_levels >= 1 and 0 < ratio < 1")
    return [top * ratio**i for i in range(n_levels)]


def _product_pack(
    base_coords: np.ndarray,
    base_dist: np.ndarray,
    levels: Sequence[float],
    meta: dict,
) -> CylinderPack:
    """Assemble X x levels with the sum metric; boundary is X at level 0."""
    nb = base_dist.shape[0]
    base_of = list(range(nb))
    level_of = [0.0] * nb
    for lev in levels:
        base_of.extend(range(nb))
        level_of.extend([lev] * nb)
    bo = np.array(base_of)
    lv = np.array(level_of)
    dist = base_dist[np.ix_(bo, bo)] + np.abs(lv[:, None] - lv[None, :])
    boundary = frozenset(range(nb))
    coords = np.column_stack([base_coords[bo], lv])
    meta = dict(meta)
    meta.update(
        levels=[float(l) for l in levels],
        coords=coords.tolist(),
        base_of=[int(b) for b in base_of],
        level_of=[float(l) for l in level_of],
    )
    pack = CylinderPack(
        dist=dist,
        boundary=boundary,
        k_sup=float(max(levels)),
        delta_res=float(min(levels)),
        delta_dense=float(min(levels)),
        meta=meta,
        base_of=tuple(int(b) for b in base_of),
        level_of=tuple(float(l) for l in level_of),
    )
    return _finish_pack(pack)


def _gen_finite_cylinder(n_base: int = 3, n_levels: int = 6, spacing: float = 2.0, ratio: float = 0.4):
    if n_base < 1 or spacing <= 0:
        raise BadParams("finite_cylinder needs n_base >= 1 and spacing > 0")
    base = spacing * np.arange(n_base, dtype=float)
    bdist = np.abs(base[:, None] - base[None, :])
    levels = _geometric_levels(n_levels, ratio)
    return _product_pack(base, bdist, levels, {"kind": "finite_cylinder", "known_dim": 0, "cylindrical": True})


def _gen_interval_cylinder(n_base: int = 65, n_levels: int = 12, ratio: float = 0.4):
    if n_base < 2:
        raise BadParams("interval_cylinder needs n_base >= 2")
    base = np.linspace(0.0, 1.0, n_base)
    bdist = np.abs(base[:, None] - base[None, :])
    levels = _geometric_levels(n_levels, ratio)
    return _product_pack(base, bdist, levels, {"kind": "interval_cylinder", "known_dim": 1, "cylindrical": True})


def _gen_cube_face(n_side: int = 5, n_levels: int = 8, ratio: float = 0.4):
    if n_side < 2:
        raise BadParams("cube_face needs n_side >= 2")
    g = np.linspace(0.0, 1.0, n_side)
    xx, yy = np.meshgrid(g, g, indexing="ij")
    base = np.column_stack([xx.ravel(), yy.ravel()])
    bdist = np.abs(base[:, None, :] - base[None, :, :]).sum(axis=2)
    levels = _geometric_levels(n_levels, ratio)
    return _product_pack(base, bdist, levels, {"kind": "cube_face", "known_dim": 2, "cylindrical": True})


def _gen_circle_in_disk(n_angles: int = 48, n_levels: int = 12, ratio: float = 0.4):
    """Unit circle as boundary, interior sampled on collar rings at radius 1 - t."""
    if n_angles < 3:
        raise BadParams("circle_in_disk needs n_angles >= 3")
    angles = 2 * np.pi * np.arange(n_angles) / n_angles
    levels = _geometric_levels(n_levels, ratio, top=0.5)
    coords = [np.column_stack([np.cos(angles), np.sin(angles)])]
    for t in levels:
        coords.append((1.0 - t) * coords[0])
    pts = np.vstack(coords)
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    n_b = n_angles
    meta = {
        "kind": "circle_in_disk",
        "known_dim": 1,
        "cylindrical": True,
        "levels": [float(t) for t in levels],
        "coords": pts.tolist(),
        "circumference": 2 * np.pi,
    }
    pack = DiscretePack(
        dist=dist,
        boundary=frozenset(range(n_b)),
        k_sup=float(max(levels)),
        delta_res=float(min(levels)),
        delta_dense=float(min(levels)),
        meta=meta,
    )
    return _finish_pack(pack)


def _van_der_corput(n: int) -> float:
    """Base-2 van der Corput point; a deterministic dense enumeration of [0,1]."""
    if n == 1:
        return 0.0
    if n == 2:
        return 1.0
    x, denom = 0.0, 1.0
    m = n - 2
    while m:
        denom *= 2.0
        x += (m & 1) / denom
        m >>= 1
    return x


def _gen_countable_example(n_y: int = 5):
    """Triangular pack over a dense sequence y_1..y_N of [0,1].

    The interior is the union over n of {y_1..y_n} x {1/n}; the boundary is
    the whole sequence at level 0.  Metric inherited from Y x [0,1] with the
    sum metric.
    """
    if n_y < 2:
        raise BadParams("countable_example needs n_y >= 2")
    ys = [_van_der_corput(i + 1) for i in range(n_y)]
    base_of, level_of = list(range(n_y)), [0.0] * n_y
    for n in range(1, n_y + 1):
        for j in range(n):
            base_of.append(j)
            level_of.append(1.0 / n)
    bo = np.array(base_of)
    lv = np.array(level_of)
    yv = np.array(ys)[bo]
    dist = np.abs(yv[:, None] - yv[None, :]) + np.abs(lv[:, None] - lv[None, :])
    coords = np.column_stack([yv, lv])
    meta = {
        "kind": "countable_example",
        "known_dim": 0,
        "cylindrical": False,
        "levels": sorted({1.0 / n for n in range(1, n_y + 1)}, reverse=True),
        "coords": coords.tolist(),
    }
    pack = DiscretePack(
        dist=dist,
        boundary=frozenset(range(n_y)),
        k_sup=1.0,
        delta_res=1.0 / n_y,
        delta_dense=float(dist[np.ix_(range(n_y), range(n_y, len(bo)))].min(axis=1).max()),
        meta=meta,
    )
    return _finish_pack(pack)


_GENERATORS: dict[str, Callable] = {
    "finite_cylinder": _gen_finite_cylinder,
    "interval_cylinder": _gen_interval_cylinder,
    "circle_in_disk": _gen_circle_in_disk,
    "cube_face": _gen_cube_face,
    "countable_example": _gen_countable_example,
}


def generate_pack(kind: PackKind | str, **params) -> DiscretePack:
    """Build a pack of the requested family; its known dimension is recorded in meta."""
    if isinstance(kind, str):
        kind = PackKind(kind, params)
    elif params:
        raise BadParams("pass parameters inside PackKind or as keywords, not both")
    try:
        return _GENERATORS[kind.tag](**kind.params)
    except TypeError as exc:
        raise BadParams(str(exc)) from None


# -- file formats ---------------------------------------------------------------


def pack_to_json(pack: DiscretePack) -> str:
    return json.dumps(pack.to_json_dict(), sort_keys=True)


def pack_from_json(text: str) -> DiscretePack:
    obj = json.loads(text)
    pack = validate_pack(obj["points"], obj["dist"], obj["boundary"], meta=obj.get("meta"))
    meta = pack.meta
    if "base_of" in meta and "level_of" in meta:
        cyl = CylinderPack(
            dist=pack.dist,
            boundary=pack.boundary,
            k_sup=pack.k_sup,
            delta_res=pack.delta_res,
            delta_dense=pack.delta_dense,
            meta=meta,
            base_of=tuple(int(b) for b in meta["base_of"]),
            level_of=tuple(float(l) for l in meta["level_of"]),
        )
        return _finish_pack(cyl)
    return pack


def ladder_to_json(ladder: ScaleLadder) -> str:
    return json.dumps(ladder.to_json())


def ladder_from_json(text: str) -> ScaleLadder:
    return ScaleLadder(tuple(float(r) for r in json.loads(text)))
