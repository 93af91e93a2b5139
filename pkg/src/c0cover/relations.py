"""Relation algebra over a pack and the C0-controlled constructions.

Conventions: the ball of x is E_x = {y : (y, x) in E}, the image of a set K
is E(K) = {y : exists x in K with (y, x) in E}, and E o F pairs (x, z) when
some y gives (x, y) in E and (y, z) in F.  With these the usual identities
hold on the nose, e.g. (E o F)_x = E(F_x).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    BadParams,
    KEBallsNotRefining,
    LambdaNotDecaying,
    MissingDiagonal,
    NotCovering,
    NotSymmetric,
    PackMismatch,
)
from .packs import DiscretePack, ModulusCurve, ScaleLadder, h_profile

DEFAULT_LIMIT_TOL = 0.05  # one knob for every decay-to-resolution surrogate


class Relation:
    """Set of ordered point pairs over one pack."""

    __slots__ = ("pack", "pairs", "_balls")

    def __init__(self, pack: DiscretePack, pairs: Iterable[tuple[int, int]]):
        self.pack = pack
        self.pairs = frozenset((int(p), int(q)) for p, q in pairs)
        n = pack.n_points
        for p, q in self.pairs:
            if not (0 <= p < n and 0 <= q < n):
                raise PackMismatch(f"pair ({p},{q}) outside the pack")
        self._balls = None

    def __repr__(self):
        return f"Relation(<{len(self.pairs)} pairs>)"

    def __eq__(self, other):
        return (
            isinstance(other, Relation)
            and other.pack is self.pack
            and other.pairs == self.pairs
        )

    def __hash__(self):
        return hash((id(self.pack), self.pairs))

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair):
        return pair in self.pairs

    def _ball_index(self) -> dict[int, frozenset[int]]:
        if self._balls is None:
            balls: dict[int, set[int]] = {}
            for y, x in self.pairs:
                balls.setdefault(x, set()).add(y)
            self._balls = {x: frozenset(s) for x, s in balls.items()}
        return self._balls

    def ball(self, x: int) -> frozenset[int]:
        return self._ball_index().get(x, frozenset())

    def image(self, targets: Iterable[int]) -> frozenset[int]:
        balls = self._ball_index()
        out: set[int] = set()
        for x in targets:
            out |= balls.get(x, frozenset())
        return frozenset(out)

    def inverse(self) -> "Relation":
        return Relation(self.pack, ((q, p) for p, q in self.pairs))

    def is_symmetric(self) -> bool:
        return all((q, p) in self.pairs for p, q in self.pairs)

    def contains_diagonal(self, points: Iterable[int] | None = None) -> bool:
        pts = self.pack.interior if points is None else points
        return all((p, p) in self.pairs for p in pts)

    def union(self, other: "Relation") -> "Relation":
        _same_pack(self, other)
        return Relation(self.pack, self.pairs | other.pairs)

    def is_proper(self) -> bool:
        """Images of relatively compact sets are relatively compact; every
        subset of a finite pack is, so this records True for API parity."""
        return True

    def to_json_list(self) -> list[list[int]]:
        return [[p, q] for p, q in sorted(self.pairs)]


def _same_pack(e: Relation, f: Relation) -> None:
    if e.pack is not f.pack:
        raise PackMismatch("relations live over different packs")


def compose(e: Relation, f: Relation) -> Relation:
    """E o F = {(x, z) : exists y with (x, y) in E and (y, z) in F}."""
    _same_pack(e, f)
    by_first: dict[int, list[int]] = {}
    for y, z in f.pairs:
        by_first.setdefault(y, []).append(z)
    out = set()
    for x, y in e.pairs:
        for z in by_first.get(y, ()):
            out.add((x, z))
    return Relation(e.pack, out)


def inverse(e: Relation) -> Relation:
    return e.inverse()


def diagonal(pack: DiscretePack, points: Iterable[int] | None = None) -> Relation:
    pts = pack.interior if points is None else points
    return Relation(pack, ((p, p) for p in pts))


def full_relation(pack: DiscretePack, points: Iterable[int] | None = None) -> Relation:
    """All ordered pairs; over the whole pack by default (boundary included)."""
    pts = list(pack.points if points is None else points)
    return Relation(pack, ((p, q) for p in pts for q in pts))


def ball(e: Relation, x: int) -> frozenset[int]:
    return e.ball(x)


def image(e: Relation, targets: Iterable[int]) -> frozenset[int]:
    return e.image(targets)


def map_relation(e: Relation, f: dict[int, int] | list[int], target: DiscretePack) -> Relation:
    """f x f (E) over the target pack, for a point map f."""
    fm = (lambda p: f[p]) if not callable(f) else f
    return Relation(target, ((fm(p), fm(q)) for p, q in e.pairs))


# -- verdicts -------------------------------------------------------------------


@dataclass(frozen=True)
class CurveVerdict:
    """A sampled modulus curve together with its decay-to-resolution verdict.

    ``floor_t`` is the rung whose value the verdict reads: the bottom rung
    for displacement curves, or the effective resolution floor (smallest
    rung whose conditioning set is nonempty) for mesh curves.  ACCEPT means
    the curve is nondecreasing and the floor value stays within tol * k_sup.
    """

    curve: ModulusCurve
    accept: bool
    floor_t: float | None
    floor_value: float
    threshold: float
    monotone: bool

    def to_dict(self) -> dict:
        return {
            "accept": self.accept,
            "floor_t": self.floor_t,
            "floor_value": self.floor_value,
            "threshold": self.threshold,
            "monotone": self.monotone,
            "curve": [[t, v] for t, v in self.curve.samples],
        }


def _scale_curve_verdict(
    ladder: ScaleLadder,
    cond: np.ndarray,
    size: np.ndarray,
    threshold: float,
    effective_floor: bool = False,
) -> CurveVerdict:
    """Curve value at rung t = max size over items with cond <= t.

    ``cond`` holds each item's activation scale, ``size`` its measured value.
    With ``effective_floor`` the verdict reads the curve at the smallest rung
    whose item set is nonempty (rungs below witness nothing); otherwise at
    the bottom rung.
    """
    order = np.argsort(cond, kind="stable")
    cond_sorted = cond[order]
    prefix = np.maximum.accumulate(size[order]) if len(order) else np.array([])
    samples = []
    floor_t = None
    floor_value = 0.0
    for t in ladder.radii:
        cnt = int(np.searchsorted(cond_sorted, t, side="right"))
        v = float(prefix[cnt - 1]) if cnt > 0 else 0.0
        samples.append((float(t), v))
        if cnt > 0 or not effective_floor:
            floor_t = float(t)
            floor_value = v
    curve = ModulusCurve(tuple(samples))
    monotone = curve.is_nondecreasing(tol=1e-12)
    accept = monotone and floor_value <= threshold
    return CurveVerdict(curve, accept, floor_t, floor_value, threshold, monotone)


def c0_modulus(
    pack: DiscretePack,
    ladder: ScaleLadder,
    e: Relation,
    c0_tol: float = DEFAULT_LIMIT_TOL,
) -> CurveVerdict:
    """Displacement-near-boundary curve of a relation.

    Value at scale t is the largest d(p, q) over pairs whose nearer endpoint
    is within t of the boundary; ACCEPT iff the curve is nondecreasing and
    its value at the bottom rung is at most c0_tol * k_sup.  The ladder
    bottoms out below the sample, so interior-only relations always clear
    the floor; the verdict has teeth for relations touching the boundary,
    and the curve itself records the decay for the rest.
    """
    if e.pack is not pack:
        raise PackMismatch("relation belongs to a different pack")
    if not e.pairs:
        empty = ModulusCurve(tuple((float(t), 0.0) for t in ladder.radii))
        return CurveVerdict(empty, True, float(ladder.radii[-1]), 0.0, c0_tol * pack.k_sup, True)
    pairs = sorted(e.pairs)
    ps = np.array([p for p, _ in pairs])
    qs = np.array([q for _, q in pairs])
    bd = pack.boundary_dist
    cond = np.minimum(bd[ps], bd[qs])
    size = pack.dist[ps, qs]
    return _scale_curve_verdict(ladder, cond, size, c0_tol * pack.k_sup)


# -- lambda gauges and controlled relations -------------------------------------


@dataclass(frozen=True)
class LambdaSpec:
    """Increasing positive gauge lambda(t) used for diagonal neighborhoods."""

    values: ModulusCurve

    def __post_init__(self):
        if not self.values.is_nondecreasing():
            raise BadParams("lambda must be nondecreasing in t")
        if float(self.values.values.min()) <= 0:
            raise BadParams("lambda must be positive")

    @classmethod
    def identity(cls, ladder: ScaleLadder) -> "LambdaSpec":
        return cls(ModulusCurve(tuple((float(t), float(t)) for t in ladder.radii)))

    @classmethod
    def constant(cls, ladder: ScaleLadder, c: float) -> "LambdaSpec":
        return cls(ModulusCurve(tuple((float(t), float(c)) for t in ladder.radii)))

    def at(self, t: float) -> float:
        return self.values.value_at(t)

    def at_many(self, t: np.ndarray) -> np.ndarray:
        return self.values.value_at_many(t)


def diag_nbhd_from_lambda(pack: DiscretePack, lam: LambdaSpec) -> Relation:
    """{(p, q) interior : d(p, q) < lambda(min boundary distance)}; symmetric, contains the diagonal."""
    idx = np.array(sorted(pack.interior))
    bd = pack.boundary_dist[idx]
    gauge = lam.at_many(np.minimum(bd[:, None], bd[None, :]).ravel()).reshape(len(idx), len(idx))
    close = pack.dist[np.ix_(idx, idx)] < gauge
    ii, jj = np.nonzero(close)
    return Relation(pack, zip(idx[ii].tolist(), idx[jj].tolist()))


def controlled_phi(pack: DiscretePack, ladder: ScaleLadder, lam: LambdaSpec) -> ModulusCurve:
    """The modulus phi(t) = h(t) + lambda(t) + h(t + lambda(t)), h capped at k_sup."""
    h = h_profile(pack, ladder)
    samples = []
    for t in ladder.radii:
        lt = lam.at(t)
        samples.append((float(t), h.value_at(t) + lt + h.value_at(t + lt)))
    return ModulusCurve(tuple(samples))


def controlled_E(
    pack: DiscretePack,
    ladder: ScaleLadder,
    lam: LambdaSpec,
    lambda_tol: float = DEFAULT_LIMIT_TOL,
) -> Relation:
    """The controlled diagonal neighborhood built from the phi modulus.

    Requires the gauge to decay to the resolution floor (its smallest sample
    at most lambda_tol * k_sup); the result always passes the c0 verdict on
    generated packs with deep enough ladders.
    """
    if float(lam.values.values[-1]) > lambda_tol * pack.k_sup:
        raise LambdaNotDecaying(
            f"lambda bottoms out at {lam.values.values[-1]:.3g} > {lambda_tol * pack.k_sup:.3g}"
        )
    phi = controlled_phi(pack, ladder, lam)
    return diag_nbhd_from_lambda(pack, LambdaSpec(phi))


# -- covers from relations --------------------------------------------------------


def ball_cover(e: Relation):
    """The cover K(E) = {E_x : x interior}; needs the diagonal for covering."""
    from .covers import Cover

    pack = e.pack
    members = []
    union: set[int] = set()
    for x in sorted(pack.interior):
        b = e.ball(x)
        if not b:
            raise NotCovering(f"point {x} has an empty ball")
        members.append(b)
        union |= b
    if not pack.interior <= union:
        raise NotCovering("balls do not cover the interior")
    return Cover.make(pack, members, target="interior")


def shrink_cover(e: Relation, alpha):
    """Shrink a cover along a symmetric diagonal neighborhood.

    V_U = {x : E_x inside U}; the result covers, refines alpha, and its
    multiplicity along E is at most mult(alpha).
    """
    from .covers import Cover

    pack = e.pack
    if alpha.pack is not pack:
        raise PackMismatch("cover belongs to a different pack")
    if not e.is_symmetric():
        raise NotSymmetric("shrink needs a symmetric relation")
    if not e.contains_diagonal():
        raise MissingDiagonal("shrink needs the diagonal")
    balls = {x: e.ball(x) for x in sorted(pack.interior)}
    for x, b in balls.items():
        if not any(b <= u for u in alpha.members):
            raise KEBallsNotRefining(f"ball of {x} embeds in no member")
    members = []
    for u in alpha.members:
        v_u = frozenset(x for x, b in balls.items() if b <= u)
        if v_u:
            members.append(v_u)
    return Cover.make(pack, members, target="interior")


def relation_to_json(e: Relation) -> str:
    import json

    return json.dumps(e.to_json_list())


def relation_from_json(pack: DiscretePack, text: str) -> Relation:
    import json

    return Relation(pack, (tuple(pq) for pq in json.loads(text)))
