"""Cover calculus: multiplicities, mesh, stars, refinement witnesses,
Lebesgue numbers, uniformity verdicts, and the scale-dimension oracle."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadParams,
    EmptyMember,
    MemberOutsideTarget,
    NotACover,
    NotARefinement,
    PackMismatch,
)
from .packs import DiscretePack, ScaleLadder
from .relations import DEFAULT_LIMIT_TOL, CurveVerdict, Relation, _scale_curve_verdict

Family = Sequence[frozenset]


class Cover:
    """Finite family of nonempty point sets over one target set of a pack.

    Members are deduplicated, order preserved.  ``covers_flag`` records
    whether the union equals the target; families that deliberately miss the
    target are legal (refinement machinery needs them).
    """

    __slots__ = ("pack", "members", "target", "target_tag")

    def __init__(self, pack, members, target, target_tag):
        self.pack = pack
        self.members = members
        self.target = target
        self.target_tag = target_tag

    @classmethod
    def make(
        cls,
        pack: DiscretePack,
        members: Iterable[Iterable[int]],
        target: str | Iterable[int] = "interior",
        drop_empty: bool = False,
    ) -> "Cover":
        if target == "interior":
            tset, tag = pack.interior, "interior"
        elif target == "boundary":
            tset, tag = pack.boundary, "boundary"
        else:
            tset, tag = frozenset(int(p) for p in target), "custom"
        seen = set()
        out = []
        for m in members:
            fm = frozenset(int(p) for p in m)
            if not fm:
                if drop_empty:
                    continue
                raise EmptyMember("cover members must be nonempty")
            if not fm <= tset:
                raise MemberOutsideTarget(f"member {sorted(fm)[:6]}... leaves the target")
            if fm not in seen:
                seen.add(fm)
                out.append(fm)
        return cls(pack, tuple(out), tset, tag)

    def __eq__(self, other):
        return (
            isinstance(other, Cover)
            and other.pack is self.pack
            and set(other.members) == set(self.members)
            and other.target == self.target
        )

    def __hash__(self):
        return hash((id(self.pack), frozenset(self.members), self.target))

    def __len__(self):
        return len(self.members)

    def __repr__(self):
        return f"Cover(<{len(self.members)} members over {self.target_tag}>)"

    @property
    def union(self) -> frozenset[int]:
        out: set[int] = set()
        for m in self.members:
            out |= m
        return frozenset(out)

    @property
    def covers_flag(self) -> bool:
        return self.union == self.target

    @property
    def locally_finite(self) -> bool:
        """Vacuous on finite packs; recorded so the canonical predicate keeps
        the shape open + locally finite + uniform."""
        return True

    def require_cover(self) -> "Cover":
        if not self.covers_flag:
            raise NotACover(f"family of {len(self.members)} members misses the {self.target_tag} target")
        return self

    def restrict(self, pts: Iterable[int]) -> "Cover":
        pset = frozenset(pts)
        return Cover.make(
            self.pack, (m & pset for m in self.members), target=self.target & pset, drop_empty=True
        )

    def union_with(self, other: "Cover") -> "Cover":
        if other.pack is not self.pack:
            raise PackMismatch("covers over different packs")
        return Cover.make(self.pack, list(self.members) + list(other.members), target=self.target | other.target)

    def to_json_dict(self) -> dict:
        return {"members": [sorted(m) for m in self.members], "target": self.target_tag}


def singleton_cover(pack: DiscretePack, target: str = "interior") -> Cover:
    tset = pack.interior if target == "interior" else pack.boundary
    return Cover.make(pack, [{p} for p in sorted(tset)], target=target)


def whole_space_cover(pack: DiscretePack, target: str = "interior") -> Cover:
    tset = pack.interior if target == "interior" else pack.boundary
    return Cover.make(pack, [tset], target=target)


# -- multiplicities ---------------------------------------------------------------


def _members_of(alpha) -> tuple[frozenset, ...]:
    if isinstance(alpha, Cover):
        return alpha.members
    seen, out = set(), []
    for m in alpha:
        fm = frozenset(m)
        if fm and fm not in seen:
            seen.add(fm)
            out.append(fm)
    return tuple(out)


def mult_at(alpha, p: int) -> int:
    """Number of members containing p."""
    return sum(1 for m in _members_of(alpha) if p in m)


def mult_on(alpha, s: Iterable[int]) -> int:
    """Number of members meeting the set s."""
    fs = frozenset(s)
    return sum(1 for m in _members_of(alpha) if m & fs)


def multiplicity(alpha) -> int:
    """Largest number of members through one point."""
    members = _members_of(alpha)
    counts: dict[int, int] = {}
    for m in members:
        for p in m:
            counts[p] = counts.get(p, 0) + 1
    return max(counts.values(), default=0)


def mult_witness(alpha) -> tuple[int, int | None]:
    """(multiplicity, a point attaining it); lowest witnessing id."""
    members = _members_of(alpha)
    counts: dict[int, int] = {}
    for m in members:
        for p in m:
            counts[p] = counts.get(p, 0) + 1
    if not counts:
        return 0, None
    best = max(counts.values())
    return best, min(p for p, c in counts.items() if c == best)


def mult_along(alpha, e: Relation) -> int:
    """sup over x of the number of members meeting the ball E_x."""
    members = _members_of(alpha)
    best = 0
    for x in e.pack.points:
        b = e.ball(x)
        if b:
            best = max(best, sum(1 for m in members if m & b))
    return best


def common_multiplicity(*families) -> int:
    """max over points of the summed pointwise multiplicities of the families."""
    counts: dict[int, int] = {}
    for fam in families:
        for m in _members_of(fam):
            for p in m:
                counts[p] = counts.get(p, 0) + 1
    return max(counts.values(), default=0)


# -- mesh, star, diagonal ----------------------------------------------------------


def mesh(pack: DiscretePack, alpha) -> float:
    return max((pack.diam(m) for m in _members_of(alpha)), default=0.0)


def star(alpha, s: Iterable[int]) -> frozenset[int]:
    """alpha(S): union of the members meeting S."""
    fs = frozenset(s)
    out: set[int] = set()
    for m in _members_of(alpha):
        if m & fs:
            out |= m
    return frozenset(out)


def delta_of(alpha: Cover) -> Relation:
    """Delta(alpha) = union of U x U over members."""
    pairs = set()
    for m in alpha.members:
        for p in m:
            for q in m:
                pairs.add((p, q))
    return Relation(alpha.pack, pairs)


def image_family(e: Relation, alpha) -> tuple[frozenset, ...]:
    """E(alpha) = {E(U) : U in alpha}, deduplicated, empties dropped."""
    out = []
    for m in _members_of(alpha):
        im = e.image(m)
        if im:
            out.append(im)
    return _members_of(out)


def preimage_family(f: dict[int, int] | Sequence[int], alpha, n_source: int) -> tuple[frozenset, ...]:
    """f^{-1}(alpha) over source points 0..n_source-1."""
    fm = f.__getitem__
    out = []
    for m in _members_of(alpha):
        pre = frozenset(p for p in range(n_source) if fm(p) in m)
        if pre:
            out.append(pre)
    return _members_of(out)


# -- refinement ---------------------------------------------------------------------


@dataclass(frozen=True)
class RefinementWitness:
    """For each member V of the finer family, a coarser member containing it."""

    assignment: dict

    def verify(self) -> bool:
        return all(v <= u for v, u in self.assignment.items())


def refines(beta, alpha) -> RefinementWitness:
    """Witness that beta refines alpha; raises NotARefinement on the first failure."""
    a_members = _members_of(alpha)
    assignment = {}
    for v in _members_of(beta):
        for u in a_members:
            if v <= u:
                assignment[v] = u
                break
        else:
            raise NotARefinement(v)
    return RefinementWitness(assignment)


def is_refinement(beta, alpha) -> bool:
    try:
        return refines(beta, alpha).verify()
    except NotARefinement:
        return False


# -- Lebesgue number ------------------------------------------------------------------


def lebesgue_number(
    pack: DiscretePack,
    beta,
    target: Iterable[int],
    skip_uncovered: bool = False,
) -> float:
    """L = min over p of max over members U containing p of d(p, target \\ U).

    d(., empty) caps at the target diameter.  Every subset of the target with
    diameter < L embeds in some member.  With skip_uncovered the minimum runs
    over covered points only (used where ties may puncture a cover).
    """
    tgt = sorted(frozenset(target))
    members = [m & frozenset(tgt) for m in _members_of(beta)]
    members = [m for m in members if m]
    cap = pack.diam(tgt)
    best = np.inf
    tset = frozenset(tgt)
    for p in tgt:
        here = -np.inf
        for m in members:
            if p in m:
                rest = tset - m
                here = max(here, pack.set_dist(p, rest))
        if here == -np.inf:
            if skip_uncovered:
                continue
            raise NotACover(f"point {p} lies in no member")
        best = min(best, here)
    if best == np.inf:
        best = cap
    return float(min(best, cap))


# -- uniformity -----------------------------------------------------------------------


def uniformity_verdict(
    pack: DiscretePack,
    ladder: ScaleLadder,
    alpha,
    unif_tol: float = DEFAULT_LIMIT_TOL,
) -> CurveVerdict:
    """Mesh-near-boundary curve of a family over the interior.

    Value at scale t is the largest diameter among members meeting B(X, t);
    ACCEPT iff the curve is nondecreasing and decays to unif_tol * k_sup at
    the effective resolution floor (the smallest rung any member reaches).
    Properness is vacuous on finite packs.
    """
    members = _members_of(alpha)
    if not members:
        raise NotACover("empty family has no verdict")
    bd = pack.boundary_dist
    cond = np.array([min(bd[p] for p in m) for m in members])
    size = np.array([pack.diam(m) for m in members])
    return _scale_curve_verdict(ladder, cond, size, unif_tol * pack.k_sup, effective_floor=True)


def is_canonical(
    pack: DiscretePack,
    ladder: ScaleLadder,
    alpha: Cover,
    unif_tol: float = DEFAULT_LIMIT_TOL,
) -> bool:
    """Canonical = covers the interior and accepts the uniformity verdict
    (open-ness and local finiteness carry no discrete content)."""
    return (
        alpha.covers_flag
        and alpha.locally_finite
        and uniformity_verdict(pack, ladder, alpha, unif_tol).accept
    )


# -- scale dimension -------------------------------------------------------------------


@dataclass(frozen=True)
class DimAtScale:
    value: int
    exact: bool
    method: str

    @property
    def flag(self) -> str:
        return "EXACT" if self.exact else "UPPER_BOUND"


def dim_at_scale(pack: DiscretePack, eps: float) -> DimAtScale:
    """Scale-eps dimension surrogate of the boundary sample.

    For the 1-dimensional generated families the exact answer comes from
    interval/arc covering: consecutive-run covers whose hulls cover the
    underlying continuum must share sample points wherever hulls meet, so the
    minimum multiplicity is 2 unless one run of mesh <= eps suffices.  For
    finite (dimension-0) families block partitions give multiplicity 1.
    Anything else gets a greedy half-eps ball cover as a flagged upper bound.
    """
    if eps <= 0:
        raise BadParams("eps must be positive")
    bidx = sorted(pack.boundary)
    kind = pack.kind
    bdiam = pack.diam(bidx)
    if kind in ("finite_cylinder", "countable_example"):
        return DimAtScale(0, True, "block partition")
    if kind in ("interval_cylinder", "circle_in_disk"):
        return DimAtScale(0 if eps >= bdiam else 1, True, "interval/arc cover")
    # greedy ball cover upper bound
    centers = []
    covered: set[int] = set()
    for p in bidx:
        if p not in covered:
            centers.append(p)
            covered |= {q for q in bidx if pack.d(p, q) <= eps / 2}
    members = [frozenset(q for q in bidx if pack.d(c, q) <= eps / 2) for c in centers]
    return DimAtScale(max(multiplicity(members) - 1, 0), False, "greedy ball cover")


# -- file formats ------------------------------------------------------------------------


def cover_to_json(alpha: Cover) -> str:
    return json.dumps(alpha.to_json_dict(), sort_keys=True)


def cover_from_json(pack: DiscretePack, text: str) -> Cover:
    obj = json.loads(text)
    return Cover.make(pack, obj["members"], target=obj.get("target", "interior"))
