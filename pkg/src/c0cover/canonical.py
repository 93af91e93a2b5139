"""Canonical covers of minimal multiplicity.

The pipeline extends a sequence of boundary covers into the ambient pack with
the Ext map v, slices the extensions along the annuli of a scale ladder, and
picks ladder rungs recursively so the result refines a prescribed uniform
family.  With boundary-cover sequences of pairwise common multiplicity at
most dim X + 2 the output cover achieves that multiplicity bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .covers import (
    Cover,
    RefinementWitness,
    common_multiplicity,
    lebesgue_number,
    mesh,
    multiplicity,
    mult_witness,
    refines,
    singleton_cover,
    star,
    uniformity_verdict,
)
from .errors import (
    BadParams,
    BetaDoesNotCoverBoundary,
    C0Rejected,
    LadderExhausted,
    MissingDiagonal,
    NotBoundarySubset,
    NotCovering,
    NotSymmetric,
    ProviderMismatch,
    UniformityRejected,
)
from .packs import DiscretePack, ScaleLadder, annulus, default_ladder
from .relations import DEFAULT_LIMIT_TOL, Relation, c0_modulus, compose, image


# -- the Ext map -----------------------------------------------------------------


def ext(pack: DiscretePack, u: frozenset | set) -> frozenset[int]:
    """v(U) = {p : d(p, U) < d(p, X \\ U)} with d(., empty) = +inf.

    Extends boundary-open sets into the whole pack: v(U) meets X exactly in U,
    is monotone, and turns finite intersections into intersections.  Points
    tied between U and its boundary complement belong to no v(U).
    """
    u = frozenset(u)
    if not u <= pack.boundary:
        raise NotBoundarySubset("ext wants a subset of the boundary")
    if not u:
        return frozenset()
    comp = sorted(pack.boundary - u)
    uidx = sorted(u)
    du = pack.dist[:, uidx].min(axis=1)
    dc = pack.dist[:, comp].min(axis=1) if comp else np.full(pack.n_points, np.inf)
    return frozenset(np.flatnonzero(du < dc).tolist())


def ext_family(pack: DiscretePack, family) -> tuple[frozenset, ...]:
    members = family.members if isinstance(family, Cover) else family
    return tuple(ext(pack, u) for u in members)


# -- the scale-cover constructor ----------------------------------------------------


def build_alpha(
    pack: DiscretePack,
    ladder: ScaleLadder,
    betas: Sequence,
) -> Cover:
    """Slices the beta families along the ladder annuli.

    Members are U intersected with annulus n, for U in betas[n]; empties are
    dropped.  betas[0] must cover everything and every beta family must cover
    the boundary.  The result is a family over the interior; it covers and is
    uniform when the betas' meshes near the boundary decay jointly.
    """
    n_ann = len(ladder) - 2
    if _beta_len(betas) < n_ann:
        raise LadderExhausted(f"need {n_ann} beta families, have {_beta_len(betas)}")
    all_pts = frozenset(pack.points)
    b0_union = frozenset().union(*betas[0]) if len(betas[0]) else frozenset()
    if b0_union != all_pts:
        raise BadParams("betas[0] must be the whole-space family")
    members = []
    for n in range(n_ann):
        fam = betas[n]
        union = frozenset().union(*fam) if len(fam) else frozenset()
        if not pack.boundary <= union:
            raise BetaDoesNotCoverBoundary(n)
        ann = annulus(pack, ladder, n)
        if not ann:
            continue
        for u in fam:
            m = frozenset(u) & ann
            if m:
                members.append(m)
    return Cover.make(pack, members, target="interior", drop_empty=True)


def _beta_len(betas) -> int:
    try:
        return len(betas)
    except TypeError:
        return 1 << 30


def _annotated_build(pack, ladder, betas):
    """build_alpha plus (annulus index, member) bookkeeping for completion."""
    n_ann = len(ladder) - 2
    members, tags = [], []
    seen = set()
    for n in range(n_ann):
        ann = annulus(pack, ladder, n)
        if not ann:
            continue
        for u in betas[n]:
            m = frozenset(u) & ann
            if m and m not in seen:
                seen.add(m)
                members.append(m)
                tags.append(n)
    return members, tags


# -- the refinement subsequence recursion ---------------------------------------------


def _member_stats(pack: DiscretePack, members):
    bd = pack.boundary_dist
    maxdepth = np.array([max(bd[p] for p in m) for m in members])
    diams = np.array([pack.diam(m) for m in members])
    return maxdepth, diams


def subsequence_indices(
    pack: DiscretePack,
    ladder: ScaleLadder,
    betas: Sequence,
    gamma: Cover,
) -> tuple[int, ...]:
    """The rung subsequence n_0 = 0 < n_1 < ... from the refinement recursion.

    Step k: pick the first rung m whose closed neighborhood the k-th beta
    family covers; take the Lebesgue number L of that family plus the far
    complement; pick m' past which every gamma member inside W_n has diameter
    below L, and m'' past which the closed neighborhood clears the star of
    the previous tail.  n_k is the largest of these (and n_{k-1} + 1).  All
    three conditions are lower bounds, so each step additionally descends by
    a fixed geometric factor; that keeps the number of steps logarithmic in
    the depth whatever gamma looks like.  Stops one step after the rung
    above the sample floor.
    """
    ladder.validate_for(pack)
    bd = pack.boundary_dist
    all_pts = list(pack.points)
    radii = np.array(ladder.radii)
    m_top = len(ladder) - 1

    g_members = list(gamma.members)
    maxdepth, diams = _member_stats(pack, g_members)
    order = np.argsort(maxdepth, kind="stable")
    md_sorted = maxdepth[order]
    diam_prefix = np.maximum.accumulate(diams[order]) if len(order) else np.array([])

    def l_value(n: int) -> float:
        # largest diameter among gamma members inside W_n (maxdepth < r_n)
        cnt = int(np.searchsorted(md_sorted, radii[n], side="left"))
        return float(diam_prefix[cnt - 1]) if cnt else 0.0

    def first_rung_below(limit: float, start: int = 0) -> int | None:
        idx = np.nonzero(radii < limit)[0]
        idx = idx[idx >= start]
        return int(idx[0]) if idx.size else None

    indices = [0]
    k = 1
    while True:
        if k >= _beta_len(betas):
            raise LadderExhausted(f"beta sequence exhausted at step {k}")
        beta_k = betas[k]
        union_k = frozenset().union(*beta_k) if len(beta_k) else frozenset()
        outside = [p for p in all_pts if p not in union_k]
        lim = min((bd[p] for p in outside), default=np.inf)
        m = first_rung_below(lim)
        if m is None:
            raise LadderExhausted(f"no rung with closed neighborhood inside beta {k}")
        extra = frozenset(p for p in all_pts if bd[p] > radii[m])
        helper = list(beta_k) + [extra]
        big_l = lebesgue_number(pack, helper, all_pts, skip_uncovered=True)
        m_prime = None
        for n in range(m_top + 1):
            if l_value(n) < big_l:
                m_prime = n
                break
        if m_prime is None:
            raise LadderExhausted("no rung shrinks gamma below the Lebesgue number")
        prev = indices[-1]
        tail = star(gamma, frozenset(p for p in pack.interior if bd[p] >= radii[prev]))
        star_depth = min((bd[p] for p in tail), default=np.inf)
        m_dprime = first_rung_below(star_depth)
        if m_dprime is None:
            raise LadderExhausted("ladder cannot clear the star of the previous tail")
        n_k = max(prev + 1, m + 1, m_prime, m_dprime)
        # pace the descent geometrically: fast enough to terminate in
        # logarithmically many steps, gentle enough that the bottom annuli
        # span only a couple of sample levels
        paced = first_rung_below(radii[prev] / 1.5)
        if paced is not None:
            n_k = max(n_k, paced)
        if n_k > m_top:
            raise LadderExhausted(f"recursion wants rung {n_k} beyond the ladder")
        indices.append(n_k)
        if radii[prev] < pack.delta_res:
            break
        k += 1
    return tuple(indices)


def refine_subsequence(
    pack: DiscretePack,
    ladder: ScaleLadder,
    betas: Sequence,
    gamma: Cover,
    unif_tol: float = DEFAULT_LIMIT_TOL,
) -> tuple[tuple[int, ...], Cover, RefinementWitness]:
    """Run the recursion, build the sliced cover, and verify gamma refines it."""
    verdict = uniformity_verdict(pack, ladder, gamma, unif_tol)
    if not verdict.accept:
        raise UniformityRejected("gamma fails the uniformity verdict")
    indices = subsequence_indices(pack, ladder, betas, gamma)
    sub = ScaleLadder(tuple(ladder[i] for i in indices))
    alpha = build_alpha(pack, sub, betas)
    witness = refines(gamma, alpha)
    return indices, alpha, witness


# -- canonical cover refining a given family ------------------------------------------


class ExtBallBetas:
    """Lazy beta sequence: whole space, then Ext images of boundary ball covers.

    Family n uses balls of radius k_sup * 2^-n around a greedy boundary net.
    """

    def __init__(self, pack: DiscretePack, length: int):
        self.pack = pack
        self.length = length
        self._cache: dict[int, tuple[frozenset, ...]] = {}

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, n: int) -> tuple[frozenset, ...]:
        if n < 0 or n >= self.length:
            raise IndexError(n)
        if n not in self._cache:
            if n == 0:
                fam: tuple[frozenset, ...] = (frozenset(self.pack.points),)
            else:
                rho = self.pack.k_sup * 4.0 ** (-n)
                fam = tuple(
                    ext(self.pack, b) for b in boundary_ball_cover(self.pack, rho).members
                )
            self._cache[n] = fam
        return self._cache[n]


def boundary_ball_cover(pack: DiscretePack, rho: float) -> Cover:
    """Cover of X by metric balls of radius rho around a greedy net."""
    bidx = sorted(pack.boundary)
    centers = []
    for x in bidx:
        if all(pack.d(x, c) >= rho for c in centers):
            centers.append(x)
    members = [frozenset(y for y in bidx if pack.d(y, c) < rho) for c in centers]
    return Cover.make(pack, members, target="boundary").require_cover()


def beta_length_for(pack: DiscretePack) -> int:
    n_levels = len(np.unique(pack.boundary_dist[pack.boundary_dist > 0]))
    paced = math.ceil(math.log(pack.k_sup / pack.delta_res) / math.log(1.4))
    return max(24, 8 + paced, n_levels + 8)


def canonical_refining(
    pack: DiscretePack,
    gamma: Cover,
    ladder: ScaleLadder | None = None,
    unif_tol: float = DEFAULT_LIMIT_TOL,
) -> Cover:
    """A canonical cover refined by gamma: default ladder, Ext-ball betas,
    and the subsequence recursion against gamma plus all singletons."""
    ladder = ladder or default_ladder(pack)
    verdict = uniformity_verdict(pack, ladder, gamma, unif_tol)
    if not verdict.accept:
        raise UniformityRejected("gamma fails the uniformity verdict")
    gamma_aug = gamma.union_with(singleton_cover(pack))
    betas = ExtBallBetas(pack, beta_length_for(pack))
    _, alpha, _ = refine_subsequence(pack, ladder, betas, gamma_aug, unif_tol)
    refines(gamma, alpha)
    return alpha.require_cover()


# -- star expansion --------------------------------------------------------------------


def star_expand_members(e: Relation, beta, gamma) -> list[frozenset]:
    """The raw members {E(star(beta, U)) : U in gamma}."""
    g_members = gamma.members if isinstance(gamma, Cover) else gamma
    return [image(e, star(beta, u)) for u in g_members]


def star_expand(
    e: Relation,
    beta: Cover,
    gamma: Cover,
    ladder: ScaleLadder | None = None,
    tol: float = DEFAULT_LIMIT_TOL,
) -> Cover:
    """The cover {E(star(beta, U)) : U in gamma}; beta refines the output and
    its multiplicity along E obeys the composed-relation chain bound."""
    pack = e.pack
    ladder = ladder or default_ladder(pack)
    if not e.is_symmetric():
        raise NotSymmetric("star expansion wants a symmetric relation")
    if not e.contains_diagonal():
        raise MissingDiagonal("star expansion wants a diagonal neighborhood")
    if not c0_modulus(pack, ladder, e, tol).accept:
        raise C0Rejected("relation fails the displacement verdict")
    for name, fam in (("beta", beta), ("gamma", gamma)):
        if not uniformity_verdict(pack, ladder, fam, tol).accept:
            raise UniformityRejected(f"{name} fails the uniformity verdict")
    return Cover.make(pack, star_expand_members(e, beta, gamma), target="interior", drop_empty=True)


# -- providers of boundary cover sequences ----------------------------------------------


@dataclass(frozen=True)
class CoverSequence:
    """Boundary covers alpha_0 = {X}, alpha_1, ... with shrinking mesh and a
    pairwise common-multiplicity bound."""

    covers: tuple[Cover, ...]
    mesh_targets: tuple[float, ...]
    common_mult_bound: int

    def validate(self, pack: DiscretePack) -> "CoverSequence":
        if not self.covers:
            raise BadParams("empty cover sequence")
        if set(self.covers[0].members) != {pack.boundary}:
            raise BadParams("covers[0] must be the one-member family {X}")
        for i, c in enumerate(self.covers):
            c.require_cover()
            if i and mesh(pack, c) > self.mesh_targets[i]:
                raise BadParams(f"cover {i} exceeds its mesh target")
        for i in range(len(self.covers) - 1):
            cm = common_multiplicity(self.covers[i], self.covers[i + 1])
            if cm > self.common_mult_bound:
                raise BadParams(
                    f"common multiplicity {cm} of covers {i},{i + 1} exceeds {self.common_mult_bound}"
                )
        return self

    def max_consecutive_common_mult(self, upto: int | None = None) -> int:
        end = len(self.covers) - 1 if upto is None else min(upto, len(self.covers) - 1)
        return max(
            (common_multiplicity(self.covers[i], self.covers[i + 1]) for i in range(end)),
            default=0,
        )


@dataclass(frozen=True)
class Provider:
    """Emits a CoverSequence for a boundary sample and a mesh schedule."""

    tag: str
    known_dim: int
    build: Callable[[DiscretePack, tuple[float, ...]], CoverSequence] = field(compare=False)


def _greedy_blocks(pack: DiscretePack, eps: float) -> list[frozenset]:
    """First-fit partition of the boundary into blocks of diameter <= eps."""
    blocks: list[list[int]] = []
    for x in sorted(pack.boundary):
        for b in blocks:
            if all(pack.d(x, y) <= eps for y in b):
                b.append(x)
                break
        else:
            blocks.append([x])
    return [frozenset(b) for b in blocks]


def _build_dim0(pack: DiscretePack, targets: tuple[float, ...]) -> CoverSequence:
    covers = [Cover.make(pack, [pack.boundary], target="boundary")]
    for eps in targets[1:]:
        covers.append(Cover.make(pack, _greedy_blocks(pack, eps), target="boundary"))
    return CoverSequence(tuple(covers), targets, 2).validate(pack)


def _boundary_line(pack: DiscretePack):
    """(positions, span, circular) of a 1-dimensional boundary sample."""
    if pack.kind == "interval_cylinder":
        coords = pack.coords
        pos = {p: float(coords[p][0]) for p in sorted(pack.boundary)}
        span = max(pos.values()) - min(pos.values())
        return pos, span, False
    if pack.kind == "circle_in_disk":
        coords = pack.coords
        pos = {
            p: float(math.atan2(coords[p][1], coords[p][0]) % (2 * math.pi))
            for p in sorted(pack.boundary)
        }
        return pos, 2 * math.pi, True
    raise ProviderMismatch(f"no 1-dimensional coordinates for kind {pack.kind!r}")


def _arc_cover(
    positions: dict[int, float],
    span: float,
    circular: bool,
    length: float,
    offset: float,
) -> list[frozenset]:
    """Closed arcs of the given length stepping by 7/8 of it (1/8 overlaps)."""
    pts = sorted(positions)
    pos = np.array([positions[p] for p in pts])
    order = np.argsort(pos, kind="stable")
    sorted_pos = pos[order]
    min_gap = float(np.diff(sorted_pos).min(initial=np.inf))
    if length < min_gap:  # arcs hold at most one point: the trace is the singletons
        return [frozenset([p]) for p in pts]
    step = 0.875 * length
    members = []
    if circular:
        m = max(3, math.ceil(span / step))
        step = span / m
        length = step / 0.875
        rel = sorted_pos  # angles in [0, span)
        for j in range(m):
            a = (offset + j * step) % span
            shifted = (rel - a) % span
            sel = frozenset(pts[order[i]] for i in np.flatnonzero(shifted <= length))
            if sel:
                members.append(sel)
        return members
    lo, hi = float(sorted_pos[0]), float(sorted_pos[-1])
    j0 = math.floor((lo - offset - length) / step)
    j1 = math.ceil((hi - offset) / step)
    for j in range(j0, j1 + 1):
        a = offset + j * step
        i0 = int(np.searchsorted(sorted_pos, a, side="left"))
        i1 = int(np.searchsorted(sorted_pos, a + length, side="right"))
        if i1 > i0:
            members.append(frozenset(pts[order[i]] for i in range(i0, i1)))
    return members


def _build_dim1(pack: DiscretePack, targets: tuple[float, ...]) -> CoverSequence:
    positions, span, circular = _boundary_line(pack)
    covers = [Cover.make(pack, [pack.boundary], target="boundary")]
    offset = 0.0
    for i, eps in enumerate(targets[1:], start=1):
        length = min(eps, span if circular else span)
        members = _arc_cover(positions, span, circular, length, offset)
        cov = Cover.make(pack, members, target="boundary").require_cover()
        covers.append(cov)
        offset = (offset + length / 4.0) % span
    return CoverSequence(tuple(covers), targets, 3).validate(pack)


def finite_dim0_provider() -> Provider:
    return Provider("finite_dim0", 0, _build_dim0)


def interval_dim1_provider() -> Provider:
    return Provider("interval_dim1", 1, _build_dim1)


def plugin_provider(tag: str, known_dim: int, build) -> Provider:
    return Provider(tag, known_dim, build)


def provider_for(pack: DiscretePack) -> Provider:
    if pack.known_dim == 0:
        return finite_dim0_provider()
    if pack.known_dim == 1:
        return interval_dim1_provider()
    raise ProviderMismatch(f"no shipped provider for dimension {pack.known_dim!r}")


def default_mesh_targets(pack: DiscretePack, length: int | None = None) -> tuple[float, ...]:
    length = length or beta_length_for(pack)
    return (float("inf"),) + tuple(pack.k_sup * 2.0 ** (-i) for i in range(1, length))


# -- the minimal-multiplicity pipeline ------------------------------------------------------


@dataclass(frozen=True)
class PipelineReport:
    pack_kind: str | None
    known_dim: int | None
    ladder_rungs: int
    subsequence: tuple[int, ...]
    multiplicity: int
    witness_point: int | None
    bound_dim_plus_2: int | None
    naive_bound_2dim_plus_2: int | None
    max_common_mult: int
    witness_ok: bool
    orphans_completed: int
    uniformity: dict

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["subsequence"] = list(self.subsequence)
        return d


class _ExtSeq:
    """Ext images of a cover sequence, computed on demand."""

    def __init__(self, pack: DiscretePack, seq: CoverSequence):
        self.pack = pack
        self.seq = seq
        self._cache: dict[int, tuple[frozenset, ...]] = {}

    def __len__(self):
        return len(self.seq.covers)

    def __getitem__(self, n: int):
        if n not in self._cache:
            self._cache[n] = ext_family(self.pack, self.seq.covers[n])
        return self._cache[n]


def minimal_canonical(
    pack: DiscretePack,
    gamma: Cover,
    provider: Provider | None = None,
    ladder: ScaleLadder | None = None,
    unif_tol: float = DEFAULT_LIMIT_TOL,
) -> tuple[Cover, PipelineReport]:
    """Canonical cover refined by gamma with multiplicity at most known_dim + 2.

    Provider covers of the boundary go through Ext, the subsequence recursion
    runs against gamma plus all singletons, and interior points orphaned by
    Ext ties are assigned to the first member of the deepest annulus holding
    them.
    """
    provider = provider or provider_for(pack)
    if pack.known_dim is None or provider.known_dim != pack.known_dim:
        raise ProviderMismatch(
            f"provider {provider.tag!r} (dim {provider.known_dim}) does not match pack dim {pack.known_dim!r}"
        )
    ladder = ladder or default_ladder(pack)
    if not uniformity_verdict(pack, ladder, gamma, unif_tol).accept:
        raise UniformityRejected("gamma fails the uniformity verdict")

    targets = default_mesh_targets(pack)
    seq = provider.build(pack, targets).validate(pack)
    # Fast-forward the beta meshes past the uniformity threshold: the deepest
    # annuli inherit the first used family's mesh, so it must already be fine.
    # Consecutive pairs of the used sequence (including {X} against the first
    # fine cover, whose common multiplicity is 1 + its multiplicity) keep the
    # common-multiplicity bound.
    skip = next(
        (i for i in range(1, len(seq.covers)) if targets[i] <= 0.8 * unif_tol * pack.k_sup),
        1,
    )
    seq_used = CoverSequence(
        (seq.covers[0],) + seq.covers[skip:],
        (targets[0],) + targets[skip:],
        seq.common_mult_bound,
    ).validate(pack)
    betas = _ExtSeq(pack, seq_used)
    gamma_aug = gamma.union_with(singleton_cover(pack))
    indices = subsequence_indices(pack, ladder, betas, gamma_aug)
    sub = ScaleLadder(tuple(ladder[i] for i in indices))
    members, ann_tags = _annotated_build(pack, sub, betas)
    seq = seq_used

    orphans = sorted(pack.interior - frozenset().union(*members)) if members else sorted(pack.interior)
    for p in orphans:
        depth = pack.boundary_dist[p]
        home = None
        for n in range(len(sub) - 3, -1, -1):  # deepest annulus first
            if sub[n + 2] < depth < sub[n]:
                cands = [i for i, t in enumerate(ann_tags) if t == n]
                if cands:
                    home = cands[0]
                    break
        if home is None:
            raise NotCovering(f"orphan {p} fits no annulus member")
        members[home] = members[home] | {p}

    alpha = Cover.make(pack, members, target="interior").require_cover()
    witness = refines(gamma, alpha)
    verdict = uniformity_verdict(pack, ladder, alpha, unif_tol)
    mult, witness_pt = mult_witness(alpha)
    report = PipelineReport(
        pack_kind=pack.kind,
        known_dim=pack.known_dim,
        ladder_rungs=len(ladder),
        subsequence=indices,
        multiplicity=mult,
        witness_point=witness_pt,
        bound_dim_plus_2=pack.known_dim + 2,
        naive_bound_2dim_plus_2=2 * pack.known_dim + 2,
        max_common_mult=seq.max_consecutive_common_mult(upto=len(indices)),
        witness_ok=witness.verify(),
        orphans_completed=len(orphans),
        uniformity=verdict.to_dict(),
    )
    return alpha, report
