"""Product-space constructions: the coarse equivalence between a pack's
interior and the cylinder over its boundary, cover pullbacks along
embeddings, the cover-doubling trick, slab extraction, and the
multiplicity lower bound on cylindrical packs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .covers import (
    Cover,
    mult_witness,
    multiplicity,
    star,
    uniformity_verdict,
)
from .errors import (
    BadDeltas,
    BadParams,
    BoundaryInput,
    EmptyOuterSet,
    NonCylindricalPack,
    NotACover,
    PackMismatch,
    SlabTooThin,
    StraddlerPrecondition,
    UniformityRejected,
)
from .packs import (
    CylinderPack,
    DiscretePack,
    ScaleLadder,
    default_ladder,
    h_profile,
    _finish_pack,
)
from .relations import DEFAULT_LIMIT_TOL, CurveVerdict, Relation, c0_modulus


# -- the maps f and g ------------------------------------------------------------


def f_map(pack: DiscretePack, p: int) -> tuple[int, float]:
    """(nearest boundary point, boundary distance); lowest id breaks ties."""
    if p in pack.boundary:
        raise BoundaryInput(f"{p} lies on the boundary")
    t = float(pack.boundary_dist[p])
    bidx = sorted(pack.boundary)
    d = pack.dist[p, bidx]
    z = bidx[int(np.argmin(d))]
    return z, t


def g_map(pack: DiscretePack, z: int, t: float) -> int:
    """Point of {d(., X) >= t} nearest to the boundary point z; lowest id ties."""
    if z not in pack.boundary:
        raise BadParams(f"{z} is not a boundary point")
    if t <= 0:
        raise BadParams("level must be positive")
    outer = np.flatnonzero(pack.boundary_dist >= t)
    if outer.size == 0:
        raise EmptyOuterSet(f"no point at boundary distance >= {t}")
    d = pack.dist[outer, z]
    return int(outer[int(np.argmin(d))])


def fg_displacement(pack: DiscretePack, z: int, t: float) -> float:
    """Cylinder distance between (z, t) and f(g(z, t))."""
    y = g_map(pack, z, t)
    z2, t2 = f_map(pack, y)
    return float(pack.d(z, z2) + abs(t - t2))


def cylinder_over_boundary(pack: DiscretePack, levels: Sequence[float]) -> CylinderPack:
    """The exact sum-metric cylinder over the pack's boundary at the given levels."""
    levels = sorted({float(t) for t in levels if t > 0}, reverse=True)
    if not levels:
        raise BadParams("need at least one positive level")
    bidx = sorted(pack.boundary)
    base = pack.dist[np.ix_(bidx, bidx)]
    nb = len(bidx)
    base_of = list(range(nb))
    level_of = [0.0] * nb
    for t in levels:
        base_of.extend(range(nb))
        level_of.extend([t] * nb)
    bo = np.array(base_of)
    lv = np.array(level_of)
    dist = base[np.ix_(bo, bo)] + np.abs(lv[:, None] - lv[None, :])
    cyl = CylinderPack(
        dist=dist,
        boundary=frozenset(range(nb)),
        k_sup=float(max(levels)),
        delta_res=float(min(levels)),
        delta_dense=float(min(levels)),
        meta={"kind": "induced_cylinder", "levels": levels, "source_boundary": bidx},
        base_of=tuple(int(b) for b in base_of),
        level_of=tuple(float(t) for t in level_of),
    )
    return _finish_pack(cyl)


def fxf_image(pack: DiscretePack, e: Relation) -> tuple[CylinderPack, Relation]:
    """Transport a relation through f into the cylinder over the boundary.

    Returns the induced cylinder (levels are the attained boundary distances)
    and the relation {(f(p), f(q))}.
    """
    if e.pack is not pack:
        raise PackMismatch("relation belongs to a different pack")
    interior = sorted(pack.interior)
    fmap = {p: f_map(pack, p) for p in interior}
    levels = sorted({t for _, t in fmap.values()}, reverse=True)
    cyl = cylinder_over_boundary(pack, levels)
    b_index = {b: i for i, b in enumerate(cyl.meta["source_boundary"])}
    point_of = {p: cyl.point_at(b_index[z], t) for p, (z, t) in fmap.items()}
    pairs = set()
    for p, q in e.pairs:
        if p in point_of and q in point_of:
            pairs.add((point_of[p], point_of[q]))
    return cyl, Relation(cyl, pairs)


def fxf_modulus(
    pack: DiscretePack,
    e: Relation,
    c0_tol: float = DEFAULT_LIMIT_TOL,
) -> CurveVerdict:
    """c0 verdict of the f x f image on the induced cylinder."""
    cyl, fe = fxf_image(pack, e)
    return c0_modulus(cyl, default_ladder(cyl), fe, c0_tol)


def image_density_gap(pack: DiscretePack) -> float:
    """Worst ratio of (distance from a cylinder slot to the f-image) to 3 h(level).

    Coarse density surrogate: at most 1 when every slot (z, t) of the induced
    cylinder lies within 3 h(t) of some f(p).
    """
    interior = sorted(pack.interior)
    fmap = [f_map(pack, p) for p in interior]
    levels = sorted({t for _, t in fmap}, reverse=True)
    cyl = cylinder_over_boundary(pack, levels)
    h = h_profile(pack, default_ladder(pack))
    b_index = {b: i for i, b in enumerate(cyl.meta["source_boundary"])}
    img = np.array(sorted({cyl.point_at(b_index[z], t) for z, t in fmap}))
    worst = 0.0
    for slot in cyl.points:
        t = cyl.level_of[slot]
        if t == 0.0:
            continue
        gap = float(cyl.dist[slot, img].min())
        bound = 3.0 * h.value_at(t)
        worst = max(worst, gap / bound if bound > 0 else math.inf)
    return worst


# -- embeddings and pullbacks -------------------------------------------------------


@dataclass(frozen=True)
class Embedding:
    """Injective point map of a cylinder pack into a host pack, base fixed."""

    source: DiscretePack
    host: DiscretePack
    mapping: tuple[int, ...]

    def __post_init__(self):
        if len(self.mapping) != self.source.n_points:
            raise BadParams("mapping must cover every source point")
        if len(set(self.mapping)) != len(self.mapping):
            raise BadParams("embedding must be injective")
        for b in self.source.boundary:
            if self.mapping[b] not in self.host.boundary:
                raise BadParams("boundary must land on the host boundary")

    @property
    def distortion(self) -> float:
        mp = np.array(self.mapping)
        return float(np.abs(self.source.dist - self.host.dist[np.ix_(mp, mp)]).max())

    def preimage(self, pts: Iterable[int]) -> frozenset[int]:
        s = frozenset(pts)
        return frozenset(a for a, b in enumerate(self.mapping) if b in s)


def identity_embedding(pack: DiscretePack) -> Embedding:
    return Embedding(pack, pack, tuple(pack.points))


def collar_embedding(host: DiscretePack) -> Embedding:
    """Exact cylinder over the host boundary embedded onto the host's collar rings.

    Works for ring-structured hosts (circle_in_disk): host point order is
    boundary first, then one ring per level.
    """
    levels = host.meta.get("levels")
    if not levels:
        raise NonCylindricalPack("host carries no collar rings")
    source = cylinder_over_boundary(host, levels)
    if source.n_points != host.n_points:
        raise NonCylindricalPack("host is not a full ring family")
    return Embedding(source, host, tuple(range(host.n_points)))


def induced_pack(embedding: Embedding) -> DiscretePack:
    """Source points with the host metric pulled back through the embedding."""
    mp = np.array(embedding.mapping)
    dist = embedding.host.dist[np.ix_(mp, mp)]
    src = embedding.source
    bidx = sorted(src.boundary)
    iidx = sorted(src.interior)
    bdist = dist[np.ix_(iidx, bidx)].min(axis=1)
    pack = DiscretePack(
        dist=dist.copy(),
        boundary=src.boundary,
        k_sup=float(bdist.max()),
        delta_res=float(bdist.min()),
        delta_dense=float(dist[np.ix_(bidx, iidx)].min(axis=1).max()),
        meta={"kind": "induced", "cylindrical": src.cylindrical},
    )
    return _finish_pack(pack)


def pullback_cover(embedding: Embedding, alpha: Cover) -> Cover:
    """{j^{-1}(U)} with empties dropped; never increases multiplicity."""
    if alpha.pack is not embedding.host:
        raise PackMismatch("cover lives on a different host")
    members = [embedding.preimage(u) for u in alpha.members]
    return Cover.make(embedding.source, members, target="interior", drop_empty=True)


# -- grid covers of X x [0,1] ----------------------------------------------------------


@dataclass(frozen=True)
class GridCover:
    """Cover of a finite grid base x levels; levels are exact ascending fractions."""

    n_base: int
    levels: tuple[Fraction, ...]
    members: tuple[frozenset, ...]  # frozensets of (base, level index)

    def __post_init__(self):
        if list(self.levels) != sorted(set(self.levels)):
            raise BadParams("levels must be strictly ascending")

    @property
    def points(self) -> set:
        out = set()
        for m in self.members:
            out |= m
        return out

    def level_projection_mesh(self) -> Fraction:
        best = Fraction(0)
        for m in self.members:
            ts = [self.levels[i] for _, i in m]
            best = max(best, max(ts) - min(ts))
        return best

    def end_separated(self) -> bool:
        lo, hi = 0, len(self.levels) - 1
        return not any(
            any(i == lo for _, i in m) and any(i == hi for _, i in m) for m in self.members
        )

    def covers_grid(self) -> bool:
        want = {(b, i) for b in range(self.n_base) for i in range(len(self.levels))}
        return self.points == want


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x)) if isinstance(x, str) else Fraction(x).limit_denominator(1 << 62)


def grid_cover(n_base: int, levels: Sequence, members: Iterable[Iterable[tuple[int, int]]]) -> GridCover:
    lv = tuple(sorted({_to_fraction(t) for t in levels}))
    mem = tuple(frozenset((int(b), int(i)) for b, i in m) for m in members)
    for m in mem:
        for b, i in m:
            if not (0 <= b < n_base and 0 <= i < len(lv)):
                raise BadParams(f"grid point ({b},{i}) out of range")
    return GridCover(n_base, lv, mem)


def double_cover(gc: GridCover, k: int) -> GridCover:
    """Repeat a cover of X x [0,1] k times, alternating with its reflection.

    Forward copies go on [2j, 2j+1], reflected copies on [2j+1, 2j+2];
    members touching interior integer slices merge with their mirror images;
    everything rescales by 1/(2k).  Multiplicity is preserved exactly and no
    output member meets both ends.  Level spans shrink by 2k for plain
    copies and by k for merged pairs, so the projection mesh drops by at
    least k.
    """
    if k < 1:
        raise BadParams("k must be at least 1")
    lv = gc.levels
    lo, hi = lv[0], lv[-1]
    if hi == lo:
        raise BadParams("degenerate level range")
    unit = [(t - lo) / (hi - lo) for t in lv]  # normalized to [0,1]
    top = len(lv) - 1
    for m in gc.members:
        if any(i == 0 for _, i in m) and any(i == top for _, i in m):
            raise StraddlerPrecondition("a member meets both end slices")

    def fwd(m, j):  # translate by 2j
        return frozenset((b, unit[i] + 2 * j) for b, i in m)

    def refl(m, j):  # reflect then translate by 2j + 1
        return frozenset((b, (1 - unit[i]) + 2 * j + 1) for b, i in m)

    meets0 = lambda m: any(i == 0 for _, i in m)
    meets1 = lambda m: any(i == top for _, i in m)
    interior_slices = {Fraction(i) for i in range(1, 2 * k)}

    def clean(vm):
        return not any(t in interior_slices for _, t in vm)

    out = []
    for m in gc.members:
        for j in range(k):
            vm = fwd(m, j)
            if clean(vm):
                out.append(vm)
            vr = refl(m, j)
            if clean(vr):
                out.append(vr)
        if meets1(m):  # tent across each odd slice 2j + 1
            for j in range(k):
                out.append(fwd(m, j) | refl(m, j))
        if meets0(m):  # tent across each even slice 2j + 2
            for j in range(k - 1):
                out.append(refl(m, j) | fwd(m, j + 1))

    values = sorted({t for vm in out for _, t in vm})
    scale = Fraction(1, 2 * k)
    final_levels = [t * scale for t in values]
    index = {t: i for i, t in enumerate(values)}
    members = [frozenset((b, index[t]) for b, t in vm) for vm in out]
    return grid_cover(gc.n_base, final_levels, members)


# -- slab extraction --------------------------------------------------------------------


def choose_slab(
    pack: DiscretePack,
    ladder: ScaleLadder,
    alpha: Cover,
    eps: float,
) -> tuple[float, float]:
    """(delta1, delta2) from the uniformity curve and the star containment rule."""
    verdict = uniformity_verdict(pack, ladder, alpha)
    d1 = None
    for t, v in verdict.curve.samples:  # t descending
        if v < eps and t <= pack.k_sup:
            d1 = float(t)
            break
    if d1 is None:
        raise BadDeltas(f"no scale keeps boundary-side members below {eps}")
    levels = sorted({float(t) for t in pack.boundary_dist if t > 0})
    slice_levels = [t for t in levels if t <= d1]
    if not slice_levels:
        raise SlabTooThin("no sample level at or below delta1")
    top = slice_levels[-1]
    slice_pts = frozenset(p for p in pack.interior if abs(pack.boundary_dist[p] - top) < 1e-12)
    st = star(alpha, slice_pts)
    depth = min((float(pack.boundary_dist[p]) for p in st), default=top)
    # keep one level strictly below the star's reach inside the slab, so
    # members meeting the top slice stay clear of the bottom retained level
    below = [t for t in levels if t < depth]
    if not below:
        raise SlabTooThin("the star of the top slice reaches the deepest sample")
    d2 = (below[-2] + below[-1]) / 2.0 if len(below) >= 2 else below[-1] / 2.0
    if not d2 < d1:
        raise BadDeltas(f"degenerate slab [{d2}, {d1}]")
    return d1, d2


def slab_rescale(
    pack: DiscretePack,
    alpha: Cover,
    delta1: float,
    delta2: float,
) -> GridCover:
    """Restrict a cover to the slab delta2 <= level <= delta1 and rescale to [0,1].

    Levels map through t -> (delta1 - t)/(delta1 - delta2), so the shallow end
    becomes 0 and the deep end 1.  Multiplicity cannot grow and, when no
    member meets both retained extremes, the output is end separated.
    """
    if not (0 < delta2 < delta1):
        raise BadDeltas(f"need 0 < delta2 < delta1, got {delta2}, {delta1}")
    bd = pack.boundary_dist
    levels = sorted({float(t) for t in bd if delta2 <= t <= delta1})
    if not levels:
        raise SlabTooThin(f"no sample level inside [{delta2}, {delta1}]")
    top_level = levels[-1]
    slice_pts = frozenset(p for p in pack.interior if abs(bd[p] - top_level) < 1e-12)
    st = star(alpha, slice_pts)
    if any(bd[p] < delta2 for p in st):
        raise BadDeltas("the star of the top slice escapes below delta2")
    d1 = _to_fraction(delta1)
    d2 = _to_fraction(delta2)
    fr_levels = sorted({(d1 - _to_fraction(t)) / (d1 - d2) for t in levels})
    level_index = {t: i for i, t in enumerate(fr_levels)}

    bases = sorted(pack.boundary)
    base_index = {b: i for i, b in enumerate(bases)}
    bidx = sorted(pack.boundary)

    def to_grid(p: int) -> tuple[int, int] | None:
        t = float(bd[p])
        if not (delta2 <= t <= delta1):
            return None
        ft = (d1 - _to_fraction(t)) / (d1 - d2)
        d = pack.dist[p, bidx]
        z = bidx[int(np.argmin(d))]
        return base_index[z], level_index[ft]

    members = []
    for u in alpha.members:
        pts = [to_grid(p) for p in u]
        m = frozenset(pt for pt in pts if pt is not None)
        if m:
            members.append(m)
    if not members:
        raise SlabTooThin("no member survives the slab restriction")
    return grid_cover(len(bases), fr_levels, members)


# -- multiplicity lower bound ---------------------------------------------------------


@dataclass(frozen=True)
class LowerBoundResult:
    holds: bool
    mult: int
    bound: int
    witness_point: int | None
    mult_at_witness: int
    refutation: dict | None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def lower_bound_check(
    pack: DiscretePack,
    alpha: Cover,
    ladder: ScaleLadder | None = None,
    unif_tol: float = DEFAULT_LIMIT_TOL,
) -> LowerBoundResult:
    """Assert multiplicity >= known_dim + 2 on a cylindrical pack.

    Refuses non-cylindrical packs.  A refutation object signals a violation;
    it must never occur for accepted covers of generated cylindrical packs,
    and the test suite fails the build if it does.
    """
    if not pack.cylindrical or pack.known_dim is None:
        raise NonCylindricalPack(f"pack kind {pack.kind!r} carries no cylinder structure")
    if not alpha.covers_flag:
        raise NotACover("lower bound applies to covers of the interior")
    ladder = ladder or default_ladder(pack)
    if not uniformity_verdict(pack, ladder, alpha, unif_tol).accept:
        raise UniformityRejected("cover fails the uniformity verdict")
    bound = pack.known_dim + 2
    mult, witness = mult_witness(alpha)
    if mult >= bound:
        return LowerBoundResult(True, mult, bound, witness, mult, None)
    refutation = {
        "multiplicity": mult,
        "bound": bound,
        "members": [sorted(m) for m in alpha.members],
    }
    return LowerBoundResult(False, mult, bound, witness, mult, refutation)


# -- randomized uniform candidates -------------------------------------------------------


def _column_structure(pack: DiscretePack):
    """Assign every interior point a (base position index, level index)."""
    bidx = sorted(pack.boundary)
    levels = sorted({float(t) for t in pack.boundary_dist if t > 0}, reverse=True)
    lev_index = {t: i for i, t in enumerate(levels)}
    by_slot: dict[tuple[int, int], int] = {}
    for p in sorted(pack.interior):
        d = pack.dist[p, bidx]
        z = int(np.argmin(d))
        li = lev_index[min(levels, key=lambda t: abs(t - float(pack.boundary_dist[p])))]
        by_slot[(z, li)] = p
    return bidx, levels, by_slot


def random_uniform_candidates(
    pack: DiscretePack,
    rng: np.random.Generator,
    count: int,
    unif_tol: float = DEFAULT_LIMIT_TOL,
) -> list[Cover]:
    """Random covers discretizing open uniform covers of the cylinder.

    Overlapping level slabs (at least one shared level) carry overlapping
    base runs (at least one shared sample) wherever the run width allows,
    with sizes proportional to the slab's top level, so every candidate
    passes the uniformity verdict and witnesses its overlaps on sample
    points.  Deep slabs fall back to single columns (their base runs would
    be fatter than the verdict allows); the multiplicity witness lives in
    the shallow slabs.  Block partitions, which accept the verdict but
    discretize no open cover, are deliberately not produced.
    """
    if not pack.cylindrical or pack.known_dim not in (0, 1):
        raise NonCylindricalPack("candidate generator needs a cylindrical pack of dim 0 or 1")
    bidx, levels, by_slot = _column_structure(pack)
    nb = len(bidx)
    nl = len(levels)
    circular = pack.kind == "circle_in_disk"
    if pack.known_dim == 1:
        positions = _base_positions(pack, bidx)
        span = positions[-1] - positions[0] if not circular else 2 * math.pi
        gap = span / max(nb - 1, 1)
        if round(2 * levels[0] / gap) < 2:
            raise NonCylindricalPack("base sample too sparse to witness overlaps at the top scale")
    covers = []
    for _ in range(count):
        slabs = []
        a = 0
        while True:
            b = min(nl - 1, a + int(rng.integers(1, 4)))
            slabs.append((a, b))
            if b >= nl - 1:
                break
            overlap = int(rng.integers(1, min(3, b - a + 1) + 1))
            a = max(b - overlap + 1, a + 1)  # shares >= 1 level with the previous slab
        members = []
        for (a, b) in slabs:
            slab_levels = list(range(a, b + 1))
            if pack.known_dim == 0:
                for z in range(nb):
                    m = frozenset(
                        by_slot[(z, li)] for li in slab_levels if (z, li) in by_slot
                    )
                    if m:
                        members.append(m)
            else:
                top = levels[a]
                width = max(1, round(2 * top / gap))
                if width == 1:  # too deep for overlapping runs: single columns
                    runs = [[z] for z in range(nb)]
                else:
                    runs = _base_runs(nb, circular, width, rng)
                for run in runs:
                    m = frozenset(
                        by_slot[(z, li)]
                        for z in run
                        for li in slab_levels
                        if (z, li) in by_slot
                    )
                    if m:
                        members.append(m)
        cov = Cover.make(pack, members, target="interior", drop_empty=True).require_cover()
        covers.append(cov)
    return covers


def _base_positions(pack: DiscretePack, bidx) -> list[float]:
    coords = pack.coords
    if pack.kind == "circle_in_disk":
        return [math.atan2(coords[b][1], coords[b][0]) % (2 * math.pi) for b in bidx]
    return [float(coords[b][0]) for b in bidx]


def _base_runs(nb: int, circular: bool, width: int, rng) -> list[list[int]]:
    """Overlapping index runs covering 0..nb-1; consecutive runs share >= 1 index.

    Circular mode wraps and makes the final run overlap the first.
    """
    width = max(2, min(width, nb))
    runs = []
    start = int(rng.integers(0, nb)) if circular else 0
    pos = start
    while True:
        w = max(2, min(width + int(rng.integers(-1, 2)), nb))
        if circular:
            run = sorted({(pos + i) % nb for i in range(w)})
            runs.append(run)
            pos += w - 1  # share exactly one index with the next run
            if pos >= start + nb:  # wrapped past the first run: overlap closed
                break
        else:
            end = min(pos + w - 1, nb - 1)
            runs.append(list(range(pos, end + 1)))
            if end >= nb - 1:
                break
            pos = end  # the shared index
    return runs
