import numpy as np
import pytest

import c0cover as cc
from c0cover.canonical import (
    CoverSequence,
    ExtBallBetas,
    boundary_ball_cover,
    default_mesh_targets,
    ext_family,
)
from c0cover.errors import (
    BadParams,
    BetaDoesNotCoverBoundary,
    LadderExhausted,
    NotBoundarySubset,
    ProviderMismatch,
    UniformityRejected,
)


def test_ext_examples(line3):
    assert cc.ext(line3, {0}) == {0}  # the tied midpoint is excluded
    assert cc.ext(line3, {0, 2}) == frozenset(line3.points)
    assert cc.ext(line3, set()) == frozenset()
    with pytest.raises(NotBoundarySubset):
        cc.ext(line3, {1})


def test_ext_properties_exhaustive(line3):
    from c0cover.verify import check_ext_properties, random_pack

    rng = np.random.default_rng(5)
    small_cyl = cc.generate_pack("finite_cylinder", n_base=2, n_levels=4)
    rnd = random_pack(rng, 12, 5)
    results = check_ext_properties([line3, small_cyl, rnd], seed=5, n_random=50)
    assert all(r.failures == 0 for r in results)


def test_build_alpha_annuli_only(cyl_fixture, cyl_ladder):
    all_pts = frozenset(cyl_fixture.points)
    betas = [(all_pts,)] * 3
    alpha = cc.build_alpha(cyl_fixture, cyl_ladder, betas)
    got = set(alpha.members)
    want = {cc.annulus(cyl_fixture, cyl_ladder, n) for n in range(3)}
    assert got == want
    assert cc.multiplicity(alpha) == 2
    assert alpha.covers_flag


def test_build_alpha_beta_not_covering(cyl_fixture, cyl_ladder):
    all_pts = frozenset(cyl_fixture.points)
    betas = [(all_pts,), (frozenset(cyl_fixture.interior),), (all_pts,)]
    with pytest.raises(BetaDoesNotCoverBoundary):
        cc.build_alpha(cyl_fixture, cyl_ladder, betas)


def test_build_alpha_needs_enough_betas(cyl_fixture, cyl_ladder):
    all_pts = frozenset(cyl_fixture.points)
    with pytest.raises(LadderExhausted):
        cc.build_alpha(cyl_fixture, cyl_ladder, [(all_pts,)])


def test_build_alpha_interval_betas_bound(interval_pipeline):
    assert interval_pipeline["report"].multiplicity <= 3


def test_refine_subsequence_singletons(finite_pack):
    ladder = cc.default_ladder(finite_pack)
    betas = ExtBallBetas(finite_pack, 40)
    gamma = cc.singleton_cover(finite_pack)
    indices, alpha, witness = cc.refine_subsequence(finite_pack, ladder, betas, gamma)
    assert indices[0] == 0 and all(b > a for a, b in zip(indices, indices[1:]))
    assert witness.verify()
    assert alpha.covers_flag


def test_refine_subsequence_ball_cover(finite_pipeline):
    pack, ladder = finite_pipeline["pack"], finite_pipeline["ladder"]
    gamma = finite_pipeline["gamma"].union_with(cc.singleton_cover(pack))
    betas = ExtBallBetas(pack, 40)
    indices, alpha, witness = cc.refine_subsequence(pack, ladder, betas, gamma)
    assert witness.verify()
    for v, u in witness.assignment.items():
        assert v <= u


def test_refine_subsequence_ladder_exhausted(finite_pack):
    short = cc.ScaleLadder((2.5, 1.1, 0.9))  # never reaches the sample floor
    with pytest.raises((LadderExhausted, cc.C0CoverError)):
        betas = ExtBallBetas(finite_pack, 40)
        cc.refine_subsequence(finite_pack, short, betas, cc.singleton_cover(finite_pack))


def test_canonical_refining_countable():
    # deep enough that the bottom annuli sit below the uniformity threshold
    pack = cc.generate_pack("countable_example", n_y=40)
    singles = cc.singleton_cover(pack)
    alpha = cc.canonical_refining(pack, singles)
    assert alpha.covers_flag
    ladder = cc.default_ladder(pack)
    assert cc.uniformity_verdict(pack, ladder, alpha).accept
    assert cc.refines(singles, alpha).verify()


def test_canonical_refining_rejects_bad_gamma(finite_pack):
    whole = cc.whole_space_cover(finite_pack)
    with pytest.raises(UniformityRejected):
        cc.canonical_refining(finite_pack, whole)


def test_star_expand_trivial(finite_pack):
    from c0cover.canonical import star_expand_members

    ladder = cc.default_ladder(finite_pack)
    diag = cc.diagonal(finite_pack)
    singles = cc.singleton_cover(finite_pack)
    out = cc.star_expand(diag, singles, singles, ladder)
    assert out == singles
    # the raw formula on the whole-space family (which fails the op's
    # uniformity precondition): star over everything is everything
    whole = cc.whole_space_cover(finite_pack)
    assert star_expand_members(diag, singles, whole) == [finite_pack.interior]
    with pytest.raises(UniformityRejected):
        cc.star_expand(diag, singles, whole, ladder)


def test_star_expand_chain_inequality():
    from c0cover.verify import check_star_expansion

    results = check_star_expansion(seed=11, n_each=80)
    assert all(r.failures == 0 for r in results)


def test_boundary_ball_cover(interval_pack):
    cov = boundary_ball_cover(interval_pack, 0.3)
    assert cov.covers_flag
    assert all(interval_pack.diam(m) <= 0.6 for m in cov.members)


def test_cover_sequence_validation(interval_pack):
    provider = cc.interval_dim1_provider()
    targets = default_mesh_targets(interval_pack)
    seq = provider.build(interval_pack, targets)
    seq.validate(interval_pack)
    for i, cov in enumerate(seq.covers):
        assert cc.multiplicity(cov) <= 2
        if i + 1 < len(seq.covers):
            assert cc.common_multiplicity(cov, seq.covers[i + 1]) <= 3
    bad = CoverSequence(seq.covers, seq.mesh_targets, 1)
    with pytest.raises(BadParams):
        bad.validate(interval_pack)


def test_finite_provider_blocks(finite_pack):
    provider = cc.finite_dim0_provider()
    targets = default_mesh_targets(finite_pack)
    seq = provider.build(finite_pack, targets).validate(finite_pack)
    for cov in seq.covers[1:]:
        assert cc.multiplicity(cov) == 1  # partitions
    assert seq.max_consecutive_common_mult() <= 2


def test_circle_provider_adapts(circle_pack):
    provider = cc.interval_dim1_provider()
    targets = default_mesh_targets(circle_pack)
    seq = provider.build(circle_pack, targets).validate(circle_pack)
    assert seq.max_consecutive_common_mult() <= 3


def test_minimal_canonical_finite(finite_pipeline):
    rep = finite_pipeline["report"]
    assert rep.multiplicity == 2
    assert rep.bound_dim_plus_2 == 2
    assert rep.witness_ok
    assert rep.uniformity["accept"]
    assert finite_pipeline["alpha"].covers_flag


def test_minimal_canonical_interval(interval_pipeline):
    rep = interval_pipeline["report"]
    assert rep.multiplicity == 3
    assert rep.naive_bound_2dim_plus_2 == 4
    assert rep.witness_ok
    assert rep.uniformity["accept"]


def test_minimal_canonical_circle(circle_pack):
    ladder = cc.default_ladder(circle_pack)
    e = cc.controlled_E(circle_pack, ladder, cc.LambdaSpec.identity(ladder))
    gamma = cc.ball_cover(e)
    alpha, rep = cc.minimal_canonical(circle_pack, gamma)
    assert rep.multiplicity <= 3
    assert rep.witness_ok
    assert rep.uniformity["accept"]


def test_minimal_canonical_bound_from_common_mult(finite_pipeline, interval_pipeline):
    for pipe in (finite_pipeline, interval_pipeline):
        rep = pipe["report"]
        assert rep.multiplicity <= rep.max_common_mult


def test_provider_mismatch(finite_pack):
    gamma = cc.singleton_cover(finite_pack)
    with pytest.raises(ProviderMismatch):
        cc.minimal_canonical(finite_pack, gamma, cc.interval_dim1_provider())


def test_provider_for_unknown_dim():
    cube = cc.generate_pack("cube_face", n_side=3, n_levels=3)
    with pytest.raises(ProviderMismatch):
        cc.provider_for(cube)


def test_ext_family_matches_pointwise(line3):
    fam = [frozenset({0}), frozenset({0, 2})]
    assert ext_family(line3, fam) == (cc.ext(line3, {0}), cc.ext(line3, {0, 2}))
