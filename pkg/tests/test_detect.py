import numpy as np
import pytest

from rmom.detect import (
    BOUND_CANDIDATE,
    ENTANGLED,
    SEPARABLE,
    ccnr_test,
    dv_test,
    general_region_min,
    moment_witness,
    outside_separable_region,
    ppt_test,
    purity_test,
    realign,
    region_curve,
    sep_min_numeric,
    sep_region,
)
from rmom.errors import UsageError
from rmom.moments import MomentPair, state_moments
from rmom.polytope import sep_family
from rmom.qmat import DensityMatrix, random_density, rng_for
from rmom.statezoo import (
    CHESSBOARD_EXAMPLE,
    bell,
    chessboard,
    cross_hatch,
    horodecki_3x3,
    isotropic,
    piani_4x4,
    random_pure_product,
    random_separable,
    upb_tiles,
)


def _product(d, rng):
    return DensityMatrix.from_ket(random_pure_product((d, d), rng), (d, d))


def test_ppt_examples():
    assert abs(ppt_test(bell()) + 0.5) < 1e-12
    assert ppt_test(chessboard(**CHESSBOARD_EXAMPLE)) >= -1e-9
    for p in (2, 3, 4):
        assert ppt_test(horodecki_3x3(p)) >= -1e-9


def test_realign_pairs_indices():
    rho = random_density((3, 3), rng_for(0, 0)).mat
    r = realign(rho, 3)
    t = rho.reshape(3, 3, 3, 3)
    for i, j, k, l in [(0, 1, 2, 0), (2, 2, 1, 0), (1, 0, 0, 2)]:
        assert r[3 * i + j, 3 * k + l] == t[i, k, j, l]


def test_ccnr_examples():
    rng = rng_for(1, 0)
    for d in (2, 3, 4):
        assert abs(ccnr_test(_product(d, rng)) - 1) < 1e-9
    assert abs(ccnr_test(bell()) - 2) < 1e-12
    assert ccnr_test(cross_hatch()) > 1


def test_dv_examples():
    rng = rng_for(2, 0)
    for d in (2, 3, 4):
        prod = _product(d, rng)
        assert abs(dv_test(prod) - (d - 1)) < 1e-9
        assert abs(dv_test(isotropic(1, d)) - (d * d - 1)) < 1e-9
        for p in (0.1, 0.5):
            assert abs(dv_test(isotropic(p, d)) - p * (d * d - 1)) < 1e-9


def test_dv_threshold_is_isotropic_boundary():
    from rmom.polytope import crossing_points

    for d in (2, 3, 4):
        thr = crossing_points(lambda p: dv_test(isotropic(p, d)) - (d - 1), 0, 1)
        assert np.allclose(thr, [1 / (d + 1)], atol=1e-9)


def test_purity_examples():
    assert abs(purity_test(bell()) - 0.5) < 1e-12
    for st in (cross_hatch(), upb_tiles(), chessboard(**CHESSBOARD_EXAMPLE), piani_4x4(), horodecki_3x3(3.5)):
        assert purity_test(st) <= 1e-9
    assert abs(purity_test(sep_family(0.6, 0.7, 3))) < 1e-9


def test_sep_region_examples():
    for d in (2, 3, 4):
        assert np.allclose(sep_region(1, d), (1, 1))
        for s2 in np.linspace(0, 1 / (d * d - 1), 5):
            lo, hi = sep_region(s2, d)
            assert abs(lo - s2 * s2 * (d * d + 1) / (3 * (d * d - 1))) < 1e-14
            assert abs(hi - s2 * s2) < 1e-15
    with pytest.raises(UsageError):
        sep_region(1.1, 3)
    with pytest.raises(UsageError):
        sep_region(-0.1, 3)


@pytest.mark.parametrize("d", [3, 4])
def test_sep_region_matches_numeric_oracle(d):
    for s2 in np.linspace(0, 1, 12):
        assert abs(sep_region(s2, d)[0] - sep_min_numeric(s2, d, restarts=10)) < 1e-6


def test_general_region():
    assert general_region_min(0, 3) == 0
    assert abs(general_region_min(1, 3) - 5 / 12) < 1e-15
    for p in np.linspace(-1 / 8, 1, 9):
        m = state_moments(isotropic(p, 3))
        assert abs(m.s4 - general_region_min(m.s2, 3)) < 1e-9
    s2 = np.linspace(0, 1, 51)
    for d in (2, 3, 4):
        assert np.all(general_region_min(s2, d) <= np.array([sep_region(x, d)[0] for x in s2]) + 1e-15)
    with pytest.raises(UsageError):
        general_region_min(3, 3)


def test_region_curve():
    c = region_curve(3, np.linspace(0, 1, 11))
    assert c.columns == ["s2", "s4_sep_min", "s4_sep_max", "s4_gen_min"]
    assert all(lo <= hi + 1e-15 for lo, hi in zip(c.sep_min, c.sep_max))
    assert c.sep_min[-1] == pytest.approx(1) and c.sep_max[-1] == pytest.approx(1)
    assert len(region_curve(3, [0.5], ppt_min=[0.1]).rows()[0]) == 5


def test_moment_witness_examples():
    rep = moment_witness(DensityMatrix.maximally_mixed((3, 3)))
    assert abs(rep.moments.s2) < 1e-15 and abs(rep.moments.s4) < 1e-15
    assert set(rep.verdicts.values()) == {SEPARABLE}
    rep = moment_witness(bell())
    assert all(v == ENTANGLED for v in rep.verdicts.values())
    for st in (cross_hatch(), piani_4x4()):
        rep = moment_witness(st)
        assert rep.verdicts["moments"] == BOUND_CANDIDATE
        assert rep.overall == BOUND_CANDIDATE


def test_bound_candidate_requires_ppt():
    rng = rng_for(3, 0)
    for _ in range(50):
        rep = moment_witness(random_density((3, 3), rng, rank=2))
        if BOUND_CANDIDATE in rep.verdicts.values():
            assert rep.ppt_min_eig >= -1e-9


def test_outside_region_tolerance():
    lo, hi = sep_region(0.5, 3)
    assert not outside_separable_region(MomentPair(0.5, lo - 5e-8, 3))
    assert outside_separable_region(MomentPair(0.5, lo - 2e-7, 3))
    assert outside_separable_region(MomentPair(0.5, hi + 2e-7, 3))
    assert outside_separable_region(MomentPair(1.01, 1.0, 3))


def test_dv_inside_implies_region_inside():
    rng = rng_for(4, 0)
    for _ in range(300):
        d = int(rng.integers(2, 5))
        rho = random_density((d, d), rng, rank=int(rng.integers(1, d * d + 1)))
        if dv_test(rho) <= d - 1:
            assert not outside_separable_region(state_moments(rho))


def test_separable_states_are_not_flagged():
    rng = rng_for(5, 0)
    for d in (2, 3, 4):
        for _ in range(100):
            rep = moment_witness(random_separable((d, d), rng))
            assert set(rep.verdicts.values()) == {SEPARABLE}


def test_needs_bipartite_equal_dims():
    with pytest.raises(UsageError):
        ccnr_test(DensityMatrix.maximally_mixed((2, 3)))
    with pytest.raises(UsageError):
        ppt_test(DensityMatrix.maximally_mixed((2, 2, 2)))
