import math

import numpy as np
import pytest

from conftest import fixed_code_corpus
from gibbscode.channels import ChannelModel, t2p
from gibbscode.exact import make_instance
from gibbscode.gexit import (EnsembleSpec, awgn_gexit, bp_gexit,
                             bp_gexit_multi_depth, entropy_fd, map_gexit,
                             map_gexit_series, nishimori_residual,
                             series_zero_moment_value)
from gibbscode.graphs import LDGM, LDPC, DegreeDistribution, build_graph


def rep3():
    return build_graph(3, 2, [(0, 0), (1, 0), (1, 1), (2, 1)], LDPC)


def uncoded_bit():
    return build_graph(1, 0, [], LDPC)


def test_uncoded_bit_closed_form():
    """n = 1, no checks: h(eps) is the binary entropy of eps on the BSC,
    whose derivative is ln((1-eps)/eps); all estimator routes agree."""
    g = uncoded_bit()
    for eps in (0.2, 0.35):
        ch = ChannelModel("bsc", eps)
        analytic = math.log((1 - eps) / eps)
        f = map_gexit(g, ch, 200, 0)
        assert f.value == pytest.approx(analytic, abs=1e-6)
        assert f.std_error < 1e-12  # extrinsic is identically zero
        e = entropy_fd(g, ch, 1e-4, 400, 0)
        assert e.value == pytest.approx(analytic, abs=3 * e.std_error + 1e-4)
        s = map_gexit_series(g, ch, 100, 0, p_max=40)
        assert s.value == pytest.approx(analytic, abs=1e-8)


def test_zero_moment_closed_form():
    """With all extrinsic moments zero the series closes to
    prefactor * 2 atanh(1-2 eps) = prefactor * ln((1-eps)/eps)."""
    for eps in (0.2, 0.3, 0.4):
        ch = ChannelModel("bsc", eps)
        val = series_zero_moment_value(1.0, ch, p_max=200)
        assert val == pytest.approx(2 * math.atanh(1 - 2 * eps), abs=1e-12)
        # p_max = 20 is already within 1e-9 for eps >= 0.2
        assert series_zero_moment_value(1.0, ch, p_max=20) == \
            pytest.approx(val, abs=1e-9)


def test_perfect_knowledge_gives_zero():
    # extrinsic identically 1 makes the kernel vanish
    from gibbscode.channels import gexit_kernel_batch
    for ch in (ChannelModel("bsc", 0.3), ChannelModel("biawgnc", 0.7)):
        assert abs(gexit_kernel_batch(ch, np.array([1.0]))[0]) < 1e-9


def test_functional_matches_entropy_fd():
    ch = ChannelModel("bsc", 0.3)
    for name, g in fixed_code_corpus()[:2]:
        f = map_gexit(g, ch, 3000, 1)
        e = entropy_fd(g, ch, 1e-3, 3000, 1)
        comb = math.hypot(f.std_error, e.std_error)
        assert abs(f.value - e.value) < 3 * comb, name


def test_series_matches_functional():
    ch = ChannelModel("bsc", 0.25)
    for name, g in fixed_code_corpus()[:2]:
        f = map_gexit(g, ch, 2500, 2)
        s = map_gexit_series(g, ch, 2500, 2, p_max=20)
        comb = math.hypot(f.std_error, s.std_error)
        assert abs(f.value - s.value) < 3 * comb + s.meta["tail_bound"], name


def test_series_tail_bound_valid():
    ch = ChannelModel("bsc", 0.25)
    g = fixed_code_corpus()[1][1]
    s20 = map_gexit_series(g, ch, 800, 3, p_max=20)
    s40 = map_gexit_series(g, ch, 800, 3, p_max=40)
    # identical samples; the p_max difference is bounded by the p=20 tail
    assert abs(s20.value - s40.value) <= s20.meta["tail_bound"] + 1e-12
    assert s40.meta["tail_bound"] < s20.meta["tail_bound"]


def test_awgn_magnetization_route():
    ch = ChannelModel("biawgnc", 0.8)
    g = fixed_code_corpus()[3][1]  # small LDGM
    f = map_gexit(g, ch, 2500, 4)
    m = awgn_gexit(g, ch, 2500, 4)
    e = entropy_fd(g, ch, 1e-3, 2500, 4)
    assert abs(f.value - m.value) < 3 * math.hypot(f.std_error, m.std_error)
    assert abs(m.value - e.value) < 3 * math.hypot(m.std_error, e.std_error)
    with pytest.raises(ValueError):
        awgn_gexit(g, ChannelModel("bsc", 0.3), 10, 0)


def test_bp_gexit_tree_equals_map():
    ch = ChannelModel("bsc", 0.3)
    g = rep3()
    b = bp_gexit(g, ch, 8, 1500, 5)
    f = map_gexit(g, ch, 1500, 5)
    assert b.value == pytest.approx(f.value, abs=1e-10)
    # d = 0: no extrinsic knowledge, the zero-moment value (up to the
    # finite-difference truncation of the kernel integral, ~1e-9)
    b0 = bp_gexit(g, ch, 0, 400, 5)
    assert b0.value == pytest.approx(series_zero_moment_value(1.0, ch), abs=1e-8)
    assert b0.std_error < 1e-12


def test_bp_gexit_multi_depth_stabilizes():
    edges = [[0, 0], [1, 0], [1, 1], [2, 1], [2, 2], [3, 2], [3, 3], [0, 3],
             [0, 4], [2, 5]]
    g = build_graph(4, 6, [tuple(e) for e in edges], LDGM)
    ch = ChannelModel("bsc", 0.4)
    ests, diffs = bp_gexit_multi_depth(g, ch, [2, 4, 6, 40], 400, 6)
    gaps = [abs(diffs[(d, 40)][0]) for d in (2, 4, 6)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_entropy_fd_step_insensitive():
    ch = ChannelModel("bsc", 0.3)
    g = rep3()
    e1 = entropy_fd(g, ch, 1e-3, 4000, 7)
    e2 = entropy_fd(g, ch, 5e-4, 4000, 7)
    assert abs(e1.value - e2.value) < 1.0 * math.hypot(e1.std_error, e2.std_error)
    with pytest.raises(ValueError):
        entropy_fd(g, ChannelModel("bsc", 0.499), 1e-2, 10, 0)


def test_entropy_fd_ldgm_normalization():
    """For LDGM the finite-difference oracle rescales to the entropy per
    information bit, matching the functional's n/m prefactor."""
    ch = ChannelModel("bsc", 0.25)
    g = fixed_code_corpus()[4][1]
    f = map_gexit(g, ch, 4000, 8)
    e = entropy_fd(g, ch, 1e-3, 4000, 8)
    assert abs(f.value - e.value) < 3 * math.hypot(f.std_error, e.std_error)


def test_nishimori_residuals():
    ch = ChannelModel("bsc", 0.25)
    g = rep3()
    for p in (1, 2, 3):
        r, se = nishimori_residual(g, ch, p, 4000, 9)
        assert r < 4 * se
    with pytest.raises(ValueError):
        nishimori_residual(g, ch, 0, 10, 0)


def test_ensemble_source_and_blocks():
    ch = ChannelModel("bsc", 0.45)
    dd = DegreeDistribution.regular(3, 2)
    src = EnsembleSpec(dd, 12, LDGM)
    est = map_gexit(src, ch, 300, 10, noise_per_graph=10)
    assert est.meta["n"] == 12 and est.std_error > 0
    # prefactor for the ensemble equals Lambda'(1)/P'(1)
    assert est.meta["family"] == LDGM
