"""The three-path layout: plate action, joint outcome sets, derived POVMs."""

from __future__ import annotations

import numpy as np
import pytest

from ctxlab import (
    Ket,
    Space,
    ValidationError,
    build_three_path,
    completeness_check,
    context_graph,
    dilation_DA,
    dilation_VH,
    gram,
    hwp_transform,
    joint_outcomes_DA,
    joint_outcomes_VH,
    povm_DA,
    povm_from_dilation,
    probability,
    residual_decompose,
    tensor,
    verify_constraints,
)
from helpers import phase_aligned_max_err, random_pure_state

SQ2 = np.sqrt(2.0)
SQ3 = np.sqrt(3.0)


@pytest.fixture(scope="module")
def s():
    return build_three_path()


def test_layout_constants(s):
    np.testing.assert_allclose(s.s1.amplitudes, [0.0, 1.0 / SQ2, 1.0 / SQ2])
    np.testing.assert_allclose(s.s2.amplitudes, [1.0 / SQ2, 0.0, 1.0 / SQ2])
    np.testing.assert_allclose(s.f.amplitudes, np.array([1.0, 1.0, -1.0]) / SQ3)
    np.testing.assert_allclose(s.d.amplitudes, np.array([1.0, 1.0]) / SQ2)
    np.testing.assert_allclose(s.a.amplitudes, np.array([1.0, -1.0]) / SQ2)
    # the plate direction completes both beam-splitter superpositions
    assert abs(s.f.inner(s.s1)) <= 1e-12
    assert abs(s.f.inner(s.s2)) <= 1e-12
    assert abs(s.s1.inner(s.s2) - 0.5) <= 1e-12
    assert abs(s.d.inner(s.a)) <= 1e-12


def test_unknown_plate_position_is_rejected():
    with pytest.raises(ValidationError) as err:
        build_three_path("X")
    assert err.value.invariant == "hwp-path"


def test_plate_transform_is_a_reflection(s):
    rng = np.random.default_rng(59)
    for _ in range(20):
        psi = random_pure_state(rng, 3)
        once = hwp_transform(s, psi)
        assert abs(once.norm() - 1.0) <= 1e-12
        twice = hwp_transform(s, once)
        assert np.abs(twice.amplitudes - psi.amplitudes).max() <= 1e-12
    flipped = hwp_transform(s, s.f)
    assert np.abs(flipped.amplitudes + s.f.amplitudes).max() <= 1e-12
    kept = hwp_transform(s, s.s1)
    assert np.abs(kept.amplitudes - s.s1.amplitudes).max() <= 1e-12
    first = hwp_transform(s, s.paths[0])
    np.testing.assert_allclose(first.amplitudes, np.array([1.0, -2.0, 2.0]) / 3.0, atol=1e-12)


def test_joint_outcome_sets_are_complete_bases(s):
    for outcomes in (joint_outcomes_VH(s), joint_outcomes_DA(s)):
        assert len(outcomes) == 6
        assert outcomes.complete
        assert outcomes.orthonormality_residual() <= 1e-12
    assert joint_outcomes_VH(s).labels() == ("V1", "V2", "V3", "H1", "H2", "H3")
    assert joint_outcomes_DA(s).labels() == ("D1", "D2", "D3", "A1", "A2", "A3")
    # the plate acts on the reflected-polarisation readouts only
    h3 = tensor(s.h, Ket(s.system, np.array([2.0, 2.0, 1.0]) / 3.0))
    v3 = tensor(s.v, Ket(s.system, np.array([0.0, 0.0, 1.0])))
    assert np.abs(joint_outcomes_VH(s).ket("H3").amplitudes - h3.amplitudes).max() <= 1e-12
    assert np.abs(joint_outcomes_VH(s).ket("V3").amplitudes - v3.amplitudes).max() <= 1e-12


def test_readout_rotation_factorises_over_the_paths(s):
    # <m_DA(p, i)|m_VH(q, j)> = <p_env|q_env> delta_ij
    da = joint_outcomes_DA(s)
    vh = joint_outcomes_VH(s)
    overlaps = np.array(
        [[da.ket(a).inner(vh.ket(b)) for b in vh.labels()] for a in da.labels()]
    )
    b = np.array(
        [
            [s.d.inner(s.v), s.d.inner(s.h)],
            [s.a.inner(s.v), s.a.inner(s.h)],
        ]
    )
    np.testing.assert_allclose(overlaps, np.kron(b, np.eye(3)), atol=1e-12)


def test_merged_DA_povm_reproduces_published_elements(s):
    p = povm_DA(s, merge_A=True)
    assert p.labels() == ("D1", "D2", "D3", "A")
    expected = {
        "D1": np.array([2.0, -1.0, 1.0]) / 3.0,
        "D2": np.array([-1.0, 2.0, 1.0]) / 3.0,
        "D3": np.array([1.0, 1.0, 2.0]) / 3.0,
        "A": np.array([1.0, 1.0, -1.0]) / SQ3,
    }
    for label, vec in expected.items():
        assert phase_aligned_max_err(p.element(label).vector.amplitudes, vec) <= 1e-12
    assert completeness_check(p) <= 1e-12


def test_published_gram_values(s):
    p = povm_DA(s, merge_A=True)
    vectors = [p.element(f"D{i}").vector for i in (1, 2, 3)]
    g = gram(vectors)
    assert abs(g[0, 1] - (-1.0 / 3.0)) <= 1e-12
    assert abs(g[0, 2] - (1.0 / 3.0)) <= 1e-12
    assert abs(g[1, 2] - (1.0 / 3.0)) <= 1e-12
    for i in range(3):
        assert abs(g[i, i] - 2.0 / 3.0) <= 1e-12


def test_rejected_context_components(s):
    # each D residual is the plate direction tagged with the orthogonal
    # polarisation; each A residual carries that outcome's path context
    residuals = residual_decompose(dilation_DA(s))
    p = povm_DA(s, merge_A=False)
    a_f = tensor(s.a, s.f)
    for i in (1, 2, 3):
        sigma_d = residuals.ket(f"D{i}")
        assert abs(sigma_d.norm_sq() - 1.0 / 3.0) <= 1e-12
        assert abs(abs(a_f.inner(sigma_d.normalized())) - 1.0) <= 1e-12
        sigma_a = residuals.ket(f"A{i}")
        assert abs(sigma_a.norm_sq() - 2.0 / 3.0) <= 1e-12
        lam_d = povm_from_dilation(dilation_DA(s)).element(f"D{i}").vector
        target = tensor(s.a, lam_d.normalized())
        assert abs(abs(target.inner(sigma_a.normalized())) - 1.0) <= 1e-12
    assert p.element("A1").weight() <= 1.0 / 3.0 + 1e-12


def test_constraint_reports_for_both_readouts(s):
    for d in (dilation_VH(s), dilation_DA(s)):
        report = verify_constraints(d)
        assert report.ok()


def test_paradox_probability_through_the_A_port(s):
    psi = Ket(s.system, np.ones(3) / SQ3)
    p = povm_DA(s, merge_A=True)
    assert abs(probability(p, psi, "A") - 1.0 / 9.0) <= 1e-12


def test_plate_in_a_detected_path_degenerates_the_povm():
    s = build_three_path(hwp_path="1")
    p = povm_DA(s, merge_A=True)
    assert completeness_check(p) <= 1e-12
    assert p.element("D1").weight() <= 1e-12
    assert abs(p.element("A").weight() - 1.0) <= 1e-12
    assert phase_aligned_max_err(
        p.element("A").vector.amplitudes, np.array([1.0, 0.0, 0.0])
    ) <= 1e-12
    g = context_graph(p)
    assert g.skipped == ("D1",)
    assert set(g.nodes) == {"D2", "D3", "A"}


def test_plate_in_a_detected_path_makes_VH_readouts_proportional():
    s = build_three_path(hwp_path="1")
    p = povm_from_dilation(dilation_VH(s))
    g = context_graph(p)
    # every pair is orthogonal or proportional: the graph is complete
    assert len(g.edges) == 15
    proportional = [(a, b) for a, b, w in g.edges if w > 0.5]
    assert sorted(proportional) == [("V1", "H1"), ("V2", "H2"), ("V3", "H3")]


def test_alternate_plate_positions_keep_completeness():
    for path in ("2", "3", "S1", "S2"):
        s = build_three_path(hwp_path=path)
        assert completeness_check(povm_from_dilation(dilation_VH(s))) <= 1e-12
        assert completeness_check(povm_DA(s, merge_A=False)) <= 1e-12
        assert verify_constraints(dilation_DA(s)).ok()
