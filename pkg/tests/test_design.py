import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from doptdesign.basis import build_index_set, eval_univariate, BasisFamily
from doptdesign.design import (
    DOMAINS,
    DiamondDomain,
    DiscDomain,
    Domain,
    ExperimentalDesign,
    ThreeQuarterDiscDomain,
    affine_map,
    assemble_model_matrix,
    basis_matrix_with_derivs,
    get_domain,
    project_to_domain,
    unit_box,
)
from doptdesign.models import PISTON_DOMAIN


def loop_model_matrix(X, index_set):
    n, m = X.shape[0], len(index_set)
    A = np.empty((n, m))
    for i in range(n):
        for j, alpha in enumerate(index_set):
            v = 1.0
            for k, a in enumerate(alpha):
                v *= eval_univariate(BasisFamily.CHEBYSHEV, a, X[i, k])
            A[i, j] = v
    return A


def test_model_matrix_examples():
    A = assemble_model_matrix(np.array([[0.0]]), build_index_set(1, 2)).entries
    np.testing.assert_allclose(A, [[1.0, 0.0, -1.0]], atol=1e-15)
    s = build_index_set(2, 2)
    j = list(s).index((1, 1))
    A = assemble_model_matrix(np.array([[0.5, -0.5]]), s).entries
    assert A[0, j] == pytest.approx(-0.25)


def test_model_matrix_against_loop_oracle():
    rng = np.random.default_rng(0)
    X = rng.uniform(-1, 1, (6, 2))
    s = build_index_set(2, 2)
    A = assemble_model_matrix(ExperimentalDesign(X, unit_box(2)), s)
    assert A.shape == (6, len(s))
    np.testing.assert_allclose(A.entries, loop_model_matrix(X, s), atol=1e-14, rtol=0)


def test_constant_basis_single_point():
    A = assemble_model_matrix(np.array([[0.3, 0.9]]), build_index_set(2, 0))
    np.testing.assert_array_equal(A.entries, [[1.0]])


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        assemble_model_matrix(np.zeros((3, 2)), build_index_set(3, 1))


def test_row_locality():
    rng = np.random.default_rng(1)
    s = build_index_set(3, 3)
    X = rng.uniform(-1, 1, (12, 3))
    A = assemble_model_matrix(X, s).entries
    X2 = X.copy()
    X2[5] = rng.uniform(-1, 1, 3)
    A2 = assemble_model_matrix(X2, s).entries
    changed = np.any(A != A2, axis=1)
    assert changed.tolist() == [i == 5 for i in range(12)]


def test_derivative_matrix_fd():
    rng = np.random.default_rng(2)
    s = build_index_set(3, 3)
    X = rng.uniform(-0.9, 0.9, (4, 3))
    A, dA = basis_matrix_with_derivs(X, s)
    h = 1e-6
    for l in range(3):
        Xp, Xm = X.copy(), X.copy()
        Xp[:, l] += h
        Xm[:, l] -= h
        fd = (assemble_model_matrix(Xp, s).entries - assemble_model_matrix(Xm, s).entries) / (2 * h)
        np.testing.assert_allclose(dA[l], fd, rtol=1e-6, atol=1e-8)


def test_project_examples():
    np.testing.assert_array_equal(project_to_domain([1.5, -2.0], unit_box(2)), [1.0, -1.0])
    disc = DiscDomain()
    np.testing.assert_array_equal(project_to_domain([0.3, 0.4], disc), [0.3, 0.4])
    got = project_to_domain([3.0, 4.0], disc)
    np.testing.assert_allclose(got, [0.6, 0.8], atol=1e-15)
    # nearest point on a fine boundary discretisation
    t = np.linspace(0, 2 * np.pi, 200001)
    ring = np.column_stack([np.cos(t), np.sin(t)])
    best = ring[np.argmin(np.linalg.norm(ring - [3.0, 4.0], axis=1))]
    np.testing.assert_allclose(got, best, atol=1e-4)


def test_diamond_projection_is_nearest():
    dom = DiamondDomain()
    rng = np.random.default_rng(3)
    # dense sample of the diamond boundary
    t = np.linspace(0, 1, 4001)
    edges = np.vstack([np.column_stack([t, 1 - t]), np.column_stack([-t, 1 - t]),
                       np.column_stack([t, t - 1]), np.column_stack([-t, t - 1])])
    for p in rng.uniform(-3, 3, (50, 2)):
        proj = dom.project(p)
        if np.abs(p).sum() <= 1:
            np.testing.assert_array_equal(proj, p)
        else:
            best = edges[np.argmin(np.linalg.norm(edges - p, axis=1))]
            assert np.linalg.norm(proj - p) <= np.linalg.norm(best - p) + 1e-9
            assert dom.contains(proj)


def test_three_quarters_projection():
    dom = ThreeQuarterDiscDomain()
    np.testing.assert_array_equal(dom.project([0.5, -0.1]), [0.5, 0.0])
    np.testing.assert_array_equal(dom.project([0.1, -0.5]), [0.0, -0.5])
    np.testing.assert_array_equal(dom.project([-0.5, -0.5]), [-0.5, -0.5])
    assert not dom.contains([0.2, -0.2])
    assert dom.contains([0.2, 0.0])


@pytest.mark.parametrize("name", sorted(DOMAINS) + ["box"])
def test_projection_idempotent_and_feasible(name):
    dom = unit_box(2) if name == "box" else get_domain(name)
    rng = np.random.default_rng(4)
    pts = rng.uniform(-2, 2, (1000, 2))
    proj = dom.project(pts)
    assert np.all(dom.contains(proj))
    np.testing.assert_array_equal(dom.project(proj), proj)
    inside = dom.contains(pts, tol=0.0)
    np.testing.assert_array_equal(proj[inside], pts[inside])


@settings(max_examples=50, deadline=None)
@given(hnp.arrays(float, 2, elements=st.floats(-10, 10)), st.sampled_from(sorted(DOMAINS)))
def test_projection_idempotent_property(p, name):
    dom = get_domain(name)
    once = dom.project(p)
    np.testing.assert_allclose(dom.project(once), once, atol=1e-15)
    assert dom.contains(once, tol=1e-12)


def test_domain_rejects_bad_bounds():
    with pytest.raises(ValueError):
        Domain([0.0, 1.0], [1.0, 1.0])


def test_affine_examples():
    m_src = Domain([30.0], [60.0])
    assert affine_map([45.0], m_src, unit_box(1))[0] == pytest.approx(0.0, abs=1e-15)
    s_src = Domain([0.005], [0.020])
    assert affine_map([0.020], s_src, unit_box(1))[0] == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        affine_map([61.0], m_src, unit_box(1))


def test_affine_roundtrip():
    rng = np.random.default_rng(5)
    for _ in range(100):
        u = rng.uniform(-1, 1, 7)
        phys = affine_map(u, unit_box(7), PISTON_DOMAIN)
        back = affine_map(phys, PISTON_DOMAIN, unit_box(7))
        assert np.max(np.abs(back - u)) < 1e-14


def test_design_serialisation_roundtrip():
    rng = np.random.default_rng(6)
    X = ExperimentalDesign(rng.uniform(-1, 1, (5, 3)), unit_box(3), seed=11, sampler="lhs")
    csv_text = X.to_csv()
    assert csv_text.splitlines()[0] == "x1,x2,x3"
    np.testing.assert_array_equal(ExperimentalDesign.from_csv(csv_text).points, X.points)
    back = ExperimentalDesign.from_json(X.to_json())
    np.testing.assert_array_equal(back.points, X.points)
    assert back.domain == X.domain and back.seed == 11
    disc = ExperimentalDesign([[0.1, 0.2]], DiscDomain())
    assert isinstance(ExperimentalDesign.from_json(disc.to_json()).domain, DiscDomain)


def test_design_rejects_nonfinite():
    with pytest.raises(ValueError):
        ExperimentalDesign([[np.nan, 0.0]], unit_box(2))
