import json

import numpy as np
import pytest

from seasonlv import (Degenerate, Inadmissible, NonHyperbolic, axial_fixed_point,
                      bundled_scenario, derive, inventory, planar_fixed_point,
                      positive_fixed_points, stability_and_index, verify_index_formula)
from seasonlv.fixedpoints import (RESIDUAL_TOL, axial_coordinate, axial_fixed_point_newton,
                                  hat_residual, trivial_fixed_point, transverse_formula)
from seasonlv.flow import orbit_points

from .conftest import FINE
from .reps import rep


@pytest.fixture(scope="module")
def c26():
    return bundled_scenario("class26").params


@pytest.fixture(scope="module")
def c27():
    return bundled_scenario("class27").params


@pytest.fixture(scope="module")
def inventories():
    return {n: inventory(bundled_scenario(n).params) for n in ("class26", "class27", "class29", "class31")}


def test_axial_closed_form_class27(c27):
    q = axial_coordinate(c27, 0)
    expected = 0.3 * np.expm1(0.2) / (0.2 * np.exp(-0.7) * np.expm1(0.9))
    assert q == pytest.approx(expected, rel=1e-14)
    assert q == pytest.approx(0.4582, abs=1e-4)
    # iterating the map on the axis converges to the same point
    x = orbit_points(c27, [1.0, 0, 0], 1, skip=400)[0]
    assert x[0] == pytest.approx(q, rel=1e-9)


@pytest.mark.parametrize("name", ["class26", "class29", "class31"])
def test_axial_hat(name):
    p = bundled_scenario(name).params
    for i in range(3):
        fp = axial_fixed_point(p, i)
        expected = np.zeros(3)
        expected[i] = p.r[i] / p.a[i, i]
        np.testing.assert_allclose(fp.hat, expected, rtol=1e-8, atol=0)
        assert fp.residual <= RESIDUAL_TOL * fp.scale
        assert fp.support == (i,)


def test_axial_newton_matches_closed_form():
    for name in ("class26", "class27", "class29", "class31"):
        p = bundled_scenario(name).params
        for i in range(3):
            got = axial_fixed_point_newton(p, i, FINE)
            assert got == pytest.approx(axial_coordinate(p, i), rel=1e-10)


def test_axial_inadmissible_and_limit(c27):
    dead = c27.with_entry("b", 0, 0.7 / 3.0)  # r_1 = 3 b_1 - 0.7 = 0
    with pytest.raises(Inadmissible):
        axial_fixed_point(dead, 0)
    # continuity as r_1 -> 0+
    near = c27.with_entry("b", 0, 0.7 / 3.0 + 1e-9)
    assert 0 < axial_coordinate(near, 0) < 1e-7


def test_planar_absent_present(c26):
    assert planar_fixed_point(c26, 2) is None
    v1 = planar_fixed_point(c26, 0)
    assert v1 is not None and v1.support == (1, 2)
    d = derive(c26)
    np.testing.assert_allclose(v1.hat[1:], [d.beta[1, 2], d.beta[2, 1]], rtol=1e-9)
    np.testing.assert_allclose(v1.hat[1:], [1.25, 2.5], rtol=1e-9)


def test_planar_symmetric_subsystem(c27):
    # species 1, 2 with identical rates and a symmetric 2x2 block, mutual invasion
    p = c27.replace(a=[[0.2, 0.1, 0.1], [0.1, 0.2, 0.3], [0.3, 0.1, 0.2]])
    d = derive(p)
    assert d.gamma[0, 1] == pytest.approx(d.gamma[1, 0]) and d.gamma[0, 1] > 0
    v3 = planar_fixed_point(p, 2)
    m = np.array([[0.2, 0.1], [0.1, 0.2]])
    np.testing.assert_allclose(v3.hat[:2], np.linalg.solve(m, p.r[:2]), rtol=1e-9)
    assert v3.coords[0] == pytest.approx(v3.coords[1], rel=1e-9)


def test_planar_third_eigenvalue(inventories):
    for name, inv in inventories.items():
        params = bundled_scenario(name).params
        for v in inv.planar:
            if v is None:
                continue
            (k,) = [m for m in range(3) if m not in v.support]
            assert v.jacobian[k, k] == pytest.approx(transverse_formula(params, v, k), rel=1e-6)


def test_positive_hat_residual(c27, inventories):
    pos = inventories["class27"].positive
    assert len(pos) >= 1
    for fp in pos:
        assert hat_residual(c27, fp) <= 1e-8
        np.testing.assert_allclose(fp.hat, np.linalg.solve(c27.a, c27.r), rtol=1e-8)


def test_class26_interior_hat(c26, inventories):
    (p1,) = inventories["class26"].positive
    np.testing.assert_allclose(p1.hat, [2 / 3, 2 / 3, 8 / 3], rtol=1e-9)
    np.testing.assert_allclose(p1.coords, [0.16273525535405342, 0.16273525535405503,
                                           0.6509410214162188], rtol=1e-8)


def test_no_positive_for_low_classes():
    assert positive_fixed_points(rep(1)) == []


@pytest.mark.parametrize("cid", [19, 20, 33])
def test_positive_exists_high_classes(cid):
    assert len(positive_fixed_points(rep(cid))) >= 1


def test_origin_repeller(c26):
    fp = stability_and_index(c26, trivial_fixed_point(c26))
    assert fp.index == -1 and fp.stability == "repeller"


def test_axial_labels(inventories):
    # class 26: q1 repeller, q2 attractor, q3 saddle
    inv = inventories["class26"]
    assert [q.stability for q in inv.axial] == ["repeller", "attractor", "saddle"]
    assert [q.index for q in inv.axial] == [1, 1, -1]
    assert all(q.stability == "saddle" and q.index == -1 for q in inventories["class27"].axial)


def test_index_counts_unstable_eigenvalues(inventories):
    for inv in inventories.values():
        for fp in inv.all():
            if fp.index is None:
                continue
            n_big = int(np.sum(np.abs(fp.eigenvalues) > 1))
            assert fp.index == (-1) ** n_big


def test_boundary_transverse_formula(inventories):
    for name, inv in inventories.items():
        p = bundled_scenario(name).params
        for fp in inv.boundary():
            if fp.kind == "trivial":
                continue
            for i in range(3):
                if i not in fp.support:
                    assert fp.jacobian[i, i] == pytest.approx(transverse_formula(p, fp, i), rel=1e-6)


def test_nonhyperbolic_interior(c27, inventories):
    (p1,) = inventories["class27"].positive
    assert p1.stability == "nonhyperbolic" and p1.index is None
    with pytest.raises(NonHyperbolic):
        stability_and_index(c27, p1)
    with pytest.raises(Degenerate):
        verify_index_formula(c27, inv=inventories["class27"])


def test_interior_spectral_bounds(inventories):
    for inv in inventories.values():
        for fp in inv.positive:
            lam = fp.eigenvalues[0]
            assert lam.imag == 0.0 and 0 < lam.real < 1
            assert 0 < np.linalg.det(fp.jacobian) < 1


@pytest.mark.parametrize("name", ["class29", "class31"])
def test_index_formula_examples(name, inventories):
    rep_ = verify_index_formula(bundled_scenario(name).params, inv=inventories[name])
    assert rep_.lhs == 1 and rep_.holds


def test_index_formula_class20():
    r = verify_index_formula(rep(20))
    assert r.holds
    assert sorted(r.axial) == [-1, 1, 1]
    assert sorted(v for v in r.planar if v is not None) == [1, 1]
    assert sum(r.positive) == -1


def test_index_formula_low_class_boundary_only():
    r = verify_index_formula(rep(1))
    assert r.positive == []
    assert sum(r.axial) + 2 * sum(v for v in r.planar if v is not None) == 1


def test_residuals_and_json(inventories):
    for inv in inventories.values():
        for fp in inv.all():
            assert fp.residual <= RESIDUAL_TOL * fp.scale
            assert all((fp.coords[k] > 0) == (k in fp.support) for k in range(3))
        doc = json.loads(json.dumps(inv.to_dict()))
        assert doc["trivial"]["index"] == -1


def test_inventory_inadmissible(c27):
    with pytest.raises(Inadmissible):
        inventory(c27.with_entry("b", 1, 0.01))
