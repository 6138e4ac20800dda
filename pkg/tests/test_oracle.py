import numpy as np
import pytest

from seasonlv import (Degenerate, LGMap, bundled_scenario, derive, lg_apply, lg_signature,
                      sample_params, signature)
from seasonlv.oracle import lg_fixed_point, lg_jacobian


@pytest.fixture(scope="module")
def m26():
    return LGMap.from_params(bundled_scenario("class26").params)


def test_origin_fixed(m26):
    np.testing.assert_array_equal(lg_apply(m26, np.zeros(3)), 0.0)


def test_hat_points_fixed(m26):
    # the LG fixed points coincide with the hat integrals of the seasonal map
    p = bundled_scenario("class26").params
    d = derive(p)
    for i in range(3):
        q = lg_fixed_point(m26, (i,))
        assert q[i] == pytest.approx(p.r[i] / p.a[i, i], rel=1e-14)
        np.testing.assert_allclose(lg_apply(m26, q), q, rtol=1e-12, atol=0)
    v1 = lg_fixed_point(m26, (1, 2))
    np.testing.assert_allclose(v1[1:], [d.beta[1, 2], d.beta[2, 1]], rtol=1e-12)
    np.testing.assert_allclose(lg_apply(m26, v1), v1, rtol=1e-12, atol=0)
    assert lg_fixed_point(m26, (0, 1)) is None


def test_jacobian_central_difference(m26):
    x = np.array([0.3, 0.7, 1.1])
    J = lg_jacobian(m26, x)
    h = 1e-6
    F = np.column_stack([(lg_apply(m26, x + h * e) - lg_apply(m26, x - h * e)) / (2 * h)
                         for e in np.eye(3)])
    np.testing.assert_allclose(J, F, rtol=1e-8, atol=1e-10)


@pytest.mark.parametrize("name", ["class26", "class27", "class29", "class31"])
def test_examples_agree(name):
    p = bundled_scenario(name).params
    assert lg_signature(LGMap.from_params(p)).code == signature(p).code


def test_random_agree():
    rng = np.random.default_rng(31)
    n = 0
    while n < 100:
        p = sample_params(rng)
        try:
            s = signature(p)
        except Degenerate:
            continue
        n += 1
        assert lg_signature(LGMap.from_params(p)).code == s.code


def test_bad_maps():
    with pytest.raises(ValueError):
        LGMap([1, 1, 1], np.zeros((3, 3)))
    with pytest.raises(Degenerate):
        lg_signature(LGMap([1, -1, 1], np.ones((3, 3))))
