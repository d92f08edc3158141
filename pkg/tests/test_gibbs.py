
import numpy as np
import pytest

from dimlab.thermo import Potential, gibbs_weights, hdim_gibbs

from conftest import LOG2

lgp = Potential.log_gauss_derivative()


@pytest.mark.parametrize("n", [1, 5, 10])
def test_doubling_uniform(doubling, n):
    g = gibbs_weights(doubling, Potential.constant(-LOG2), n)
    np.testing.assert_allclose(g.weights, 2.0 ** -n, rtol=1e-14)
    h, _ = hdim_gibbs(g)
    assert h == pytest.approx(LOG2, abs=1e-12)


def test_doubling_root_gives_lebesgue(doubling):
    s = 0.5
    g = gibbs_weights(doubling, Potential.constant(-s * (LOG2 + LOG2)), 8)
    np.testing.assert_allclose(g.weights, 2.0 ** -8, rtol=1e-14)
    h, dim = hdim_gibbs(g)
    assert h == pytest.approx(LOG2, abs=1e-6)
    assert dim == pytest.approx(1.0, abs=1e-6)


def test_weights_normalized_golden(golden):
    g = gibbs_weights(golden, Potential(), 12)
    assert g.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(g.weights > 0)


def test_weights_track_pressure_choice(golden):
    a = gibbs_weights(golden, Potential(), 10, pressure_used=0.48)
    b = gibbs_weights(golden, Potential(), 10, pressure_used=0.49)
    assert a.pressure_used == 0.48 and b.pressure_used == 0.49
    np.testing.assert_allclose(a.weights, b.weights, rtol=1e-12)


def test_gauss_dimension_tends_to_one():
    errs = []
    for cap in (50, 200, 800):
        g = gibbs_weights("gauss", lgp * -1.0, 2, digit_cap=cap)
        errs.append(abs(hdim_gibbs(g)[1] - 1.0))
        assert g.mass_deficit >= 0
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] < 5e-3


def test_gauss_mass_deficit_shrinks():
    d = [gibbs_weights("gauss", lgp * -1.0, 1, digit_cap=cap).mass_deficit for cap in (10, 100, 1000)]
    assert d[0] > d[1] > d[2] > 0
    assert d[-1] == pytest.approx(1 / 1001, rel=0.05)
