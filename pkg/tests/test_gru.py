import math

import numpy as np
import pytest

from ntg.net.gru import GATE_NAMES, gru_cell


def zero_weights(n_in, n_h):
    w = {}
    for g in GATE_NAMES:
        if g.startswith("W"):
            w[g] = np.zeros((n_h, n_in))
        elif g.startswith("U"):
            w[g] = np.zeros((n_h, n_h))
        else:
            w[g] = np.zeros(n_h)
    return w


def test_zero_weights_halve_state():
    h = np.array([1.0, -2.0, 0.25])
    out = gru_cell(np.zeros(2), h, zero_weights(2, 3))
    np.testing.assert_allclose(out, 0.5 * h)


def test_all_zero_is_fixed_point():
    out = gru_cell(np.zeros(4), np.zeros(3), zero_weights(4, 3))
    np.testing.assert_array_equal(out, np.zeros(3))


def test_matches_straight_line_reference():
    rng = np.random.default_rng(8)
    n_in, n_h = 5, 4
    w = {
        g: rng.normal(0, 0.7, size=arr.shape)
        for g, arr in zero_weights(n_in, n_h).items()
    }
    x = rng.normal(size=n_in)
    h = rng.normal(size=n_h)

    # independent straight-line evaluation of the same update equations
    def sig(v):
        return 1.0 / (1.0 + np.exp(-v))

    z = sig(w["Wz"] @ x + w["Uz"] @ h + w["bz"])
    r = sig(w["Wr"] @ x + w["Ur"] @ h + w["br"])
    c = np.tanh(w["Wh"] @ x + w["Uh"] @ (r * h) + w["bh"])
    expected = (1 - z) * h + z * c

    np.testing.assert_allclose(gru_cell(x, h, w), expected, atol=1e-12)


def test_non_finite_input_rejected():
    w = zero_weights(2, 2)
    with pytest.raises(ValueError):
        gru_cell(np.array([1.0, math.nan]), np.zeros(2), w)
    with pytest.raises(ValueError):
        gru_cell(np.zeros(2), np.array([math.inf, 0.0]), w)
