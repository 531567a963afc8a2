"""Central finite-difference gradient verification used by several tests."""

import numpy as np

from ntg.net import init_params, loss_and_grad


def max_relative_error(config, samples, seed=0, step=1e-4, skip_below=1e-7):
    """Worst relative disagreement between analytic and numeric gradients."""
    rng = np.random.default_rng(seed)
    params = init_params(config, rng)
    _, grads = loss_and_grad(params, samples, clip=None)
    worst = 0.0
    for name, arr in params.tensors.items():
        flat = arr.ravel()
        gflat = grads[name].ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            loss_plus, _ = loss_and_grad(params, samples, clip=None)
            flat[i] = orig - step
            loss_minus, _ = loss_and_grad(params, samples, clip=None)
            flat[i] = orig
            numeric = (loss_plus - loss_minus) / (2.0 * step)
            analytic = gflat[i]
            denom = max(abs(numeric), abs(analytic))
            if denom > skip_below:
                worst = max(worst, abs(numeric - analytic) / denom)
            else:
                assert abs(numeric - analytic) < skip_below, (name, i)
    return worst
