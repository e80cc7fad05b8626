"""Central finite-difference gradient oracle.

Independent of the tape: it only re-evaluates a scalar-valued closure under
elementwise parameter perturbations. Used to certify every backward rule.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from graphzero.nn.autodiff import Tensor


def finite_difference(f: Callable[[], float], param: Tensor, step: float = 1e-4) -> np.ndarray:
    """d f / d param via central differences, one element at a time."""
    grad = np.zeros_like(param.data, dtype=np.float64)
    flat = param.data.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        up = f()
        flat[i] = orig - step
        down = f()
        flat[i] = orig
        gflat[i] = (up - down) / (2.0 * step)
    return grad


def max_relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    analytic = np.asarray(analytic, dtype=np.float64)
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-6)
    return float(np.max(np.abs(analytic - numeric) / denom))


def check_params(loss_fn: Callable[[], "Tensor"], params: dict[str, Tensor],
                 step: float = 1e-4) -> dict[str, float]:
    """Map each parameter name to the max relative error of its gradient."""
    for p in params.values():
        p.zero_grad()
    loss = loss_fn()
    loss.backward()
    analytic = {name: (np.zeros_like(p.data) if p.grad is None else p.grad.copy())
                for name, p in params.items()}
    errors = {}
    for name, p in params.items():
        numeric = finite_difference(lambda: float(loss_fn().data), p, step)
        errors[name] = max_relative_error(analytic[name], numeric)
    return errors


def relu_kink_distance(loss_fn: Callable[[], "Tensor"]) -> float:
    """Smallest |pre-activation| over every ReLU evaluated by ``loss_fn``.

    Finite differences are only meaningful at generic points: if any ReLU
    input sits at (or within the FD step of) zero, the loss is locally
    non-smooth there and the comparison is undefined. Callers should assert
    a margin well above the FD step before checking gradients.
    """
    from graphzero.nn import autodiff as ad

    seen: list[float] = []
    orig = ad.relu

    def spy(x):
        seen.append(float(np.abs(x.data).min()))
        return orig(x)

    ad.relu = spy
    try:
        with ad.no_grad():
            loss_fn()
    finally:
        ad.relu = orig
    return min(seen)
