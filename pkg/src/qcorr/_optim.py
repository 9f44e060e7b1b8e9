"""Deterministic manifold optimizers behind the correlation measures.

Measurement bases live on the unitary group of the measured subsystem and
ensemble isometries on the complex Stiefel manifold; both are minimized by
Riemannian gradient descent with Armijo backtracking. Gradients are exact
(Wirtinger calculus), so a step costs little more than an objective
evaluation. Determinism comes from per-start generators derived from
explicit integer keys.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

LN2 = float(np.log(2.0))


def derive_rng(*keys: int) -> np.random.Generator:
    entropy = [int(k) & 0xFFFFFFFFFFFFFFFF for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian with phase fix."""
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def haar_isometry(k: int, r: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed k x r isometry (columns orthonormal)."""
    z = rng.standard_normal((k, r)) + 1j * rng.standard_normal((k, r))
    q, rr = np.linalg.qr(z)
    diag = np.diagonal(rr)
    return q * (diag / np.abs(diag))


class DescentResult(NamedTuple):
    value: float
    point: np.ndarray
    converged: bool
    iterations: int


def _polar(a: np.ndarray) -> np.ndarray:
    # a (k x r) full column rank; returns the isometry factor of a's polar form
    lam, w = np.linalg.eigh(a.conj().T @ a)
    lam = np.clip(lam, 1e-30, None)
    return a @ (w * (1.0 / np.sqrt(lam))) @ w.conj().T


def _descend(
    value: Callable[[np.ndarray], float],
    value_and_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x0: np.ndarray,
    direction: Callable[[np.ndarray, np.ndarray], np.ndarray],
    retract: Callable[[np.ndarray, np.ndarray, float], np.ndarray],
    max_iterations: int,
    value_tol: float,
    grad_tol: float = 1e-8,
) -> DescentResult:
    """Shared Armijo backtracking loop; ``direction`` maps (x, grad) to a
    Riemannian descent direction whose directional derivative is at most
    -||direction||^2 (exact for the unitary case, a lower bound for Stiefel)."""
    x = x0
    f, g = value_and_grad(x)
    step = 0.5
    stalls = 0
    converged = False
    it = 0
    for it in range(1, max_iterations + 1):
        d = direction(x, g)
        slope = float(np.vdot(d, d).real)
        if slope < grad_tol**2:
            converged = True
            break
        accepted = False
        while step > 1e-13:
            x_try = retract(x, d, step)
            f_try = value(x_try)
            if f_try <= f - 0.3 * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            # no descent at line-search resolution: numerically stationary
            converged = True
            break
        drop = f - f_try
        x = x_try
        f, g = value_and_grad(x)
        step = min(step * 2.0, 4.0)
        if drop < value_tol:
            stalls += 1
            if stalls >= 2:
                converged = True
                break
        else:
            stalls = 0
    return DescentResult(float(f), x, converged, it)


def descend_unitary(
    value: Callable[[np.ndarray], float],
    value_and_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
    u0: np.ndarray,
    max_iterations: int,
    value_tol: float,
) -> DescentResult:
    """Minimize over the unitary group; gradients in the Wirtinger convention
    df = 2 Re tr(G^dag dU)."""

    def direction(u: np.ndarray, g: np.ndarray) -> np.ndarray:
        b = g @ u.conj().T
        return b - b.conj().T  # anti-Hermitian; slope along -omega is -||omega||^2

    def retract(u: np.ndarray, omega: np.ndarray, eta: float) -> np.ndarray:
        lam, v = np.linalg.eigh(1j * omega)
        phases = np.exp(1j * eta * lam)
        return (v * phases) @ v.conj().T @ u

    return _descend(value, value_and_grad, u0, direction, retract, max_iterations, value_tol)


def descend_stiefel(
    value: Callable[[np.ndarray], float],
    value_and_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
    v0: np.ndarray,
    max_iterations: int,
    value_tol: float,
) -> DescentResult:
    """Minimize over k x r isometries (complex Stiefel manifold)."""

    def direction(v: np.ndarray, g: np.ndarray) -> np.ndarray:
        vg = v.conj().T @ g
        return g - v @ ((vg + vg.conj().T) * 0.5)

    def retract(v: np.ndarray, delta: np.ndarray, eta: float) -> np.ndarray:
        return _polar(v - eta * delta)

    return _descend(value, value_and_grad, v0, direction, retract, max_iterations, value_tol)
