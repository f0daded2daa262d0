"""Shared numerics: damped Newton for small complex systems, angle helpers.

Every steady-state problem in this package is a system of a few complex
equations F(z, conj z) = 0 that is analytic in z and conj z separately but not
holomorphic in z alone.  We therefore iterate Newton on the equivalent real
system, with the exact 2n x 2n real Jacobian assembled from the two Wirtinger
blocks P = dF/dz and Q = dF/d(conj z) supplied analytically by the caller.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Tuple

import numpy as np
from scipy import optimize

TWO_PI = 2.0 * np.pi


def wrap_angle(phi):
    """Wrap an angle (scalar or array) to the principal interval (-pi, pi]."""
    out = np.remainder(np.asarray(phi, dtype=float), TWO_PI)
    out = np.where(out > np.pi, out - TWO_PI, out)
    return float(out) if np.ndim(phi) == 0 else out


def wrap_half_turn(theta):
    """Wrap a quadrature phase to [0, pi); homodyne spectra are pi-periodic."""
    out = np.remainder(np.asarray(theta, dtype=float), np.pi)
    return float(out) if np.ndim(theta) == 0 else out


def realify_jacobian(P, Q) -> np.ndarray:
    """Real Jacobian of (Re F, Im F) with respect to (Re z, Im z).

    P and Q are the n x n complex Wirtinger blocks dF/dz and dF/d(conj z).
    Rows and columns interleave as (Re_1, Im_1, Re_2, Im_2, ...).
    """
    P = np.atleast_2d(np.asarray(P, dtype=complex))
    Q = np.atleast_2d(np.asarray(Q, dtype=complex))
    n = P.shape[0]
    S = P + Q
    D = P - Q
    J = np.empty((2 * n, 2 * n))
    J[0::2, 0::2] = S.real
    J[0::2, 1::2] = -D.imag
    J[1::2, 0::2] = S.imag
    J[1::2, 1::2] = D.real
    return J


class NewtonResult(NamedTuple):
    z: np.ndarray
    converged: bool
    residual: float  # max-norm of F at the returned point
    iterations: int


def newton_complex(
    fun: Callable[[np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
    z0,
    tol: float,
    max_iter: int = 80,
    min_step: float = 2.0 ** -24,
) -> NewtonResult:
    """Damped Newton iteration for F(z, conj z) = 0, z in C^n.

    fun(z) returns the complex residual vector, jac(z) the Wirtinger blocks
    (P, Q).  Steps are backtracked (halving) until the Euclidean residual norm
    actually decreases; tol is an absolute bound on the max-norm of F.  When
    the plain damped iteration stalls at a non-root minimum of |F| (it does on
    folded Duffing branches), a Powell dogleg solve takes over from the same
    starting point.
    """
    z0 = np.array(z0, dtype=complex).ravel().copy()

    def damped(zs, iters):
        z = zs.copy()
        F = np.asarray(fun(z), dtype=complex).ravel()
        norm = np.linalg.norm(F)
        for _ in range(iters):
            if np.max(np.abs(F)) <= tol:
                return z, F
            J = realify_jacobian(*jac(z))
            rhs = np.empty(2 * F.size)
            rhs[0::2] = -F.real
            rhs[1::2] = -F.imag
            try:
                step = np.linalg.solve(J, rhs)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(J, rhs, rcond=None)[0]
            if not np.all(np.isfinite(step)):
                return z, F
            dz = step[0::2] + 1j * step[1::2]
            t = 1.0
            while t >= min_step:
                z_try = z + t * dz
                F_try = np.asarray(fun(z_try), dtype=complex).ravel()
                norm_try = np.linalg.norm(F_try)
                if norm_try < norm * (1.0 - 0.25 * t) or np.max(np.abs(F_try)) <= tol:
                    break
                t *= 0.5
            else:
                return z, F  # stalled at a non-root minimum of |F|
            z, F, norm = z_try, F_try, norm_try
        return z, F

    z, F = damped(z0, max_iter)
    if np.max(np.abs(F)) <= tol:
        return NewtonResult(z, True, float(np.max(np.abs(F))), max_iter)

    # dogleg rescue (from the stall point, then the original seed), with a
    # short plain-Newton polish since hybr's own exit sits above our tol
    def real_fun(x):
        Fz = np.asarray(fun(x[0::2] + 1j * x[1::2]), dtype=complex).ravel()
        out = np.empty(2 * Fz.size)
        out[0::2] = Fz.real
        out[1::2] = Fz.imag
        return out

    def real_jac(x):
        return realify_jacobian(*jac(x[0::2] + 1j * x[1::2]))

    x0 = np.empty(2 * z.size)
    x0[0::2] = z.real
    x0[1::2] = z.imag
    sol = optimize.root(real_fun, x0, jac=real_jac, method="hybr")
    z_try, F_try = damped(sol.x[0::2] + 1j * sol.x[1::2], 10)
    r_try = float(np.max(np.abs(F_try)))
    if r_try <= tol:
        return NewtonResult(z_try, True, r_try, max_iter)
    if r_try < np.max(np.abs(F)):
        return NewtonResult(z_try, False, r_try, max_iter)
    return NewtonResult(z, False, float(np.max(np.abs(F))), max_iter)


def parabolic_peak(x, y) -> Tuple[float, float]:
    """Refine the argmax of sampled y(x) with the parabola through its
    three surrounding samples.  Falls back to the raw grid maximum at the
    edges or when the local curvature is not concave."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i = int(np.argmax(y))
    if i == 0 or i == x.size - 1:
        return float(x[i]), float(y[i])
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    if denom == 0.0:
        return float(x1), float(y1)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    if a >= 0.0:
        return float(x1), float(y1)
    xp = -b / (2.0 * a)
    if not (min(x0, x2) <= xp <= max(x0, x2)):
        return float(x1), float(y1)
    c = y1 - a * x1 * x1 - b * x1
    return float(xp), float(a * xp * xp + b * xp + c)
