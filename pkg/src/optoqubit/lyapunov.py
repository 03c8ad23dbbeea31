"""Steady-state covariance from the Lyapunov equation A V + V A^T = -D."""

from __future__ import annotations

import warnings

import numpy as np

from .dynamics import MARGINAL_TOL

ILL_CONDITIONED = 1e12


class UnstableSystemError(ValueError):
    """The drift matrix has no stationary state."""


class ConvergenceError(RuntimeError):
    def __init__(self, message, v=None):
        super().__init__(message)
        self.v = v


class IllConditionedWarning(RuntimeWarning):
    pass


def _check_inputs(a: np.ndarray, d: np.ndarray) -> None:
    if not np.allclose(d, d.T, rtol=0.0, atol=1e-14):
        raise ValueError("diffusion matrix must be symmetric")
    if np.min(np.linalg.eigvalsh(d)) < -1e-14:
        raise ValueError("diffusion matrix must be positive semidefinite")
    max_re = float(np.max(np.linalg.eigvals(a).real))
    if max_re >= -MARGINAL_TOL:
        kind = "marginal" if max_re <= MARGINAL_TOL else "unstable"
        raise UnstableSystemError(f"{kind} drift (max Re eig = {max_re:.3g}): no stationary state")


def solve_lyapunov(a, d, *, full_output=False):
    """Stationary covariance of dV/dt = A V + V A^T + D.

    Solves the vectorised system (I kron A + A kron I) vec(V) = -vec(D) by LU
    and symmetrises the result.

    Parameters
    ----------
    a : (n, n) array
        Drift matrix; must be strictly stable.
    d : (n, n) array
        Symmetric positive semidefinite diffusion matrix.
    full_output : bool
        Also return the 2-norm condition number of the vectorised system.

    Returns
    -------
    v : (n, n) array
    cond : float
        Only when ``full_output`` is true.

    Raises
    ------
    UnstableSystemError
        If ``a`` has an eigenvalue with real part >= -1e-9.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    _check_inputs(a, d)
    n = a.shape[0]
    eye = np.eye(n)
    # row-major vec: vec(A V) = (A kron I) vec(V), vec(V A^T) = (I kron A) vec(V)
    op = np.kron(a, eye) + np.kron(eye, a)
    v = np.linalg.solve(op, -d.reshape(-1)).reshape(n, n)
    v = 0.5 * (v + v.T)
    cond = float(np.linalg.cond(op))
    if cond > ILL_CONDITIONED:
        warnings.warn(f"Lyapunov system condition number {cond:.3g}", IllConditionedWarning, stacklevel=2)
    if full_output:
        return v, cond
    return v


def residual(a, v, d) -> float:
    return float(np.max(np.abs(a @ v + v @ a.T + d)))


def _moment_generator(a: np.ndarray) -> np.ndarray:
    # matrix of V -> A V + V A^T in the row-major basis of unit matrices
    n = a.shape[0]
    cols = []
    for k in range(n * n):
        e = np.zeros(n * n)
        e[k] = 1.0
        e = e.reshape(n, n)
        cols.append((a @ e + e @ a.T).reshape(-1))
    return np.array(cols).T


def integrate_moments(a, d, v0, dt=0.01, t_max=None, tol=1e-10):
    """Classical RK4 integration of dV/dt = A V + V A^T + D up to ``t_max``.

    The flow is linear with constant coefficients, so one RK4 step is the
    affine map V -> V + K V + s with K = hL (I + hL/2 + (hL)^2/6 + (hL)^3/24).
    N identical steps are composed by repeated doubling, which gives the
    fixed-step RK4 result after N = round(t_max/dt) steps in O(log N) work.
    The map is kept in its deviation-from-identity form so that slow modes
    (rates ~1e-5) are not swamped by rounding against the identity.

    ``t_max`` defaults to 100 times the slowest relaxation time of the moments,
    1 / (2 |max Re eig(A)|).

    Raises
    ------
    ConvergenceError
        If max |dV/dt| at ``t_max`` is not below ``tol``. The last iterate is
        attached as ``.v``.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = a.shape[0]
    if t_max is None:
        slowest = 2.0 * abs(float(np.max(np.linalg.eigvals(a).real)))
        t_max = 100.0 / slowest
    steps = int(round(t_max / dt))

    hl = dt * _moment_generator(a)
    eye = np.eye(n * n)
    poly = eye + hl / 2 + hl @ hl / 6 + hl @ hl @ hl / 24
    k_step = hl @ poly
    s_step = dt * poly @ d.reshape(-1)

    # accumulated map x -> x + k_acc x + s_acc, starting from the identity
    k_acc = np.zeros_like(k_step)
    s_acc = np.zeros(n * n)
    k_pow, s_pow = k_step, s_step
    m = steps
    while m:
        if m & 1:
            # apply (k_pow, s_pow) after the accumulated map
            s_acc = s_acc + k_pow @ s_acc + s_pow
            k_acc = k_acc + k_pow + k_pow @ k_acc
        m >>= 1
        if m:
            s_pow = 2 * s_pow + k_pow @ s_pow
            k_pow = 2 * k_pow + k_pow @ k_pow

    x0 = v0.reshape(-1)
    v = (x0 + k_acc @ x0 + s_acc).reshape(n, n)
    v = 0.5 * (v + v.T)
    rate = np.max(np.abs(a @ v + v @ a.T + d))
    if rate >= tol:
        raise ConvergenceError(f"max |dV/dt| = {rate:.3g} at t = {steps * dt:.6g} (tol {tol:g})", v)
    return v
