"""Passive (multiport-interferometer) implementability of Gaussian channels.

A channel ``(X, Y, 0)`` on ``d`` modes has an orthosymplectic dilation with
``d`` environment modes exactly when ``X^T X + Y = I`` and some orthogonal
``Q`` makes ``X^T Q sqrt(Y)`` symmetric.  The dilation is then
``[[X, B], [-B, X]]`` with ``B = Q sqrt(Y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channels import ChannelParams, validity
from .exceptions import GaussianChannelError
from .numerics import DEFAULT_TOLERANCES, as_matrix, sqrt_psd, spectral_norm
from .symplectic import (
    SymplecticForm,
    _rng,
    form_matrix,
    orthosymplectic_blocks,
    symplectic_residual,
)

__all__ = [
    "Status",
    "InterferometerDecision",
    "trace_condition",
    "symmetry_residual",
    "polar_warm_start",
    "random_orthogonal",
    "find_q",
    "decide",
    "attenuator",
]


class Status(str, Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class InterferometerDecision:
    """Outcome of :func:`decide`.

    ``q``, ``b`` and ``l_inv`` are set only when ``status`` is ``YES``.
    ``failed`` lists every certificate that failed for a ``NO``; ``reason``
    is the first of them in pipeline order (validity, then trace identity).
    ``l_inv`` is orthosymplectic for ``J_{4d}`` and is also symplectic for
    ``J_{2d} (+) J_{2d}`` (the ``[d, d]`` form), so it can be used directly
    as the ``g`` of a :class:`~gaussian_channels.dilation.DilationSpec`.
    """

    status: Status
    reason: str
    symmetry_residual: float = np.inf
    q: np.ndarray | None = None
    b: np.ndarray | None = None
    l_inv: np.ndarray | None = None
    failed: tuple = ()


def trace_condition(ch, cfg=None):
    """``X^T X + Y = I`` and ``w = 0`` within tolerance."""
    cfg = cfg or DEFAULT_TOLERANCES
    n = ch.x.shape[0]
    err = np.linalg.norm(ch.x.T @ ch.x + ch.y - np.eye(n))
    return bool(err <= cfg.residual_tol * ch.scale() and np.linalg.norm(ch.w) <= cfg.residual_tol)


def symmetry_residual(x, q, sqrt_y):
    m = x.T @ q @ sqrt_y
    return float(np.linalg.norm(m - m.T))


def _polar(a):
    u, _, vt = np.linalg.svd(a)
    return u @ vt


def polar_warm_start(x, cfg=None):
    """Orthogonal polar factor of ``x``.

    When ``x`` commutes with ``J`` the factor is taken from the complex
    ``d x d`` matrix that ``x`` represents, so it commutes with ``J`` as well
    even for singular ``x``.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    x = as_matrix(x, "X")
    n = x.shape[0]
    d = n // 2
    j = form_matrix([d])
    if np.linalg.norm(x @ j - j @ x) > cfg.residual_tol * max(1.0, np.linalg.norm(x)):
        return _polar(x)
    t = x[:d, :d] + 1j * x[d:, :d]
    w = _polar(t)
    return np.block([[w.real, -w.imag], [w.imag, w.real]])


def random_orthogonal(n, seed=None):
    """Haar-distributed orthogonal matrix (QR of a Gaussian matrix, signs fixed)."""
    rng = _rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.where(np.diag(r) < 0, -1.0, 1.0)


def _skew_basis(n):
    iu, ju = np.triu_indices(n, 1)
    return iu, ju


def _descend(x, s, q, iters, target, restart, callback):
    n = q.shape[0]
    iu, ju = _skew_basis(n)
    xt = x.T

    def res_of(qq):
        m = xt @ qq @ s
        return m - m.T

    r = res_of(q)
    f = float(np.linalg.norm(r))
    if callback is not None:
        callback(restart, 0, f)
    for it in range(1, iters + 1):
        if f <= target or iu.size == 0:
            break
        # d/dOmega of skew(X^T Q (I + Omega) S) along E_ij - E_ji
        a = xt @ q
        jac = np.empty((n * n, iu.size))
        for c, (i, k) in enumerate(zip(iu, ju)):
            dm = np.outer(a[:, i], s[k]) - np.outer(a[:, k], s[i])
            jac[:, c] = (dm - dm.T).ravel()
        step = np.linalg.lstsq(jac, -r.ravel(), rcond=None)[0]
        grad = -(jac.T @ r.ravel())
        improved = False
        for direction in (step, grad):
            t = 1.0
            for _ in range(40):
                om = np.zeros((n, n))
                om[iu, ju] = t * direction
                om -= om.T
                cand = _polar(q @ (np.eye(n) + om))
                rc = res_of(cand)
                fc = float(np.linalg.norm(rc))
                if fc < f:
                    q, r, f = cand, rc, fc
                    improved = True
                    break
                t *= 0.5
            if improved:
                break
        if callback is not None:
            callback(restart, it, f)
        if not improved:
            break
    return q, f


def find_q(x, sqrt_y, restarts=32, iters=2000, seed=0, cfg=None, warm_start=True,
           initial=None, target=None, callback=None):
    """Search the orthogonal group for ``Q`` making ``X^T Q sqrt(Y)`` symmetric.

    Each restart runs Gauss-Newton on the skew-symmetric tangent space with a
    polar retraction and step halving (falling back to the gradient
    direction), so the residual ``||M - M^T||_F`` never increases within a
    restart.  Restart 0 starts from ``initial`` if given, else from
    :func:`polar_warm_start` when ``warm_start`` is true; the others start
    from Haar-random orthogonal matrices drawn from seeds spawned off
    ``seed``.

    Returns
    -------
    (ndarray, float)
        Best ``Q`` and its residual.  Ties go to the lowest restart index, so
        the result does not depend on the order restarts are evaluated in.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    x = as_matrix(x, "X")
    s = as_matrix(sqrt_y, "sqrt_y")
    n = x.shape[0]
    if s.shape != x.shape:
        raise ValueError(f"sqrt_y has shape {s.shape}, expected {x.shape}")
    if target is None:
        target = 1e-12 * max(1.0, spectral_norm(x) * spectral_norm(s))
    seeds = np.random.SeedSequence(seed).spawn(max(restarts, 1))
    best_q, best_f = None, np.inf
    for k in range(max(restarts, 1)):
        if k == 0 and initial is not None:
            q0 = _polar(as_matrix(initial, "initial"))
        elif k == 0 and warm_start:
            q0 = polar_warm_start(x, cfg)
        else:
            q0 = random_orthogonal(n, np.random.default_rng(seeds[k]))
        q, f = _descend(x, s, q0, iters, target, k, callback)
        if f < best_f:
            best_q, best_f = q, f
        if best_f <= target:
            break
    return best_q, float(best_f)


def decide(ch, restarts=32, iters=2000, seed=0, cfg=None):
    """Decide whether ``ch`` can be implemented by a multiport interferometer.

    ``NO`` is only returned with a certificate (validity or the trace
    identity fails).  If no ``Q`` is found the answer is ``UNDECIDED``.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    failed = []
    if not validity(ch, cfg).valid:
        failed.append("invalid_channel")
    if not trace_condition(ch, cfg):
        failed.append("trace_condition_failed")
    if failed:
        return InterferometerDecision(Status.NO, failed[0], failed=tuple(failed))
    d = ch.d
    tol = cfg.residual_tol
    s = sqrt_psd(ch.y, cfg)
    q, f = find_q(ch.x, s, restarts=restarts, iters=iters, seed=seed, cfg=cfg)
    if f > tol:
        return InterferometerDecision(Status.UNDECIDED, "search_exhausted", f)
    b = q @ s
    l_inv = np.block([[ch.x, b], [-b, ch.x]])
    try:
        orthosymplectic_blocks(l_inv, cfg)
    except GaussianChannelError:
        return InterferometerDecision(Status.UNDECIDED, "search_exhausted", f)
    if symplectic_residual(l_inv, SymplecticForm([d, d])) > tol:
        return InterferometerDecision(Status.UNDECIDED, "search_exhausted", f)
    return InterferometerDecision(Status.YES, "q_found", f, q, b, l_inv)


def attenuator(form, theta):
    """Beam splitter with vacuum: ``X = cos(theta) I``, ``Y = sin(theta)^2 I``."""
    form = form if isinstance(form, SymplecticForm) else SymplecticForm(form)
    n = form.dim
    return ChannelParams(np.cos(theta) * np.eye(n), np.sin(theta) ** 2 * np.eye(n))
