"""The ``(X, Y, w)`` calculus of Gaussian channels.

A channel acts on Gaussian states by ``m -> X^T m + w`` and
``S -> X^T S X + Y``.  It is a quantum channel exactly when
``Y - i(J - X^T J X) >= 0``; the ``+i`` version is equivalent because the
two Hermitian matrices are transposes of each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import InvalidChannel, StructuralError
from .numerics import (
    DEFAULT_TOLERANCES,
    HermitianPair,
    as_matrix,
    as_symmetric,
    as_vector,
    pinv_rank,
    psd_min_eig,
    spectral_norm,
)
from .states import GaussianState, is_admissible_cov, random_state
from .symplectic import SymplecticForm, form_matrix

__all__ = [
    "ChannelParams",
    "ValidityReport",
    "Verdict",
    "SampleResult",
    "CounterexampleReport",
    "noise_form",
    "validity",
    "apply",
    "dual_weyl",
    "compose",
    "fd0_member",
    "fd_member_sample",
    "fd_sufficient",
    "env_mode_bound",
    "fd_counterexample",
    "transpose_map_params",
    "identity_channel",
]


@dataclass(frozen=True)
class ChannelParams:
    """Channel parameters ``X`` (2d x 2d), symmetric ``Y`` and displacement ``w``."""

    x: np.ndarray
    y: np.ndarray
    w: np.ndarray

    def __init__(self, x, y, w=None, cfg=None):
        x = as_matrix(x, "X")
        if x.shape[0] % 2:
            raise StructuralError(f"X must be 2d x 2d, got {x.shape}")
        y = as_symmetric(y, cfg, name="Y")
        if y.shape != x.shape:
            raise StructuralError(f"Y has shape {y.shape}, expected {x.shape}")
        w = np.zeros(x.shape[0]) if w is None else as_vector(w, x.shape[0], "w")
        for arr in (x, y, w):
            arr.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "w", w)

    @property
    def d(self):
        return self.x.shape[0] // 2

    @property
    def form(self):
        return SymplecticForm([self.d])

    def scale(self):
        return 1.0 + spectral_norm(self.y) + spectral_norm(self.x) ** 2


def identity_channel(d):
    n = 2 * d
    return ChannelParams(np.eye(n), np.zeros((n, n)))


def noise_form(x):
    """``K = J - X^T J X``, the part of ``J`` that ``X`` fails to preserve."""
    x = np.asarray(x, dtype=float)
    j = form_matrix([x.shape[0] // 2])
    k = j - x.T @ j @ x
    return (k - k.T) / 2


@dataclass(frozen=True)
class ValidityReport:
    min_eig_minus: float
    min_eig_plus: float
    y_min_eig: float
    valid: bool
    scale: float


def validity(ch, cfg=None):
    """Certify ``Y - iK >= 0`` (and report ``Y + iK`` for the transpose check)."""
    cfg = cfg or DEFAULT_TOLERANCES
    k = noise_form(ch.x)
    minus = psd_min_eig(HermitianPair(ch.y, -k))
    plus = psd_min_eig(HermitianPair(ch.y, k))
    y_min = float(np.linalg.eigvalsh(ch.y)[0])
    scale = ch.scale()
    return ValidityReport(
        min_eig_minus=minus,
        min_eig_plus=plus,
        y_min_eig=y_min,
        valid=bool(minus >= -cfg.eig_tol * scale),
        scale=scale,
    )


def _require_valid(ch, cfg):
    rep = validity(ch, cfg)
    if not rep.valid:
        raise InvalidChannel(f"Y - i(J - X^T J X) has eigenvalue {rep.min_eig_minus:.3e}")
    return rep


def _transform(ch, mean, cov):
    out = ch.x.T @ cov @ ch.x + ch.y
    return ch.x.T @ mean + ch.w, (out + out.T) / 2


def apply(ch, st, cfg=None):
    """Output state ``(X^T m + w, X^T S X + Y)``; the channel must be valid."""
    if st.form != ch.form:
        raise StructuralError(f"state form {st.form!r} does not match channel {ch.form!r}")
    _require_valid(ch, cfg)
    mean, cov = _transform(ch, st.mean, st.cov)
    return GaussianState(mean, cov, ch.form, cfg)


def dual_weyl(ch, z):
    """Heisenberg-picture action on ``W(z)``.

    Returns ``(log_modulus, phase, Xz)`` with
    ``Psi*(W(z)) = exp(log_modulus + i*phase) W(Xz)``.
    """
    z = as_vector(z, ch.x.shape[0], "z")
    return float(-0.5 * z @ ch.y @ z), float(-ch.w @ z), ch.x @ z


def compose(first, second):
    """Channel for ``second`` applied after ``first``."""
    if first.x.shape != second.x.shape:
        raise StructuralError("channels act on different numbers of modes")
    x2 = second.x
    y = x2.T @ first.y @ x2 + second.y
    return ChannelParams(first.x @ x2, (y + y.T) / 2, x2.T @ first.w + second.w)


def _check_form(form, n):
    if form is None:
        return SymplecticForm([n // 2])
    form = form if isinstance(form, SymplecticForm) else SymplecticForm(form)
    if len(form.blocks) != 1 or form.dim != n:
        raise StructuralError(f"channels live on a single block of {n // 2} modes, got {form!r}")
    return form


def fd0_member(x, y, form=None, cfg=None):
    """``Y + i(J - X^T J X) >= 0`` within tolerance."""
    ch = ChannelParams(x, y, cfg=cfg)
    _check_form(form, ch.x.shape[0])
    return validity(ch, cfg).valid


class Verdict(str, Enum):
    FALSIFIED = "falsified"
    NOT_FALSIFIED = "not_falsified"


@dataclass(frozen=True)
class SampleResult:
    verdict: Verdict
    witness: np.ndarray | None = None
    witness_index: int | None = None
    min_eig: float = np.inf


def fd_member_sample(x, y, form=None, n_samples=500, seed=0, cfg=None):
    """Monte-Carlo search for ``S`` in CM(d) with ``X^T S X + Y`` outside CM(d).

    Sample ``i`` uses its own seed spawned from ``seed``, and the reported
    witness is the lowest-index failure, so the answer does not depend on how
    the samples are scheduled.  ``NOT_FALSIFIED`` is not a membership proof.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    x = as_matrix(x, "X")
    y = as_symmetric(y, cfg, name="Y")
    form = _check_form(form, x.shape[0])
    seeds = np.random.SeedSequence(seed).spawn(n_samples)
    worst = np.inf
    for i, ss in enumerate(seeds):
        s = random_state(form, np.random.default_rng(ss)).cov
        ok, min_eig = is_admissible_cov(x.T @ s @ x + y, form, cfg)
        worst = min(worst, min_eig)
        if not ok:
            return SampleResult(Verdict.FALSIFIED, s, i, min_eig)
    return SampleResult(Verdict.NOT_FALSIFIED, None, None, worst)


def fd_sufficient(y, form=None, cfg=None):
    """``Y + iJ >= 0`` is enough for ``Y`` in F_d(X) whatever ``X`` is."""
    y = as_matrix(y, "Y")
    return is_admissible_cov(y, _check_form(form, y.shape[0]), cfg)[0]


def env_mode_bound(ch, cfg=None):
    """``rank Y - rank(Y - K Y^+ K^T)`` with ``K = J - X^T J X``.

    Only an upper-bound style estimate: the single-mode attenuator gives 2
    although one environment mode suffices.  Ranks are taken relative to
    ``||Y||_2`` so that cancellation noise in the difference is not counted.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    _require_valid(ch, cfg)
    k = noise_form(ch.x)
    y_pinv, rank_y = pinv_rank(ch.y, cfg)
    rest = ch.y - k @ y_pinv @ k.T
    _, rank_rest = pinv_rank(rest, cfg, scale=spectral_norm(ch.y))
    return rank_y - rank_rest


@dataclass(frozen=True)
class CounterexampleReport:
    d: int
    min_eig: float
    fd0_member: bool
    fd_sufficient: bool


def fd_counterexample(d):
    """``X = [[0, I], [I, 0]]``, ``Y = I``: in F_d(X) but not in F_d^0(X)."""
    eye, zero = np.eye(d), np.zeros((d, d))
    ch = ChannelParams(np.block([[zero, eye], [eye, zero]]), np.eye(2 * d))
    rep = validity(ch)
    return ch, CounterexampleReport(
        d=d,
        min_eig=rep.min_eig_plus,
        fd0_member=rep.valid,
        fd_sufficient=fd_sufficient(ch.y),
    )


def transpose_map_params(d):
    """Covariance-level data of the transpose map: ``X = diag(I, -I)``, ``Y = 0``."""
    x = np.diag(np.concatenate([np.ones(d), -np.ones(d)]))
    return ChannelParams(x, np.zeros((2 * d, 2 * d)))
