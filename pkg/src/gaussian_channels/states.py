"""Gaussian states as ``(mean, covariance)`` pairs in the blocked real convention."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidTemperature, NotPSD, StructuralError
from .numerics import (
    DEFAULT_TOLERANCES,
    HermitianPair,
    as_symmetric,
    as_vector,
    psd_min_eig,
    spectral_norm,
)
from .symplectic import (
    GaussianUnitary,
    SymplecticForm,
    _as_form,
    _rng,
    form_matrix,
    random_symplectic,
    symplectic_inverse,
)

__all__ = [
    "GaussianState",
    "is_admissible_cov",
    "char_fn",
    "gu_action",
    "vacuum",
    "thermal",
    "random_state",
]


def is_admissible_cov(s, form, cfg=None):
    """Check ``s + iJ >= 0``.

    Returns
    -------
    (bool, float)
        Verdict and the minimum eigenvalue of ``s + iJ``.  The verdict
        allows ``-eig_tol * max(1, ||s||_2)`` of slack.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    form = _as_form(form)
    s = as_symmetric(s, cfg, name="cov")
    if s.shape[0] != form.dim:
        raise StructuralError(f"cov has shape {s.shape}, {form!r} needs {form.dim}")
    min_eig = psd_min_eig(HermitianPair(s, form_matrix(form)))
    return min_eig >= -cfg.eig_tol * max(1.0, spectral_norm(s)), min_eig


@dataclass(frozen=True)
class GaussianState:
    """Gaussian state with mean ``m`` and covariance ``S`` (``S + iJ >= 0``).

    Inadmissible covariances are rejected, never projected.
    """

    mean: np.ndarray
    cov: np.ndarray
    form: SymplecticForm

    def __init__(self, mean, cov, form=None, cfg=None):
        cov = np.asarray(cov, dtype=float)
        if form is None:
            if cov.ndim != 2 or cov.shape[0] % 2:
                raise StructuralError(f"cannot infer modes from cov shape {cov.shape}")
            form = SymplecticForm([cov.shape[0] // 2])
        form = _as_form(form)
        cov = as_symmetric(cov, cfg, name="cov")
        mean = as_vector(mean, form.dim, "mean")
        ok, min_eig = is_admissible_cov(cov, form, cfg)
        if not ok:
            raise NotPSD(f"cov + iJ has eigenvalue {min_eig:.3e}; not a covariance matrix")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "form", form)

    @property
    def d(self):
        return self.form.modes


def char_fn(st, z):
    """Characteristic function ``exp(-i m^T z - z^T S z / 2)``.

    Returns
    -------
    (float, float)
        ``(modulus, phase)``; the phase is ``-m^T z`` and is not wrapped.
    """
    z = as_vector(z, st.form.dim, "z")
    return float(np.exp(-0.5 * z @ st.cov @ z)), float(-st.mean @ z)


def gu_action(g, st, cfg=None):
    """State after ``W(u) Gamma(L)``: mean ``L^{-T} m + 2 J u``, cov ``L^{-T} S L^{-1}``."""
    if g.form != st.form:
        raise StructuralError(f"form mismatch: {g.form!r} vs {st.form!r}")
    l_inv = symplectic_inverse(g.l, g.form, cfg)
    j = form_matrix(g.form)
    mean = l_inv.T @ st.mean + 2 * j @ g.u
    cov = l_inv.T @ st.cov @ l_inv
    return GaussianState(mean, (cov + cov.T) / 2, g.form, cfg)


def vacuum(form):
    form = _as_form(form)
    return GaussianState(np.zeros(form.dim), np.eye(form.dim), form)


def thermal(form, nus):
    """Thermal state with covariance ``diag(nu, nu)``; each ``nu >= 1``."""
    form = _as_form(form)
    nus = np.asarray(nus, dtype=float).reshape(-1)
    if nus.shape != (form.modes,):
        raise StructuralError(f"need {form.modes} values, got {nus.shape[0]}")
    if np.any(nus < 1) or not np.all(np.isfinite(nus)):
        raise InvalidTemperature(f"thermal parameters must be >= 1, got {nus}")
    return GaussianState(np.zeros(form.dim), np.diag(_per_mode(form, nus)), form)


def _per_mode(form, values):
    out = np.empty(form.dim)
    qs, ps = form.slots()
    out[qs] = values
    out[ps] = values
    return out


def random_state(form, seed=None, pure=False):
    """Random admissible state ``(m, L^T N L)`` with ``L`` random symplectic.

    ``N`` is thermal with ``nu_i = 1 + |Exp(1) sample|`` (all ones when
    ``pure=True``).
    """
    form = _as_form(form)
    rng = _rng(seed)
    l = random_symplectic(form, rng)
    nus = np.ones(form.modes) if pure else 1.0 + np.abs(rng.standard_exponential(form.modes))
    mean = rng.standard_normal(form.dim)
    cov = l.T @ np.diag(_per_mode(form, nus)) @ l
    return GaussianState(mean, (cov + cov.T) / 2, form)


def displacement(u, form=None):
    """Convenience constructor for a pure displacement ``(u, I)``."""
    u = np.asarray(u, dtype=float)
    form = SymplecticForm([u.size // 2]) if form is None else _as_form(form)
    return GaussianUnitary(u, np.eye(form.dim), form)
