"""Stinespring dilations of Gaussian channels at the covariance level.

For a valid channel ``(X, Y, w)`` on ``d`` modes we build a
``(J_{2d} (+) J_{4d})``-symplectic matrix

    g = [[X,   *],
         [L21, *]]      with  L21^T L21 = Y,  L21^T J_{4d} L21 = J - X^T J X,

so that the unitary ``W(u) Gamma(g^{-1})`` acting on the system and ``2d``
vacuum environment modes, followed by the partial trace, reproduces the
channel.  ``u = J^T w / 2 (+) 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .channels import ChannelParams, _check_form, _require_valid, _transform, noise_form, validity
from .exceptions import InvalidChannel, StructuralError
from .numerics import DEFAULT_TOLERANCES, as_matrix, as_vector, skew_canonical, spectral_norm
from .states import random_state
from .symplectic import (
    SymplecticForm,
    _mode_map,
    _rng,
    contraction_embed,
    form_matrix,
    permute_form,
    random_symplectic,
    symplectic_extend,
    symplectic_residual,
)

__all__ = [
    "DilationSpec",
    "L21Info",
    "build_l21",
    "build_dilation",
    "induced_channel",
    "verify_dilation",
    "random_dilation",
    "random_valid_channel",
]


@dataclass(frozen=True)
class DilationSpec:
    """Symplectic ``g`` on system (+) environment and the Weyl displacement ``u``.

    ``g`` plays the role of ``L^{-1}`` in the block formula: the physical
    unitary is ``W(u) Gamma(g^{-1})``.
    """

    g: np.ndarray
    u: np.ndarray
    d_in: int
    d_env: int

    def __init__(self, g, u, d_in, d_env):
        d_in, d_env = int(d_in), int(d_env)
        n = 2 * (d_in + d_env)
        g = as_matrix(g, "G")
        if g.shape != (n, n):
            raise StructuralError(f"G has shape {g.shape}, expected {(n, n)}")
        u = as_vector(u, n, "u")
        g.flags.writeable = False
        u.flags.writeable = False
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "d_in", d_in)
        object.__setattr__(self, "d_env", d_env)

    @property
    def form(self):
        return SymplecticForm([self.d_in, self.d_env])

    def residual(self):
        return symplectic_residual(self.g, self.form)


@dataclass(frozen=True)
class L21Info:
    l21: np.ndarray
    d_vals: np.ndarray
    rank_y: int
    regularized: bool
    y_shift: float


def build_l21(x, y, form=None, cfg=None, singular="deflate", return_info=False):
    """Lower-left block ``L21`` (4d x 2d) of a symplectic dilation.

    With ``T = Y^{-1/2} K Y^{-1/2}`` brought to ``R^T T R = [[0, D], [-D, 0]]``
    and ``Q`` from :func:`contraction_embed` applied to ``D``,
    ``L21 = Q^T R^T Y^{1/2}``.

    Parameters
    ----------
    singular : {"deflate", "regularize"}
        Treatment of a rank-deficient ``Y``.  ``"deflate"`` uses the
        pseudo-inverse square root; validity forces ``K`` to vanish on
        ``ker Y`` so this is exact.  ``"regularize"`` runs the invertible
        construction on ``Y + eps I`` with ``eps = reg_eps (1 + ||Y||_2)``,
        which recovers ``Y`` only up to ``eps``.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    ch = ChannelParams(x, y, cfg=cfg)
    _check_form(form, ch.x.shape[0])
    if not validity(ch, cfg).valid:
        raise InvalidChannel("cannot dilate: Y + i(J - X^T J X) is not PSD")
    if singular not in ("deflate", "regularize"):
        raise ValueError(f"unknown singular treatment {singular!r}")
    k = noise_form(ch.x)
    y = ch.y
    ynorm = spectral_norm(y)
    lam, v = np.linalg.eigh(y)
    cut = cfg.eig_tol * max(ynorm, 0.0)
    shift = 0.0
    if singular == "regularize" and lam[0] <= cut:
        shift = cfg.reg_eps * (1.0 + ynorm)
        lam = lam + shift
        cut = 0.0
    keep = lam > cut
    if ynorm == 0.0 and shift == 0.0:
        keep[:] = False
    lam_c = np.where(keep, lam, 0.0)
    root = (v * np.sqrt(lam_c)) @ v.T
    inv_root = (v[:, keep] / np.sqrt(lam_c[keep])) @ v[:, keep].T
    t = inv_root @ k @ inv_root
    sc = skew_canonical((t - t.T) / 2, cfg)
    d_vals = sc.d_vals
    q = contraction_embed(np.diag(np.clip(d_vals, 0.0, 1.0)), cfg)
    l21 = q.T @ sc.r.T @ root
    if return_info:
        return L21Info(l21, d_vals, int(np.count_nonzero(keep)), shift > 0, shift)
    return l21


def build_dilation(ch, cfg=None, singular="deflate"):
    """Covariance-level Stinespring dilation with ``2d`` environment modes.

    The columns ``X e_i (+) L21 e_i`` form a symplectic set for
    ``J_{2d} (+) J_{4d}``.  They are relabelled into the single-block
    ``J_{6d}`` ordering, completed by symplectic Gram-Schmidt and relabelled
    back, so the top-left block of ``g`` is ``X`` exactly.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    _require_valid(ch, cfg)
    d = ch.d
    l21 = build_l21(ch.x, ch.y, cfg=cfg, singular=singular)
    cols = np.vstack([ch.x, l21])  # (6d, 2d): u_1..u_d, v_1..v_d
    mixed, single = SymplecticForm([d, 2 * d]), SymplecticForm([3 * d])
    to_single = cols[_mode_map(mixed, single)]
    m = symplectic_extend(to_single[:, :d], to_single[:, d:], single, cfg)
    g = permute_form(m, single, mixed)
    j = form_matrix([d])
    u = np.concatenate([0.5 * j.T @ ch.w, np.zeros(4 * d)])
    return DilationSpec(g, u, d, 2 * d)


def induced_channel(dil):
    """``(X, Y, w) = (g11, g21^T g21, 2 J u1)`` read off a dilation."""
    n = 2 * dil.d_in
    g11 = dil.g[:n, :n]
    g21 = dil.g[n:, :n]
    y = g21.T @ g21
    w = 2 * form_matrix([dil.d_in]) @ dil.u[:n]
    return ChannelParams(g11, (y + y.T) / 2, w)


def stinespring_marginal(dil, mean, cov):
    """System marginal of ``W(u) Gamma(g^{-1})`` applied to ``(mean, cov) (+) vacuum``.

    Uses ``g`` directly (``(L^{-1})^T = g^T``), so no symplectic check is
    made; this lets perturbed dilations be compared too.
    """
    n = 2 * dil.d_in
    full_mean = np.concatenate([mean, np.zeros(2 * dil.d_env)])
    full_cov = np.zeros_like(dil.g)
    full_cov[:n, :n] = cov
    full_cov[n:, n:] = np.eye(2 * dil.d_env)
    j = form_matrix(dil.form)
    out_mean = dil.g.T @ full_mean + 2 * j @ dil.u
    out_cov = dil.g.T @ full_cov @ dil.g
    return out_mean[:n], out_cov[:n, :n]


def verify_dilation(dil, ch, n_states=20, seed=0, cfg=None):
    """Largest deviation between ``ch`` and the dilation over random input states.

    For each of ``n_states`` random states (seeds spawned from ``seed``) the
    direct output of the channel is compared with the Stinespring marginal;
    the maximum entrywise deviation of means and covariances is returned.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    if dil.d_in != ch.d:
        raise StructuralError(f"dilation acts on {dil.d_in} modes, channel on {ch.d}")
    worst = 0.0
    for ss in np.random.SeedSequence(seed).spawn(n_states):
        st = random_state(ch.form, np.random.default_rng(ss))
        m1, s1 = _transform(ch, st.mean, st.cov)
        m2, s2 = stinespring_marginal(dil, st.mean, st.cov)
        worst = max(worst, np.abs(m1 - m2).max(), np.abs(s1 - s2).max())
    return float(worst)


def random_dilation(d, seed=None, d_env=None, scale=2.0, frozen_mode=None):
    """Random symplectic ``g`` on ``[d, d_env]`` and random displacement.

    With ``frozen_mode=k`` the generator leaves system mode ``k`` untouched
    by the environment, so ``g21`` has two zero columns there.  Combine with
    a system symplectic to move that kernel anywhere (see
    :func:`random_valid_channel`).
    """
    rng = _rng(seed)
    d_env = 2 * d if d_env is None else d_env
    form = SymplecticForm([d, d_env])
    n = form.dim
    gmat = rng.standard_normal((n, n))
    h = (gmat + gmat.T) / 2
    if frozen_mode is not None:
        qs, ps = form.slots()
        h[[qs[frozen_mode], ps[frozen_mode]], :] = 0.0
        h[:, [qs[frozen_mode], ps[frozen_mode]]] = 0.0
    norm = np.linalg.norm(h, 2)
    if norm > 0:
        h *= scale / norm
    g = expm(form_matrix(form) @ h)
    u = np.concatenate([rng.standard_normal(2 * d), np.zeros(2 * d_env)])
    return DilationSpec(g, u, d, d_env)


def random_valid_channel(d, seed=None, rank_deficient=False):
    """Valid channel generated independently of :func:`build_dilation`.

    Reads the channel off a random dilation (the block formula guarantees
    validity).  ``rank_deficient=True`` zeroes one symplectic pair of ``Y``:
    a system mode is decoupled from the environment and the result is
    pre-composed with a random system symplectic ``Ls``, giving
    ``X = g11 Ls`` and ``Y = Ls^T g21^T g21 Ls`` of rank ``2d - 2``.
    """
    rng = _rng(seed)
    if not rank_deficient:
        return induced_channel(random_dilation(d, rng))
    frozen = int(rng.integers(d))
    base = induced_channel(random_dilation(d, rng, frozen_mode=frozen))
    ls = random_symplectic([d], rng)
    y = ls.T @ base.y @ ls
    return ChannelParams(base.x @ ls, (y + y.T) / 2, base.w)
