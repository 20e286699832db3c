"""Symplectic forms, predicates, embeddings and basis completion.

Conventions
-----------
A :class:`SymplecticForm` with blocks ``[d_1, ..., d_k]`` is the direct sum
``J_{2d_1} (+) ... (+) J_{2d_k}`` with ``J_{2d} = [[0, I_d], [-I_d, 0]]``.
Inside each block coordinates are "blocked": ``q_1..q_d`` then
``p_1..p_d``.  A matrix ``L`` is symplectic for the form when
``L^T J L = J``; its columns then form a symplectic basis whose u-slots sit
at the q positions and v-slots at the p positions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .exceptions import (
    BlockStructureViolated,
    NotContraction,
    NotOrthogonal,
    NotSymplectic,
    NotSymplecticSet,
    StructuralError,
    ExtensionFailed,
)
from .numerics import DEFAULT_TOLERANCES, as_matrix, as_symmetric, as_vector

__all__ = [
    "SymplecticForm",
    "GaussianUnitary",
    "form_matrix",
    "symplectic_residual",
    "is_symplectic",
    "symplectic_inverse",
    "orthosymplectic_blocks",
    "form_permutation",
    "permute_form",
    "qtheta",
    "contraction_embed",
    "symplectic_extend",
    "random_symplectic",
    "random_orthosymplectic",
    "gu_compose",
    "gu_inverse",
]


@dataclass(frozen=True)
class SymplecticForm:
    """Block structure ``[d_1, ..., d_k]`` (mode counts) of a symplectic form."""

    blocks: tuple

    def __init__(self, blocks):
        if isinstance(blocks, (int, np.integer)):
            blocks = (int(blocks),)
        blocks = tuple(int(b) for b in blocks)
        if not blocks or any(b < 1 for b in blocks):
            raise StructuralError(f"every block needs at least one mode, got {blocks}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def modes(self):
        return sum(self.blocks)

    @property
    def dim(self):
        return 2 * self.modes

    def matrix(self):
        return form_matrix(self)

    def slots(self):
        """Positions ``(q_positions, p_positions)`` indexed by global mode number."""
        qs, ps = [], []
        offset = 0
        for b in self.blocks:
            qs.extend(range(offset, offset + b))
            ps.extend(range(offset + b, offset + 2 * b))
            offset += 2 * b
        return np.array(qs, dtype=int), np.array(ps, dtype=int)

    def __repr__(self):
        return f"SymplecticForm({list(self.blocks)})"


def _as_form(form):
    return form if isinstance(form, SymplecticForm) else SymplecticForm(form)


def form_matrix(form):
    """Block-diagonal ``J`` for ``form``.

    >>> form_matrix([1])
    array([[ 0.,  1.],
           [-1.,  0.]])
    """
    form = _as_form(form)
    qs, ps = form.slots()
    j = np.zeros((form.dim, form.dim))
    j[qs, ps] = 1.0
    j[ps, qs] = -1.0
    return j


def _check_square(l, form, name="l"):
    l = as_matrix(l, name)
    if l.shape[0] != form.dim:
        raise StructuralError(
            f"{name} has shape {l.shape} but {form!r} needs {form.dim}x{form.dim}"
        )
    return l


def symplectic_residual(l, form):
    """Frobenius norm ``||l^T J l - J||_F``."""
    form = _as_form(form)
    l = _check_square(l, form)
    j = form_matrix(form)
    return float(np.linalg.norm(l.T @ j @ l - j))


def is_symplectic(l, form, cfg=None):
    cfg = cfg or DEFAULT_TOLERANCES
    l = np.asarray(l, dtype=float)
    scale = max(1.0, np.linalg.norm(l) ** 2 / max(1, l.shape[0]))
    return symplectic_residual(l, form) <= cfg.residual_tol * scale


def symplectic_inverse(l, form, cfg=None):
    """``J^T l^T J``, the inverse of a symplectic matrix without a solve."""
    form = _as_form(form)
    l = _check_square(l, form)
    if not is_symplectic(l, form, cfg):
        raise NotSymplectic(f"residual {symplectic_residual(l, form):.3e} exceeds tolerance")
    j = form_matrix(form)
    return j.T @ l.T @ j


def orthosymplectic_blocks(l, cfg=None):
    """Split a single-block orthosymplectic matrix into ``A, B`` with ``l = [[A, B], [-B, A]]``.

    Raises
    ------
    NotOrthogonal, NotSymplectic, BlockStructureViolated
        Checked in that order, each against ``residual_tol``.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    l = as_matrix(l, "l")
    n = l.shape[0]
    if n % 2:
        raise StructuralError(f"orthosymplectic matrices have even size, got {n}")
    d = n // 2
    tol = cfg.residual_tol
    orth = np.linalg.norm(l.T @ l - np.eye(n))
    if orth > tol:
        raise NotOrthogonal(f"||L^T L - I||_F = {orth:.3e}")
    res = symplectic_residual(l, SymplecticForm([d]))
    if res > tol:
        raise NotSymplectic(f"||L^T J L - J||_F = {res:.3e}")
    a, b = l[:d, :d], l[:d, d:]
    block_err = max(np.linalg.norm(l[d:, :d] + b), np.linalg.norm(l[d:, d:] - a))
    if block_err > tol:
        raise BlockStructureViolated(f"lower blocks deviate from [-B, A] by {block_err:.3e}")
    gram = np.linalg.norm(a.T @ a + b.T @ b - np.eye(d))
    atb = a.T @ b
    sym = np.linalg.norm(atb - atb.T)
    if gram > tol or sym > tol:
        raise BlockStructureViolated(
            f"A^T A + B^T B - I = {gram:.3e}, asymmetry of A^T B = {sym:.3e}"
        )
    return a.copy(), b.copy()


def _mode_map(src, dst):
    src, dst = _as_form(src), _as_form(dst)
    if src.modes != dst.modes:
        raise StructuralError(f"{src!r} and {dst!r} have different dimensions")
    sq, sp = src.slots()
    dq, dp = dst.slots()
    perm = np.empty(src.dim, dtype=int)
    perm[dq] = sq
    perm[dp] = sp
    return perm


def form_permutation(src, dst):
    """Permutation ``P`` with ``form_matrix(dst) == P.T @ form_matrix(src) @ P``.

    Mode ``k`` keeps its number; only the placement of its ``q``/``p``
    coordinates changes.  ``P @ x`` rewrites a ``dst``-ordered vector in
    ``src`` ordering.
    """
    perm = _mode_map(src, dst)
    p = np.zeros((perm.size, perm.size))
    p[perm, np.arange(perm.size)] = 1.0
    return p


def permute_form(m, src, dst):
    """Exact index version of ``P.T @ m @ P`` (no floating point arithmetic)."""
    perm = _mode_map(src, dst)
    m = np.asarray(m)
    return m[np.ix_(perm, perm)]


def qtheta(theta):
    """The 2x4 matrix ``[[cos, 0, -sin, 0], [0, cos, 0, sin]]``.

    It has orthonormal rows and compresses ``J_2 (+) J_2`` to
    ``cos(2 theta) * J_2``.
    """
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0.0, -s, 0.0], [0.0, c, 0.0, s]])


def contraction_embed(a, cfg=None):
    """``Q`` (2d x 4d) with ``Q Q^T = I`` and ``Q J_{4d} Q^T = [[0, a], [-a, 0]]``.

    ``a`` must be a positive contraction.  Each eigenvalue ``lam`` of ``a``
    gets a :func:`qtheta` block with ``theta = arccos(lam) / 2``; the
    interleaved single-mode blocks are then relabelled into the blocked
    convention and rotated by the eigenvectors of ``a``.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    a = as_symmetric(a, cfg, name="a")
    d = a.shape[0]
    lam, u = np.linalg.eigh(a)
    if lam.size and (lam[0] < -cfg.eig_tol or lam[-1] > 1 + cfg.eig_tol):
        raise NotContraction(f"spectrum [{lam[0]:.3e}, {lam[-1]:.3e}] leaves [0, 1]")
    thetas = 0.5 * np.arccos(np.clip(lam, -1.0, 1.0))
    q_inter = np.zeros((2 * d, 4 * d))
    for j, th in enumerate(thetas):
        q_inter[2 * j:2 * j + 2, 4 * j:4 * j + 4] = qtheta(th)
    # interleaved (per-mode J_2 blocks) -> blocked on both sides
    rows = _mode_map([1] * d, [d])
    cols = _mode_map([1] * (2 * d), [2 * d])
    q = q_inter[np.ix_(rows, cols)]
    uu = np.zeros((2 * d, 2 * d))
    uu[:d, :d] = u
    uu[d:, d:] = u
    return uu @ q


def _symplectic_set_error(us, vs, j):
    uju = us.T @ j @ us
    vjv = vs.T @ j @ vs
    ujv = us.T @ j @ vs - np.eye(us.shape[1])
    return max(np.abs(uju).max(initial=0), np.abs(vjv).max(initial=0), np.abs(ujv).max(initial=0))


def symplectic_extend(u_cols, v_cols, form, cfg=None):
    """Complete a symplectic set to a full symplectic matrix.

    Parameters
    ----------
    u_cols, v_cols : ndarray, shape (2n, k)
        Columns with ``u_i^T J u_k = v_i^T J v_k = 0`` and
        ``u_i^T J v_k = delta_ik``.
    form : SymplecticForm

    Returns
    -------
    ndarray, shape (2n, 2n)
        Symplectic matrix whose q-slots of modes ``0..k-1`` hold ``u_cols``
        and p-slots hold ``v_cols``, bit for bit.

    Notes
    -----
    Symplectic Gram-Schmidt over the standard basis.  All candidates are
    kept projected onto the symplectic complement of the pairs found so far;
    each new ``u`` is the longest projected candidate (normalized) and its
    partner is the candidate with the largest ``|omega(u, c)|``, scaled so
    that ``omega(u, v) = 1``.  Ties go to the lowest index.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    form = _as_form(form)
    n2 = form.dim
    j = form_matrix(form)
    us = np.asarray(u_cols, dtype=float).reshape(n2, -1)
    vs = np.asarray(v_cols, dtype=float).reshape(n2, -1)
    k = us.shape[1]
    if vs.shape[1] != k:
        raise StructuralError("u_cols and v_cols need the same number of columns")
    if k > form.modes:
        raise StructuralError(f"{k} pairs do not fit into {form.modes} modes")
    scale = max(1.0, float(np.max(np.linalg.norm(np.hstack([us, vs]), axis=0), initial=1.0)) ** 2)
    err = _symplectic_set_error(us, vs, j) if k else 0.0
    if err > cfg.residual_tol * scale:
        raise NotSymplecticSet(f"pairing error {err:.3e}")

    def project(c, pu, pv):
        # c - sum omega(c, v_i) u_i + sum omega(c, u_i) v_i
        if not pu:
            return c
        uu, vv = np.column_stack(pu), np.column_stack(pv)
        return c + uu @ (vv.T @ j @ c) - vv @ (uu.T @ j @ c)

    pu = [us[:, i] for i in range(k)]
    pv = [vs[:, i] for i in range(k)]
    cand = project(np.eye(n2), pu, pv)
    cand = project(cand, pu, pv)
    new_u, new_v = [], []
    for _ in range(form.modes - k):
        norms = np.linalg.norm(cand, axis=0)
        iu = int(np.argmax(norms))
        if norms[iu] <= 1e-6:
            raise ExtensionFailed("no candidate left outside the span of the basis")
        u = cand[:, iu] / norms[iu]
        u = project(u, pu + new_u, pv + new_v)
        u /= np.linalg.norm(u)
        pairing = u @ j @ cand
        iv = int(np.argmax(np.abs(pairing)))
        if abs(pairing[iv]) <= 1e-6:
            raise ExtensionFailed("no symplectic partner for the selected vector")
        v = project(cand[:, iv], pu + new_u, pv + new_v)
        v = v / (u @ j @ v)
        new_u.append(u)
        new_v.append(v)
        cand = cand + np.outer(u, v @ j @ cand) - np.outer(v, u @ j @ cand)

    qs, ps = form.slots()
    out = np.zeros((n2, n2))
    out[:, qs[:k]] = us
    out[:, ps[:k]] = vs
    if new_u:
        out[:, qs[k:]] = np.column_stack(new_u)
        out[:, ps[k:]] = np.column_stack(new_v)
    return out


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_symplectic(form, seed=None, scale=2.0):
    """``expm(J H)`` for a random symmetric ``H`` with ``||J H||_2 = scale``.

    ``scale=0`` gives the identity.  The same ``seed`` always gives the same
    matrix.
    """
    form = _as_form(form)
    rng = _rng(seed)
    n = form.dim
    g = rng.standard_normal((n, n))
    h = (g + g.T) / 2
    norm = np.linalg.norm(h, 2)
    h = h * (scale / norm) if norm > 0 else h * 0.0
    return expm(form_matrix(form) @ h)


def random_orthosymplectic(form, seed=None):
    """Random ``[[A, B], [-B, A]]`` built by Gram-Schmidt on pairs ``(c, J^T c)``.

    Orthonormalizing a Gaussian sample against the span of every previous
    ``c_i`` and ``J^T c_i`` keeps the complement ``J``-invariant, which is the
    real form of complex (unitary) Gram-Schmidt.
    """
    form = _as_form(form)
    if len(form.blocks) != 1:
        raise StructuralError("random_orthosymplectic expects a single-block form")
    rng = _rng(seed)
    d = form.modes
    j = form_matrix(form)
    cols = []
    while len(cols) < d:
        c = rng.standard_normal(2 * d)
        for _ in range(2):
            for prev in cols:
                c -= prev * (prev @ c)
                jp = j.T @ prev
                c -= jp * (jp @ c)
        nrm = np.linalg.norm(c)
        if nrm < 1e-8:
            continue
        cols.append(c / nrm)
    first = np.column_stack(cols)
    return np.hstack([first, j.T @ first])


@dataclass(frozen=True)
class GaussianUnitary:
    """Displacement ``u`` and symplectic ``l`` of ``W(u) Gamma(l)`` (global phase dropped)."""

    u: np.ndarray
    l: np.ndarray
    form: SymplecticForm

    def __init__(self, u, l, form=None, cfg=None):
        l = as_matrix(l, "l")
        if form is None:
            if l.shape[0] % 2:
                raise StructuralError("odd-dimensional l needs an explicit form")
            form = SymplecticForm([l.shape[0] // 2])
        form = _as_form(form)
        l = _check_square(l, form)
        u = as_vector(u, form.dim, "u")
        if not is_symplectic(l, form, cfg):
            raise NotSymplectic(f"residual {symplectic_residual(l, form):.3e} exceeds tolerance")
        u.flags.writeable = False
        l.flags.writeable = False
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "form", form)

    @classmethod
    def identity(cls, form):
        form = _as_form(form)
        return cls(np.zeros(form.dim), np.eye(form.dim), form)


def gu_compose(g1, g2):
    """``g1 o g2`` as ``(u1 + L1 u2, L1 L2)``."""
    if g1.form != g2.form:
        raise StructuralError(f"form mismatch: {g1.form!r} vs {g2.form!r}")
    return GaussianUnitary(g1.u + g1.l @ g2.u, g1.l @ g2.l, g1.form)


def gu_inverse(g):
    l_inv = symplectic_inverse(g.l, g.form)
    return GaussianUnitary(-l_inv @ g.u, l_inv, g.form)
