"""Tolerance-aware real matrix kernels.

Everything here works with real ``float64`` arrays.  Hermitian problems
``A + iB`` (``A`` symmetric, ``B`` skew) are solved through the real
symmetric embedding ``[[A, -B], [B, A]]``, whose spectrum is the Hermitian
spectrum with every eigenvalue doubled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NotPSD, StructuralError

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOLERANCES",
    "HermitianPair",
    "SkewCanonicalForm",
    "as_matrix",
    "as_vector",
    "as_symmetric",
    "as_skew",
    "spectral_norm",
    "psd_min_eig",
    "sqrt_psd",
    "skew_canonical",
    "skew_blockform",
    "pinv_rank",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances used by certification and synthesis.

    Parameters
    ----------
    eig_tol : float
        Relative eigenvalue tolerance.  PSD tests accept a minimum
        eigenvalue down to ``-eig_tol * scale``.
    residual_tol : float
        Tolerance on matrix residuals such as ``||L^T J L - J||_F``.
    reg_eps : float
        Relative regularization used by the ``"regularize"`` treatment of a
        singular noise matrix: ``Y + reg_eps * (1 + ||Y||_2) * I``.
    """

    eig_tol: float = 1e-9
    residual_tol: float = 1e-8
    reg_eps: float = 1e-10

    def __post_init__(self):
        for name in ("eig_tol", "residual_tol", "reg_eps"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")


DEFAULT_TOLERANCES = ToleranceConfig()


def _cfg(cfg):
    return DEFAULT_TOLERANCES if cfg is None else cfg


def as_matrix(a, name="matrix", square=True):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise StructuralError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise StructuralError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise StructuralError(f"{name} contains non-finite entries")
    return a


def as_vector(v, n, name="vector"):
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise StructuralError(f"{name} must have shape ({n},), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise StructuralError(f"{name} contains non-finite entries")
    return v


def spectral_norm(a):
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _average(a, b):
    # entries that already agree are kept bit for bit; halving first avoids overflow
    out = a.copy()
    diff = a != b
    out[diff] = a[diff] / 2 + b[diff] / 2
    return out


def as_symmetric(a, cfg=None, name="matrix"):
    """Return ``(a + a^T) / 2`` after checking ``a`` is symmetric within tolerance."""
    cfg = _cfg(cfg)
    a = as_matrix(a, name)
    err = np.linalg.norm(a - a.T)
    if err > cfg.residual_tol * max(1.0, np.linalg.norm(a)):
        raise StructuralError(f"{name} is not symmetric (||A - A^T||_F = {err:.3e})")
    return _average(a, a.T)


def as_skew(a, cfg=None, name="matrix"):
    """Return ``(a - a^T) / 2`` after checking ``a`` is skew-symmetric within tolerance."""
    cfg = _cfg(cfg)
    a = as_matrix(a, name)
    err = np.linalg.norm(a + a.T)
    if err > cfg.residual_tol * max(1.0, np.linalg.norm(a)):
        raise StructuralError(f"{name} is not skew-symmetric (||A + A^T||_F = {err:.3e})")
    return _average(a, -a.T)


@dataclass(frozen=True)
class HermitianPair:
    """The Hermitian matrix ``re + i*im`` stored as two real matrices.

    ``re`` is symmetrized and ``im`` antisymmetrized on construction; inputs
    further than ``residual_tol`` from those classes are rejected.
    """

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        re = as_symmetric(self.re, name="re")
        im = as_skew(self.im, name="im")
        if re.shape != im.shape:
            raise StructuralError(f"re and im shapes differ: {re.shape} vs {im.shape}")
        re.flags.writeable = False
        im.flags.writeable = False
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @property
    def n(self):
        return self.re.shape[0]

    def transpose(self):
        """The transpose ``re - i*im`` (equal to the complex conjugate)."""
        return HermitianPair(self.re, -self.im)

    def embedding(self):
        return np.block([[self.re, -self.im], [self.im, self.re]])


def psd_min_eig(h, cfg=None):
    """Minimum eigenvalue of the Hermitian matrix ``h.re + i*h.im``.

    Examples
    --------
    >>> import numpy as np
    >>> float(round(psd_min_eig(HermitianPair(np.eye(2), 2 * np.array([[0, 1], [-1, 0]]))), 12))
    -1.0
    """
    if not isinstance(h, HermitianPair):
        raise StructuralError("psd_min_eig expects a HermitianPair")
    if h.n == 0:
        return 0.0
    return float(np.linalg.eigvalsh(h.embedding())[0])


def sqrt_psd(a, cfg=None):
    """Symmetric PSD square root of ``a``.

    Eigenvalues in ``[-eig_tol * ||a||_2, 0)`` are clamped to zero; anything
    more negative raises :class:`NotPSD`.
    """
    cfg = _cfg(cfg)
    a = as_symmetric(a, cfg)
    if a.size == 0:
        return a.copy()
    w, v = np.linalg.eigh(a)
    scale = max(abs(w[0]), abs(w[-1]))
    if w[0] < -cfg.eig_tol * scale:
        raise NotPSD(f"matrix has eigenvalue {w[0]:.3e} < 0")
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    return (root + root.T) / 2


@dataclass(frozen=True)
class SkewCanonicalForm:
    """Orthogonal ``r`` with ``r^T k r = [[0, D], [-D, 0]]`` (zero-padded for odd n).

    Columns of ``r`` are ordered ``x_1..x_m, y_1..y_m`` followed by the
    unpaired zero direction when ``zero_dim == 1``.
    """

    r: np.ndarray
    d_vals: np.ndarray
    zero_dim: int

    def blockform(self):
        return skew_blockform(self.d_vals, self.zero_dim)


def skew_blockform(d_vals, zero_dim=0):
    d_vals = np.asarray(d_vals, dtype=float)
    m = d_vals.shape[0]
    n = 2 * m + zero_dim
    out = np.zeros((n, n))
    idx = np.arange(m)
    out[idx, m + idx] = d_vals
    out[m + idx, idx] = -d_vals
    return out


def _fix_sign(v):
    big = np.flatnonzero(np.abs(v) > 1e-8 * np.max(np.abs(v)))
    if big.size and v[big[0]] < 0:
        return -v
    return v


def skew_canonical(k, cfg=None):
    """Real canonical form of a skew-symmetric matrix.

    The planes are extracted one at a time from the eigendecomposition of
    ``-k @ k = k^T k`` restricted to the orthogonal complement of the planes
    found so far, so degenerate values (``J``, multiples of the identity
    structure) are split deterministically.  ``d_vals`` come out in
    descending order and the first nonzero entry of every ``x_j`` is
    positive.
    """
    cfg = _cfg(cfg)
    k = as_skew(k, cfg, name="k")
    n = k.shape[0]
    m = n // 2
    knorm = spectral_norm(k)
    zero_cut = cfg.eig_tol * knorm

    xs, ys, ds = [], [], []
    basis = np.eye(n)  # orthonormal basis of the unassigned complement
    kc = k.copy()
    while len(ds) < m:
        kc = (kc - kc.T) / 2
        w, v = np.linalg.eigh(kc.T @ kc)
        a = _fix_sign(v[:, -1])
        ka = kc.T @ a
        d = float(np.linalg.norm(ka))
        if d <= zero_cut or knorm == 0.0:
            break
        b = ka / d
        b -= a * (a @ b)
        b /= np.linalg.norm(b)
        xs.append(basis @ a)
        ys.append(basis @ b)
        ds.append(d)
        q, _ = np.linalg.qr(np.column_stack([a, b]), mode="complete")
        rest = q[:, 2:]
        basis = basis @ rest
        kc = rest.T @ kc @ rest

    # whatever is left carries (numerically) zero values; pair it up as-is
    rest_cols = basis.shape[1]
    n_pairs_left = m - len(ds)
    for j in range(n_pairs_left):
        xs.append(basis[:, 2 * j])
        ys.append(basis[:, 2 * j + 1])
        ds.append(0.0)
    cols = xs + ys
    zero_dim = n - 2 * m
    if zero_dim:
        cols.append(basis[:, rest_cols - 1])
    r = np.column_stack(cols) if cols else np.zeros((n, 0))
    return SkewCanonicalForm(r=r, d_vals=np.array(ds, dtype=float), zero_dim=zero_dim)


def pinv_rank(a, cfg=None, scale=None):
    """Moore-Penrose pseudo-inverse and numerical rank of ``a``.

    Singular values at or below ``eig_tol * max(sigma_max, scale)`` count as
    zero.  ``scale`` lets callers measure rank relative to a reference
    magnitude (useful when ``a`` is a difference that should vanish).
    """
    cfg = _cfg(cfg)
    a = as_matrix(a, square=False)
    if a.size == 0:
        return np.zeros(a.shape[::-1]), 0
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    ref = s[0] if s.size else 0.0
    if scale is not None:
        ref = max(ref, float(scale))
    keep = s > cfg.eig_tol * ref
    if ref == 0.0:
        keep[:] = False
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    pinv = (vt.T * inv_s) @ u.T
    return pinv, int(np.count_nonzero(keep))
