"""Independent reference computations used as test oracles.

These deliberately avoid the package's own kernels: complex eigensolvers
instead of the real embedding, dense inverses instead of J^T L^T J, and so on.
"""

import numpy as np
from scipy.linalg import expm, sqrtm


def j_matrix(d):
    eye, zero = np.eye(d), np.zeros((d, d))
    return np.block([[zero, eye], [-eye, zero]])


def j_direct_sum(*ds):
    n = 2 * sum(ds)
    out = np.zeros((n, n))
    off = 0
    for d in ds:
        out[off:off + 2 * d, off:off + 2 * d] = j_matrix(d)
        off += 2 * d
    return out


def herm_min_eig(re, im):
    return float(np.linalg.eigvalsh(re + 1j * im)[0])


def channel_min_eig(x, y, sign=-1):
    """Minimum eigenvalue of ``Y + sign*i*(J - X^T J X)`` with a complex solver."""
    j = j_matrix(x.shape[0] // 2)
    k = j - x.T @ j @ x
    return herm_min_eig(y, sign * k)


def admissible(s, tol=1e-9):
    j = j_matrix(s.shape[0] // 2)
    return herm_min_eig(s, j) >= -tol * max(1.0, np.linalg.norm(s, 2))


def sym_expm(j, h):
    return expm(j @ h)


def dense_sqrt(a):
    return np.real(sqrtm(a))


def random_sym(rng, n):
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2


def random_psd(rng, n, rank=None):
    rank = n if rank is None else rank
    a = rng.standard_normal((n, rank))
    return a @ a.T


def oracle_symplectic(rng, j, scale=1.0):
    h = random_sym(rng, j.shape[0])
    h *= scale / np.linalg.norm(h, 2)
    return expm(j @ h)


def oracle_channel(rng, d):
    """Valid channel read off an independently generated (J_2d + J_4d)-symplectic g."""
    g = oracle_symplectic(rng, j_direct_sum(d, 2 * d), scale=1.5)
    n = 2 * d
    u1 = rng.standard_normal(n)
    return g[:n, :n], g[n:, :n].T @ g[n:, :n], 2 * j_matrix(d) @ u1


def apply_channel(x, y, w, m, s):
    return x.T @ m + w, x.T @ s @ x + y


def thermal_random_cov(rng, d):
    l = oracle_symplectic(rng, j_matrix(d), scale=1.0)
    nus = 1 + rng.exponential(size=d)
    return l.T @ np.diag(np.concatenate([nus, nus])) @ l


def rotation_orthosymplectic(theta, d):
    c, s = np.cos(theta), np.sin(theta)
    return np.block([[c * np.eye(d), s * np.eye(d)], [-s * np.eye(d), c * np.eye(d)]])


def oracle_rank_deficient_channel(rng, d):
    """Valid channel whose Y has one symplectic pair of directions removed.

    g = F (Ls + I_env) where F = expm(J H) leaves system mode ``k`` alone
    (rows and columns of H at its q and p coordinates are zero), so
    ``g21`` vanishes on that mode and ``Y = Ls^T g21^T g21 Ls`` has rank 2d - 2.
    """
    j = j_direct_sum(d, 2 * d)
    h = random_sym(rng, 6 * d)
    k = int(rng.integers(d))
    h[[k, d + k], :] = 0.0
    h[:, [k, d + k]] = 0.0
    h *= 1.5 / np.linalg.norm(h, 2)
    f = expm(j @ h)
    ls = oracle_symplectic(rng, j_matrix(d))
    n = 2 * d
    x = f[:n, :n] @ ls
    g21 = f[n:, :n] @ ls
    return x, g21.T @ g21
