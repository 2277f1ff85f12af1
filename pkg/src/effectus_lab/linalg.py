"""Dense complex matrix kernel.

Matrices are plain complex ``numpy`` arrays.  The Hermitian eigensolver is a
cyclic Jacobi iteration (bit-reproducible, no LAPACK dependency) used for all
matrices up to ``JACOBI_MAX_DIM``; larger inputs go to LAPACK ``eigh``.
Everything downstream (square roots, support projections, floors, ranks)
is built on :func:`herm_eig`.
"""
from typing import NamedTuple

import numpy as np

from .errors import NotEffect, NotHermitian, NotPSD, ShapeMismatch

TOL = 1e-9
TOL_REL = 1e-9
ABS_FLOOR = 1e-12
DUST = 64 * np.finfo(float).eps
JACOBI_MAX_DIM = 24
JACOBI_MAX_SWEEPS = 64


class EigenDecomposition(NamedTuple):
    values: np.ndarray  # ascending reals
    basis: np.ndarray  # unitary, columns are eigenvectors


def cmatrix(a):
    """Coerce to a 2-d complex array (copy)."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got shape {m.shape}")
    return m


def dag(a):
    return np.conj(a).T


def hermitian_residual(a):
    return float(np.max(np.abs(a - dag(a)))) if a.size else 0.0


def is_hermitian(a, tol=TOL):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return hermitian_residual(a) <= tol * max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)


def _jacobi(a):
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    thresh = 1e-12 * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a[~np.eye(n, dtype=bool)])
        if off < thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300 or r < 1e-18 * scale:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = dag(g) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    return np.real(np.diag(a)).copy(), v


def herm_eig(h, tol=TOL, method="auto"):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``method`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    ``JACOBI_MAX_DIM``).
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ShapeMismatch(f"square matrix required, got {h.shape}")
    n = h.shape[0]
    if n == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0), dtype=complex))
    scale = max(1.0, float(np.max(np.abs(h))))
    res = hermitian_residual(h)
    if res > tol * scale:
        raise NotHermitian(f"max|A - A*| = {res:.3e} exceeds {tol:.1e}")
    h = (h + dag(h)) / 2
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        vals, vecs = _jacobi(h)
    elif method == "lapack":
        vals, vecs = np.linalg.eigh(h)
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(vals, kind="stable")
    return EigenDecomposition(vals[order], vecs[:, order])


def rank_cutoff(values, tol_rel=TOL_REL):
    """Threshold below which spectral values count as zero."""
    top = float(np.max(np.abs(values))) if len(values) else 0.0
    if top < ABS_FLOOR:
        return ABS_FLOOR
    return tol_rel * top


def _check_psd(vals, tol):
    if len(vals) == 0:
        return
    top = max(float(np.max(np.abs(vals))), 1.0)
    if vals[0] < -tol * top:
        raise NotPSD(f"minimum eigenvalue {vals[0]:.3e} below -{tol:.1e}")


def psd_from_eig(vals, vecs, fn):
    """Apply ``fn`` spectrally: vecs diag(fn(vals)) vecs*."""
    return (vecs * fn(vals)) @ dag(vecs)


def sqrt_psd(a, tol=TOL):
    """Positive square root; eigenvalue dust in [-tol, 0) is clamped to 0.

    Eigenvalues below ``DUST * lambda_max`` are also zeroed: their square
    roots (~1e-8 for rounding-level values) would otherwise blur supports.
    """
    vals, vecs = herm_eig(a, tol)
    _check_psd(vals, tol)
    top = float(np.max(np.abs(vals))) if len(vals) else 0.0
    vals = np.where(vals > DUST * top, vals, 0.0)
    r = psd_from_eig(vals, vecs, np.sqrt)
    return (r + dag(r)) / 2


def pinv_sqrt_psd(a, tol=TOL, tol_rel=TOL_REL):
    """Moore-Penrose inverse of the positive square root of ``a``."""
    vals, vecs = herm_eig(a, tol)
    _check_psd(vals, tol)
    cut = rank_cutoff(vals, tol_rel)
    inv = np.zeros_like(vals)
    keep = vals > cut
    inv[keep] = 1.0 / np.sqrt(vals[keep])
    return psd_from_eig(vals, vecs, lambda _: inv)


def support_proj(a, tol=TOL, tol_rel=TOL_REL):
    """Least projection P with PA = AP = A (spectral support)."""
    vals, vecs = herm_eig(a, tol)
    _check_psd(vals, tol)
    keep = (vals > rank_cutoff(vals, tol_rel)).astype(float)
    return psd_from_eig(vals, vecs, lambda _: keep)


ceil = support_proj


def floor_proj(a, tol=TOL):
    """Greatest projection below an effect: 1 - ceil(1 - a)."""
    vals, _ = herm_eig(a, tol)
    if len(vals) and (vals[0] < -tol or vals[-1] > 1 + tol):
        raise NotEffect(f"spectrum [{vals[0]:.3e}, {vals[-1]:.3e}] not inside [0, 1]")
    n = np.asarray(a).shape[0]
    comp = np.eye(n) - a
    # The complement's support is taken with an absolute cutoff: an effect
    # eigenvalue 1 - 1e-9 is not sharp.
    vals, vecs = herm_eig(comp, tol)
    keep = (vals > tol).astype(float)
    return np.eye(n) - psd_from_eig(vals, vecs, lambda _: keep)


def rank_psd(a, tol=TOL, tol_rel=TOL_REL):
    vals, _ = herm_eig(a, tol)
    return int(np.sum(vals > rank_cutoff(vals, tol_rel)))


def range_isometry(p, tol=TOL, tol_rel=TOL_REL):
    """Columns: orthonormal basis of the range of a PSD matrix.

    Ordered by descending eigenvalue; each column's first nonzero
    coordinate is made real positive.
    """
    vals, vecs = herm_eig(p, tol)
    keep = np.nonzero(vals > rank_cutoff(vals, tol_rel))[0][::-1]
    return phase_fix(vecs[:, keep])


def phase_fix(cols, tol=1e-10):
    cols = np.array(cols, dtype=complex)
    for k in range(cols.shape[1]):
        col = cols[:, k]
        nz = np.nonzero(np.abs(col) > tol)[0]
        if len(nz):
            z = col[nz[0]]
            cols[:, k] = col * (np.conj(z) / abs(z))
    return cols


def svdvals(a):
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def pinv(a, tol=TOL, tol_rel=TOL_REL):
    """Moore-Penrose pseudoinverse.

    Hermitian input is inverted spectrally via :func:`herm_eig`; other input
    goes through the SVD with the same relative cutoff on singular values.
    """
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=complex)
    if a.shape[0] == a.shape[1] and is_hermitian(a, tol):
        vals, vecs = herm_eig(a, tol)
        cut = rank_cutoff(vals, tol_rel)
        inv = np.zeros_like(vals)
        keep = np.abs(vals) > cut
        inv[keep] = 1.0 / vals[keep]
        return psd_from_eig(vals, vecs, lambda _: inv)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    cut = rank_cutoff(s, tol_rel)
    inv = np.where(s > cut, 1.0 / np.where(s > cut, s, 1.0), 0.0)
    return (dag(vh) * inv) @ dag(u)


def kron(a, b):
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dirsum(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=complex)
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def op_norm(a):
    """Largest singular value, as lambda_max(A*A)^(1/2)."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    vals, _ = herm_eig(dag(a) @ a)
    return float(np.sqrt(max(vals[-1], 0.0)))


def min_eig(a, tol=TOL):
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(herm_eig((a + dag(a)) / 2, tol).values[0])


def loewner_leq(a, b, tol=TOL):
    """a <= b in the Loewner order, up to tol."""
    return min_eig(np.asarray(b) - np.asarray(a)) >= -tol


def is_projection_matrix(p, tol=TOL):
    p = np.asarray(p, dtype=complex)
    if p.size == 0:
        return True
    return (hermitian_residual(p) <= tol
            and float(np.max(np.abs(p @ p - p))) <= tol)


def nullspace_hermitian(gram, tol_rel=TOL_REL):
    """Orthonormal basis (columns) of the kernel of a PSD Gram matrix."""
    vals, vecs = herm_eig(gram, tol=1e-6)
    top = float(np.max(np.abs(vals))) if len(vals) else 0.0
    cut = tol_rel * top if top > ABS_FLOOR else ABS_FLOOR
    return vecs[:, vals <= cut]


def to_json(m):
    m = np.asarray(m, dtype=complex)
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]),
            "re": m.real.tolist(), "im": m.imag.tolist()}


def from_json(obj):
    rows, cols = int(obj["rows"]), int(obj["cols"])
    re = np.array(obj["re"], dtype=float).reshape(rows, cols)
    im = np.array(obj.get("im", np.zeros((rows, cols)).tolist()), dtype=float).reshape(rows, cols)
    return re + 1j * im
