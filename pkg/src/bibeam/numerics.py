"""Dense complex/real linear algebra helpers.

The optimization pipeline works in the real domain: every complex matrix H
is replaced by the block matrix [Re(H) -Im(H); Im(H) Re(H)] and every
complex vector x by [Re(x); Im(x)].  The embedding preserves norms of
products, so quadratic forms carry over unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RealEmbedding:
    """Real block embedding of a complex matrix.

    ``block`` is the 2N x 2M matrix [Re(H) -Im(H); Im(H) Re(H)].  For any
    complex x with real stacking x', ||block @ x'|| == ||H @ x||.
    """

    block: np.ndarray
    rows: int  # N of the original complex matrix
    cols: int  # M of the original complex matrix


def real_embed_matrix(H: np.ndarray) -> RealEmbedding:
    """Embed a complex N x M matrix as its 2N x 2M real block form."""
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    if not np.all(np.isfinite(H)):
        raise ValueError("matrix entries must be finite")
    re, im = H.real, H.imag
    block = np.block([[re, -im], [im, re]])
    return RealEmbedding(block=block, rows=H.shape[0], cols=H.shape[1])


def real_embed_vector(x: np.ndarray) -> np.ndarray:
    """Stack a complex vector of length M as [Re(x); Im(x)] (length 2M)."""
    x = np.asarray(x, dtype=complex).ravel()
    return np.concatenate([x.real, x.imag])


def complex_reassemble(x_prime: np.ndarray) -> np.ndarray:
    """Inverse of :func:`real_embed_vector`.

    Raises ValueError on odd-length input.
    """
    x_prime = np.asarray(x_prime, dtype=float).ravel()
    if x_prime.size % 2 != 0:
        raise ValueError(f"real stacking must have even length, got {x_prime.size}")
    m = x_prime.size // 2
    return x_prime[:m] + 1j * x_prime[m:]


def sym_eig_desc(S: np.ndarray, sym_tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a real symmetric matrix, eigenvalues descending.

    Returns ``(w, Q)`` with S = Q diag(w) Q^T, columns of Q orthonormal and
    w sorted non-increasing.  Rejects matrices whose asymmetry exceeds
    ``sym_tol`` relative to their norm.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {S.shape}")
    scale = np.linalg.norm(S)
    if scale > 0 and np.linalg.norm(S - S.T) > sym_tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    # eigh works on the symmetrized matrix; ascending order from LAPACK
    w, q = np.linalg.eigh(0.5 * (S + S.T))
    order = np.argsort(w)[::-1]
    return w[order], q[:, order]
