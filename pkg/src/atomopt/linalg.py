"""Small dense linear algebra for Gaussian-state work.

Matrices are float64 numpy arrays. The heavy lifting (elimination, QR
iteration) is delegated to the active kernel backend, see ``_backend``.
Quadratures are ordered mode by mode, ``(x1, p1, x2, p2, ...)``.
"""

import numpy as np

from . import _backend
from .errors import NonStable, NotPositiveDefinite, SingularBlock, SingularSystem

SYMMETRY_TOL = 1e-12


def symplectic_form(n_modes):
    """Block-diagonal symplectic form built from ``[[0, 1], [-1, 0]]`` blocks."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def quadrature_indices(modes):
    """Row indices of the (x, p) pairs of the given 0-based mode indices."""
    return [2 * m + k for m in modes for k in (0, 1)]


def _square(a, name="matrix"):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def _check_symmetric(a, name):
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if np.abs(a - a.T).max(initial=0.0) > SYMMETRY_TOL * scale:
        raise ValueError(f"{name} is not symmetric")


def symmetrize(a):
    return 0.5 * (a + a.T)


def eigenvalues(a):
    """All eigenvalues of a real square matrix, as a complex array.

    Sorted by real part, then imaginary part, so output order is stable.
    Raises NonConvergence if the QR iteration stalls.
    """
    a = _square(a)
    if a.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    wr, wi = _backend.kernels.eigvals(a)
    vals = wr + 1j * wi
    order = np.lexsort((vals.imag, vals.real))
    return vals[order]


def spectral_abscissa(a):
    """Largest real part over the spectrum of ``a``."""
    return float(eigenvalues(a).real.max())


def solve_lyapunov(a, q):
    """Solve ``a X + X a^T + q = 0`` for the symmetric steady state ``X``.

    ``a`` must be Hurwitz (every eigenvalue strictly in the left half-plane),
    which is what makes the solution unique. The equation is vectorised into
    an ``n^2 x n^2`` Kronecker-sum system solved by partial-pivot
    elimination; for n = 6 that is a 36 x 36 dense solve.
    """
    a = _square(a, "drift")
    q = _square(q, "diffusion")
    if a.shape != q.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {q.shape}")
    _check_symmetric(q, "diffusion")
    abscissa = spectral_abscissa(a)
    if abscissa >= 0.0:
        raise NonStable(f"drift has eigenvalue with real part {abscissa:.6g} >= 0")
    x = _backend.kernels.lyapunov(a, q)
    return symmetrize(x)


def lyapunov_residual(a, x, q):
    """Max-norm of ``a x + x a^T + q``."""
    return float(np.abs(a @ x + x @ a.T + q).max())


def det(a):
    """Determinant by partial-pivot elimination."""
    return float(_backend.kernels.det(_square(a)))


def is_positive_definite(a):
    return bool(_backend.kernels.cholesky_ok(np.asarray(a, dtype=float)))


def symplectic_eigenvalues(sigma):
    """Symplectic spectrum of a 2n x 2n positive-definite matrix, ascending.

    These are the moduli of the eigenvalues of ``i Omega sigma``, which come
    in +/- pairs; each pair is reported once.
    """
    sigma = _square(sigma, "sigma")
    dim = sigma.shape[0]
    if dim % 2:
        raise ValueError(f"dimension {dim} is odd")
    _check_symmetric(sigma, "sigma")
    if not is_positive_definite(sigma):
        raise NotPositiveDefinite("covariance matrix is not positive definite")
    omega = symplectic_form(dim // 2)
    # i*Omega*sigma and Omega*sigma share moduli; keep the kernel real
    moduli = np.sort(np.abs(eigenvalues(omega @ sigma)))
    return 0.5 * (moduli[0::2] + moduli[1::2])


def schur_complement(sigma, block_a_modes):
    """Schur complement of the ``block_a_modes`` block in ``sigma``.

    With the first block ``S1`` (rows/cols of ``block_a_modes``), the rest
    ``S2`` and the cross block ``S3``, returns ``S2 - S3^T S1^{-1} S3``.
    Mode indices are 0-based positions within ``sigma``.
    """
    sigma = _square(sigma, "sigma")
    _check_symmetric(sigma, "sigma")
    n_modes = sigma.shape[0] // 2
    a_modes = sorted(set(block_a_modes))
    if not a_modes or any(m < 0 or m >= n_modes for m in a_modes):
        raise ValueError(f"invalid block modes {block_a_modes!r} for {n_modes} modes")
    b_modes = [m for m in range(n_modes) if m not in a_modes]
    ia = quadrature_indices(a_modes)
    ib = quadrature_indices(b_modes)
    s1 = sigma[np.ix_(ia, ia)]
    s2 = sigma[np.ix_(ib, ib)]
    s3 = sigma[np.ix_(ia, ib)]
    if not ib:
        return np.zeros((0, 0))
    try:
        x = _backend.kernels.solve(s1, s3)
    except SingularSystem as exc:
        raise SingularBlock(str(exc)) from None
    return symmetrize(s2 - s3.T @ x)
