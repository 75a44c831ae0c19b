"""Dense complex linear algebra: tensor products, Hermitian eigendecomposition,
matrix functions, exact unitary exponentials, and the norms used everywhere else.

All operators are plain ``numpy.ndarray`` matrices in row-major order; square
operators on qubit registers have power-of-two dimension.  Every function is
pure and never mutates its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NegativeEigenvalueError, NotHermitianError

HERMITIAN_TOL = 1e-9
EIG_RECONSTRUCTION_TOL = 1e-10


def as_complex_matrix(m) -> np.ndarray:
    """Coerce to a 2-d complex128 array without copying when possible."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={a.ndim}")
    return a


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation |m - m^dagger|."""
    m = as_complex_matrix(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def require_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotHermitianError(f"matrix is not square: {m.shape}")
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NotHermitianError(f"max |m - m^dagger| = {defect:.3e} exceeds {tol:.1e}")
    return m


def tensor(a: np.ndarray, b: np.ndarray, *more: np.ndarray) -> np.ndarray:
    """Kronecker product; the left factor owns the most significant qubits."""
    out = np.kron(as_complex_matrix(a), as_complex_matrix(b))
    for m in more:
        out = np.kron(out, as_complex_matrix(m))
    return out


@dataclass(frozen=True)
class HermitianEigen:
    """Spectral decomposition with eigenvalues sorted descending.

    Column j of ``vectors`` pairs with ``values[j]``; reconstruction
    V diag(values) V^dagger matches the input to EIG_RECONSTRUCTION_TOL.
    """

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def eig_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> HermitianEigen:
    """Eigendecompose a Hermitian matrix, raising NotHermitianError otherwise."""
    m = require_hermitian(m, tol)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    w, v = w[::-1].copy(), v[:, ::-1].copy()
    w.flags.writeable = False
    v.flags.writeable = False
    return HermitianEigen(values=w, vectors=v)


def matrix_func(
    m: np.ndarray,
    f: Callable[[np.ndarray], np.ndarray],
    clamp_negative: bool = False,
    tol: float = HERMITIAN_TOL,
) -> np.ndarray:
    """Apply a real function to the spectrum: V diag(f(lambda)) V^dagger.

    With ``clamp_negative`` set, eigenvalues in [-tol, 0) are treated as 0
    before applying ``f``; anything below -tol raises NegativeEigenvalueError.
    """
    eig = eig_hermitian(m, tol)
    w = eig.values
    if clamp_negative:
        if np.min(w) < -tol:
            raise NegativeEigenvalueError(
                f"eigenvalue {np.min(w):.3e} below -{tol:.1e}"
            )
        w = np.maximum(w, 0.0)
    fw = np.asarray(f(w), dtype=float)
    return (eig.vectors * fw) @ eig.vectors.conj().T


def sqrtm_psd(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix (negatives clamped)."""
    return matrix_func(m, np.sqrt, clamp_negative=True, tol=tol)


def expm_i(m: np.ndarray, s: float = 1.0, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Exact unitary e^{i s m} for Hermitian m, via eigendecomposition."""
    eig = eig_hermitian(m, tol)
    phases = np.exp(1j * s * eig.values)
    return (eig.vectors * phases) @ eig.vectors.conj().T


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value."""
    m = as_complex_matrix(m)
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values."""
    m = as_complex_matrix(m)
    return float(np.linalg.norm(m, "nuc")) if m.size else 0.0


def complete_unitary(first_column: np.ndarray) -> np.ndarray:
    """Extend a unit vector to a full unitary whose column 0 is that vector.

    The remaining columns come from orthonormalizing identity columns against
    the prescribed first column; the completion is deterministic.
    """
    psi = np.asarray(first_column, dtype=complex).reshape(-1)
    d = psi.size
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"first column norm {nrm} is not 1")
    # Drop the identity column most parallel to psi to keep the basis full rank.
    drop = int(np.argmax(np.abs(psi)))
    cols = np.empty((d, d), dtype=complex)
    cols[:, 0] = psi
    rest = [i for i in range(d) if i != drop]
    cols[:, 1:] = np.eye(d, dtype=complex)[:, rest]
    q, _ = np.linalg.qr(cols)
    phase = np.vdot(q[:, 0], psi)
    phase /= abs(phase)
    q[:, 0] *= phase
    # Tiny residual from QR; pin the first column exactly.
    q[:, 0] = psi
    return q


def unitarity_defect(u: np.ndarray) -> float:
    """Operator-norm distance of U^dagger U from the identity."""
    u = as_complex_matrix(u)
    return operator_norm(u.conj().T @ u - np.eye(u.shape[0]))
