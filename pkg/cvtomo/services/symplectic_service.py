"""
Symplectic Service - real symplectic linear algebra

This module contains functions for:
- The symplectic form and symplecticity checks
- Williamson decomposition of covariance matrices
- Bloch-Messiah (Euler) decomposition of symplectic matrices
- Random symplectic and passive transformations
- Perturbation diagnostics used by the property tests

Ordering is (x1, p1, ..., xn, pn) throughout.
"""

import logging
from typing import Optional

import numpy as np
from scipy.linalg import polar, schur

from cvtomo.conf import get_setting
from cvtomo.exceptions import ConditioningError, InvalidInputError
from cvtomo.models import EulerDecomposition, SymplecticDecomposition, SymplecticForm

logger = logging.getLogger(__name__)

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _tolerance(tol: Optional[float]) -> float:
    return get_setting('TOLERANCE') if tol is None else tol


def _even_square(matrix, what: str = 'matrix') -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidInputError(f"{what} must be square, got shape {matrix.shape}")
    if matrix.shape[0] == 0 or matrix.shape[0] % 2:
        raise InvalidInputError(f"{what} must have even dimension, got {matrix.shape[0]}")
    return matrix


def operator_norm(matrix) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(matrix, 2))


def symplectic_form(n: int) -> SymplecticForm:
    """
    Canonical n-mode symplectic form.

    Args:
        n: Number of modes (>= 1)

    Returns:
        SymplecticForm with matrix block-diag([[0, 1], [-1, 0]], ...)

    Example:
        >>> symplectic_form(1).matrix
        array([[ 0.,  1.],
               [-1.,  0.]])
    """
    if int(n) != n or n < 1:
        raise InvalidInputError(f"mode count must be a positive integer, got {n}")
    return SymplecticForm(n=int(n), matrix=np.kron(np.eye(int(n)), _J))


def omega(n: int) -> np.ndarray:
    """Shortcut for ``symplectic_form(n).matrix``."""
    return symplectic_form(n).matrix


def symmetrize(matrix, tol: Optional[float] = None) -> np.ndarray:
    """Return (M + M^T)/2, refusing inputs whose asymmetry exceeds ``tol``."""
    tol = _tolerance(tol)
    matrix = _even_square(matrix, 'covariance matrix')
    scale = max(1.0, float(np.max(np.abs(matrix))))
    asymmetry = float(np.max(np.abs(matrix - matrix.T)))
    if asymmetry > tol * scale:
        raise InvalidInputError(f"matrix is not symmetric (asymmetry {asymmetry:.3g})")
    return (matrix + matrix.T) / 2


def is_symplectic(S, tol: Optional[float] = None) -> bool:
    """True iff ||S Omega S^T - Omega|| <= tol (operator norm)."""
    S = _even_square(S, 'symplectic matrix')
    Om = omega(S.shape[0] // 2)
    return operator_norm(S @ Om @ S.T - Om) <= _tolerance(tol)


def _positive_blocks(T: np.ndarray, Q: np.ndarray):
    """
    Read the 2x2 blocks of a real Schur form of an antisymmetric matrix.

    Columns of Q are swapped where needed so that every block reads
    [[0, b], [-b, 0]] with b > 0. Returns (b values, adjusted Q).
    """
    Q = Q.copy()
    size = T.shape[0] // 2
    values = np.empty(size)
    for j in range(size):
        i = 2 * j
        b = (T[i, i + 1] - T[i + 1, i]) / 2
        if b < 0:
            Q[:, [i, i + 1]] = Q[:, [i + 1, i]]
            b = -b
        values[j] = b
    return values, Q


def _block_permutation(order) -> np.ndarray:
    """Permutation matrix moving mode block order[j] to position j (columns)."""
    columns = np.concatenate([[2 * j, 2 * j + 1] for j in order]).astype(int)
    P = np.zeros((2 * len(order), 2 * len(order)))
    P[columns, np.arange(2 * len(order))] = 1.0
    return P


def williamson(V, tol: Optional[float] = None) -> SymplecticDecomposition:
    """
    Williamson decomposition V = S D S^T.

    A = V^{1/2} is formed from the eigendecomposition of V, the antisymmetric
    matrix A Omega A is brought to real Schur form, the symplectic eigenvalues
    are read from its 2x2 blocks and S = A O D^{-1/2}.

    Args:
        V: Symmetric positive-definite 2n x 2n matrix
        tol: Symmetry tolerance (defaults to settings)

    Returns:
        SymplecticDecomposition with eigenvalues sorted descending

    Raises:
        InvalidInputError: asymmetric or non-positive-definite input
        ConditioningError: smallest eigenvalue below the conditioning floor
    """
    V = symmetrize(V, tol)
    n = V.shape[0] // 2

    w, U = np.linalg.eigh(V)
    if w[0] <= 0:
        raise InvalidInputError(f"matrix is not positive definite (eigenvalue {w[0]:.3g})")
    if w[0] < get_setting('CONDITIONING_FLOOR') * w[-1]:
        raise ConditioningError(f"matrix is near singular (eigenvalues {w[0]:.3g} .. {w[-1]:.3g})")

    A = (U * np.sqrt(w)) @ U.T
    M = A @ omega(n) @ A
    M = (M - M.T) / 2
    T, Q = schur(M, output='real')
    d, Q = _positive_blocks(T, Q)

    # descending, ties keep Schur block order
    order = np.argsort(-d, kind='stable')
    P = _block_permutation(order)
    d = d[order]
    Q = Q @ P

    S = A @ Q @ np.diag(np.repeat(d ** -0.5, 2))
    logger.debug("williamson: n=%d, eigenvalues=%s", n, d)
    return SymplecticDecomposition(symplectic=S, eigenvalues=d)


def symplectic_eigenvalues(V, tol: Optional[float] = None) -> np.ndarray:
    """Symplectic eigenvalues of V, sorted descending."""
    return williamson(V, tol).eigenvalues


def _unit_pairs(vectors: np.ndarray) -> np.ndarray:
    """
    Symplectic orthonormal basis of an Omega-invariant subspace.

    ``vectors`` holds an orthonormal basis of the subspace in its columns;
    the result has columns (e1, f1, e2, f2, ...) with e^T Omega f = 1.
    """
    size = vectors.shape[1]
    if size == 0:
        return vectors
    restricted = vectors.T @ omega(vectors.shape[0] // 2) @ vectors
    restricted = (restricted - restricted.T) / 2
    T, Q = schur(restricted, output='real')
    _, Q = _positive_blocks(T, Q)
    return vectors @ Q


def _sign_fix(v: np.ndarray) -> np.ndarray:
    pivot = np.argmax(np.abs(v))
    return v if v[pivot] >= 0 else -v


def bloch_messiah(S, tol: Optional[float] = None) -> EulerDecomposition:
    """
    Bloch-Messiah decomposition S = O1 Z O2.

    S is split by the polar decomposition S = O P into a passive part O and
    a positive symplectic part P; P is diagonalized by an orthogonal
    symplectic K built from its eigenvectors, so that O1 = O K and O2 = K^T.

    Args:
        S: Symplectic matrix
        tol: Symplecticity tolerance (defaults to settings)

    Returns:
        EulerDecomposition with squeezing values z >= 1 sorted descending
    """
    tol = _tolerance(tol)
    S = _even_square(S, 'symplectic matrix')
    if not is_symplectic(S, max(tol, 1e-8)):
        raise InvalidInputError("input is not symplectic")
    n = S.shape[0] // 2

    if operator_norm(S.T @ S - np.eye(2 * n)) <= tol:
        return EulerDecomposition(left=S, squeezing=np.ones(n), right=np.eye(2 * n))

    O, P = polar(S, side='right')
    P = (P + P.T) / 2
    values, vectors = np.linalg.eigh(P)

    # eigenvalues pair up as (z, 1/z); Omega maps the z-eigenspace to the 1/z one
    threshold = max(tol, 1e-9)
    order = np.argsort(-values, kind='stable')
    squeezed = [i for i in order if values[i] > 1 + threshold]
    unit = [i for i in range(2 * n) if abs(values[i] - 1) <= threshold]
    if 2 * len(squeezed) + len(unit) != 2 * n:
        raise ConditioningError("could not pair the singular values of the symplectic matrix")

    Om = omega(n)
    K = np.zeros((2 * n, 2 * n))
    z = np.ones(n)
    for j, i in enumerate(squeezed):
        v = _sign_fix(vectors[:, i])
        K[:, 2 * j] = v
        K[:, 2 * j + 1] = Om.T @ v
        z[j] = values[i]
    if unit:
        K[:, 2 * len(squeezed):] = _unit_pairs(vectors[:, unit])

    return EulerDecomposition(left=O @ K, squeezing=z, right=K.T)


def unitary_to_passive(u) -> np.ndarray:
    """Orthogonal symplectic matrix acting as a -> u a on the ladder operators."""
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    O = np.zeros((2 * n, 2 * n))
    O[0::2, 0::2] = u.real
    O[0::2, 1::2] = -u.imag
    O[1::2, 0::2] = u.imag
    O[1::2, 1::2] = u.real
    return O


def passive_to_unitary(O) -> np.ndarray:
    """Inverse of ``unitary_to_passive``."""
    O = np.asarray(O, dtype=float)
    return O[0::2, 0::2] + 1j * O[1::2, 0::2]


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random n x n unitary (QR of a complex Ginibre matrix, phases fixed)."""
    ginibre = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(ginibre)
    diagonal = np.diag(r)
    return q * (diagonal / np.abs(diagonal))


def random_symplectic(n: int, z_max: float, rng: np.random.Generator) -> np.ndarray:
    """
    Random symplectic matrix O1 Z O2 with squeezing values in [1, z_max].

    Args:
        n: Number of modes
        z_max: Largest allowed singular value (>= 1)
        rng: numpy Generator; a fixed seed reproduces the matrix bit for bit
    """
    if z_max < 1:
        raise InvalidInputError(f"z_max must be >= 1, got {z_max}")
    symplectic_form(n)
    left = unitary_to_passive(haar_unitary(n, rng))
    right = unitary_to_passive(haar_unitary(n, rng))
    z = rng.uniform(1.0, z_max, size=n)
    Z = np.diag(np.column_stack([z, 1.0 / z]).ravel())
    return left @ Z @ right


def symplectic_norm_bound_check(V, tol: Optional[float] = None) -> bool:
    """True iff the Williamson S of V satisfies ||S|| <= sqrt(||V||)."""
    S = williamson(V, tol).symplectic
    return operator_norm(S) <= np.sqrt(operator_norm(V)) * (1 + 1e-10)


def condition_number(V) -> float:
    """K(V) = ||V|| ||V^{-1}||."""
    V = np.asarray(V, dtype=float)
    return operator_norm(V) * operator_norm(np.linalg.inv(V))


def perturbation_bound(V1, V2) -> float:
    """Upper bound sqrt(K(V1) K(V2)) ||V1 - V2|| on ||D1 - D2||."""
    return float(np.sqrt(condition_number(V1) * condition_number(V2)) * operator_norm(np.asarray(V1) - np.asarray(V2)))
