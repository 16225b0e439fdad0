"""Dense operator and superoperator tools.

Conventions used throughout the package:

* Operators on a d-dimensional space are complex numpy arrays of shape
  (d, d).
* Superoperators (linear maps on operators) are stored as matrices of
  shape (d**2, d**2) acting on column-stacked vectorizations:
  ``vec(X)[j*d + i] = X[i, j]``, i.e. ``vec(X) = X.flatten(order='F')``.
  Under this convention ``vec(A @ X @ B) = kron(B.T, A) @ vec(X)``.
* Choi matrices are ``sum_ij e_ij (x) Phi(e_ij)`` with e_ij the matrix
  units; complete positivity of Phi is equivalent to the Choi matrix
  being positive semidefinite.
"""

import numpy as np
import scipy.linalg

__all__ = [
    "vectorize", "devectorize", "apply_superop", "sandwich_map",
    "left_mul_map", "right_mul_map", "commutator_map", "dissipator_map",
    "matrix_exponential", "choi_of_map", "min_eig", "is_psd",
    "hermitian_part", "max_abs", "adjoint_superop_matrix",
]


def _as_square(x, name="operator"):
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite entries")
    return x


def _superop_dim(s, name="superoperator"):
    """Check that s is a valid superoperator matrix and return the operator dim."""
    s = _as_square(s, name)
    d = int(round(np.sqrt(s.shape[0])))
    if d * d != s.shape[0]:
        raise ValueError(f"{name} dimension {s.shape[0]} is not a perfect square")
    return s, d


def max_abs(x):
    """Largest entry magnitude; the residual norm used by the checks."""
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def hermitian_part(x):
    x = np.asarray(x, dtype=complex)
    return 0.5 * (x + x.conj().T)


def vectorize(x):
    """Column-stack an operator into a vector of length d**2."""
    x = _as_square(x)
    return x.flatten(order="F")


def devectorize(v, dim=None):
    """Inverse of :func:`vectorize`.

    Parameters
    ----------
    v : array, shape (d**2,)
    dim : int, optional
        Operator dimension d. Inferred as sqrt(len(v)) when omitted.
    """
    v = np.asarray(v, dtype=complex).ravel()
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise ValueError(f"vector of length {v.size} is not a stacked {dim}x{dim} operator")
    return v.reshape((dim, dim), order="F")


def apply_superop(s, x):
    """Apply a superoperator matrix to an operator: devec(S @ vec(X))."""
    s, d = _superop_dim(s)
    x = _as_square(x)
    if x.shape[0] != d:
        raise ValueError(f"operator dimension {x.shape[0]} does not match superoperator dimension {d}")
    return devectorize(s @ vectorize(x), d)


def sandwich_map(a, b):
    """Matrix of X -> A @ X @ B.  Column stacking gives kron(B.T, A)."""
    a = _as_square(a, "a")
    b = _as_square(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch between a {a.shape} and b {b.shape}")
    return np.kron(b.T, a)


def left_mul_map(a):
    """Matrix of X -> A @ X."""
    a = _as_square(a)
    return np.kron(np.eye(a.shape[0]), a)


def right_mul_map(b):
    """Matrix of X -> X @ B."""
    b = _as_square(b)
    return np.kron(b.T, np.eye(b.shape[0]))


def commutator_map(a):
    """Matrix of the Heisenberg drift X -> -i [X, A] = -i (X A - A X).

    Applied to the identity this vanishes identically, so generators
    assembled from commutator maps are automatically unital.
    """
    a = _as_square(a)
    return -1j * (right_mul_map(a) - left_mul_map(a))


def dissipator_map(l, w=1.0, mirrored=False):
    """Matrix of the weighted Lindblad dissipator in Heisenberg form.

    X -> w * (2 L* X L - {X, L* L})        (default)
    X -> w * (2 L X L* - {X, L L*})        (mirrored=True)

    Parameters
    ----------
    l : array, shape (d, d)
        Jump operator.
    w : float
        Nonnegative weight. Negative weights are rejected: they flip the
        sign of the dissipation and destroy positivity of the semigroup.
    mirrored : bool
        Exchange the roles of L and L*.
    """
    l = _as_square(l, "jump operator")
    w = float(w)
    if w < 0:
        raise ValueError(f"dissipator weight must be nonnegative, got {w}")
    if mirrored:
        l = l.conj().T
    lsl = l.conj().T @ l
    gain = 2.0 * sandwich_map(l.conj().T, l)
    loss = left_mul_map(lsl) + right_mul_map(lsl)
    return w * (gain - loss)


def matrix_exponential(m, t=1.0):
    """exp(t * M) by scaling-and-squaring (scipy.linalg.expm).

    Rejects non-square or non-finite input and non-finite t.
    """
    m = _as_square(m, "generator")
    t = float(t)
    if not np.isfinite(t):
        raise ValueError(f"time parameter must be finite, got {t}")
    return scipy.linalg.expm(t * m)


def choi_of_map(s, check_hermitian=True, tol=1e-10):
    """Choi matrix of a superoperator given as a d**2 x d**2 matrix.

    Returns C = sum_ij e_ij (x) Phi(e_ij), shape (d**2, d**2). The map is
    completely positive iff C >= 0. With ``check_hermitian`` the Choi
    matrix is required to be Hermitian up to ``tol`` relative to its
    largest entry (i.e. the map must be hermiticity preserving), since
    eigenvalue diagnostics are meaningless otherwise.
    """
    s, d = _superop_dim(s)
    # Reshuffle: C[i*d + k, j*d + l] = S[l*d + k, j*d + i].
    c = s.reshape(d, d, d, d).transpose(3, 1, 2, 0).reshape(d * d, d * d)
    if check_hermitian:
        dev = max_abs(c - c.conj().T)
        if dev > tol * max(1.0, max_abs(c)):
            raise ValueError(
                f"map not hermiticity-preserving: Choi asymmetry {dev:.3e}")
    return c


def min_eig(h):
    """Smallest eigenvalue of the Hermitian part of h."""
    h = _as_square(h)
    return float(np.linalg.eigvalsh(hermitian_part(h))[0])


def is_psd(h, tol_scale=1e-9):
    """Positive-semidefinite test with a relative tolerance floor.

    Accepts h when min_eig(h) >= -tol_scale * max(1, ||h||), with ||h||
    the spectral norm of the Hermitian part.
    """
    h = _as_square(h)
    evals = np.linalg.eigvalsh(hermitian_part(h))
    scale = max(1.0, float(np.max(np.abs(evals))) if evals.size else 0.0)
    return bool(evals[0] >= -tol_scale * scale)


def _transpose_perm(d):
    # vec index of (i, j) is j*d + i; transposition sends it to i*d + j
    idx = np.arange(d * d)
    i, j = idx % d, idx // d
    return i * d + j


def adjoint_superop_matrix(s):
    """Matrix of X -> S(X*)* for a superoperator matrix S.

    A map Theta satisfies the conjugation rule Theta'(x*) = Theta(x)* for
    all x exactly when matrix(Theta') equals this transform of
    matrix(Theta).
    """
    s, d = _superop_dim(s)
    p = _transpose_perm(d)
    return s.conj()[np.ix_(p, p)]
