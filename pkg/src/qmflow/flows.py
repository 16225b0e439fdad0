"""Matrix elements of the flow between exponential vectors of step functions.

On step-function arguments the flow's two-sided matrix element over a time
window factorizes into an ordered product of single-exponential maps: one
factor per subinterval on which both step functions are constant, each
generated by

    K(f0, g0) = theta_0 + g0 theta_minus + conj(f0) theta_plus
                [+ conj(f0) g0 id   in physical normalization].

The full matrix element carries an extra scalar weight
exp(<f, g> restricted to the window's complement), so that pieces of the
step functions outside the window contribute a pure phase-and-scale
factor.

Composition convention: for r <= s <= t the window [r, t] map is the
window [r, s] map composed with the window [s, t] map acting first, i.e.
matrix(r, t) = matrix(r, s) @ matrix(s, t).
"""

from dataclasses import dataclass

import numpy as np

from .linalg import apply_superop, matrix_exponential, min_eig

__all__ = [
    "StepFunction", "step_inner_product", "point_generator", "EvolutionMap",
    "evolution_map", "flow_matrix_element", "block_form", "q_bound_check",
    "kernel_cp_residual", "schur_product_check",
]

# Breakpoints closer than this are one point; intervals shorter than this
# would be numerically empty anyway.
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class StepFunction:
    """A complex step function with finitely many pieces.

    pieces is a tuple of (start, end, value) with start < end; the pieces
    must not overlap (touching endpoints are fine). The function is zero
    outside its pieces.
    """

    pieces: tuple

    def __post_init__(self):
        norm = []
        for k, piece in enumerate(self.pieces):
            if len(piece) != 3:
                raise ValueError(f"piece {k} must be (start, end, value)")
            a, b, v = float(piece[0]), float(piece[1]), complex(piece[2])
            if not (np.isfinite(a) and np.isfinite(b)) or not np.isfinite(v):
                raise ValueError(f"piece {k} has non-finite data")
            if a >= b:
                raise ValueError(f"piece {k} is empty or reversed: [{a}, {b}]")
            norm.append((a, b, v))
        norm.sort(key=lambda p: p[0])
        for (a0, b0, _), (a1, _, _) in zip(norm, norm[1:]):
            if a1 < b0 - MERGE_TOL:
                raise ValueError(
                    f"pieces overlap: [{a0}, {b0}] and one starting at {a1}")
        object.__setattr__(self, "pieces", tuple(norm))

    @classmethod
    def indicator(cls, start, end, value=1.0):
        return cls(((start, end, value),))

    @classmethod
    def zero(cls):
        return cls(())

    def value_at(self, t):
        for a, b, v in self.pieces:
            if a <= t < b:
                return v
        return 0.0 + 0.0j

    def breakpoints(self):
        pts = []
        for a, b, _ in self.pieces:
            pts.extend((a, b))
        return pts


def _merged_grid(points):
    """Sorted deduplicated points, merging anything closer than MERGE_TOL."""
    pts = sorted(points)
    out = []
    for p in pts:
        if not out or p - out[-1] > MERGE_TOL:
            out.append(p)
    return out


def _segments(f, g, start, end):
    """Common refinement of [start, end] by both functions' breakpoints."""
    pts = [p for p in f.breakpoints() + g.breakpoints() if start < p < end]
    grid = _merged_grid([start] + pts + [end])
    return list(zip(grid, grid[1:]))


def step_inner_product(f, g, window=None, complement=False):
    """Integral of conj(f) g, over the line or a window or its complement.

    Parameters
    ----------
    f, g : StepFunction
    window : (s, t), optional
        Restrict the integral to [s, t]; with ``complement`` the integral
        runs over everything outside [s, t] instead.
    """
    if complement and window is None:
        raise ValueError("complement restriction requires a window")
    total = 0.0 + 0.0j
    pts = f.breakpoints() + g.breakpoints()
    if not pts:
        return total
    lo, hi = min(pts), max(pts)
    if window is not None:
        s, t = float(window[0]), float(window[1])
        if s > t:
            raise ValueError(f"window is reversed: [{s}, {t}]")
        pts = pts + [s, t]
        lo, hi = min(lo, s), max(hi, t)
    grid = _merged_grid([p for p in pts if lo <= p <= hi] + [lo, hi])
    for a, b in zip(grid, grid[1:]):
        mid = 0.5 * (a + b)
        if window is not None:
            inside = s <= mid <= t
            if complement == inside:
                continue
        total += np.conj(f.value_at(mid)) * g.value_at(mid) * (b - a)
    return total


def point_generator(sm, f0, g0, mode="physical"):
    """Single-exponential generator for constant test-function values."""
    if mode not in ("conservative", "physical"):
        raise ValueError(f"mode must be 'conservative' or 'physical', got {mode!r}")
    f0, g0 = complex(f0), complex(g0)
    m = sm.theta_zero + g0 * sm.theta_minus + np.conj(f0) * sm.theta_plus
    if mode == "physical":
        m = m + (np.conj(f0) * g0) * np.eye(m.shape[0])
    return m


@dataclass(frozen=True)
class EvolutionMap:
    """Ordered-product map for a window, with its provenance attached."""

    matrix: np.ndarray
    start: float
    end: float
    mode: str

    def apply(self, x):
        return apply_superop(self.matrix, x)


def evolution_map(sm, f, g, start, end, mode="physical"):
    """Ordered product of single-exponential factors over [start, end].

    The window is refined by the breakpoints of both step functions; each
    subinterval contributes exp(length * K(f0, g0)) with the functions'
    values there. Earlier subintervals act later (outermost), so the
    matrices multiply left to right in time order.
    """
    start, end = float(start), float(end)
    if start > end:
        raise ValueError(f"window is reversed: [{start}, {end}]")
    d2 = sm.theta_zero.shape[0]
    total = np.eye(d2, dtype=complex)
    for a, b in _segments(f, g, start, end):
        mid = 0.5 * (a + b)
        k = point_generator(sm, f.value_at(mid), g.value_at(mid), mode)
        total = total @ matrix_exponential(k, b - a)
    return EvolutionMap(matrix=total, start=start, end=end, mode=mode)


def flow_matrix_element(sm, f, g, start, end, x, mode="physical"):
    """Two-sided matrix element of the evolved observable.

    Equals exp(<f, g> outside the window) times the ordered-product map
    applied to x. With x the identity this collapses to
    exp(<f, g>) * identity in physical normalization. Plain scalars are
    accepted for f and g and mean constant values on the window.
    """
    nontrivial = end > start
    if not isinstance(f, StepFunction):
        f = (StepFunction.indicator(start, end, f) if f != 0 and nontrivial
             else StepFunction.zero())
    if not isinstance(g, StepFunction):
        g = (StepFunction.indicator(start, end, g) if g != 0 and nontrivial
             else StepFunction.zero())
    weight = np.exp(step_inner_product(f, g, window=(start, end), complement=True))
    return weight * evolution_map(sm, f, g, start, end, mode).apply(x)


def _as_step(f, t):
    if isinstance(f, StepFunction):
        return f
    return StepFunction.indicator(0.0, t, f) if f != 0 else StepFunction.zero()


def block_form(sm, fs, t, x, mode="physical"):
    """Gram-type block matrix [P_{f_j, f_k}(x)] over the window [0, t].

    fs may contain step functions or plain scalars (treated as constant
    values on [0, t]). Returns an (n d) x (n d) matrix of d x d blocks.
    """
    t = float(t)
    if t < 0:
        raise ValueError(f"window length must be nonnegative, got {t}")
    steps = [_as_step(f, t) for f in fs]
    n, d = len(steps), sm.dim
    out = np.zeros((n * d, n * d), dtype=complex)
    for j, fj in enumerate(steps):
        for k, fk in enumerate(steps):
            out[j * d:(j + 1) * d, k * d:(k + 1) * d] = \
                evolution_map(sm, fj, fk, 0.0, t, mode).apply(x)
    return out


def q_bound_check(sm, fs, t, x, mode="physical"):
    """Smallest eigenvalue of ||x|| [P(1)] - [P(x)].

    Nonnegative when the kernel respects the operator bound of x; the
    norm is the spectral norm.
    """
    x = np.asarray(x, dtype=complex)
    eye = np.eye(sm.dim)
    bound = float(np.linalg.norm(x, 2))
    big = bound * block_form(sm, fs, t, eye, mode) - block_form(sm, fs, t, x, mode)
    return min_eig(big)


def kernel_cp_residual(sm, fs, xs, t, mode="physical"):
    """Smallest eigenvalue of the kernel's Gram matrix [P_{jk}(x_j* x_k)].

    Complete positivity of the kernel makes this matrix PSD for every
    choice of test functions and operators.
    """
    t = float(t)
    steps = [_as_step(f, t) for f in fs]
    if len(xs) != len(steps):
        raise ValueError(f"need as many operators as test functions, "
                         f"got {len(xs)} and {len(steps)}")
    n, d = len(steps), sm.dim
    big = np.zeros((n * d, n * d), dtype=complex)
    for j in range(n):
        xj = np.asarray(xs[j], dtype=complex)
        for k in range(n):
            xk = np.asarray(xs[k], dtype=complex)
            big[j * d:(j + 1) * d, k * d:(k + 1) * d] = \
                evolution_map(sm, steps[j], steps[k], 0.0, t, mode).apply(xj.conj().T @ xk)
    return min_eig(big)


def schur_product_check(sm, fs, xs, t1, t2, mode="physical"):
    """Smallest eigenvalue of the entrywise-composed kernel Gram matrix.

    Composes the window [0, t1] and [0, t2] maps entry by entry before
    evaluating on x_j* x_k; closure of the kernel family under this Schur
    composition keeps the matrix PSD.
    """
    steps = [_as_step(f, max(t1, t2)) for f in fs]
    if len(xs) != len(steps):
        raise ValueError(f"need as many operators as test functions, "
                         f"got {len(xs)} and {len(steps)}")
    n, d = len(steps), sm.dim
    big = np.zeros((n * d, n * d), dtype=complex)
    for j in range(n):
        xj = np.asarray(xs[j], dtype=complex)
        for k in range(n):
            xk = np.asarray(xs[k], dtype=complex)
            m1 = evolution_map(sm, steps[j], steps[k], 0.0, t1, mode).matrix
            m2 = evolution_map(sm, steps[j], steps[k], 0.0, t2, mode).matrix
            big[j * d:(j + 1) * d, k * d:(k + 1) * d] = \
                apply_superop(m1 @ m2, xj.conj().T @ xk)
    return min_eig(big)
