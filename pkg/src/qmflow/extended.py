"""The extended semigroup on 2x2 block operators.

A Markov flow restricted to number vectors is described by four operator
semigroups at once. They fit into a single semigroup acting entrywise on
2x2 block matrices over the system algebra, with generator

    L = [ theta_0                 theta_0 + theta_minus              ]
        [ theta_0 + theta_plus    theta_0 + theta_plus + theta_minus ]

in conservative normalization; the physical normalization adds the
identity map to the bottom-right entry, which makes the evolved identity
block grow like e^t instead of staying flat.

Everything here acts blockwise, so properties of the big map (complete
positivity, dissipativity against the block derivation delta) reduce to
joint properties of the four entries. The diagnostics in this module are
the numerical versions of those properties.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import (
    apply_superop,
    choi_of_map,
    matrix_exponential,
    max_abs,
    min_eig,
)
from .structure import StructureMapSet, check_conjugation, check_unital, leibnitz_residual

__all__ = [
    "BlockOp2", "ExtendedGenerator", "build_extended_generator",
    "apply_extended", "extended_superop_matrix", "extended_choi_min_eig",
    "conservativity_residual", "normalization_residual", "kappa_residual",
    "dissipativity_residual_min_eig", "delta_map", "delta_sq_map",
    "delta_sq_semigroup", "commutation_residual", "resolvent_generator",
]

MODES = ("conservative", "physical")

# Full Choi diagnostics grow as (2d)**4; past block dimension 32 the
# eigenproblem stops being an interactive check.
MAX_CHOI_BLOCK_DIM = 32


@dataclass(frozen=True)
class BlockOp2:
    """A 2x2 block matrix with d x d operator entries."""

    x00: np.ndarray
    x01: np.ndarray
    x10: np.ndarray
    x11: np.ndarray

    def __post_init__(self):
        blocks = {}
        shape = None
        for name in ("x00", "x01", "x10", "x11"):
            b = np.asarray(getattr(self, name), dtype=complex)
            if b.ndim != 2 or b.shape[0] != b.shape[1]:
                raise ValueError(f"block {name} must be square, got shape {b.shape}")
            if shape is None:
                shape = b.shape
            elif b.shape != shape:
                raise ValueError(
                    f"block {name} has shape {b.shape}, expected {shape}")
            blocks[name] = b
        for name, b in blocks.items():
            object.__setattr__(self, name, b)

    @property
    def dim(self):
        return self.x00.shape[0]

    def block(self, i, j):
        return getattr(self, f"x{i}{j}")

    def as_full(self):
        """Assemble the 2d x 2d matrix."""
        return np.block([[self.x00, self.x01], [self.x10, self.x11]])

    @classmethod
    def from_full(cls, m):
        m = np.asarray(m, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValueError(f"expected an even-dimensional square matrix, got {m.shape}")
        d = m.shape[0] // 2
        return cls(m[:d, :d], m[:d, d:], m[d:, :d], m[d:, d:])

    @classmethod
    def identity_pattern(cls, d):
        """All four blocks equal to the identity (the order unit J)."""
        eye = np.eye(d)
        return cls(eye, eye, eye, eye)

    def adjoint(self):
        return BlockOp2(self.x00.conj().T, self.x10.conj().T,
                        self.x01.conj().T, self.x11.conj().T)

    def __matmul__(self, other):
        if not isinstance(other, BlockOp2) or other.dim != self.dim:
            return NotImplemented
        return BlockOp2.from_full(self.as_full() @ other.as_full())

    def __sub__(self, other):
        return BlockOp2(self.x00 - other.x00, self.x01 - other.x01,
                        self.x10 - other.x10, self.x11 - other.x11)

    def max_abs(self):
        return max(max_abs(self.block(i, j)) for i in (0, 1) for j in (0, 1))


@dataclass(frozen=True)
class ExtendedGenerator:
    """The four generator entries plus the structure maps they came from."""

    dim: int
    mode: str
    blocks: tuple  # ((l00, l01), (l10, l11)) of superoperator matrices
    source: StructureMapSet

    def block(self, i, j):
        return self.blocks[i][j]

    def conservative_block(self, i, j):
        """Entry (i, j) in conservative normalization regardless of mode."""
        b = self.blocks[i][j]
        if self.mode == "physical" and i == 1 and j == 1:
            return b - np.eye(b.shape[0])
        return b

    def physical_block(self, i, j):
        b = self.blocks[i][j]
        if self.mode == "conservative" and i == 1 and j == 1:
            return b + np.eye(b.shape[0])
        return b


def build_extended_generator(sm, mode="physical"):
    """Assemble the 2x2 generator table from a structure-map set.

    The set must pass the structural axioms (unitality, conjugation, and
    the derivation rule for the noise maps); sets failing them produce a
    generator with no meaning, so they are rejected with a diagnostic.
    The drift's calibrated product rule is a soft property checked by the
    suite, not a construction precondition.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if not isinstance(sm, StructureMapSet):
        raise ValueError("expected a StructureMapSet")

    r_unital = check_unital(sm)
    if r_unital > 1e-10:
        raise ValueError(f"axiom failure: maps do not kill the identity ({r_unital:.3e})")
    r_conj = check_conjugation(sm)
    if r_conj > 1e-10:
        raise ValueError(f"axiom failure: conjugation rule violated ({r_conj:.3e})")
    rng = np.random.default_rng([0xD1CE, sm.dim])
    for _ in range(4):
        x = rng.standard_normal((sm.dim, sm.dim)) + 1j * rng.standard_normal((sm.dim, sm.dim))
        y = rng.standard_normal((sm.dim, sm.dim)) + 1j * rng.standard_normal((sm.dim, sm.dim))
        x /= max(1.0, max_abs(x))
        y /= max(1.0, max_abs(y))
        res = leibnitz_residual(sm, x, y)
        bar = 1e-9 * max(1.0, max_abs(sm.theta_plus) ** 2)
        if max(res[-1], res[1]) > bar:
            raise ValueError(
                f"axiom failure: noise maps are not derivations "
                f"(residual {max(res[-1], res[1]):.3e})")

    m0, mm, mp = sm.theta_zero, sm.theta_minus, sm.theta_plus
    l00 = m0
    l01 = m0 + mm
    l10 = m0 + mp
    l11 = m0 + mp + mm
    if mode == "physical":
        l11 = l11 + np.eye(l11.shape[0])
    return ExtendedGenerator(dim=sm.dim, mode=mode,
                             blocks=((l00, l01), (l10, l11)), source=sm)


def apply_extended(gen, t, x):
    """Evolve a block operator: entry (i, j) goes through exp(t L_ij)."""
    t = float(t)
    if t < 0:
        raise ValueError(f"evolution time must be nonnegative, got {t}")
    if not isinstance(x, BlockOp2):
        x = BlockOp2.from_full(x)
    if x.dim != gen.dim:
        raise ValueError(f"block dimension {x.dim} does not match generator dimension {gen.dim}")
    out = [[None, None], [None, None]]
    for i in (0, 1):
        for j in (0, 1):
            p = matrix_exponential(gen.block(i, j), t)
            out[i][j] = apply_superop(p, x.block(i, j))
    return BlockOp2(out[0][0], out[0][1], out[1][0], out[1][1])


def _block_index_grid(d):
    """vec indices (in the 2d x 2d stacking) of each d x d block.

    Entry [i][j] lists where block (i, j)'s own column stacking lands
    inside the big vectorization, so blockwise maps assemble into the full
    superoperator matrix by plain index placement.
    """
    p = np.arange(d * d)
    cc, rr = p // d, p % d
    grid = [[None, None], [None, None]]
    for i in (0, 1):
        for j in (0, 1):
            grid[i][j] = (j * d + cc) * (2 * d) + i * d + rr
    return grid


def _assemble_blockwise(block_mats, d):
    full = np.zeros((4 * d * d, 4 * d * d), dtype=complex)
    grid = _block_index_grid(d)
    for i in (0, 1):
        for j in (0, 1):
            q = grid[i][j]
            full[np.ix_(q, q)] = block_mats[i][j]
    return full


def extended_superop_matrix(gen, t):
    """Matrix of the time-t extended map on the doubled space."""
    t = float(t)
    if t < 0:
        raise ValueError(f"evolution time must be nonnegative, got {t}")
    mats = [[matrix_exponential(gen.block(i, j), t) for j in (0, 1)] for i in (0, 1)]
    return _assemble_blockwise(mats, gen.dim)


def extended_choi_min_eig(gen, t):
    """Smallest Choi eigenvalue of the time-t extended map.

    Nonnegative (to tolerance) iff the extended map is completely
    positive. Guarded against large dimensions: the Choi matrix has side
    (2d)**2.
    """
    if gen.dim > MAX_CHOI_BLOCK_DIM:
        raise ValueError(
            f"block dimension {gen.dim} exceeds the Choi diagnostic guard "
            f"({MAX_CHOI_BLOCK_DIM})")
    full = extended_superop_matrix(gen, t)
    return min_eig(choi_of_map(full))


def conservativity_residual(gen, t):
    """Deviation of the conservative evolution from fixing the unit block.

    Applies the conservative-normalization entries to the all-identity
    block operator and returns the max-abs deviation from it.
    """
    eye = np.eye(gen.dim)
    worst = 0.0
    for i in (0, 1):
        for j in (0, 1):
            p = matrix_exponential(gen.conservative_block(i, j), t)
            worst = max(worst, max_abs(apply_superop(p, eye) - eye))
    return worst


def normalization_residual(gen, t):
    """Relative deviation of the physical evolution from its unit profile.

    The physical entries send the identity to (1, 1, 1, e^t) times the
    identity; returns the worst blockwise max-abs deviation divided by
    max(1, |target|).
    """
    eye = np.eye(gen.dim)
    worst = 0.0
    for i in (0, 1):
        for j in (0, 1):
            target = float(np.exp(t)) if (i, j) == (1, 1) else 1.0
            p = matrix_exponential(gen.physical_block(i, j), t)
            dev = max_abs(apply_superop(p, eye) - target * eye)
            worst = max(worst, dev / max(1.0, abs(target)))
    return worst


def kappa_residual(gen):
    """Domain condition on the unit block: physical L(J) = diag(0, 1) blocks.

    Returns the max-abs deviation of the physical generator applied to the
    all-identity block operator from [[0, 0], [0, identity]].
    """
    eye = np.eye(gen.dim)
    worst = 0.0
    for i in (0, 1):
        for j in (0, 1):
            target = eye if (i, j) == (1, 1) else np.zeros_like(eye)
            got = apply_superop(gen.physical_block(i, j), eye)
            worst = max(worst, max_abs(got - target))
    return worst


def _apply_generator(gen, x, conservative=True):
    out = [[None, None], [None, None]]
    for i in (0, 1):
        for j in (0, 1):
            m = gen.conservative_block(i, j) if conservative else gen.block(i, j)
            out[i][j] = apply_superop(m, x.block(i, j))
    return BlockOp2(out[0][0], out[0][1], out[1][0], out[1][1])


def delta_map(x):
    """The block derivation delta(x) = i [x, E] with E = diag(0, identity)."""
    if not isinstance(x, BlockOp2):
        x = BlockOp2.from_full(x)
    z = np.zeros_like(x.x00)
    return BlockOp2(z, 1j * x.x01, -1j * x.x10, z)


def delta_sq_map(x):
    """delta applied twice: kills the diagonal blocks' complement.

    Closed form: delta^2(x) = [[0, -x01], [-x10, 0]].
    """
    if not isinstance(x, BlockOp2):
        x = BlockOp2.from_full(x)
    z = np.zeros_like(x.x00)
    return BlockOp2(z, -x.x01, -x.x10, z)


def delta_sq_semigroup(t, x):
    """exp(t delta^2 / 2): leaves diagonal blocks alone, damps the
    off-diagonal ones by e^(-t/2)."""
    t = float(t)
    if t < 0:
        raise ValueError(f"evolution time must be nonnegative, got {t}")
    if not isinstance(x, BlockOp2):
        x = BlockOp2.from_full(x)
    s = np.exp(-t / 2.0)
    return BlockOp2(x.x00, s * x.x01, s * x.x10, x.x11)


def commutation_residual(gen):
    """||L delta^2 - delta^2 L|| on the doubled space (max-abs).

    Both maps act entrywise in the block indices, so this vanishes up to
    rounding; the residual is computed from the full assembled matrices,
    not assumed.
    """
    d = gen.dim
    eye = np.eye(d * d)
    lmats = [[gen.block(i, j) for j in (0, 1)] for i in (0, 1)]
    dmats = [[-eye if i != j else 0.0 * eye for j in (0, 1)] for i in (0, 1)]
    kl = _assemble_blockwise(lmats, d)
    kd = _assemble_blockwise(dmats, d)
    return max_abs(kl @ kd - kd @ kl)


def dissipativity_residual_min_eig(gen, x, level=1):
    """Smallest eigenvalue of the dissipativity form at a block operator.

    R = L(x*x) - L(x*)x - x*L(x) + delta(x)*delta(x)

    with L the conservative generator acting blockwise. Complete
    positivity of the semigroup forces R >= 0 for every x; a negative
    eigenvalue is a constructive witness against it.

    level=2 runs the same form after tensoring the doubled algebra with
    2x2 complex matrices, catching violations invisible at level 1. At
    level 2, x may be a 4d x 4d matrix (a 2x2 matrix of block operators).
    """
    if gen.mode != "conservative":
        raise ValueError("dissipativity form is defined for the conservative mode")
    if level not in (1, 2):
        raise ValueError(f"ampliation level must be 1 or 2, got {level}")
    d = gen.dim

    if level == 1:
        if not isinstance(x, BlockOp2):
            x = BlockOp2.from_full(x)
        xs = x.as_full()

        def lift(m):
            return _apply_generator(gen, BlockOp2.from_full(m), conservative=True).as_full()

        e = np.kron(np.diag([0.0, 1.0]), np.eye(d))
    else:
        xs = np.asarray(x, dtype=complex)
        if xs.shape != (4 * d, 4 * d):
            raise ValueError(f"level-2 element must have shape {(4 * d, 4 * d)}, got {xs.shape}")

        def lift(m):
            out = np.zeros_like(m)
            for a in (0, 1):
                for b in (0, 1):
                    sub = BlockOp2.from_full(m[a * 2 * d:(a + 1) * 2 * d, b * 2 * d:(b + 1) * 2 * d])
                    out[a * 2 * d:(a + 1) * 2 * d, b * 2 * d:(b + 1) * 2 * d] = \
                        _apply_generator(gen, sub, conservative=True).as_full()
            return out

        e = np.kron(np.eye(2), np.kron(np.diag([0.0, 1.0]), np.eye(d)))

    xstar = xs.conj().T
    r = lift(xstar @ xs) - lift(xstar) @ xs - xstar @ lift(xs)
    dx = 1j * (xs @ e - e @ xs)
    r = r + dx.conj().T @ dx
    return min_eig(r)


def resolvent_generator(gen, eps):
    """Bounded regularization L_eps = L (1 - eps L)^(-1), entrywise.

    The regularized entries converge to the originals as eps -> 0 with
    first-order error in eps. Raises when 1 - eps L is numerically
    singular for some entry.
    """
    eps = float(eps)
    if eps <= 0:
        raise ValueError(f"resolvent parameter must be positive, got {eps}")
    d2 = gen.dim ** 2
    eye = np.eye(d2)
    out = [[None, None], [None, None]]
    for i in (0, 1):
        for j in (0, 1):
            a = eye - eps * gen.block(i, j)
            if np.linalg.cond(a) > 1e12:
                raise ValueError(f"resolvent parameter too large for entry ({i}, {j})")
            out[i][j] = np.linalg.solve(a, gen.block(i, j))
    return ExtendedGenerator(dim=gen.dim, mode=gen.mode,
                             blocks=((out[0][0], out[0][1]), (out[1][0], out[1][1])),
                             source=gen.source)
