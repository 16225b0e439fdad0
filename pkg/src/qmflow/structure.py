"""Structure maps of a quantum stochastic flow.

A flow is described by three linear maps on the system algebra, written
here as superoperator matrices (see :mod:`qmflow.linalg` for the stacking
convention):

* ``theta_plus``   couples to the creation noise,
* ``theta_minus``  couples to the annihilation noise,
* ``theta_zero``   is the drift.

The maps must kill the identity, satisfy the conjugation rule
``theta_minus(x*) = theta_plus(x)*`` and ``theta_zero(x*) = theta_zero(x)*``,
and obey a product rule: the noise maps are plain derivations, while the
drift picks up a quadratic correction

    theta_zero(xy) = theta_zero(x) y + x theta_zero(y)
                     + c_mp theta_minus(x) theta_plus(y)
                     + c_pm theta_plus(x) theta_minus(y).

The correction constants form the Ito table of the driving noise. For
drifts assembled from dissipators the constants are not free: they are
pinned by the maps themselves, so :func:`build_evans_hudson` measures them
(least squares over random operator pairs) and stores the calibrated
values, warning when a supplied table disagrees.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    adjoint_superop_matrix,
    apply_superop,
    commutator_map,
    dissipator_map,
    hermitian_part,
    max_abs,
)

__all__ = [
    "ItoTable", "StructureMapSet", "check_unital", "check_conjugation",
    "leibnitz_residual", "build_evans_hudson",
]

# Unitality must hold at construction time; anything looser than this is
# not a structure-map set but a bug in the caller.
UNITAL_TOL = 1e-10

_CALIBRATION_PAIRS = 8
_CALIBRATION_SEED = 0x1707


@dataclass(frozen=True)
class ItoTable:
    """Correction constants of the drift product rule.

    c_mp multiplies theta_minus(x) theta_plus(y), c_pm the mirrored
    product. Real parts must be nonnegative: they are the weights of the
    two noise channels and negative weights have no positive semigroup.
    """

    c_mp: complex = 0.0
    c_pm: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c_mp", complex(self.c_mp))
        object.__setattr__(self, "c_pm", complex(self.c_pm))
        for name in ("c_mp", "c_pm"):
            v = getattr(self, name)
            if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                raise ValueError(f"Ito constant {name} must be finite")
            if v.real < -1e-12:
                raise ValueError(
                    f"Ito constant {name} has negative real part {v.real:.3e}")


@dataclass(frozen=True)
class StructureMapSet:
    """The three maps of a flow plus the Ito table they were built for.

    Fields hold superoperator matrices of shape (dim**2, dim**2).
    Construction checks shapes and unitality (each map must kill the
    identity to within ``UNITAL_TOL``); the deeper product-rule and
    positivity properties are checked by the verification suite.
    """

    dim: int
    theta_minus: np.ndarray
    theta_zero: np.ndarray
    theta_plus: np.ndarray
    ito: ItoTable = field(default_factory=ItoTable)

    def __post_init__(self):
        d = int(self.dim)
        if d < 1:
            raise ValueError(f"dimension must be positive, got {d}")
        object.__setattr__(self, "dim", d)
        for name in ("theta_minus", "theta_zero", "theta_plus"):
            m = np.asarray(getattr(self, name), dtype=complex)
            if m.shape != (d * d, d * d):
                raise ValueError(
                    f"{name} must have shape {(d * d, d * d)}, got {m.shape}")
            if not np.all(np.isfinite(m)):
                raise ValueError(f"{name} contains non-finite entries")
            object.__setattr__(self, name, m)
        resid = check_unital(self)
        if resid > UNITAL_TOL:
            raise ValueError(
                f"structure maps must kill the identity; residual {resid:.3e}")

    def maps(self):
        """The three maps keyed by their noise index -1, 0, +1."""
        return {-1: self.theta_minus, 0: self.theta_zero, 1: self.theta_plus}


def check_unital(sm):
    """max over the three maps of ||theta(identity)|| (max-abs norm)."""
    eye = np.eye(sm.dim)
    return max(max_abs(apply_superop(m, eye)) for m in sm.maps().values())


def check_conjugation(sm):
    """Residual of the conjugation rule, maximized over an operator basis.

    Returns max(||theta_minus - C(theta_plus)||, ||theta_zero - C(theta_zero)||)
    in the max-abs norm, where C is the matrix transform realizing
    x -> theta(x*)*. Vanishing residual is equivalent to the rule holding
    for every operator, not just sampled ones.
    """
    r1 = max_abs(sm.theta_minus - adjoint_superop_matrix(sm.theta_plus))
    r0 = max_abs(sm.theta_zero - adjoint_superop_matrix(sm.theta_zero))
    return max(r0, r1)


def leibnitz_residual(sm, x, y):
    """Product-rule residuals of the three maps on a pair of operators.

    Returns a dict keyed by -1, 0, +1. The noise maps must be exact
    derivations; the drift residual is taken against the stored Ito table.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != (sm.dim, sm.dim) or y.shape != (sm.dim, sm.dim):
        raise ValueError(
            f"operands must be {sm.dim}x{sm.dim} operators, got {x.shape} and {y.shape}")
    xy = x @ y
    out = {}
    for alpha in (-1, 1):
        m = sm.maps()[alpha]
        out[alpha] = max_abs(
            apply_superop(m, xy) - apply_superop(m, x) @ y - x @ apply_superop(m, y))
    m0 = sm.theta_zero
    corr = (sm.ito.c_mp * apply_superop(sm.theta_minus, x) @ apply_superop(sm.theta_plus, y)
            + sm.ito.c_pm * apply_superop(sm.theta_plus, x) @ apply_superop(sm.theta_minus, y))
    out[0] = max_abs(
        apply_superop(m0, xy) - apply_superop(m0, x) @ y - x @ apply_superop(m0, y) - corr)
    return out


def calibrate_ito(theta_minus, theta_zero, theta_plus, dim):
    """Measure the drift's correction constants by least squares.

    Draws a fixed set of random operator pairs, computes the drift's
    product-rule defect and fits it to the two quadratic correction
    candidates. Returns (ItoTable, fit_residual). Raises when the defect
    is not spanned by the two products, i.e. the maps do not satisfy a
    two-constant product rule at all.
    """
    rng = np.random.default_rng([_CALIBRATION_SEED, dim])
    cols_u, cols_v, rhs = [], [], []
    for _ in range(_CALIBRATION_PAIRS):
        x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        y = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        x /= max(1.0, max_abs(x))
        y /= max(1.0, max_abs(y))
        tmx = apply_superop(theta_minus, x)
        tpy = apply_superop(theta_plus, y)
        tpx = apply_superop(theta_plus, x)
        tmy = apply_superop(theta_minus, y)
        d0 = (apply_superop(theta_zero, x @ y)
              - apply_superop(theta_zero, x) @ y - x @ apply_superop(theta_zero, y))
        cols_u.append((tmx @ tpy).ravel())
        cols_v.append((tpx @ tmy).ravel())
        rhs.append(d0.ravel())
    a = np.stack([np.concatenate(cols_u), np.concatenate(cols_v)], axis=1)
    b = np.concatenate(rhs)
    scale = max(max_abs(a), max_abs(b))
    if scale < 1e-13:
        # No quadratic content at all (e.g. zero noise maps): any table works.
        return ItoTable(0.0, 0.0), 0.0
    coeffs, *_ = np.linalg.lstsq(a, b, rcond=None)
    resid = max_abs(a @ coeffs - b)
    if resid > 1e-8 * max(1.0, scale):
        raise ValueError(
            "drift defect is not a two-constant combination of the noise-map "
            f"products (fit residual {resid:.3e})")
    return ItoTable(coeffs[0], coeffs[1]), float(resid)


def build_evans_hudson(h, f, w_minus, w_plus, ito=None):
    """Structure maps of a Hamiltonian-plus-dissipator drift.

    theta_plus  = -i [., F]
    theta_minus = -i [., F*]
    theta_zero  = -i [., H] + w_minus (2 F* . F - {., F*F})
                            + w_plus  (2 F . F* - {., FF*})

    Parameters
    ----------
    h : array, shape (d, d)
        Hamiltonian. Must be Hermitian to 1e-12 relative; slight
        asymmetry is symmetrized away with a warning.
    f : array, shape (d, d)
        Coupling operator.
    w_minus, w_plus : float
        Nonnegative dissipation weights.
    ito : ItoTable, optional
        Declared Ito table. The constants actually stored are always the
        calibrated ones; a disagreeing declaration triggers a warning.
    """
    h = np.asarray(h, dtype=complex)
    f = np.asarray(f, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"hamiltonian must be square, got shape {h.shape}")
    if f.shape != h.shape:
        raise ValueError(
            f"coupling operator shape {f.shape} does not match hamiltonian {h.shape}")
    asym = max_abs(h - h.conj().T)
    if asym > 1e-12 * max(1.0, max_abs(h)):
        raise ValueError(f"hamiltonian is not Hermitian (asymmetry {asym:.3e})")
    if asym > 0:
        warnings.warn("hamiltonian symmetrized (tiny asymmetry within tolerance)")
        h = hermitian_part(h)
    d = h.shape[0]

    theta_plus = commutator_map(f)
    theta_minus = commutator_map(f.conj().T)
    theta_zero = (commutator_map(h)
                  + dissipator_map(f, w_minus)
                  + dissipator_map(f, w_plus, mirrored=True))

    calibrated, _ = calibrate_ito(theta_minus, theta_zero, theta_plus, d)
    if ito is not None:
        dev = max(abs(ito.c_mp - calibrated.c_mp), abs(ito.c_pm - calibrated.c_pm))
        if dev > 1e-8:
            warnings.warn(
                f"declared Ito constants ({ito.c_mp:.6g}, {ito.c_pm:.6g}) disagree "
                f"with calibrated ({calibrated.c_mp:.6g}, {calibrated.c_pm:.6g}); "
                "storing the calibrated values")
    return StructureMapSet(dim=d, theta_minus=theta_minus,
                           theta_zero=theta_zero, theta_plus=theta_plus,
                           ito=calibrated)
