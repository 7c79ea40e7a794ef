"""Qubit coherence factor r_N(t) for the dispersive multimode model.

Within the second-order effective description the qubit populations are
frozen and the off-diagonal element evolves as

    rho01(t) = rho01(0) * exp(-i*Lambda_N*t) * r_N(t),

where r_N(t) = Tr_E[rho_E exp(-i M(t))] and M(t) is the effective
qubit-state-conditioned mode-mode coupling operator.  This module computes
r_N(t) three ways:

* ``r_general``    -- thermal-determinant route, any N, any frequencies;
* ``r_degenerate`` -- closed form when all mode frequencies coincide;
* ``r_pair``       -- explicit N = 2 closed form.

Phase convention: the element tracked is the one between the sigma_z = +1
and sigma_z = -1 qubit states (in that order), which makes the accumulated
phase exp(-i*Lambda_N*t).  Only |r_N| is convention-free and it is the
primary observable.

Numerical notes
---------------
The coupling-matrix entries are evaluated in the 0/0-free form

    m_jk(t) = g_j g_k (D_j + D_k)/(D_j D_k) * t * exp(i th t/2) * sinc(th t/2),

th = omega_j - omega_k, algebraically identical to the textbook expression
i g_j g_k (D_j+D_k)/(D_j D_k) * (1 - exp(i th t))/th.

The determinant route divides by prod_j nbar_j, which blows up as T -> 0.
We instead build the row-rescaled matrix Atil (each 2x2 row-block of the
Gaussian matrix A multiplied by nbar_j), for which

    det Atil = (prod_j nbar_j^2) det A   and   r_N = det(Atil)^(-1/2),

with every entry bounded as nbar -> 0.  The complex square root is taken
on the half-angle of the *unwrapped* phase of det Atil along the time
grid, anchored at det Atil(0) = 1, so r_N is continuous with r_N(0) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import model
from .errors import BranchTrackingError, MethodMismatchError, ValidationError

#: method tags carried by CoherenceSeries
METHOD_GENERAL = "general"
METHOD_DEGENERATE = "degenerate"
METHOD_PAIR = "pair-closed-form"
METHOD_SYMPLECTIC = "symplectic"
METHOD_ORACLE = "exact-oracle"

#: largest tolerated wrapped phase step of det Atil between adjacent samples
PHASE_STEP_LIMIT = 0.9 * np.pi


@dataclass(frozen=True)
class CouplingMatrix:
    """The N x N Hermitian matrix m_jk(t) at a single time."""

    t: float
    entries: np.ndarray


@dataclass(frozen=True)
class ModeEigenSystem:
    """Eigendecomposition of a CouplingMatrix: V^dag M V = Diag[eps].

    Eigenvalues are sorted descending; each eigenvector's phase is fixed so
    its largest-magnitude entry is real positive.  Physics is invariant
    under this gauge; the convention only pins outputs bit-for-bit.
    """

    epsilons: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class GaussianDetMatrix:
    """The 2N x 2N Gaussian matrix A(t) and its row-rescaled variant Atil(t).

    ``a`` is None when some nbar_j = 0 (the unrescaled matrix diverges);
    ``a_rescaled`` is always defined.
    """

    a: np.ndarray | None
    a_rescaled: np.ndarray


@dataclass(frozen=True)
class CoherenceSeries:
    """Complex r_N samples on a uniform time grid starting at 0."""

    times: np.ndarray
    values: np.ndarray
    method: str
    spec: model.ModelSpec | None = field(default=None, repr=False)

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values)


def time_grid(t_end: float, samples: int) -> np.ndarray:
    """Uniform grid of ``samples`` points over [0, t_end]."""
    if samples < 2:
        raise ValidationError(f"grid needs at least 2 samples, got {samples}")
    if t_end <= 0:
        raise ValidationError(f"t_end must be positive, got {t_end}")
    return np.linspace(0.0, float(t_end), int(samples))


def _check_grid(times: np.ndarray) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValidationError("time grid must be a 1-D array with at least 2 samples")
    if times[0] != 0.0:
        raise ValidationError("time grid must start at t = 0")
    steps = np.diff(times)
    if np.any(steps <= 0):
        raise ValidationError("time grid must be strictly increasing")
    if np.max(steps) - np.min(steps) > 1e-9 * np.max(steps):
        raise ValidationError("time grid must be uniform")
    return times


def _resolve_nbar(spec: model.ModelSpec, nbar) -> np.ndarray:
    """Per-mode occupations: derived from spec.temperature unless overridden."""
    if nbar is None:
        return model.thermal_occupations(spec)
    nbar = np.asarray(nbar, dtype=float)
    if nbar.shape != (spec.n_modes,):
        raise ValidationError(f"nbar must have shape ({spec.n_modes},), got {nbar.shape}")
    if np.any(nbar < 0):
        raise ValidationError("occupations must be nonnegative")
    return nbar


# ---------------------------------------------------------------------------
# Coupling matrix M(t) and its eigensystem
# ---------------------------------------------------------------------------

def m_entry(spec: model.ModelSpec, j: int, k: int, t: float) -> complex:
    """Single entry m_jk(t) of the induced mode-mode coupling matrix."""
    model.validate(spec)
    g = spec.couplings
    delta = spec.detunings
    theta = spec.modes[j].omega - spec.modes[k].omega
    pref = g[j] * g[k] * (delta[j] + delta[k]) / (delta[j] * delta[k])
    x = 0.5 * theta * t
    return complex(pref * t * np.exp(1j * x) * np.sinc(x / np.pi))


def coupling_matrices(spec: model.ModelSpec, times: np.ndarray) -> np.ndarray:
    """Stack of M(t) for every grid time; shape (T, N, N)."""
    g = spec.couplings
    delta = spec.detunings
    omegas = spec.omegas
    pref = g[:, None] * g[None, :] * (delta[:, None] + delta[None, :]) / (delta[:, None] * delta[None, :])
    theta = omegas[:, None] - omegas[None, :]
    x = 0.5 * theta[None, :, :] * times[:, None, None]
    return pref[None, :, :] * times[:, None, None] * np.exp(1j * x) * np.sinc(x / np.pi)


def build_M(spec: model.ModelSpec, t: float) -> CouplingMatrix:
    """The coupling matrix at one time, with all entries from m_entry."""
    model.validate(spec)
    entries = coupling_matrices(spec, np.array([float(t)]))[0]
    return CouplingMatrix(t=float(t), entries=entries)


def _eigh_descending(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched Hermitian eigendecomposition in the fixed gauge.

    Returns (eps, V) with eps sorted descending per sample and each column
    of V rephased so its largest-magnitude entry is real positive.
    """
    w, v = np.linalg.eigh(mats)
    order = np.argsort(-w, axis=-1, kind="stable")
    eps = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    imax = np.argmax(np.abs(v), axis=-2)
    pivot = np.take_along_axis(v, imax[..., None, :], axis=-2)[..., 0, :]
    mag = np.abs(pivot)
    phase = np.where(mag > 0, pivot / np.where(mag > 0, mag, 1.0), 1.0)
    return eps, v * np.conj(phase)[..., None, :]


def eigensystem(coupling: CouplingMatrix) -> ModeEigenSystem:
    """Diagonalize an Hermitian coupling matrix (descending, gauge-fixed)."""
    mat = coupling.entries
    herm_defect = np.max(np.abs(mat - mat.conj().T))
    if herm_defect > 1e-10 * max(np.max(np.abs(mat)), 1e-300):
        raise ValidationError("coupling matrix is not Hermitian")
    eps, v = _eigh_descending(mat[None, :, :])
    return ModeEigenSystem(epsilons=eps[0], v=v[0])


# ---------------------------------------------------------------------------
# Thermal determinant route
# ---------------------------------------------------------------------------

def _phase_setups(eps: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Z_jk = sum_l exp(-i eps_l) V*_jl V_kl for stacked eigensystems."""
    expo = np.exp(-1j * eps)
    return np.einsum("...jl,...l,...kl->...jk", v.conj(), expo, v)


def _rescaled_matrices(nbar: np.ndarray, eps: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Assemble the row-rescaled Gaussian matrices Atil; shape (T, 2N, 2N).

    Diagonal blocks: (1 + nbar_j (1 - Z_jj)) * I2.
    Off-diagonal block (j, k): nbar_j * [[-u, -v], [v, -u]] with
    u = Re-part sum and v = Im-part sum of the eigenphase average, i.e.
    u_jk + i v_jk built from Z_jk = u via (Z + Z^T)/2 and (Z - Z^T)/2i.
    """
    z = _phase_setups(eps, v)
    n_t, n = z.shape[0], z.shape[1]
    u = 0.5 * (z + z.swapaxes(-1, -2))
    w = (z - z.swapaxes(-1, -2)) / 2j
    scaled_u = nbar[None, :, None] * u
    scaled_w = nbar[None, :, None] * w

    a = np.zeros((n_t, 2 * n, 2 * n), dtype=complex)
    a[:, 0::2, 0::2] = -scaled_u
    a[:, 1::2, 1::2] = -scaled_u
    a[:, 0::2, 1::2] = -scaled_w
    a[:, 1::2, 0::2] = scaled_w

    idx = np.arange(n)
    diag = 1.0 + nbar[None, :] * (1.0 - z[:, idx, idx])
    a[:, 2 * idx, 2 * idx] = diag
    a[:, 2 * idx + 1, 2 * idx + 1] = diag
    a[:, 2 * idx, 2 * idx + 1] = 0.0
    a[:, 2 * idx + 1, 2 * idx] = 0.0
    return a


def gaussian_matrix(eig: ModeEigenSystem, nbar: np.ndarray) -> GaussianDetMatrix:
    """The Gaussian matrix pair (A, Atil) for one eigensystem.

    The unrescaled A exists only when every nbar_j > 0.
    """
    nbar = np.asarray(nbar, dtype=float)
    a_rescaled = _rescaled_matrices(nbar, eig.epsilons[None, :], eig.v[None, :, :])[0]
    a = None
    if np.all(nbar > 0):
        scale = np.repeat(1.0 / nbar, 2)
        a = scale[:, None] * a_rescaled
    return GaussianDetMatrix(a=a, a_rescaled=a_rescaled)


def _half_angle_root(dets: np.ndarray) -> np.ndarray:
    """r = det^(-1/2) with the branch tracked continuously along the grid."""
    raw = np.angle(dets)
    steps = np.diff(raw)
    wrapped = (steps + np.pi) % (2.0 * np.pi) - np.pi
    worst = float(np.max(np.abs(wrapped))) if wrapped.size else 0.0
    if worst >= PHASE_STEP_LIMIT:
        raise BranchTrackingError(
            f"det phase jumps by {worst:.3f} rad between adjacent samples "
            f"(limit {PHASE_STEP_LIMIT:.3f}); refine the time grid"
        )
    phi = np.concatenate(([raw[0]], raw[0] + np.cumsum(wrapped)))
    return np.abs(dets) ** (-0.5) * np.exp(-0.5j * phi)


def _determinant_series(nbar: np.ndarray, eps: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.linalg.det(_rescaled_matrices(nbar, eps, v))


def r_general(spec: model.ModelSpec, times: np.ndarray, nbar=None) -> CoherenceSeries:
    """r_N(t) on a uniform grid via the thermal-determinant route."""
    model.validate(spec)
    times = _check_grid(times)
    nbar = _resolve_nbar(spec, nbar)
    if np.all(nbar == 0.0):
        # vacuum environment: no correlations build up, r stays exactly 1
        values = np.ones(times.size, dtype=complex)
        return CoherenceSeries(times=times, values=values, method=METHOD_GENERAL, spec=spec)
    mats = coupling_matrices(spec, times)
    eps, v = _eigh_descending(mats)
    values = _half_angle_root(_determinant_series(nbar, eps, v))
    values[0] = 1.0  # exact t = 0 limit (det Atil(0) = 1 identically)
    return CoherenceSeries(times=times, values=values, method=METHOD_GENERAL, spec=spec)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def r_degenerate(spec: model.ModelSpec, times: np.ndarray, nbar: float | None = None) -> CoherenceSeries:
    """Closed form for equal mode frequencies:

        r_N(t) = exp(i L t) / (cos(L t) + i (2 nbar + 1) sin(L t)),

    L = Lambda_N.  Periodic with period pi / Lambda_N.
    """
    model.validate(spec)
    times = _check_grid(times)
    if not model.is_degenerate(spec):
        raise MethodMismatchError("degenerate closed form called on a nondegenerate spec")
    if nbar is None:
        nbar = model.thermal_occupation(spec, 0)
    lam = model.dispersive_shift(spec)
    phase = lam * times
    values = np.exp(1j * phase) / (np.cos(phase) + 1j * (2.0 * nbar + 1.0) * np.sin(phase))
    values[0] = 1.0
    return CoherenceSeries(times=times, values=values, method=METHOD_DEGENERATE, spec=spec)


def r_pair(spec: model.ModelSpec, times: np.ndarray, nbar=None) -> CoherenceSeries:
    """Explicit N = 2 closed form.

    Uses eps_plus = Lambda_2 t, eps_minus = t*hypot((m11-m22)/2t, |m12|/t)
    and the eigenvector weights |V11|^2, |V12|^2 written in terms of
    (eps_1 - m11) and |m12|.  Must agree with r_general to 1e-9 relative.
    """
    model.validate(spec)
    times = _check_grid(times)
    if spec.n_modes != 2:
        raise MethodMismatchError(f"pair closed form requires N = 2, got N = {spec.n_modes}")
    nbar = _resolve_nbar(spec, nbar)
    n1, n2 = nbar
    g1, g2 = spec.couplings
    d1, d2 = spec.detunings
    theta = spec.modes[0].omega - spec.modes[1].omega

    lam2 = g1 * g1 / d1 + g2 * g2 / d2
    # per-unit-time quantities: a = (m11 - m22)/(2t), b = |m12|/t
    a = g1 * g1 / d1 - g2 * g2 / d2
    b = np.abs(g1 * g2 * (d1 + d2) / (d1 * d2) * np.sinc(0.5 * theta * times / np.pi))
    h = np.hypot(a, b)
    # d = h - a without cancellation for a > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        d_stable = np.where(a > 0, b * b / (h + a), h - a)
    d_stable = np.where(h == 0.0, 0.0, d_stable)
    denom = b * b + d_stable * d_stable
    with np.errstate(invalid="ignore", divide="ignore"):
        v11sq = np.where(denom > 0, b * b / np.where(denom > 0, denom, 1.0), 1.0)
        v12sq = np.where(denom > 0, d_stable * d_stable / np.where(denom > 0, denom, 1.0), 0.0)

    eps_p = lam2 * times
    eps_m = h * times
    inverse = (
        n1 * n2 * np.exp(-1j * eps_p)
        + (n1 + 1.0) * (n2 + 1.0) * np.exp(1j * eps_p)
        - (n1 * n2 + n1 * v11sq + n2 * v12sq) * np.exp(-1j * eps_m)
        - (n1 * n2 + n1 * v12sq + n2 * v11sq) * np.exp(1j * eps_m)
    )
    values = np.exp(1j * eps_p) / inverse
    values[0] = 1.0
    return CoherenceSeries(times=times, values=values, method=METHOD_PAIR, spec=spec)


def coherence_offdiagonal(rho01_initial: complex, spec: model.ModelSpec, times: np.ndarray,
                          nbar=None) -> np.ndarray:
    """Full off-diagonal element rho01(t) = rho01(0) exp(-i Lambda_N t) r_N(t)."""
    if abs(rho01_initial) > 0.5 + 1e-12:
        raise ValidationError(
            f"|rho01(0)| = {abs(rho01_initial):.3g} exceeds the physical bound 1/2"
        )
    if rho01_initial == 0:
        _check_grid(times)
        return np.zeros(np.asarray(times).size, dtype=complex)
    series = r_general(spec, times, nbar=nbar)
    lam = model.dispersive_shift(spec)
    return rho01_initial * np.exp(-1j * lam * series.times) * series.values
