"""Independent phase-space route to r_N(t) for degenerate modes.

For equal mode frequencies the effective mode-mode coupling is generated by
the quadratic form (1/2) x^T H x with H = G (+) G and G_ij = 2 g_i g_j /
(omega0 - omega), a dyadic whose single non-null eigenvalue is 2 Lambda_N.
The associated classical propagator is the symplectic matrix S = exp(J H t);
averaging the generated metaplectic operator over an isotropic thermal state
with covariance (nbar + 1/2) I gives

    r_N(t) = exp(i Lambda_N t)
             / sqrt(det(S + I) * det(I/2 + i (nbar + 1/2) C)),

with the Cayley parameter C = J (I - S)(I + S)^(-1).  This must reproduce
the degenerate closed form, which is what makes it a useful cross-check.

S is built exactly from the rank-1 structure: a Householder reflection O
maps the coupling vector to the first axis, where exp(J H_O t) is a plain
cos/sin rotation block acting on the single active plane.

C does not exist at the instants where det(I + S) = 0, i.e. where
cos(Lambda_N t) = 0.  Inside a window |cos(Lambda_N t)| < COS_WINDOW the
evaluation falls back to the degenerate closed form (the two expressions
are identical there); outside the window the determinants are computed
numerically from the assembled matrices.  The window is sized so that the
conditioning of (I + S) and of det(S + I) keeps the numerical route within
1e-10 relative of the closed form everywhere outside it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model
from .coherence import METHOD_SYMPLECTIC, CoherenceSeries, _check_grid, r_degenerate
from .errors import MethodMismatchError, NumericalError

#: half-width of the closed-form fallback window in |cos(Lambda_N t)|
COS_WINDOW = 1e-3


@dataclass(frozen=True)
class QuadraticForm:
    """Generator data: H = G (+) G with dyadic G of non-null eigenvalue 2*Lambda_N."""

    h: np.ndarray
    couplings: np.ndarray
    lambda_n: float


@dataclass(frozen=True)
class SymplecticPropagator:
    """S = exp(J H t) together with the symplectic form J it preserves."""

    s: np.ndarray
    j: np.ndarray


@dataclass(frozen=True)
class CayleyParam:
    """C = J (I - S)(I + S)^(-1); defined only when det(I + S) != 0."""

    c: np.ndarray


def symplectic_form(n_modes: int) -> np.ndarray:
    """The standard 2N x 2N form J = [[0, I], [-I, 0]]."""
    j = np.zeros((2 * n_modes, 2 * n_modes))
    j[:n_modes, n_modes:] = np.eye(n_modes)
    j[n_modes:, :n_modes] = -np.eye(n_modes)
    return j


def build_quadratic_form(spec: model.ModelSpec) -> QuadraticForm:
    """Assemble H = G (+) G for a degenerate spec."""
    model.validate(spec)
    if not model.is_degenerate(spec):
        raise MethodMismatchError("symplectic route requires degenerate mode frequencies")
    g = spec.couplings
    delta = spec.qubit.omega0 - spec.modes[0].omega
    gmat = 2.0 * np.outer(g, g) / delta
    n = spec.n_modes
    h = np.zeros((2 * n, 2 * n))
    h[:n, :n] = gmat
    h[n:, n:] = gmat
    return QuadraticForm(h=h, couplings=g, lambda_n=model.dispersive_shift(spec))


def _householder(g: np.ndarray) -> np.ndarray:
    """Orthogonal O with O g = |g| e_1 (exact dyadic diagonalization)."""
    n = g.size
    norm = float(np.linalg.norm(g))
    v = g - norm * np.eye(n)[0]
    vnorm2 = float(v @ v)
    if vnorm2 == 0.0:
        return np.eye(n)
    return np.eye(n) - 2.0 * np.outer(v, v) / vnorm2


def _propagators(qf: QuadraticForm, times: np.ndarray) -> np.ndarray:
    """Stack of S(t) = exp(J H t), assembled from the cos/sin block form."""
    n = qf.couplings.size
    o = _householder(qf.couplings)
    phase = 2.0 * qf.lambda_n * times  # the active eigenvalue of G is 2*Lambda_N
    n_t = times.size

    cos_block = np.tile(np.eye(n), (n_t, 1, 1))
    sin_block = np.zeros((n_t, n, n))
    cos_block[:, 0, 0] = np.cos(phase)
    sin_block[:, 0, 0] = np.sin(phase)

    s_o = np.zeros((n_t, 2 * n, 2 * n))
    s_o[:, :n, :n] = cos_block
    s_o[:, :n, n:] = sin_block
    s_o[:, n:, :n] = -sin_block
    s_o[:, n:, n:] = cos_block

    oo = np.zeros((2 * n, 2 * n))
    oo[:n, :n] = o
    oo[n:, n:] = o
    return oo.T @ s_o @ oo


def propagator(qf: QuadraticForm, t: float) -> SymplecticPropagator:
    """S(t) at a single time; satisfies S^T J S = J."""
    if t < 0:
        raise MethodMismatchError("propagator defined for t >= 0")
    s = _propagators(qf, np.array([float(t)]))[0]
    return SymplecticPropagator(s=s, j=symplectic_form(qf.couplings.size))


def cayley(prop: SymplecticPropagator) -> CayleyParam:
    """Cayley parameter of a symplectic propagator."""
    dim = prop.s.shape[0]
    eye = np.eye(dim)
    if abs(np.linalg.det(eye + prop.s)) < 1e-12:
        raise NumericalError("Cayley parameter undefined: det(I + S) = 0")
    x = np.linalg.solve((eye + prop.s).T, (eye - prop.s).T).T
    return CayleyParam(c=prop.j @ x)


def r_symplectic(spec: model.ModelSpec, times: np.ndarray, nbar: float | None = None) -> CoherenceSeries:
    """r_N(t) via the metaplectic average, with closed-form fallback windows."""
    model.validate(spec)
    times = _check_grid(times)
    qf = build_quadratic_form(spec)
    if nbar is None:
        nbar = model.thermal_occupation(spec, 0)
    lam = qf.lambda_n
    n = spec.n_modes
    dim = 2 * n
    eye = np.eye(dim)
    jmat = symplectic_form(n)

    phase = lam * times
    in_window = np.abs(np.cos(phase)) < COS_WINDOW

    # D(t) = det(S + I) det(I/2 + i (nbar + 1/2) C); analytically it equals
    # (cos(L t) + i (2 nbar + 1) sin(L t))^2, which is what the fallback uses.
    dets = np.empty(times.size, dtype=complex)
    closed = (np.cos(phase) + 1j * (2.0 * nbar + 1.0) * np.sin(phase)) ** 2
    dets[in_window] = closed[in_window]

    outside = ~in_window
    if np.any(outside):
        s_out = _propagators(qf, times[outside])
        d1 = np.linalg.det(s_out + eye)
        x = np.linalg.solve((eye + s_out).transpose(0, 2, 1), (eye - s_out).transpose(0, 2, 1))
        c = jmat @ x.transpose(0, 2, 1)
        d2 = np.linalg.det(0.5 * eye + 1j * (nbar + 0.5) * c)
        dets[outside] = d1 * d2

    raw = np.angle(dets)
    steps = np.diff(raw)
    wrapped = (steps + np.pi) % (2.0 * np.pi) - np.pi
    phi = np.concatenate(([raw[0]], raw[0] + np.cumsum(wrapped)))
    values = np.exp(1j * phase) * np.abs(dets) ** (-0.5) * np.exp(-0.5j * phi)
    values[0] = 1.0
    return CoherenceSeries(times=times, values=values, method=METHOD_SYMPLECTIC, spec=spec)
