"""Ground-truth propagation of the full rotating-wave Hamiltonian.

The full model

    H = (omega0/2) sigma_z + sum_j omega_j a_j^dag a_j
        + sum_j g_j (sigma_+ a_j + sigma_- a_j^dag)

conserves the total excitation number sigma_+ sigma_- + sum_j a_j^dag a_j,
so it is block diagonal over excitation sectors, each of finite dimension.
Every sector block is diagonalized once and the evolution is sampled
spectrally as exp(-i E_k t) -- no time stepping, hence no accumulation
error over the long grids (omega0 t up to several thousand) used here.

The initial qubit state is the +1 eigenstate of sigma_x, (|u> + |d>)/sqrt(2)
with sigma_z |u> = +|u>, sigma_z |d> = -|d>; the reported coherence is
<u| rho_S(t) |d>, whose free-qubit evolution is (1/2) exp(-i omega0 t).
A thermal environment is handled as an explicit Fock-diagonal mixture:
product states are enumerated in decreasing Boltzmann weight until the
requested weight budget is covered, then each member is propagated exactly
and the observables are averaged with renormalized weights.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from . import model
from .coherence import METHOD_ORACLE, CoherenceSeries, _check_grid
from .errors import SectorSizeError, TruncationError, ValidationError


@dataclass(frozen=True)
class TruncationSpec:
    """Controls for the thermal-ensemble truncation.

    ``weight_tol`` is the total thermal weight allowed to be discarded;
    ``per_mode_cutoff_max`` caps single-mode occupations during the
    enumeration; ``sector_dim_cap`` bounds the size of any diagonalized
    excitation block.
    """

    weight_tol: float = 1e-3
    per_mode_cutoff_max: int = 40
    sector_dim_cap: int = 20000

    def __post_init__(self):
        if not 0.0 < self.weight_tol < 1.0:
            raise ValidationError(f"weight_tol must lie in (0, 1), got {self.weight_tol}")
        if self.per_mode_cutoff_max < 1:
            raise ValidationError("per_mode_cutoff_max must be at least 1")


@dataclass(frozen=True)
class FockProduct:
    """Joint number state |n_1, ..., n_N> of the environment modes."""

    occupations: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.occupations)


@dataclass(frozen=True)
class SectorBasis:
    """Enumerated basis of one total-excitation block.

    States are ordered: all (down, m) with |m| = E first, then all (up, m)
    with |m| = E - 1, each group in lexicographic order of m.  ``up`` marks
    the sigma_z = +1 qubit level.
    """

    total_excitation: int
    states: tuple[tuple[bool, tuple[int, ...]], ...]
    index: dict = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def n_down(self) -> int:
        return sum(1 for up, _ in self.states if not up)


def _compositions(total: int, n: int):
    """All tuples of n nonnegative integers summing to total, lexicographic."""
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, n - 1):
            yield (first,) + rest


def build_sector_basis(n_modes: int, total_excitation: int,
                       dim_cap: int = TruncationSpec.sector_dim_cap) -> SectorBasis:
    """Basis of the block with total excitation E = qubit + sum of photons."""
    if total_excitation < 0:
        raise ValidationError("total excitation must be nonnegative")
    states = [(False, occ) for occ in _compositions(total_excitation, n_modes)]
    if total_excitation >= 1:
        states += [(True, occ) for occ in _compositions(total_excitation - 1, n_modes)]
    if len(states) > dim_cap:
        raise SectorSizeError(
            f"sector E={total_excitation} has dimension {len(states)} > cap {dim_cap}; "
            "raise the cap or reduce temperature/mode count"
        )
    index = {state: i for i, state in enumerate(states)}
    return SectorBasis(total_excitation=total_excitation, states=tuple(states), index=index)


def sector_hamiltonian(spec: model.ModelSpec, basis: SectorBasis) -> np.ndarray:
    """Dense real-symmetric Hamiltonian block on a sector basis.

    Only in-sector elements are generated; by construction the block has no
    matrix elements connecting different excitation sectors.
    """
    omega0 = spec.qubit.omega0
    omegas = spec.omegas
    g = spec.couplings
    dim = basis.dim
    h = np.zeros((dim, dim))
    for i, (up, occ) in enumerate(basis.states):
        h[i, i] = (0.5 if up else -0.5) * omega0 + float(np.dot(omegas, occ))
        if not up:
            for j in range(spec.n_modes):
                if occ[j] > 0:
                    lowered = occ[:j] + (occ[j] - 1,) + occ[j + 1:]
                    k = basis.index[(True, lowered)]
                    amp = g[j] * np.sqrt(occ[j])
                    h[i, k] += amp
                    h[k, i] += amp
    return h


class _SectorCache:
    """Diagonalized sectors and their sampled phase tables, shared per run."""

    def __init__(self, spec: model.ModelSpec, times: np.ndarray, dim_cap: int):
        self.spec = spec
        self.times = times
        self.dim_cap = dim_cap
        self._data: dict[int, tuple] = {}

    def get(self, total_excitation: int):
        if total_excitation not in self._data:
            basis = build_sector_basis(self.spec.n_modes, total_excitation, self.dim_cap)
            h = sector_hamiltonian(self.spec, basis)
            energies, modes = np.linalg.eigh(h)
            phases = np.exp(-1j * np.outer(energies, self.times))
            self._data[total_excitation] = (basis, energies, modes, phases)
        return self._data[total_excitation]


def propagate_pure(spec: model.ModelSpec, fock: FockProduct, times: np.ndarray,
                   trunc: TruncationSpec | None = None,
                   _cache: _SectorCache | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Exact evolution of (|u> + |d>)/sqrt(2) (x) |fock> under the full model.

    Returns (coherence, sigma_z): the per-sample <u|Tr_E rho(t)|d> and
    <sigma_z>(t) contributions of this pure initial product state.
    """
    model.validate(spec)
    times = np.asarray(times, dtype=float)
    trunc = trunc or TruncationSpec()
    if len(fock.occupations) != spec.n_modes:
        raise ValidationError("Fock product length does not match the mode count")
    if any(n < 0 for n in fock.occupations):
        raise ValidationError("occupations must be nonnegative")
    cache = _cache or _SectorCache(spec, times, trunc.sector_dim_cap)
    occ = tuple(fock.occupations)
    e_low = fock.total

    # branch evolved in the sector without the qubit excitation
    basis0, _, modes0, phases0 = cache.get(e_low)
    i0 = basis0.index[(False, occ)]
    c0 = modes0[i0, :]
    amps_down = modes0[: basis0.n_down, :] @ (phases0 * c0[:, None])
    p_down = np.sum(np.abs(amps_down) ** 2, axis=0)

    # branch evolved in the sector carrying the extra qubit excitation
    basis1, _, modes1, phases1 = cache.get(e_low + 1)
    i1 = basis1.index[(True, occ)]
    c1 = modes1[i1, :]
    amps_up = modes1[basis1.n_down:, :] @ (phases1 * c1[:, None])
    p_up = np.sum(np.abs(amps_up) ** 2, axis=0)

    # up-states of sector E+1 and down-states of sector E share the photon
    # label ordering, so the partial trace pairs rows index-by-index
    coherence = 0.5 * np.sum(amps_up * amps_down.conj(), axis=0)
    sigma_z = p_up - p_down
    return coherence, sigma_z


def _enumerate_raw(spec: model.ModelSpec, trunc: TruncationSpec):
    """Best-first enumeration of thermal Fock products; returns (pairs, kept_mass)."""
    model.validate(spec)
    n = spec.n_modes
    nbar = model.thermal_occupations(spec)
    vacuum = (0,) * n
    if np.all(nbar == 0.0):
        return [(vacuum, 1.0)], 1.0
    ratios = nbar / (nbar + 1.0)
    w0 = float(np.prod(1.0 - ratios))
    target = 1.0 - trunc.weight_tol
    heap = [(-w0, vacuum)]
    seen = {vacuum}
    kept = []
    acc = 0.0
    while heap and acc < target:
        neg_w, occ = heapq.heappop(heap)
        weight = -neg_w
        kept.append((occ, weight))
        acc += weight
        for j in range(n):
            if ratios[j] == 0.0 or occ[j] + 1 > trunc.per_mode_cutoff_max:
                continue
            succ = occ[:j] + (occ[j] + 1,) + occ[j + 1:]
            if succ not in seen:
                seen.add(succ)
                heapq.heappush(heap, (-weight * ratios[j], succ))
    if acc < target:
        raise TruncationError(
            f"thermal weight {acc:.6f} < {target:.6f} within per-mode cutoff "
            f"{trunc.per_mode_cutoff_max}; raise the cutoff or lower the temperature"
        )
    return kept, acc


def enumerate_thermal_ensemble(spec: model.ModelSpec,
                               trunc: TruncationSpec | None = None) -> list[tuple[FockProduct, float]]:
    """Thermal Fock products in decreasing weight, renormalized to sum to 1."""
    trunc = trunc or TruncationSpec()
    kept, acc = _enumerate_raw(spec, trunc)
    return [(FockProduct(occ), w / acc) for occ, w in kept]


@dataclass(frozen=True)
class OracleResult:
    """Exact-propagation output: normalized coherence, <sigma_z>, truncation info."""

    series: CoherenceSeries
    sigma_z: np.ndarray
    discarded_weight: float


def run_oracle(spec: model.ModelSpec, trunc: TruncationSpec | None = None,
               times: np.ndarray | None = None) -> OracleResult:
    """Thermal average of exact propagations over the truncated ensemble.

    The coherence series is normalized by its t = 0 value; ensemble members
    are processed in fixed (decreasing-weight) order, so results are
    deterministic.  Members are independent and could be mapped in parallel
    provided the weighted reduction keeps this ordering.
    """
    model.validate(spec)
    trunc = trunc or TruncationSpec()
    times = _check_grid(times)
    kept, acc = _enumerate_raw(spec, trunc)
    cache = _SectorCache(spec, times, trunc.sector_dim_cap)
    coh_total = np.zeros(times.size, dtype=complex)
    sz_total = np.zeros(times.size)
    for occ, weight in kept:
        coh, sz = propagate_pure(spec, FockProduct(occ), times, trunc, _cache=cache)
        coh_total += (weight / acc) * coh
        sz_total += (weight / acc) * sz
    series = CoherenceSeries(
        times=times,
        values=coh_total / coh_total[0],
        method=METHOD_ORACLE,
        spec=spec,
    )
    return OracleResult(series=series, sigma_z=sz_total, discarded_weight=1.0 - acc)
