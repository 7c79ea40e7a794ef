import numpy as np
import pytest

from jcdephase import model


def make_spec(omegas, couplings, temperature=1.0, omega0=1.0) -> model.ModelSpec:
    modes = tuple(model.ModeSpec(omega=float(w), g=float(g)) for w, g in zip(omegas, couplings))
    return model.ModelSpec(qubit=model.QubitSpec(omega0=omega0), modes=modes, temperature=temperature)


def random_spec(rng: np.random.Generator, n_max: int = 6, allow_blue: bool = True,
                degenerate: bool = False, t_zero_ok: bool = True) -> model.ModelSpec:
    """A random valid spec inside the dispersive envelope (ratios <= ~0.15)."""
    n = int(rng.integers(1, n_max + 1))
    if degenerate:
        omega = float(rng.uniform(0.5, 0.95))
        omegas = [omega] * n
    else:
        omegas = []
        for _ in range(n):
            if allow_blue and rng.random() < 0.2:
                omegas.append(float(rng.uniform(1.05, 1.4)))  # mode above the qubit
            else:
                omegas.append(float(rng.uniform(0.5, 0.95)))
    detunings = 1.0 - np.asarray(omegas)
    gmax = 0.15 * np.min(np.abs(detunings))
    couplings = rng.uniform(0.1 * gmax, gmax, size=n)
    if t_zero_ok and rng.random() < 0.15:
        temperature = 0.0
    else:
        temperature = float(rng.uniform(0.2, 3.0))
    return model.validate(make_spec(omegas, couplings, temperature))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)
