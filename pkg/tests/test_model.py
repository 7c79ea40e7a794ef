"""Model validation, thermal occupations, dispersive diagnostics, config I/O."""

import math
import pickle

import numpy as np
import pytest

from jcdephase import model
from jcdephase.errors import ConfigError, RegimeError, ValidationError

from conftest import make_spec, random_spec


class TestValidate:
    def test_valid_spec_passes_through(self):
        spec = make_spec([0.8], [0.01], temperature=1.0)
        assert model.validate(spec) is spec

    def test_zero_detuning_rejected(self):
        with pytest.raises(ValidationError, match="detuning"):
            model.validate(make_spec([1.0], [0.01], temperature=1.0))

    def test_empty_environment_rejected(self):
        with pytest.raises(ValidationError, match="at least one mode"):
            model.validate(make_spec([], [], temperature=1.0))

    def test_nonpositive_frequency_rejected(self):
        with pytest.raises(ValidationError):
            model.validate(make_spec([-0.3], [0.01]))
        with pytest.raises(ValidationError):
            model.validate(make_spec([0.8], [0.01], omega0=0.0))

    def test_negative_temperature_rejected(self):
        with pytest.raises(ValidationError):
            model.validate(make_spec([0.8], [0.01], temperature=-0.1))

    def test_negative_coupling_rejected(self):
        with pytest.raises(ValidationError):
            model.validate(make_spec([0.8], [-0.01]))


class TestThermalOccupation:
    def test_zero_temperature_is_exactly_zero(self):
        spec = make_spec([0.8, 0.3], [0.01, 0.01], temperature=0.0)
        assert model.thermal_occupation(spec, 0) == 0.0
        assert model.thermal_occupation(spec, 1) == 0.0

    def test_reference_values(self):
        # 1/(e^0.8 - 1) and 1/(e^1.6 - 1), frozen from a 40-digit evaluation
        spec = make_spec([0.8], [0.01], temperature=1.0)
        assert model.thermal_occupation(spec, 0) == pytest.approx(0.815966220916, abs=1e-10)
        spec = make_spec([0.8], [0.01], temperature=0.5)
        assert model.thermal_occupation(spec, 0) == pytest.approx(0.252970351022, abs=1e-10)

    def test_monotone_in_temperature_and_frequency(self, rng):
        temps = np.linspace(0.1, 4.0, 25)
        occs = [model.thermal_occupation(make_spec([0.8], [0.01], t), 0) for t in temps]
        assert np.all(np.diff(occs) > 0)
        freqs = np.linspace(0.3, 0.95, 25)
        occs = [model.thermal_occupation(make_spec([w], [0.01], 1.0), 0) for w in freqs]
        assert np.all(np.diff(occs) < 0)


class TestDiagnostics:
    def test_single_mode_shift(self):
        diag = model.diagnostics(make_spec([0.8], [0.01]))
        assert diag.lambda_n == pytest.approx(5.0e-4, rel=1e-12)
        assert not diag.warning

    def test_two_identical_modes_double_the_shift(self):
        diag = model.diagnostics(make_spec([0.8, 0.8], [0.01, 0.01]))
        assert diag.lambda_n == pytest.approx(1.0e-3, rel=1e-12)

    def test_warning_at_envelope_edge(self):
        # ratio 0.01 / (1 - 0.9) lands just beyond 0.1 and must warn
        diag = model.diagnostics(make_spec([0.8, 0.9], [0.01, 0.01]))
        assert diag.max_ratio == pytest.approx(0.1, rel=1e-12)
        assert diag.warning

    def test_hard_error_when_regime_violated(self):
        with pytest.raises(RegimeError):
            model.diagnostics(make_spec([0.8], [0.12]))

    def test_ratio_table_shape_and_max(self, rng):
        for _ in range(20):
            spec = random_spec(rng)
            diag = model.diagnostics(spec)
            n = spec.n_modes
            assert diag.ratios.shape == (n, n)
            expected = np.abs(spec.couplings[:, None] / spec.detunings[None, :])
            assert np.array_equal(diag.ratios, expected)
            assert diag.max_ratio == diag.ratios.max()

    def test_shift_additive_over_concatenation(self, rng):
        for _ in range(50):
            a = random_spec(rng)
            b = random_spec(rng)
            joined = make_spec(
                list(a.omegas) + list(b.omegas),
                list(a.couplings) + list(b.couplings),
                temperature=1.0,
            )
            assert model.dispersive_shift(joined) == pytest.approx(
                model.dispersive_shift(a) + model.dispersive_shift(b), rel=1e-12
            )

    def test_pure_function_bit_for_bit(self):
        spec = make_spec([0.8, 0.7, 0.6], [0.01, 0.004, 0.007], temperature=1.3)
        first = model.diagnostics(spec)
        second = model.diagnostics(spec)
        assert pickle.dumps(first) == pickle.dumps(second)


class TestConfig:
    def _write(self, tmp_path, text):
        path = tmp_path / "model.toml"
        path.write_text(text)
        return str(path)

    GOOD = """
[qubit]
omega0 = 1.0

[[modes]]
omega = 0.8
g = 0.01

[[modes]]
omega = 0.7
g = 0.02

[environment]
temperature = 0.5
"""

    def test_roundtrip(self, tmp_path):
        spec = model.load_model_toml(self._write(tmp_path, self.GOOD))
        assert spec.qubit.omega0 == 1.0
        assert spec.n_modes == 2
        assert spec.modes[1] == model.ModeSpec(omega=0.7, g=0.02)
        assert spec.temperature == 0.5

    def test_omega0_defaults_to_one(self, tmp_path):
        text = self.GOOD.replace("[qubit]\nomega0 = 1.0\n", "")
        spec = model.load_model_toml(self._write(tmp_path, text))
        assert spec.qubit.omega0 == 1.0

    def test_unknown_key_is_hard_error(self, tmp_path):
        text = self.GOOD.replace("temperature = 0.5", "temperature = 0.5\ntemperatur = 2.0")
        with pytest.raises(ConfigError, match="unknown key"):
            model.load_model_toml(self._write(tmp_path, text))
        text = self.GOOD.replace("g = 0.02", "g = 0.02\ncoupling = 3")
        with pytest.raises(ConfigError, match="unknown key"):
            model.load_model_toml(self._write(tmp_path, text))

    def test_missing_environment_rejected(self, tmp_path):
        text = self.GOOD.split("[environment]")[0]
        with pytest.raises(ConfigError, match="environment"):
            model.load_model_toml(self._write(tmp_path, text))

    def test_invalid_physics_rejected(self, tmp_path):
        text = self.GOOD.replace("omega = 0.8", "omega = 1.0")
        with pytest.raises(ValidationError, match="detuning"):
            model.load_model_toml(self._write(tmp_path, text))


class TestWithParameter:
    def test_paths(self):
        spec = make_spec([0.8, 0.7], [0.01, 0.02], temperature=1.0)
        assert model.with_parameter(spec, "modes[1].g", 0.005).modes[1].g == 0.005
        assert model.with_parameter(spec, "modes[0].omega", 0.85).modes[0].omega == 0.85
        assert model.with_parameter(spec, "temperature", 2.0).temperature == 2.0
        assert model.with_parameter(spec, "qubit.omega0", 1.1).qubit.omega0 == 1.1

    def test_bad_paths(self):
        spec = make_spec([0.8], [0.01])
        for path in ("modes[5].g", "modes[x].g", "modes[0].mass", "qubit.g", "nope"):
            with pytest.raises(ConfigError):
                model.with_parameter(spec, path, 1.0)

    def test_original_untouched(self):
        spec = make_spec([0.8], [0.01])
        model.with_parameter(spec, "modes[0].g", 0.002)
        assert spec.modes[0].g == 0.01
