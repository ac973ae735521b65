"""
Tests for RunConfig / ConstantsConfig and the exception hierarchy.

Defaults, validation, environment overrides and the derived C' constant.
"""
import pytest

from multibrjuno.config import ConstantsConfig, RunConfig, get_run_config
from multibrjuno.exceptions import (
    CommutationViolated,
    ConfigurationError,
    DegenerateLinearTerm,
    DomainError,
    ExactTie,
    InvalidInputError,
    MultiBrjunoError,
    PrecisionError,
    PrecisionExhausted,
    SelectorFailed,
    SmallDivisorUnderflow,
    UndecidableAtPrecision,
)
from multibrjuno.toolkit import BrjunoToolkit


ENV_KEYS = (
    "MULTIBRJUNO_PRECISION_BITS",
    "MULTIBRJUNO_MAX_PRECISION_BITS",
    "MULTIBRJUNO_OUTPUT",
    "MULTIBRJUNO_THREADS",
    "MULTIBRJUNO_TOLERANCE",
    "MULTIBRJUNO_SERIES_ORDER",
    "MULTIBRJUNO_SERIES_PRECISION_BITS",
    "MULTIBRJUNO_RADIUS_WINDOW",
    "MULTIBRJUNO_SMALL_DIVISOR_FLOOR",
    "MULTIBRJUNO_C_UNIV",
    "MULTIBRJUNO_C_PRIME",
    "MULTIBRJUNO_C_RADIUS",
)


@pytest.fixture
def clean_env(monkeypatch):
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)
    return monkeypatch


# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------

class TestConstantsConfig:
    def test_defaults(self):
        consts = ConstantsConfig()
        assert consts.c_univ == 0.0
        assert consts.c_radius == 1.0

    def test_c_prime_derived_from_c_univ(self):
        assert ConstantsConfig().c_prime == 4.0
        assert ConstantsConfig(c_univ=0.5).c_prime == 6.0

    def test_explicit_c_prime_kept(self):
        assert ConstantsConfig(c_univ=0.5, c_prime=0.0).c_prime == 0.0

    @pytest.mark.parametrize("kwargs", [
        {"c_univ": -1.0},
        {"c_prime": -0.1},
        {"c_radius": 0.0},
        {"c_univ": float("inf")},
        {"c_radius": float("nan")},
    ])
    def test_rejects_invalid_constants(self, kwargs):
        with pytest.raises(ValueError):
            ConstantsConfig(**kwargs)

    def test_from_env(self, clean_env):
        clean_env.setenv("MULTIBRJUNO_C_UNIV", "0.25")
        clean_env.setenv("MULTIBRJUNO_C_RADIUS", "2")
        consts = ConstantsConfig.from_env()
        assert consts.c_univ == 0.25
        assert consts.c_prime == 5.0
        assert consts.c_radius == 2.0

    def test_from_env_c_prime_override(self, clean_env):
        clean_env.setenv("MULTIBRJUNO_C_PRIME", "1.5")
        assert ConstantsConfig.from_env().c_prime == 1.5


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.precision_bits == 128
        assert cfg.max_precision_bits == 4096
        assert cfg.output == "json"
        assert cfg.threads == 1
        assert cfg.tolerance == 1e-8
        assert cfg.series_order == 64

    @pytest.mark.parametrize("kwargs", [
        {"precision_bits": 4},
        {"precision_bits": 512, "max_precision_bits": 256},
        {"output": "xml"},
        {"threads": 0},
        {"tolerance": 0.0},
        {"series_order": 1},
        {"series_order": 2048},
        {"series_precision_bits": 32},
        {"radius_window": 1.0},
    ])
    def test_rejects_invalid_values(self, kwargs):
        with pytest.raises(ValueError):
            RunConfig(**kwargs)

    def test_to_dict_round_trip(self):
        cfg = RunConfig(precision_bits=256, constants=ConstantsConfig(c_univ=1.0))
        d = cfg.to_dict()
        assert d["constants"]["c_prime"] == 8.0
        again = RunConfig(**d)
        assert again == cfg

    def test_from_dict_ignores_unknown_keys(self):
        cfg = RunConfig.from_dict({"threads": 3, "colour": "blue"})
        assert cfg.threads == 3

    def test_from_env(self, clean_env):
        clean_env.setenv("MULTIBRJUNO_PRECISION_BITS", "256")
        clean_env.setenv("MULTIBRJUNO_OUTPUT", "CSV")
        clean_env.setenv("MULTIBRJUNO_THREADS", "4")
        cfg = get_run_config()
        assert cfg.precision_bits == 256
        assert cfg.output == "csv"
        assert cfg.threads == 4

    def test_from_env_defaults_when_absent(self, clean_env):
        assert RunConfig.from_env() == RunConfig()

    def test_toolkit_wraps_invalid_config(self):
        with pytest.raises(ConfigurationError):
            BrjunoToolkit(threads=0)

    def test_toolkit_accepts_kwargs(self):
        toolkit = BrjunoToolkit(precision_bits=256, max_precision_bits=1024)
        assert toolkit.config.precision_bits == 256
        assert toolkit.max_bits == 1024


# ---------------------------------------------------------------------------
# Exception hierarchy
# ---------------------------------------------------------------------------

class TestExceptions:
    @pytest.mark.parametrize("cls", [
        ConfigurationError, InvalidInputError, PrecisionError, DomainError,
    ])
    def test_families_derive_from_base(self, cls):
        assert issubclass(cls, MultiBrjunoError)

    @pytest.mark.parametrize("cls", [PrecisionExhausted, UndecidableAtPrecision])
    def test_precision_family(self, cls):
        assert issubclass(cls, PrecisionError)

    @pytest.mark.parametrize("cls", [
        ExactTie, SelectorFailed, CommutationViolated, DegenerateLinearTerm, SmallDivisorUnderflow,
    ])
    def test_domain_family(self, cls):
        assert issubclass(cls, DomainError)

    def test_depth_attribute(self):
        err = ExactTie("tie", depth=3)
        assert err.depth == 3
        assert str(err) == "tie"
        assert InvalidInputError("x").depth is None
