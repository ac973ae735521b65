"""
multi-brjuno Configuration
Universal constants, precision policy and per-command tolerances
"""
import math
import os
from typing import Dict, Any, Optional
from dataclasses import dataclass, field, asdict


@dataclass
class ConstantsConfig:
    """
    The unquantified universal constants of the radius and height estimates.

    Values are configuration, never claimed ground truth.
    """

    # C in t(alpha) = (1/2pi) log(1/alpha) + C
    c_univ: float = 0.0

    # C' of the height bound; None derives 4 * (c_univ + 1)
    c_prime: Optional[float] = None

    # Prefactor of the Siegel-disk radius bound
    c_radius: float = 1.0

    def __post_init__(self):
        """Validate constants and derive c_prime"""
        if self.c_prime is None:
            self.c_prime = 4.0 * (self.c_univ + 1.0)
        for name in ("c_univ", "c_prime", "c_radius"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.c_univ < 0 or self.c_prime < 0:
            raise ValueError(
                f"c_univ and c_prime must be nonnegative, got {self.c_univ}, {self.c_prime}"
            )
        if self.c_radius <= 0:
            raise ValueError(f"c_radius must be positive, got {self.c_radius}")

    @classmethod
    def from_env(cls) -> "ConstantsConfig":
        """
        Create constants from environment variables

        Environment Variables:
            MULTIBRJUNO_C_UNIV: universal constant of t(alpha) (default: 0)
            MULTIBRJUNO_C_PRIME: additive constant of the height bound (default: 4(C_UNIV+1))
            MULTIBRJUNO_C_RADIUS: radius prefactor (default: 1)
        """
        c_prime = os.getenv("MULTIBRJUNO_C_PRIME")
        return cls(
            c_univ=float(os.getenv("MULTIBRJUNO_C_UNIV", "0")),
            c_prime=float(c_prime) if c_prime else None,
            c_radius=float(os.getenv("MULTIBRJUNO_C_RADIUS", "1")),
        )


@dataclass
class RunConfig:
    """Configuration for precision, tolerances and output"""

    # Interval precision policy (doubling up to the cap)
    precision_bits: int = 128
    max_precision_bits: int = 4096

    constants: ConstantsConfig = field(default_factory=ConstantsConfig)

    # Report format: "json" or "csv"
    output: str = "json"

    threads: int = 1

    # Linearization / commutation tolerance
    tolerance: float = 1e-8

    # Power-series engine
    series_order: int = 64
    max_series_order: int = 1024
    series_precision_bits: int = 53
    radius_window: float = 0.5
    small_divisor_floor: float = 1e-12

    def __post_init__(self):
        """Validate configuration"""
        if isinstance(self.constants, dict):
            self.constants = ConstantsConfig(**self.constants)
        if self.precision_bits < 8:
            raise ValueError(f"precision_bits must be at least 8, got {self.precision_bits}")
        if self.precision_bits > self.max_precision_bits:
            raise ValueError(
                f"precision_bits ({self.precision_bits}) exceeds "
                f"max_precision_bits ({self.max_precision_bits})"
            )
        if self.output not in ("json", "csv"):
            raise ValueError(f"output must be 'json' or 'csv', got {self.output!r}")
        if self.threads < 1:
            raise ValueError(f"threads must be at least 1, got {self.threads}")
        if not self.tolerance > 0 or not self.small_divisor_floor > 0:
            raise ValueError("tolerances must be positive")
        if not 2 <= self.series_order <= self.max_series_order:
            raise ValueError(
                f"series_order must be in [2, {self.max_series_order}], got {self.series_order}"
            )
        if self.series_precision_bits < 53:
            raise ValueError(
                f"series_precision_bits must be at least 53, got {self.series_precision_bits}"
            )
        if not 0 < self.radius_window < 1:
            raise ValueError(f"radius_window must be in (0, 1), got {self.radius_window}")

    @classmethod
    def from_env(cls) -> "RunConfig":
        """
        Create configuration from environment variables

        Environment Variables:
            MULTIBRJUNO_PRECISION_BITS: starting interval precision (default: 128)
            MULTIBRJUNO_MAX_PRECISION_BITS: refinement cap (default: 4096)
            MULTIBRJUNO_OUTPUT: json or csv (default: json)
            MULTIBRJUNO_THREADS: worker threads for scans and searches (default: 1)
            MULTIBRJUNO_TOLERANCE: linearization tolerance (default: 1e-8)
            MULTIBRJUNO_SERIES_ORDER: truncation order M (default: 64)
            MULTIBRJUNO_SERIES_PRECISION_BITS: coefficient precision (default: 53)
            MULTIBRJUNO_RADIUS_WINDOW: start of the root-test window as a fraction of M (default: 0.5)
            MULTIBRJUNO_SMALL_DIVISOR_FLOOR: hard floor for |lambda^n - lambda| (default: 1e-12)
            plus the MULTIBRJUNO_C_* variables of ConstantsConfig
        """
        return cls(
            precision_bits=int(os.getenv("MULTIBRJUNO_PRECISION_BITS", "128")),
            max_precision_bits=int(os.getenv("MULTIBRJUNO_MAX_PRECISION_BITS", "4096")),
            constants=ConstantsConfig.from_env(),
            output=os.getenv("MULTIBRJUNO_OUTPUT", "json").lower(),
            threads=int(os.getenv("MULTIBRJUNO_THREADS", "1")),
            tolerance=float(os.getenv("MULTIBRJUNO_TOLERANCE", "1e-8")),
            series_order=int(os.getenv("MULTIBRJUNO_SERIES_ORDER", "64")),
            series_precision_bits=int(os.getenv("MULTIBRJUNO_SERIES_PRECISION_BITS", "53")),
            radius_window=float(os.getenv("MULTIBRJUNO_RADIUS_WINDOW", "0.5")),
            small_divisor_floor=float(os.getenv("MULTIBRJUNO_SMALL_DIVISOR_FLOOR", "1e-12")),
        )

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> "RunConfig":
        """Create configuration from dictionary"""
        # Filter out keys that aren't in the dataclass
        valid_keys = {f.name for f in cls.__dataclass_fields__.values()}
        filtered = {k: v for k, v in config_dict.items() if k in valid_keys}
        return cls(**filtered)

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary"""
        return asdict(self)


def get_run_config() -> RunConfig:
    """
    Get run configuration from environment variables

    Returns:
        RunConfig built from MULTIBRJUNO_* variables
    """
    return RunConfig.from_env()


# Default configuration instance
DEFAULT_CONFIG = RunConfig()
