"""Job configuration shared by the command line and the experiment scripts."""

from __future__ import annotations

from dataclasses import dataclass

MIN_PRECISION = 64
MIN_TRUNC = 8


@dataclass(frozen=True)
class JobConfig:
    mode: str = "exact"  # exact | float
    precision: int = 256
    trunc: int = 12
    depth: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError(f"mode must be 'exact' or 'float', got {self.mode!r}")
        if self.precision < MIN_PRECISION:
            raise ValueError(f"precision must be >= {MIN_PRECISION} bits")
        if self.trunc < MIN_TRUNC:
            raise ValueError(f"trunc must be >= {MIN_TRUNC}")
        if self.depth > self.trunc:
            raise ValueError(f"depth {self.depth} exceeds trunc {self.trunc}")

    @property
    def prec(self):
        """Precision handed to the numeric modules (None means exact)."""
        return None if self.mode == "exact" else self.precision


@dataclass(frozen=True)
class VerifyConfig:
    max_order: int = 9

    def __post_init__(self):
        if not 1 <= self.max_order <= 12:
            raise ValueError("max_order must lie in 1..12")
