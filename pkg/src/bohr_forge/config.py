"""Named constants for the estimates and the iteration.

None of these are fixed by the underlying argument (it only states
asymptotic relations); they are the conventions every report and
certificate records.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from fractions import Fraction

from .bohr import RegularityConfig
from .groups import as_fraction, format_fraction


@dataclass(frozen=True)
class IterationConfig:
    eps: Fraction = Fraction(1, 4)
    c_mass: Fraction = Fraction(1, 16)
    C_cmp: Fraction = Fraction(16)
    c_lw: Fraction = Fraction(1, 8)
    c_split: Fraction = Fraction(1, 64)
    c_chang: Fraction = Fraction(1, 8)
    obstruction_threshold: Fraction = Fraction(1, 64)
    round_cap: int = 64
    regularity: RegularityConfig = field(default_factory=RegularityConfig)

    def __post_init__(self):
        for f in fields(self):
            if f.name in ("round_cap", "regularity"):
                continue
            value = as_fraction(getattr(self, f.name))
            if value <= 0:
                raise ValueError(f"{f.name} must be positive")
            object.__setattr__(self, f.name, value)
        if not self.eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        if self.round_cap < 1:
            raise ValueError("round_cap must be >= 1")

    def to_json(self) -> dict:
        out = {}
        for f in fields(self):
            if f.name == "regularity":
                continue
            v = getattr(self, f.name)
            out[f.name] = v if isinstance(v, int) else format_fraction(v)
        out["c_R"] = format_fraction(self.regularity.c_R)
        out["C_R"] = format_fraction(self.regularity.C_R)
        out["samples"] = self.regularity.samples
        return out

    @classmethod
    def from_json(cls, data: dict) -> IterationConfig:
        reg = RegularityConfig(Fraction(data["c_R"]), Fraction(data["C_R"]), int(data["samples"]))
        kw = {}
        for f in fields(cls):
            if f.name == "regularity":
                continue
            raw = data[f.name]
            kw[f.name] = int(raw) if f.name == "round_cap" else Fraction(raw)
        return cls(regularity=reg, **kw)
