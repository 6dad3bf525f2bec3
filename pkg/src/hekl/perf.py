"""Operation counts, operational density and roofline classification.

Per-work-item ALU costs are fixed constants per radix. Memory traffic counts
global loads and stores of polynomial coefficients (8 bytes each); twiddle
traffic is left out.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from fractions import Fraction

from .errors import ParameterError
from .ntt import (
    RADIX_BUTTERFLY_OPS,
    RADIX_OTHER_OPS,
    HighRadix,
    KernelProfile,
    NttVariant,
    Staged2,
    make_plan,
    parse_variant,
)

WORD_BYTES = 8


@dataclass(frozen=True)
class RadixCost:
    radix: int
    other_ops: int
    butterfly_ops: int

    @property
    def total_ops(self) -> int:
        return self.other_ops + self.butterfly_ops

    def as_tuple(self) -> tuple[int, int, int]:
        return self.other_ops, self.butterfly_ops, self.total_ops


def radix_cost(radix: int) -> RadixCost:
    """64-bit integer ALU operations of one work-item in one round of a radix-R pass."""
    if radix not in (2, 4, 8, 16):
        raise ParameterError(f"unsupported radix {radix}")
    r = radix.bit_length() - 1
    return RadixCost(radix, int(RADIX_OTHER_OPS[r]), int(RADIX_BUTTERFLY_OPS[r]))


class Bound(enum.Enum):
    MEMORY = "Memory"
    COMPUTE = "Compute"


@dataclass(frozen=True)
class MachineParams:
    peak_ops_per_s: float
    bandwidth_bytes_per_s: float

    def __post_init__(self):
        if self.peak_ops_per_s <= 0 or self.bandwidth_bytes_per_s <= 0:
            raise ParameterError("machine peak and bandwidth must be positive")

    @classmethod
    def from_cli(cls, peak_gops: float, bandwidth_gbs: float) -> "MachineParams":
        return cls(peak_gops * 1e9, bandwidth_gbs * 1e9)

    @property
    def knee(self) -> float:
        """Density (ops/byte) where the roofline turns from bandwidth to compute."""
        return self.peak_ops_per_s / self.bandwidth_bytes_per_s

    def attainable(self, density: float) -> float:
        return min(self.peak_ops_per_s, density * self.bandwidth_bytes_per_s)


@dataclass(frozen=True)
class DensityReport:
    variant: str
    n: int
    total_alu_ops: int
    total_mem_bytes: int
    density: float
    bound: Bound | None = None

    @property
    def exact_density(self) -> Fraction:
        return Fraction(self.total_alu_ops, self.total_mem_bytes)

    def as_row(self) -> dict:
        d = asdict(self)
        d["bound"] = self.bound.value if self.bound else ""
        return d


def _bound(density: float, machine: MachineParams | None) -> Bound | None:
    if machine is None:
        return None
    return Bound.COMPUTE if density >= machine.knee else Bound.MEMORY


def _resolve(variant, block_gap: int | None) -> NttVariant:
    if isinstance(variant, str):
        variant = parse_variant(variant)
    if block_gap is not None:
        if isinstance(variant, Staged2):
            variant = Staged2(block_gap)
        elif isinstance(variant, HighRadix):
            variant = HighRadix(variant.radix, block_gap)
    return variant


def operational_density(variant: NttVariant | str, n: int, block_gap: int | None = None,
                        machine: MachineParams | None = None) -> DensityReport:
    """Model counts for one forward transform of length n.

    Ops sum radix_cost(R).total_ops * n/R over the passes of the variant's
    plan; bytes are 8 * (2n per global read/write sweep).
    """
    v = _resolve(variant, block_gap)
    plan = make_plan(n, v)
    ops = plan.alu_ops
    mem = WORD_BYTES * plan.global_mem_elements
    density = ops / mem
    return DensityReport(v.label, n, ops, mem, density, _bound(density, machine))


def classify(profile: KernelProfile, machine: MachineParams | None = None, *,
             variant: str = "", n: int = 0) -> DensityReport:
    """Density from measured counters, with the roofline verdict."""
    mem = profile.mem_bytes
    if mem == 0:
        raise ParameterError("profile has no memory traffic")
    density = profile.alu_ops / mem
    transforms = max(profile.transforms, 1)
    return DensityReport(variant, n, profile.alu_ops // transforms, mem // transforms, density,
                         _bound(density, machine))


def naive_density() -> Fraction:
    """(n/2)*48*log n ops over 16 n log n bytes, independent of n."""
    return Fraction(48, 2 * 2 * WORD_BYTES)


DEFAULT_DENSITY_VARIANTS = ("naive", "staged2", "radix4", "radix8", "radix16")
DENSITY_FIELDS = ("variant", "n", "total_alu_ops", "total_mem_bytes", "density", "bound")


def density_table(ns, variants=DEFAULT_DENSITY_VARIANTS, machine: MachineParams | None = None,
                  block_gap: int | None = None) -> list[DensityReport]:
    rows = []
    for n in ns:
        for name in variants:
            v = _resolve(name, block_gap).fit(n)
            rows.append(operational_density(v, n, machine=machine))
    return rows
