"""Battery and converter parameters: efficiency, degradation and cost arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass


class SpecError(ValueError):
    """Raised when a battery/converter parameter violates its physical bounds."""


@dataclass(frozen=True)
class BatterySpec:
    """Physical and economic parameters of the storage unit.

    initial_capacity_mwh   usable capacity when new (MWh)
    fade_per_cycle_mwh     permanent capacity lost per completed charge/discharge cycle
    one_way_loss           fraction of energy lost at the converter on each leg, in [0, 1)
    eol_capacity_fraction  fraction of initial capacity below which operation stops
    unit_cost_eur_per_mwh  equipment cost per MWh of initial capacity
    om_rate                yearly operation & maintenance, as a fraction of equipment value
    """

    initial_capacity_mwh: float
    fade_per_cycle_mwh: float = 0.0
    one_way_loss: float = 0.0
    eol_capacity_fraction: float = 0.80
    unit_cost_eur_per_mwh: float = 100_000.0
    om_rate: float = 0.01

    def __post_init__(self):
        if not self.initial_capacity_mwh > 0:
            raise SpecError(f"battery capacity must be positive, got {self.initial_capacity_mwh}")
        if not 0 <= self.fade_per_cycle_mwh < self.initial_capacity_mwh:
            raise SpecError(
                f"fade per cycle must be in [0, capacity), got {self.fade_per_cycle_mwh}"
            )
        if not 0 <= self.one_way_loss < 1:
            raise SpecError(f"one-way loss must be in [0, 1), got {self.one_way_loss}")
        if not 0 < self.eol_capacity_fraction < 1:
            raise SpecError(
                f"end-of-life fraction must be in (0, 1), got {self.eol_capacity_fraction}"
            )

    @property
    def eol_capacity_mwh(self) -> float:
        return self.eol_capacity_fraction * self.initial_capacity_mwh

    def capacity_after_cycles(self, n: int) -> float:
        """Remaining capacity after ``n`` completed cycles (linear fade)."""
        return self.initial_capacity_mwh - n * self.fade_per_cycle_mwh


@dataclass(frozen=True)
class ConverterSpec:
    """Power-electronics unit bounding hourly charge/discharge energy."""

    power_mw: float
    unit_cost_eur_per_mw: float = 30_000.0

    def __post_init__(self):
        if not self.power_mw > 0:
            raise SpecError(f"converter power must be positive, got {self.power_mw}")


@dataclass(frozen=True)
class BatteryState:
    """Snapshot of the battery between trading periods.

    ``last_op_charge`` is 1 when the most recent charge/discharge operation was a
    charge (a pending cycle), 0 otherwise.  Fresh batteries start at 0.
    """

    capacity_mwh: float
    level_mwh: float = 0.0
    cycles: int = 0
    last_op_charge: int = 0

    def __post_init__(self):
        if self.capacity_mwh < 0:
            raise SpecError(f"capacity must be non-negative, got {self.capacity_mwh}")
        if not -1e-9 <= self.level_mwh <= self.capacity_mwh + 1e-9:
            raise SpecError(
                f"level {self.level_mwh} outside [0, capacity={self.capacity_mwh}]"
            )
        if self.cycles < 0 or int(self.cycles) != self.cycles:
            raise SpecError(f"cycle count must be a non-negative integer, got {self.cycles}")
        if self.last_op_charge not in (0, 1):
            raise SpecError(f"last_op_charge must be 0 or 1, got {self.last_op_charge}")

    @classmethod
    def fresh(cls, battery: BatterySpec) -> "BatteryState":
        return cls(capacity_mwh=battery.initial_capacity_mwh)


def one_way_loss_from_round_trip(round_trip_efficiency: float, mode: str = "sqrt") -> float:
    """Per-leg conversion loss consistent with a quoted round-trip efficiency.

    ``sqrt`` splits the loss evenly so that charge followed by discharge retains
    exactly the round trip: (1 - loss)^2 = efficiency.  ``literal`` reads the
    quoted figure as the per-leg retention itself: loss = 1 - efficiency.
    """
    if not 0 < round_trip_efficiency <= 1:
        raise SpecError(
            f"round-trip efficiency must be in (0, 1], got {round_trip_efficiency}"
        )
    if mode == "sqrt":
        return 1.0 - math.sqrt(round_trip_efficiency)
    if mode == "literal":
        return 1.0 - round_trip_efficiency
    raise SpecError(f"unknown loss mode {mode!r} (expected 'sqrt' or 'literal')")


def degradation_per_cycle(
    initial_capacity_mwh: float, life_cycles: int, total_fade_fraction: float
) -> float:
    """Linear per-cycle capacity loss: total fade spread over the cycle life."""
    if life_cycles <= 0:
        raise SpecError(f"cycle life must be positive, got {life_cycles}")
    if not 0 <= total_fade_fraction < 1:
        raise SpecError(f"total fade must be in [0, 1), got {total_fade_fraction}")
    return total_fade_fraction * initial_capacity_mwh / life_cycles


def capex(battery: BatterySpec, converter: ConverterSpec) -> float:
    """Total equipment cost in euros."""
    return (
        battery.initial_capacity_mwh * battery.unit_cost_eur_per_mwh
        + converter.power_mw * converter.unit_cost_eur_per_mw
    )
