"""Trading-model data structures, the binary state machine and the schedule validator.

A model instance covers T hourly periods.  Per period the schedule carries four
binary flags (charge alpha, discharge beta, last-op state gamma, cycle-complete
delta), grid-side energy amounts (purchase P, sale S), the battery level L, the
remaining capacity K and the cumulative cycle count C.  One unit bought adds
(1 - loss) to the level; one unit sold drains 1/(1 - loss).  A cycle completes
when the last-op state flips from charge to discharge, and each completed cycle
permanently removes a fixed slice of capacity (the default trigger; the
``charge-literal`` variant instead decrements one period after every charging
hour, for comparison runs).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..bess import BatterySpec, BatteryState, ConverterSpec, SpecError

DEGRADATION_MODES = ("cycle", "charge-literal")


class ModelError(ValueError):
    """Invalid model construction or schedule/instance mismatch."""


def step_state_transition(gamma_prev: int, alpha: int, beta: int) -> tuple[int, int]:
    """Advance the last-op state one period and detect cycle completion.

    Charging sets the state to 1, discharging to 0, idling keeps it; a cycle
    completes exactly when the state flips 1 -> 0.  Charging and discharging in
    the same period is rejected.
    """
    if alpha and beta:
        raise ModelError("charge and discharge flags set in the same period")
    if alpha:
        gamma = 1
    elif beta:
        gamma = 0
    else:
        gamma = int(gamma_prev)
    delta = 1 if gamma_prev == 1 and gamma == 0 else 0
    return gamma, delta


@dataclass(frozen=True)
class ModelInstance:
    """Prices plus physical parameters and the starting battery state."""

    prices: np.ndarray
    battery: BatterySpec
    converter: ConverterSpec
    initial: BatteryState
    degradation_mode: str = "cycle"

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        if prices.ndim != 1 or len(prices) < 1:
            raise ModelError("horizon must contain at least one period")
        if not np.all(np.isfinite(prices)):
            raise ModelError("prices must be finite")
        prices = prices.copy()
        prices.flags.writeable = False
        object.__setattr__(self, "prices", prices)
        if self.degradation_mode not in DEGRADATION_MODES:
            raise ModelError(
                f"unknown degradation mode {self.degradation_mode!r}, "
                f"expected one of {DEGRADATION_MODES}"
            )
        if self.battery.one_way_loss >= 1:
            raise ModelError("one-way loss of 1 leaves no usable round trip")
        if self.initial.capacity_mwh > self.battery.initial_capacity_mwh + 1e-9:
            raise ModelError(
                f"starting capacity {self.initial.capacity_mwh} exceeds the "
                f"battery's initial {self.battery.initial_capacity_mwh}"
            )

    @property
    def horizon(self) -> int:
        return len(self.prices)

    # Size of the equivalent constraint formulation; kept as formulas so
    # year-scale instances stay cheap to build.
    @property
    def n_continuous_vars(self) -> int:
        return 4 * self.horizon  # P, S, L, K

    @property
    def n_binary_vars(self) -> int:
        return 4 * self.horizon  # alpha, beta, gamma, delta

    @property
    def n_integer_vars(self) -> int:
        return self.horizon  # cycle counter

    @property
    def n_constraints(self) -> int:
        # per period: headroom, availability, two converter caps, exclusivity,
        # level balance, capacity update, five state-machine rows, cycle count
        return 13 * self.horizon


def build_model(
    prices: Sequence[float],
    initial_state: BatteryState,
    battery: BatterySpec,
    converter: ConverterSpec,
    degradation_mode: str = "cycle",
) -> ModelInstance:
    """Assemble a trading instance, checking the inputs against each other."""
    return ModelInstance(
        prices=np.asarray(prices, dtype=float),
        battery=battery,
        converter=converter,
        initial=initial_state,
        degradation_mode=degradation_mode,
    )


@dataclass
class TradeSchedule:
    """Per-period decisions and resulting state trajectory (arrays of length T)."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray
    purchases: np.ndarray  # P, MWh bought at the grid meter
    sales: np.ndarray      # S, MWh sold at the grid meter
    levels: np.ndarray     # L, MWh stored at period end
    capacities: np.ndarray  # K, MWh usable at period end
    cycles: np.ndarray     # C, cumulative completed cycles
    warnings: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.alpha)

    def objective(self, prices: np.ndarray) -> float:
        return float(np.dot(np.asarray(prices, dtype=float), self.sales - self.purchases))

    def end_state(self) -> BatteryState:
        return BatteryState(
            capacity_mwh=float(self.capacities[-1]),
            level_mwh=float(self.levels[-1]),
            cycles=int(self.cycles[-1]),
            last_op_charge=int(self.gamma[-1]),
        )

    def active_periods(self) -> int:
        return int(np.sum(self.alpha) + np.sum(self.beta))

    EXPORT_HEADER = "t,price,alpha,beta,gamma,delta,P_mwh,S_mwh,L_mwh,K_mwh,C"

    def export_rows(self, prices: np.ndarray):
        for t in range(len(self)):
            yield (
                f"{t + 1},{prices[t]:.4f},{int(self.alpha[t])},{int(self.beta[t])},"
                f"{int(self.gamma[t])},{int(self.delta[t])},{self.purchases[t]:.6f},"
                f"{self.sales[t]:.6f},{self.levels[t]:.6f},{self.capacities[t]:.6f},"
                f"{int(self.cycles[t])}"
            )


def simulate(
    instance: ModelInstance,
    alpha: Sequence[int],
    beta: Sequence[int],
    purchases: Sequence[float],
    sales: Sequence[float],
) -> TradeSchedule:
    """Roll the state machine over given decisions, deriving L, K, gamma, delta, C.

    The capacity decrement is clamped so K never falls below the level; a
    clamp is recorded as a schedule warning (only reachable through shallow
    cycles right at the capacity edge).
    """
    T = instance.horizon
    alpha = np.asarray(alpha, dtype=np.int8)
    beta = np.asarray(beta, dtype=np.int8)
    P = np.asarray(purchases, dtype=float)
    S = np.asarray(sales, dtype=float)
    if not (len(alpha) == len(beta) == len(P) == len(S) == T):
        raise ModelError("decision arrays must match the instance horizon")

    loss = instance.battery.one_way_loss
    fade = instance.battery.fade_per_cycle_mwh
    gamma = np.zeros(T, dtype=np.int8)
    delta = np.zeros(T, dtype=np.int8)
    levels = np.zeros(T)
    caps = np.zeros(T)
    cycles = np.zeros(T, dtype=np.int64)
    warnings: list[str] = []

    g = instance.initial.last_op_charge
    lvl = instance.initial.level_mwh
    cap = instance.initial.capacity_mwh
    cyc = instance.initial.cycles
    prev_alpha = 0
    for t in range(T):
        g_new, d = step_state_transition(g, int(alpha[t]), int(beta[t]))
        lvl = lvl + P[t] * (1.0 - loss) - S[t] / (1.0 - loss)
        trigger = d if instance.degradation_mode == "cycle" else prev_alpha
        new_cap = cap - fade * trigger
        if new_cap < lvl:
            warnings.append(
                f"capacity decrement clamped at t={t + 1}: level {lvl:.6f} exceeds "
                f"faded capacity {new_cap:.6f}"
            )
            new_cap = lvl
        gamma[t] = g_new
        delta[t] = d
        levels[t] = lvl
        caps[t] = new_cap
        cyc += d
        cycles[t] = cyc
        g = g_new
        cap = new_cap
        prev_alpha = int(alpha[t])

    return TradeSchedule(
        alpha=alpha, beta=beta, gamma=gamma, delta=delta,
        purchases=P, sales=S, levels=levels, capacities=caps, cycles=cycles,
        warnings=warnings,
    )


def validate_schedule(
    schedule: TradeSchedule, instance: ModelInstance, tol: float = 1e-9
) -> list[str]:
    """Re-check every model rule independently of how the schedule was produced.

    Returns an empty list when the schedule is feasible to within ``tol``;
    otherwise one message per violation, naming the rule and the period.
    """
    T = instance.horizon
    if len(schedule) != T:
        raise ModelError(
            f"schedule has {len(schedule)} periods but the instance has {T}"
        )
    loss = instance.battery.one_way_loss
    fade = instance.battery.fade_per_cycle_mwh
    pmax = instance.converter.power_mw
    out: list[str] = []

    g_prev = instance.initial.last_op_charge
    lvl_prev = instance.initial.level_mwh
    cap_prev = instance.initial.capacity_mwh
    cyc_prev = instance.initial.cycles
    prev_alpha = 0
    for t in range(T):
        a, b = int(schedule.alpha[t]), int(schedule.beta[t])
        P, S = float(schedule.purchases[t]), float(schedule.sales[t])
        L, K = float(schedule.levels[t]), float(schedule.capacities[t])
        here = f"t={t + 1}"
        if a not in (0, 1) or b not in (0, 1):
            out.append(f"non-binary charge/discharge flag at {here}")
            g_prev, lvl_prev, cap_prev = int(schedule.gamma[t]), L, K
            continue
        if a + b > 1:
            out.append(f"charge and discharge in the same period at {here}")
        if P < -tol or S < -tol:
            out.append(f"negative energy amount at {here}")
        if P > pmax * a + tol:
            out.append(f"purchase exceeds converter bound at {here}: {P:.9f} > {pmax * a}")
        if S > pmax * b + tol:
            out.append(f"sale exceeds converter bound at {here}: {S:.9f} > {pmax * b}")
        if P * (1.0 - loss) > cap_prev - lvl_prev + tol:
            out.append(
                f"purchase exceeds free battery headroom at {here}: "
                f"{P * (1.0 - loss):.9f} stored > {cap_prev - lvl_prev:.9f} free"
            )
        if S > lvl_prev * (1.0 - loss) + tol:
            out.append(
                f"sale exceeds deliverable level at {here}: "
                f"{S:.9f} > {lvl_prev * (1.0 - loss):.9f}"
            )
        expected_level = lvl_prev + P * (1.0 - loss) - S / (1.0 - loss)
        if abs(L - expected_level) > tol:
            out.append(
                f"level balance broken at {here}: recorded {L:.9f}, "
                f"recomputed {expected_level:.9f}"
            )
        try:
            g_exp, d_exp = step_state_transition(g_prev, a, b)
        except ModelError:
            g_exp, d_exp = int(schedule.gamma[t]), int(schedule.delta[t])
        if int(schedule.gamma[t]) != g_exp:
            out.append(
                f"last-op state mismatch at {here}: recorded {int(schedule.gamma[t])}, "
                f"transition gives {g_exp}"
            )
        if int(schedule.delta[t]) != d_exp:
            out.append(
                f"cycle-completion flag mismatch at {here}: recorded "
                f"{int(schedule.delta[t])}, transition gives {d_exp}"
            )
        if int(schedule.cycles[t]) != cyc_prev + d_exp:
            out.append(
                f"cycle count mismatch at {here}: recorded {int(schedule.cycles[t])}, "
                f"expected {cyc_prev + d_exp}"
            )
        trigger = d_exp if instance.degradation_mode == "cycle" else prev_alpha
        cap_exp = max(cap_prev - fade * trigger, expected_level)
        if abs(K - cap_exp) > tol:
            out.append(
                f"capacity update mismatch at {here}: recorded {K:.9f}, "
                f"expected {cap_exp:.9f}"
            )
        if K > cap_prev + tol:
            out.append(f"capacity increased at {here}")
        if L < -tol or L > K + tol:
            out.append(f"level outside [0, capacity] at {here}: L={L:.9f}, K={K:.9f}")
        g_prev = g_exp
        lvl_prev = expected_level
        cap_prev = cap_exp
        cyc_prev = cyc_prev + d_exp
        prev_alpha = a
    return out
