"""Hourly day-ahead price ingestion, gap handling and descriptive statistics.

Prices arrive as CSV exports with a ``timestamp,price_eur_mwh`` header.  After
ingestion a series is strictly hourly and immutable; level statistics are taken
over all hours, and gap statistics over the max-minus-min spread of complete
calendar days (day boundary in a configurable timezone, UTC by default).
Standard deviations are population ones (divide by N) so small fixtures have
exact expected values.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Iterable, Sequence
from zoneinfo import ZoneInfo

import numpy as np

HOUR = timedelta(hours=1)
MAX_FILL_RUN_HOURS = 24

GAP_POLICIES = ("reject", "interp", "prev")


class PriceDataError(ValueError):
    """Malformed, inconsistent or insufficient price data."""


@dataclass(frozen=True)
class PriceSeries:
    """Immutable, strictly hourly price track for one bidding zone.

    ``gap_flags[i]`` is True when hour ``i`` was imputed rather than observed.
    """

    zone: str
    start: datetime
    prices: np.ndarray
    gap_flags: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        if prices.ndim != 1 or len(prices) < 24:
            raise PriceDataError(
                f"price series needs at least 24 hourly values, got {prices.ndim}-d "
                f"array of length {prices.size}"
            )
        if not np.all(np.isfinite(prices)):
            raise PriceDataError("prices must be finite")
        if self.start.tzinfo is None:
            object.__setattr__(self, "start", self.start.replace(tzinfo=timezone.utc))
        else:
            object.__setattr__(self, "start", self.start.astimezone(timezone.utc))
        if self.start.minute or self.start.second or self.start.microsecond:
            raise PriceDataError(f"start must be hour-aligned, got {self.start}")
        flags = self.gap_flags
        if flags is None:
            flags = np.zeros(len(prices), dtype=bool)
        flags = np.asarray(flags, dtype=bool)
        if flags.shape != prices.shape:
            raise PriceDataError("gap_flags must have one entry per hour")
        prices = prices.copy()
        flags = flags.copy()
        prices.flags.writeable = False
        flags.flags.writeable = False
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "gap_flags", flags)

    def __len__(self) -> int:
        return len(self.prices)

    def timestamp(self, i: int) -> datetime:
        return self.start + i * HOUR

    def timestamps(self) -> list[datetime]:
        return [self.start + i * HOUR for i in range(len(self))]


@dataclass(frozen=True)
class PriceStats:
    """Level statistics over all hours, in EUR/MWh."""

    mean: float
    std_dev: float
    min: float
    max: float


@dataclass(frozen=True)
class GapStats:
    """Statistics of the per-day max-minus-min hourly price, in EUR/MWh."""

    mean_gap: float
    std_dev: float
    min: float
    max: float


def _parse_timestamp(text: str, lineno: int) -> datetime:
    raw = text.strip()
    try:
        ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except ValueError:
        raise PriceDataError(f"line {lineno}: malformed timestamp {raw!r}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    ts = ts.astimezone(timezone.utc)
    if ts.minute or ts.second or ts.microsecond:
        raise PriceDataError(f"line {lineno}: timestamp {raw!r} is not hour-aligned")
    return ts


def parse_price_csv(stream, zone: str, gap_policy: str = "reject") -> PriceSeries:
    """Read a ``timestamp,price_eur_mwh`` CSV into an hourly PriceSeries.

    Timestamps must be ISO-8601 and strictly increasing; naive ones are taken
    as UTC.  Missing hours are handled per ``gap_policy``: ``reject`` refuses
    them, ``interp`` fills linearly, ``prev`` repeats the last observed price.
    """
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    if hasattr(stream, "read") and isinstance(stream.read(0), bytes):
        stream = io.TextIOWrapper(stream, encoding="utf-8")

    header = stream.readline().strip()
    if header.replace(" ", "") != "timestamp,price_eur_mwh":
        raise PriceDataError(
            f"line 1: expected header 'timestamp,price_eur_mwh', got {header!r}"
        )
    observations: list[tuple[datetime, float]] = []
    prev_ts: datetime | None = None
    for lineno, line in enumerate(stream, start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise PriceDataError(f"line {lineno}: expected 2 fields, got {len(parts)}")
        ts = _parse_timestamp(parts[0], lineno)
        try:
            price = float(parts[1])
        except ValueError:
            raise PriceDataError(f"line {lineno}: non-numeric price {parts[1]!r}") from None
        if not np.isfinite(price):
            raise PriceDataError(f"line {lineno}: non-finite price {parts[1]!r}")
        if prev_ts is not None:
            if ts == prev_ts:
                raise PriceDataError(f"line {lineno}: duplicate timestamp {parts[0].strip()}")
            if ts < prev_ts:
                raise PriceDataError(
                    f"line {lineno}: timestamps not increasing ({parts[0].strip()})"
                )
        prev_ts = ts
        observations.append((ts, price))
    if not observations:
        raise PriceDataError("no data rows found")
    return fill_gaps(observations, zone=zone, policy=gap_policy)


def fill_gaps(
    series_with_holes: "PriceSeries | Iterable[tuple[datetime, float]]",
    zone: str | None = None,
    policy: str = "reject",
) -> PriceSeries:
    """Resolve missing hours so the one-hour-spacing invariant holds.

    Accepts either an already-contiguous PriceSeries (returned unchanged, which
    makes the operation idempotent) or sorted ``(timestamp, price)`` pairs.
    Imputed hours carry ``gap_flags = True``.  Runs of more than 24 missing
    hours are refused under every policy.
    """
    if policy not in GAP_POLICIES:
        raise PriceDataError(f"unknown gap policy {policy!r} (expected one of {GAP_POLICIES})")
    if isinstance(series_with_holes, PriceSeries):
        return series_with_holes

    observations = list(series_with_holes)
    if not observations:
        raise PriceDataError("no observations to fill")
    times = [t if t.tzinfo else t.replace(tzinfo=timezone.utc) for t, _ in observations]
    values = [float(p) for _, p in observations]

    prices: list[float] = [values[0]]
    flags: list[bool] = [False]
    for i in range(1, len(times)):
        span = times[i] - times[i - 1]
        hours = span / HOUR
        if hours != int(hours) or hours < 1:
            raise PriceDataError(
                f"timestamps at {times[i - 1].isoformat()} and {times[i].isoformat()} "
                "are not a whole number of hours apart"
            )
        missing = int(hours) - 1
        if missing:
            if missing > MAX_FILL_RUN_HOURS:
                raise PriceDataError(
                    f"{missing}-hour hole after {times[i - 1].isoformat()} exceeds the "
                    f"{MAX_FILL_RUN_HOURS} h fill limit"
                )
            if policy == "reject":
                raise PriceDataError(
                    f"{missing} missing hour(s) after {times[i - 1].isoformat()} "
                    "and gap policy is 'reject'"
                )
            for k in range(1, missing + 1):
                if policy == "interp":
                    frac = k / (missing + 1)
                    prices.append(values[i - 1] + frac * (values[i] - values[i - 1]))
                else:  # prev
                    prices.append(values[i - 1])
                flags.append(True)
        prices.append(values[i])
        flags.append(False)

    return PriceSeries(
        zone=zone or "unknown",
        start=times[0],
        prices=np.array(prices),
        gap_flags=np.array(flags),
    )


def hourly_stats(series: PriceSeries) -> PriceStats:
    """Mean, population standard deviation, min and max over all hours."""
    if len(series) == 0:
        raise PriceDataError("empty series")
    p = series.prices
    return PriceStats(
        mean=float(np.mean(p)),
        std_dev=float(np.std(p)),
        min=float(np.min(p)),
        max=float(np.max(p)),
    )


def _local_day_index(series: PriceSeries, tz: str):
    """Group hour indices by local calendar date, keeping insertion order."""
    zone = timezone.utc if tz.upper() == "UTC" else ZoneInfo(tz)
    days: dict = {}
    ts = series.start
    for i in range(len(series)):
        days.setdefault(ts.astimezone(zone).date(), []).append(i)
        ts += HOUR
    return days, zone


def _expected_day_hours(day, zone) -> int:
    # wall-clock midnight to next wall-clock midnight; DST days yield 23 or 25
    start = datetime.combine(day, datetime.min.time(), tzinfo=zone)
    end = datetime.combine(day + timedelta(days=1), datetime.min.time(), tzinfo=zone)
    return round((end.astimezone(timezone.utc) - start.astimezone(timezone.utc)) / HOUR)


def daily_gap_stats(series: PriceSeries, day_boundary_tz: str = "UTC") -> GapStats:
    """Statistics of the intraday max-minus-min price over complete days.

    A day is complete when the series covers every hour of that local calendar
    date; 23- and 25-hour DST days count as complete with their actual hour
    count.  Boundary days with missing hours are excluded.
    """
    days, zone = _local_day_index(series, day_boundary_tz)
    gaps = []
    for day, idx in days.items():
        if len(idx) == _expected_day_hours(day, zone):
            chunk = series.prices[idx]
            gaps.append(float(np.max(chunk) - np.min(chunk)))
    if not gaps:
        raise PriceDataError("series spans no complete calendar day")
    g = np.array(gaps)
    return GapStats(
        mean_gap=float(np.mean(g)),
        std_dev=float(np.std(g)),
        min=float(np.min(g)),
        max=float(np.max(g)),
    )


STATS_CSV_HEADER = (
    "zone,mean_price,sd_price,min_price,max_price,mean_gap,sd_gap,min_gap,max_gap"
)


def stats_csv_row(zone: str, level: PriceStats, gaps: GapStats) -> str:
    """One CSV row with level and gap columns in report order."""
    vals = [
        level.mean, level.std_dev, level.min, level.max,
        gaps.mean_gap, gaps.std_dev, gaps.min, gaps.max,
    ]
    return zone + "," + ",".join(f"{v:.4f}" for v in vals)
