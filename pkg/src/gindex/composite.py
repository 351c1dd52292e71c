"""Composite index: weighted geometric aggregation, log-change attribution, regional means."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from gindex._validation import check_weights, is_missing

logger = logging.getLogger(__name__)

PILLARS = ("irs", "lnsr", "ifc")


@dataclass(frozen=True)
class GiWeights:
    w_irs: float = 0.35
    w_lnsr: float = 0.35
    w_ifc: float = 0.30

    def __post_init__(self):
        check_weights(self.as_tuple(), 3, "pillar weights")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.w_irs, self.w_lnsr, self.w_ifc)

    @property
    def total(self) -> float:
        return self.w_irs + self.w_lnsr + self.w_ifc


class Contributions(NamedTuple):
    irs: float
    lnsr: float
    ifc: float

    @property
    def total(self) -> float:
        return self.irs + self.lnsr + self.ifc


@dataclass(frozen=True)
class GiRecord:
    country: str
    year: int
    gi: float | None
    pillars: tuple[float | None, float | None, float | None]
    contributions: Contributions | None = None
    reason: str = ""

    @property
    def present_mask(self) -> tuple[bool, bool, bool]:
        return tuple(not is_missing(p) for p in self.pillars)

    @property
    def mask_label(self) -> str:
        return "".join("1" if p else "0" for p in self.present_mask)


def aggregate_gi(
    pillars: Sequence[float | None],
    weights: GiWeights = GiWeights(),
    epsilon_floor: float = 0.0,
) -> float | None:
    """Weighted geometric mean of the present pillars.

    Weights of missing pillars are dropped and the rest rescaled to sum to
    one. Pillars are floored at ``epsilon_floor`` before taking logs; with
    the default floor of 0 any zero pillar makes the index 0.
    """
    if len(pillars) != 3:
        raise ValueError("expected three pillar values")
    if epsilon_floor < 0:
        raise ValueError("epsilon_floor must be non-negative")
    present = [(float(p), w) for p, w in zip(pillars, weights.as_tuple()) if not is_missing(p)]
    if not present:
        return None
    values = [max(p, epsilon_floor) for p, _ in present]
    if min(values) <= 0.0:
        return 0.0
    total = sum(w for _, w in present)
    log_gi = sum((w / total) * math.log(v) for v, (_, w) in zip(values, present))
    gi = math.exp(log_gi)
    return min(max(values), max(min(values), gi))


def decompose_dlog(prev: GiRecord, curr: GiRecord, weights: GiWeights = GiWeights()) -> Contributions | None:
    """Split ``log GI_t - log GI_{t-1}`` into per-pillar contributions.

    ``c_i = (w_i / W) * (log p_i,t - log p_i,t-1)``. Returns ``None`` when
    any pillar is missing or non-positive in either year.
    """
    reason = decomposition_gap(prev, curr)
    if reason:
        logger.debug("%s %d: no decomposition (%s)", curr.country, curr.year, reason)
        return None
    W = weights.total
    return Contributions(
        *(
            (w / W) * (math.log(c) - math.log(p))
            for w, p, c in zip(weights.as_tuple(), prev.pillars, curr.pillars)
        )
    )


def decomposition_gap(prev: GiRecord, curr: GiRecord) -> str:
    """Machine-readable reason why a decomposition is undefined, or ``""``."""
    for label, record in (("prev", prev), ("curr", curr)):
        for name, p in zip(PILLARS, record.pillars):
            if is_missing(p):
                return f"missing_{name}_{label}"
            if p <= 0:
                return f"nonpositive_{name}_{label}"
    return ""


def attach_contributions(records: Sequence[GiRecord], weights: GiWeights = GiWeights()) -> list[GiRecord]:
    """Fill ``contributions``/``reason`` for a single country's year-ordered records."""
    out: list[GiRecord] = []
    for i, rec in enumerate(records):
        if i == 0 or records[i - 1].year != rec.year - 1:
            out.append(GiRecord(rec.country, rec.year, rec.gi, rec.pillars, None, "no_previous_year"))
            continue
        prev = records[i - 1]
        reason = decomposition_gap(prev, rec)
        contrib = None if reason else decompose_dlog(prev, rec, weights)
        out.append(GiRecord(rec.country, rec.year, rec.gi, rec.pillars, contrib, reason))
    return out


@dataclass(frozen=True)
class RegionalRow:
    region: str
    n_members: int
    values: Mapping[str, float | None]
    counts: Mapping[str, int] = field(default_factory=dict)

    def __getitem__(self, key: str) -> float | None:
        return self.values[key]


REGION_FIELDS = ("gi", "irs", "lnsr", "ifc")


def regional_mean(members: Iterable[Mapping[str, float | None]], region: str) -> RegionalRow:
    """Field-wise arithmetic mean over member rows, with per-field counts."""
    members = list(members)
    values: dict[str, float | None] = {}
    counts: dict[str, int] = {}
    for name in REGION_FIELDS:
        present = [float(m[name]) for m in members if not is_missing(m.get(name))]
        counts[name] = len(present)
        values[name] = math.fsum(present) / len(present) if present else None
    return RegionalRow(region, len(members), values, counts)


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    mean: float
    std: float | None
    min: float
    max: float
    last: float


def descriptive_stats(values: Sequence[float | None]) -> DescriptiveStats | None:
    """Mean, sample std (n-1), extrema and last present value of a time-ordered series."""
    present = np.array([float(v) for v in values if not is_missing(v)])
    if present.size == 0:
        return None
    std = float(np.std(present, ddof=1)) if present.size >= 2 else None
    return DescriptiveStats(
        n=int(present.size),
        mean=float(np.mean(present)),
        std=std,
        min=float(present.min()),
        max=float(present.max()),
        last=float(present[-1]),
    )
