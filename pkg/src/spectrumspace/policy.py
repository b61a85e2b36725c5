"""Rights definition, guard margins, enforcement, and pricing.

A grant caps what a cell may radiate in each (band, quantum) slice; the cap
comes from the guarded opportunity at that cell. Refusals are ordinary return
values, not exceptions, so a manager can log and move on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .model import PowerBounds, Scenario, db_to_linear
from .propagation import link_gain_linear
from .quantify import (
    Cell,
    PowerField,
    Slice,
    SpectrumQuantity,
    _signal_and_interference,
    opportunity_at_cell,
)

__all__ = [
    "Grant",
    "PriceSheet",
    "Refusal",
    "RightsRequest",
    "Violation",
    "apply_guard_margin",
    "attribute_harmful_interference",
    "define_rights",
    "enforce",
    "price",
]


@dataclass(frozen=True)
class RightsRequest:
    """What an entrant asks for in one band."""

    tx_id: str
    position: tuple[float, float]
    desired_dbm: float
    min_useful_dbm: float
    band: int
    quanta: frozenset[int]


@dataclass(frozen=True)
class Grant:
    """Permission to transmit up to a per-cell cap in specific slices."""

    grant_id: str
    grantee_tx_id: str
    caps_dbm: Mapping[Slice, Mapping[Cell, float]]
    margin_db: float
    issued_at: int = 0

    def cap_at(self, band: int, quantum: int, cell: Cell | None) -> float | None:
        if cell is None:
            return None
        return self.caps_dbm.get((band, quantum), {}).get(cell)

    def cap_dbm(self) -> float:
        """The single cap value; grants issued here cap one cell uniformly."""
        return next(iter(next(iter(self.caps_dbm.values())).values()))


@dataclass(frozen=True)
class Refusal:
    """Why a rights request was not granted. Data, not an error."""

    tx_id: str
    band: int
    reason: str
    limiting_rx_id: str | None = None
    guarded_opportunity_dbm: float | None = None


@dataclass(frozen=True)
class Violation:
    grant_id: str | None
    tx_id: str
    cell: Cell | None
    band: int
    quantum: int
    granted_dbm: float
    observed_dbm: float
    excess_db: float


@dataclass(frozen=True)
class PriceSheet:
    """Linear tariff: currency per W m^2, optionally differentiated by slice."""

    rate: float = 0.0
    slice_rates: Mapping[Slice, float] | None = None


def apply_guard_margin(opportunity: PowerField, margin_db: float, bounds: PowerBounds) -> PowerField:
    """Back every cell off by a safety margin, never dropping below the floor.

    Raises ValueError for a negative margin.
    """
    if margin_db < 0:
        raise ValueError(f"guard margin must be non-negative (got {margin_db})")
    values = np.maximum(bounds.p_min_dbm, opportunity.values_dbm - margin_db)
    return PowerField(opportunity.band, opportunity.quantum, values, opportunity.zero_margin_rx_ids)


def define_rights(scenario: Scenario, request: RightsRequest, margin_db: float,
                  protected=None, issued_at: int = 0, grant_id: str | None = None):
    """Issue a Grant for one band, or a Refusal explaining why not.

    The cap at the request's cell is min(desired power, guarded opportunity),
    where the guarded opportunity is the worst over the requested quanta. A
    cap below the requester's minimum useful power yields a Refusal naming
    the limiting receiver.

    Returns:
      Grant or Refusal.
    """
    if margin_db < 0:
        raise ValueError(f"guard margin must be non-negative (got {margin_db})")
    if not request.quanta:
        raise ValueError(f"request {request.tx_id!r}: no time quanta requested")
    bounds = scenario.bounds
    cell = scenario.grid.cell_of(request.position)

    guarded = np.inf
    limiting: str | None = None
    for quantum in sorted(request.quanta):
        opp, rx_id = opportunity_at_cell(scenario, request.band, quantum, cell, protected)
        value = max(bounds.p_min_dbm, opp - margin_db)
        if value < guarded:
            guarded, limiting = value, rx_id
    cap = min(request.desired_dbm, guarded)

    if cap < request.min_useful_dbm:
        return Refusal(
            tx_id=request.tx_id,
            band=request.band,
            reason=(
                f"guarded opportunity {guarded:.4f} dBm caps the grant below the "
                f"minimum useful power {request.min_useful_dbm:.4f} dBm"
            ),
            limiting_rx_id=limiting,
            guarded_opportunity_dbm=guarded,
        )
    caps = {(request.band, q): {cell: cap} for q in sorted(request.quanta)}
    return Grant(
        grant_id=grant_id or f"grant:{request.tx_id}:b{request.band}",
        grantee_tx_id=request.tx_id,
        caps_dbm=caps,
        margin_db=margin_db,
        issued_at=issued_at,
    )


def enforce(grants, observed: Scenario, tolerance_db: float = 0.5) -> list[Violation]:
    """Audit every observed transmitter against the grant register.

    A grantee over its cap by more than the tolerance is a violation; a
    transmitter occupying a slice no grant covers is unauthorized access and
    is reported against the power floor. A grantee that is absent from the
    observed scenario is simply compliant.
    """
    by_tx: dict[str, list[Grant]] = {}
    for grant in grants:
        by_tx.setdefault(grant.grantee_tx_id, []).append(grant)

    p_min = observed.bounds.p_min_dbm
    violations: list[Violation] = []
    for tx in observed.transmitters():
        cell = observed.grid.cell_of(tx.position) if observed.grid.contains(tx.position) else None
        for quantum in sorted(tx.quanta):
            best_cap: float | None = None
            best_grant: str | None = None
            for grant in by_tx.get(tx.id, []):
                cap = grant.cap_at(tx.band, quantum, cell)
                if cap is not None and (best_cap is None or cap > best_cap):
                    best_cap, best_grant = cap, grant.grant_id
            if best_cap is None:
                excess = tx.tx_power_dbm - p_min
                if excess > tolerance_db:
                    violations.append(Violation(
                        grant_id=None, tx_id=tx.id, cell=cell, band=tx.band,
                        quantum=quantum, granted_dbm=p_min,
                        observed_dbm=tx.tx_power_dbm, excess_db=excess,
                    ))
            else:
                excess = tx.tx_power_dbm - best_cap
                if excess > tolerance_db:
                    violations.append(Violation(
                        grant_id=best_grant, tx_id=tx.id, cell=cell, band=tx.band,
                        quantum=quantum, granted_dbm=best_cap,
                        observed_dbm=tx.tx_power_dbm, excess_db=excess,
                    ))
    return violations


def attribute_harmful_interference(rx, scenario: Scenario, quantum: int) -> dict[str, float]:
    """Split a receiver's excess interference among the transmitters causing it.

    When the receiver's SINR in the quantum is at or above its threshold all
    shares are zero. Otherwise the linear excess beyond what the link could
    tolerate is divided proportionally to each interferer's contribution, so
    the shares sum to the excess.

    Returns:
      dict mapping interferer tx id to its share in linear mW.
    """
    if isinstance(rx, str):
        resolved = scenario.receiver(rx)
        if resolved is None:
            raise ValueError(f"unknown receiver {rx!r}")
        rx = resolved

    contributions: dict[str, float] = {}
    for tx in scenario.transmitters():
        if tx.active_in(rx.band, quantum) and tx.id != rx.linked_tx_id:
            contributions[tx.id] = db_to_linear(tx.tx_power_dbm) * link_gain_linear(
                tx, rx.position, scenario.propagation, rx.pattern
            )

    signal, interference = _signal_and_interference(scenario, rx, quantum)
    noise = db_to_linear(rx.noise_floor_dbm)
    if interference <= 0.0 or signal >= db_to_linear(rx.beta_db) * (noise + interference):
        return {tx_id: 0.0 for tx_id in contributions}

    allowed = max(0.0, signal / db_to_linear(rx.beta_db) - noise)
    excess = interference - allowed
    if excess <= 0.0:
        return {tx_id: 0.0 for tx_id in contributions}
    scale = excess / interference
    return {tx_id: c * scale for tx_id, c in contributions.items()}


def price(consumed: SpectrumQuantity, sheet: PriceSheet) -> float:
    """Charge for a consumed quantity under a linear tariff.

    Slice rates apply to the breakdown when both are present; otherwise the
    flat rate multiplies the total. Negative rates are rejected.
    """
    if sheet.rate < 0 or (sheet.slice_rates and any(r < 0 for r in sheet.slice_rates.values())):
        raise ValueError("price rates must be non-negative")
    if sheet.slice_rates and consumed.breakdown is not None:
        return sum(
            sheet.slice_rates.get(key, sheet.rate) * amount
            for key, amount in sorted(consumed.breakdown.items())
        )
    return sheet.rate * consumed.value
