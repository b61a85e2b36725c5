"""Occupancy and opportunity fields, consumption spaces, spectrum quantities.

Everything here reduces to one accounting rule: a point consumes the linear
power interval it denies to others, and the grid integrates that over area,
bands, and time quanta into watt square meters. Maps carry dBm for human
consumption; all sums happen in linear milliwatts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .model import (
    Grid,
    PowerBounds,
    Receiver,
    Scenario,
    SpectrumSpaceDims,
    Transmitter,
    db_to_linear,
    linear_to_db,
)
from .propagation import (
    bearing_deg,
    entrant_gain_field_linear,
    link_gain_linear,
    path_loss_db,
    tx_gain_db_field,
)

__all__ = [
    "ConsumptionSpace",
    "HarvestMetrics",
    "PowerField",
    "SpectrumQuantity",
    "available_spectrum",
    "combine_consumption",
    "denied_consumption",
    "harvest_metrics",
    "occupancy_at_cell",
    "occupancy_linear",
    "occupancy_map",
    "opportunity_at_cell",
    "opportunity_map",
    "quantify",
    "receiver_margin_linear",
    "rx_consumption",
    "sinr_db",
    "total_spectrum",
    "tx_consumption",
]

Slice = tuple[int, int]
Cell = tuple[int, int]


@dataclass(frozen=True, eq=False)
class PowerField:
    """Per-cell dBm values for one (band, quantum) slice.

    ``values_dbm`` has shape (n_y, n_x); row 0 is the minimum-y edge of the
    grid. ``zero_margin_rx_ids`` lists protected receivers whose own link was
    already below its SINR threshold when an opportunity field was computed.
    """

    band: int
    quantum: int
    values_dbm: np.ndarray
    zero_margin_rx_ids: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class ConsumptionSpace:
    """Linear mW consumed per cell, per (band, quantum) slice, for an entity set."""

    entity_ids: frozenset[str]
    slices: dict[Slice, np.ndarray]


@dataclass(frozen=True)
class SpectrumQuantity:
    """A spectrum amount in watt square meters, optionally broken down by slice."""

    value: float
    breakdown: dict[Slice, float] | None = None


@dataclass(frozen=True)
class HarvestMetrics:
    """How well an estimated opportunity field tracked the ground truth."""

    recovered: SpectrumQuantity
    lost_available: SpectrumQuantity
    potentially_incursed: SpectrumQuantity


def _check_slice(dims: SpectrumSpaceDims, band: int, quantum: int) -> None:
    if not 0 <= band < dims.b_hat:
        raise ValueError(f"band index {band} out of range [0, {dims.b_hat})")
    if not 0 <= quantum < dims.t_hat:
        raise ValueError(f"time quantum {quantum} out of range [0, {dims.t_hat})")


def _resolve_protected(scenario: Scenario, protected, band: int, quantum: int) -> list[Receiver]:
    """Protected receivers active in the slice, in scenario declaration order.

    ``protected`` is None for every receiver, or an iterable of receiver ids
    or Receiver objects. Receivers inactive in the slice impose no constraint
    and are dropped here.
    """
    if protected is None:
        wanted = None
    else:
        wanted = {rx.id if isinstance(rx, Receiver) else rx for rx in protected}
    out = []
    for rx in scenario.receivers():
        if wanted is not None and rx.id not in wanted:
            continue
        if rx.active_in(band, quantum):
            out.append(rx)
    return out


def occupancy_linear(scenario: Scenario, band: int, quantum: int) -> np.ndarray:
    """Aggregate man-made linear power (mW) at every cell center, unclipped.

    Contributions accumulate per network and then across networks, so the
    field of a scenario decomposes exactly into the sum of its per-network
    fields.
    """
    _check_slice(scenario.dims, band, quantum)
    grid = scenario.grid
    total = np.zeros((grid.n_y, grid.n_x))
    for net in scenario.networks:
        net_sum = np.zeros_like(total)
        for tx in net.transmitters:
            if tx.active_in(band, quantum):
                net_sum += db_to_linear(tx.tx_power_dbm + tx_gain_db_field(tx, grid, scenario.propagation))
        total += net_sum
    return total


def occupancy_map(scenario: Scenario, band: int, quantum: int) -> PowerField:
    """Occupancy in dBm per cell, clipped to the power bounds.

    Cells reached by no transmission report p_min. Noise is not part of
    occupancy; only transmitted power counts.
    """
    bounds = scenario.bounds
    values = np.clip(
        linear_to_db(occupancy_linear(scenario, band, quantum)),
        bounds.p_min_dbm,
        bounds.p_max_dbm,
    )
    return PowerField(band, quantum, values)


def occupancy_at_cell(scenario: Scenario, band: int, quantum: int, cell: Cell) -> float:
    """Clipped occupancy (dBm) at a single cell, without building the full field."""
    _check_slice(scenario.dims, band, quantum)
    grid, bounds = scenario.grid, scenario.bounds
    center = grid.cell_center(*cell)
    total = 0.0
    for tx in scenario.transmitters():
        if tx.active_in(band, quantum):
            total += db_to_linear(tx.tx_power_dbm) * link_gain_linear(tx, center, scenario.propagation)
    return min(max(linear_to_db(total), bounds.p_min_dbm), bounds.p_max_dbm)


def _signal_and_interference(scenario: Scenario, rx: Receiver, quantum: int) -> tuple[float, float]:
    """Desired linear power and co-channel interference (mW) at a receiver.

    The desired signal comes from the linked transmitter when it is active in
    the slice; every other active transmitter on the band contributes
    interference, accumulated in declaration order.
    """
    signal = 0.0
    interference = 0.0
    for tx in scenario.transmitters():
        if not tx.active_in(rx.band, quantum):
            continue
        power = db_to_linear(tx.tx_power_dbm) * link_gain_linear(
            tx, rx.position, scenario.propagation, rx.pattern
        )
        if tx.id == rx.linked_tx_id:
            signal = power
        else:
            interference += power
    return signal, interference


def sinr_db(scenario: Scenario, rx: Receiver, quantum: int) -> float:
    """SINR of a receiver's own link in a time quantum, in dB.

    -inf when the linked transmitter is silent in that quantum.
    """
    signal, interference = _signal_and_interference(scenario, rx, quantum)
    return linear_to_db(signal / (db_to_linear(rx.noise_floor_dbm) + interference))


def receiver_margin_linear(scenario: Scenario, rx: Receiver, quantum: int) -> float:
    """Extra interference (linear mW) the receiver tolerates before SINR hits beta.

    Zero when the link is already at or below its threshold.
    """
    signal, interference = _signal_and_interference(scenario, rx, quantum)
    tolerable = signal / db_to_linear(rx.beta_db) - db_to_linear(rx.noise_floor_dbm) - interference
    return max(0.0, tolerable)


def opportunity_map(scenario: Scenario, band: int, quantum: int, protected=None) -> PowerField:
    """Maximum dBm a new omni entrant may transmit from each cell.

    The entrant keeps every protected receiver at or above its SINR
    threshold. Cells hosting a protected receiver report p_min; with no
    protected receivers the whole field is p_max. Receivers whose link is
    already below threshold contribute a zero margin (opportunity collapses
    to p_min wherever they are reachable) and are flagged on the result.

    Args:
      scenario: validated world.
      band, quantum: the slice to evaluate.
      protected: receiver ids or Receiver objects; None protects all.
    """
    _check_slice(scenario.dims, band, quantum)
    grid, bounds = scenario.grid, scenario.bounds
    rxs = _resolve_protected(scenario, protected, band, quantum)
    if not rxs:
        return PowerField(band, quantum, np.full((grid.n_y, grid.n_x), float(bounds.p_max_dbm)))

    allowed = np.full((grid.n_y, grid.n_x), np.inf)
    zero_margin = []
    for rx in rxs:
        margin = receiver_margin_linear(scenario, rx, quantum)
        if margin == 0.0:
            zero_margin.append(rx.id)
        gain = entrant_gain_field_linear(rx.position, rx.pattern, grid, scenario.propagation)
        allowed = np.minimum(allowed, margin / gain)

    values = np.clip(linear_to_db(allowed), bounds.p_min_dbm, bounds.p_max_dbm)
    for rx in rxs:
        if grid.contains(rx.position):
            ix, iy = grid.cell_of(rx.position)
            values[iy, ix] = bounds.p_min_dbm
    return PowerField(band, quantum, values, tuple(zero_margin))


def opportunity_at_cell(scenario: Scenario, band: int, quantum: int, cell: Cell,
                        protected=None) -> tuple[float, str | None]:
    """Opportunity at one cell plus the receiver that limits it.

    Returns (dBm value, limiting receiver id). The id is None when no
    protected receiver constrains the slice.
    """
    _check_slice(scenario.dims, band, quantum)
    grid, bounds = scenario.grid, scenario.bounds
    rxs = _resolve_protected(scenario, protected, band, quantum)
    if not rxs:
        return float(bounds.p_max_dbm), None
    for rx in rxs:
        if grid.contains(rx.position) and grid.cell_of(rx.position) == cell:
            return float(bounds.p_min_dbm), rx.id

    center = grid.cell_center(*cell)
    best = np.inf
    limiting = None
    for rx in rxs:
        margin = receiver_margin_linear(scenario, rx, quantum)
        dist = np.hypot(center[0] - rx.position[0], center[1] - rx.position[1])
        gain_db = float(rx.pattern.gain_db(bearing_deg(rx.position, center)))
        gain = db_to_linear(gain_db - path_loss_db(float(dist), scenario.propagation))
        entrant_cap = margin / gain
        if entrant_cap < best:
            best, limiting = entrant_cap, rx.id
    value = min(max(linear_to_db(best), bounds.p_min_dbm), bounds.p_max_dbm)
    return value, limiting


def _slice_lists(dims: SpectrumSpaceDims, bands, quanta) -> tuple[list[int], list[int]]:
    band_list = list(range(dims.b_hat)) if bands is None else sorted(bands)
    quantum_list = list(range(dims.t_hat)) if quanta is None else sorted(quanta)
    for b in band_list:
        _check_slice(dims, b, 0)
    for t in quantum_list:
        _check_slice(dims, 0, t)
    return band_list, quantum_list


def tx_consumption(tx, scenario: Scenario, bands=None, quanta=None) -> ConsumptionSpace:
    """Spectrum consumed by one transmitter: received power above the floor.

    Per cell and slice, clip(received linear power, p_min, p_max) - p_min in
    mW; zero in slices where the transmitter is idle.
    """
    if isinstance(tx, str):
        resolved = scenario.transmitter(tx)
        if resolved is None:
            raise ValueError(f"unknown transmitter {tx!r}")
        tx = resolved
    grid, bounds = scenario.grid, scenario.bounds
    band_list, quantum_list = _slice_lists(scenario.dims, bands, quanta)

    active_field = None
    slices: dict[Slice, np.ndarray] = {}
    for b in band_list:
        for t in quantum_list:
            if tx.active_in(b, t):
                if active_field is None:
                    received = db_to_linear(tx.tx_power_dbm + tx_gain_db_field(tx, grid, scenario.propagation))
                    active_field = np.clip(received, bounds.p_min_linear, bounds.p_max_linear) - bounds.p_min_linear
                slices[(b, t)] = active_field.copy()
            else:
                slices[(b, t)] = np.zeros((grid.n_y, grid.n_x))
    return ConsumptionSpace(frozenset({tx.id}), slices)


def rx_consumption(rx, scenario: Scenario, bands=None, quanta=None) -> ConsumptionSpace:
    """Spectrum a receiver denies to entrants: p_max minus its solo opportunity.

    Computed from the opportunity field with only this receiver protected, so
    a slice where the receiver is idle costs nothing.
    """
    if isinstance(rx, str):
        resolved = scenario.receiver(rx)
        if resolved is None:
            raise ValueError(f"unknown receiver {rx!r}")
        rx = resolved
    bounds = scenario.bounds
    band_list, quantum_list = _slice_lists(scenario.dims, bands, quanta)
    slices: dict[Slice, np.ndarray] = {}
    for b in band_list:
        for t in quantum_list:
            opp = opportunity_map(scenario, b, t, protected=[rx.id])
            slices[(b, t)] = bounds.p_max_linear - db_to_linear(opp.values_dbm)
    return ConsumptionSpace(frozenset({rx.id}), slices)


def denied_consumption(scenario: Scenario, protected=None, bands=None, quanta=None) -> ConsumptionSpace:
    """Power denied to entrants by a whole protected set, jointly.

    Joint denial is not the sum of solo denials; it comes from the combined
    opportunity field.
    """
    bounds = scenario.bounds
    band_list, quantum_list = _slice_lists(scenario.dims, bands, quanta)
    ids: set[str] = set()
    slices: dict[Slice, np.ndarray] = {}
    for b in band_list:
        for t in quantum_list:
            rxs = _resolve_protected(scenario, protected, b, t)
            ids.update(rx.id for rx in rxs)
            opp = opportunity_map(scenario, b, t, protected=[rx.id for rx in rxs])
            slices[(b, t)] = bounds.p_max_linear - db_to_linear(opp.values_dbm)
    return ConsumptionSpace(frozenset(ids), slices)


def combine_consumption(a: ConsumptionSpace, b: ConsumptionSpace, bounds: PowerBounds) -> ConsumptionSpace:
    """Union of two consumption spaces: cell-wise sum, clipped to the point scale.

    The clip means overlapping entities can consume at most p_cmax per cell,
    so quantify(union) never exceeds quantify(a) + quantify(b).
    """
    slices: dict[Slice, np.ndarray] = {}
    for key in sorted(set(a.slices) | set(b.slices)):
        arr_a = a.slices.get(key)
        arr_b = b.slices.get(key)
        if arr_a is None:
            combined = arr_b.copy()
        elif arr_b is None:
            combined = arr_a.copy()
        else:
            combined = arr_a + arr_b
        slices[key] = np.clip(combined, 0.0, bounds.p_cmax_linear)
    return ConsumptionSpace(a.entity_ids | b.entity_ids, slices)


def quantify(space: ConsumptionSpace, grid: Grid, dims: SpectrumSpaceDims | None = None) -> SpectrumQuantity:
    """Integrate a consumption space into watt square meters.

    Each slice contributes sum(cells) * cell_area, converted from mW to W
    once. The per-slice breakdown sums exactly to the total.
    """
    breakdown: dict[Slice, float] = {}
    for key in sorted(space.slices):
        arr = space.slices[key]
        if arr.shape != (grid.n_y, grid.n_x):
            raise ValueError(f"slice {key}: shape {arr.shape} does not match grid ({grid.n_y}, {grid.n_x})")
        if dims is not None:
            _check_slice(dims, *key)
        breakdown[key] = float(np.sum(arr)) * grid.cell_area / 1000.0
    return SpectrumQuantity(sum(breakdown.values()), breakdown)


def total_spectrum(grid: Grid, dims: SpectrumSpaceDims, bounds: PowerBounds) -> SpectrumQuantity:
    """Total quantified spectrum of the discretized space, in W m^2."""
    value = (bounds.p_cmax_linear / 1000.0) * grid.cell_area * grid.a_hat * dims.b_hat * dims.t_hat
    return SpectrumQuantity(value)


def available_spectrum(scenario: Scenario, protected=None) -> SpectrumQuantity:
    """Spectrum still open to entrants across every slice, in W m^2.

    Integrates the opportunity field above the floor. With nothing protected
    this equals total_spectrum.
    """
    grid, bounds, dims = scenario.grid, scenario.bounds, scenario.dims
    breakdown: dict[Slice, float] = {}
    for b in range(dims.b_hat):
        for t in range(dims.t_hat):
            opp = opportunity_map(scenario, b, t, protected)
            above = db_to_linear(opp.values_dbm) - bounds.p_min_linear
            breakdown[(b, t)] = float(np.sum(above)) * grid.cell_area / 1000.0
    return SpectrumQuantity(sum(breakdown.values()), breakdown)


def harvest_metrics(estimated: PowerField, truth: PowerField, grid: Grid,
                    bounds: PowerBounds) -> HarvestMetrics:
    """Score an estimated opportunity field against the ground truth.

    recovered counts opportunity the estimate correctly exposed,
    lost_available what it missed, potentially_incursed what it overstated,
    all as linear power above the floor integrated over cell area.
    """
    if (estimated.band, estimated.quantum) != (truth.band, truth.quantum):
        raise ValueError(
            f"slice mismatch: estimated ({estimated.band}, {estimated.quantum}) "
            f"vs truth ({truth.band}, {truth.quantum})"
        )
    if estimated.values_dbm.shape != truth.values_dbm.shape:
        raise ValueError(
            f"shape mismatch: {estimated.values_dbm.shape} vs {truth.values_dbm.shape}"
        )
    key = (estimated.band, estimated.quantum)
    est = db_to_linear(estimated.values_dbm) - bounds.p_min_linear
    tru = db_to_linear(truth.values_dbm) - bounds.p_min_linear
    scale = grid.cell_area / 1000.0

    def q(cells: np.ndarray) -> SpectrumQuantity:
        v = float(np.sum(cells)) * scale
        return SpectrumQuantity(v, {key: v})

    return HarvestMetrics(
        recovered=q(np.minimum(est, tru)),
        lost_available=q(np.maximum(0.0, tru - est)),
        potentially_incursed=q(np.maximum(0.0, est - tru)),
    )
